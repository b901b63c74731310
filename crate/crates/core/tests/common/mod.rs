#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotor_pair::{SkewMatrix, Vector3};

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_skew(rng: &mut impl Rng, n: usize, scale: f64) -> SkewMatrix<f64> {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(-scale..scale)).collect();
    SkewMatrix::from_upper(n, &upper).unwrap()
}

pub fn random_vector(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn to_dense(m: &SkewMatrix<f64>) -> Dense {
    m.dense().rows()
}

pub fn mul(x: &Dense, y: &Dense) -> Dense {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    out
}

pub fn lin(a: f64, x: &Dense, b: f64, y: &Dense) -> Dense {
    x.iter()
        .zip(y)
        .map(|(r, s)| r.iter().zip(s).map(|(p, q)| a * p + b * q).collect())
        .collect()
}

pub fn max_diff(x: &Dense, y: &Dense) -> f64 {
    x.iter()
        .flatten()
        .zip(y.iter().flatten())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(x: &Dense) -> f64 {
    x.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `XY - YX + eps (X C^2 Y - Y C^2 X)` by plain triple loops.
pub fn dense_deformed(x: &Dense, y: &Dense, c: &Dense, eps: f64) -> Dense {
    let c2 = mul(c, c);
    let comm = lin(1.0, &mul(x, y), -1.0, &mul(y, x));
    let def = lin(1.0, &mul(&mul(x, &c2), y), -1.0, &mul(&mul(y, &c2), x));
    lin(1.0, &comm, eps, &def)
}

/// `exp(t w hat(axis)) v` for a unit axis, by Rodrigues' formula.
pub fn rodrigues(axis: Vector3<f64>, angle: f64, v: Vector3<f64>) -> Vector3<f64> {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}
