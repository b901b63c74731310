//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

/// Kronrod estimate and |Kronrod - Gauss| on one interval.
fn gk15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss += pair * T::lit(WG[i / 2]);
        }
    }
    (kronrod * radius, ((kronrod - gauss) * radius).abs())
}

/// Integrates `f` over `[a, b]` (either orientation) to within
/// `max(abs_tol, rel_tol * |integral|)` estimated error.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numeric { t: f64::NAN, what: "quadrature bounds not finite".into() });
    }
    let (v, e) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !(total.is_finite() && err.is_finite()) {
            return Err(Error::Numeric { t: f64::NAN, what: "non-finite integrand".into() });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Numeric {
                t: f64::NAN,
                what: format!("quadrature did not converge (error estimate {err:e})"),
            });
        }
        // bisect the interval with the largest error estimate
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, v0, e0) = intervals.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total = total - v0 + v1 + v2;
        err = err - e0 + e1 + e2;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // re-sum to shed the drift of the running update
    Ok(intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2))
}
