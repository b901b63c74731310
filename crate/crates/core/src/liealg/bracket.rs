//! Brackets on so(n): the matrix commutator and its state-dependent deformation.
//!
//! The deformed bracket `[X,Y]_A = XY - YX + eps (X A^2 Y - Y A^2 X)` is the commutator
//! of the associative product `P . Q = P (1 + eps A^2) Q`, so for every fixed `A` it is a
//! Lie bracket. Both products are formed explicitly and subtracted, then the result is
//! re-skewed, which makes `[X,Y]_A = -[Y,X]_A` hold bit for bit.

use crate::error::{check_dim, Result};
use crate::liealg::dense::Mat;
use crate::liealg::skew::SkewMatrix;
use crate::scalar::Real;

/// `XY - YX`.
pub fn commutator<T: Real>(x: &SkewMatrix<T>, y: &SkewMatrix<T>) -> Result<SkewMatrix<T>> {
    check_dim(x.n(), y.n())?;
    let xy = x.dense() * y.dense();
    let yx = y.dense() * x.dense();
    Ok(SkewMatrix::antisymmetrize(&(&xy - &yx)).0)
}

/// `(1 + eps A^2)`, with `A^2` formed as an explicit product.
fn mutation_metric<T: Real>(a: &SkewMatrix<T>, eps: T) -> Mat<T> {
    let a2 = a.dense() * a.dense();
    &Mat::identity(a.n()) + &a2.scale(eps)
}

fn mutated_commutator<T: Real>(
    x: &SkewMatrix<T>,
    y: &SkewMatrix<T>,
    metric: &Mat<T>,
) -> SkewMatrix<T> {
    let xmy = &(x.dense() * metric) * y.dense();
    let ymx = &(y.dense() * metric) * x.dense();
    SkewMatrix::antisymmetrize(&(&xmy - &ymx)).0
}

/// The bracket on the first space parameterized by the state `a` of the second:
/// `XY - YX + eps (X A^2 Y - Y A^2 X)`.
pub fn deformed_bracket_v1<T: Real>(
    x: &SkewMatrix<T>,
    y: &SkewMatrix<T>,
    a: &SkewMatrix<T>,
    eps: T,
) -> Result<SkewMatrix<T>> {
    check_dim(x.n(), y.n())?;
    check_dim(x.n(), a.n())?;
    Ok(mutated_commutator(x, y, &mutation_metric(a, eps)))
}

/// The bracket on the second space parameterized by the state `x` of the first:
/// `AB - BA + eps (A X^2 B - B X^2 A)`.
pub fn deformed_bracket_v2<T: Real>(
    a: &SkewMatrix<T>,
    b: &SkewMatrix<T>,
    x: &SkewMatrix<T>,
    eps: T,
) -> Result<SkewMatrix<T>> {
    check_dim(a.n(), b.n())?;
    check_dim(a.n(), x.n())?;
    Ok(mutated_commutator(a, b, &mutation_metric(x, eps)))
}

/// The invariant pairing `<X,Y> = Tr(XY)`; negative definite on so(n).
pub fn trace_pairing<T: Real>(x: &SkewMatrix<T>, y: &SkewMatrix<T>) -> Result<T> {
    x.dense().trace_of_product(y.dense())
}

/// Max-norm of `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]` under `bracket`.
pub fn jacobi_residual<T, F>(
    bracket: F,
    x: &SkewMatrix<T>,
    y: &SkewMatrix<T>,
    z: &SkewMatrix<T>,
) -> Result<T>
where
    T: Real,
    F: Fn(&SkewMatrix<T>, &SkewMatrix<T>) -> Result<SkewMatrix<T>>,
{
    Ok(jacobi_terms(&bracket, x, y, z)?.0)
}

/// Jacobi residual divided by the largest of its three cyclic terms (floored at 1e-14).
pub fn jacobi_relative_residual<T, F>(
    bracket: F,
    x: &SkewMatrix<T>,
    y: &SkewMatrix<T>,
    z: &SkewMatrix<T>,
) -> Result<T>
where
    T: Real,
    F: Fn(&SkewMatrix<T>, &SkewMatrix<T>) -> Result<SkewMatrix<T>>,
{
    let (residual, scale) = jacobi_terms(&bracket, x, y, z)?;
    Ok(residual / scale.max(T::lit(1e-14)))
}

fn jacobi_terms<T, F>(
    bracket: &F,
    x: &SkewMatrix<T>,
    y: &SkewMatrix<T>,
    z: &SkewMatrix<T>,
) -> Result<(T, T)>
where
    T: Real,
    F: Fn(&SkewMatrix<T>, &SkewMatrix<T>) -> Result<SkewMatrix<T>>,
{
    check_dim(x.n(), y.n())?;
    check_dim(x.n(), z.n())?;
    let t1 = bracket(x, &bracket(y, z)?)?;
    let t2 = bracket(y, &bracket(z, x)?)?;
    let t3 = bracket(z, &bracket(x, y)?)?;
    let scale = t1.max_abs().max(t2.max_abs()).max(t3.max_abs());
    let sum = t1.checked_add(&t2)?.checked_add(&t3)?;
    Ok((sum.max_abs(), scale))
}
