//! Seeded random matrices for tests, probes and verification suites.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ideal::OperatorTuple;
use crate::scalar::{cplx, Real};
use crate::CMatrix;

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian<T: Real, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(T::lit(re), T::lit(im))
    })
}

/// Real matrix with standard normal entries.
pub fn gaussian_real<T: Real, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| cplx(T::lit(rng.sample(StandardNormal)), T::zero()))
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn unitary<T: Real, R: Rng>(n: usize, rng: &mut R) -> CMatrix<T> {
    let g: CMatrix<T> = gaussian(n, n, rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.re.hypot(d.im);
        let ph = if m > T::zero() { d.unscale(m) } else { Complex::new(T::one(), T::zero()) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// `n` Gaussian `d × d` matrices.
pub fn tuple<T: Real, R: Rng>(n: usize, d: usize, rng: &mut R) -> OperatorTuple<T> {
    OperatorTuple::new((0..n).map(|_| gaussian(d, d, rng)).collect()).expect("nonempty homogeneous tuple")
}
