//! Norm of the pointwise product space `GH`.
//!
//! With `x = |z|^{1/2} e^{s}` and `y = |z|^{1/2} e^{-s}` every factorization of
//! `|z|` is reached, and `s ↦ log‖x‖_G + log‖y‖_H` is convex (Banach lattice
//! norms are log-convex along geometric interpolation), so descent from the
//! balanced split `s = 0` finds the infimum.

use serde::{Deserialize, Serialize};

use super::eval::{norm_abs, subgrad_abs, GaugeOptions};
use super::spec::GaugeSpec;
use crate::numeric::{Estimate, Quality};
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductOptions {
    /// Use `ℓ_a · ℓ_b = ℓ_c` when both factors resolve to `ℓ_p`.
    pub closed_form: bool,
    pub iterations: usize,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions { closed_form: true, iterations: 2000 }
    }
}

pub(crate) fn product_numeric<T: Real>(g: &GaugeSpec, h: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> Estimate<T> {
    let support: Vec<usize> = (0..a.len()).filter(|&i| a[i] > T::zero()).collect();
    if support.is_empty() {
        return Estimate::exact(T::zero());
    }
    let root: Vec<T> = support.iter().map(|&i| a[i].sqrt()).collect();
    let n = a.len();
    let eval = |s: &[T]| -> (T, T, T, Vec<T>, Vec<T>) {
        let mut x = vec![T::zero(); n];
        let mut y = vec![T::zero(); n];
        for (k, &i) in support.iter().enumerate() {
            x[i] = root[k] * s[k].exp();
            y[i] = root[k] * (-s[k]).exp();
        }
        let nx = norm_abs(g, &x, opts);
        let ny = norm_abs(h, &y, opts);
        (nx.ln() + ny.ln(), nx, ny, x, y)
    };
    let mut s = vec![T::zero(); support.len()];
    let (mut phi, mut nx, mut ny, mut x, mut y) = eval(&s);
    let mut t = T::one();
    let mut converged = false;
    for _ in 0..opts.product.iterations {
        let gx = subgrad_abs(g, &x, opts);
        let gy = subgrad_abs(h, &y, opts);
        let grad: Vec<T> = support.iter().map(|&i| gx[i] * x[i] / nx - gy[i] * y[i] / ny).collect();
        let gg = grad.iter().fold(T::zero(), |acc, &v| acc + v * v);
        if gg <= T::lit(1e-28) {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..50 {
            let sn: Vec<T> = s.iter().zip(&grad).map(|(&si, &gi)| si - t * gi).collect();
            let next = eval(&sn);
            if next.0 <= phi - T::lit(1e-4) * t * gg {
                let gain = phi - next.0;
                s = sn;
                (phi, nx, ny, x, y) = next;
                accepted = true;
                t *= T::lit(2.0);
                if gain <= T::lit(1e-15) {
                    converged = true;
                }
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    let quality = if converged { Quality::Converged } else { Quality::UpperBound };
    Estimate { value: nx * ny, quality }
}
