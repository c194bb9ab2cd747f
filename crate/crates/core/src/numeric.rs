//! Optimizer outcomes and the small convex-optimization kernels shared by the
//! gauge, Khintchine and Schur modules.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// How much a numerically obtained value can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    ClosedForm,
    /// Optimizer met its stopping tolerance (or a certificate closed the gap).
    Converged,
    /// Budget exhausted; the value is a lower bound on the true quantity.
    LowerBound,
    /// Budget exhausted; the value is an upper bound on the true quantity.
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub quality: Quality,
}

impl<T: Real> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Estimate { value, quality: Quality::ClosedForm }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.quality, Quality::ClosedForm | Quality::Converged)
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex<T: Real>(y: &[T]) -> Vec<T> {
    let mut u: Vec<T> = y.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = T::zero();
    let mut theta = T::zero();
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - T::one()) / T::from_usize(i + 1).unwrap();
        if ui - t > T::zero() {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(T::zero())).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EllipsoidOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Certified lower bound on the minimum over the box.
    pub lower: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-cut ellipsoid method with deep cuts for `min f(x)` over the box
/// `lo ≤ x ≤ hi`. `oracle(x)` returns `(f(x), g)` with `g ∈ ∂f(x)`.
///
/// The optimum never leaves the ellipsoid, so `f(x_k) - sqrt(gᵀPg)` is a
/// valid lower bound; the routine stops once `best - lower ≤ rel_tol·best`.
pub fn ellipsoid_minimize<T, F>(lo: &[T], hi: &[T], x0: Option<&[T]>, rel_tol: T, budget: usize, mut oracle: F) -> EllipsoidOutcome<T>
where
    T: Real,
    F: FnMut(&[T]) -> (T, Vec<T>),
{
    let d = lo.len();
    let mut x: Vec<T> = lo.iter().zip(hi).map(|(&l, &h)| (l + h) * T::lit(0.5)).collect();
    let mut best_x = x0.map(|v| v.to_vec()).unwrap_or_else(|| x.clone());
    let (mut best, _) = oracle(&best_x);
    let mut lower = T::lit(f64::NEG_INFINITY);
    if d == 0 {
        return EllipsoidOutcome { x: best_x, value: best, lower: best, iterations: 0, converged: true };
    }
    let df = T::from_usize(d).unwrap();
    // Axis-aligned ellipsoid Σ (x_i - c_i)^2 / (d w_i^2) ≤ 1 contains the box.
    let mut p = vec![T::zero(); d * d];
    for i in 0..d {
        let w = (hi[i] - lo[i]) * T::lit(0.5);
        p[i * d + i] = df * (w * w).max(T::lit(1e-300));
    }
    let mut iters = 0;
    let mut converged = false;
    let mut pg = vec![T::zero(); d];
    while iters < budget {
        iters += 1;
        // feasibility cut for the box
        let mut g = vec![T::zero(); d];
        let alpha_num;
        let mut fx_cut = T::zero();
        let mut objective_cut = false;
        if let Some(i) = (0..d).find(|&i| x[i] > hi[i]) {
            g[i] = T::one();
            alpha_num = x[i] - hi[i];
        } else if let Some(i) = (0..d).find(|&i| x[i] < lo[i]) {
            g[i] = -T::one();
            alpha_num = lo[i] - x[i];
        } else {
            let (fx, gx) = oracle(&x);
            if fx < best {
                best = fx;
                best_x.clone_from(&x);
            }
            g = gx;
            alpha_num = fx - best;
            fx_cut = fx;
            objective_cut = true;
        }
        for i in 0..d {
            let mut s = T::zero();
            for j in 0..d {
                s += p[i * d + j] * g[j];
            }
            pg[i] = s;
        }
        let gpg: T = g.iter().zip(&pg).fold(T::zero(), |a, (&gi, &pi)| a + gi * pi);
        if gpg <= T::zero() || !gpg.is_finite() {
            if objective_cut && g.iter().all(|&v| v == T::zero()) {
                // zero subgradient: the current point is optimal
                lower = best;
                converged = true;
            }
            break;
        }
        let root = gpg.sqrt();
        if objective_cut {
            lower = lower.max(fx_cut - root);
            if best - lower <= rel_tol * best.abs().max(T::lit(1e-300)) {
                converged = true;
                break;
            }
        }
        let alpha = (alpha_num / root).min(T::lit(0.999_999));
        if d == 1 {
            // interval [x - r, x + r] cut to one side
            let r = p[0].sqrt();
            x[0] -= sign_of(g[0]) * r * (T::one() + alpha) * T::lit(0.5);
            let r = r * (T::one() - alpha) * T::lit(0.5);
            p[0] = r * r;
            continue;
        }
        let gt: Vec<T> = pg.iter().map(|&v| v / root).collect();
        let step = (T::one() + df * alpha) / (df + T::one());
        for i in 0..d {
            x[i] -= step * gt[i];
        }
        let scale = df * df * (T::one() - alpha * alpha) / (df * df - T::one());
        let coef = T::lit(2.0) * (T::one() + df * alpha) / ((df + T::one()) * (T::one() + alpha));
        for i in 0..d {
            for j in 0..d {
                p[i * d + j] = scale * (p[i * d + j] - coef * gt[i] * gt[j]);
            }
        }
        for i in 0..d {
            for j in 0..i {
                let s = (p[i * d + j] + p[j * d + i]) * T::lit(0.5);
                p[i * d + j] = s;
                p[j * d + i] = s;
            }
        }
    }
    if lower > best {
        lower = best;
    }
    EllipsoidOutcome { x: best_x, value: best, lower, iterations: iters, converged }
}

fn sign_of<T: Real>(x: T) -> T {
    if x < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

#[derive(Clone, Debug)]
pub struct SubgradientOutcome<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    /// Objective value after every accepted improvement (nonincreasing).
    pub accepted: Vec<T>,
    pub converged: bool,
}

/// Projected subgradient method with Polyak steps toward an adaptive target
/// level `max(lower, best - δ)`; `δ` is halved (and the iterate reset to the
/// best point) whenever `patience` steps pass without reaching the target.
///
/// `lower` may be refreshed by the oracle's third return value (a certified
/// lower bound, or `-∞`). Stops once `best - lower ≤ rel_tol·best`.
pub fn polyak_minimize<T, F, P>(
    x0: Vec<T>,
    rel_tol: T,
    budget: usize,
    patience: usize,
    mut oracle: F,
    mut project: P,
) -> SubgradientOutcome<T>
where
    T: Real,
    F: FnMut(&[T]) -> (T, Vec<T>, T),
    P: FnMut(&mut [T]),
{
    let mut x = x0;
    project(&mut x);
    let (f0, mut g, lb0) = oracle(&x);
    let mut fx = f0;
    let mut lower = lb0;
    let mut best = f0;
    let mut best_x = x.clone();
    let mut accepted = vec![f0];
    let mut delta = (f0.abs() * T::lit(0.1)).max(T::lit(1e-12));
    let mut since = 0usize;
    let mut iters = 0usize;
    let mut converged = false;
    let tiny = T::lit(1e-300);
    while iters < budget {
        if best - lower <= rel_tol * best.abs().max(tiny) {
            converged = true;
            break;
        }
        let gg: T = g.iter().fold(T::zero(), |a, &v| a + v * v);
        if gg <= tiny {
            // stationary
            converged = true;
            break;
        }
        let level = lower.max(best - delta);
        let step = (fx - level).max(T::zero()) / gg;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * *gi;
        }
        project(&mut x);
        iters += 1;
        let (f, gn, lb) = oracle(&x);
        fx = f;
        g = gn;
        if lb > lower {
            lower = lb;
        }
        if f < best {
            let reached = f <= best - delta * T::lit(0.5);
            best = f;
            best_x.clone_from(&x);
            accepted.push(f);
            if reached {
                since = 0;
                delta *= T::lit(1.5);
                continue;
            }
        }
        since += 1;
        if since >= patience {
            since = 0;
            delta *= T::lit(0.5);
            if delta < rel_tol * best.abs() * T::lit(1e-3) {
                converged = lower > T::lit(f64::NEG_INFINITY) && best - lower <= rel_tol * best.abs().max(tiny) * T::lit(10.0);
                break;
            }
            x.clone_from(&best_x);
            let (f, gn, _) = oracle(&x);
            fx = f;
            g = gn;
        }
    }
    SubgradientOutcome { x: best_x, value: best, iterations: iters, accepted, converged }
}
