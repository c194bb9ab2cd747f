//! Norms of Köthe spaces on the grid, evaluated on finite matrices.
//!
//! All spaces here are lattices, so a norm depends only on `|z|` and a sum
//! space infimum is attained at a decomposition `x = θ∘z`, `y = (1-θ)∘z` with
//! `θ ∈ [0,1]`. For `G(ℓ_∞) + ᵗH(ℓ_∞)` the split reduces further to one
//! budget per row: with row budgets `a`, the row part keeps `min(|z_ij|, a_i)`
//! and the column part `(|z_ij| - a_i)_+`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::eval::{lp_norm, lp_subgrad, norm_abs, subgrad_abs, GaugeOptions};
use super::spec::{GaugeSpec, KfsSpec};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::numeric::{ellipsoid_minimize, polyak_minimize, Quality};
use crate::scalar::{cabs, Real};
use crate::CMatrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KfsOptions {
    /// Relative gap at which a sum-space value counts as certified.
    pub tol: f64,
    /// Iteration budget for sum-space minimization; by default
    /// `max(5000, 50·d·(d+1))` for `d` split variables.
    pub budget: Option<usize>,
    /// Largest split dimension handled by the ellipsoid method.
    pub ellipsoid_max_dim: usize,
    pub gauge: GaugeOptions,
}

impl Default for KfsOptions {
    fn default() -> Self {
        KfsOptions { tol: 1e-6, budget: None, ellipsoid_max_dim: 48, gauge: GaugeOptions::default() }
    }
}

/// Decomposition `z = x + y` realizing a sum-space value.
#[derive(Clone, Debug)]
pub struct Split<T: Real> {
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct KfsNorm<T: Real> {
    /// Norm value; an upper bound for sum spaces.
    pub value: T,
    /// Certified lower bound (equal to `value` for direct evaluations).
    pub lower: T,
    pub quality: Quality,
    pub iterations: usize,
    /// Optimal split when the top-level space is a sum.
    pub split: Option<Split<T>>,
}

pub fn kfs_norm<T: Real>(spec: &KfsSpec, z: &CMatrix<T>) -> Result<KfsNorm<T>> {
    kfs_norm_with(spec, z, &KfsOptions::default())
}

pub fn kfs_norm_with<T: Real>(spec: &KfsSpec, z: &CMatrix<T>, opts: &KfsOptions) -> Result<KfsNorm<T>> {
    spec.validate()?;
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let c = z.map(cabs);
    if let KfsSpec::Sum(x, y) = spec {
        let s = solve_sum(x, y, &c, opts);
        let theta = s.theta;
        let xm = CMatrix::<T>::from_fn(z.nrows(), z.ncols(), |i, j| z[(i, j)].scale(theta[(i, j)]));
        let ym = z - &xm;
        return Ok(KfsNorm {
            value: s.value,
            lower: s.lower,
            quality: s.quality,
            iterations: s.iterations,
            split: Some(Split { x: xm, y: ym }),
        });
    }
    let b = bounds(spec, &c, opts);
    Ok(KfsNorm { value: b.value, lower: b.lower, quality: b.quality, iterations: b.iterations, split: None })
}

struct Bounds<T> {
    value: T,
    lower: T,
    quality: Quality,
    iterations: usize,
}

fn worse(a: Quality, b: Quality) -> Quality {
    use Quality::*;
    match (a, b) {
        (UpperBound, _) | (_, UpperBound) => UpperBound,
        (LowerBound, _) | (_, LowerBound) => LowerBound,
        (Converged, _) | (_, Converged) => Converged,
        _ => ClosedForm,
    }
}

fn bounds<T: Real>(spec: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> Bounds<T> {
    match spec {
        KfsSpec::Sum(x, y) => {
            let s = solve_sum(x, y, c, opts);
            Bounds { value: s.value, lower: s.lower, quality: s.quality, iterations: s.iterations }
        }
        KfsSpec::Intersect(x, y) => {
            let bx = bounds(x, c, opts);
            let by = bounds(y, c, opts);
            Bounds {
                value: bx.value.max(by.value),
                lower: bx.lower.max(by.lower),
                quality: worse(bx.quality, by.quality),
                iterations: bx.iterations + by.iterations,
            }
        }
        KfsSpec::Transpose(x) => bounds(x, &c.transpose(), opts),
        _ => {
            let v = direct(spec, c, opts);
            Bounds { value: v, lower: v, quality: Quality::ClosedForm, iterations: 0 }
        }
    }
}

/// Upper-bound evaluation on a nonnegative matrix.
fn value<T: Real>(spec: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> T {
    match spec {
        KfsSpec::Sum(..) | KfsSpec::Intersect(..) | KfsSpec::Transpose(..) => bounds(spec, c, opts).value,
        _ => direct(spec, c, opts),
    }
}

fn row_norms<T: Real>(c: &DMatrix<T>, p: Exponent) -> Vec<T> {
    (0..c.nrows()).map(|i| lp_norm(&c.row(i).iter().copied().collect::<Vec<_>>(), p)).collect()
}

fn direct<T: Real>(spec: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> T {
    match spec {
        KfsSpec::MixedRow(g, p) => norm_abs(g, &row_norms(c, *p), &opts.gauge),
        KfsSpec::L2Grid => lp_norm(c.as_slice(), Exponent::TWO),
        KfsSpec::LpGrid(p) => lp_norm(c.as_slice(), *p),
        _ => unreachable!("composite spaces are handled by bounds()"),
    }
}

/// Nonnegative subgradient at a nonnegative matrix.
fn subgrad<T: Real>(spec: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> DMatrix<T> {
    match spec {
        KfsSpec::MixedRow(g, p) => {
            let rows = row_norms(c, *p);
            let outer = subgrad_abs(g, &rows, &opts.gauge);
            let mut out = DMatrix::zeros(c.nrows(), c.ncols());
            for i in 0..c.nrows() {
                let row: Vec<T> = c.row(i).iter().copied().collect();
                let inner = lp_subgrad(&row, *p);
                for j in 0..c.ncols() {
                    out[(i, j)] = outer[i] * inner[j];
                }
            }
            out
        }
        KfsSpec::L2Grid | KfsSpec::LpGrid(_) => {
            let p = if let KfsSpec::LpGrid(p) = spec { *p } else { Exponent::TWO };
            DMatrix::from_vec(c.nrows(), c.ncols(), lp_subgrad(c.as_slice(), p))
        }
        KfsSpec::Transpose(x) => subgrad(x, &c.transpose(), opts).transpose(),
        KfsSpec::Intersect(x, y) => {
            if value(x, c, opts) >= value(y, c, opts) {
                subgrad(x, c, opts)
            } else {
                subgrad(y, c, opts)
            }
        }
        // a subgradient of the first summand at its optimal part
        KfsSpec::Sum(x, y) => {
            let s = solve_sum(x, y, c, opts);
            subgrad(x, &s.theta.component_mul(c), opts)
        }
    }
}

struct SumSolution<T: Real> {
    value: T,
    lower: T,
    quality: Quality,
    iterations: usize,
    /// Share of each entry assigned to the first summand.
    theta: DMatrix<T>,
}

fn mixed_inf(spec: &KfsSpec) -> Option<&GaugeSpec> {
    match spec {
        KfsSpec::MixedRow(g, Exponent::Infinite) => Some(g),
        _ => None,
    }
}

fn transposed_mixed_inf(spec: &KfsSpec) -> Option<&GaugeSpec> {
    match spec {
        KfsSpec::Transpose(x) => mixed_inf(x),
        _ => None,
    }
}

fn solve_sum<T: Real>(x: &KfsSpec, y: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> SumSolution<T> {
    if c.iter().all(|&v| v == T::zero()) {
        return SumSolution {
            value: T::zero(),
            lower: T::zero(),
            quality: Quality::ClosedForm,
            iterations: 0,
            theta: DMatrix::from_element(c.nrows(), c.ncols(), T::one()),
        };
    }
    let mut sol = if let (Some(g), Some(h)) = (mixed_inf(x), transposed_mixed_inf(y)) {
        solve_row_budget(g, h, c, opts)
    } else if let (Some(h), Some(g)) = (transposed_mixed_inf(x), mixed_inf(y)) {
        let mut s = solve_row_budget(g, h, c, opts);
        s.theta = s.theta.map(|t| T::one() - t);
        s
    } else {
        solve_theta(x, y, c, opts)
    };
    let dual = holder_lower(x, y, c, &sol.theta, opts);
    if dual > sol.lower {
        sol.lower = dual.min(sol.value);
    }
    let tol = T::lit(opts.tol);
    if sol.value - sol.lower <= tol * sol.value {
        sol.quality = Quality::Converged;
    }
    sol
}

fn budget_for(d: usize, opts: &KfsOptions) -> usize {
    opts.budget.unwrap_or_else(|| 5000.max(50 * d * (d + 1)))
}

/// Minimizes `‖a‖_G + ‖(max_i (c_ij - a_i)_+)_j‖_H` over row budgets `a`.
fn solve_row_budget<T: Real>(g: &GaugeSpec, h: &GaugeSpec, c: &DMatrix<T>, opts: &KfsOptions) -> SumSolution<T> {
    let (r, k) = c.shape();
    let row_max: Vec<T> = (0..r).map(|i| c.row(i).iter().fold(T::zero(), |m, &v| m.max(v))).collect();
    let vars: Vec<usize> = (0..r).filter(|&i| row_max[i] > T::zero()).collect();
    let full = |av: &[T]| {
        let mut a = vec![T::zero(); r];
        for (t, &i) in vars.iter().enumerate() {
            a[i] = av[t].max(T::zero()).min(row_max[i]);
        }
        a
    };
    let oracle = |av: &[T]| -> (T, Vec<T>) {
        let a = full(av);
        let mut b = vec![T::zero(); k];
        let mut who = vec![usize::MAX; k];
        for j in 0..k {
            for i in 0..r {
                let e = c[(i, j)] - a[i];
                if e > b[j] {
                    b[j] = e;
                    who[j] = i;
                }
            }
        }
        let f = norm_abs(g, &a, &opts.gauge) + norm_abs(h, &b, &opts.gauge);
        let ga = subgrad_abs(g, &a, &opts.gauge);
        let gb = subgrad_abs(h, &b, &opts.gauge);
        let mut grad = ga;
        for j in 0..k {
            if who[j] != usize::MAX {
                grad[who[j]] -= gb[j];
            }
        }
        (f, vars.iter().map(|&i| grad[i]).collect())
    };
    let d = vars.len();
    let lo = vec![T::zero(); d];
    let hi: Vec<T> = vars.iter().map(|&i| row_max[i]).collect();
    // warm starts: everything to rows, everything to columns, half, and the
    // upper-triangular assignment
    let tri: Vec<T> = vars
        .iter()
        .map(|&i| (i..k).fold(T::zero(), |m, j| m.max(c[(i, j)])))
        .collect();
    let half: Vec<T> = hi.iter().map(|&v| v * T::lit(0.5)).collect();
    let starts = [hi.clone(), lo.clone(), half, tri];
    let mut oracle = oracle;
    let x0 = best_start(&starts, &mut oracle);
    let (xbest, value, lower, iterations) = minimize(&lo, &hi, x0, opts, &mut oracle);
    let a = full(&xbest);
    let theta = DMatrix::from_fn(r, k, |i, j| {
        let cij = c[(i, j)];
        if cij > T::zero() {
            cij.min(a[i]) / cij
        } else {
            T::one()
        }
    });
    SumSolution { value, lower, quality: Quality::UpperBound, iterations, theta }
}

/// General split `x = θ∘c`, `y = (1-θ)∘c` over the support of `c`.
fn solve_theta<T: Real>(x: &KfsSpec, y: &KfsSpec, c: &DMatrix<T>, opts: &KfsOptions) -> SumSolution<T> {
    let (r, k) = c.shape();
    let support: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..r).map(move |i| (i, j))).filter(|&(i, j)| c[(i, j)] > T::zero()).collect();
    let build = |th: &[T]| {
        let mut t = DMatrix::from_element(r, k, T::one());
        for (s, &(i, j)) in support.iter().enumerate() {
            t[(i, j)] = th[s].max(T::zero()).min(T::one());
        }
        t
    };
    let mut oracle = |th: &[T]| -> (T, Vec<T>) {
        let t = build(th);
        let xm = t.component_mul(c);
        let ym = c - &xm;
        let f = value(x, &xm, opts) + value(y, &ym, opts);
        let gx = subgrad(x, &xm, opts);
        let gy = subgrad(y, &ym, opts);
        let grad = support.iter().map(|&(i, j)| c[(i, j)] * (gx[(i, j)] - gy[(i, j)])).collect();
        (f, grad)
    };
    let d = support.len();
    let lo = vec![T::zero(); d];
    let hi = vec![T::one(); d];
    let tri: Vec<T> = support.iter().map(|&(i, j)| if i <= j { T::one() } else { T::zero() }).collect();
    let starts = [hi.clone(), lo.clone(), vec![T::lit(0.5); d], tri];
    let x0 = best_start(&starts, &mut oracle);
    let (xbest, value, lower, iterations) = minimize(&lo, &hi, x0, opts, &mut oracle);
    SumSolution { value, lower, quality: Quality::UpperBound, iterations, theta: build(&xbest) }
}

fn best_start<T: Real, F: FnMut(&[T]) -> (T, Vec<T>)>(starts: &[Vec<T>], oracle: &mut F) -> Vec<T> {
    let mut best = 0;
    let mut fbest = T::lit(f64::INFINITY);
    for (s, x) in starts.iter().enumerate() {
        let f = oracle(x).0;
        if f < fbest {
            fbest = f;
            best = s;
        }
    }
    starts[best].clone()
}

/// Returns `(argmin, value, certified lower bound, iterations)`.
fn minimize<T: Real, F: FnMut(&[T]) -> (T, Vec<T>)>(lo: &[T], hi: &[T], x0: Vec<T>, opts: &KfsOptions, oracle: &mut F) -> (Vec<T>, T, T, usize) {
    let d = lo.len();
    let tol = T::lit(opts.tol * 0.1);
    let budget = budget_for(d, opts);
    if d <= opts.ellipsoid_max_dim {
        let out = ellipsoid_minimize(lo, hi, Some(&x0), tol, budget, &mut *oracle);
        return (out.x, out.value, out.lower, out.iterations);
    }
    let out = polyak_minimize(
        x0,
        tol,
        budget,
        50,
        |x: &[T]| {
            let (f, g) = oracle(x);
            (f, g, T::lit(f64::NEG_INFINITY))
        },
        |x: &mut [T]| {
            for (v, (&l, &h)) in x.iter_mut().zip(lo.iter().zip(hi)) {
                *v = v.max(l).min(h);
            }
        },
    );
    (out.x, out.value, T::zero(), out.iterations)
}

/// Hölder certificate: for `W ≥ 0` with `‖W‖_{X'}, ‖W‖_{Y'} ≤ 1`,
/// `‖z‖_{X+Y} ≥ ⟨W, |z|⟩`. Candidates are the summands' subgradients at the
/// split found.
fn holder_lower<T: Real>(x: &KfsSpec, y: &KfsSpec, c: &DMatrix<T>, theta: &DMatrix<T>, opts: &KfsOptions) -> T {
    let xm = theta.component_mul(c);
    let ym = c - &xm;
    let xd = x.dual();
    let yd = y.dual();
    let mut best = T::zero();
    for w in [subgrad(x, &xm, opts), subgrad(y, &ym, opts)] {
        let scale = value(&xd, &w, opts).max(value(&yd, &w, opts));
        if scale > T::zero() && scale.is_finite() {
            let pair = w.component_mul(c).sum();
            best = best.max(pair / scale);
        }
    }
    best
}
