//! Rademacher averages of operator tuples, the row/column split infimum, and
//! the two constant-one Khintchine inequalities.
//!
//! For a tuple `(x_k)` in `S_E`:
//!
//! * if `E` is 2-concave, `(E‖Σ ε_k x_k‖²)^{1/2} ≤ inf_{x=a+b} ‖(Σ a_k^*a_k)^{1/2}‖ + ‖(Σ b_k b_k^*)^{1/2}‖`;
//! * if `E` is 2-convex, `max(‖(Σ x_k^*x_k)^{1/2}‖, ‖(Σ x_k x_k^*)^{1/2}‖) ≤ (E‖Σ ε_k x_k‖²)^{1/2}`.
//!
//! The reverse directions hold up to constants that are measured, never assumed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gauge::eval::GaugeOptions;
use crate::gauge::GaugeSpec;
use crate::ideal::{ideal_norm, ideal_subgradient, real_inner, stacked_norm, OperatorTuple};
use crate::numeric::polyak_minimize;
use crate::scalar::{cplx, Real};
use crate::{random, seed, CMatrix};

/// Largest tuple length accepted by exact sign enumeration.
pub const EXACT_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RademacherMode {
    Exact,
    MonteCarlo { samples: usize },
}

impl RademacherMode {
    /// Exact when the tuple is short enough, else 4096 samples.
    pub fn auto(n: usize) -> Self {
        if n <= EXACT_CAP {
            RademacherMode::Exact
        } else {
            RademacherMode::MonteCarlo { samples: 4096 }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RademacherResult<T> {
    pub mode: RademacherMode,
    /// `(E‖Σ ε_k x_k‖²)^{1/2}`.
    pub value: T,
    pub samples: usize,
    /// Standard error of `value` (Monte Carlo only).
    pub stderr: Option<T>,
}

pub fn rademacher_second_moment<T: Real>(spec: &GaugeSpec, t: &OperatorTuple<T>, mode: RademacherMode, seed: u64) -> Result<RademacherResult<T>> {
    spec.validate()?;
    let n = t.len();
    let opts = GaugeOptions::default();
    let signed_norm2 = |signs: &dyn Fn(usize) -> bool| -> Result<T> {
        let (r, c) = t.shape();
        let mut s = CMatrix::zeros(r, c);
        for (k, x) in t.items().iter().enumerate() {
            if signs(k) {
                s -= x;
            } else {
                s += x;
            }
        }
        let v = stacked_norm(spec, &s, &opts)?;
        Ok(v * v)
    };
    match mode {
        RademacherMode::Exact => {
            if n > EXACT_CAP {
                return Err(Error::domain(format!("exact enumeration needs n <= {EXACT_CAP}, got {n}")));
            }
            // ε and -ε give the same norm: fix ε_1 = +1
            let count = 1usize << (n - 1);
            let sq: Vec<T> = (0..count)
                .into_par_iter()
                .map(|mask| signed_norm2(&|k| k > 0 && (mask >> (k - 1)) & 1 == 1))
                .collect::<Result<_>>()?;
            let mean = sq.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize(count).unwrap();
            Ok(RademacherResult { mode, value: mean.sqrt(), samples: count, stderr: None })
        }
        RademacherMode::MonteCarlo { samples } => {
            if samples < 2 {
                return Err(Error::domain("Monte Carlo needs at least two samples"));
            }
            let sq: Vec<T> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = seed::rng(seed::derive(seed, seed::stream::MONTE_CARLO, i as u64));
                    let signs: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                    signed_norm2(&|k| signs[k])
                })
                .collect::<Result<_>>()?;
            let m = T::from_usize(samples).unwrap();
            let mean = sq.iter().fold(T::zero(), |a, &b| a + b) / m;
            let var = sq.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / (m - T::one());
            let value = mean.sqrt();
            // delta method for the square root of a sample mean
            let stderr = if value > T::zero() { (var / m).sqrt() / (T::lit(2.0) * value) } else { T::zero() };
            Ok(RademacherResult { mode, value, samples, stderr: Some(stderr) })
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitOptions {
    pub restarts: usize,
    /// Iterations per restart.
    pub budget: usize,
    /// Relative gap at which a restart stops.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { restarts: 8, budget: 2000, tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct SplitResult<T: Real> {
    /// Column part.
    pub a: OperatorTuple<T>,
    /// Row part, `b = x - a`.
    pub b: OperatorTuple<T>,
    /// `‖vstack(a)‖ + ‖hstack(b)‖`, an upper bound on the infimum.
    pub value: T,
    /// Best certified lower bound on the infimum.
    pub lower: T,
    pub converged: bool,
    pub iterations: usize,
    /// Objective after each accepted improvement of the winning restart.
    pub accepted: Vec<T>,
}

/// Minimizes `‖[a_1; …; a_n]‖_{S_E} + ‖[x_1 - a_1, …, x_n - a_n]‖_{S_E}`.
///
/// Lower bounds: `max_k ‖x_k‖` (compressions are contractive) and the
/// Hölder bound `Σ Re⟨w_k, x_k⟩ / max(‖[w_k]‖', ‖[w_k]‖')` at the column
/// subgradient `w`, which is tight at an optimum.
pub fn best_row_column_split<T: Real>(spec: &GaugeSpec, t: &OperatorTuple<T>, opts: &SplitOptions) -> Result<SplitResult<T>> {
    spec.validate()?;
    let (r, c) = t.shape();
    if r != c {
        return Err(Error::shape(format!("split needs square matrices, got {r}x{c}")));
    }
    let dual = spec.clone().dual();
    let gopts = GaugeOptions::default();
    let triangle = t.items().iter().map(|x| ideal_norm(spec, x)).collect::<Result<Vec<T>>>()?.into_iter().fold(T::zero(), |m, v| m.max(v));
    let n = t.len();
    let x_flat = flatten(t.items());

    let starts = split_starts(t, opts);
    let runs: Vec<Result<(Vec<T>, T, T, bool, usize, Vec<T>)>> = starts
        .into_par_iter()
        .map(|a0| {
            let mut last_lower = triangle;
            let mut failure = None;
            let out = polyak_minimize(
                a0,
                T::lit(opts.tol),
                opts.budget,
                30,
                |a: &[T]| match split_oracle(spec, &dual, t, a, &x_flat, n, r, c, &gopts) {
                    Ok((f, g, lb)) => {
                        let lb = lb.max(triangle);
                        last_lower = last_lower.max(lb);
                        (f, g, lb)
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        (T::lit(f64::INFINITY), vec![T::zero(); a.len()], T::lit(f64::INFINITY))
                    }
                },
                |_| {},
            );
            if let Some(e) = failure {
                return Err(e);
            }
            Ok((out.x, out.value, last_lower, out.converged, out.iterations, out.accepted))
        })
        .collect();
    let mut best: Option<(Vec<T>, T, T, bool, usize, Vec<T>)> = None;
    let mut lower = triangle;
    let mut iterations = 0;
    for run in runs {
        let run = run?;
        lower = lower.max(run.2);
        iterations += run.4;
        if best.as_ref().map_or(true, |b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (a_flat, value, _, _, _, accepted) = best.expect("at least one restart");
    let lower = lower.min(value);
    let a_items = unflatten(&a_flat, n, r, c);
    let b_items: Vec<CMatrix<T>> = t.items().iter().zip(&a_items).map(|(x, a)| x - a).collect();
    Ok(SplitResult {
        a: OperatorTuple::new(a_items)?,
        b: OperatorTuple::new(b_items)?,
        value,
        lower,
        converged: value - lower <= T::lit(opts.tol.max(1e-7)) * value.max(T::eps()),
        iterations,
        accepted,
    })
}

fn flatten<T: Real>(items: &[CMatrix<T>]) -> Vec<T> {
    let mut v = Vec::with_capacity(items.len() * items[0].len() * 2);
    for x in items {
        for z in x.iter() {
            v.push(z.re);
            v.push(z.im);
        }
    }
    v
}

fn unflatten<T: Real>(v: &[T], n: usize, r: usize, c: usize) -> Vec<CMatrix<T>> {
    (0..n)
        .map(|k| {
            let off = k * r * c * 2;
            CMatrix::from_iterator(r, c, (0..r * c).map(|e| cplx(v[off + 2 * e], v[off + 2 * e + 1])))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn split_oracle<T: Real>(
    spec: &GaugeSpec,
    dual: &GaugeSpec,
    t: &OperatorTuple<T>,
    a_flat: &[T],
    x_flat: &[T],
    n: usize,
    r: usize,
    c: usize,
    gopts: &GaugeOptions,
) -> Result<(T, Vec<T>, T)> {
    let a = OperatorTuple::new(unflatten(a_flat, n, r, c))?;
    let b_flat: Vec<T> = x_flat.iter().zip(a_flat).map(|(&x, &a)| x - a).collect();
    let b = OperatorTuple::new(unflatten(&b_flat, n, r, c))?;
    let va = a.vstack();
    let hb = b.hstack();
    let f = stacked_norm(spec, &va, gopts)? + stacked_norm(spec, &hb, gopts)?;
    let ga = a.unstack_rows(&ideal_subgradient(spec, &va)?);
    let gb = b.unstack_cols(&ideal_subgradient(spec, &hb)?);
    let g: Vec<T> = flatten(&ga).into_iter().zip(flatten(&gb)).map(|(p, q)| p - q).collect();
    // Hölder certificate from the column subgradient
    let w = OperatorTuple::new(ga)?;
    let scale = stacked_norm(dual, &w.vstack(), gopts)?.max(stacked_norm(dual, &w.hstack(), gopts)?);
    let pair = w.items().iter().zip(t.items()).fold(T::zero(), |s, (wk, xk)| s + real_inner(wk, xk));
    let lb = if scale > T::zero() { pair / scale } else { T::zero() };
    Ok((f, g, lb))
}

fn split_starts<T: Real>(t: &OperatorTuple<T>, opts: &SplitOptions) -> Vec<Vec<T>> {
    let x = flatten(t.items());
    let mut starts = vec![vec![T::zero(); x.len()], x.clone(), x.iter().map(|&v| v * T::lit(0.5)).collect()];
    let mut k = 0;
    while starts.len() < opts.restarts.max(1) {
        let mut rng = seed::rng(seed::derive(opts.seed, seed::stream::RESTART, k));
        k += 1;
        starts.push(x.iter().map(|&v| v * T::lit(rng.gen::<f64>())).collect());
    }
    starts.truncate(opts.restarts.max(1));
    starts
}

/// Which constant-one inequality to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "case")]
pub enum KhCase {
    /// `E` 2-concave: Rademacher average ≤ split infimum.
    Concave2,
    /// `E` 2-convex and `q`-concave: max of square functions ≤ Rademacher average.
    Convex2 { q: Exponent },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KhOptions {
    pub instances: usize,
    /// Tuple length.
    pub n: usize,
    /// Matrix size.
    pub d: usize,
    pub seed: u64,
    /// Slack for the exact inequalities, relative to the larger side.
    pub tol: f64,
    pub split: SplitOptions,
}

impl Default for KhOptions {
    fn default() -> Self {
        KhOptions { instances: 20, n: 3, d: 3, seed: 0, tol: 1e-7, split: SplitOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KhInstance {
    pub seed: u64,
    pub rademacher: f64,
    /// Split infimum (upper bound and certified lower bound), case `Concave2`.
    pub split: Option<f64>,
    pub split_lower: Option<f64>,
    pub column: Option<f64>,
    pub row: Option<f64>,
    /// Smaller side, middle, larger side of the displayed chain.
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    /// `split / rademacher` or `rademacher / max(column, row)`.
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KhReport {
    pub check: String,
    pub spec: GaugeSpec,
    pub case: KhCase,
    pub options: KhOptions,
    pub instances: Vec<KhInstance>,
    /// Largest measured ratio in the non-exact direction.
    pub max_ratio: f64,
    pub failures: usize,
}

impl KhReport {
    pub fn all_hold(&self) -> bool {
        self.failures == 0
    }
}

/// Random test tuple: Gaussian matrices with random scales, sometimes
/// concentrated in one column or one row so that the two square functions
/// differ.
pub fn random_instance<T: Real>(n: usize, d: usize, seed: u64) -> OperatorTuple<T> {
    let mut rng = seed::rng(seed);
    let shape = rng.gen_range(0..3);
    let items = (0..n)
        .map(|_| {
            let scale = T::lit(rng.gen_range(0.2..2.0));
            let mut x: CMatrix<T> = random::gaussian(d, d, &mut rng);
            match shape {
                1 => x.columns_mut(1, d - 1).fill(cplx(T::zero(), T::zero())),
                2 => x.rows_mut(1, d - 1).fill(cplx(T::zero(), T::zero())),
                _ => {}
            }
            x * cplx(scale, T::zero())
        })
        .collect();
    OperatorTuple::new(items).expect("homogeneous tuple")
}

/// Checks the constant-one direction on random instances and records the
/// empirical ratio in the other direction.
pub fn verify_khintchine(spec: &GaugeSpec, case: KhCase, opts: &KhOptions) -> Result<KhReport> {
    let profile = spec.profile()?;
    match case {
        KhCase::Concave2 if !profile.is_concave(Exponent::TWO) => {
            return Err(Error::inadmissible(format!("{spec} is not known to be 2-concave with constant 1")));
        }
        KhCase::Convex2 { q } if !profile.is_convex(Exponent::TWO) || !profile.is_concave(q) => {
            return Err(Error::inadmissible(format!("{spec} is not known to be 2-convex and {q}-concave with constant 1")));
        }
        _ => {}
    }
    if opts.n == 0 || opts.d == 0 {
        return Err(Error::domain("instances need n >= 1 and d >= 1"));
    }
    let mut instances = Vec::with_capacity(opts.instances);
    for i in 0..opts.instances {
        let s = seed::derive(opts.seed, seed::stream::INSTANCE, i as u64);
        let t: OperatorTuple<f64> = random_instance(opts.n, opts.d, s);
        let rad = rademacher_second_moment(spec, &t, RademacherMode::auto(opts.n), s)?.value;
        let inst = match case {
            KhCase::Concave2 => {
                let split = best_row_column_split(spec, &t, &SplitOptions { seed: s, ..opts.split.clone() })?;
                let holds = rad <= split.value + opts.tol * split.value.max(1.0);
                KhInstance {
                    seed: s,
                    rademacher: rad,
                    split: Some(split.value),
                    split_lower: Some(split.lower),
                    column: None,
                    row: None,
                    lhs: rad,
                    mid: split.value,
                    rhs: rad,
                    ratio: split.value / rad,
                    holds,
                }
            }
            KhCase::Convex2 { .. } => {
                let col = crate::ideal::column_square_norm(spec, &t)?;
                let row = crate::ideal::row_square_norm(spec, &t)?;
                let m = col.max(row);
                let holds = m <= rad + opts.tol * rad.max(1.0);
                KhInstance {
                    seed: s,
                    rademacher: rad,
                    split: None,
                    split_lower: None,
                    column: Some(col),
                    row: Some(row),
                    lhs: m,
                    mid: rad,
                    rhs: m,
                    ratio: rad / m,
                    holds,
                }
            }
        };
        instances.push(inst);
    }
    let max_ratio = instances.iter().map(|i| i.ratio).fold(0.0, f64::max);
    let failures = instances.iter().filter(|i| !i.holds).count();
    Ok(KhReport {
        check: match case {
            KhCase::Concave2 => "khintchine-concave2".into(),
            KhCase::Convex2 { .. } => "khintchine-convex2".into(),
        },
        spec: spec.clone(),
        case,
        options: opts.clone(),
        instances,
        max_ratio,
        failures,
    })
}
