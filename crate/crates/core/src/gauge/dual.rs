//! Numeric Köthe dual of a gauge.
//!
//! For `w` nonincreasing and nonnegative the dual value is
//! `sup ⟨x, w⟩ / ‖x‖` over nonincreasing `x ≥ 0`. Writing `x = Uc` with
//! `x_i = Σ_{j≥i} c_j` and `c` on the simplex turns this into maximizing a
//! ratio of a linear function and a convex function, whose superlevel sets are
//! convex, so projected ascent has no spurious local maxima.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{norm_abs, subgrad_abs, GaugeOptions};
use super::spec::GaugeSpec;
use crate::numeric::project_simplex;
use crate::scalar::Real;
use crate::seed;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualOptions {
    /// Use the `ℓ_p` / Ky Fan closed forms when the spec resolves to one.
    pub closed_form: bool,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { closed_form: true, restarts: 32, iterations: 4000, seed: 0 }
    }
}

/// Returns `(value, maximizer, converged)` for sorted nonnegative `w`. The
/// maximizer is normalized to unit `base` norm.
pub(crate) fn dual_numeric<T: Real>(base: &GaugeSpec, w: &[T], opts: &GaugeOptions) -> (T, Vec<T>, bool) {
    let n = w.len();
    let m = w.iter().rposition(|&x| x > T::zero()).map_or(0, |i| i + 1);
    if m == 0 {
        return (T::zero(), vec![T::zero(); n], true);
    }
    let w = &w[..m];
    let prefix: Vec<T> = w
        .iter()
        .scan(T::zero(), |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    let d = &opts.dual;
    let starts = starting_points::<T>(m, w, d);
    let results: Vec<(T, Vec<T>, bool)> = starts
        .into_par_iter()
        .map(|c0| ascend(base, &prefix, c0, d.iterations, opts))
        .collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let (value, c, converged) = results[best].clone();
    let mut x = expand(&c);
    let nx = norm_abs(base, &x, opts);
    for v in x.iter_mut() {
        *v /= nx;
    }
    x.resize(n, T::zero());
    (value, x, converged)
}

fn starting_points<T: Real>(m: usize, w: &[T], d: &DualOptions) -> Vec<Vec<T>> {
    let mut starts = Vec::with_capacity(d.restarts.max(2));
    let mut e1 = vec![T::zero(); m];
    e1[0] = T::one();
    starts.push(e1);
    let mut em = vec![T::zero(); m];
    em[m - 1] = T::one();
    starts.push(em);
    starts.push(vec![T::one() / T::from_usize(m).unwrap(); m]);
    // x ∝ w, i.e. c_j = w_j - w_{j+1}
    let mut cw: Vec<T> = (0..m).map(|j| w[j] - if j + 1 < m { w[j + 1] } else { T::zero() }).collect();
    let s = cw.iter().fold(T::zero(), |a, &b| a + b);
    cw.iter_mut().for_each(|v| *v /= s);
    starts.push(cw);
    let mut k = 0u64;
    while starts.len() < d.restarts.max(2) {
        let mut rng = seed::rng(seed::derive(d.seed, seed::stream::DUAL, k));
        k += 1;
        // Dirichlet(1) via normalized exponentials
        let mut c: Vec<T> = (0..m).map(|_| T::lit(-(1.0 - rng.gen::<f64>()).ln())).collect();
        let s = c.iter().fold(T::zero(), |a, &b| a + b);
        c.iter_mut().for_each(|v| *v /= s);
        starts.push(c);
    }
    starts.truncate(d.restarts.max(2));
    starts
}

fn expand<T: Real>(c: &[T]) -> Vec<T> {
    let mut x = vec![T::zero(); c.len()];
    let mut s = T::zero();
    for j in (0..c.len()).rev() {
        s += c[j];
        x[j] = s;
    }
    x
}

fn ratio<T: Real>(base: &GaugeSpec, prefix: &[T], c: &[T], opts: &GaugeOptions) -> (T, T, T) {
    let num = c.iter().zip(prefix).fold(T::zero(), |a, (&cj, &sj)| a + cj * sj);
    let x = expand(c);
    let den = norm_abs(base, &x, opts);
    (num / den, num, den)
}

fn ascend<T: Real>(base: &GaugeSpec, prefix: &[T], mut c: Vec<T>, iterations: usize, opts: &GaugeOptions) -> (T, Vec<T>, bool) {
    let (mut f, mut num, mut den) = ratio(base, prefix, &c, opts);
    let t0 = T::one() / prefix[prefix.len() - 1].max(T::eps());
    let mut t = t0;
    let sigma = T::lit(1e-4);
    let mut converged = false;
    let mut stall = 0;
    let mut previous: Option<(Vec<T>, Vec<T>)> = None;
    let mut history = std::collections::VecDeque::from([f]);
    let mut best = (f, c.clone());
    for _ in 0..iterations {
        let x = expand(&c);
        let g = subgrad_abs(base, &x, opts);
        // ∂den/∂c_j = Σ_{i≤j} g_i
        let mut acc = T::zero();
        let grad: Vec<T> = prefix
            .iter()
            .zip(&g)
            .map(|(&sj, &gi)| {
                acc += gi;
                (sj * den - num * acc) / (den * den)
            })
            .collect();
        // Barzilai-Borwein step from the last accepted move
        if let Some((pc, pg)) = &previous {
            let (mut ss, mut sy) = (T::zero(), T::zero());
            for j in 0..c.len() {
                let sj = c[j] - pc[j];
                ss += sj * sj;
                sy -= sj * (grad[j] - pg[j]);
            }
            if sy > T::zero() && ss > T::zero() {
                t = (ss / sy).max(t0 * T::lit(1e-10)).min(t0 * T::lit(1e10));
            }
        }
        // nonmonotone acceptance against the worst of the last few values
        let reference = history.iter().fold(f, |m, &v| m.min(v));
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = c.iter().zip(&grad).map(|(&ci, &gi)| ci + t * gi).collect();
            let cn = project_simplex(&trial);
            let lin = cn.iter().zip(&c).zip(&grad).fold(T::zero(), |a, ((&n, &o), &gi)| a + (n - o) * gi);
            let (fn_, nn, dn) = ratio(base, prefix, &cn, opts);
            if fn_ >= reference + sigma * lin {
                let gain = fn_ - best.0;
                previous = Some((std::mem::replace(&mut c, cn), grad.clone()));
                f = fn_;
                num = nn;
                den = dn;
                accepted = true;
                history.push_back(f);
                if history.len() > 10 {
                    history.pop_front();
                }
                if f > best.0 {
                    best = (f, c.clone());
                }
                if gain <= T::lit(1e-15) * f.abs() {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted || stall >= 20 {
            converged = true;
            break;
        }
    }
    (best.0, best.1, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;
    use crate::gauge::eval::lp_norm;
    use approx::assert_relative_eq;

    fn numeric_opts() -> GaugeOptions {
        let mut o = GaugeOptions::default();
        o.dual.closed_form = false;
        o
    }

    #[test]
    fn numeric_matches_conjugate_exponent() {
        let mut w = vec![2.0, 1.5, 0.7, 0.7, 0.1];
        w.sort_by(|a: &f64, b| b.partial_cmp(a).unwrap());
        for p in [Exponent::int(1), Exponent::ratio(4, 3), Exponent::int(3), Exponent::int(4), Exponent::Infinite] {
            let (v, x, _) = dual_numeric(&GaugeSpec::Lp(p), &w, &numeric_opts());
            assert_relative_eq!(v, lp_norm(&w, p.conjugate()), max_relative = 1e-7);
            let pair: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert_relative_eq!(pair, v, max_relative = 1e-9);
        }
    }

    #[test]
    fn kyfan_dual_by_ascent() {
        let w = [3.0, 1.0, 1.0, 1.0];
        let (v, _, _) = dual_numeric(&GaugeSpec::KyFan(2), &w, &numeric_opts());
        // max(‖w‖_∞, ‖w‖_1 / 2) = 3
        assert_relative_eq!(v, 3.0, max_relative = 1e-9);
        let w = [1.0, 1.0, 1.0, 1.0];
        let (v, _, _) = dual_numeric(&GaugeSpec::KyFan(2), &w, &numeric_opts());
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn zero_tail_is_trimmed() {
        let (v, x, _) = dual_numeric(&GaugeSpec::lp(2), &[1.0, 0.0, 0.0], &numeric_opts());
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        assert_eq!(x.len(), 3);
    }
}
