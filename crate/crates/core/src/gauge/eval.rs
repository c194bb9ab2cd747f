use serde::{Deserialize, Serialize};

use super::dual::{dual_numeric, DualOptions};
use super::product::{product_numeric, ProductOptions};
use super::spec::{resolve_closed_form, GaugeSpec};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::scalar::{sign, Real};

/// Budgets for the numeric fallbacks used while evaluating combinators.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GaugeOptions {
    pub dual: DualOptions,
    pub product: ProductOptions,
}

pub fn gauge_norm<T: Real>(spec: &GaugeSpec, v: &[T]) -> Result<T> {
    gauge_norm_with(spec, v, &GaugeOptions::default())
}

pub fn gauge_norm_with<T: Real>(spec: &GaugeSpec, v: &[T], opts: &GaugeOptions) -> Result<T> {
    spec.validate()?;
    let a = abs_checked(v)?;
    Ok(norm_abs(spec, &a, opts))
}

/// A subgradient `g` of the gauge at `v`: `⟨g, v⟩ = ‖v‖` and `‖g‖' ≤ 1`.
pub fn gauge_subgradient<T: Real>(spec: &GaugeSpec, v: &[T]) -> Result<Vec<T>> {
    spec.validate()?;
    let a = abs_checked(v)?;
    let g = subgrad_abs(spec, &a, &GaugeOptions::default());
    Ok(g.into_iter().zip(v).map(|(gi, &vi)| gi * sign(vi)).collect())
}

/// Maximizer `s` of `⟨s, w⟩` over the unit ball of the gauge, so that
/// `⟨s, w⟩ = ‖w‖'` (the Köthe dual value).
pub fn gauge_support<T: Real>(spec: &GaugeSpec, w: &[T]) -> Result<Vec<T>> {
    spec.validate()?;
    let a = abs_checked(w)?;
    let s = support_abs(spec, &a, &GaugeOptions::default());
    Ok(s.into_iter().zip(w).map(|(si, &wi)| si * sign(wi)).collect())
}

pub(crate) fn abs_checked<T: Real>(v: &[T]) -> Result<Vec<T>> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("vector entry".into()));
    }
    Ok(v.iter().map(|x| x.abs()).collect())
}

pub(crate) fn lp_norm<T: Real>(a: &[T], p: Exponent) -> T {
    let m = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if m == T::zero() {
        return T::zero();
    }
    match p {
        Exponent::Infinite => m,
        _ if p.is_one() => a.iter().fold(T::zero(), |s, &x| s + x.abs()),
        _ if p.is_two() => m * a.iter().fold(T::zero(), |s, &x| s + (x / m) * (x / m)).sqrt(),
        _ => {
            let pr: T = p.to_real();
            m * a.iter().fold(T::zero(), |s, &x| s + (x.abs() / m).powf(pr)).powf(T::one() / pr)
        }
    }
}

/// Subgradient of `ℓ_p` at a nonnegative vector.
pub(crate) fn lp_subgrad<T: Real>(a: &[T], p: Exponent) -> Vec<T> {
    let n = lp_norm(a, p);
    if n == T::zero() {
        return vec![T::zero(); a.len()];
    }
    match p {
        Exponent::Infinite => {
            let i = argmax(a);
            let mut g = vec![T::zero(); a.len()];
            g[i] = T::one();
            g
        }
        _ if p.is_one() => vec![T::one(); a.len()],
        _ => {
            let e: T = p.to_real::<T>() - T::one();
            a.iter().map(|&x| (x / n).powf(e)).collect()
        }
    }
}

/// Maximizer of `⟨s, w⟩` over the `ℓ_p` unit ball, for nonnegative `w`.
pub(crate) fn lp_support<T: Real>(w: &[T], p: Exponent) -> Vec<T> {
    match p {
        Exponent::Infinite => vec![T::one(); w.len()],
        _ if p.is_one() => {
            let mut s = vec![T::zero(); w.len()];
            if !w.is_empty() {
                s[argmax(w)] = T::one();
            }
            s
        }
        _ => lp_subgrad(w, p.conjugate()),
    }
}

pub(crate) fn argmax<T: Real>(a: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in a.iter().enumerate() {
        if x > a[best] {
            best = i;
        }
    }
    best
}

/// Indices sorted by nonincreasing value (stable).
pub(crate) fn order_desc<T: Real>(a: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[j].partial_cmp(&a[i]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

fn kyfan<T: Real>(a: &[T], k: usize) -> T {
    let mut s = a.to_vec();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s.iter().take(k).fold(T::zero(), |acc, &x| acc + x)
}

fn kyfan_dual<T: Real>(a: &[T], k: usize) -> T {
    let inf = a.iter().fold(T::zero(), |m, &x| m.max(x));
    let one = a.iter().fold(T::zero(), |s, &x| s + x);
    inf.max(one / T::from_usize(k).unwrap())
}

fn powv<T: Real>(a: &[T], e: T) -> Vec<T> {
    a.iter().map(|&x| if x > T::zero() { x.powf(e) } else { T::zero() }).collect()
}

/// Gauge value at a nonnegative vector; `spec` must already be validated.
pub(crate) fn norm_abs<T: Real>(spec: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> T {
    match spec {
        GaugeSpec::Lp(p) => lp_norm(a, *p),
        GaugeSpec::KyFan(k) => kyfan(a, *k),
        GaugeSpec::Convexify(b, r) => {
            let r: T = crate::exponent::Exponent::Finite(*r).to_real();
            norm_abs(b, &powv(a, r), opts).powf(T::one() / r)
        }
        GaugeSpec::Concavify(b, r) => {
            let r: T = crate::exponent::Exponent::Finite(*r).to_real();
            norm_abs(b, &powv(a, T::one() / r), opts).powf(r)
        }
        GaugeSpec::Dual(b) => dual_abs(b, a, opts).value,
        GaugeSpec::Product(g, h) => {
            if let (Some(pg), Some(ph)) = (g.as_lp(), h.as_lp()) {
                if opts.product.closed_form {
                    let r = pg.recip() + ph.recip();
                    if let Ok(c) = Exponent::from_recip(r) {
                        return lp_norm(a, c);
                    }
                }
            }
            product_numeric(g, h, a, opts).value
        }
        GaugeSpec::Declared { base, .. } => norm_abs(base, a, opts),
    }
}

pub(crate) struct DualValue<T> {
    pub value: T,
    pub exact: bool,
}

/// Köthe dual value of `base` at nonnegative `a`, closed form when possible.
pub(crate) fn dual_abs<T: Real>(base: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> DualValue<T> {
    if opts.dual.closed_form {
        match resolve_closed_form(base) {
            GaugeSpec::Lp(p) => return DualValue { value: lp_norm(a, p.conjugate()), exact: true },
            GaugeSpec::KyFan(k) => return DualValue { value: kyfan_dual(a, k), exact: true },
            _ => {}
        }
    }
    let (value, _, converged) = dual_sorted(base, a, opts);
    DualValue { value, exact: converged }
}

/// Numeric dual on the nonincreasing rearrangement; returns the maximizer in
/// the original coordinates.
pub(crate) fn dual_sorted<T: Real>(base: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> (T, Vec<T>, bool) {
    let idx = order_desc(a);
    let w: Vec<T> = idx.iter().map(|&i| a[i]).collect();
    let (value, xs, converged) = dual_numeric(base, &w, opts);
    let mut x = vec![T::zero(); a.len()];
    for (k, &i) in idx.iter().enumerate() {
        x[i] = xs[k];
    }
    (value, x, converged)
}

/// Nonnegative subgradient at nonnegative `a`.
pub(crate) fn subgrad_abs<T: Real>(spec: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> Vec<T> {
    match spec {
        GaugeSpec::Lp(p) => lp_subgrad(a, *p),
        GaugeSpec::KyFan(k) => {
            let idx = order_desc(a);
            let mut g = vec![T::zero(); a.len()];
            if a.iter().any(|&x| x > T::zero()) {
                for &i in idx.iter().take(*k) {
                    g[i] = T::one();
                }
            }
            g
        }
        GaugeSpec::Convexify(b, r) => {
            let r: T = Exponent::Finite(*r).to_real();
            let u = powv(a, r);
            let nu = norm_abs(b, &u, opts);
            if nu == T::zero() {
                return vec![T::zero(); a.len()];
            }
            let gb = subgrad_abs(b, &u, opts);
            let scale = nu.powf(T::one() / r - T::one());
            a.iter().zip(gb).map(|(&x, gi)| scale * gi * x.powf(r - T::one())).collect()
        }
        GaugeSpec::Concavify(b, r) => {
            let r: T = Exponent::Finite(*r).to_real();
            let u = powv(a, T::one() / r);
            let nu = norm_abs(b, &u, opts);
            if nu == T::zero() {
                return vec![T::zero(); a.len()];
            }
            let gb = subgrad_abs(b, &u, opts);
            let scale = nu.powf(r - T::one());
            a.iter()
                .zip(gb)
                .map(|(&x, gi)| if x > T::zero() { scale * gi * x.powf(T::one() / r - T::one()) } else { T::zero() })
                .collect()
        }
        // ∂‖·‖_{E'} at a is the maximizer over the E ball
        GaugeSpec::Dual(b) => support_abs(b, a, opts),
        GaugeSpec::Product(..) => match resolve_closed_form(spec) {
            GaugeSpec::Lp(p) if opts.product.closed_form => lp_subgrad(a, p),
            _ => finite_difference(spec, a, opts),
        },
        GaugeSpec::Declared { base, .. } => subgrad_abs(base, a, opts),
    }
}

/// Nonnegative maximizer of `⟨s, w⟩` over the unit ball, `w ≥ 0`.
pub(crate) fn support_abs<T: Real>(spec: &GaugeSpec, w: &[T], opts: &GaugeOptions) -> Vec<T> {
    if w.iter().all(|&x| x == T::zero()) {
        // any unit vector will do; take the flattest one
        let n = norm_abs(spec, &vec![T::one(); w.len()], opts);
        return vec![T::one() / n.max(T::eps()); w.len()];
    }
    match spec {
        GaugeSpec::Lp(p) => lp_support(w, *p),
        GaugeSpec::KyFan(k) => {
            let inf = w.iter().fold(T::zero(), |m, &x| m.max(x));
            let one = w.iter().fold(T::zero(), |s, &x| s + x);
            let kf = T::from_usize(*k).unwrap();
            if inf * kf >= one {
                let mut s = vec![T::zero(); w.len()];
                s[argmax(w)] = T::one();
                s
            } else {
                vec![T::one() / kf; w.len()]
            }
        }
        // the E'' = E subgradient maximizes over the E' ball
        GaugeSpec::Dual(b) => {
            let g = subgrad_abs(b, w, opts);
            normalize_dual(spec, g, opts)
        }
        GaugeSpec::Declared { base, .. } => support_abs(base, w, opts),
        _ => match resolve_closed_form(spec) {
            GaugeSpec::Lp(p) => lp_support(w, p),
            _ => dual_sorted(spec, w, opts).1,
        },
    }
}

fn normalize_dual<T: Real>(dual_spec: &GaugeSpec, s: Vec<T>, opts: &GaugeOptions) -> Vec<T> {
    let n = norm_abs(dual_spec, &s, opts);
    if n > T::one() {
        s.into_iter().map(|x| x / n).collect()
    } else {
        s
    }
}

fn finite_difference<T: Real>(spec: &GaugeSpec, a: &[T], opts: &GaugeOptions) -> Vec<T> {
    let mut g = vec![T::zero(); a.len()];
    let mut x = a.to_vec();
    let base = T::lit(1e-6);
    for i in 0..a.len() {
        let h = base * (T::one() + a[i]);
        let orig = x[i];
        x[i] = orig + h;
        let fp = norm_abs(spec, &x, opts);
        x[i] = (orig - h).max(T::zero());
        let hm = orig - x[i];
        let fm = norm_abs(spec, &x, opts);
        x[i] = orig;
        g[i] = ((fp - fm) / (h + hm)).max(T::zero());
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g(s: &str) -> GaugeSpec {
        s.parse().unwrap()
    }

    #[test]
    fn basic_values() {
        assert_relative_eq!(gauge_norm(&g("lp:2"), &[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-15);
        assert_relative_eq!(gauge_norm(&g("conv(lp:1,2)"), &[1.0, 2.0, 2.0]).unwrap(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(gauge_norm(&g("kyfan:2"), &[5.0, -1.0, 3.0]).unwrap(), 8.0);
        assert_relative_eq!(gauge_norm(&g("lp:inf"), &[-7.0, 2.0]).unwrap(), 7.0);
        assert_relative_eq!(gauge_norm(&g("conc(lp:4,2)"), &[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-13);
        assert_eq!(gauge_norm(&g("lp:3"), &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn basis_vectors_have_unit_norm() {
        for s in ["lp:1", "lp:3/2", "lp:inf", "kyfan:3", "dual(kyfan:2)", "conv(kyfan:2,3)", "conc(lp:6,3)", "prod(lp:4,lp:8)"] {
            let v = gauge_norm(&g(s), &[0.0, 1.0, 0.0, 0.0]).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(gauge_norm(&g("conc(lp:1,2)"), &[1.0]), Err(Error::Inadmissible(_))));
        assert!(matches!(gauge_norm(&g("lp:2"), &[f64::NAN]), Err(Error::NonFinite(_))));
        assert!(gauge_norm(&g("kyfan:0"), &[1.0]).is_err());
    }

    #[test]
    fn subgradients_attain_the_norm() {
        let v = [0.3, -1.2, 0.7, 0.0, 2.5];
        for s in ["lp:1", "lp:3", "lp:inf", "kyfan:2", "conv(lp:1,3)", "conc(lp:6,2)", "dual(lp:3)", "dual(kyfan:2)"] {
            let spec = g(s);
            let sub = gauge_subgradient(&spec, &v).unwrap();
            let pairing: f64 = sub.iter().zip(&v).map(|(a, b)| a * b).sum();
            let n = gauge_norm(&spec, &v).unwrap();
            assert_relative_eq!(pairing, n, max_relative = 1e-6);
            let dn = gauge_norm(&spec.clone().dual(), &sub).unwrap();
            assert!(dn <= 1.0 + 1e-6, "{s}: dual norm of subgradient {dn}");
        }
    }

    #[test]
    fn supports_attain_the_dual_norm() {
        let w = [0.3, -1.2, 0.7, 0.0, 2.5];
        for s in ["lp:1", "lp:3", "lp:inf", "kyfan:2", "dual(lp:3)", "conv(kyfan:2,2)"] {
            let spec = g(s);
            let sup = gauge_support(&spec, &w).unwrap();
            let pairing: f64 = sup.iter().zip(&w).map(|(a, b)| a * b).sum();
            let dn = gauge_norm(&spec.clone().dual(), &w).unwrap();
            assert_relative_eq!(pairing, dn, max_relative = 1e-6);
            assert!(gauge_norm(&spec, &sup).unwrap() <= 1.0 + 1e-9);
        }
    }
}
