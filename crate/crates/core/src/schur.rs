//! Schur multipliers `M_φ: x ↦ (φ_ij x_ij)` between unitary ideals.
//!
//! Characterization norms are sum-space norms of `|φ|` in
//! `X(ℓ_r) + ᵗX(ℓ_r)`; they are evaluated in both orientations (`φ` and `ᵗφ`)
//! and the better one is kept, which makes them exactly transpose-symmetric.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gauge::{kfs_norm_with, resolve_closed_form, GaugeSpec, KfsOptions, KfsSpec};
use crate::ideal::{ideal_norm, ideal_subgradient, ideal_support, matrix_unit};
use crate::numeric::{Estimate, Quality};
use crate::scalar::{cabs, creal, phase, Real};
use crate::{random, seed, CMatrix};

/// Largest size accepted by [`two_sided_check`].
pub const TWO_SIDED_MAX_DIM: usize = 6;

pub fn hadamard<T: Real>(phi: &CMatrix<T>, x: &CMatrix<T>) -> Result<CMatrix<T>> {
    if phi.shape() != x.shape() {
        return Err(Error::shape(format!("symbol is {}x{}, matrix is {}x{}", phi.nrows(), phi.ncols(), x.nrows(), x.ncols())));
    }
    Ok(phi.component_mul(x))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchurOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub kfs: KfsOptions,
}

impl Default for SchurOptions {
    fn default() -> Self {
        SchurOptions { restarts: 64, iterations: 300, seed: 0, kfs: KfsOptions::default() }
    }
}

fn check_symbol<T: Real>(phi: &CMatrix<T>) -> Result<()> {
    if phi.nrows() == 0 || phi.ncols() == 0 {
        return Err(Error::shape("empty symbol"));
    }
    if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("symbol entry".into()));
    }
    Ok(())
}

/// `D_u φ D_v` with unimodular `u, v` making `φ` real positive along a
/// spanning forest of its support. The forest depends only on the support,
/// so rephased symbols share one canonical form.
fn canonical_phases<T: Real>(phi: &CMatrix<T>) -> CMatrix<T> {
    let (r, c) = phi.shape();
    let one = creal(T::one());
    let mut u: Vec<Option<nalgebra::Complex<T>>> = vec![None; r];
    let mut v: Vec<Option<nalgebra::Complex<T>>> = vec![None; c];
    let nz = |i: usize, j: usize| cabs(phi[(i, j)]) > T::zero();
    // nodes 0..r are rows, r..r+c are columns
    for root in 0..r + c {
        let seen = if root < r { u[root].is_some() } else { v[root - r].is_some() };
        if seen {
            continue;
        }
        if root < r {
            u[root] = Some(one);
        } else {
            v[root - r] = Some(one);
        }
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(node) = queue.pop_front() {
            if node < r {
                let i = node;
                let ui = u[i].unwrap();
                for j in 0..c {
                    if v[j].is_none() && nz(i, j) {
                        v[j] = Some(phase(ui * phi[(i, j)]).conj());
                        queue.push_back(r + j);
                    }
                }
            } else {
                let j = node - r;
                let vj = v[j].unwrap();
                for i in 0..r {
                    if u[i].is_none() && nz(i, j) {
                        u[i] = Some(phase(phi[(i, j)] * vj).conj());
                        queue.push_back(i);
                    }
                }
            }
        }
    }
    CMatrix::from_fn(r, c, |i, j| u[i].unwrap() * phi[(i, j)] * v[j].unwrap())
}

fn same_space(a: &GaugeSpec, b: &GaugeSpec) -> bool {
    resolve_closed_form(a) == resolve_closed_form(b)
}

/// `‖id: S_E → S_F‖` on `n × n`, when known in closed form.
fn identity_norm(e: &GaugeSpec, f: &GaugeSpec, n: usize) -> Option<f64> {
    if same_space(e, f) {
        return Some(1.0);
    }
    let (p, q) = (resolve_closed_form(e).as_lp()?, resolve_closed_form(f).as_lp()?);
    let expo = (q.recip() - p.recip()).max(num_rational::Ratio::from_integer(0));
    Some((n as f64).powf(*expo.numer() as f64 / *expo.denom() as f64))
}

fn closed_multiplier_norm<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, f: &GaugeSpec) -> Option<T> {
    let moduli = phi.map(cabs);
    let top = moduli.iter().fold(T::zero(), |m, &v| m.max(v));
    if top == T::zero() {
        return Some(T::zero());
    }
    let l2 = |s: &GaugeSpec| resolve_closed_form(s).as_lp() == Some(Exponent::TWO);
    if l2(e) && l2(f) {
        return Some(top);
    }
    let first = phi[(0, 0)];
    let constant = phi.iter().all(|z| cabs(z - first) <= T::lit(1e-14) * top);
    if constant && phi.is_square() {
        return identity_norm(e, f, phi.nrows()).map(|k| T::lit(k) * cabs(first));
    }
    if same_space(e, f) {
        let svd = phi.clone().svd(true, true);
        let mut sv: Vec<(T, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
        sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let rank_one = sv.len() == 1 || sv[1].0 <= T::lit(1e-13) * sv[0].0;
        if rank_one {
            let k = sv[0].1;
            let u = svd.u.as_ref()?.column(k).iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
            let v = svd.v_t.as_ref()?.row(k).iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
            return Some(sv[0].0 * u * v);
        }
    }
    None
}

/// Lower bound on `‖M_φ: S_E → S_F‖` by restarted conditional-gradient
/// ascent; exact in the closed cases (constant symbol between `ℓ_p` ideals,
/// rank-one symbol with `E = F`, and `E = F = ℓ_2`).
pub fn multiplier_norm_lower<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, f: &GaugeSpec, opts: &SchurOptions) -> Result<Estimate<T>> {
    check_symbol(phi)?;
    e.validate()?;
    f.validate()?;
    if let Some(v) = closed_multiplier_norm(phi, e, f) {
        return Ok(Estimate::exact(v));
    }
    let phi = canonical_phases(phi);
    let (r, c) = phi.shape();
    let mut starts: Vec<CMatrix<T>> = Vec::new();
    let moduli = phi.map(cabs);
    let mut order: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect();
    order.sort_by(|a, b| moduli[*b].partial_cmp(&moduli[*a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b)));
    for &(i, j) in order.iter().take(2) {
        starts.push(matrix_unit(r, c, i, j));
    }
    starts.push(CMatrix::identity(r, c));
    starts.push(phi.map(|z| z.conj()));
    starts.push(CMatrix::from_element(r, c, creal(T::one())));
    let mut k = 0;
    while starts.len() < opts.restarts.max(1) {
        let mut rng = seed::rng(seed::derive(opts.seed, seed::stream::RESTART, k));
        k += 1;
        starts.push(random::gaussian(r, c, &mut rng));
    }
    let runs: Vec<Result<T>> = starts.into_par_iter().map(|x0| ascend(&phi, e, f, x0, opts.iterations)).collect();
    let mut best = T::zero();
    for v in runs {
        best = best.max(v?);
    }
    Ok(Estimate { value: best, quality: Quality::LowerBound })
}

fn ascend<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, f: &GaugeSpec, x0: CMatrix<T>, iterations: usize) -> Result<T> {
    let unit = |x: CMatrix<T>| -> Result<Option<CMatrix<T>>> {
        let n = ideal_norm(e, &x)?;
        Ok((n > T::zero()).then(|| x.unscale(n)))
    };
    let Some(mut x) = unit(x0)? else { return Ok(T::zero()) };
    let mut v = ideal_norm(f, &phi.component_mul(&x))?;
    for _ in 0..iterations {
        let y = phi.component_mul(&x);
        if v == T::zero() {
            break;
        }
        let s = ideal_subgradient(f, &y)?;
        let w = phi.map(|z| z.conj()).component_mul(&s);
        let Some(xn) = unit(ideal_support(e, &w)?)? else { break };
        let vn = ideal_norm(f, &phi.component_mul(&xn))?;
        if vn <= v * (T::one() + T::lit(1e-13)) {
            break;
        }
        x = xn;
        v = vn;
    }
    Ok(v)
}

/// Which side of the characterization a split part lives in.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Decomposition<T: Real> {
    /// Part in `X(ℓ_r)` (row-wise inner norm).
    #[serde(with = "crate::io::cmatrix")]
    pub row_part: CMatrix<T>,
    /// Part in `ᵗX(ℓ_r)` (column-wise inner norm).
    #[serde(with = "crate::io::cmatrix")]
    pub column_part: CMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct CharNorm<T: Real> {
    /// Outer gauge `X` of the symmetric sum space.
    pub outer: GaugeSpec,
    /// Inner row exponent `r`.
    pub inner: Exponent,
    pub value: T,
    /// Certified lower bound for `value`.
    pub lower: T,
    pub quality: Quality,
    pub decomposition: Decomposition<T>,
}

/// Norm of `φ` in `X(ℓ_r) + ᵗX(ℓ_r)`.
pub fn symmetric_sum_norm<T: Real>(phi: &CMatrix<T>, outer: &GaugeSpec, inner: Exponent, opts: &KfsOptions) -> Result<CharNorm<T>> {
    check_symbol(phi)?;
    let space = KfsSpec::symmetric_sum(outer.clone(), inner);
    let a = kfs_norm_with(&space, phi, opts)?;
    let phit = phi.transpose();
    let b = kfs_norm_with(&space, &phit, opts)?;
    let lower = a.lower.max(b.lower);
    let (value, quality, decomposition) = if b.value < a.value {
        let s = b.split.expect("sum spaces return a split");
        // rows of ᵗφ are columns of φ
        (b.value, b.quality, Decomposition { row_part: s.y.transpose(), column_part: s.x.transpose() })
    } else {
        let s = a.split.expect("sum spaces return a split");
        (a.value, a.quality, Decomposition { row_part: s.x, column_part: s.y })
    };
    let mut quality = quality;
    if value - lower <= T::lit(opts.tol) * value {
        quality = quality_min(quality, Quality::Converged);
    }
    if !outer_is_closed(outer) {
        quality = Quality::UpperBound;
    }
    Ok(CharNorm { outer: outer.clone(), inner, value, lower: lower.min(value), quality, decomposition })
}

fn quality_min(a: Quality, b: Quality) -> Quality {
    if a == Quality::ClosedForm {
        a
    } else {
        b
    }
}

fn outer_is_closed(g: &GaugeSpec) -> bool {
    matches!(g, GaugeSpec::Lp(_) | GaugeSpec::KyFan(_))
}

fn require_convex(e: &GaugeSpec, p: Exponent) -> Result<()> {
    if !e.profile()?.is_convex(p) {
        return Err(Error::inadmissible(format!("{e} is not known to be {p}-convex with constant 1")));
    }
    Ok(())
}

/// `G = ((E_(2))')^(2)`; requires `E` 2-convex.
pub fn l2_char_gauge(e: &GaugeSpec) -> Result<GaugeSpec> {
    require_convex(e, Exponent::TWO)?;
    let g = e.clone().concavify(2.into()).dual().convexify(2.into());
    g.validate()?;
    Ok(resolve_closed_form(&g))
}

/// `H = (((F')_(2))')^(2)`; requires `F` 2-concave.
pub fn target_char_gauge(f: &GaugeSpec) -> Result<GaugeSpec> {
    if !f.profile()?.is_concave(Exponent::TWO) {
        return Err(Error::inadmissible(format!("{f} is not known to be 2-concave with constant 1")));
    }
    let h = f.clone().dual().concavify(2.into()).dual().convexify(2.into());
    h.validate()?;
    Ok(resolve_closed_form(&h))
}

/// `L = GH` for the pair `(E, F)`.
pub fn sesf_char_gauge(e: &GaugeSpec, f: &GaugeSpec) -> Result<GaugeSpec> {
    let g = l2_char_gauge(e)?;
    let h = target_char_gauge(f)?;
    Ok(resolve_closed_form(&g.product(h)))
}

/// Norm of `φ` in `G(ℓ_∞) + ᵗG(ℓ_∞)`, `G = ((E_(2))')^(2)`: the multipliers
/// from `S_E` into `S_2`.
pub fn to_l2_char_norm<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, opts: &KfsOptions) -> Result<CharNorm<T>> {
    symmetric_sum_norm(phi, &l2_char_gauge(e)?, Exponent::Infinite, opts)
}

/// Norm of `φ` in `L(ℓ_∞) + ᵗL(ℓ_∞)` with `L = GH`.
pub fn sesf_char_norm<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, f: &GaugeSpec, opts: &KfsOptions) -> Result<CharNorm<T>> {
    symmetric_sum_norm(phi, &sesf_char_gauge(e, f)?, Exponent::Infinite, opts)
}

/// Target of [`to_lp_char_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpTarget {
    /// The Schatten class `S_p`.
    Schatten,
    /// Entrywise `ℓ_p(ℕ²)`.
    Entrywise,
}

/// `G₁ = ((E_(p))')^(p)`, with no concavification or convexification at `p = 1`.
pub fn lp_char_gauge(e: &GaugeSpec, p: Exponent) -> Result<GaugeSpec> {
    check_p(p)?;
    require_convex(e, Exponent::TWO)?;
    let g = if p.is_one() {
        e.clone().dual()
    } else {
        let Exponent::Finite(r) = p else { unreachable!() };
        e.clone().concavify(r).dual().convexify(r)
    };
    g.validate()?;
    Ok(resolve_closed_form(&g))
}

fn check_p(p: Exponent) -> Result<()> {
    if p < Exponent::ONE || p > Exponent::TWO {
        return Err(Error::domain(format!("exponent {p} outside [1, 2]")));
    }
    Ok(())
}

/// `q = 2p/(2−p)`, infinite at `p = 2`.
pub fn entrywise_inner_exponent(p: Exponent) -> Result<Exponent> {
    check_p(p)?;
    Exponent::from_recip(p.recip() - num_rational::Ratio::new(1, 2))
}

/// Norm of `φ` in `G₁(ℓ_∞) + ᵗG₁(ℓ_∞)` (target `S_p`) or
/// `G₁(ℓ_q) + ᵗG₁(ℓ_q)` (target `ℓ_p(ℕ²)`).
pub fn to_lp_char_norm<T: Real>(phi: &CMatrix<T>, e: &GaugeSpec, p: Exponent, target: LpTarget, opts: &KfsOptions) -> Result<CharNorm<T>> {
    let g1 = lp_char_gauge(e, p)?;
    let inner = match target {
        LpTarget::Schatten => Exponent::Infinite,
        LpTarget::Entrywise => entrywise_inner_exponent(p)?,
    };
    symmetric_sum_norm(phi, &g1, inner, opts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub source: GaugeSpec,
    pub target: GaugeSpec,
    /// Outer gauge of the characterization space.
    pub characterization: GaugeSpec,
    pub n: usize,
    /// Lower bound on the multiplier norm.
    pub lower: f64,
    pub lower_quality: Quality,
    /// Characterization norm.
    pub upper_char: f64,
    pub upper_char_lower: f64,
    pub upper_quality: Quality,
    /// Constant `c` with `lower ≤ c·upper_char` asserted (target `ℓ_2`,
    /// `c = 1`) or recorded.
    pub ratio_bound: f64,
    /// `upper_char / lower`.
    pub ratio: Option<f64>,
    pub exact_direction_checked: bool,
    pub decomposition: Decomposition<f64>,
    /// Largest entry of `|row_part + column_part − φ|`.
    pub recombination_error: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// Multiplier norm against its characterization norm. For target `ℓ_2`
/// the contractive direction `lower ≤ upper_char·(1 + 1e-6)` is asserted.
pub fn two_sided_check(phi: &CMatrix<f64>, e: &GaugeSpec, f: &GaugeSpec, opts: &SchurOptions) -> Result<MultiplierReport> {
    check_symbol(phi)?;
    let n = phi.nrows().max(phi.ncols());
    if n > TWO_SIDED_MAX_DIM {
        return Err(Error::domain(format!("two-sided checks take symbols up to {TWO_SIDED_MAX_DIM}x{TWO_SIDED_MAX_DIM}")));
    }
    let to_l2 = resolve_closed_form(f).as_lp() == Some(Exponent::TWO);
    let upper = if to_l2 { to_l2_char_norm(phi, e, &opts.kfs)? } else { sesf_char_norm(phi, e, f, &opts.kfs)? };
    let lower = multiplier_norm_lower(phi, e, f, opts)?;
    if to_l2 && lower.value > upper.value * (1.0 + 1e-6) + 1e-12 {
        return Err(Error::Assertion(format!(
            "multiplier norm lower bound {} exceeds the characterization norm {} into S_2",
            lower.value, upper.value
        )));
    }
    let d = &upper.decomposition;
    let recombination_error = (&d.row_part + &d.column_part - phi).iter().fold(0.0f64, |m, z| m.max(cabs(*z)));
    let ratio = (lower.value > 0.0).then(|| upper.value / lower.value);
    let ratio_bound = if to_l2 { 1.0 } else { (lower.value / upper.value.max(f64::MIN_POSITIVE)).max(1.0) };
    Ok(MultiplierReport {
        source: e.clone(),
        target: f.clone(),
        characterization: upper.outer.clone(),
        n,
        lower: lower.value,
        lower_quality: lower.quality,
        upper_char: upper.value,
        upper_char_lower: upper.lower,
        upper_quality: upper.quality,
        ratio_bound,
        ratio,
        exact_direction_checked: to_l2,
        decomposition: upper.decomposition,
        recombination_error,
        restarts: opts.restarts,
        seed: opts.seed,
    })
}

/// `n × n` identity symbol.
pub fn identity_symbol<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::from_real;
    use crate::scalar::cplx;
    use approx::assert_relative_eq;

    fn g(s: &str) -> GaugeSpec {
        s.parse().unwrap()
    }

    fn random_symbol(n: usize, s: u64) -> CMatrix<f64> {
        random::gaussian(n, n, &mut seed::rng(s))
    }

    #[test]
    fn hadamard_identities() {
        let x = random_symbol(3, 1);
        let ones = CMatrix::from_element(3, 3, creal(1.0));
        assert_eq!(hadamard(&ones, &x).unwrap(), x);
        assert_eq!(hadamard(&CMatrix::zeros(3, 3), &x).unwrap(), CMatrix::<f64>::zeros(3, 3));
        let (a, b) = ([2.0, 1.0, -1.0], [1.0, 3.0, 0.5]);
        let phi = from_real(3, 3, &(0..9).map(|k| a[k / 3] * b[k % 3]).collect::<Vec<_>>());
        let da = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, a.iter().map(|&v| creal(v))));
        let db = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, b.iter().map(|&v| creal(v))));
        assert_relative_eq!((hadamard(&phi, &x).unwrap() - da * &x * db).norm(), 0.0, epsilon = 1e-12);
        assert!(hadamard(&phi, &CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn closed_multiplier_cases() {
        let o = SchurOptions::default();
        let ones: CMatrix<f64> = CMatrix::from_element(3, 3, creal(1.0));
        assert_eq!(multiplier_norm_lower(&ones, &g("lp:4"), &g("lp:4"), &o).unwrap().value, 1.0);
        let phi = from_real(2, 2, &[2.0, 6.0, 1.0, 3.0]);
        let v = multiplier_norm_lower(&phi, &g("lp:inf"), &g("lp:inf"), &o).unwrap();
        assert!(v.is_exact());
        assert_relative_eq!(v.value, 6.0, max_relative = 1e-12);
        let r = random_symbol(4, 2);
        let top = r.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert_relative_eq!(multiplier_norm_lower(&r, &g("lp:2"), &g("lp:2"), &o).unwrap().value, top, max_relative = 1e-12);
    }

    #[test]
    fn rank_one_ascent_matches_closed_form() {
        // the operator norm written as Ky Fan 1 bypasses the shortcut
        let phi = from_real(2, 2, &[2.0, 6.0, 1.0, 3.0]);
        let e = g("lp:inf");
        let f = g("kyfan:1");
        let o = SchurOptions { restarts: 16, ..Default::default() };
        assert!(closed_multiplier_norm(&phi, &e, &f).is_none());
        let v = multiplier_norm_lower(&phi, &e, &f, &o).unwrap();
        assert_relative_eq!(v.value, 6.0, max_relative = 1e-9);
    }

    #[test]
    fn identity_symbol_both_sides_sqrt_n() {
        let o = SchurOptions { restarts: 8, ..Default::default() };
        for n in [2usize, 4] {
            let phi = identity_symbol::<f64>(n);
            let lo = multiplier_norm_lower(&phi, &g("lp:inf"), &g("lp:2"), &o).unwrap().value;
            let up = to_l2_char_norm(&phi, &g("lp:inf"), &KfsOptions::default()).unwrap();
            assert_relative_eq!(lo, (n as f64).sqrt(), max_relative = 1e-9);
            assert_relative_eq!(up.value, (n as f64).sqrt(), max_relative = 1e-6);
        }
    }

    #[test]
    fn characterization_gauges() {
        assert_eq!(l2_char_gauge(&g("lp:2")).unwrap(), g("lp:inf"));
        assert_eq!(l2_char_gauge(&g("lp:inf")).unwrap(), g("lp:2"));
        assert_eq!(l2_char_gauge(&g("lp:4")).unwrap(), g("lp:4"));
        assert_eq!(l2_char_gauge(&g("lp:6")).unwrap(), g("lp:3"));
        assert_eq!(sesf_char_gauge(&g("lp:inf"), &g("lp:1")).unwrap(), g("lp:1"));
        assert_eq!(sesf_char_gauge(&g("lp:2"), &g("lp:2")).unwrap(), g("lp:inf"));
        assert_eq!(lp_char_gauge(&g("lp:inf"), Exponent::ONE).unwrap(), g("lp:1"));
        assert_eq!(lp_char_gauge(&g("lp:inf"), Exponent::TWO).unwrap(), l2_char_gauge(&g("lp:inf")).unwrap());
        assert_eq!(entrywise_inner_exponent(Exponent::ONE).unwrap(), Exponent::TWO);
        assert_eq!(entrywise_inner_exponent(Exponent::TWO).unwrap(), Exponent::Infinite);
        assert!(entrywise_inner_exponent("3".parse().unwrap()).is_err());
        assert!(matches!(l2_char_gauge(&g("lp:1")), Err(Error::Inadmissible(_))));
        assert!(matches!(target_char_gauge(&g("lp:4")), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn entrywise_characterization_is_max_modulus_at_l2() {
        let phi = random_symbol(3, 3);
        let top = phi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let v = to_l2_char_norm(&phi, &g("lp:2"), &KfsOptions::default()).unwrap();
        assert_relative_eq!(v.value, top, max_relative = 1e-6);
        let zero = to_l2_char_norm(&CMatrix::<f64>::zeros(3, 3), &g("lp:4"), &KfsOptions::default()).unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn phase_and_transpose_invariance() {
        let phi = random_symbol(3, 4);
        let abs = phi.map(|z| creal(z.norm()));
        let o = KfsOptions::default();
        for e in ["lp:inf", "lp:4"] {
            let a = to_l2_char_norm(&phi, &g(e), &o).unwrap().value;
            assert_relative_eq!(a, to_l2_char_norm(&abs, &g(e), &o).unwrap().value, max_relative = 1e-10);
            let b = sesf_char_norm(&phi, &g(e), &g("lp:4/3"), &o).unwrap().value;
            assert_eq!(b, sesf_char_norm(&phi.transpose(), &g(e), &g("lp:4/3"), &o).unwrap().value);
        }
        let u = [cplx(0.6, 0.8), cplx(-1.0, 0.0), cplx(0.0, 1.0)];
        let w = [cplx(0.8, -0.6), cplx(0.0, -1.0), cplx(1.0, 0.0)];
        let rephased = CMatrix::from_fn(3, 3, |i, j| u[i] * phi[(i, j)] * w[j]);
        let so = SchurOptions { restarts: 12, ..Default::default() };
        let l1 = multiplier_norm_lower(&phi, &g("lp:4"), &g("lp:4/3"), &so).unwrap().value;
        let l2 = multiplier_norm_lower(&rephased, &g("lp:4"), &g("lp:4/3"), &so).unwrap().value;
        assert_relative_eq!(l1, l2, max_relative = 1e-8);
    }

    #[test]
    fn two_sided_report() {
        let phi = random_symbol(3, 5);
        let o = SchurOptions { restarts: 16, ..Default::default() };
        let r = two_sided_check(&phi, &g("lp:4"), &g("lp:2"), &o).unwrap();
        assert!(r.exact_direction_checked);
        assert!(r.lower <= r.upper_char * (1.0 + 1e-6));
        assert!(r.recombination_error <= 1e-10);
        let r = two_sided_check(&phi, &g("lp:4"), &g("lp:4/3"), &o).unwrap();
        assert!(r.ratio.unwrap().is_finite());
        assert!(r.lower <= r.ratio_bound * r.upper_char + 1e-9);
        assert!(two_sided_check(&random_symbol(7, 1), &g("lp:4"), &g("lp:2"), &o).is_err());
    }

    #[test]
    fn canonical_phases_depends_only_on_moduli_pattern() {
        let phi = random_symbol(3, 6);
        let c = canonical_phases(&phi);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(c[(i, j)].norm(), phi[(i, j)].norm(), max_relative = 1e-12);
            }
        }
        // the first row and column sit on the spanning tree
        for j in 0..3 {
            assert!(c[(0, j)].im.abs() < 1e-12 && c[(0, j)].re > 0.0);
        }
    }
}
