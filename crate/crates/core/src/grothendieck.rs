//! Little-Grothendieck certificates for maps `T: S_E → H`.
//!
//! Under trace duality a positive norm-one functional on `S_{E_(2)}` is a
//! matrix `F ⪰ 0` in the unit ball of `S_G`, `G = (E_(2))'`. With
//! `κ = C²‖T‖²`, `A = T^*T` and `M_F(x) = xF + Fx` (both Hermitian on
//! `ℂ^{n×n}`), the inequality `‖T(x)‖² ≤ κ tr(F(x^*x + xx^*))` for all `x` is
//! exactly `κ M_F ⪰ A`, so the most violated `x` for a given `F` is a top
//! eigenvector of `A − κ M_F`.
//!
//! The search alternates between that exact separation step and a
//! feasibility step for `F` against the collected samples. When the samples
//! admit no `F`, weights `w_s` with `‖Σ w_s P_s/β_s‖_{S_{E_(2)}} < 1` exist,
//! and the tuple `(√(w_s/β_s) x_s)` violates the tuple inequality with
//! constant `C`.

use nalgebra::{DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gauge::eval::{lp_norm, norm_abs, subgrad_abs, GaugeOptions};
use crate::gauge::{resolve_closed_form, GaugeSpec};
use crate::ideal::{ideal_norm, ideal_support, real_inner, selfadjoint_square_norm, OperatorTuple};
use crate::khintchine::{best_row_column_split, rademacher_second_moment, random_instance, RademacherMode, SplitOptions};
use crate::numeric::{polyak_minimize, project_simplex, Estimate, Quality};
use crate::scalar::{cabs, creal, Real};
use crate::{random, seed, CMatrix};

/// Linear map from `n × n` matrices into `ℂ^d`, acting on the row-major
/// vectorization: `T(x)_i = Σ_j coefficients[i, j] · x_{j / n, j % n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LinearMapToHilbert<T: Real> {
    n: usize,
    #[serde(with = "crate::io::cmatrix")]
    coefficients: CMatrix<T>,
}

/// Largest output dimension.
pub const MAX_OUTPUT_DIM: usize = 64;

impl<T: Real> LinearMapToHilbert<T> {
    pub fn new(n: usize, coefficients: CMatrix<T>) -> Result<Self> {
        if n == 0 || coefficients.ncols() != n * n {
            return Err(Error::shape(format!("coefficients must have n² = {} columns, got {}", n * n, coefficients.ncols())));
        }
        let d = coefficients.nrows();
        if d == 0 || d > MAX_OUTPUT_DIM {
            return Err(Error::domain(format!("output dimension {d} outside 1..={MAX_OUTPUT_DIM}")));
        }
        if coefficients.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("map coefficient".into()));
        }
        Ok(LinearMapToHilbert { n, coefficients })
    }

    /// Gaussian coefficients.
    pub fn random(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        LinearMapToHilbert { n, coefficients: random::gaussian(d, n * n, &mut rng) }
    }

    /// `x ↦ x_{ij}`.
    pub fn entry(n: usize, i: usize, j: usize) -> Self {
        let mut c = CMatrix::zeros(1, n * n);
        c[(0, i * n + j)] = creal(T::one());
        LinearMapToHilbert { n, coefficients: c }
    }

    /// `x ↦ vec(x)`.
    pub fn identity(n: usize) -> Self {
        LinearMapToHilbert { n, coefficients: CMatrix::identity(n * n, n * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn coefficients(&self) -> &CMatrix<T> {
        &self.coefficients
    }

    /// `T` followed by a map on `H`.
    pub fn compose_left(&self, u: &CMatrix<T>) -> Result<Self> {
        if u.ncols() != self.d() {
            return Err(Error::shape("output map does not match the Hilbert dimension"));
        }
        Self::new(self.n, u * &self.coefficients)
    }

    pub fn scaled(&self, s: T) -> Self {
        LinearMapToHilbert { n: self.n, coefficients: self.coefficients.map(|z| z.scale(s)) }
    }

    fn check(&self, x: &CMatrix<T>) -> Result<()> {
        if x.shape() != (self.n, self.n) {
            return Err(Error::shape(format!("map expects {0}x{0} input, got {1}x{2}", self.n, x.nrows(), x.ncols())));
        }
        Ok(())
    }

    pub fn apply(&self, x: &CMatrix<T>) -> Result<DVector<nalgebra::Complex<T>>> {
        self.check(x)?;
        Ok(&self.coefficients * vec_of(x))
    }

    /// `‖T(x)‖²`.
    pub fn image_norm_sq(&self, x: &CMatrix<T>) -> Result<T> {
        Ok(self.apply(x)?.iter().fold(T::zero(), |s, z| s + z.norm_sqr()))
    }

    /// `T^*T` as an `n² × n²` matrix.
    pub fn gram(&self) -> CMatrix<T> {
        self.coefficients.adjoint() * &self.coefficients
    }

    fn gram_apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let v = &self.coefficients * vec_of(x);
        unvec(&(self.coefficients.adjoint() * v), self.n)
    }
}

fn vec_of<T: Real>(x: &CMatrix<T>) -> DVector<nalgebra::Complex<T>> {
    let n = x.ncols();
    DVector::from_fn(x.len(), |k, _| x[(k / n, k % n)])
}

fn unvec<T: Real>(v: &DVector<nalgebra::Complex<T>>, n: usize) -> CMatrix<T> {
    CMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { restarts: 16, iterations: 200, seed: 0 }
    }
}

/// Lower bound on `‖T: S_E → H‖` with the input attaining it (unit `S_E`
/// norm). Exact for `S_2`.
pub fn operator_norm_lower<T: Real>(map: &LinearMapToHilbert<T>, spec: &GaugeSpec, opts: &NormOptions) -> Result<(Estimate<T>, CMatrix<T>)> {
    spec.validate()?;
    let n = map.n;
    if spec.as_lp() == Some(Exponent::TWO) {
        let svd = map.coefficients.clone().svd(false, true);
        let (mut best, mut k) = (T::zero(), 0);
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > best {
                best = s;
                k = i;
            }
        }
        let vt = svd.v_t.expect("requested");
        let v = DVector::from_fn(n * n, |j, _| vt[(k, j)].conj());
        return Ok((Estimate::exact(best), unvec(&v, n)));
    }
    let mut starts: Vec<CMatrix<T>> = Vec::new();
    // top right singular vector of the coefficients
    let svd = map.coefficients.clone().svd(false, true);
    if let Some(vt) = svd.v_t.as_ref() {
        let k = (0..svd.singular_values.len()).max_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap()).unwrap_or(0);
        starts.push(unvec(&DVector::from_fn(n * n, |j, _| vt[(k, j)].conj()), n));
    }
    // matrix units ordered by image norm
    let mut units: Vec<(T, usize)> = (0..n * n).map(|j| (map.coefficients.column(j).norm_squared(), j)).collect();
    units.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    for &(_, j) in units.iter().take(3) {
        starts.push(crate::ideal::matrix_unit(n, n, j / n, j % n));
    }
    starts.push(CMatrix::identity(n, n));
    let mut k = 0;
    while starts.len() < opts.restarts.max(1) {
        let mut rng = seed::rng(seed::derive(opts.seed, seed::stream::ASCENT, k));
        k += 1;
        starts.push(random::gaussian(n, n, &mut rng));
    }
    let mut best = T::zero();
    let mut arg = starts[0].clone();
    for x0 in starts {
        let mut x = normalize(spec, x0)?;
        let mut v = map.image_norm_sq(&x)?;
        for _ in 0..opts.iterations {
            let g = map.gram_apply(&x);
            if g.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                break;
            }
            let xn = normalize(spec, ideal_support(spec, &g)?)?;
            let vn = map.image_norm_sq(&xn)?;
            if vn <= v * (T::one() + T::lit(1e-14)) {
                if vn > v {
                    x = xn;
                    v = vn;
                }
                break;
            }
            x = xn;
            v = vn;
        }
        if v.sqrt() > best {
            best = v.sqrt();
            arg = x;
        }
    }
    Ok((Estimate { value: best, quality: Quality::LowerBound }, arg))
}

fn normalize<T: Real>(spec: &GaugeSpec, x: CMatrix<T>) -> Result<CMatrix<T>> {
    let nx = ideal_norm(spec, &x)?;
    Ok(if nx > T::zero() { x.unscale(nx) } else { x })
}

/// `(Σ‖T(x_k)‖²)^{1/2} / (‖T‖ · ‖(Σ x_k^*x_k + x_k x_k^*)^{1/2}‖_{S_E})`.
pub fn c_inequality_ratio<T: Real>(map: &LinearMapToHilbert<T>, spec: &GaugeSpec, t: &OperatorTuple<T>, t_norm: T) -> Result<T> {
    let num = t.items().iter().map(|x| map.image_norm_sq(x)).collect::<Result<Vec<T>>>()?.into_iter().fold(T::zero(), |a, b| a + b).sqrt();
    let den = t_norm * selfadjoint_square_norm(spec, t)?;
    if den <= T::zero() {
        return Err(Error::domain("zero tuple or zero map in the C-inequality ratio"));
    }
    Ok(num / den)
}

/// `G = (E_(2))'`, the gauge whose unit ball holds the certificate matrix.
pub fn certificate_ball(spec: &GaugeSpec) -> Result<GaugeSpec> {
    let conc = spec.clone().concavify(2.into());
    conc.validate()?;
    Ok(resolve_closed_form(&conc.dual()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Separation rounds.
    pub rounds: usize,
    /// Alternating-projection sweeps per round.
    pub inner_iterations: usize,
    /// Relative slack demanded at the samples.
    pub margin: f64,
    /// `λ_max(A − κ M_F) ≤ tol · λ_max(A)` certifies.
    pub tol: f64,
    /// Replace `F` by its diagonal when `T^*T` is diagonal in the
    /// matrix-unit basis.
    pub symmetrize: bool,
    pub norm: NormOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { rounds: 60, inner_iterations: 2000, margin: 0.02, tol: 1e-10, symmetrize: true, norm: NormOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Certificate<T: Real> {
    pub spec: GaugeSpec,
    /// Gauge of the ball containing `F`.
    pub ball: GaugeSpec,
    pub constant: f64,
    /// `‖T‖` estimate used in `κ = C²‖T‖²`.
    pub t_norm: f64,
    /// Unit `S_E` input with `‖T(x)‖ = t_norm`.
    #[serde(with = "crate::io::cmatrix")]
    pub norm_witness: CMatrix<T>,
    #[serde(rename = "F", with = "crate::io::cmatrix")]
    pub f: CMatrix<T>,
    #[serde(with = "crate::io::cmatrix_vec")]
    pub active_samples: Vec<CMatrix<T>>,
    pub sample_hashes: Vec<String>,
    pub map: LinearMapToHilbert<T>,
    pub symmetrized: bool,
}

/// Tuple violating the C-inequality for the searched constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Violation<T: Real> {
    pub constant: f64,
    /// C-inequality ratio of `tuple`; exceeds `constant`.
    pub ratio: f64,
    pub tuple: OperatorTuple<T>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real", rename_all = "snake_case", tag = "outcome")]
pub enum SearchOutcome<T: Real> {
    Certified(Certificate<T>),
    Violated(Violation<T>),
    Inconclusive { constant: f64, rounds: usize, samples: usize },
}

impl<T: Real> SearchOutcome<T> {
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Certified(_) => "certified",
            SearchOutcome::Violated(_) => "violated",
            SearchOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// `M_F = F ⊗ I + I ⊗ Fᵀ` in the row-major vectorization.
fn m_f<T: Real>(f: &CMatrix<T>) -> CMatrix<T> {
    let n = f.nrows();
    let id = CMatrix::<T>::identity(n, n);
    f.kronecker(&id) + id.kronecker(&f.transpose())
}

fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let sym = (h + h.adjoint()).unscale(T::lit(2.0));
    let eig = SymmetricEigen::try_new(sym, T::eps(), 0).ok_or_else(|| Error::Numeric("Hermitian eigendecomposition did not converge".into()))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Top eigenpairs of `A − κ M_F` with positive eigenvalue, largest first.
fn separation<T: Real>(a: &CMatrix<T>, kappa: T, f: &CMatrix<T>, n: usize, take: usize) -> Result<(T, Vec<CMatrix<T>>)> {
    let h = a - m_f(f).scale(kappa);
    let (vals, vecs) = hermitian_eigen(&h)?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal));
    let top = vals[order[0]];
    let xs = order
        .iter()
        .take(take)
        .filter(|&&i| vals[i] > T::zero())
        .map(|&i| {
            let v = vecs.column(i).into_owned();
            unvec(&v, n)
        })
        .collect();
    Ok((top, xs))
}

/// Euclidean projection onto `{μ ≥ 0, ‖μ‖_G ≤ 1}`; radial scaling when `G`
/// is not an `ℓ_p`.
fn project_ball_vec<T: Real>(ball: &GaugeSpec, y: &[T]) -> Vec<T> {
    let yp: Vec<T> = y.iter().map(|&v| v.max(T::zero())).collect();
    let opts = GaugeOptions::default();
    match ball.as_lp() {
        Some(Exponent::Infinite) => yp.iter().map(|&v| v.min(T::one())).collect(),
        Some(p) if p.is_one() => {
            if yp.iter().fold(T::zero(), |a, &b| a + b) <= T::one() {
                yp
            } else {
                project_simplex(&yp)
            }
        }
        Some(p) => {
            let norm = lp_norm(&yp, p);
            if norm <= T::one() {
                return yp;
            }
            if p.is_two() {
                return yp.iter().map(|&v| v / norm).collect();
            }
            project_lp(&yp, p.to_real())
        }
        None => {
            let nrm = norm_abs(ball, &yp, &opts);
            if nrm <= T::one() {
                yp
            } else {
                yp.iter().map(|&v| v / nrm).collect()
            }
        }
    }
}

/// Projection of `y ≥ 0` with `‖y‖_p > 1` onto the `ℓ_p` unit sphere:
/// `μ_i + λ p μ_i^{p−1} = y_i`, with `λ` chosen by bisection.
fn project_lp<T: Real>(y: &[T], p: T) -> Vec<T> {
    let solve = |lam: T| -> Vec<T> {
        y.iter()
            .map(|&yi| {
                let (mut lo, mut hi) = (T::zero(), yi);
                for _ in 0..80 {
                    let mid = (lo + hi) * T::lit(0.5);
                    if mid + lam * p * mid.powf(p - T::one()) > yi {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                (lo + hi) * T::lit(0.5)
            })
            .collect()
    };
    let norm = |m: &[T]| m.iter().fold(T::zero(), |s, &v| s + v.powf(p)).powf(T::one() / p);
    let (mut lo, mut hi) = (T::zero(), T::one());
    while norm(&solve(hi)) > T::one() {
        hi *= T::lit(2.0);
    }
    for _ in 0..80 {
        let mid = (lo + hi) * T::lit(0.5);
        if norm(&solve(mid)) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    solve(hi)
}

/// Spectral projection onto `K = {F ⪰ 0, ‖λ(F)‖_G ≤ 1}`.
fn project_k<T: Real>(ball: &GaugeSpec, f: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (vals, vecs) = hermitian_eigen(f)?;
    let mu = project_ball_vec(ball, &vals);
    let d = CMatrix::from_fn(mu.len(), mu.len(), |i, j| if i == j { creal(mu[i]) } else { creal(T::zero()) });
    Ok(&vecs * d * vecs.adjoint())
}

/// Dykstra's alternating projections onto `K ∩ {⟨F, P_s⟩ ≥ b_s}`.
/// Returns a point of `K` meeting every `⟨F, P_s⟩ ≥ check_s`, if found.
fn dykstra<T: Real>(ball: &GaugeSpec, start: &CMatrix<T>, cons: &[(CMatrix<T>, T)], margin: T, iterations: usize) -> Result<Option<CMatrix<T>>> {
    let mut x = start.clone();
    let n = x.nrows();
    let mut pk = CMatrix::<T>::zeros(n, n);
    let mut ps: Vec<CMatrix<T>> = vec![CMatrix::zeros(n, n); cons.len()];
    let pnorm: Vec<T> = cons.iter().map(|(p, _)| real_inner(p, p)).collect();
    for it in 0..iterations {
        let y = project_k(ball, &(&x + &pk))?;
        pk = &x + &pk - &y;
        x = y;
        for (s, (p, b)) in cons.iter().enumerate() {
            let z = &x + &ps[s];
            let need = *b * (T::one() + margin) - real_inner(p, &z);
            let y = if need > T::zero() { &z + p.scale(need / pnorm[s]) } else { z.clone() };
            ps[s] = z - &y;
            x = y;
        }
        if it % 5 == 4 || it + 1 == iterations {
            let cand = project_k(ball, &x)?;
            if cons.iter().all(|(p, b)| real_inner(p, &cand) >= *b) {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Minimizes `‖Σ w_s Q_s‖_{S_{E_(2)}}` over the simplex, `Q_s = P_s/β_s`.
fn farkas_weights<T: Real>(conc: &GaugeSpec, qs: &[CMatrix<T>]) -> Result<(T, Vec<T>)> {
    let m = qs.len();
    let opts = GaugeOptions::default();
    let n = qs[0].nrows();
    let eval = |w: &[T]| -> Result<(T, Vec<T>)> {
        let mut q = CMatrix::<T>::zeros(n, n);
        for (wi, qi) in w.iter().zip(qs) {
            q += qi.scale(*wi);
        }
        let (vals, vecs) = hermitian_eigen(&q)?;
        let lam: Vec<T> = vals.iter().map(|&v| v.max(T::zero())).collect();
        let f = norm_abs(conc, &lam, &opts);
        let g = subgrad_abs(conc, &lam, &opts);
        let d = CMatrix::from_fn(n, n, |i, j| if i == j { creal(g[i]) } else { creal(T::zero()) });
        let s = &vecs * d * vecs.adjoint();
        Ok((f, qs.iter().map(|qi| real_inner(&s, qi)).collect()))
    };
    let mut err = None;
    let mut best = (T::lit(f64::INFINITY), vec![T::zero(); m]);
    let mut starts = vec![vec![T::one() / T::from_usize(m).unwrap(); m]];
    let mut last = vec![T::zero(); m];
    last[m - 1] = T::one();
    starts.push(last);
    for w0 in starts {
        let out = polyak_minimize(
            w0,
            T::lit(1e-9),
            400,
            20,
            |w: &[T]| match eval(w) {
                Ok((f, g)) => (f, g, T::lit(f64::NEG_INFINITY)),
                Err(e) => {
                    err.get_or_insert(e);
                    (T::lit(f64::INFINITY), vec![T::zero(); w.len()], T::lit(f64::NEG_INFINITY))
                }
            },
            |w: &mut [T]| {
                let p = project_simplex(w);
                w.copy_from_slice(&p);
            },
        );
        if out.value < best.0 {
            best = (out.value, out.x);
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best)
}

fn diagonal_gram<T: Real>(a: &CMatrix<T>) -> bool {
    let top = a.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| i == j || cabs(a[(i, j)]) <= T::lit(1e-12) * top))
}

fn hash_matrix<T: Real>(x: &CMatrix<T>) -> String {
    hex::encode(Sha256::digest(crate::io::matrix_to_json(x).to_string().as_bytes()))
}

/// Cutting-plane search for a certificate at constant `c`. `t_norm` is the
/// estimate of `‖T‖` with its witness; pass `None` to compute it.
pub fn certificate_search<T: Real>(
    map: &LinearMapToHilbert<T>,
    spec: &GaugeSpec,
    c: f64,
    t_norm: Option<(T, CMatrix<T>)>,
    opts: &SearchOptions,
) -> Result<SearchOutcome<T>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain("constant must be positive"));
    }
    let profile = spec.profile()?;
    if !profile.is_convex(Exponent::TWO) {
        return Err(Error::inadmissible(format!("{spec} is not known to be 2-convex with constant 1")));
    }
    let ball = certificate_ball(spec)?;
    let conc = resolve_closed_form(&spec.clone().concavify(2.into()));
    let (tn, witness) = match t_norm {
        Some(v) => v,
        None => {
            let (e, w) = operator_norm_lower(map, spec, &opts.norm)?;
            (e.value, w)
        }
    };
    if tn <= T::zero() {
        return Err(Error::domain("the map vanishes"));
    }
    let n = map.n;
    let a = map.gram();
    let kappa = T::lit(c * c) * tn * tn;
    let (avals, _) = hermitian_eigen(&a)?;
    let amax = avals.iter().fold(T::zero(), |m, &v| m.max(v));
    let threshold = T::lit(opts.tol) * amax;
    let symmetric = opts.symmetrize && diagonal_gram(&a);
    let gopts = GaugeOptions::default();
    let id_norm = norm_abs(&ball, &vec![T::one(); n], &gopts);
    let mut f = CMatrix::<T>::identity(n, n).unscale(id_norm);
    let mut samples: Vec<CMatrix<T>> = Vec::new();
    for _ in 0..opts.rounds {
        let (top, xs) = separation(&a, kappa, &f, n, 3)?;
        if top <= threshold {
            let cert = Certificate {
                spec: spec.clone(),
                ball: ball.clone(),
                constant: c,
                t_norm: tn.to64(),
                norm_witness: witness.clone(),
                f: f.clone(),
                sample_hashes: samples.iter().map(hash_matrix).collect(),
                active_samples: samples.clone(),
                map: map.clone(),
                symmetrized: symmetric,
            };
            return Ok(SearchOutcome::Certified(cert));
        }
        for x in xs {
            let nx = x.norm();
            samples.push(x.unscale(nx));
        }
        let cons: Vec<(CMatrix<T>, T)> = samples
            .iter()
            .filter_map(|x| {
                let beta = map.image_norm_sq(x).ok()? / kappa;
                (beta > T::zero()).then(|| (x.adjoint() * x + x * x.adjoint(), beta))
            })
            .collect();
        if cons.is_empty() {
            continue;
        }
        let qs: Vec<CMatrix<T>> = cons.iter().map(|(p, b)| p.unscale(*b)).collect();
        let (phi, w) = farkas_weights(&conc, &qs)?;
        if phi < T::one() - T::lit(1e-9) {
            let items: Vec<CMatrix<T>> = samples
                .iter()
                .filter(|x| map.image_norm_sq(x).map(|v| v > T::zero()).unwrap_or(false))
                .zip(cons.iter().zip(&w))
                .filter(|(_, (_, &wi))| wi > T::zero())
                .map(|(x, ((_, b), &wi))| x.scale((wi / *b).sqrt()))
                .collect();
            let tuple = OperatorTuple::new(items)?;
            let ratio = c_inequality_ratio(map, spec, &tuple, tn)?;
            if ratio.to64() > c {
                return Ok(SearchOutcome::Violated(Violation { constant: c, ratio: ratio.to64(), tuple }));
            }
        }
        if let Some(next) = dykstra(&ball, &f, &cons, T::lit(opts.margin), opts.inner_iterations)? {
            f = next;
        } else {
            f = project_k(&ball, &f)?;
        }
        if symmetric {
            f = CMatrix::from_fn(n, n, |i, j| if i == j { f[(i, i)] } else { creal(T::zero()) });
        }
    }
    Ok(SearchOutcome::Inconclusive { constant: c, rounds: opts.rounds, samples: samples.len() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub hashes_match: bool,
    pub hermitian: bool,
    pub min_eigenvalue: f64,
    pub psd: bool,
    pub ball_norm: f64,
    pub in_ball: bool,
    /// Largest `‖T(x)‖² − κ tr(F(x^*x + xx^*))` over the stored samples.
    pub worst_sample_excess: f64,
    pub samples_ok: bool,
    /// `λ_max(A − κ M_F)`: the worst excess over all unit-Frobenius inputs.
    pub global_excess: f64,
    pub global_ok: bool,
    /// `‖T(witness)‖ ≥ t_norm` with a unit-norm witness.
    pub norm_witnessed: bool,
    pub valid: bool,
}

/// Re-verifies a certificate from its fields alone.
pub fn check_certificate<T: Real>(cert: &Certificate<T>) -> Result<CheckReport> {
    let ball = certificate_ball(&cert.spec)?;
    let f = &cert.f;
    let n = cert.map.n();
    if f.shape() != (n, n) {
        return Err(Error::shape("certificate matrix does not match the map"));
    }
    let fnorm = f.norm().max(T::lit(1e-300));
    let hermitian = (f - f.adjoint()).norm() <= T::lit(1e-10) * fnorm;
    let (vals, _) = hermitian_eigen(f)?;
    let min_eig = vals.iter().fold(T::lit(f64::INFINITY), |m, &v| m.min(v));
    let psd = min_eig >= -T::lit(1e-10) * fnorm;
    let lam: Vec<T> = vals.iter().map(|&v| v.max(T::zero())).collect();
    let ball_norm = norm_abs(&ball, &lam, &GaugeOptions::default());
    let in_ball = ball_norm <= T::one() + T::lit(1e-8);
    let tn = T::lit(cert.t_norm);
    let kappa = T::lit(cert.constant * cert.constant) * tn * tn;
    let mut worst = T::lit(f64::NEG_INFINITY);
    let mut hashes_match = cert.sample_hashes.len() == cert.active_samples.len();
    for (x, h) in cert.active_samples.iter().zip(&cert.sample_hashes) {
        hashes_match &= hash_matrix(x) == *h;
        let lhs = cert.map.image_norm_sq(x)?;
        let p = x.adjoint() * x + x * x.adjoint();
        worst = worst.max(lhs - kappa * real_inner(f, &p));
    }
    let samples_ok = cert.active_samples.is_empty() || worst <= T::lit(1e-8);
    let a = cert.map.gram();
    let (gv, _) = hermitian_eigen(&(&a - m_f(f).scale(kappa)))?;
    let global = gv.iter().fold(T::lit(f64::NEG_INFINITY), |m, &v| m.max(v));
    let global_ok = global <= T::lit(1e-8);
    let wn = ideal_norm(&cert.spec, &cert.norm_witness)?;
    let img = cert.map.image_norm_sq(&cert.norm_witness)?.sqrt();
    let norm_witnessed = wn <= T::one() + T::lit(1e-9) && img >= tn * (T::one() - T::lit(1e-9));
    let valid = hashes_match && hermitian && psd && in_ball && samples_ok && global_ok && norm_witnessed;
    Ok(CheckReport {
        hashes_match,
        hermitian,
        min_eigenvalue: min_eig.to64(),
        psd,
        ball_norm: ball_norm.to64(),
        in_ball,
        worst_sample_excess: if cert.active_samples.is_empty() { 0.0 } else { worst.to64() },
        samples_ok,
        global_excess: global.to64(),
        global_ok,
        norm_witnessed,
        valid,
    })
}

/// Parses a certificate written by [`certificate_to_json`] and checks it.
pub fn check_certificate_json(text: &str) -> Result<CheckReport> {
    let cert: Certificate<f64> = serde_json::from_str(text).map_err(|e| Error::parse(format!("certificate json: {e}")))?;
    check_certificate(&cert)
}

pub fn certificate_to_json<T: Real>(cert: &Certificate<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(cert)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Step {
    pub constant: f64,
    pub outcome: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Estimate {
    pub spec: GaugeSpec,
    pub t_norm: f64,
    /// Largest constant with a violating tuple.
    pub violated_below: Option<f64>,
    /// Smallest certified constant.
    pub certified_at: Option<f64>,
    /// Largest C-inequality ratio among the violating tuples found.
    pub empirical_c1: f64,
    /// Largest `split / rademacher` ratio in the dual space over random tuples.
    pub empirical_c2: f64,
    /// `empirical_c1 ≤ empirical_c2 + tol`.
    pub ordering_holds: bool,
    pub inconclusive: bool,
    pub steps: Vec<C1Step>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Options {
    pub search: SearchOptions,
    /// Bisection steps after the bracket is found.
    pub bisections: usize,
    /// Random tuples used for the dual-space ratio.
    pub c2_instances: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for C1Options {
    fn default() -> Self {
        C1Options { search: SearchOptions::default(), bisections: 10, c2_instances: 4, seed: 0, tol: 1e-6 }
    }
}

/// Brackets the smallest certifiable constant for `map` by doubling and
/// bisection, and compares it with the dual-space split ratio.
pub fn estimate_c1<T: Real>(map: &LinearMapToHilbert<T>, spec: &GaugeSpec, opts: &C1Options) -> Result<C1Estimate> {
    let (est, witness) = operator_norm_lower(map, spec, &opts.search.norm)?;
    let tn = est.value;
    let mut steps = Vec::new();
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    let mut emp = 0.0f64;
    let mut inconclusive = false;
    let run = |c: f64, steps: &mut Vec<C1Step>| -> Result<SearchOutcome<T>> {
        let out = certificate_search(map, spec, c, Some((tn, witness.clone())), &opts.search)?;
        steps.push(C1Step { constant: c, outcome: out.label().into() });
        Ok(out)
    };
    let mut c = 1.0;
    for _ in 0..12 {
        match run(c, &mut steps)? {
            SearchOutcome::Certified(_) => {
                hi = Some(c);
                if lo.is_some() {
                    break;
                }
                c /= 2.0;
            }
            SearchOutcome::Violated(v) => {
                emp = emp.max(v.ratio);
                lo = Some(c);
                if hi.is_some() {
                    break;
                }
                c *= 2.0;
            }
            SearchOutcome::Inconclusive { .. } => {
                inconclusive = true;
                break;
            }
        }
    }
    if let (Some(mut l), Some(mut h)) = (lo, hi) {
        for _ in 0..opts.bisections {
            let mid = 0.5 * (l + h);
            match run(mid, &mut steps)? {
                SearchOutcome::Certified(_) => h = mid,
                SearchOutcome::Violated(v) => {
                    emp = emp.max(v.ratio);
                    l = mid;
                }
                SearchOutcome::Inconclusive { .. } => {
                    inconclusive = true;
                    break;
                }
            }
        }
        lo = Some(l);
        hi = Some(h);
    }
    let c2 = empirical_c2(spec, map.n(), opts.c2_instances, opts.seed)?;
    Ok(C1Estimate {
        spec: spec.clone(),
        t_norm: tn.to64(),
        violated_below: lo,
        certified_at: hi,
        empirical_c1: emp,
        empirical_c2: c2,
        ordering_holds: emp <= c2 + opts.tol,
        inconclusive,
        steps,
    })
}

/// Largest `inf-split / rademacher` ratio in `S_{E'}` over random tuples.
pub fn empirical_c2(spec: &GaugeSpec, n: usize, instances: usize, master: u64) -> Result<f64> {
    let dual = resolve_closed_form(&spec.clone().dual());
    let mut best = 0.0f64;
    for i in 0..instances {
        let s = seed::derive(master, seed::stream::WITNESS, i as u64);
        let t: OperatorTuple<f64> = random_instance(3, n, s);
        let rad = rademacher_second_moment(&dual, &t, RademacherMode::Exact, s)?.value;
        let split = best_row_column_split(&dual, &t, &SplitOptions { seed: s, ..SplitOptions::default() })?;
        best = best.max(split.value / rad);
    }
    Ok(best)
}

/// Random unitary on `ℂ^d`, for rotation checks.
pub fn random_output_unitary<T: Real>(d: usize, seed: u64) -> CMatrix<T> {
    let mut rng = seed::rng(seed);
    let _: f64 = rng.gen();
    random::unitary(d, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g(s: &str) -> GaugeSpec {
        s.parse().unwrap()
    }

    #[test]
    fn hilbert_schmidt_norm_is_top_singular_value() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(3, 4, 1);
        let (e, w) = operator_norm_lower(&map, &g("lp:2"), &NormOptions::default()).unwrap();
        let top = map.coefficients().clone().singular_values().max();
        assert_relative_eq!(e.value, top, max_relative = 1e-12);
        assert_relative_eq!(map.image_norm_sq(&w).unwrap().sqrt(), top, max_relative = 1e-10);
    }

    #[test]
    fn entry_functional_has_unit_norm_on_operators() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::entry(3, 0, 0);
        let (e, _) = operator_norm_lower(&map, &g("lp:inf"), &NormOptions::default()).unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn ascent_stays_below_coarse_bound() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(3, 3, 2);
        let (e, _) = operator_norm_lower(&map, &g("lp:4"), &NormOptions::default()).unwrap();
        // ‖x‖_F ≤ n^{1/4}‖x‖_{S_4} for 3×3
        let hs = map.coefficients().norm();
        assert!(e.value <= hs * 3f64.powf(0.25) + 1e-12);
        let top = map.coefficients().clone().singular_values().max();
        assert!(e.value >= top * 0.999, "{} vs {}", e.value, top);
    }

    #[test]
    fn ratio_is_scale_and_rotation_invariant() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(2, 3, 3);
        let spec = g("lp:4");
        let t: OperatorTuple<f64> = random::tuple(3, 2, &mut seed::rng(4));
        let tn = operator_norm_lower(&map, &spec, &NormOptions::default()).unwrap().0.value;
        let r = c_inequality_ratio(&map, &spec, &t, tn).unwrap();
        let scaled = map.scaled(3.5);
        let r2 = c_inequality_ratio(&scaled, &spec, &t, 3.5 * tn).unwrap();
        assert_relative_eq!(r, r2, max_relative = 1e-10);
        let u = random_output_unitary::<f64>(3, 5);
        let rot = map.compose_left(&u).unwrap();
        let r3 = c_inequality_ratio(&rot, &spec, &t, tn).unwrap();
        assert_relative_eq!(r, r3, max_relative = 1e-9);
        // singleton ratio is at most 1
        let one = OperatorTuple::new(vec![t.items()[0].clone()]).unwrap();
        assert!(c_inequality_ratio(&map, &spec, &one, tn).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn hilbert_schmidt_certificate_at_one() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(3, 3, 6);
        let out = certificate_search(&map, &g("lp:2"), 1.0, None, &SearchOptions::default()).unwrap();
        let SearchOutcome::Certified(cert) = out else { panic!("expected a certificate") };
        let check = check_certificate_json(&certificate_to_json(&cert).unwrap()).unwrap();
        assert!(check.valid, "{check:?}");
    }

    #[test]
    fn entry_functional_certificate() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::entry(2, 0, 0);
        let out = certificate_search(&map, &g("lp:inf"), 1.0, None, &SearchOptions::default()).unwrap();
        let SearchOutcome::Certified(cert) = out else { panic!("expected a certificate") };
        assert!(cert.symmetrized);
        assert!(check_certificate(&cert).unwrap().valid);
    }

    #[test]
    fn below_the_hilbert_constant_a_violation_is_found() {
        // For S_2 the best constant is 1/√2.
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(2, 3, 7);
        let out = certificate_search(&map, &g("lp:2"), 0.6, None, &SearchOptions::default()).unwrap();
        let SearchOutcome::Violated(v) = out else { panic!("expected a violation, got {}", out.label()) };
        assert!(v.ratio > 0.6);
        let tn = operator_norm_lower(&map, &g("lp:2"), &NormOptions::default()).unwrap().0.value;
        assert_relative_eq!(c_inequality_ratio(&map, &g("lp:2"), &v.tuple, tn).unwrap(), v.ratio, max_relative = 1e-12);
    }

    #[test]
    fn tampered_certificate_fails_the_check() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(2, 2, 8);
        let SearchOutcome::Certified(mut cert) = certificate_search(&map, &g("lp:2"), 1.0, None, &SearchOptions::default()).unwrap() else {
            panic!()
        };
        cert.f = cert.f.scale(0.1);
        assert!(!check_certificate(&cert).unwrap().valid);
    }

    #[test]
    fn ball_projection_is_feasible_and_idempotent() {
        let y: [f64; 4] = [0.9, -0.2, 0.7, 0.4];
        for s in ["lp:1", "lp:2", "lp:3", "lp:inf"] {
            let b = g(s);
            let mu = project_ball_vec(&b, &y);
            assert!(mu.iter().all(|&v| v >= 0.0));
            let nrm = norm_abs(&b, &mu, &GaugeOptions::default());
            assert!(nrm <= 1.0 + 1e-9, "{s}: {nrm}");
            let again = project_ball_vec(&b, &mu);
            for (a, c) in mu.iter().zip(again) {
                assert!((a - c).abs() < 1e-9);
            }
        }
        // ℓ_3 projection satisfies the optimality condition y - μ ∝ μ^{2}
        let mu: Vec<f64> = project_ball_vec(&g("lp:3"), &[2.0, 1.0, 0.5]);
        let r: Vec<f64> = [2.0, 1.0, 0.5].iter().zip(&mu).map(|(y, m)| (y - m) / (m * m)).collect();
        assert!((r[0] - r[1]).abs() < 1e-6 && (r[1] - r[2]).abs() < 1e-6);
    }

    #[test]
    fn hilbert_bracket_surrounds_inverse_sqrt_two() {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(2, 2, 9);
        let est = estimate_c1(&map, &g("lp:2"), &C1Options { c2_instances: 2, ..C1Options::default() }).unwrap();
        let (lo, hi) = (est.violated_below.unwrap(), est.certified_at.unwrap());
        let target = 0.5f64.sqrt();
        assert!(lo <= target + 1e-9 && target <= hi + 1e-9, "[{lo}, {hi}]");
        assert!(hi - lo < 2e-3);
        assert!(est.ordering_holds);
    }
}
