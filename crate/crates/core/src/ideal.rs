//! Unitary ideals `S_E` on complex matrices and the square functions of
//! operator tuples.
//!
//! `‖x‖_{S_E} = ‖σ(x)‖_E` with `σ` the nonincreasing singular values. The
//! column and row square functions are realized as ideal norms of the
//! vertical and horizontal stacks, since `σ([x_1; …; x_n])² = λ(Σ x_k^* x_k)`.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::eval::{abs_checked, norm_abs, subgrad_abs, support_abs, GaugeOptions};
use crate::gauge::GaugeSpec;
use crate::scalar::{creal, Real};
use crate::CMatrix;

/// Default bound on matrix dimensions.
pub const MAX_DIM: usize = 64;

/// Nonempty list of same-shape matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", transparent)]
pub struct OperatorTuple<T: Real> {
    #[serde(with = "crate::io::cmatrix_vec")]
    items: Vec<CMatrix<T>>,
}

impl<T: Real> OperatorTuple<T> {
    pub fn new(items: Vec<CMatrix<T>>) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::shape("operator tuple is empty"));
        };
        let shape = first.shape();
        if let Some(bad) = items.iter().find(|x| x.shape() != shape) {
            return Err(Error::shape(format!("tuple mixes shapes {:?} and {:?}", shape, bad.shape())));
        }
        for x in &items {
            check_matrix(x)?;
        }
        Ok(OperatorTuple { items })
    }

    pub fn items(&self) -> &[CMatrix<T>] {
        &self.items
    }

    pub fn into_items(self) -> Vec<CMatrix<T>> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> (usize, usize) {
        self.items[0].shape()
    }

    pub fn adjoint(&self) -> Self {
        OperatorTuple { items: self.items.iter().map(|x| x.adjoint()).collect() }
    }

    /// `[x_1; …; x_n]`.
    pub fn vstack(&self) -> CMatrix<T> {
        let (r, c) = self.shape();
        let mut out = CMatrix::zeros(r * self.len(), c);
        for (k, x) in self.items.iter().enumerate() {
            out.view_mut((k * r, 0), (r, c)).copy_from(x);
        }
        out
    }

    /// `[x_1, …, x_n]`.
    pub fn hstack(&self) -> CMatrix<T> {
        let (r, c) = self.shape();
        let mut out = CMatrix::zeros(r, c * self.len());
        for (k, x) in self.items.iter().enumerate() {
            out.view_mut((0, k * c), (r, c)).copy_from(x);
        }
        out
    }

    /// Inverse of [`OperatorTuple::vstack`] for a stack of this tuple's shape.
    pub fn unstack_rows(&self, stacked: &CMatrix<T>) -> Vec<CMatrix<T>> {
        let (r, c) = self.shape();
        (0..self.len()).map(|k| stacked.view((k * r, 0), (r, c)).into_owned()).collect()
    }

    pub fn unstack_cols(&self, stacked: &CMatrix<T>) -> Vec<CMatrix<T>> {
        let (r, c) = self.shape();
        (0..self.len()).map(|k| stacked.view((0, k * c), (r, c)).into_owned()).collect()
    }
}

pub(crate) fn check_matrix<T: Real>(x: &CMatrix<T>) -> Result<()> {
    let (r, c) = x.shape();
    if r == 0 || c == 0 {
        return Err(Error::shape("empty matrix"));
    }
    if r > MAX_DIM || c > MAX_DIM {
        return Err(Error::domain(format!("matrix {r}x{c} exceeds the size cap {MAX_DIM}")));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    Ok(())
}

/// Thin SVD `x = U diag(σ) V*` with `σ` nonincreasing.
pub(crate) fn svd<T: Real>(x: &CMatrix<T>, vectors: bool) -> Result<SVD<nalgebra::Complex<T>, nalgebra::Dyn, nalgebra::Dyn>> {
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    SVD::try_new(x.clone(), vectors, vectors, T::eps(), 0)
        .ok_or_else(|| Error::Numeric("singular value decomposition did not converge".into()))
}

pub fn singular_values<T: Real>(x: &CMatrix<T>) -> Result<Vec<T>> {
    check_matrix(x)?;
    sv(x)
}

fn sv<T: Real>(x: &CMatrix<T>) -> Result<Vec<T>> {
    let mut s: Vec<T> = svd(x, false)?.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(s)
}

pub fn ideal_norm<T: Real>(spec: &GaugeSpec, x: &CMatrix<T>) -> Result<T> {
    ideal_norm_with(spec, x, &GaugeOptions::default())
}

pub fn ideal_norm_with<T: Real>(spec: &GaugeSpec, x: &CMatrix<T>, opts: &GaugeOptions) -> Result<T> {
    spec.validate()?;
    check_matrix(x)?;
    finite(norm_abs(spec, &sv(x)?, opts))
}

fn finite<T: Real>(v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric("norm is not representable (overflow)".into()))
    }
}

/// Ideal norm without the size cap, for stacked matrices.
pub(crate) fn stacked_norm<T: Real>(spec: &GaugeSpec, x: &CMatrix<T>, opts: &GaugeOptions) -> Result<T> {
    finite(norm_abs(spec, &sv(x)?, opts))
}

/// `‖(Σ x_k^* x_k)^{1/2}‖_{S_E}`.
pub fn column_square_norm<T: Real>(spec: &GaugeSpec, t: &OperatorTuple<T>) -> Result<T> {
    spec.validate()?;
    stacked_norm(spec, &t.vstack(), &GaugeOptions::default())
}

/// `‖(Σ x_k x_k^*)^{1/2}‖_{S_E}`.
pub fn row_square_norm<T: Real>(spec: &GaugeSpec, t: &OperatorTuple<T>) -> Result<T> {
    spec.validate()?;
    stacked_norm(spec, &t.hstack(), &GaugeOptions::default())
}

/// Eigenvalues of a Hermitian positive semidefinite matrix, nonincreasing,
/// with values below `1e-12·λ_max` clamped to zero.
pub fn psd_eigenvalues<T: Real>(h: &CMatrix<T>) -> Result<Vec<T>> {
    if h.nrows() != h.ncols() {
        return Err(Error::shape("expected a square matrix"));
    }
    let eig = SymmetricEigen::try_new(h.clone(), T::eps(), 0)
        .ok_or_else(|| Error::Numeric("Hermitian eigendecomposition did not converge".into()))?;
    let mut ev: Vec<T> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let top = ev.first().copied().unwrap_or(T::zero()).abs();
    let floor = T::lit(1e-12) * top;
    Ok(ev.into_iter().map(|v| if v <= floor { T::zero() } else { v }).collect())
}

/// `Σ_k x_k^* x_k + x_k x_k^*`.
pub fn selfadjoint_square<T: Real>(t: &OperatorTuple<T>) -> Result<CMatrix<T>> {
    let (r, c) = t.shape();
    if r != c {
        return Err(Error::shape(format!("selfadjoint square function needs square matrices, got {r}x{c}")));
    }
    let mut s = CMatrix::zeros(r, r);
    for x in t.items() {
        s += x.adjoint() * x + x * x.adjoint();
    }
    Ok(s)
}

/// `‖(Σ_k x_k^* x_k + x_k x_k^*)^{1/2}‖_{S_E}`.
pub fn selfadjoint_square_norm<T: Real>(spec: &GaugeSpec, t: &OperatorTuple<T>) -> Result<T> {
    spec.validate()?;
    let s = selfadjoint_square(t)?;
    let mu: Vec<T> = psd_eigenvalues(&s)?.into_iter().map(|v| v.sqrt()).collect();
    Ok(norm_abs(spec, &mu, &GaugeOptions::default()))
}

/// Subgradient `G` of the ideal norm at `x`: `Re tr(G^* x) = ‖x‖` and
/// `‖G‖_{S_{E'}} ≤ 1`.
pub fn ideal_subgradient<T: Real>(spec: &GaugeSpec, x: &CMatrix<T>) -> Result<CMatrix<T>> {
    spec.validate()?;
    spectral_map(x, |s| subgrad_abs(spec, s, &GaugeOptions::default()))
}

/// Maximizer of `Re tr(S^* w)` over the unit ball of `S_E`; the maximum is
/// `‖w‖_{S_{E'}}`.
pub fn ideal_support<T: Real>(spec: &GaugeSpec, w: &CMatrix<T>) -> Result<CMatrix<T>> {
    spec.validate()?;
    spectral_map(w, |s| support_abs(spec, s, &GaugeOptions::default()))
}

pub(crate) fn spectral_map<T: Real, F: FnOnce(&[T]) -> Vec<T>>(x: &CMatrix<T>, f: F) -> Result<CMatrix<T>> {
    let d = svd(x, true)?;
    let s: Vec<T> = d.singular_values.iter().copied().collect();
    abs_checked(&s)?;
    let g = f(&s);
    let u = d.u.expect("requested");
    let vt = d.v_t.expect("requested");
    let mid = DMatrix::from_fn(g.len(), g.len(), |i, j| if i == j { creal(g[i]) } else { creal(T::zero()) });
    Ok(u * mid * vt)
}

/// `Re tr(a^* b) = Re Σ conj(a_ij) b_ij`.
pub fn real_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |s, (x, y)| s + x.re * y.re + x.im * y.im)
}

/// Matrix unit `e_ij` of shape `rows × cols`.
pub fn matrix_unit<T: Real>(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(rows, cols);
    m[(i, j)] = creal(T::one());
    m
}

pub fn from_real<T: Real>(rows: usize, cols: usize, row_major: &[T]) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |i, j| creal(row_major[i * cols + j]))
}
