//! Symmetric gauges, their combinators, and Köthe spaces on the grid.
//!
//! Every gauge is normalized so that a standard basis vector has norm 1.
//! Inputs are taken entrywise-absolute; `ℓ_∞` has its own code paths.

mod dual;
pub(crate) mod eval;
mod kfs;
mod probe;
mod product;
pub mod spec;

pub use dual::DualOptions;
pub use eval::{gauge_norm, gauge_norm_with, gauge_subgradient, gauge_support, GaugeOptions};
pub use kfs::{kfs_norm, kfs_norm_with, KfsNorm, KfsOptions, Split};
pub use probe::{convexity_probe, ProbeReport, PROBE_TOLERANCE};
pub use product::ProductOptions;
pub use spec::{resolve_closed_form, DeclaredFlags, GaugeSpec, KfsSpec, Profile, SpaceSpec};

use crate::error::Result;
use crate::numeric::{Estimate, Quality};
use crate::scalar::Real;

/// Köthe dual norm `‖v‖_{E'}`; closed form when `spec` resolves to `ℓ_p` or
/// Ky Fan, otherwise multi-start ascent (flagged as a lower bound if it runs
/// out of budget).
pub fn dual_norm<T: Real>(spec: &GaugeSpec, v: &[T]) -> Result<Estimate<T>> {
    dual_norm_with(spec, v, &GaugeOptions::default())
}

pub fn dual_norm_with<T: Real>(spec: &GaugeSpec, v: &[T], opts: &GaugeOptions) -> Result<Estimate<T>> {
    spec.validate()?;
    let a = eval::abs_checked(v)?;
    let d = eval::dual_abs(spec, &a, opts);
    let quality = if is_closed(spec, opts) {
        Quality::ClosedForm
    } else if d.exact {
        Quality::Converged
    } else {
        Quality::LowerBound
    };
    Ok(Estimate { value: d.value, quality })
}

fn is_closed(spec: &GaugeSpec, opts: &GaugeOptions) -> bool {
    opts.dual.closed_form && matches!(resolve_closed_form(spec), GaugeSpec::Lp(_) | GaugeSpec::KyFan(_))
}

/// `inf ‖x‖_G ‖y‖_H` over factorizations `|z| = xy`.
pub fn product_gauge_norm<T: Real>(g: &GaugeSpec, h: &GaugeSpec, z: &[T], opts: &GaugeOptions) -> Result<Estimate<T>> {
    let spec = g.clone().product(h.clone());
    spec.validate()?;
    let a = eval::abs_checked(z)?;
    if opts.product.closed_form {
        if let GaugeSpec::Lp(p) = resolve_closed_form(&spec) {
            return Ok(Estimate::exact(eval::lp_norm(&a, p)));
        }
    }
    Ok(product::product_numeric(g, h, &a, opts))
}
