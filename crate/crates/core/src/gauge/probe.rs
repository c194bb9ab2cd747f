use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eval::{norm_abs, GaugeOptions};
use super::spec::{DeclaredFlags, GaugeSpec};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::seed;

/// Slack allowed before a sampled ratio counts as a violation.
pub const PROBE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub spec: GaugeSpec,
    pub p: Exponent,
    pub trials: usize,
    pub seed: u64,
    /// `max ‖(|x|^p+|y|^p)^{1/p}‖ / (‖x‖^p+‖y‖^p)^{1/p}` over the samples.
    pub worst_convexity_ratio: f64,
    /// Reciprocal of the same quotient, maximized.
    pub worst_concavity_ratio: f64,
    pub convex_pass: bool,
    pub concave_pass: bool,
}

impl ProbeReport {
    /// The probed spec wrapped with the flags that passed.
    pub fn apply(&self) -> GaugeSpec {
        let flags = DeclaredFlags {
            convex: self.convex_pass.then_some(self.p),
            concave: self.concave_pass.then_some(self.p),
        };
        if flags == DeclaredFlags::default() {
            self.spec.clone()
        } else {
            self.spec.clone().declare(flags)
        }
    }
}

/// Screens `spec` for `p`-convexity and `p`-concavity with constant 1 on
/// random pairs. A pass is evidence, not proof.
pub fn convexity_probe(spec: &GaugeSpec, p: Exponent, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::domain("convexity probe needs at least one trial"));
    }
    p.validate()?;
    spec.validate()?;
    let opts = GaugeOptions::default();
    let mut worst_vex = 0.0f64;
    let mut worst_cave = 0.0f64;
    for t in 0..trials {
        let mut rng = seed::rng(seed::derive(seed, seed::stream::PROBE, t as u64));
        let n = rng.gen_range(1..=8);
        let sparse = rng.gen_bool(0.5);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..n)
                .map(|_| if sparse && rng.gen_bool(0.5) { 0.0 } else { rng.gen::<f64>() * if rng.gen_bool(0.2) { 10.0 } else { 1.0 } })
                .collect()
        };
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let nx = norm_abs(spec, &x, &opts);
        let ny = norm_abs(spec, &y, &opts);
        let (mix, rhs) = match p {
            Exponent::Infinite => (x.iter().zip(&y).map(|(a, b)| a.max(*b)).collect::<Vec<_>>(), nx.max(ny)),
            _ => {
                let pr = p.to_f64();
                (
                    x.iter().zip(&y).map(|(a, b)| (a.powf(pr) + b.powf(pr)).powf(1.0 / pr)).collect(),
                    (nx.powf(pr) + ny.powf(pr)).powf(1.0 / pr),
                )
            }
        };
        let lhs = norm_abs(spec, &mix, &opts);
        if rhs > 0.0 && lhs > 0.0 {
            worst_vex = worst_vex.max(lhs / rhs);
            worst_cave = worst_cave.max(rhs / lhs);
        }
    }
    Ok(ProbeReport {
        spec: spec.clone(),
        p,
        trials,
        seed,
        worst_convexity_ratio: worst_vex,
        worst_concavity_ratio: worst_cave,
        convex_pass: worst_vex <= 1.0 + PROBE_TOLERANCE,
        concave_pass: worst_cave <= 1.0 + PROBE_TOLERANCE,
    })
}
