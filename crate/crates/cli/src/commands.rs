use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ncsym::gauge::{dual_norm_with, gauge_norm, kfs_norm_with, resolve_closed_form, GaugeOptions, GaugeSpec, KfsOptions, KfsSpec, SpaceSpec};
use ncsym::grothendieck::{self, C1Options, LinearMapToHilbert, SearchOptions, SearchOutcome};
use ncsym::khintchine::{self, KhCase, KhOptions};
use ncsym::schur::{self, LpTarget, SchurOptions};
use ncsym::{ideal, io, seed, CMatrix64, Error, Exponent};

use crate::config::RunConfig;
use crate::{EXIT_CHECK, EXIT_INADMISSIBLE, EXIT_INCONCLUSIVE, EXIT_NUMERIC, EXIT_PARSE};

#[derive(Debug)]
pub enum CmdError {
    Core(Error),
    Input(String),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Core(e) => e.fmt(f),
            CmdError::Input(s) => write!(f, "invalid arguments: {s}"),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Core(e)
    }
}

type CmdResult = Result<Outcome, CmdError>;

pub struct Outcome {
    pub result: Value,
    pub status: &'static str,
    pub code: u8,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, status: "ok", code: 0 }
    }

    fn failed(result: Value) -> Self {
        Outcome { result, status: "failed", code: EXIT_CHECK }
    }
}

pub fn classify(e: &CmdError) -> (&'static str, u8) {
    match e {
        CmdError::Input(_) => ("input", EXIT_PARSE),
        CmdError::Core(e) => match e {
            Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Shape(_) | Error::Domain(_) | Error::NonFinite(_) => ("input", EXIT_PARSE),
            Error::Inadmissible(_) => ("inadmissible", EXIT_INADMISSIBLE),
            Error::Numeric(_) => ("numeric", EXIT_NUMERIC),
            Error::Assertion(_) => ("assertion", EXIT_CHECK),
        },
    }
}

fn to_json<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("reports serialize")
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, CmdError> {
    Ok(s.parse::<T>()?)
}

// ---------------------------------------------------------------- norm

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Ideal norm for gauge specs, grid norm for Köthe specs.
    Auto,
    /// Unitary ideal norm of the matrix.
    Ideal,
    /// Gauge norm of the entry moduli, read row by row.
    Vector,
    /// Dual gauge norm of the entry moduli.
    Dual,
    /// Köthe function space norm on the grid.
    Kfs,
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    /// Space in canonical text form, e.g. `lp:4` or `sum(mixed(lp:2,inf),t(mixed(lp:2,inf)))`.
    #[arg(long)]
    pub space: String,
    /// Matrix file (`.csv` real, otherwise JSON).
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub kind: NormKind,
    /// Cross-check against an independent closed-form evaluation.
    #[arg(long)]
    pub oracle: bool,
}

fn schatten_oracle(spec: &GaugeSpec, m: &CMatrix64) -> Option<(f64, &'static str)> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    match resolve_closed_form(spec) {
        GaugeSpec::Lp(p) if p.is_two() => Some((m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), "frobenius")),
        GaugeSpec::Lp(p) => Some((lp_direct(&s, p), "schatten")),
        GaugeSpec::KyFan(k) => Some((s.iter().take(k).sum(), "ky_fan")),
        _ => None,
    }
}

fn lp_direct(v: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        Exponent::Finite(_) => {
            let p = p.to_f64();
            v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

pub fn norm(a: &NormArgs, cfg: &RunConfig) -> CmdResult {
    let space: SpaceSpec = parse(&a.space)?;
    let m: CMatrix64 = io::read_matrix(&a.matrix)?;
    let moduli: Vec<f64> = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm()).collect();
    let kind = match (a.kind, &space) {
        (NormKind::Auto, SpaceSpec::Gauge(_)) => NormKind::Ideal,
        (NormKind::Auto, SpaceSpec::Kfs(_)) => NormKind::Kfs,
        (k, _) => k,
    };
    let gauge = || match &space {
        SpaceSpec::Gauge(g) => Ok(g.clone()),
        SpaceSpec::Kfs(_) => Err(CmdError::Input("this kind needs a gauge spec".into())),
    };
    let tol = cfg.tol.unwrap_or(if matches!(kind, NormKind::Dual) { 1e-6 } else { 1e-8 });
    let (value, extra, oracle): (f64, Value, Option<(f64, &str)>) = match kind {
        NormKind::Ideal => {
            let g = gauge()?;
            let v = ideal::ideal_norm(&g, &m)?;
            (v, json!({}), if a.oracle { schatten_oracle(&g, &m) } else { None })
        }
        NormKind::Vector => {
            let g = gauge()?;
            let v = gauge_norm(&g, &moduli)?;
            let o = resolve_closed_form(&g).as_lp().map(|p| (lp_direct(&moduli, p), "lp"));
            (v, json!({}), if a.oracle { o } else { None })
        }
        NormKind::Dual => {
            let g = gauge()?;
            let e = dual_norm_with(&g, &moduli, &GaugeOptions::default())?;
            let mut numeric = GaugeOptions::default();
            numeric.dual.closed_form = false;
            numeric.dual.seed = cfg.seed;
            let o = if a.oracle && resolve_closed_form(&g).as_lp().is_some() {
                Some((dual_norm_with(&g, &moduli, &numeric)?.value, "numeric_dual"))
            } else {
                None
            };
            (e.value, json!({ "quality": e.quality }), o)
        }
        NormKind::Kfs => {
            let k: KfsSpec = match &space {
                SpaceSpec::Kfs(k) => k.clone(),
                SpaceSpec::Gauge(_) => return Err(CmdError::Input("kind kfs needs a grid space spec".into())),
            };
            let opts = KfsOptions { tol: cfg.tol.unwrap_or(1e-6), budget: cfg.budget, ..KfsOptions::default() };
            let r = kfs_norm_with(&k, &m, &opts)?;
            let o = match &k {
                KfsSpec::L2Grid => Some((lp_direct(&moduli, Exponent::TWO), "entrywise")),
                KfsSpec::LpGrid(p) => Some((lp_direct(&moduli, *p), "entrywise")),
                _ => None,
            };
            (r.value, json!({ "lower": r.lower, "quality": r.quality, "iterations": r.iterations }), if a.oracle { o } else { None })
        }
        NormKind::Auto => unreachable!(),
    };
    let mut result = json!({ "kind": kind, "space": space.to_string(), "value": value });
    if let Value::Object(extra) = extra {
        result.as_object_mut().unwrap().extend(extra);
    }
    if !a.oracle {
        return Ok(Outcome::ok(result));
    }
    match oracle {
        Some((o, method)) => {
            let agrees = (value - o).abs() <= tol * o.abs().max(1.0);
            result["oracle"] = json!({ "method": method, "value": o, "tolerance": tol, "agrees": agrees });
            Ok(if agrees { Outcome::ok(result) } else { Outcome::failed(result) })
        }
        None => {
            result["oracle"] = json!({ "method": null, "note": "no closed form for this space" });
            Ok(Outcome::ok(result))
        }
    }
}

// ---------------------------------------------------------------- kh-verify

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KhCaseArg {
    /// `E` 2-concave: Rademacher average ≤ best split.
    Concave,
    /// `E` 2-convex and q-concave: max of square functions ≤ Rademacher average.
    Convex,
}

#[derive(Args, Debug, Serialize)]
pub struct KhArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, value_enum)]
    pub case: KhCaseArg,
    /// Concavity exponent for the convex case; defaults to the space's own.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Tuple length.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Matrix size.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
}

pub fn kh_verify(a: &KhArgs, cfg: &RunConfig) -> CmdResult {
    let spec: GaugeSpec = parse(&a.space)?;
    let case = match a.case {
        KhCaseArg::Concave => KhCase::Concave2,
        KhCaseArg::Convex => {
            let q = match &a.q {
                Some(q) => parse::<Exponent>(q)?,
                None => spec.profile()?.concave,
            };
            KhCase::Convex2 { q }
        }
    };
    let mut opts = KhOptions { instances: a.instances, n: a.n, d: a.d, seed: cfg.seed, ..KhOptions::default() };
    opts.split.restarts = a.restarts;
    if let Some(t) = cfg.tol {
        opts.tol = t;
    }
    if let Some(b) = cfg.budget {
        opts.split.budget = b;
    }
    let report = khintchine::verify_khintchine(&spec, case, &opts)?;
    let result = to_json(&report);
    Ok(if report.all_hold() { Outcome::ok(result) } else { Outcome::failed(result) })
}

// ---------------------------------------------------------------- gro

#[derive(Args, Debug, Serialize)]
pub struct GroArgs {
    /// Source space `E` (2-convex).
    #[arg(long, required_unless_present = "check")]
    pub space: Option<String>,
    /// Map file: `{"n": .., "coefficients": [[..]]}` or a bare `d × n²` coefficient matrix.
    #[arg(long, conflicts_with_all = ["random", "entry"])]
    pub map: Option<PathBuf>,
    /// Random Gaussian map `n,d`.
    #[arg(long, conflicts_with = "entry")]
    pub random: Option<String>,
    /// Entry functional `x ↦ x_11` on `n × n`.
    #[arg(long)]
    pub entry: Option<usize>,
    /// Search at this constant only; otherwise bracket the best constant.
    #[arg(long)]
    pub constant: Option<f64>,
    /// Write the certificate JSON here.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Re-verify a saved certificate and exit.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

fn load_map(a: &GroArgs, cfg: &RunConfig) -> Result<LinearMapToHilbert<f64>, CmdError> {
    if let Some(p) = &a.map {
        let text = std::fs::read_to_string(p).map_err(Error::from)?;
        if let Ok(m) = serde_json::from_str::<LinearMapToHilbert<f64>>(&text) {
            return Ok(LinearMapToHilbert::new(m.n(), m.coefficients().clone())?);
        }
        let c: CMatrix64 = io::parse_matrix_json(&text)?;
        let n = (c.ncols() as f64).sqrt().round() as usize;
        return Ok(LinearMapToHilbert::new(n, c)?);
    }
    if let Some(r) = &a.random {
        let parts: Vec<usize> = r.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| CmdError::Input(format!("--random expects n,d, got `{r}`")))?;
        let [n, d] = parts[..] else { return Err(CmdError::Input(format!("--random expects n,d, got `{r}`"))) };
        if n == 0 || d == 0 || d > grothendieck::MAX_OUTPUT_DIM {
            return Err(CmdError::Input(format!("--random sizes out of range: {r}")));
        }
        return Ok(LinearMapToHilbert::random(n, d, seed::derive(cfg.seed, seed::stream::INSTANCE, 0)));
    }
    if let Some(n) = a.entry {
        if n == 0 {
            return Err(CmdError::Input("--entry needs n ≥ 1".into()));
        }
        return Ok(LinearMapToHilbert::entry(n, 0, 0));
    }
    Err(CmdError::Input("one of --map, --random, --entry is required".into()))
}

pub fn gro(a: &GroArgs, cfg: &RunConfig) -> CmdResult {
    if let Some(p) = &a.check {
        let text = std::fs::read_to_string(p).map_err(Error::from)?;
        let report = grothendieck::check_certificate_json(&text)?;
        let result = to_json(&report);
        return Ok(if report.valid { Outcome::ok(result) } else { Outcome::failed(result) });
    }
    let spec: GaugeSpec = parse(a.space.as_deref().expect("clap enforces --space"))?;
    let map = load_map(a, cfg)?;
    let mut search = SearchOptions::default();
    search.norm.seed = cfg.seed;
    if let Some(b) = cfg.budget {
        search.rounds = b;
    }
    if let Some(c) = a.constant {
        let out = grothendieck::certificate_search(&map, &spec, c, None, &search)?;
        let mut result = json!({ "outcome": out.label(), "constant": c });
        let code = match &out {
            SearchOutcome::Certified(cert) => {
                let check = grothendieck::check_certificate_json(&grothendieck::certificate_to_json(cert)?)?;
                result["t_norm"] = json!(cert.t_norm);
                result["check"] = to_json(&check);
                match &a.certificate {
                    Some(p) => {
                        std::fs::write(p, grothendieck::certificate_to_json(cert)?).map_err(Error::from)?;
                        result["certificate_path"] = json!(p.display().to_string());
                    }
                    None => result["certificate"] = to_json(cert),
                }
                if check.valid {
                    0
                } else {
                    EXIT_CHECK
                }
            }
            SearchOutcome::Violated(v) => {
                result["ratio"] = json!(v.ratio);
                result["tuple"] = to_json(&v.tuple);
                0
            }
            SearchOutcome::Inconclusive { rounds, samples, .. } => {
                result["rounds"] = json!(rounds);
                result["samples"] = json!(samples);
                EXIT_INCONCLUSIVE
            }
        };
        let status = match code {
            0 => "ok",
            EXIT_INCONCLUSIVE => "inconclusive",
            _ => "failed",
        };
        return Ok(Outcome { result, status, code });
    }
    let opts = C1Options { search, seed: cfg.seed, tol: cfg.tol.unwrap_or(1e-6), ..C1Options::default() };
    let est = grothendieck::estimate_c1(&map, &spec, &opts)?;
    let result = to_json(&est);
    Ok(if est.inconclusive || est.certified_at.is_none() {
        Outcome { result, status: "inconclusive", code: EXIT_INCONCLUSIVE }
    } else if !est.ordering_holds {
        Outcome::failed(result)
    } else {
        Outcome::ok(result)
    })
}

// ---------------------------------------------------------------- schur

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SchurMode {
    /// Multiplier norm against its characterization norm.
    TwoSided,
    /// Multiplier norm lower bound only.
    Lower,
    /// Characterization of multipliers into `S_2`.
    L2,
    /// Characterization of multipliers from `S_E` into `S_F`.
    Sesf,
    /// Characterization of multipliers into `S_p` or `ℓ_p`, `p ∈ [1, 2]`.
    Lp,
}

#[derive(Args, Debug, Serialize)]
pub struct SchurArgs {
    /// Source space `E`.
    #[arg(long)]
    pub source: String,
    /// Target space `F`.
    #[arg(long, default_value = "lp:2")]
    pub target: String,
    /// Symbol file (`.csv` real, otherwise JSON).
    #[arg(long, conflicts_with_all = ["identity", "random"])]
    pub symbol: Option<PathBuf>,
    /// `n × n` identity symbol.
    #[arg(long, conflicts_with = "random")]
    pub identity: Option<usize>,
    /// Random Gaussian `n × n` symbol.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, value_enum, default_value = "two-sided")]
    pub mode: SchurMode,
    /// Exponent for `--mode lp`.
    #[arg(long)]
    pub p: Option<String>,
    /// Entrywise `ℓ_p` target for `--mode lp` instead of `S_p`.
    #[arg(long)]
    pub entrywise: bool,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
}

fn char_json(c: &schur::CharNorm<f64>) -> Value {
    json!({
        "outer": c.outer,
        "inner": c.inner,
        "value": c.value,
        "lower": c.lower,
        "quality": c.quality,
        "decomposition": to_json(&c.decomposition),
    })
}

pub fn schur(a: &SchurArgs, cfg: &RunConfig) -> CmdResult {
    let e: GaugeSpec = parse(&a.source)?;
    let f: GaugeSpec = parse(&a.target)?;
    let phi: CMatrix64 = if let Some(p) = &a.symbol {
        io::read_matrix(p)?
    } else if let Some(n) = a.identity {
        schur::identity_symbol(n)
    } else if let Some(n) = a.random {
        ncsym::random::gaussian(n, n, &mut seed::rng(seed::derive(cfg.seed, seed::stream::INSTANCE, 0)))
    } else {
        return Err(CmdError::Input("one of --symbol, --identity, --random is required".into()));
    };
    if phi.is_empty() {
        return Err(CmdError::Input("empty symbol".into()));
    }
    let kfs = KfsOptions { tol: cfg.tol.unwrap_or(1e-6), budget: cfg.budget, ..KfsOptions::default() };
    let opts = SchurOptions { restarts: a.restarts, seed: cfg.seed, kfs: kfs.clone(), ..SchurOptions::default() };
    let result = match a.mode {
        SchurMode::TwoSided => to_json(&schur::two_sided_check(&phi, &e, &f, &opts)?),
        SchurMode::Lower => {
            let v = schur::multiplier_norm_lower(&phi, &e, &f, &opts)?;
            json!({ "value": v.value, "quality": v.quality })
        }
        SchurMode::L2 => char_json(&schur::to_l2_char_norm(&phi, &e, &kfs)?),
        SchurMode::Sesf => char_json(&schur::sesf_char_norm(&phi, &e, &f, &kfs)?),
        SchurMode::Lp => {
            let p: Exponent = parse(a.p.as_deref().ok_or_else(|| CmdError::Input("--mode lp needs --p".into()))?)?;
            let target = if a.entrywise { LpTarget::Entrywise } else { LpTarget::Schatten };
            char_json(&schur::to_lp_char_norm(&phi, &e, p, target, &kfs)?)
        }
    };
    Ok(Outcome::ok(result))
}

// ---------------------------------------------------------------- selftest

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Random instances per check.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn max_rel_err(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs.fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / b.abs().max(1e-300)))
}

pub fn selftest(a: &SelftestArgs, cfg: &RunConfig) -> CmdResult {
    let k = a.instances.max(1);
    let sd = |stream: u64, i: usize| seed::derive(cfg.seed, stream, i as u64);
    let mut checks = Vec::new();

    let mut pairs = Vec::new();
    for i in 0..k {
        let m: CMatrix64 = ncsym::random::gaussian(4, 3, &mut seed::rng(sd(seed::stream::INSTANCE, i)));
        for p in ["1", "4/3", "2", "3", "inf"] {
            let spec: GaugeSpec = format!("lp:{p}").parse()?;
            pairs.push((ideal::ideal_norm(&spec, &m)?, schatten_oracle(&spec, &m).expect("lp has a closed form").0));
        }
    }
    let err = max_rel_err(pairs.into_iter());
    checks.push(Check { name: "schatten_norms_match_svd", pass: err <= 1e-8, detail: format!("max relative error {err:.2e}") });

    let mut pairs = Vec::new();
    let mut numeric = GaugeOptions::default();
    numeric.dual.closed_form = false;
    for i in 0..k {
        let m: CMatrix64 = ncsym::random::gaussian(1, 5, &mut seed::rng(sd(seed::stream::DUAL, i)));
        let v: Vec<f64> = m.iter().map(|z| z.re).collect();
        for p in ["3/2", "3"] {
            let spec: GaugeSpec = format!("lp:{p}").parse()?;
            pairs.push((dual_norm_with(&spec, &v, &numeric)?.value, dual_norm_with(&spec, &v, &GaugeOptions::default())?.value));
        }
    }
    let err = max_rel_err(pairs.into_iter());
    checks.push(Check { name: "numeric_dual_matches_conjugate_exponent", pass: err <= 1e-6, detail: format!("max relative error {err:.2e}") });

    let kh = |s: &str, case: KhCase| -> Result<khintchine::KhReport, CmdError> {
        let opts = KhOptions { instances: k, seed: cfg.seed, ..KhOptions::default() };
        Ok(khintchine::verify_khintchine(&parse(s)?, case, &opts)?)
    };
    let r = kh("lp:1", KhCase::Concave2)?;
    checks.push(Check { name: "khintchine_concave_lp1", pass: r.all_hold(), detail: format!("{} failures, max ratio {:.4}", r.failures, r.max_ratio) });
    let r = kh("lp:4", KhCase::Convex2 { q: parse("4")? })?;
    checks.push(Check { name: "khintchine_convex_lp4", pass: r.all_hold(), detail: format!("{} failures, max ratio {:.4}", r.failures, r.max_ratio) });

    let mut ok = 0;
    for i in 0..k.min(5) {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(3, 3, sd(seed::stream::WITNESS, i));
        if let SearchOutcome::Certified(c) = grothendieck::certificate_search(&map, &parse("lp:2")?, 1.05, None, &SearchOptions::default())? {
            ok += grothendieck::check_certificate_json(&grothendieck::certificate_to_json(&c)?)?.valid as usize;
        }
    }
    checks.push(Check { name: "hilbert_schmidt_certificates", pass: ok == k.min(5), detail: format!("{ok}/{} certified and re-verified", k.min(5)) });

    let mut worst = 0.0f64;
    let opts = SchurOptions { restarts: 16, seed: cfg.seed, ..SchurOptions::default() };
    for i in 0..k {
        let phi: CMatrix64 = ncsym::random::gaussian(3, 3, &mut seed::rng(sd(seed::stream::RESTART, i)));
        for e in ["lp:2", "lp:4", "lp:inf"] {
            let e: GaugeSpec = parse(e)?;
            let lo = schur::multiplier_norm_lower(&phi, &e, &parse("lp:2")?, &opts)?.value;
            let up = schur::to_l2_char_norm(&phi, &e, &KfsOptions::default())?.value;
            worst = worst.max(lo / up);
        }
    }
    checks.push(Check { name: "schur_contractive_direction", pass: worst <= 1.0 + 1e-6, detail: format!("max lower/upper {worst:.8}") });

    let chain = schur::l2_char_gauge(&parse("lp:4")?)? == parse::<GaugeSpec>("lp:4")?
        && schur::l2_char_gauge(&parse("lp:inf")?)? == parse::<GaugeSpec>("lp:2")?
        && schur::sesf_char_gauge(&parse("lp:inf")?, &parse("lp:1")?)? == parse::<GaugeSpec>("lp:1")?;
    checks.push(Check { name: "closed_form_chains", pass: chain, detail: String::new() });

    let all = checks.iter().all(|c| c.pass);
    let result = json!({ "passed": checks.iter().filter(|c| c.pass).count(), "total": checks.len(), "checks": to_json(&checks) });
    Ok(if all { Outcome::ok(result) } else { Outcome::failed(result) })
}
