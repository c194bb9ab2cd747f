//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::Instant;

use ncsym::gauge::{dual_norm_with, resolve_closed_form, GaugeOptions, GaugeSpec};
use ncsym::grothendieck::{certificate_search, certificate_to_json, check_certificate_json, LinearMapToHilbert, SearchOptions, SearchOutcome};
use ncsym::ideal::{ideal_norm, matrix_unit};
use ncsym::khintchine::{best_row_column_split, rademacher_second_moment, verify_khintchine, KhCase, KhOptions, RademacherMode, SplitOptions};
use ncsym::schur::{identity_symbol, multiplier_norm_lower, sesf_char_gauge, to_l2_char_norm, two_sided_check, SchurOptions};
use ncsym::{random, seed, CMatrix64, Exponent, OperatorTuple};

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(s: &str) -> GaugeSpec {
    s.parse().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn lp(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn sample(master: u64, i: usize) -> u64 {
    seed::derive(master, seed::stream::INSTANCE, i as u64)
}

fn gauge_oracle() -> Outcome {
    let start = Instant::now();
    let ps = [("1", 1.0), ("4/3", 4.0 / 3.0), ("2", 2.0), ("3", 3.0), ("inf", f64::INFINITY)];
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut rng = seed::rng(sample(1, i));
        let (r, c) = (1 + i % 8, 1 + (i / 8) % 8);
        let x: CMatrix64 = random::gaussian(r, c, &mut rng);
        let sv: Vec<f64> = x.clone().singular_values().iter().copied().collect();
        for (name, p) in ps {
            worst = worst.max(rel(ideal_norm(&spec(&format!("lp:{name}")), &x).unwrap(), lp(&sv, p)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome { pass: worst <= 1e-8 && secs < 10.0, detail: format!("max relative error {worst:.2e} over 1000 norms, {secs:.2} s") }
}

fn duality() -> Outcome {
    let mut numeric = GaugeOptions::default();
    numeric.dual.closed_form = false;
    let ps = [("4/3", 4.0), ("3/2", 3.0), ("3", 1.5), ("4", 4.0 / 3.0), ("1", f64::INFINITY)];
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut rng = seed::rng(sample(2, i));
        let v: Vec<f64> = random::gaussian_real::<f64, _>(1, 1 + i % 8, &mut rng).iter().map(|z| z.re).collect();
        let (name, conj) = ps[i % ps.len()];
        let got = dual_norm_with(&spec(&format!("lp:{name}")), &v, &numeric).unwrap().value;
        worst = worst.max(rel(got, lp(&v, conj)));
    }
    Outcome { pass: worst <= 1e-6, detail: format!("numeric dual vs conjugate exponent, max relative error {worst:.2e} on 200 vectors") }
}

fn khintchine_exact() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = seed::rng(sample(3, i));
        let n = 1 + i % 12;
        let t: OperatorTuple<f64> = random::tuple(n, 1 + i % 4, &mut rng);
        let r = rademacher_second_moment(&spec("lp:2"), &t, RademacherMode::Exact, 0).unwrap();
        let direct: f64 = t.items().iter().map(|x| x.norm_squared()).sum();
        worst = worst.max(rel(r.value * r.value, direct));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome { pass: worst <= 1e-9 && secs < 30.0, detail: format!("max relative error {worst:.2e} on 100 tuples, {secs:.2} s") }
}

fn khintchine_constant_one() -> Outcome {
    let opts = KhOptions { instances: 100, seed: 4, tol: 1e-7, ..KhOptions::default() };
    let concave = verify_khintchine(&spec("lp:1"), KhCase::Concave2, &opts).unwrap();
    let convex = verify_khintchine(&spec("lp:4"), KhCase::Convex2 { q: "4".parse().unwrap() }, &opts).unwrap();
    Outcome {
        pass: concave.failures == 0 && convex.failures == 0,
        detail: format!("lp:1 rademacher <= split: {} failures; lp:4 max(column,row) <= rademacher: {} failures", concave.failures, convex.failures),
    }
}

fn khintchine_ratios() -> Outcome {
    let batch = |s: &str, case: KhCase, master: u64| {
        let opts = KhOptions { instances: 30, seed: master, ..KhOptions::default() };
        verify_khintchine(&spec(s), case, &opts).unwrap().max_ratio
    };
    let mut pass = true;
    let mut parts = Vec::new();
    let mut convex_ratios = Vec::new();
    for (s, case) in [
        ("lp:1", KhCase::Concave2),
        ("lp:4", KhCase::Convex2 { q: "4".parse().unwrap() }),
        ("lp:6", KhCase::Convex2 { q: "6".parse().unwrap() }),
        ("lp:8", KhCase::Convex2 { q: "8".parse().unwrap() }),
    ] {
        let (a, b) = (batch(s, case, 500), batch(s, case, 600));
        let stable = a.is_finite() && b.is_finite() && (a - b).abs() <= 0.1 * a.max(b);
        pass &= stable;
        parts.push(format!("{s} {a:.4}/{b:.4}"));
        if s != "lp:1" {
            convex_ratios.push(a.max(b));
        }
    }
    let monotone = convex_ratios.windows(2).all(|w| w[0] <= w[1]);
    Outcome { pass, detail: format!("max ratios per batch: {}; nondecreasing in q: {monotone} (not asserted)", parts.join(", ")) }
}

fn splitter_sanity() -> Outcome {
    let specs = ["lp:1", "lp:4/3", "lp:2", "lp:4", "lp:inf"];
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = seed::rng(sample(6, i));
        let d = 1 + i % 4;
        let x: CMatrix64 = random::gaussian(d, d, &mut rng);
        let e = spec(specs[i % specs.len()]);
        let t = OperatorTuple::new(vec![x.clone()]).unwrap();
        let s = best_row_column_split(&e, &t, &SplitOptions { seed: i as u64, ..SplitOptions::default() }).unwrap();
        worst = worst.max(rel(s.value, ideal_norm(&e, &x).unwrap()));
    }
    let units = OperatorTuple::new((0..4).map(|k| matrix_unit::<f64>(4, 4, k, 0)).collect()).unwrap();
    let v = best_row_column_split(&spec("lp:4"), &units, &SplitOptions::default()).unwrap().value;
    let bound = 4f64.powf(0.25);
    Outcome {
        pass: worst <= 1e-6 && v <= bound + 1e-6,
        detail: format!("single-element split vs ideal norm max relative error {worst:.2e}; e_k1 tuple split {v:.9} <= {bound:.9}"),
    }
}

fn certificates() -> Outcome {
    let opts = SearchOptions::default();
    let mut hs_ok = 0;
    let mut op_ok = 0;
    let mut op_constants = Vec::new();
    for i in 0..20 {
        let n = 2 + i % 3;
        let d = 1 + i % 4;
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(n, d, sample(7, i));
        if let SearchOutcome::Certified(c) = certificate_search(&map, &spec("lp:2"), 1.05, None, &opts).unwrap() {
            let json = certificate_to_json(&c).unwrap();
            hs_ok += check_certificate_json(&json).unwrap().valid as usize;
        }
        for c in [1.0, 2.0, 4.0] {
            if let SearchOutcome::Certified(cert) = certificate_search(&map, &spec("lp:inf"), c, None, &opts).unwrap() {
                if check_certificate_json(&certificate_to_json(&cert).unwrap()).unwrap().valid {
                    op_ok += 1;
                    op_constants.push(c);
                    break;
                }
            }
        }
    }
    let at_one = op_constants.iter().filter(|&&c| c == 1.0).count();
    Outcome {
        pass: hs_ok == 20 && op_ok == 20,
        detail: format!("lp:2 at C=1.05: {hs_ok}/20 certified and re-verified from JSON; lp:inf at C<=4: {op_ok}/20 ({at_one} already at C=1)"),
    }
}

fn schur_exact_direction() -> Outcome {
    let opts = SchurOptions::default();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = seed::rng(sample(8, i));
        let n = 1 + i % 6;
        let phi: CMatrix64 = random::gaussian(n, n, &mut rng);
        for e in ["lp:2", "lp:4", "lp:inf"] {
            let lo = multiplier_norm_lower(&phi, &spec(e), &spec("lp:2"), &opts).unwrap().value;
            let up = to_l2_char_norm(&phi, &spec(e), &opts.kfs).unwrap().value;
            worst = worst.max(lo / up);
        }
    }
    let mut identity_err = 0.0f64;
    for n in [4usize, 9] {
        let phi = identity_symbol::<f64>(n);
        let lo = multiplier_norm_lower(&phi, &spec("lp:inf"), &spec("lp:2"), &opts).unwrap().value;
        let up = to_l2_char_norm(&phi, &spec("lp:inf"), &opts.kfs).unwrap().value;
        let root = (n as f64).sqrt();
        identity_err = identity_err.max((lo - root).abs()).max((up - root).abs());
    }
    Outcome {
        pass: worst <= 1.0 + 1e-6 && identity_err <= 1e-6,
        detail: format!("max lower/upper {worst:.9} on 300 symbols; identity symbol |side - sqrt n| <= {identity_err:.2e}"),
    }
}

fn closed_form_chains() -> Outcome {
    let g = |p: &str| resolve_closed_form(&spec(&format!("conv(dual(conc(lp:{p},2)),2)")));
    let cases = [(g("4"), spec("lp:4")), (g("6"), spec("lp:3")), (g("inf"), spec("lp:2"))];
    let mut pass = cases.iter().all(|(a, b)| a == b);
    let l = sesf_char_gauge(&spec("lp:inf"), &spec("lp:1")).unwrap();
    let by_hand = resolve_closed_form(&spec("prod(conv(dual(conc(lp:inf,2)),2),conv(dual(conc(dual(lp:1),2)),2))"));
    pass &= l == spec("lp:1") && by_hand == spec("lp:1");
    let shown: Vec<String> = cases.iter().map(|(a, _)| a.to_string()).collect();
    Outcome { pass, detail: format!("G for lp:4, lp:6, lp:inf = {}; L for (lp:inf, lp:1) = {l}", shown.join(", ")) }
}

fn determinism() -> Outcome {
    let kh = || {
        let opts = KhOptions { instances: 5, seed: 99, ..KhOptions::default() };
        serde_json::to_string(&verify_khintchine(&spec("lp:1"), KhCase::Concave2, &opts).unwrap()).unwrap()
    };
    let mc = || {
        let t: OperatorTuple<f64> = random::tuple(24, 3, &mut seed::rng(5));
        let r = rademacher_second_moment(&spec("lp:4"), &t, RademacherMode::MonteCarlo { samples: 2000 }, 99).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    let schur = || {
        let phi: CMatrix64 = random::gaussian(4, 4, &mut seed::rng(6));
        let opts = SchurOptions { seed: 99, ..SchurOptions::default() };
        serde_json::to_string(&two_sided_check(&phi, &spec("lp:4"), &spec("lp:4/3"), &opts).unwrap()).unwrap()
    };
    let gro = || {
        let map: LinearMapToHilbert<f64> = LinearMapToHilbert::random(3, 3, 7);
        match certificate_search(&map, &spec("lp:4"), 1.0, None, &SearchOptions::default()).unwrap() {
            SearchOutcome::Certified(c) => certificate_to_json(&c).unwrap(),
            other => serde_json::to_string(&other).unwrap(),
        }
    };
    let suites: [(&str, &dyn Fn() -> String); 4] = [("kh-verify", &kh), ("monte-carlo", &mc), ("schur", &schur), ("gro", &gro)];
    let mut same = Vec::new();
    for (name, f) in suites {
        if f() == f() {
            same.push(name);
        }
    }
    Outcome { pass: same.len() == 4, detail: format!("byte-identical reruns: {}", same.join(", ")) }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("gauge/oracle agreement", gauge_oracle),
        ("duality", duality),
        ("khintchine exact case", khintchine_exact),
        ("khintchine constant-one directions", khintchine_constant_one),
        ("khintchine empirical ratios", khintchine_ratios),
        ("splitter sanity", splitter_sanity),
        ("grothendieck certificates", certificates),
        ("schur exact direction", schur_exact_direction),
        ("closed-form chains", closed_form_chains),
        ("determinism", determinism),
    ];
    let _ = Exponent::ONE;
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!("criterion {:>2} {} {name}: {} [{:.2} s]", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
