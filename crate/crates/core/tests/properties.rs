use ncsym::gauge::{dual_norm, gauge_norm, kfs_norm, GaugeSpec, KfsSpec, SpaceSpec};
use ncsym::ideal::{ideal_norm, real_inner};
use ncsym::khintchine::{rademacher_second_moment, RademacherMode};
use ncsym::schur::to_l2_char_norm;
use ncsym::{random, seed, CMatrix64, Exponent};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const GAUGES: [&str; 8] = ["lp:1", "lp:3/2", "lp:3", "lp:inf", "kyfan:2", "dual(lp:3)", "conv(lp:1,2)", "conc(lp:4,2)"];

fn spec(s: &str) -> GaugeSpec {
    s.parse().unwrap()
}

fn vector(len: usize, s: u64) -> Vec<f64> {
    let mut rng = seed::rng(s);
    (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect()
}

fn matrix(r: usize, c: usize, s: u64) -> CMatrix64 {
    random::gaussian(r, c, &mut seed::rng(s))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn gauge_norm_axioms(g in 0..GAUGES.len(), len in 1usize..7, s in any::<u64>(), t in -4.0f64..4.0) {
        let e = spec(GAUGES[g]);
        let a = vector(len, s);
        let b = vector(len, s ^ 0x9e37);
        let na = gauge_norm(&e, &a).unwrap();
        prop_assert!(na >= 0.0);
        let scaled: Vec<f64> = a.iter().map(|x| t * x).collect();
        prop_assert!(rel(gauge_norm(&e, &scaled).unwrap(), t.abs() * na) < 1e-9 || t == 0.0);
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert!(gauge_norm(&e, &sum).unwrap() <= na + gauge_norm(&e, &b).unwrap() + 1e-9);
        prop_assert_eq!(gauge_norm(&e, &vec![0.0; len]).unwrap(), 0.0);
    }

    #[test]
    fn gauge_norm_symmetric(g in 0..GAUGES.len(), len in 1usize..7, s in any::<u64>()) {
        let e = spec(GAUGES[g]);
        let a = vector(len, s);
        let mut rng = seed::rng(s.wrapping_add(1));
        let mut b: Vec<f64> = a.iter().map(|&x| if rng.gen::<bool>() { -x } else { x }).collect();
        b.shuffle(&mut rng);
        prop_assert!(rel(gauge_norm(&e, &a).unwrap(), gauge_norm(&e, &b).unwrap()) < 1e-12);
    }

    #[test]
    fn holder_pairing(g in 0..GAUGES.len(), len in 1usize..6, s in any::<u64>()) {
        let e = spec(GAUGES[g]);
        let a = vector(len, s);
        let b = vector(len, s ^ 0x51);
        let pair: f64 = a.iter().zip(&b).map(|(x, y)| (x * y).abs()).sum();
        let d = dual_norm(&e, &b).unwrap();
        prop_assert!(pair <= gauge_norm(&e, &a).unwrap() * d.value * (1.0 + 1e-6) + 1e-9);
    }

    #[test]
    fn dual_of_dual_is_original(g in 0..4usize, len in 1usize..6, s in any::<u64>()) {
        let e = spec(GAUGES[g]);
        let a = vector(len, s);
        let dd = spec(&format!("dual(dual({}))", GAUGES[g]));
        prop_assert!(rel(gauge_norm(&dd, &a).unwrap(), gauge_norm(&e, &a).unwrap()) < 1e-10);
    }

    #[test]
    fn ideal_norms_unitarily_invariant(g in 0..GAUGES.len(), n in 1usize..5, s in any::<u64>()) {
        let e = spec(GAUGES[g]);
        let x = matrix(n, n, s);
        let mut rng = seed::rng(s ^ 0xabc);
        let u: CMatrix64 = random::unitary(n, &mut rng);
        let v: CMatrix64 = random::unitary(n, &mut rng);
        let y = &u * &x * &v;
        prop_assert!(rel(ideal_norm(&e, &x).unwrap(), ideal_norm(&e, &y).unwrap()) < 1e-9);
        prop_assert!(rel(ideal_norm(&e, &x).unwrap(), ideal_norm(&e, &x.adjoint()).unwrap()) < 1e-9);
    }

    #[test]
    fn ideal_trace_duality(n in 1usize..5, s in any::<u64>()) {
        // Re tr(y* x) ≤ ‖x‖_{S_p} ‖y‖_{S_p'}
        let x = matrix(n, n, s);
        let y = matrix(n, n, s ^ 7);
        for (p, q) in [("lp:1", "lp:inf"), ("lp:3", "lp:3/2"), ("lp:2", "lp:2")] {
            prop_assert!(real_inner(&y, &x).abs() <= ideal_norm(&spec(p), &x).unwrap() * ideal_norm(&spec(q), &y).unwrap() + 1e-9);
        }
    }

    #[test]
    fn sum_space_below_each_summand(r in 1usize..4, c in 1usize..4, s in any::<u64>()) {
        let z = matrix(r, c, s);
        let x: KfsSpec = "mixed(lp:2,inf)".parse().unwrap();
        let y: KfsSpec = "t(mixed(lp:1,2))".parse().unwrap();
        let sum = x.clone().sum(y.clone());
        let v = kfs_norm(&sum, &z).unwrap();
        let nx = kfs_norm(&x, &z).unwrap().value;
        let ny = kfs_norm(&y, &z).unwrap().value;
        prop_assert!(v.value <= nx.min(ny) * (1.0 + 1e-9) + 1e-12);
        prop_assert!(v.lower <= v.value + 1e-12);
        let split = v.split.unwrap();
        prop_assert!((split.x + split.y - &z).norm() < 1e-12);
    }

    #[test]
    fn intersection_is_max(r in 1usize..4, s in any::<u64>()) {
        let z = matrix(r, r, s);
        let x: KfsSpec = "mixed(lp:2,inf)".parse().unwrap();
        let cap = x.clone().intersect(x.clone().transpose());
        let expect = kfs_norm(&x, &z).unwrap().value.max(kfs_norm(&x.transpose(), &z).unwrap().value);
        prop_assert_eq!(kfs_norm(&cap, &z).unwrap().value, expect);
    }

    #[test]
    fn hilbert_schmidt_khintchine_identity(n in 1usize..7, d in 1usize..4, s in any::<u64>()) {
        let t = random::tuple::<f64, _>(n, d, &mut seed::rng(s));
        let r = rademacher_second_moment(&spec("lp:2"), &t, RademacherMode::Exact, 0).unwrap();
        let direct: f64 = t.items().iter().map(|x| x.norm_squared()).sum();
        prop_assert!(rel(r.value * r.value, direct) < 1e-10);
    }

    #[test]
    fn characterization_monotone_in_moduli(n in 1usize..4, s in any::<u64>()) {
        let phi = matrix(n, n, s);
        let mut rng = seed::rng(s ^ 3);
        let bigger = phi.map(|z| z * (1.0 + rng.gen::<f64>()));
        for e in ["lp:2", "lp:4", "lp:inf"] {
            let a = to_l2_char_norm(&phi, &spec(e), &Default::default()).unwrap().value;
            let b = to_l2_char_norm(&bigger, &spec(e), &Default::default()).unwrap().value;
            prop_assert!(a <= b * (1.0 + 1e-6) + 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn exponent_text_round_trip(num in 1i64..40, den in 1i64..12) {
        let e = Exponent::Finite(num_rational::Ratio::new(num.max(den), den));
        let back: Exponent = e.to_string().parse().unwrap();
        prop_assert_eq!(back, e);
        prop_assert_eq!(e.conjugate().conjugate(), e);
    }
}

#[test]
fn spec_text_round_trip() {
    for s in GAUGES.iter().copied().chain(["prod(lp:4,lp:4)", "dual(conc(lp:inf,2))"]) {
        let g = spec(s);
        assert_eq!(spec(&g.to_string()), g);
    }
    for s in ["mixed(lp:2,inf)", "sum(mixed(lp:2,inf),t(mixed(lp:2,inf)))", "cap(l2grid,lpgrid:3)"] {
        let k: SpaceSpec = s.parse().unwrap();
        assert_eq!(k.to_string().parse::<SpaceSpec>().unwrap(), k);
    }
}
