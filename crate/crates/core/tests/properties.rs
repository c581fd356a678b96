use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qshadow_core::invariants::{diagonal_growth_series, diagonal_statesum, n_r, tv, tv_serial};
use qshadow_core::oracle::{state_sum_naive, tv_naive};
use qshadow_core::shadow::{all_ports, build_shadow, state_sum, state_sum_report, GluingSpec, Port, PieceKind};
use qshadow_core::sixj::{self, symmetry_group, tuple_admissible, Tuple6, SYMMETRIES};
use qshadow_core::{QValue, RootContext, SixjEvaluator};

/// Random admissible tuple by building faces one at a time.
fn random_admissible(rng: &mut StdRng, r: u32) -> Tuple6 {
    let max = r - 2;
    let third = |rng: &mut StdRng, a: u32, b: u32| -> Option<u32> {
        let lo = a.abs_diff(b);
        let hi = (a + b).min(2 * max - a - b);
        if lo > hi {
            return None;
        }
        Some(lo + 2 * rng.gen_range(0..=(hi - lo) / 2))
    };
    loop {
        let a1 = rng.gen_range(0..=max);
        let a2 = rng.gen_range(0..=max);
        let Some(a3) = third(rng, a1, a2) else { continue };
        let a4 = rng.gen_range(0..=max);
        let Some(a5) = third(rng, a3, a4) else { continue };
        let Some(a6) = third(rng, a1, a5) else { continue };
        let t = Tuple6([a1, a2, a3, a4, a5, a6]);
        if tuple_admissible(r, &t).unwrap() {
            return t;
        }
    }
}

fn odd_r(lo: u32, hi: u32) -> impl Strategy<Value = u32> {
    (lo / 2..=hi / 2).prop_map(|h| 2 * h + 1).prop_filter("r >= lo", move |&r| r >= lo)
}

fn rel_close(a: &QValue, b: num_complex::Complex64, scale: f64, tol: f64) -> bool {
    let z = a.to_complex().unwrap();
    (z - b).norm() <= tol * scale.max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn listed_symmetries_preserve_value(r in odd_r(5, 101), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_admissible(&mut rng, r);
        let ctx = RootContext::new(r).unwrap();
        let base = sixj::sixj(&ctx, &t).unwrap();
        for map in &SYMMETRIES {
            let u = t.permuted(map);
            prop_assert!(tuple_admissible(r, &u).unwrap());
            let v = sixj::sixj(&ctx, &u).unwrap();
            prop_assert_eq!(v.phase_quarter(), base.phase_quarter());
            prop_assert_eq!(v.sign(), base.sign());
            prop_assert!(v.is_zero() || (v.log_mag() - base.log_mag()).abs() <= 1e-12 * base.log_mag().abs().max(1.0));
        }
    }

    #[test]
    fn canonical_key_is_orbit_invariant(r in odd_r(5, 61), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_admissible(&mut rng, r);
        for map in symmetry_group() {
            prop_assert_eq!(t.permuted(map).canonical_key(), t.canonical_key());
        }
    }

    #[test]
    fn memoization_is_transparent(r in odd_r(5, 101), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let ev = SixjEvaluator::for_r(r).unwrap();
        let tuples: Vec<Tuple6> = (0..8).map(|_| random_admissible(&mut rng, r)).collect();
        let first: Vec<QValue> = tuples.iter().map(|t| ev.sixj(t).unwrap()).collect();
        let cached: Vec<QValue> = tuples.iter().map(|t| ev.sixj(t).unwrap()).collect();
        ev.clear_cache();
        prop_assert_eq!(ev.cache_len(), 0);
        let fresh: Vec<QValue> = tuples.iter().map(|t| ev.sixj(t).unwrap()).collect();
        prop_assert_eq!(&first, &cached);
        prop_assert_eq!(&first, &fresh);
    }

    #[test]
    fn state_sum_matches_oracle_k2_l1_r7(seed in any::<u64>()) {
        let g = build_shadow(&GluingSpec::auto(2, 1).unwrap()).unwrap();
        let ev = SixjEvaluator::for_r(7).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let gamma: Vec<u32> = (0..g.loop_count()).map(|_| rng.gen_range(0..=5)).collect();
        let rep = state_sum_report(&ev, &g, &gamma).unwrap();
        let want = state_sum_naive(&g, 7, &gamma).unwrap();
        let scale = rep.abs_sum.to_f64().unwrap_or(0.0);
        prop_assert!(rel_close(&rep.value, want, scale, 1e-10), "{:?}: {} vs {}", gamma, rep.value, want);
    }

    #[test]
    fn relabeling_pieces_permutes_gamma(seed in any::<u64>(), r in prop::sample::select(vec![5u32, 7])) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (k, l) = (2usize, 1usize);
        let spec = random_spec(&mut rng, k, l);
        let perm_s: Vec<usize> = shuffled(&mut rng, k);
        let perm_a: Vec<usize> = shuffled(&mut rng, l);
        let relabel = |p: &Port| match p.kind {
            PieceKind::S => Port::s(perm_s[p.piece]),
            PieceKind::A => Port::a(perm_a[p.piece], p.index),
        };
        let moved = GluingSpec::new(k, l, spec.matching().iter().map(|(a, b)| (relabel(a), relabel(b))).collect()).unwrap();
        let g = build_shadow(&spec).unwrap();
        let h = build_shadow(&moved).unwrap();
        let ev = SixjEvaluator::for_r(r).unwrap();
        let gamma: Vec<u32> = (0..g.loop_count()).map(|_| rng.gen_range(0..=r - 2)).collect();
        // loop 2i + s of piece i moves to loop 2 perm(i) + s
        let mut moved_gamma = vec![0u32; gamma.len()];
        for i in 0..k {
            for s in 0..2 {
                moved_gamma[2 * perm_s[i] + s] = gamma[2 * i + s];
            }
        }
        for j in 0..l {
            for s in 0..2 {
                moved_gamma[2 * k + 2 * perm_a[j] + s] = gamma[2 * k + 2 * j + s];
            }
        }
        let a = state_sum(&ev, &g, &gamma).unwrap();
        let b = state_sum(&ev, &h, &moved_gamma).unwrap();
        prop_assert!(a.approx_eq(&b, 1e-12) || (a.is_zero() && b.is_zero()), "{} vs {}", a, b);
    }
}

fn shuffled(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    v
}

fn random_spec(rng: &mut StdRng, k: usize, l: usize) -> GluingSpec {
    let ports = all_ports(k, l);
    let order = shuffled(rng, ports.len());
    let m = order.chunks(2).map(|c| (ports[c[0]], ports[c[1]])).collect();
    GluingSpec::new(k, l, m).unwrap()
}

/// All perfect matchings of `0..n`.
fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for i in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[i]).collect();
        for mut m in matchings(&rest) {
            m.insert(0, (first, items[i]));
            out.push(m);
        }
    }
    out
}

#[test]
fn total_gleam_audit_over_all_small_matchings() {
    let mut built = 0;
    for (k, l) in [(2, 0), (4, 0), (6, 0), (8, 0), (0, 1), (0, 2), (2, 1), (4, 1)] {
        let ports = all_ports(k, l);
        let idx: Vec<usize> = (0..ports.len()).collect();
        for m in matchings(&idx) {
            let spec = GluingSpec::new(k, l, m.iter().map(|&(a, b)| (ports[a], ports[b])).collect()).unwrap();
            let g = build_shadow(&spec).unwrap();
            assert_eq!(g.total_gleam2(), 0);
            assert_eq!(g.regions().len(), (k + 4 * l) / 2);
            assert!(g.regions().iter().all(|x| x.euler == 0 && x.modified_gleam2() == 0));
            built += 1;
        }
    }
    // 1 + 3 + 15 + 105 + 3 + 105 + 15 + 105 (k + 4l ports)
    assert_eq!(built, 1 + 3 + 15 + 105 + 3 + 105 + 15 + 105);
}

#[test]
fn state_sum_matches_oracle_for_every_gamma() {
    for (k, l, rs) in [(2, 0, &[5u32, 7][..]), (0, 1, &[5, 7]), (2, 1, &[5])] {
        let g = build_shadow(&GluingSpec::auto(k, l).unwrap()).unwrap();
        for &r in rs {
            let ev = SixjEvaluator::for_r(r).unwrap();
            let n = (r - 1).pow(g.loop_count() as u32);
            for idx in 0..n {
                let gamma = qshadow_core::invariants::gamma_at(&g, r, idx as u64);
                let rep = state_sum_report(&ev, &g, &gamma).unwrap();
                let want = state_sum_naive(&g, r, &gamma).unwrap();
                let scale = rep.abs_sum.to_f64().unwrap_or(0.0);
                assert!(rel_close(&rep.value, want, scale, 1e-10), "({k},{l}) r={r} {gamma:?}");
            }
        }
    }
}

#[test]
fn parallel_and_serial_agree() {
    for (k, l) in [(2, 0), (0, 1)] {
        let g = build_shadow(&GluingSpec::auto(k, l).unwrap()).unwrap();
        for r in [5u32, 9, 13] {
            let ev = SixjEvaluator::for_r(r).unwrap();
            let serial = tv_serial(&ev, &g).unwrap();
            for threads in [1, 3, 4] {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let fresh = SixjEvaluator::for_r(r).unwrap();
                let par = pool.install(|| tv(&fresh, &g).unwrap());
                assert_eq!(par, serial, "({k},{l}) r={r} threads={threads}");
                let d1 = pool.install(|| diagonal_statesum(&fresh, &g).unwrap());
                let d0 = qshadow_core::invariants::diagonal_statesum_serial(&ev, &g).unwrap();
                assert_eq!(d1.value, d0.value);
            }
        }
    }
}

#[test]
fn tv_dominates_diagonal_square_and_matches_oracle() {
    let g = build_shadow(&GluingSpec::auto(2, 0).unwrap()).unwrap();
    for r in (5..=15u32).step_by(2) {
        let ev = SixjEvaluator::for_r(r).unwrap();
        let t = tv(&ev, &g).unwrap();
        let d = diagonal_statesum(&ev, &g).unwrap().value;
        assert!(t.sign() > 0);
        assert!(t.log_mag() >= 2.0 * d.log_mag());
        if r <= 7 {
            let want = tv_naive(&g, r).unwrap();
            assert!((t.to_f64().unwrap() - want).abs() <= 1e-10 * want);
        }
    }
}

#[test]
fn diagonal_states_share_one_sign_up_to_201() {
    for (k, l) in [(2, 0), (0, 1)] {
        let g = build_shadow(&GluingSpec::auto(k, l).unwrap()).unwrap();
        for r in (5..=201u32).step_by(2) {
            let ev = SixjEvaluator::for_r(r).unwrap();
            let rep = diagonal_statesum(&ev, &g).unwrap();
            assert!(rep.uniform_sign && rep.no_cancellation(1e-10), "({k},{l}) r={r}");
            assert!(rep.value.is_real() && rep.value.sign() > 0, "({k},{l}) r={r}");
        }
    }
}

#[test]
fn diagonal_error_shrinks_every_hundred() {
    let rs: Vec<u32> = (101..=2001).step_by(100).collect();
    let s = diagonal_growth_series(&GluingSpec::auto(2, 0).unwrap(), &rs).unwrap();
    assert!(s.zeros.is_empty());
    assert!(s.error_nonincreasing(&rs));
}

#[test]
fn diagonal_color_is_even_and_centered() {
    for r in (5..=2001u32).step_by(2) {
        let n = n_r(r).unwrap();
        assert_eq!(n % 2, 0);
        assert!(2 * n + 1 == r || 2 * n + 3 == r);
    }
}
