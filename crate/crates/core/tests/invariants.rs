use geogt::action::{self, GroupAction, Word};
use geogt::chevalley;
use geogt::coarse::{self, DeltaMode};
use geogt::horoball;
use geogt::numring::{self, QuadOrder};
use geogt::rootsys;
use geogt::HalfInt;
use num_bigint::BigInt;
use proptest::prelude::*;

fn brute_delta2(s: &coarse::FiniteGraphSpace) -> i64 {
    let n = s.n();
    let d = |a: usize, b: usize| s.d(a, b) as i64;
    let mut worst = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let sums = [d(x, y) + d(z, w), d(x, z) + d(y, w), d(x, w) + d(y, z)];
                    let mut sorted = sums;
                    sorted.sort();
                    worst = worst.max(sorted[2] - sorted[1]);
                }
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trees_are_zero_hyperbolic(n in 4usize..40, seed in any::<u64>()) {
        let t = coarse::random_tree(n, seed);
        prop_assert_eq!(coarse::four_point_delta(&t, DeltaMode::Exact).unwrap().delta4, HalfInt::ZERO);
    }

    #[test]
    fn exact_delta_matches_brute_force(w in 2usize..5, h in 2usize..5, extra in 0usize..4) {
        let s = if extra == 0 { coarse::grid_graph(w, h) } else { coarse::cycle_graph(w * h + extra) };
        let r = coarse::four_point_delta(&s, DeltaMode::Exact).unwrap();
        prop_assert_eq!(r.delta4.doubled(), brute_delta2(&s));
    }

    #[test]
    fn sampled_delta_never_exceeds_exact(n in 5usize..12, seed in any::<u64>()) {
        let s = coarse::grid_graph(n, 3);
        let exact = coarse::four_point_delta(&s, DeltaMode::Exact).unwrap().delta4;
        let sampled = coarse::four_point_delta(&s, DeltaMode::Sampled { samples: 500, seed }).unwrap().delta4;
        prop_assert!(sampled <= exact);
    }

    #[test]
    fn norm_is_multiplicative(d in prop::sample::select(vec![2i64, 3, 5, 6, 7, 13]),
                              a in -20i64..20, b in -20i64..20, c in -20i64..20, e in -20i64..20) {
        let o = QuadOrder::new(d).unwrap();
        let x = o.elem(a, b);
        let y = o.elem(c, e);
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn principal_ideal_index_is_abs_norm(d in prop::sample::select(vec![2i64, 3, 5, 13]),
                                         a in -30i64..30, b in -30i64..30) {
        prop_assume!(a != 0 || b != 0);
        let o = QuadOrder::new(d).unwrap();
        let x = o.elem(a, b);
        let idx = numring::ideal_norm(o, &[x.clone()]).unwrap();
        prop_assert_eq!(idx, BigInt::from(x.norm().magnitude().clone()));
    }

    #[test]
    fn logwords_evaluate(n in 1u64..2_000_000) {
        let sys = rootsys::build_root_system(rootsys::Family::A, 2).unwrap();
        let l = chevalley::chevalley_basis(&sys).unwrap();
        let n = BigInt::from(n);
        let r = l.logword(0, &n).unwrap();
        prop_assert_eq!(l.evaluate(&r.word), l.exp_root(0, &n));
        let k = chevalley::ceil_log2(&n);
        prop_assert!(r.length as u64 <= r.c * k + r.c_prime);
    }

    #[test]
    fn shift_words_cancel(x in 10u32..30, k in 1u32..5) {
        let len = 40usize;
        let shift = (0..len as u32).map(|v| (v + 1 < len as u32).then_some(v + 1)).collect();
        let a = GroupAction::new(coarse::path_graph(len), vec![shift], None).unwrap();
        let g = Word::generator(0).pow(k);
        prop_assert_eq!(a.apply(&g.mul(&g.inverse()), x), Some(x));
        prop_assert_eq!(a.apply(&g, x), Some(x + k));
    }
}

#[test]
fn reflections_preserve_root_systems() {
    for name in ["A4", "B3", "C4", "D5", "G2"] {
        let (f, r) = rootsys::parse_system_name(name).unwrap();
        let sys = rootsys::build_root_system(f, r).unwrap();
        for a in 0..sys.len() {
            for b in 0..sys.len() {
                let img = sys.reflect(sys.root(a), sys.root(b)).unwrap();
                assert!(sys.contains(&img), "{name}");
            }
        }
    }
}

#[test]
fn exponential_family_is_admissible_on_small_bases() {
    for x in [coarse::path_graph(30), coarse::grid_graph(5, 5), coarse::random_tree(30, 4)] {
        let fam = horoball::exponential_family(&x, 6);
        assert!(horoball::admissible_check(&x, &fam, &[]).unwrap().admissible());
    }
}

#[test]
fn corpus_reports_are_consistent() {
    for inst in action::pseudochar_corpus().unwrap() {
        let r = inst.report().unwrap();
        assert!(r.p.values().all(|p| p.consistent), "{}", inst.name);
        assert!(r.defect_observed <= r.defect_bound, "{}", inst.name);
    }
}
