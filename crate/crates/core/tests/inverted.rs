use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use walklab::action::*;
use walklab::inverted::*;
use walklab::mc::McPlan;
use walklab::measure::*;
use walklab::weight::{int, ratio, Rational};
use walklab::Error;

const BUDGET: u128 = DEFAULT_EXACT_BUDGET;

fn z() -> Lattice {
    Lattice::new(1).unwrap()
}

fn pt(v: i64) -> Coords {
    Coords::from_slice(&[v])
}

/// Quadratic recomputation straight from the definition.
fn naive_orbit<A: ActionOracle>(a: &A, h: &[A::Elem], x: &A::Point) -> FxHashSet<A::Point> {
    let n = h.len();
    let mut out = FxHashSet::default();
    out.insert(x.clone());
    for k in 1..=n {
        // h_n h_{n-1} ⋯ h_{n-k+1} x: apply h_{n-k+1} first.
        let mut p = x.clone();
        for hi in &h[n - k..] {
            p = a.act(hi, &p);
        }
        out.insert(p);
    }
    out
}

/// Brute-force law of `|O|` over every sequence, with rational weights multiplied directly.
fn brute_law<E: Key>(nu: &Measure<E, Rational>, n: usize, orbit: impl Fn(&[E]) -> usize) -> Vec<Rational> {
    let atoms: Vec<(E, Rational)> = nu.iter().map(|(g, w)| (g.clone(), w.clone())).collect();
    let mut law = vec![Rational::zero(); n + 2];
    let mut idx = vec![0usize; n];
    loop {
        let seq: Vec<E> = idx.iter().map(|&i| atoms[i].0.clone()).collect();
        let w: Rational = idx.iter().fold(Rational::one(), |acc, &i| acc * &atoms[i].1);
        law[orbit(&seq)] += w;
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < atoms.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    law
}

fn law_vec(l: &SizeLaw) -> Vec<Rational> {
    (0..l.counts.len()).map(|k| l.prob(k)).collect()
}

#[test]
fn orbit_examples() {
    let a = z();
    assert_eq!(inverted_orbit(&a, &[], &pt(0)).len(), 1);
    let o = inverted_orbit(&a, &[pt(1), pt(1)], &pt(0));
    assert_eq!(o.points, [pt(0), pt(1), pt(2)].into_iter().collect());
    assert_eq!(inverted_orbit(&a, &[pt(-1), pt(1)], &pt(0)).len(), 2);
}

#[test]
fn naive_oracle_agrees_on_order() {
    // h = (h1, h2) = (+1, +3): O = {0, h2·0, h2h1·0} = {0, 3, 4}.
    let a = z();
    let h = [pt(1), pt(3)];
    let o = inverted_orbit(&a, &h, &pt(0));
    assert_eq!(o.points, [pt(0), pt(3), pt(4)].into_iter().collect());
    assert_eq!(naive_orbit(&a, &h, &pt(0)), o.points);
}

#[test]
fn z_srw_two_steps() {
    let a = z();
    let nu = srw(&a).unwrap();
    let law = size_law(&a, &nu, &pt(0), 2, BUDGET, Convention::Inverted).unwrap();
    assert_eq!(law.mean_size().unwrap(), ratio(5, 2));
    assert_eq!(law.two_pow().unwrap(), ratio(3, 16));
    let st = orbit_statistics(&a, &nu, &pt(0), 2, &default_eps_grid(), Mode::Exact, &McPlan::new(0, 0), BUDGET).unwrap();
    assert_eq!(st.two_pow.exact.as_deref(), Some("3/16"));
    assert_eq!(st.two_pow.stderr, 0.0);
}

#[test]
fn dirac_identity_walk() {
    let a = FreeGroup::new(2).unwrap();
    let nu = Measure::dirac(a.identity());
    for n in [0, 1, 5] {
        let law = size_law(&a, &nu, &a.base_point(), n, BUDGET, Convention::Inverted).unwrap();
        assert_eq!(law.prob(1), int(1));
        assert_eq!(law.two_pow().unwrap(), ratio(1, 2));
    }
}

#[test]
fn cardinality_bound_is_certain() {
    let a = FreeGroup::new(2).unwrap();
    let nu = lazy_srw(&a).unwrap();
    for n in 0..5 {
        let law = size_law(&a, &nu, &a.base_point(), n, BUDGET, Convention::Inverted).unwrap();
        assert_eq!(law.prob_at_most(n as u64 + 2).unwrap(), int(1));
        assert_eq!(law.total(), int(1));
    }
}

#[test]
fn exact_budget_is_enforced() {
    let a = FreeGroup::new(2).unwrap();
    let nu = srw(&a).unwrap();
    let err = size_law(&a, &nu, &a.base_point(), 20, BUDGET, Convention::Inverted).unwrap_err();
    match err {
        Error::ResourceLimit { required, .. } => assert_eq!(required, (1u128 << 40).to_string()),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn statistics_need_symmetry() {
    let a = z();
    let nu = Measure::new([(pt(1), ratio(1, 2)), (pt(0), ratio(1, 2))]).unwrap();
    let r = orbit_statistics(&a, &nu, &pt(0), 3, &default_eps_grid(), Mode::Exact, &McPlan::new(0, 0), BUDGET);
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn fekete_examples() {
    let a = z();
    let nu = srw(&a).unwrap();
    let plan = McPlan::new(0, 0);
    let r = fekete_check(&a, &nu, &pt(0), &int(2), &[(1, 1)], Mode::Exact, &plan, BUDGET).unwrap();
    assert_eq!(r[0].joint.exact.as_deref(), Some("1"));
    assert_eq!(r[0].product.exact.as_deref(), Some("1"));
    let r = fekete_check(&a, &nu, &pt(0), &ratio(9, 10), &[(2, 2)], Mode::Exact, &plan, BUDGET).unwrap();
    assert!(r[0].holds);
    let id = Measure::dirac(a.identity());
    let r = fekete_check(&a, &id, &pt(0), &int(1), &[(1, 2), (3, 3)], Mode::Exact, &plan, BUDGET).unwrap();
    assert!(r.iter().all(|row| row.joint.exact.as_deref() == Some("1") && row.product.exact.as_deref() == Some("1")));
}

#[test]
fn subadditivity_examples() {
    let a = z();
    let r = subadditivity_check(&a, &[pt(1)], &[pt(1)], &pt(0)).unwrap();
    assert_eq!((r.size_concat, r.size_h, r.size_t), (3, 2, 2));
    let r = subadditivity_check(&a, &[pt(1), pt(-1)], &[], &pt(0)).unwrap();
    assert_eq!(r.size_concat, r.size_h);

    let f = FreeGroup::new(2).unwrap();
    let gens: Vec<FreeWord> = f.symmetric_generators().into_iter().map(|g| f.generator(g).unwrap()).collect();
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || (0..5).map(|_| gens[rng.random_range(0..4)].clone()).collect::<Vec<_>>();
        let (h, t) = (draw(), draw());
        subadditivity_check(&f, &h, &t, &f.base_point()).unwrap();
    }
}

#[test]
fn exact_law_matches_brute_force() {
    let a = Lattice::new(2).unwrap();
    let nu = lazy_srw(&a).unwrap();
    let x = a.base_point();
    let law = size_law(&a, &nu, &x, 5, BUDGET, Convention::Inverted).unwrap();
    let brute = brute_law(&nu, 5, |h| naive_orbit(&a, h, &x).len());
    assert_eq!(law_vec(&law), brute);

    let s = FullGroupAction::new(Arc::new(FiniteRelationSpace::uniform_cycle(8, true).unwrap()));
    let nu = lazify(&s, &srw(&s).unwrap()).unwrap();
    let law = size_law(&s, &nu, &3, 4, BUDGET, Convention::Inverted).unwrap();
    let brute = brute_law(&nu, 4, |h| naive_orbit(&s, h, &3).len());
    assert_eq!(law_vec(&law), brute);
}

fn conventions_agree<A: ActionOracle>(a: &A, nu: &Measure<A::Elem, Rational>, x: &A::Point, n: usize) -> bool {
    let brute = brute_law(nu, n, |h| walk_inverse_orbit(a, h, x).len());
    let lw = size_law(a, nu, x, n, BUDGET, Convention::WalkInverse).unwrap();
    assert_eq!(law_vec(&lw), brute);
    let li = size_law(a, nu, x, n, BUDGET, Convention::Inverted).unwrap();
    li == lw
}

#[test]
fn conventions_coincide_for_symmetric_measures() {
    let l = Lamplighter::new();
    assert!(conventions_agree(&l, &lazy_srw(&l).unwrap(), &l.base_point(), 5));
    let f = FreeGroup::new(2).unwrap();
    assert!(conventions_agree(&f, &srw(&f).unwrap(), &f.base_point(), 5));
    let s = FullGroupAction::new(Arc::new(FiniteRelationSpace::uniform_cycle(6, true).unwrap()));
    let nu = symmetrize(&s, &Measure::new([(s.base_generator(0), ratio(2, 3)), (s.base_generator(1), ratio(1, 3))]).unwrap()).unwrap();
    assert!(conventions_agree(&s, &nu, &2, 5));
}

#[test]
fn conventions_coincide_without_symmetry() {
    // Reversing an i.i.d. sequence maps one orbit onto a translate of the other, so the size laws
    // agree for every measure; symmetry is not needed.
    let s = FullGroupAction::new(Arc::new(FiniteRelationSpace::uniform_cycle(8, true).unwrap()));
    let t = s.base_generator(0);
    let tau = s.base_generator(1);
    let nu = Measure::new([(s.mul(&tau, &t), ratio(2, 3)), (t, ratio(1, 3))]).unwrap();
    assert!(!is_symmetric(&s, &nu));
    assert!(conventions_agree(&s, &nu, &0, 4));
}

#[test]
fn small_orbit_dp_matches_full_law() {
    let f = FreeGroup::new(2).unwrap();
    let nu = srw(&f).unwrap();
    for n in [6, 9] {
        let full = size_law(&f, &nu, &f.base_point(), n, BUDGET, Convention::Inverted).unwrap();
        let small = small_orbit_law(&f, &nu, &f.base_point(), n, 4, 1_000_000).unwrap();
        for k in 0..=4 {
            assert_eq!(small.prob(k), full.prob(k));
        }
        assert!(small.prob_at_most(5).is_err());
        assert_eq!(small.prob_at_most(4).unwrap(), full.prob_at_most(4).unwrap());
    }
    let a = Lattice::new(2).unwrap();
    let nu = lazy_srw(&a).unwrap();
    let full = size_law(&a, &nu, &a.base_point(), 6, BUDGET, Convention::Inverted).unwrap();
    let small = small_orbit_law(&a, &nu, &a.base_point(), 6, 7, 1_000_000).unwrap();
    assert!(small.complete);
    assert_eq!(law_vec(&small)[..8], law_vec(&full)[..8]);
}

#[test]
fn exact_mode_is_reproducible() {
    let f = FreeGroup::new(2).unwrap();
    let nu = srw(&f).unwrap();
    let run = || {
        let s = orbit_statistics(&f, &nu, &f.base_point(), 8, &default_eps_grid(), Mode::Exact, &McPlan::new(0, 0), BUDGET).unwrap();
        serde_json::to_string(&s).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let grid = default_eps_grid();
    let plan = McPlan::new(40_000, 7);
    let check = |exact: &OrbitStatistics, mc: &OrbitStatistics| {
        let close = |e: &walklab::stats::Estimate, m: &walklab::stats::Estimate| {
            (e.value - m.value).abs() <= 3.0 * m.stderr + 1e-12
        };
        assert!(close(&exact.mean_size, &mc.mean_size), "{exact:?} {mc:?}");
        assert!(close(&exact.two_pow, &mc.two_pow), "{exact:?} {mc:?}");
        for (e, m) in exact.tail.iter().zip(&mc.tail) {
            // Binomial σ from the exact probability; a rare event may have no hits at all.
            let p = e.estimate.value;
            let sigma = (p * (1.0 - p) / mc.samples as f64).sqrt();
            assert!((p - m.estimate.value).abs() <= 3.0 * sigma + 1e-12, "{e:?} {m:?}");
        }
    };
    let a = Lattice::new(2).unwrap();
    let nu = srw(&a).unwrap();
    let ns = [4, 7, 10];
    let ex = orbit_statistics_series(&a, &nu, &a.base_point(), &ns, &grid, Mode::Exact, &plan, BUDGET).unwrap();
    let mc = orbit_statistics_series(&a, &nu, &a.base_point(), &ns, &grid, Mode::MonteCarlo, &plan, BUDGET).unwrap();
    for (e, m) in ex.iter().zip(&mc) {
        check(e, m);
    }
    let f = FreeGroup::new(2).unwrap();
    let nu = srw(&f).unwrap();
    let ex = orbit_statistics_series(&f, &nu, &f.base_point(), &ns, &grid, Mode::Exact, &plan, BUDGET).unwrap();
    let mc = orbit_statistics_series(&f, &nu, &f.base_point(), &ns, &grid, Mode::MonteCarlo, &plan, BUDGET).unwrap();
    for (e, m) in ex.iter().zip(&mc) {
        check(e, m);
    }
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let f = FreeGroup::new(2).unwrap();
    let nu = srw(&f).unwrap();
    let plan = McPlan::new(5_000, 99);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| mc_size_histograms(&f, &nu, &f.base_point(), &[3, 9], &plan).unwrap())
    };
    assert_eq!(run(1), run(3));
}

proptest! {
    #[test]
    fn orbit_size_bounds(h in prop::collection::vec(-3i64..=3, 0..25), x in -5i64..5) {
        let a = z();
        let h: Vec<Coords> = h.into_iter().map(pt).collect();
        let o = inverted_orbit(&a, &h, &pt(x));
        prop_assert!(o.points.contains(&pt(x)));
        prop_assert!(o.len() >= 1 && o.len() <= h.len() + 1);
        prop_assert_eq!(&o.points, &naive_orbit(&a, &h, &pt(x)));
    }

    #[test]
    fn free_orbit_matches_naive(h in prop::collection::vec(0usize..4, 0..15)) {
        let f = FreeGroup::new(2).unwrap();
        let gens: Vec<FreeWord> = f.symmetric_generators().into_iter().map(|g| f.generator(g).unwrap()).collect();
        let h: Vec<FreeWord> = h.into_iter().map(|i| gens[i].clone()).collect();
        let o = inverted_orbit(&f, &h, &f.base_point());
        prop_assert_eq!(o.points, naive_orbit(&f, &h, &f.base_point()));
    }

    #[test]
    fn tail_is_monotone_in_eps(n in 1usize..7, e1 in 0i64..16, e2 in 0i64..16) {
        let f = FreeGroup::new(2).unwrap();
        let law = size_law(&f, &srw(&f).unwrap(), &f.base_point(), n, BUDGET, Convention::Inverted).unwrap();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        prop_assert!(law.prob_within(&ratio(lo, 8)).unwrap() <= law.prob_within(&ratio(hi, 8)).unwrap());
    }

    #[test]
    fn subadditivity_on_thompson(h in prop::collection::vec(0usize..4, 0..6), t in prop::collection::vec(0usize..4, 0..6), p in 1i64..16) {
        let a = ThompsonF::new();
        let gens: Vec<PlMap> = a.symmetric_generators().into_iter().map(|g| a.generator(g).unwrap()).collect();
        let h: Vec<PlMap> = h.into_iter().map(|i| gens[i].clone()).collect();
        let t: Vec<PlMap> = t.into_iter().map(|i| gens[i].clone()).collect();
        subadditivity_check(&a, &h, &t, &Dyadic(ratio(p, 16))).unwrap();
    }
}
