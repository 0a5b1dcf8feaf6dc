use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walklab::action::*;
use walklab::inverted::{size_law, Convention, Mode, DEFAULT_EXACT_BUDGET};
use walklab::lamplighter::*;
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

fn cfg(v: &[i64]) -> LampConfig<Coords> {
    LampConfig::from_iter(v.iter().map(|&x| pt(x)))
}

fn uniform8() -> Arc<FiniteRelationSpace> {
    Arc::new(FiniteRelationSpace::uniform_cycle(8, true).unwrap())
}

fn dyadic8() -> Arc<FiniteRelationSpace> {
    let mut w: Vec<Rational> = (0..7).map(|k| ratio(1, 1 << (k + 1))).collect();
    w.push(ratio(1, 128));
    Arc::new(FiniteRelationSpace::cycle(w, true).unwrap())
}

/// Lazy version of the uniform measure on `{T, T⁻¹, τ}`.
fn lazy_shift_tau(space: &Arc<FiniteRelationSpace>) -> Measure<Perm, Rational> {
    let a = FullGroupAction::new(space.clone());
    lazify(&a, &srw(&a).unwrap()).unwrap()
}

#[test]
fn affine_action_examples() {
    let a = z();
    let g = PointLamps(&a);
    let f = cfg(&[3, 5]);
    assert_eq!(affine_act(&g, &state_identity(&g), &f), f);
    let s = LampState { lamps: cfg(&[0]), elem: a.identity() };
    assert!(affine_act(&g, &s, &cfg(&[0])).is_empty());
    let s = LampState { lamps: cfg(&[0]), elem: pt(1) };
    assert_eq!(affine_act(&g, &s, &cfg(&[0])), cfg(&[0, 1]));
}

#[test]
fn sws_examples() {
    let a = z();
    let g = PointLamps(&a);
    let id: Measure<Coords, Rational> = Measure::dirac(a.identity());
    let hat = sws_measure(&g, &id, &cfg(&[4])).unwrap();
    assert_eq!(hat.len(), 2);
    assert_eq!(hat.mass_where(|s| s.lamps.is_empty()), ratio(1, 2));
    assert_eq!(hat.mass_where(|s| s.lamps == cfg(&[4])), ratio(1, 2));
    let nu: Measure<Coords, Rational> = srw(&a).unwrap();
    let plain = sws_measure(&g, &nu, &LampConfig::empty()).unwrap();
    assert_eq!(plain.len(), 2);
    assert!(plain.iter().all(|(s, w)| s.lamps.is_empty() && *w == ratio(1, 2)));
    let hat = sws_measure(&g, &nu, &cfg(&[0])).unwrap();
    assert_eq!(hat.total_mass(), int(1));
    // Every lamp part is one of ∅, S, gS, S Δ gS.
    for (s, _) in hat.iter() {
        let moved = cfg(&[0]).translate(&g, &s.elem);
        let allowed = [LampConfig::empty(), cfg(&[0]), moved.clone(), cfg(&[0]).sym_diff(&moved)];
        assert!(allowed.contains(&s.lamps));
    }
}

#[test]
fn lamp_walk_examples() {
    let a = z();
    let g = PointLamps(&a);
    let nu: Measure<Coords, Rational> = srw(&a).unwrap();
    let hat = sws_measure(&g, &nu, &cfg(&[0])).unwrap();
    assert_eq!(lamp_walk_exact(&g, &hat, 0, BUDGET).unwrap(), Measure::dirac(state_identity(&g)));
    let law = lamp_walk_exact(&g, &hat, 4, BUDGET).unwrap();
    assert_eq!(law.total_mass(), int(1));
    let id: Measure<Coords, Rational> = Measure::dirac(a.identity());
    let hat_id = sws_measure(&g, &id, &cfg(&[0])).unwrap();
    let one = lamp_walk_exact(&g, &hat_id, 1, BUDGET).unwrap();
    assert_eq!(one.mass_where(|s| s.lamps.is_empty()), ratio(1, 2));
    assert_eq!(one.mass_where(|s| s.lamps == cfg(&[0])), ratio(1, 2));
    assert!(matches!(lamp_walk_exact(&g, &hat, 30, BUDGET), Err(Error::ResourceLimit { .. })));
}

/// Independent left-walk oracle: lamp part `Δ_k (g_n ⋯ g_{k+1})(s2_k Δ g_k s1_k)` on integer sets.
fn brute_empty_prob(nu: &[(i64, Rational)], x: i64, n: usize) -> Rational {
    let choices: Vec<(i64, bool, bool, Rational)> = nu
        .iter()
        .flat_map(|(g, w)| {
            [(false, false), (false, true), (true, false), (true, true)]
                .map(|(a, b)| (*g, a, b, w.clone() / num_bigint::BigInt::from(4)))
        })
        .collect();
    let mut total = Rational::zero();
    let mut idx = vec![0usize; n];
    loop {
        let mut lamps: BTreeSet<i64> = BTreeSet::new();
        let mut w = Rational::one();
        for k in 0..n {
            let (g, s1, s2, ref wk) = choices[idx[k]];
            w *= wk;
            let later: i64 = idx[k + 1..].iter().map(|&i| choices[i].0).sum();
            let mut toggle = |p: i64| {
                if !lamps.remove(&p) {
                    lamps.insert(p);
                }
            };
            if s2 {
                toggle(later + x);
            }
            if s1 {
                toggle(later + g + x);
            }
        }
        if lamps.is_empty() {
            total += w;
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < choices.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    total
}

#[test]
fn identity_examples() {
    let a = z();
    let plan = McPlan::new(0, 0);
    let id: Measure<Coords, Rational> = Measure::dirac(a.identity());
    for n in [1, 3] {
        let r = lamp_orbit_identity_check(&a, &id, &pt(0), n, Mode::Exact, &plan, BUDGET).unwrap();
        assert_eq!(r.lamp_side.exact.as_deref(), Some("1/2"));
    }
    // No switch has fired at n = 0, so no site counts.
    let r = lamp_orbit_identity_check(&a, &id, &pt(0), 0, Mode::Exact, &plan, BUDGET).unwrap();
    assert_eq!(r.orbit_side.exact.as_deref(), Some("1"));
    let nu: Measure<Coords, Rational> = srw(&a).unwrap();
    let r = lamp_orbit_identity_check(&a, &nu, &pt(0), 2, Mode::Exact, &plan, BUDGET).unwrap();
    assert_eq!(r.lamp_side.exact.as_deref(), Some("3/16"));
    assert_eq!(r.orbit_side.exact.as_deref(), Some("3/16"));
    let atoms = [(1, ratio(1, 2)), (-1, ratio(1, 2))];
    for n in 1..=4 {
        let r = lamp_orbit_identity_check(&a, &nu, &pt(0), n, Mode::Exact, &plan, BUDGET).unwrap();
        assert_eq!(r.lamp_side.exact, Some(walklab::weight::format_rational(&brute_empty_prob(&atoms, 0, n))));
    }
    let f = FreeGroup::new(2).unwrap();
    let r = lamp_orbit_identity_check(&f, &srw(&f).unwrap(), &f.base_point(), 4, Mode::Exact, &plan, BUDGET).unwrap();
    assert!(r.holds);
}

#[test]
fn identity_in_monte_carlo_mode() {
    let f = FreeGroup::new(2).unwrap();
    let plan = McPlan::new(20_000, 3);
    let r = lamp_orbit_identity_check(&f, &srw(&f).unwrap(), &f.base_point(), 5, Mode::MonteCarlo, &plan, BUDGET).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn relation_rows_match_point_lamps() {
    let space = uniform8();
    let nu = lazy_shift_tau(&space);
    for (lamp, orbit) in relation_row_identity(&space, &nu, 3, BUDGET).unwrap() {
        assert_eq!(lamp, orbit);
    }
    let space = dyadic8();
    let nu = lazy_shift_tau(&space);
    for (lamp, orbit) in relation_row_identity(&space, &nu, 3, BUDGET).unwrap() {
        assert_eq!(lamp, orbit);
    }
}

#[test]
fn thm1_examples() {
    let space = uniform8();
    let id: Measure<Perm, Rational> = Measure::dirac(Perm::identity(8));
    let r = thm1_inequality(&space, &id, &ratio(1, 4), 3, BUDGET).unwrap();
    assert_eq!(r.rhs.exact.as_deref(), Some("1/2"));
    // c_n ∈ {∅, I}: d_C(I, ∅) = 1, so only the empty configuration counts.
    assert_eq!(r.lhs.exact.as_deref(), Some("3/8"));
    let r = thm1_inequality(&space, &id, &ratio(99, 100), 0, BUDGET).unwrap();
    assert_eq!(r.lhs.exact.as_deref(), Some("1/100"));
    assert_eq!(r.rhs.exact.as_deref(), Some("1"));
    assert!(thm1_inequality(&space, &id, &ratio(1, 4), 0, BUDGET).unwrap().holds);
    let nu = lazy_shift_tau(&space);
    for eps in [ratio(1, 4), ratio(1, 2)] {
        assert!(thm1_inequality(&space, &nu, &eps, 4, BUDGET).unwrap().holds);
    }
    assert!(matches!(thm1_inequality(&space, &nu, &int(1), 2, BUDGET), Err(Error::Domain(_))));
}

#[test]
fn thm2_examples() {
    let space = uniform8();
    let nu = lazy_shift_tau(&space);
    let r = thm2_inequality(&space, &nu, &ratio(1, 4), 0, BUDGET).unwrap();
    // n = 0: ½·P(0 < 0) − 1 = −1.
    assert!(r.lhs.value < -0.99);
    assert!(thm2_inequality(&space, &nu, &ratio(1, 4), 4, BUDGET).unwrap().holds);
    let id: Measure<Perm, Rational> = Measure::dirac(Perm::identity(8));
    for n in 1..4 {
        let r = thm2_inequality(&space, &id, &ratio(1, 2), n, BUDGET).unwrap();
        assert_eq!(r.rhs.exact.as_deref(), Some("1"));
    }
}

#[test]
fn exponential_is_rounded_up() {
    for t in [0.0, 0.5, 1.0, 3.7, 40.0] {
        let up = exp_neg_upper(t);
        assert!(walklab::weight::rational_to_f64(&up) > (-t as f64).exp() || t == 0.0 && up > int(1));
    }
}

#[test]
fn binomial_cdf() {
    assert_eq!(binomial_half_below(4, &int(2)), ratio(5, 16));
    assert_eq!(binomial_half_below(4, &ratio(5, 2)), ratio(11, 16));
    assert_eq!(binomial_half_below(3, &int(0)), int(0));
    assert_eq!(binomial_half_below(3, &int(10)), int(1));
}

#[test]
fn problemma_examples() {
    let mut point = vec![int(0); 9];
    point[8] = int(1);
    let r = problemma_check(8, &int(2), &point).unwrap();
    assert_eq!(r.y_tail.exact.as_deref(), Some("1"));
    assert_eq!(r.x_tail.exact.as_deref(), Some("1"));
    let uniform = vec![ratio(1, 9); 9];
    assert!(problemma_check(8, &ratio(1, 4), &uniform).unwrap().holds);
    for n in 1..=12u64 {
        for eps in [ratio(1, 10), ratio(1, 4)] {
            for k in 0..=n as usize {
                let mut d = vec![int(0); n as usize + 1];
                d[k] = int(1);
                assert!(problemma_check(n, &eps, &d).unwrap().holds);
            }
        }
    }
    assert!(problemma_check(3, &ratio(1, 4), &[ratio(1, 2)]).is_err());
}

#[test]
fn problemma_grid_is_a_set_of_distributions() {
    for n in [1, 5, 12] {
        let g = problemma_grid(n);
        assert_eq!(g.len(), 20);
        for d in g {
            assert_eq!(d.len() as u64, n + 1);
            assert_eq!(d.iter().sum::<Rational>(), int(1));
        }
    }
}

#[test]
fn witness_on_dyadic_cycle() {
    let space = dyadic8();
    for r in [ratio(1, 4), ratio(1, 8)] {
        let w = sin_defect_witness(&space, &r, 100_000).unwrap();
        assert!(w.found && w.separated);
        assert_eq!(w.displacement.as_deref(), Some("2"));
        assert_eq!(w.g.as_deref(), Some("(6 7)"));
        assert_eq!(w.c.len(), 8);
    }
}

#[test]
fn witness_strictness_on_uniform_cycle() {
    let w = sin_defect_witness(&uniform8(), &ratio(1, 4), 100_000).unwrap();
    assert!(!w.found);
    let w = sin_defect_witness(&uniform8(), &ratio(1, 2), 100_000).unwrap();
    assert!(w.found);
    assert_eq!(w.support_mass.as_deref(), Some("1/4"));
    let w = sin_defect_witness(&uniform8(), &int(2), 100_000).unwrap();
    assert!(w.vacuous && !w.found);
}

#[test]
fn witness_with_two_orbits() {
    let t = Perm::from_cycles(6, "(0 1 2)(3 4 5)").unwrap();
    let s = Perm::from_cycles(6, "(0 1)").unwrap();
    let space = Arc::new(FiniteRelationSpace::new(vec![ratio(1, 6); 6], t, vec![("s".into(), s)]).unwrap());
    let w = sin_defect_witness(&space, &ratio(1, 2), 10_000).unwrap();
    assert!(w.found);
    assert_eq!(w.displacement.as_deref(), Some("1"));
    assert!(w.c.iter().all(|&(x, y)| x < 3 && y < 2));
}

#[test]
fn conjugated_ball_is_far_from_identity() {
    // Sampled check of the separation claim: any s with D((s, g), id) < r conjugates to lamps at
    // distance at least 2 − r from ∅.
    let space = dyadic8();
    let r = ratio(1, 8);
    let w = sin_defect_witness(&space, &r, 100_000).unwrap();
    let ground = RelationLamps::new(space.clone());
    let g = Perm::from_cycles(8, w.g.as_deref().unwrap()).unwrap();
    let c = LampConfig::from_iter(w.c.iter().copied());
    let budget = &r - space.uniform_distance(&g, &Perm::identity(8));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tested = 0;
    for _ in 0..5_000 {
        let pairs: Vec<(u32, u32)> = (0..rng.random_range(0..6)).map(|_| (rng.random_range(3..8), rng.random_range(0..8))).collect();
        let s = LampConfig::from_iter(pairs);
        if ground.d_c(&s, &LampConfig::empty()) >= budget {
            continue;
        }
        tested += 1;
        let conj = conjugate_lamps(&ground, &c, &LampState { lamps: s, elem: g.clone() });
        assert!(ground.d_c(&conj, &LampConfig::empty()) >= int(2) - &r);
    }
    assert!(tested > 100);
}

fn relation_state(space: &FiniteRelationSpace, seed: u64) -> RelState {
    let n = space.len() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img: Vec<u32> = (0..n).collect();
    for i in (1..n as usize).rev() {
        img.swap(i, rng.random_range(0..=i));
    }
    let pairs: Vec<(u32, u32)> = (0..rng.random_range(0..10)).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
    LampState { lamps: LampConfig::from_iter(pairs), elem: Perm(img) }
}

proptest! {
    #[test]
    fn lamp_group_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        // A single-orbit space of 6 points: R is all pairs and [R] is all permutations.
        let space = Arc::new(FiniteRelationSpace::uniform_cycle(6, false).unwrap());
        let g = RelationLamps::new(space.clone());
        let (s, t, u) = (relation_state(&space, a), relation_state(&space, b), relation_state(&space, c));
        prop_assert!(g.is_valid(&s.lamps));
        prop_assert_eq!(state_mul(&g, &state_mul(&g, &s, &t), &u), state_mul(&g, &s, &state_mul(&g, &t, &u)));
        prop_assert_eq!(state_mul(&g, &s, &state_inverse(&g, &s)), state_identity(&g));
        prop_assert_eq!(state_mul(&g, &state_inverse(&g, &s), &s), state_identity(&g));
        let lc = &s.lamps;
        prop_assert!(lc.sym_diff(lc).is_empty());
    }

    #[test]
    fn metric_is_left_invariant(a in any::<u64>(), b in any::<u64>(), k in any::<u64>()) {
        let space = dyadic8();
        let g = RelationLamps::new(space.clone());
        let (s, t, kk) = (relation_state(&space, a), relation_state(&space, b), relation_state(&space, k));
        prop_assert_eq!(g.metric(&state_mul(&g, &kk, &s), &state_mul(&g, &kk, &t)), g.metric(&s, &t));
    }

    #[test]
    fn point_lamp_walks_agree_with_orbits(n in 1usize..5, x in -2i64..3) {
        let a = z();
        let nu: Measure<Coords, Rational> = lazy_srw(&a).unwrap();
        let r = lamp_orbit_identity_check(&a, &nu, &pt(x), n, Mode::Exact, &McPlan::new(0, 0), BUDGET).unwrap();
        prop_assert!(r.holds);
        let law = size_law(&a, &nu, &pt(x), n, BUDGET, Convention::Inverted).unwrap();
        prop_assert_eq!(r.orbit_side.exact, Some(walklab::weight::format_rational(&law.two_pow().unwrap())));
    }
}
