use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;
use walklab::action::*;
use walklab::mc::McPlan;
use walklab::measure::*;
use walklab::spectral::*;
use walklab::stats::Verdict;
use walklab::weight::{int, ratio, Rational};
use walklab::Error;

const BUDGET: usize = DEFAULT_SUPPORT_BUDGET;

fn zd(d: usize) -> Lattice {
    Lattice::new(d).unwrap()
}

fn f2() -> FreeGroup {
    FreeGroup::new(2).unwrap()
}

fn binom(n: u64, k: u64) -> Rational {
    (0..k).fold(int(1), |acc, i| acc * int((n - i) as i64) / int((i + 1) as i64))
}

/// Brute force over all ±1 sequences of length `n`.
fn z_return_brute(n: u32) -> Rational {
    let hits = (0u64..1 << n).filter(|m| (0..n).map(|i| if m >> i & 1 == 1 { 1i64 } else { -1 }).sum::<i64>() == 0).count();
    ratio(hits as i64, 1 << n)
}

#[test]
fn return_probability_examples() {
    let z = zd(1);
    let nu: Measure<Coords, Rational> = srw(&z).unwrap();
    let p = return_probabilities(&z, &nu, &z.base_point(), 12, BUDGET).unwrap();
    assert_eq!(p[2], ratio(1, 2));
    assert_eq!(p[4], ratio(3, 8));
    for n in 0..=12u32 {
        assert_eq!(p[n as usize], z_return_brute(n));
        if n % 2 == 0 {
            assert_eq!(p[n as usize], binom(n as u64, n as u64 / 2) / int(1 << n));
        }
    }
    let id: Measure<Coords, Rational> = Measure::dirac(z.identity());
    assert!(return_probabilities(&z, &id, &z.base_point(), 5, BUDGET).unwrap().iter().all(|p| *p == int(1)));
    let f = f2();
    let p = return_probabilities(&f, &srw(&f).unwrap(), &f.base_point(), 2, BUDGET).unwrap();
    assert_eq!(p[2], ratio(1, 4));
}

#[test]
fn distance_chain_matches_orbit_evolution() {
    // The chain runs from the identity; evolution from another base point cannot use it.
    let f = f2();
    let x = f.reduce(&GroupWord::parse(&f, "x0").unwrap());
    for nu in [srw(&f).unwrap(), lazy_srw(&f).unwrap()] {
        let chain = return_probabilities(&f, &nu, &f.base_point(), 10, BUDGET).unwrap();
        let evolved = return_probabilities(&f, &nu, &x, 10, BUDGET).unwrap();
        assert_eq!(chain, evolved);
        assert!(free_chain_parameters(&f, &nu).is_some());
    }
    let skew: Measure<FreeWord, Rational> = parse_measure(&f, "x0 : 1/2\nx0^-1 : 1/2").unwrap();
    assert!(free_chain_parameters(&f, &skew).is_none());
}

#[test]
fn free_group_ratio_estimator() {
    let f = f2();
    let target = 3f64.sqrt() / 2.0;
    let r = spectral_radius(&f, &srw(&f).unwrap(), &f.base_point(), 64, None, BUDGET).unwrap();
    assert_eq!(r.method, SpectralMethod::DistanceChain);
    assert!((r.rho_ratio - target).abs() < 0.02, "{}", r.rho_ratio);
    // At 2n = 32 the n^{-3/2} prefactor still biases the ratio by about 0.033.
    let r32 = spectral_radius(&f, &srw(&f).unwrap(), &f.base_point(), 32, None, BUDGET).unwrap();
    assert!((r32.rho_ratio - target).abs() < 0.04);
    assert!(r32.rho_ratio < r.rho_ratio && r.rho_ratio < target);
}

#[test]
fn integer_root_estimator() {
    let z = zd(1);
    let r = spectral_radius(&z, &srw(&z).unwrap(), &z.base_point(), 100, None, BUDGET).unwrap();
    assert!(r.rho_root >= 0.97, "{}", r.rho_root);
    assert!(r.points.windows(2).all(|w| w[1].root >= w[0].root));
    let id: Measure<Coords, Rational> = Measure::dirac(z.identity());
    let r = spectral_radius(&z, &id, &z.base_point(), 10, None, BUDGET).unwrap();
    assert_eq!(r.rho_hat, 1.0);
    assert!(matches!(
        spectral_radius(&z, &Measure::dirac(Coords::from_slice(&[1])), &z.base_point(), 10, None, BUDGET),
        Err(Error::Config(_))
    ));
}

fn supermultiplicative<A: ActionOracle>(a: &A, nu: &Measure<A::Elem, Rational>, n: usize) {
    let p = return_probabilities(a, nu, &a.base_point(), n, BUDGET).unwrap();
    for i in 0..=n {
        for j in 0..=n - i {
            assert!(p[i + j] >= &p[i] * &p[j], "p_{} < p_{} p_{}", i + j, i, j);
        }
    }
}

#[test]
fn lazy_walks_are_supermultiplicative() {
    supermultiplicative(&zd(2), &lazy_srw(&zd(2)).unwrap(), 12);
    supermultiplicative(&f2(), &lazy_srw(&f2()).unwrap(), 20);
    let w = Lamplighter::new();
    supermultiplicative(&w, &lazy_srw(&w).unwrap(), 8);
    let z = zd(1);
    let r = spectral_radius(&z, &lazy_srw(&z).unwrap(), &z.base_point(), 40, None, BUDGET).unwrap();
    assert!(r.root_nondecreasing);
}

#[test]
fn monte_carlo_return_probabilities() {
    let z = zd(2);
    let nu = lazy_srw(&z).unwrap();
    let exact = return_probabilities(&z, &nu, &z.base_point(), 10, BUDGET).unwrap();
    let plan = McPlan::new(40_000, 17);
    let cps: Vec<usize> = (0..=10).collect();
    let mc = return_probabilities_mc(&z, &nu, &z.base_point(), &cps, &plan).unwrap();
    for (e, m) in exact.iter().zip(&mc) {
        let p = walklab::weight::rational_to_f64(e);
        let sigma = (p * (1.0 - p) / plan.samples as f64).sqrt();
        assert!((p - m.value).abs() <= 3.0 * sigma + 1e-12, "{p} vs {}", m.value);
    }
    let again = return_probabilities_mc(&z, &nu, &z.base_point(), &cps, &plan).unwrap();
    assert_eq!(mc, again);
    let r = spectral_radius(&z, &nu, &z.base_point(), 10, Some(&plan), BUDGET).unwrap();
    assert_eq!(r.method, SpectralMethod::MonteCarlo);
}

#[test]
fn network_expansion_examples() {
    // Path 0..=n+1 with unit conductances; S = [1..n] has boundary 2 and volume 2n.
    for n in [3usize, 10, 40] {
        let edges: Vec<_> = (0..=n).map(|i| (i, i + 1, int(1))).collect();
        let net = Network::new(n + 2, &edges).unwrap();
        let e = edge_expansion(&net, &[("interval".into(), (1..=n).collect())]).unwrap();
        assert_eq!(e.phi_hat_exact, walklab::weight::format_rational(&ratio(1, n as i64)));
    }
    let k4: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, int(1)))).collect();
    let net = Network::new(4, &k4).unwrap();
    let e = edge_expansion(&net, &[("single".into(), vec![0])]).unwrap();
    assert_eq!(e.phi_hat, 1.0);
    assert_eq!(e.candidates[0].boundary, "3");
    assert_eq!(e.candidates[0].volume, "3");
    assert!(Network::new(4, &[(0, 1, int(1)), (2, 3, int(1))]).is_err());
    let mut net = Network::parse_csv("src,dst,conductance\na,b,1\nb,c,1/2\n").unwrap();
    assert_eq!(net.len(), 3);
    net.mark_truncated(2);
    let e = edge_expansion(&net, &[("bc".into(), vec![1, 2]), ("a".into(), vec![0])]).unwrap();
    assert!(e.candidates[0].touches_truncation && !e.candidates[1].touches_truncation);
    assert!(Network::parse_csv("a,b\n").is_err());
}

#[test]
fn free_group_balls_expand() {
    let f = f2();
    let nu = srw(&f).unwrap();
    let balls = step_balls(&f, &nu, &f.base_point(), &[2, 3, 4, 5, 6], 1 << 20).unwrap();
    let e = action_edge_expansion(&f, &nu, &balls).unwrap();
    for (row, r) in e.candidates.iter().zip(2..) {
        let three = 3i64.pow(r);
        assert_eq!(row.size as i64, 2 * three - 1);
        assert_eq!(row.ratio, (three as f64) / (2 * three - 1) as f64);
        assert!(row.ratio > 0.5);
    }
}

#[test]
fn amenable_candidates_shrink() {
    let z = zd(1);
    let nu = srw(&z).unwrap();
    let balls = step_balls(&z, &nu, &z.base_point(), &[10, 100], 1 << 20).unwrap();
    let e = action_edge_expansion(&z, &nu, &balls).unwrap();
    assert_eq!(e.phi_hat_exact, "1/201");
    let z2 = zd(2);
    let e = action_edge_expansion(&z2, &srw(&z2).unwrap(), &lattice_boxes(2, &[4, 30])).unwrap();
    // Perimeter 4L edges of weight ¼ over L² points.
    assert_eq!(e.phi_hat_exact, "1/30");
    let w = Lamplighter::new();
    let e = action_edge_expansion(&w, &srw(&w).unwrap(), &lamplighter_boxes(&[3, 8])).unwrap();
    assert_eq!(e.phi_hat_exact, "1/12");
}

#[test]
fn mohar_examples() {
    let z = zd(1);
    let nu = srw(&z).unwrap();
    let s = spectral_radius(&z, &nu, &z.base_point(), 100, None, BUDGET).unwrap();
    let e = action_edge_expansion(&z, &nu, &step_balls(&z, &nu, &z.base_point(), &[50, 200], 1 << 20).unwrap()).unwrap();
    let m = mohar_check(&s, &e).unwrap();
    assert!(m.sound_holds && m.lower_holds);
    let id: Measure<Coords, Rational> = Measure::dirac(z.identity());
    let s = spectral_radius(&z, &id, &z.base_point(), 4, None, BUDGET).unwrap();
    assert!(mohar_check(&s, &e).unwrap().sound_holds);
    let f = f2();
    let nu = srw(&f).unwrap();
    let s = spectral_radius(&f, &nu, &f.base_point(), 64, None, BUDGET).unwrap();
    let e = action_edge_expansion(&f, &nu, &step_balls(&f, &nu, &f.base_point(), &[2, 4, 6], 1 << 20).unwrap()).unwrap();
    let m = mohar_check(&s, &e).unwrap();
    assert!((m.one_minus_rho - 0.134).abs() < 0.03);
    // A fabricated report with ρ̂ far below the truth trips the sound direction.
    let mut bad = s.clone();
    bad.rho_hat = 0.1;
    bad.rho_err = 0.0;
    assert!(matches!(mohar_check(&bad, &e), Err(Error::InvariantViolation(_))));
}

#[test]
fn linear_radius_identity_walk() {
    let z = zd(1);
    let id: Measure<Coords, Rational> = Measure::dirac(z.identity());
    let r = linear_radius_decay_exact(&z, &id, &[ratio(1, 8)], &DEFAULT_RADIUS_GRID, BUDGET).unwrap();
    assert!(r.rows[0].values.iter().all(|(_, e)| e.value == 1.0));
    assert_eq!(r.rows[0].decay.as_ref().unwrap().verdict, Verdict::Subexponential);
    let t = ThompsonF::new();
    let tid: Measure<PlMap, Rational> = Measure::dirac(t.identity());
    assert!(matches!(linear_radius_decay_exact(&t, &tid, &[ratio(1, 8)], &[1, 2], BUDGET), Err(Error::Config(_))));
}

#[test]
fn free_radius_chain_matches_evolution() {
    let f = f2();
    let nu = srw(&f).unwrap();
    let grid = [2, 4, 5, 7, 8];
    let rs = [ratio(1, 8), ratio(1, 2)];
    let chain = linear_radius_decay_exact(&f, &nu, &rs, &grid, BUDGET).unwrap();
    assert_eq!(chain.method, RadiusMethod::DistanceChain);
    // A rank-2 free group written as a lattice-free generic walk: same law through convolution.
    let skewless: Measure<FreeWord, Rational> = Measure::new(nu.iter().map(|(g, w)| (g.clone(), w.clone()))).unwrap();
    let evolved = {
        let mut law: Measure<FreeWord, Rational> = Measure::dirac(f.identity());
        let mut out = Vec::new();
        for n in 1..=8u64 {
            law = convolve(&f, &law, &skewless, None).unwrap();
            if grid.contains(&n) {
                out.push(rs.iter().map(|r| law.mass_where(|g| int(f.word_length(g).unwrap() as i64) <= r * int(n as i64))).collect::<Vec<_>>());
            }
        }
        out
    };
    for (ni, row) in evolved.iter().enumerate() {
        for (ri, p) in row.iter().enumerate() {
            assert_eq!(chain.rows[ri].values[ni].1.exact, Some(walklab::weight::format_rational(p)));
        }
    }
}

#[test]
fn free_radius_decays_exponentially() {
    let f = f2();
    let r = linear_radius_decay_exact(&f, &srw(&f).unwrap(), &[ratio(1, 8)], &DEFAULT_RADIUS_GRID, BUDGET).unwrap();
    assert_eq!(r.rows[0].decay.as_ref().unwrap().verdict, Verdict::Exponential);
}

#[test]
fn radius_monte_carlo_agrees_with_exact() {
    let w = Lamplighter::new();
    let nu = lazy_srw(&w).unwrap();
    let grid = [2, 4, 6, 8];
    let rs = [ratio(1, 4), ratio(1, 2)];
    let exact = linear_radius_decay_exact(&w, &nu, &rs, &grid, BUDGET).unwrap();
    assert_eq!(exact.method, RadiusMethod::ExactEvolution);
    let plan = McPlan::new(50_000, 5);
    let mc = linear_radius_decay_mc(&w, &nu, &rs, &grid, &plan).unwrap();
    let rows = radius_cross_check(&exact, &mc);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.agrees), "{rows:?}");
    let again = linear_radius_decay_mc(&w, &nu, &rs, &grid, &plan).unwrap();
    assert_eq!(serde_json::to_string(&mc).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn lamplighter_radius_is_subexponential() {
    let w = Lamplighter::new();
    let plan = McPlan::new(20_000, 9);
    let r = linear_radius_decay_mc(&w, &lazy_srw(&w).unwrap(), &[ratio(1, 8)], &[25, 50, 100, 200], &plan).unwrap();
    assert_eq!(r.rows[0].decay.as_ref().unwrap().verdict, Verdict::Subexponential, "{r:?}");
}

#[test]
fn relation_radius_exact_and_sampled() {
    let space = Arc::new(FiniteRelationSpace::uniform_cycle(8, true).unwrap());
    let a = FullGroupAction::new(space.clone());
    let nu = lazify(&a, &srw(&a).unwrap()).unwrap();
    let rs = [ratio(1, 4), ratio(1, 2)];
    let grid = [1, 2, 3];
    let exact = relation_radius_decay(&space, &nu, &rs, &grid, None, 1 << 24).unwrap();
    let plan = McPlan::new(30_000, 2);
    let mc = relation_radius_decay(&space, &nu, &rs, &grid, Some(&plan), 0).unwrap();
    assert!(radius_cross_check(&exact, &mc).iter().all(|r| r.agrees));
    assert!(exact.rows[1].values.iter().all(|(_, e)| !e.exact.as_deref().unwrap().is_empty()));
}

proptest! {
    #[test]
    fn chain_laws_are_probabilities(k in 1usize..4, hold in 0i64..4, n in 0usize..30) {
        let laws = free_distance_laws(k, &ratio(hold, 4), n);
        for law in &laws {
            prop_assert_eq!(law.iter().sum::<Rational>(), int(1));
            prop_assert!(law.iter().all(|w| *w >= Rational::zero()));
        }
    }

    #[test]
    fn ball_expansion_is_a_ratio(r in 0usize..6, d in 1usize..3) {
        let z = zd(d);
        let nu = lazy_srw(&z).unwrap();
        let balls = step_balls(&z, &nu, &z.base_point(), &[r], 1 << 20).unwrap();
        let e = action_edge_expansion(&z, &nu, &balls).unwrap();
        prop_assert!(e.phi_hat > 0.0 && e.phi_hat <= 1.0);
    }
}
