use proptest::prelude::*;
use walklab::action::*;
use walklab::measure::*;
use walklab::weight::{int, ratio, Rational};
use walklab::Error;

type M = Measure<Coords, Rational>;

fn z() -> Lattice {
    Lattice::new(1).unwrap()
}

fn pt(v: i64) -> Coords {
    Coords::from_slice(&[v])
}

fn atoms(m: &M) -> Vec<(i64, Rational)> {
    m.iter().map(|(k, w)| (k[0], w.clone())).collect()
}

fn measure_strategy() -> impl Strategy<Value = M> {
    prop::collection::vec((-4i64..=4, 1i64..6), 1..5).prop_map(|v| {
        let total: i64 = v.iter().map(|(_, w)| w).sum();
        Measure::new(v.into_iter().map(|(k, w)| (pt(k), ratio(w, total)))).unwrap()
    })
}

#[test]
fn srw_self_convolution() {
    let a = z();
    let s: M = srw(&a).unwrap();
    let c = convolve(&a, &s, &s, None).unwrap();
    assert_eq!(atoms(&c), vec![(-2, ratio(1, 4)), (0, ratio(1, 2)), (2, ratio(1, 4))]);
    let id = Measure::dirac(a.identity());
    assert_eq!(convolve(&a, &id, &s, None).unwrap(), s);
    let g: M = convolve(&a, &Measure::dirac(pt(3)), &Measure::dirac(pt(-3)), None).unwrap();
    assert_eq!(g, Measure::dirac(a.identity()));
}

#[test]
fn push_and_step() {
    let a = z();
    let lazy: M = lazy_srw(&a).unwrap();
    let d = push(&a, &lazy, &pt(0)).unwrap();
    assert_eq!(atoms(&d), vec![(-1, ratio(1, 4)), (0, ratio(1, 2)), (1, ratio(1, 4))]);
    let id: M = Measure::dirac(a.identity());
    assert_eq!(step(&a, &step(&a, &d, &id, None).unwrap(), &id, None).unwrap(), d);
    let s: M = srw(&a).unwrap();
    let two = step(&a, &push(&a, &s, &pt(0)).unwrap(), &s, None).unwrap();
    assert_eq!(atoms(&two), vec![(-2, ratio(1, 4)), (0, ratio(1, 2)), (2, ratio(1, 4))]);
}

#[test]
fn l1_examples() {
    let a = z();
    let s: M = srw(&a).unwrap();
    let d0 = push(&a, &s, &pt(0)).unwrap();
    let d2 = push(&a, &s, &pt(2)).unwrap();
    assert_eq!(l1_distance(&d0, &d2), int(1));
    assert_eq!(l1_distance(&d0, &d0), int(0));
    let p: M = Measure::dirac(pt(0));
    let q: M = Measure::dirac(pt(5));
    assert_eq!(l1_distance(&p, &q), int(2));
}

#[test]
fn mix_examples() {
    let a = z();
    let s: M = srw(&a).unwrap();
    let m = mix(&[(ratio(1, 4), &s), (ratio(3, 4), &Measure::dirac(a.identity()))]).unwrap();
    assert_eq!(atoms(&m), vec![(-1, ratio(1, 8)), (0, ratio(3, 4)), (1, ratio(1, 8))]);
    assert_eq!(mix(&[(int(1), &s)]).unwrap(), s);
    let bad = mix(&[(ratio(1, 3), &s), (ratio(1, 3), &s)]).unwrap_err();
    assert!(matches!(bad, Error::Config(_)));
}

#[test]
fn symmetrize_and_lazify() {
    let a = z();
    let g: M = Measure::dirac(pt(2));
    assert_eq!(atoms(&symmetrize(&a, &g).unwrap()), vec![(-2, ratio(1, 2)), (2, ratio(1, 2))]);
    let id: M = Measure::dirac(a.identity());
    assert_eq!(lazify(&a, &id).unwrap(), id);
    let l = lazify(&a, &srw(&a).unwrap()).unwrap();
    assert_eq!(atoms(&l), vec![(-1, ratio(1, 4)), (0, ratio(1, 2)), (1, ratio(1, 4))]);
    assert!(is_lazy(&a, &l) && is_symmetric(&a, &l));
}

#[test]
fn truncation_records_defect() {
    let a = z();
    let s: M = lazy_srw(&a).unwrap();
    let c = convolve(&a, &s, &s, Some(3)).unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c.defect(), &ratio(2, 16));
    assert_eq!(c.total_mass() + c.defect(), int(1));
    let d = convolve(&a, &c, &s, Some(4)).unwrap();
    assert_eq!(d.total_mass() + d.defect(), int(1));
}

#[test]
fn incompatible_oracles_rejected() {
    let z2 = Lattice::new(2).unwrap();
    let m: M = Measure::dirac(pt(1));
    assert!(matches!(convolve(&z2, &m, &m, None), Err(Error::Config(_))));
}

#[test]
fn parse_presets_and_lines() {
    let f2 = FreeGroup::new(2).unwrap();
    let s: Measure<FreeWord, Rational> = parse_measure(&f2, "srw").unwrap();
    assert_eq!(s.len(), 4);
    let b: Measure<FreeWord, Rational> = parse_measure(&f2, "uniform-ball:2").unwrap();
    assert_eq!(b.len(), 17);
    let l: Measure<FreeWord, Rational> = parse_measure(&f2, "1:1/2\nx0:1/8\nx0^-1:1/8\nx1 : 1/8\nx1^-1: 0.125").unwrap();
    assert_eq!(l, parse_measure(&f2, "lazy-srw").unwrap());
    assert_eq!(parse_measure::<_, Rational>(&f2, &format_measure(&f2, &l).unwrap()).unwrap(), l);
    assert!(parse_measure::<_, Rational>(&f2, "x0:1/2").is_err());
    assert!(parse_measure::<_, f64>(&f2, "x0:0.5\nx0^-1:0.5").is_ok());
}

#[test]
fn distribution_csv() {
    let a = z();
    let d = push(&a, &lazy_srw::<_, Rational>(&a).unwrap(), &pt(0)).unwrap();
    let mut buf = Vec::new();
    write_distribution_csv(&a, &d, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "point,probability\n\"(-1)\",1/4\n\"(0)\",1/2\n\"(1)\",1/4\n");
}

proptest! {
    #[test]
    fn convolution_is_associative(x in measure_strategy(), y in measure_strategy(), w in measure_strategy()) {
        let a = z();
        let l = convolve(&a, &convolve(&a, &x, &y, None).unwrap(), &w, None).unwrap();
        let r = convolve(&a, &x, &convolve(&a, &y, &w, None).unwrap(), None).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn kernel_contraction(s in measure_strategy(), t in measure_strategy(), x in -3i64..3) {
        let a = z();
        let ds = push(&a, &s, &pt(x)).unwrap();
        let dt = push(&a, &t, &pt(x)).unwrap();
        prop_assert!(l1_distance(&ds, &dt) <= l1_distance(&s, &t));
    }

    #[test]
    fn l1_is_a_metric(x in measure_strategy(), y in measure_strategy(), w in measure_strategy()) {
        prop_assert_eq!(l1_distance(&x, &y), l1_distance(&y, &x));
        prop_assert!(l1_distance(&x, &w) <= l1_distance(&x, &y) + l1_distance(&y, &w));
        prop_assert!(l1_distance(&x, &y) <= int(2));
    }

    #[test]
    fn push_is_linear(x in measure_strategy(), y in measure_strategy(), c in 1i64..8, p in -3i64..3) {
        let a = z();
        let c = ratio(c, 8);
        let one_minus = int(1) - &c;
        let m = mix(&[(c.clone(), &x), (one_minus.clone(), &y)]).unwrap();
        let lhs = push(&a, &m, &pt(p)).unwrap();
        let rhs = mix(&[(c, &push(&a, &x, &pt(p)).unwrap()), (one_minus, &push(&a, &y, &pt(p)).unwrap())]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mass_is_conserved(x in measure_strategy(), y in measure_strategy(), cap in 1usize..6) {
        let a = z();
        let c = convolve(&a, &x, &y, Some(cap)).unwrap();
        let d = step(&a, &push(&a, &c, &pt(0)).unwrap(), &x, Some(cap)).unwrap();
        prop_assert_eq!(c.total_mass() + c.defect(), int(1));
        prop_assert_eq!(d.total_mass() + d.defect(), int(1));
    }
}
