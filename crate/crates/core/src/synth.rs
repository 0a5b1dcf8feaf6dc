//! Liouville synthesis: one measure `ν = Σ c_j ν_{n_j}` assembled from a family satisfying
//! the total-variation condition, with an audit of every inductive choice.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::action::{ActionOracle, FiniteRelationSpace, Perm};
use crate::measure::{convolve, l1_distance, mix, push, step, Measure};
use crate::weight::{format_rational, rational_to_f64, Rational};
use crate::{Error, Result};

/// Positive weights `c_j`: an explicit prefix, then the remaining mass spread geometrically.
#[derive(Clone, Debug)]
pub struct WeightRule {
    prefix: Vec<Rational>,
    tail_ratio: Rational,
}

impl WeightRule {
    /// `c_{p+k} = (1 − Σ prefix)(1 − r) r^k` after the prefix of length `p`.
    pub fn new(prefix: Vec<Rational>, tail_ratio: Rational) -> Result<Self> {
        if prefix.iter().any(|c| c <= &Rational::zero()) {
            return Err(Error::Config("weights must be positive".into()));
        }
        if !(tail_ratio > Rational::zero() && tail_ratio < Rational::one()) {
            return Err(Error::Config(format!("tail ratio must lie in (0, 1), got {tail_ratio}")));
        }
        let head: Rational = prefix.iter().sum();
        if head >= Rational::one() {
            return Err(Error::Config(format!("prefix mass {head} leaves nothing for the tail")));
        }
        Ok(WeightRule { prefix, tail_ratio })
    }

    /// `c_j = 2^{-(j+1)}`.
    pub fn geometric_half() -> Self {
        WeightRule { prefix: vec![], tail_ratio: Rational::new(1.into(), 2.into()) }
    }

    pub fn weight(&self, j: usize) -> Rational {
        if let Some(c) = self.prefix.get(j) {
            return c.clone();
        }
        let rest = Rational::one() - self.prefix.iter().sum::<Rational>();
        let k = (j - self.prefix.len()) as i32;
        rest * (Rational::one() - &self.tail_ratio) * self.tail_ratio.pow(k)
    }

    /// `c_0 + … + c_{j−1}`.
    pub fn head(&self, j: usize) -> Rational {
        (0..j).map(|i| self.weight(i)).sum()
    }
}

/// Minimal `m ≥ 1` with `s^m ≤ 1/j`.
pub fn minimal_m(s: &Rational, j: usize) -> Result<u32> {
    if j == 0 {
        return Err(Error::Domain("m_j is defined for j ≥ 1".into()));
    }
    if !(s > &Rational::zero() && s < &Rational::one()) && j > 1 {
        return Err(Error::Domain(format!("partial weight sum {s} must lie in (0, 1)")));
    }
    let target = Rational::new(BigInt::one(), BigInt::from(j));
    let mut m = 1u32;
    let mut p = s.clone();
    while p > target {
        p *= s;
        m += 1;
    }
    Ok(m)
}

/// A candidate family `n ↦ (ν_n, ε_n)` with exhaustion `n ↦ K_n` and base measure `ν_0`.
pub trait SynthFamily<A: ActionOracle + ?Sized> {
    fn base(&self) -> &Measure<A::Elem, Rational>;
    /// `(ν_n, ε_n)` for `n ≥ 1`.
    fn member(&self, a: &A, n: u64) -> Result<(Measure<A::Elem, Rational>, Rational)>;
    /// `K_n` for `n ≥ 0`; increasing in `n`.
    fn exhaustion(&self, a: &A, n: u64) -> Result<Vec<A::Point>>;
}

/// `ν_n` uniform on `{T^k : |k| ≤ n²}`, `ε_n = scale/n`, `K_n = {T^k x₀ : |k| ≤ n}`.
#[derive(Clone, Debug)]
pub struct ShiftFamily<E: Ord, P> {
    pub t: E,
    pub origin: P,
    pub base: Measure<E, Rational>,
    pub eps_scale: Rational,
}

impl<A: ActionOracle + ?Sized> SynthFamily<A> for ShiftFamily<A::Elem, A::Point> {
    fn base(&self) -> &Measure<A::Elem, Rational> {
        &self.base
    }

    fn member(&self, a: &A, n: u64) -> Result<(Measure<A::Elem, Rational>, Rational)> {
        if n == 0 {
            return Err(Error::Domain("family members start at n = 1".into()));
        }
        let r = n * n;
        let nu = Measure::uniform(powers(a, &self.t, r))?;
        Ok((nu, &self.eps_scale / BigInt::from(n)))
    }

    fn exhaustion(&self, a: &A, n: u64) -> Result<Vec<A::Point>> {
        Ok(powers(a, &self.t, n).iter().map(|g| a.act(g, &self.origin)).collect())
    }
}

/// `T^k` for `|k| ≤ r`.
fn powers<A: ActionOracle + ?Sized>(a: &A, t: &A::Elem, r: u64) -> Vec<A::Elem> {
    let ti = a.inverse(t);
    let mut out = vec![a.identity()];
    let (mut up, mut down) = (a.identity(), a.identity());
    for _ in 0..r {
        up = a.mul(t, &up);
        down = a.mul(&ti, &down);
        out.push(up.clone());
        out.push(down.clone());
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TvReport {
    pub points: usize,
    /// `sup_{x,y ∈ K} ‖δ_x ν − δ_y ν‖₁`.
    pub sup: String,
    pub sup_f64: f64,
    pub eps: String,
    /// `sup < ε`.
    pub passes: bool,
}

/// Condition (TV): the largest L¹ distance between one-step laws started in `K`.
pub fn tv_condition_check<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    k: &[A::Point],
    eps: &Rational,
) -> Result<TvReport> {
    use rayon::prelude::*;
    let laws: Vec<_> = k.iter().map(|x| push(a, nu, x)).collect::<Result<_>>()?;
    let sup = (0..laws.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..laws.len())
                .map(|j| l1_distance(&laws[i], &laws[j]))
                .max()
                .unwrap_or_else(Rational::zero)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(TvReport {
        points: k.len(),
        sup_f64: rational_to_f64(&sup),
        passes: &sup < eps,
        sup: format_rational(&sup),
        eps: format_rational(eps),
    })
}

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub weights: WeightRule,
    /// Depth `J`.
    pub depth: usize,
    /// Largest `n` searched for `n_j`.
    pub max_n: u64,
    /// Largest `|S_j|` enumerated.
    pub max_convolutions: usize,
}

impl SynthConfig {
    pub fn new(weights: WeightRule, depth: usize) -> Self {
        SynthConfig { weights, depth, max_n: 1_000, max_convolutions: 10_000 }
    }
}

/// Audit of step `j` of the induction.
#[derive(Clone, Debug, Serialize)]
pub struct SynthStep {
    pub j: usize,
    pub c_head: String,
    pub m: u32,
    /// `(c_0+…+c_{j−1})^{m_j} ≤ 1/j` and `(c_0+…+c_{j−1})^{m_j−1} > 1/j` (vacuous at `m_j = 1`).
    pub m_minimal: bool,
    /// Atoms of `ν_0` kept by `θ_j`.
    pub theta_atoms: usize,
    pub theta_l1: String,
    /// `1/(j m_j)`.
    pub theta_bound: String,
    pub theta_ok: bool,
    /// `|S_j|`, counting multisets of factor indices.
    pub convolutions: usize,
    /// `max_{s ∈ S_j} ‖s − s′‖₁` over the canonical and reversed orderings.
    pub worst_surrogate_l1: String,
    /// `m_j ‖ν_0 − θ_j‖₁ ≤ 1/j`, which bounds every ordering.
    pub surrogate_bound_ok: bool,
    /// Distinct elements in the supports of `S′_j`.
    pub support_elements: usize,
    pub n: u64,
    pub eps: String,
    /// `g K_{n_{j−1}} ⊆ K_{n_j}` for every support element, checked pointwise.
    pub containment_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthState {
    /// `n_0 = 0, n_1, …, n_J`.
    pub indices: Vec<u64>,
    pub steps: Vec<SynthStep>,
    /// Family members checked against (TV): `(n, sup, ε_n)`.
    pub tv_checked: Vec<(u64, String, String)>,
    /// `Σ_{j > J} c_j`, dropped and renormalized away.
    pub tail_mass: String,
    /// Mixture weights `c_j / Σ_{i ≤ J} c_i`.
    pub mixture_weights: Vec<String>,
    pub invariants_hold: bool,
}

impl SynthState {
    /// `(j, m_j, 4/j + ε_{n_j})` for the completed steps whose bound applies to `x, y`.
    pub fn probe_targets<A: ActionOracle + ?Sized, F: SynthFamily<A>>(
        &self,
        a: &A,
        family: &F,
        x: &A::Point,
        y: &A::Point,
    ) -> Result<Vec<ProbeTarget>> {
        let mut out = Vec::new();
        for s in &self.steps {
            let k: FxHashSet<A::Point> = family.exhaustion(a, self.indices[s.j - 1])?.into_iter().collect();
            if k.contains(x) && k.contains(y) {
                let eps = family.member(a, s.n)?.1;
                let bound = Rational::new(BigInt::from(4), BigInt::from(s.j)) + eps;
                out.push(ProbeTarget { j: s.j, m: s.m, bound });
            }
        }
        Ok(out)
    }
}

/// Multisets of `1..=m` indices from `0..k`, as sorted vectors.
fn multisets(k: usize, m: u32, budget: usize, j: usize) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for s in &layer {
            let lo = s.last().copied().unwrap_or(0);
            for i in lo..k {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
                if out.len() + next.len() > budget {
                    return Err(Error::resource(
                        format!("convolution set S_{j}"),
                        format!("more than {budget} measures"),
                        budget,
                    ));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

fn convolve_all<A: ActionOracle + ?Sized>(
    a: &A,
    factors: &[&Measure<A::Elem, Rational>],
) -> Result<Measure<A::Elem, Rational>> {
    let mut out = Measure::dirac(a.identity());
    for f in factors {
        out = convolve(a, &out, f, None)?;
    }
    Ok(out)
}

/// `ν_0` renormalized on its heaviest atoms (ties by key), with `‖ν_0 − θ‖₁ = 2(1 − kept mass) ≤ bound`.
pub fn top_mass_truncation<K: crate::action::Key>(
    nu: &Measure<K, Rational>,
    bound: &Rational,
) -> Result<(Measure<K, Rational>, Rational)> {
    let mut atoms: Vec<(&K, &Rational)> = nu.iter().collect();
    atoms.sort_by(|x, y| y.1.cmp(x.1).then_with(|| x.0.cmp(y.0)));
    let two = Rational::from_integer(BigInt::from(2));
    let mut kept = Rational::zero();
    let mut cut = atoms.len();
    for (i, (_, w)) in atoms.iter().enumerate() {
        kept += *w;
        if &two * (Rational::one() - &kept) <= *bound {
            cut = i + 1;
            break;
        }
    }
    let kept: Rational = atoms[..cut].iter().map(|(_, w)| (*w).clone()).sum();
    let theta = Measure::new(atoms[..cut].iter().map(|(k, w)| ((*k).clone(), (*w).clone() / &kept)))?;
    let dist = l1_distance(nu, &theta);
    Ok((theta, dist))
}

/// Runs the induction to depth `J` and returns the renormalized partial mixture with its audit.
pub fn synthesize<A: ActionOracle + ?Sized, F: SynthFamily<A>>(
    a: &A,
    family: &F,
    config: &SynthConfig,
) -> Result<(Measure<A::Elem, Rational>, SynthState)> {
    let base = family.base().clone();
    if !crate::measure::is_symmetric(a, &base) {
        return Err(Error::Config("base measure ν_0 must be symmetric".into()));
    }
    // measures[n] = ν_n, computed lazily as n grows.
    let mut measures: Vec<Measure<A::Elem, Rational>> = vec![base.clone()];
    let mut eps: Vec<Rational> = vec![Rational::zero()];
    let mut tv_checked = Vec::new();
    let mut extend_to = |n: u64, measures: &mut Vec<Measure<A::Elem, Rational>>, eps: &mut Vec<Rational>| -> Result<()> {
        while (measures.len() as u64) <= n {
            let m = measures.len() as u64;
            let (nu, e) = family.member(a, m)?;
            if !crate::measure::is_symmetric(a, &nu) {
                return Err(Error::Precondition { n: m, detail: "family member is not symmetric".into() });
            }
            if m > 1 && e >= eps[m as usize - 1] {
                return Err(Error::Precondition { n: m, detail: format!("ε_n = {e} does not decrease") });
            }
            let tv = tv_condition_check(a, &nu, &family.exhaustion(a, m)?, &e)?;
            if !tv.passes {
                return Err(Error::Precondition {
                    n: m,
                    detail: format!("condition (TV) fails: sup = {} ≥ ε_n = {}", tv.sup, tv.eps),
                });
            }
            tv_checked.push((m, tv.sup, tv.eps));
            measures.push(nu);
            eps.push(e);
        }
        Ok(())
    };

    let mut indices = vec![0u64];
    let mut steps = Vec::new();
    for j in 1..=config.depth {
        let head = config.weights.head(j);
        let m = minimal_m(&head, j)?;
        let inv_j = Rational::new(BigInt::one(), BigInt::from(j));
        let m_minimal = head.pow(m as i32) <= inv_j && (m == 1 || head.pow(m as i32 - 1) > inv_j);

        let theta_bound = Rational::new(BigInt::one(), BigInt::from(j as u64 * m as u64));
        let (theta, theta_l1) = top_mass_truncation(&base, &theta_bound)?;
        let theta_ok = theta_l1 <= theta_bound;

        let prev = *indices.last().expect("n_0 present");
        extend_to(prev, &mut measures, &mut eps)?;
        let sets = multisets(prev as usize + 1, m, config.max_convolutions, j)?;
        let mut worst = Rational::zero();
        let mut support: BTreeSet<A::Elem> = BTreeSet::new();
        for idx in &sets {
            let orig: Vec<&Measure<A::Elem, Rational>> = idx.iter().map(|&i| &measures[i]).collect();
            let surr: Vec<&Measure<A::Elem, Rational>> =
                idx.iter().map(|&i| if i == 0 { &theta } else { &measures[i] }).collect();
            for reversed in [false, true] {
                let (o, s): (Vec<_>, Vec<_>) = if reversed {
                    (orig.iter().rev().copied().collect(), surr.iter().rev().copied().collect())
                } else {
                    (orig.clone(), surr.clone())
                };
                let so = convolve_all(a, &o)?;
                let ss = convolve_all(a, &s)?;
                worst = worst.max(l1_distance(&so, &ss));
                support.extend(ss.support().cloned());
            }
        }
        let surrogate_bound_ok = Rational::from_integer(BigInt::from(m)) * &theta_l1 <= inv_j && worst <= inv_j;

        let k_prev = family.exhaustion(a, prev)?;
        let mut chosen = None;
        for n in prev + 1..=config.max_n {
            let k: FxHashSet<A::Point> = family.exhaustion(a, n)?.into_iter().collect();
            if support.iter().all(|g| k_prev.iter().all(|x| k.contains(&a.act(g, x)))) {
                chosen = Some(n);
                break;
            }
        }
        let Some(n) = chosen else {
            return Err(Error::RangeExhausted(format!(
                "no n ≤ {} has K_n containing g K_{prev} for every support element at j = {j}",
                config.max_n
            )));
        };
        extend_to(n, &mut measures, &mut eps)?;
        indices.push(n);
        steps.push(SynthStep {
            j,
            c_head: format_rational(&head),
            m,
            m_minimal,
            theta_atoms: theta.len(),
            theta_l1: format_rational(&theta_l1),
            theta_bound: format_rational(&theta_bound),
            theta_ok,
            convolutions: sets.len(),
            worst_surrogate_l1: format_rational(&worst),
            surrogate_bound_ok,
            support_elements: support.len(),
            n,
            eps: format_rational(&eps[n as usize]),
            containment_ok: true,
        });
    }

    let cs: Vec<Rational> = (0..=config.depth).map(|j| config.weights.weight(j)).collect();
    let total: Rational = cs.iter().sum();
    let normalized: Vec<Rational> = cs.iter().map(|c| c / &total).collect();
    let parts: Vec<(Rational, &Measure<A::Elem, Rational>)> =
        normalized.iter().zip(&indices).map(|(c, &n)| (c.clone(), &measures[n as usize])).collect();
    let nu = mix(&parts)?;
    let invariants_hold = steps.iter().all(|s| s.m_minimal && s.theta_ok && s.surrogate_bound_ok && s.containment_ok)
        && indices.windows(2).all(|w| w[0] < w[1])
        && crate::measure::is_symmetric(a, &nu);
    let state = SynthState {
        indices,
        steps,
        tv_checked,
        tail_mass: format_rational(&(Rational::one() - total)),
        mixture_weights: normalized.iter().map(format_rational).collect(),
        invariants_hold,
    };
    Ok((nu, state))
}

/// A bound `‖δ_x ν^{m_j} − δ_y ν^{m_j}‖₁ < 4/j + ε_{n_j}` to test during a probe.
#[derive(Clone, Debug)]
pub struct ProbeTarget {
    pub j: usize,
    pub m: u32,
    pub bound: Rational,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum BoundVerdict {
    Pass,
    Fail,
    /// Truncation defect straddles the bound.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub j: usize,
    pub m: u32,
    pub bound: String,
    pub distance: f64,
    pub defect: f64,
    pub verdict: BoundVerdict,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Constant,
    Decreasing,
    Nonincreasing,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    /// `‖δ_x ν^m − δ_y ν^m‖₁` for `m = 0..=M`.
    pub distances: Vec<f64>,
    /// Mass lost to truncation in both laws at each `m`; distances carry this error bar.
    pub defects: Vec<f64>,
    pub min: f64,
    pub trend: Trend,
    pub checks: Vec<BoundCheck>,
}

/// Iterates `δ_x ν^m` and `δ_y ν^m`, keeping at most `cap` atoms each.
pub fn liouville_probe<A: ActionOracle + ?Sized, W: crate::weight::Weight>(
    a: &A,
    nu: &Measure<A::Elem, W>,
    x: &A::Point,
    y: &A::Point,
    max_m: u32,
    cap: Option<usize>,
    targets: &[ProbeTarget],
) -> Result<ProbeReport> {
    let mut dx = Measure::dirac(x.clone());
    let mut dy = Measure::dirac(y.clone());
    let mut distances = Vec::with_capacity(max_m as usize + 1);
    let mut defects = Vec::with_capacity(max_m as usize + 1);
    for m in 0..=max_m {
        if m > 0 {
            dx = step(a, &dx, nu, cap)?;
            dy = step(a, &dy, nu, cap)?;
        }
        distances.push(l1_distance(&dx, &dy).to_f64());
        defects.push(dx.defect().add(dy.defect()).to_f64());
    }
    let min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = crate::weight::FLOAT_TOL;
    let trend = if distances.windows(2).all(|w| (w[1] - w[0]).abs() <= tol) {
        Trend::Constant
    } else if distances.windows(2).all(|w| w[1] < w[0]) {
        Trend::Decreasing
    } else if distances.windows(2).all(|w| w[1] <= w[0] + tol) {
        Trend::Nonincreasing
    } else {
        Trend::Mixed
    };
    let checks = targets
        .iter()
        .filter(|t| t.m <= max_m)
        .map(|t| {
            let d = distances[t.m as usize];
            let e = defects[t.m as usize];
            let b = rational_to_f64(&t.bound);
            let verdict = if d + e < b {
                BoundVerdict::Pass
            } else if d - e >= b {
                BoundVerdict::Fail
            } else {
                BoundVerdict::Inconclusive
            };
            BoundCheck { j: t.j, m: t.m, bound: format_rational(&t.bound), distance: d, defect: e, verdict }
        })
        .collect();
    Ok(ProbeReport { distances, defects, min, trend, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRow {
    pub n: u64,
    /// `B_n = {x : f_n^k x ≠ T^k x for some |k| ≤ n² + n}`.
    pub points: Vec<u32>,
    pub mass: String,
    /// `n³ / 2ⁿ`.
    pub bound: String,
    pub exceeds_bound: bool,
}

/// Exact defect sets of approximants `f_n` of `T` on a finite relation space.
pub fn defect_sets(space: &FiniteRelationSpace, t: &Perm, approximants: &[(u64, Perm)]) -> Result<Vec<DefectRow>> {
    let len = space.len();
    if t.0.len() != len {
        return Err(Error::Config(format!("T acts on {} points, the space has {len}", t.0.len())));
    }
    approximants
        .iter()
        .map(|(n, f)| {
            if f.0.len() != len {
                return Err(Error::Config(format!("f_{n} acts on {} points, the space has {len}", f.0.len())));
            }
            let range = n * n + n;
            let (ti, fi) = (t.inverse(), f.inverse());
            let points: Vec<u32> = (0..len as u32)
                .filter(|&x| {
                    let (mut a, mut b, mut c, mut d) = (x, x, x, x);
                    (0..range).any(|_| {
                        a = f.apply(a);
                        b = t.apply(b);
                        c = fi.apply(c);
                        d = ti.apply(d);
                        a != b || c != d
                    })
                })
                .collect();
            let mass = space.mass(points.iter());
            let bound = Rational::new(BigInt::from(n.pow(3)), BigInt::from(2).pow(*n as u32));
            Ok(DefectRow {
                n: *n,
                exceeds_bound: mass > bound,
                mass: format_rational(&mass),
                bound: format_rational(&bound),
                points,
            })
        })
        .collect()
}

/// `K_n(x) = {T^k x : |k| ≤ n}` on a finite space.
pub fn relation_window(t: &Perm, x: u32, n: u64) -> BTreeSet<u32> {
    let ti = t.inverse();
    let mut out: BTreeSet<u32> = [x].into_iter().collect();
    let (mut a, mut b) = (x, x);
    for _ in 0..n {
        a = t.apply(a);
        b = ti.apply(b);
        out.insert(a);
        out.insert(b);
    }
    out
}

/// `D = {x : g K_{n_prev}(x) ⊄ K_{n_next}(x) for some g in elems}` and its mass.
pub fn containment_defect(
    space: &FiniteRelationSpace,
    t: &Perm,
    elems: &[Perm],
    n_prev: u64,
    n_next: u64,
) -> (Vec<u32>, Rational) {
    let points: Vec<u32> = (0..space.len() as u32)
        .filter(|&x| {
            let small = relation_window(t, x, n_prev);
            let big = relation_window(t, x, n_next);
            elems.iter().any(|g| small.iter().any(|&y| !big.contains(&g.apply(y))))
        })
        .collect();
    let mass = space.mass(points.iter());
    (points, mass)
}
