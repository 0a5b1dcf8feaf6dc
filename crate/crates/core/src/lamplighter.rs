//! Switch-walk-switch walks on lamp groups `Lamps ⋊ G`.
//!
//! Two lamp grounds share one code path: finite subsets of an orbit (`PointLamps`) and finite
//! subsets of a relation `R ⊆ X × X` acted on in the second coordinate (`RelationLamps`).

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::action::{ActionOracle, FiniteRelationSpace, FullGroupAction, Key, Perm};
use crate::error::{Error, Result};
use crate::inverted::{size_law, Convention, Mode};
use crate::mc::{McPlan, Sampler};
use crate::measure::Measure;
use crate::stats::Estimate;
use crate::weight::{format_rational, over_power, IntWeights, Rational};

/// A group acting on lamp positions.
pub trait LampGround: Send + Sync {
    type Elem: Key;
    type Pos: Key;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn act_pos(&self, g: &Self::Elem, p: &Self::Pos) -> Self::Pos;
}

/// Lamps on the points of an action.
pub struct PointLamps<'a, A: ?Sized>(pub &'a A);

impl<A: ActionOracle + ?Sized> LampGround for PointLamps<'_, A> {
    type Elem = A::Elem;
    type Pos = A::Point;
    fn identity(&self) -> A::Elem {
        self.0.identity()
    }
    fn mul(&self, a: &A::Elem, b: &A::Elem) -> A::Elem {
        self.0.mul(a, b)
    }
    fn inverse(&self, a: &A::Elem) -> A::Elem {
        self.0.inverse(a)
    }
    fn act_pos(&self, g: &A::Elem, p: &A::Point) -> A::Point {
        self.0.act(g, p)
    }
}

/// Lamps on pairs `(x, y) ∈ R`; permutations act by `(x, y) ↦ (x, g y)`.
#[derive(Clone, Debug)]
pub struct RelationLamps {
    space: Arc<FiniteRelationSpace>,
}

impl RelationLamps {
    pub fn new(space: Arc<FiniteRelationSpace>) -> Self {
        RelationLamps { space }
    }

    pub fn space(&self) -> &Arc<FiniteRelationSpace> {
        &self.space
    }

    /// The identity graph `I = {(x, x)}`.
    pub fn diagonal(&self) -> LampConfig<(u32, u32)> {
        LampConfig((0..self.space.len() as u32).map(|x| (x, x)).collect())
    }

    /// `d_C(A, B) = Σ_{(x,y) ∈ A Δ B} μ(x)`.
    pub fn d_c(&self, a: &LampConfig<(u32, u32)>, b: &LampConfig<(u32, u32)>) -> Rational {
        self.space.lamp_mass(a.sym_diff(b).iter())
    }

    /// `d_R(g, h) = μ{x : g x ≠ h x}`.
    pub fn d_r(&self, g: &Perm, h: &Perm) -> Rational {
        self.space.uniform_distance(g, h)
    }

    /// `D = d_C + d_R` on lamp-walker states.
    pub fn metric(&self, s: &RelState, t: &RelState) -> Rational {
        self.d_c(&s.lamps, &t.lamps) + self.d_r(&s.elem, &t.elem)
    }

    pub fn is_valid(&self, c: &LampConfig<(u32, u32)>) -> bool {
        c.iter().all(|&(x, y)| (x as usize) < self.space.len() && (y as usize) < self.space.len() && self.space.related(x, y))
    }
}

impl LampGround for RelationLamps {
    type Elem = Perm;
    type Pos = (u32, u32);
    fn identity(&self) -> Perm {
        Perm::identity(self.space.len())
    }
    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }
    fn inverse(&self, a: &Perm) -> Perm {
        a.inverse()
    }
    fn act_pos(&self, g: &Perm, p: &(u32, u32)) -> (u32, u32) {
        (p.0, g.apply(p.1))
    }
}

/// Finite set of lamp positions, sorted and without repeats.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampConfig<P>(Vec<P>);

impl<P: Key> LampConfig<P> {
    pub fn empty() -> Self {
        LampConfig(Vec::new())
    }

    pub fn singleton(p: P) -> Self {
        LampConfig(vec![p])
    }

    pub fn from_iter(ps: impl IntoIterator<Item = P>) -> Self {
        let mut v: Vec<P> = ps.into_iter().collect();
        v.sort();
        // Symmetric-difference semantics: pairs cancel.
        let mut out: Vec<P> = Vec::with_capacity(v.len());
        for p in v {
            if out.last() == Some(&p) {
                out.pop();
            } else {
                out.push(p);
            }
        }
        LampConfig(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = &P> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn sym_diff(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LampConfig(out)
    }

    pub fn translate<G: LampGround<Pos = P>>(&self, ground: &G, g: &G::Elem) -> Self {
        let mut v: Vec<P> = self.0.iter().map(|p| ground.act_pos(g, p)).collect();
        v.sort();
        LampConfig(v)
    }
}

/// Lamp-walker state `(c, g)`; product `(c₁, g₁)(c₂, g₂) = (c₁ Δ g₁c₂, g₁g₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampState<P, E> {
    pub lamps: LampConfig<P>,
    pub elem: E,
}

pub type RelState = LampState<(u32, u32), Perm>;

pub fn state_identity<G: LampGround>(ground: &G) -> LampState<G::Pos, G::Elem> {
    LampState { lamps: LampConfig::empty(), elem: ground.identity() }
}

pub fn state_mul<G: LampGround>(
    ground: &G,
    s: &LampState<G::Pos, G::Elem>,
    t: &LampState<G::Pos, G::Elem>,
) -> LampState<G::Pos, G::Elem> {
    LampState { lamps: s.lamps.sym_diff(&t.lamps.translate(ground, &s.elem)), elem: ground.mul(&s.elem, &t.elem) }
}

/// `(c, g)⁻¹ = (g⁻¹c, g⁻¹)`.
pub fn state_inverse<G: LampGround>(ground: &G, s: &LampState<G::Pos, G::Elem>) -> LampState<G::Pos, G::Elem> {
    let gi = ground.inverse(&s.elem);
    LampState { lamps: s.lamps.translate(ground, &gi), elem: gi }
}

/// `(E, g) F = E Δ gF`.
pub fn affine_act<G: LampGround>(ground: &G, s: &LampState<G::Pos, G::Elem>, f: &LampConfig<G::Pos>) -> LampConfig<G::Pos> {
    s.lamps.sym_diff(&f.translate(ground, &s.elem))
}

/// `ν̂ = ½(δ_∅ + δ_S) ∗ ν ∗ ½(δ_∅ + δ_S)`: atoms `(s₂ Δ g s₁, g)` with weight `ν(g)/4`.
pub fn sws_measure<G: LampGround, W: crate::weight::Weight>(
    ground: &G,
    nu: &Measure<G::Elem, W>,
    switch: &LampConfig<G::Pos>,
) -> Result<Measure<LampState<G::Pos, G::Elem>, W>> {
    let quarter = W::from_ratio(1, 4);
    let empty = LampConfig::empty();
    let mut atoms = Vec::with_capacity(4 * nu.len());
    for (g, w) in nu.iter() {
        let moved = switch.translate(ground, g);
        let w4 = w.mul(&quarter);
        for s2 in [&empty, switch] {
            for s1 in [&empty, &moved] {
                atoms.push((LampState { lamps: s2.sym_diff(s1), elem: g.clone() }, w4.clone()));
            }
        }
    }
    Measure::with_defect(atoms, nu.defect().clone())
}

/// Exact law of the left walk `ĝ_k = ĥ_k ĝ_{k-1}` after `n` steps.
pub fn lamp_walk_exact<G: LampGround>(
    ground: &G,
    hat: &Measure<LampState<G::Pos, G::Elem>, Rational>,
    n: usize,
    budget: u128,
) -> Result<Measure<LampState<G::Pos, G::Elem>, Rational>> {
    let need = BigUint::from(hat.len()).pow(n as u32);
    if need > BigUint::from(budget) {
        return Err(Error::resource(format!("lamp walk enumeration of {}^{n} paths", hat.len()), need, budget));
    }
    if !hat.defect().is_zero() {
        return Err(Error::Config("exact lamp walk needs a measure without defect".into()));
    }
    let ws: Vec<Rational> = hat.iter().map(|(_, w)| w.clone()).collect();
    let iw = IntWeights::new(&ws)?;
    let atoms: Vec<(&LampState<G::Pos, G::Elem>, u128)> = hat.support().zip(iw.numerators.iter().copied()).collect();
    let overflow = || Error::resource("exact lamp-walk weights", "more than 128 bits", "u128");
    let mut law: FxHashMap<LampState<G::Pos, G::Elem>, u128> = FxHashMap::default();
    law.insert(state_identity(ground), 1);
    for _ in 0..n {
        let mut next: FxHashMap<LampState<G::Pos, G::Elem>, u128> = FxHashMap::default();
        for (s, w) in &law {
            for (h, wh) in &atoms {
                let add = w.checked_mul(*wh).ok_or_else(overflow)?;
                let e = next.entry(state_mul(ground, h, s)).or_insert(0);
                *e = e.checked_add(add).ok_or_else(overflow)?;
            }
        }
        law = next;
    }
    let atoms: Vec<(LampState<G::Pos, G::Elem>, Rational)> =
        law.into_iter().map(|(s, c)| (s, over_power(c, &iw.denom, n as u32))).collect();
    Measure::new(atoms)
}

/// Seeded samples of `ĝ_n`, in chunk order.
pub fn lamp_walk_samples<G: LampGround>(
    ground: &G,
    hat: &Measure<LampState<G::Pos, G::Elem>, Rational>,
    n: usize,
    plan: &McPlan,
) -> Result<Vec<LampState<G::Pos, G::Elem>>> {
    let sampler = Sampler::new(hat)?;
    let parts = plan.run(|rng, count| {
        (0..count)
            .map(|_| {
                let mut s = state_identity(ground);
                for _ in 0..n {
                    s = state_mul(ground, sampler.sample(rng), &s);
                }
                s
            })
            .collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub mode: Mode,
    /// `P(c_n = ∅)` from the lamp walk with switch `{x}`.
    pub lamp_side: Estimate,
    /// `E 2^{-|O_n(x)|}` from the inverted-orbit enumeration.
    pub orbit_side: Estimate,
    pub holds: bool,
}

/// `E 2^{-|O_n(x)|}` over the sites a lamp walk of length n has switched: none at n = 0.
fn switched_two_pow<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n: usize,
    budget: u128,
) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::one());
    }
    size_law(a, nu, x, n, budget, Convention::Inverted)?.two_pow()
}

/// `P(c_n = ∅) = E 2^{-|O_n(x)|}` for the walk with switch `{x}`.
pub fn lamp_orbit_identity_check<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n: usize,
    mode: Mode,
    plan: &McPlan,
    budget: u128,
) -> Result<IdentityReport> {
    let ground = PointLamps(a);
    let hat = sws_measure(&ground, nu, &LampConfig::singleton(x.clone()))?;
    let orbit = switched_two_pow(a, nu, x, n, budget)?;
    match mode {
        Mode::Exact => {
            let law = lamp_walk_exact(&ground, &hat, n, budget)?;
            let lamp = law.mass_where(|s| s.lamps.is_empty());
            let holds = lamp == orbit;
            if !holds {
                return Err(Error::InvariantViolation(format!(
                    "P(c_n = ∅) = {lamp} but E 2^-|O_n| = {orbit} at n = {n}"
                )));
            }
            Ok(IdentityReport { n, mode, lamp_side: Estimate::exact(&lamp), orbit_side: Estimate::exact(&orbit), holds })
        }
        Mode::MonteCarlo => {
            let samples = lamp_walk_samples(&ground, &hat, n, plan)?;
            let hits = samples.iter().filter(|s| s.lamps.is_empty()).count() as u64;
            let lamp = Estimate::proportion(hits, samples.len() as u64);
            let orbit = Estimate::exact(&orbit);
            let sigma = (orbit.value * (1.0 - orbit.value) / samples.len() as f64).sqrt();
            let holds = (lamp.value - orbit.value).abs() <= 3.0 * sigma + 1e-12;
            Ok(IdentityReport { n, mode, lamp_side: lamp, orbit_side: orbit, holds })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub n: usize,
    pub eps: String,
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// `rhs − lhs`.
    pub margin: Estimate,
    pub holds: bool,
}

fn inequality(n: usize, eps: &Rational, lhs: Rational, rhs: Rational) -> Result<InequalityReport> {
    let holds = lhs <= rhs;
    let margin = &rhs - &lhs;
    let r = InequalityReport {
        n,
        eps: format_rational(eps),
        lhs: Estimate::exact(&lhs),
        rhs: Estimate::exact(&rhs),
        margin: Estimate::exact(&margin),
        holds,
    };
    if !holds {
        return Err(Error::InvariantViolation(format!("inequality fails: lhs {lhs} > rhs {rhs} (n = {n}, eps = {eps})")));
    }
    Ok(r)
}

/// Exact law of `ĝ_n` on `C_R ⋊ [R]` with switch `I`.
pub fn relation_lamp_law(
    space: &Arc<FiniteRelationSpace>,
    nu: &Measure<Perm, Rational>,
    n: usize,
    budget: u128,
) -> Result<Measure<RelState, Rational>> {
    let ground = RelationLamps::new(space.clone());
    let action = FullGroupAction::new(space.clone());
    for g in nu.support() {
        action.validate_elem(g)?;
    }
    let hat = sws_measure(&ground, nu, &ground.diagonal())?;
    lamp_walk_exact(&ground, &hat, n, budget)
}

/// `Σ_x μ(x) · f(x)` with `f` evaluated on every point.
fn mu_average(space: &FiniteRelationSpace, f: impl Fn(u32) -> Result<Rational>) -> Result<Rational> {
    let mut s = Rational::zero();
    for x in 0..space.len() as u32 {
        s += space.weight(x) * f(x)?;
    }
    Ok(s)
}

/// `(1−ε) P(d_C(c_n, ∅) < ε) ≤ Σ_x μ(x) E 2^{-|O_n(x)|}`.
pub fn thm1_inequality(
    space: &Arc<FiniteRelationSpace>,
    nu: &Measure<Perm, Rational>,
    eps: &Rational,
    n: usize,
    budget: u128,
) -> Result<InequalityReport> {
    if !(eps > &Rational::zero() && eps < &Rational::one()) {
        return Err(Error::Domain(format!("need 0 < eps < 1, got {eps}")));
    }
    let law = relation_lamp_law(space, nu, n, budget)?;
    let p = law.mass_where(|s| &space.lamp_mass(s.lamps.iter()) < eps);
    let lhs = (Rational::one() - eps) * p;
    let action = FullGroupAction::new(space.clone());
    let rhs = mu_average(space, |x| switched_two_pow(&action, nu, &x, n, budget))?;
    inequality(n, eps, lhs, rhs)
}

/// `e^{-t}` evaluated in `f64` and rounded one ulp up, as an exact rational.
pub fn exp_neg_upper(t: f64) -> Rational {
    let v = (-t).exp().next_up();
    Rational::from_float(v).expect("finite exponential")
}

/// `½ P(d_C(c_n, ∅) < εn/2) − e^{-εn/2} ≤ Σ_x μ(x) P(|O_n(x)| ≤ 4εn)`; the exponential is rounded up.
pub fn thm2_inequality(
    space: &Arc<FiniteRelationSpace>,
    nu: &Measure<Perm, Rational>,
    eps: &Rational,
    n: usize,
    budget: u128,
) -> Result<InequalityReport> {
    if eps <= &Rational::zero() {
        return Err(Error::Domain(format!("need eps > 0, got {eps}")));
    }
    let law = relation_lamp_law(space, nu, n, budget)?;
    let half_en = eps * BigInt::from(n) / BigInt::from(2);
    let p = law.mass_where(|s| space.lamp_mass(s.lamps.iter()) < half_en);
    let lhs = p / BigInt::from(2) - exp_neg_upper(crate::weight::rational_to_f64(&half_en));
    let four_eps = eps * BigInt::from(4);
    let action = FullGroupAction::new(space.clone());
    let rhs = mu_average(space, |x| {
        if n == 0 {
            return Ok(Rational::one());
        }
        size_law(&action, nu, &x, n, budget, Convention::Inverted)?.prob_within(&four_eps)
    })?;
    inequality(n, eps, lhs, rhs)
}

/// Per-row form of the lamp identity on `C_R`: `P(row x of c_n = ∅) = E 2^{-|O_n(x)|}` for every x.
pub fn relation_row_identity(
    space: &Arc<FiniteRelationSpace>,
    nu: &Measure<Perm, Rational>,
    n: usize,
    budget: u128,
) -> Result<Vec<(Rational, Rational)>> {
    let law = relation_lamp_law(space, nu, n, budget)?;
    let action = FullGroupAction::new(space.clone());
    (0..space.len() as u32)
        .map(|x| {
            let lamp = law.mass_where(|s| s.lamps.iter().all(|&(r, _)| r != x));
            let orbit = switched_two_pow(&action, nu, &x, n, budget)?;
            Ok((lamp, orbit))
        })
        .collect()
}

/// `P(Bin(k, ½) < t)` exactly.
pub fn binomial_half_below(k: u64, t: &Rational) -> Rational {
    let mut s = BigInt::zero();
    let mut c = BigInt::one();
    for j in 0..=k {
        if Rational::from_integer(BigInt::from(j)) >= *t {
            break;
        }
        s += &c;
        c = c * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    Rational::new(s, BigInt::one() << k as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbLemmaReport {
    pub n: u64,
    pub eps: String,
    /// `P(Y < εn)` with `Y ~ Bin(X, ½)`.
    pub y_tail: Estimate,
    /// `P(X < 4εn)`.
    pub x_tail: Estimate,
    /// Upward-rounded `e^{-εn/2}`.
    pub exp_term: Estimate,
    pub margin: Estimate,
    pub holds: bool,
}

/// `P(Y < εn) ≤ P(X < 4εn) + e^{-εn/2}`; `dist[k-1] = P(X = k)` for `k = 1..=n+1`.
pub fn problemma_check(n: u64, eps: &Rational, dist: &[Rational]) -> Result<ProbLemmaReport> {
    if dist.len() as u64 != n + 1 {
        return Err(Error::Domain(format!("distribution has {} entries, expected {}", dist.len(), n + 1)));
    }
    if dist.iter().any(|p| p < &Rational::zero()) || dist.iter().sum::<Rational>() != Rational::one() {
        return Err(Error::Domain("distribution must be a probability vector".into()));
    }
    let en = eps * BigInt::from(n);
    let four_en = &en * BigInt::from(4);
    let mut y = Rational::zero();
    let mut x = Rational::zero();
    for (i, p) in dist.iter().enumerate() {
        let k = i as u64 + 1;
        y += p * binomial_half_below(k, &en);
        if Rational::from_integer(BigInt::from(k)) < four_en {
            x += p;
        }
    }
    let e = exp_neg_upper(crate::weight::rational_to_f64(&en) / 2.0);
    let margin = &x + &e - &y;
    let holds = margin >= Rational::zero();
    let r = ProbLemmaReport {
        n,
        eps: format_rational(eps),
        y_tail: Estimate::exact(&y),
        x_tail: Estimate::exact(&x),
        exp_term: Estimate::exact(&e),
        margin: Estimate::exact(&margin),
        holds,
    };
    if !holds {
        return Err(Error::InvariantViolation(format!("binomial tail bound fails at n = {n}, eps = {eps}: {r:?}")));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub r: String,
    pub vacuous: bool,
    pub found: bool,
    /// Group part in cycle notation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_mass: Option<String>,
    /// Lamp configuration `c` as `(x, y)` pairs.
    pub c: Vec<(u32, u32)>,
    /// `d_C(c, g c)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacement: Option<String>,
    /// Lower bound on the lamp distance of any conjugate `(c,id) s (c,id)` with `s` in the `r`-ball and group part `g`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugate_lamp_lower_bound: Option<String>,
    /// The conjugated ball misses every state within `r` of the identity with group part `g`.
    pub separated: bool,
    pub note: String,
}

/// Smallest-support element of the generated group with `μ(supp g) < r`, and the lamp
/// configuration `c` with one lamp per row inside `supp g` that the conjugation argument uses.
pub fn sin_defect_witness(space: &Arc<FiniteRelationSpace>, r: &Rational, group_budget: usize) -> Result<WitnessReport> {
    let mut rep = WitnessReport {
        r: format_rational(r),
        vacuous: false,
        found: false,
        g: None,
        support_mass: None,
        c: vec![],
        displacement: None,
        conjugate_lamp_lower_bound: None,
        separated: false,
        note: String::new(),
    };
    if r <= &Rational::zero() {
        return Err(Error::Domain(format!("need r > 0, got {r}")));
    }
    if r >= &Rational::one() {
        rep.vacuous = true;
        rep.note = "r ≥ 1: the conjugate bound 2 − r no longer exceeds r, nothing to separate".into();
        return Ok(rep);
    }
    let action = FullGroupAction::new(space.clone());
    let gens: Vec<Perm> = action.symmetric_generators().into_iter().map(|g| action.generator(g)).collect::<Result<_>>()?;
    let id = Perm::identity(space.len());
    let mut seen: rustc_hash::FxHashSet<Perm> = [id.clone()].into_iter().collect();
    let mut frontier = vec![id.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let h = g.compose(s);
                if seen.insert(h.clone()) {
                    if seen.len() > group_budget {
                        return Err(Error::resource("generated permutation group", format!("more than {group_budget} elements"), group_budget));
                    }
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let mut elems: Vec<Perm> = seen.into_iter().filter(|g| *g != id).collect();
    elems.sort();
    let best = elems
        .iter()
        .map(|g| (space.mass(g.support().iter()), g))
        .filter(|(m, _)| m < r)
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let Some((mass, g)) = best else {
        rep.note = "no element of the generated group has support mass below r; enlarge the generating set".into();
        return Ok(rep);
    };
    let support = g.support();
    // One lamp per row, placed at a moved point of the row's class.
    let c: Vec<(u32, u32)> = (0..space.len() as u32)
        .filter_map(|x| support.iter().find(|&&y| space.related(x, y)).map(|&y| (x, y)))
        .collect();
    let ground = RelationLamps::new(space.clone());
    let cfg = LampConfig::from_iter(c.iter().copied());
    let moved = cfg.translate(&ground, g);
    let displacement = ground.d_c(&cfg, &moved);
    // (c,id)(s,g)(c,id) = (c Δ s Δ gc, g): its lamp distance to ∅ is at least d_C(c, gc) − d_C(s, ∅).
    let lower = &displacement - r;
    rep.found = true;
    rep.g = Some(g.to_string());
    rep.support_mass = Some(format_rational(&mass));
    rep.c = c;
    rep.separated = lower >= *r;
    rep.displacement = Some(format_rational(&displacement));
    rep.conjugate_lamp_lower_bound = Some(format_rational(&lower));
    rep.note = if displacement == Rational::from_integer(BigInt::from(2)) {
        "every row meets supp g; displacement is 2".into()
    } else {
        "some classes avoid supp g; displacement is twice the mass of the classes that meet it".into()
    };
    Ok(rep)
}

/// Lamp part of `(c, id)(s, g)(c, id)`.
pub fn conjugate_lamps(
    ground: &RelationLamps,
    c: &LampConfig<(u32, u32)>,
    s: &RelState,
) -> LampConfig<(u32, u32)> {
    let cs = LampState { lamps: c.clone(), elem: ground.identity() };
    state_mul(ground, &state_mul(ground, &cs, s), &cs).lamps
}

/// `P(d_C(c_n, ∅) < t)` given the exact law.
pub fn lamp_mass_below(space: &FiniteRelationSpace, law: &Measure<RelState, Rational>, t: &Rational) -> Rational {
    law.mass_where(|s| &space.lamp_mass(s.lamps.iter()) < t)
}


/// Twenty distributions on `{1, …, n+1}`: nineteen tilted binomials
/// `P(X = k) ∝ C(n, k−1) (j/10)^{k−1}` for `j = 1..=19`, and the uniform law.
pub fn problemma_grid(n: u64) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(20);
    let mut binom = vec![BigInt::one()];
    for i in 0..n {
        let last = binom.last().expect("nonempty").clone();
        binom.push(last * BigInt::from(n - i) / BigInt::from(i + 1));
    }
    for j in 1..=19i64 {
        let ratio = Rational::new(BigInt::from(j), BigInt::from(10));
        let mut w = Vec::with_capacity(binom.len());
        let mut pow = Rational::one();
        for c in &binom {
            w.push(Rational::from_integer(c.clone()) * &pow);
            pow *= &ratio;
        }
        let total: Rational = w.iter().sum();
        out.push(w.into_iter().map(|v| v / &total).collect());
    }
    out.push(vec![Rational::new(BigInt::one(), BigInt::from(n + 1)); n as usize + 1]);
    out
}
