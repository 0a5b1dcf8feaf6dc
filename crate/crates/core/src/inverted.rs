//! Inverted orbits `O_h(x) = {x, h_n x, h_n h_{n-1} x, …, h_n⋯h_1 x}` and their statistics.
//!
//! For i.i.d. increments the relabelling `s_k = h_{n+1-k}` gives the same law as
//! `{x, s_1 x, s_1 s_2 x, …}`, which grows by right multiplication. Exact enumeration, the
//! small-orbit DP and Monte Carlo all use that form, so one sampled path serves every `n`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::action::{ActionOracle, GroupWord};
use crate::error::{Error, Result};
use crate::mc::{McPlan, Sampler};
use crate::measure::{is_symmetric, Measure};
use crate::stats::Estimate;
use crate::weight::{format_rational, over_power, ratio, IntWeights, Rational};

/// Default cap on the number of increment sequences an exact enumeration may visit.
pub const DEFAULT_EXACT_BUDGET: u128 = 1 << 26;

pub fn default_eps_grid() -> Vec<Rational> {
    vec![ratio(1, 16), ratio(1, 8), ratio(1, 4), ratio(1, 2)]
}

#[derive(Clone, Debug)]
pub struct InvertedOrbit<P> {
    pub origin: P,
    pub n: usize,
    pub points: FxHashSet<P>,
}

impl<P> InvertedOrbit<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` multiplications and `n` point applications.
pub fn inverted_orbit<A: ActionOracle + ?Sized>(a: &A, h: &[A::Elem], x: &A::Point) -> InvertedOrbit<A::Point> {
    let mut points = FxHashSet::default();
    points.insert(x.clone());
    let mut c = a.identity();
    for hk in h.iter().rev() {
        c = a.mul(&c, hk);
        points.insert(a.act(&c, x));
    }
    InvertedOrbit { origin: x.clone(), n: h.len(), points }
}

pub fn inverted_orbit_words<A: ActionOracle + ?Sized>(
    a: &A,
    h: &[GroupWord],
    x: &A::Point,
) -> Result<InvertedOrbit<A::Point>> {
    let elems: Vec<A::Elem> = h.iter().map(|w| w.evaluate(a)).collect::<Result<_>>()?;
    Ok(inverted_orbit(a, &elems, x))
}

/// The alternative form `{x, g_1⁻¹x, …, g_n⁻¹x}` with `g_k = h_k g_{k-1}`.
pub fn walk_inverse_orbit<A: ActionOracle + ?Sized>(a: &A, h: &[A::Elem], x: &A::Point) -> InvertedOrbit<A::Point> {
    let mut points = FxHashSet::default();
    points.insert(x.clone());
    let mut d = a.identity();
    for hk in h {
        d = a.mul(&d, &a.inverse(hk));
        points.insert(a.act(&d, x));
    }
    InvertedOrbit { origin: x.clone(), n: h.len(), points }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Inverted,
    WalkInverse,
}

/// `floor(ε n)`, the largest orbit size counted by `P(|O_n| ≤ ε n)`; zero for negative ε.
pub fn threshold(eps: &Rational, n: usize) -> u64 {
    if eps < &Rational::zero() {
        return 0;
    }
    (eps * BigInt::from(n)).floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Exact law of `|O_n(x)|`: `counts[k] / step_denom^n = P(|O_n| = k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeLaw {
    pub n: usize,
    pub step_denom: BigUint,
    pub counts: Vec<u128>,
    /// False when sizes above `counts.len() - 1` were pruned.
    pub complete: bool,
}

impl SizeLaw {
    pub fn prob(&self, k: usize) -> Rational {
        over_power(self.counts.get(k).copied().unwrap_or(0), &self.step_denom, self.n as u32)
    }

    /// Total probability; one for a complete law.
    pub fn total(&self) -> Rational {
        let s: u128 = self.counts.iter().sum();
        over_power(s, &self.step_denom, self.n as u32)
    }

    pub fn prob_at_most(&self, k: u64) -> Result<Rational> {
        if !self.complete && k >= self.counts.len() as u64 {
            return Err(Error::Domain(format!("size law was pruned above {}", self.counts.len() - 1)));
        }
        let s: u128 = self.counts.iter().take((k as usize).saturating_add(1)).sum();
        Ok(over_power(s, &self.step_denom, self.n as u32))
    }

    pub fn prob_within(&self, eps: &Rational) -> Result<Rational> {
        self.prob_at_most(threshold(eps, self.n))
    }

    fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::Domain("statistic needs the complete size law".into()))
        }
    }

    pub fn mean_size(&self) -> Result<Rational> {
        self.require_complete()?;
        let mut s = Rational::zero();
        for k in 0..self.counts.len() {
            s += self.prob(k) * BigInt::from(k);
        }
        Ok(s)
    }

    /// `E 2^{-|O_n|}`.
    pub fn two_pow(&self) -> Result<Rational> {
        self.require_complete()?;
        let mut s = Rational::zero();
        for k in 0..self.counts.len() {
            s += self.prob(k) / BigInt::from(BigUint::from(1u8) << k);
        }
        Ok(s)
    }
}

fn int_atoms<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    convention: Convention,
) -> Result<(Vec<(A::Elem, u128)>, BigUint)> {
    if !nu.defect().is_zero() {
        return Err(Error::Config("exact enumeration needs a measure without truncation defect".into()));
    }
    let ws: Vec<Rational> = nu.iter().map(|(_, w)| w.clone()).collect();
    let iw = IntWeights::new(&ws)?;
    let atoms = nu
        .support()
        .zip(iw.numerators)
        .map(|(g, w)| {
            let g = match convention {
                Convention::Inverted => g.clone(),
                Convention::WalkInverse => a.inverse(g),
            };
            (g, w)
        })
        .collect();
    Ok((atoms, iw.denom))
}

fn check_budget(support: usize, n: usize, budget: u128) -> Result<()> {
    let need = BigUint::from(support).pow(n as u32);
    if need > BigUint::from(budget) {
        return Err(Error::resource(format!("exact enumeration of {support}^{n} increment sequences"), need, budget));
    }
    Ok(())
}

struct Dfs<'a, A: ActionOracle + ?Sized> {
    a: &'a A,
    x: &'a A::Point,
    atoms: &'a [(A::Elem, u128)],
    seen: FxHashMap<A::Point, u32>,
    hist: Vec<u128>,
    overflow: bool,
}

impl<A: ActionOracle + ?Sized> Dfs<'_, A> {
    fn go(&mut self, c: &A::Elem, weight: u128, left: usize) {
        if left == 0 {
            let k = self.seen.len();
            match self.hist[k].checked_add(weight) {
                Some(v) => self.hist[k] = v,
                None => self.overflow = true,
            }
            return;
        }
        for (s, w) in self.atoms {
            let Some(weight) = weight.checked_mul(*w) else {
                self.overflow = true;
                return;
            };
            let c2 = self.a.mul(c, s);
            let p = self.a.act(&c2, self.x);
            *self.seen.entry(p.clone()).or_insert(0) += 1;
            self.go(&c2, weight, left - 1);
            let e = self.seen.get_mut(&p).expect("pushed point");
            *e -= 1;
            if *e == 0 {
                self.seen.remove(&p);
            }
        }
    }
}

/// Exact law of `|O_n(x)|` by weighted enumeration of all increment sequences.
pub fn size_law<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n: usize,
    budget: u128,
    convention: Convention,
) -> Result<SizeLaw> {
    check_budget(nu.len(), n, budget)?;
    let (atoms, denom) = int_atoms(a, nu, convention)?;
    let mut dfs = Dfs { a, x, atoms: &atoms, seen: FxHashMap::default(), hist: vec![0; n + 2], overflow: false };
    dfs.seen.insert(x.clone(), 1);
    dfs.go(&a.identity(), 1, n);
    if dfs.overflow {
        return Err(Error::resource("exact path weights", "more than 128 bits", "u128"));
    }
    Ok(SizeLaw { n, step_denom: denom, counts: dfs.hist, complete: true })
}

/// Exact `P(|O_n(x)| = k)` for `k ≤ kmax`, merging paths by (visited set, running composite).
///
/// Only paths whose orbit stays within `kmax` points are followed, so the cost is governed by the
/// number of small configurations rather than by `|supp ν|^n`.
pub fn small_orbit_law<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n: usize,
    kmax: usize,
    state_budget: usize,
) -> Result<SizeLaw> {
    let (atoms, denom) = int_atoms(a, nu, Convention::Inverted)?;
    let mut states: FxHashMap<(Vec<A::Point>, A::Elem), u128> = FxHashMap::default();
    if kmax >= 1 {
        states.insert((vec![x.clone()], a.identity()), 1);
    }
    for _ in 0..n {
        let mut next: FxHashMap<(Vec<A::Point>, A::Elem), u128> = FxHashMap::default();
        for ((visited, c), w) in &states {
            for (s, ws) in &atoms {
                let c2 = a.mul(c, s);
                let p = a.act(&c2, x);
                let v2 = match visited.binary_search(&p) {
                    Ok(_) => visited.clone(),
                    Err(i) if visited.len() < kmax => {
                        let mut v = visited.clone();
                        v.insert(i, p);
                        v
                    }
                    Err(_) => continue,
                };
                let add = w
                    .checked_mul(*ws)
                    .ok_or_else(|| Error::resource("exact path weights", "more than 128 bits", "u128"))?;
                let e = next.entry((v2, c2)).or_insert(0);
                *e = e.checked_add(add).ok_or_else(|| Error::resource("exact path weights", "more than 128 bits", "u128"))?;
            }
        }
        if next.len() > state_budget {
            return Err(Error::resource("small-orbit states", next.len(), state_budget));
        }
        states = next;
    }
    let mut counts = vec![0u128; kmax + 1];
    for ((visited, _), w) in states {
        counts[visited.len()] += w;
    }
    let complete = kmax > n;
    Ok(SizeLaw { n, step_denom: denom, counts, complete })
}

/// Per-checkpoint histograms of `|O_n(x)|` from one batch of sampled paths.
pub fn mc_size_histograms<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    checkpoints: &[usize],
    plan: &McPlan,
) -> Result<Vec<Vec<u64>>> {
    let sampler = Sampler::new(nu)?;
    let nmax = checkpoints.iter().copied().max().unwrap_or(0);
    let parts = plan.run(|rng, count| {
        let mut hist: Vec<Vec<u64>> = checkpoints.iter().map(|&n| vec![0u64; n + 2]).collect();
        let mut seen: FxHashSet<A::Point> = FxHashSet::default();
        for _ in 0..count {
            seen.clear();
            seen.insert(x.clone());
            let mut c = a.identity();
            let mut next_cp = 0;
            for step in 0..=nmax {
                if step > 0 {
                    c = a.mul(&c, sampler.sample(rng));
                    seen.insert(a.act(&c, x));
                }
                while next_cp < checkpoints.len() && checkpoints[next_cp] == step {
                    hist[next_cp][seen.len()] += 1;
                    next_cp += 1;
                }
            }
        }
        hist
    });
    let mut out: Vec<Vec<u64>> = checkpoints.iter().map(|&n| vec![0u64; n + 2]).collect();
    for part in parts {
        for (o, p) in out.iter_mut().zip(part) {
            for (a, b) in o.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TailEstimate {
    pub eps: String,
    pub threshold: u64,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitStatistics {
    pub n: usize,
    pub samples: u64,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mean_size: Estimate,
    pub two_pow: Estimate,
    pub tail: Vec<TailEstimate>,
}

impl OrbitStatistics {
    pub fn from_law(law: &SizeLaw, eps_grid: &[Rational]) -> Result<Self> {
        let tail = eps_grid
            .iter()
            .map(|e| {
                Ok(TailEstimate {
                    eps: format_rational(e),
                    threshold: threshold(e, law.n),
                    estimate: Estimate::exact(&law.prob_within(e)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(OrbitStatistics {
            n: law.n,
            samples: 0,
            mode: Mode::Exact,
            seed: None,
            mean_size: Estimate::exact(&law.mean_size()?),
            two_pow: Estimate::exact(&law.two_pow()?),
            tail,
        })
    }

    pub fn from_histogram(n: usize, hist: &[u64], eps_grid: &[Rational], plan: &McPlan) -> Self {
        let total: u64 = hist.iter().sum();
        let (mut s1, mut s2, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0);
        for (k, &c) in hist.iter().enumerate() {
            let c = c as f64;
            let k2 = 2f64.powi(-(k as i32));
            s1 += c * k as f64;
            s2 += c * (k * k) as f64;
            t1 += c * k2;
            t2 += c * k2 * k2;
        }
        let tail = eps_grid
            .iter()
            .map(|e| {
                let th = threshold(e, n);
                let hits: u64 = hist.iter().take((th as usize).saturating_add(1)).sum();
                TailEstimate { eps: format_rational(e), threshold: th, estimate: Estimate::proportion(hits, total) }
            })
            .collect();
        OrbitStatistics {
            n,
            samples: total,
            mode: Mode::MonteCarlo,
            seed: Some(plan.seed),
            mean_size: Estimate::from_sums(s1, s2, total),
            two_pow: Estimate::from_sums(t1, t2, total),
            tail,
        }
    }
}

/// Statistics of `|O_n(x)|` at each `n` in `ns`; MC mode reuses one batch of paths for all `n`.
pub fn orbit_statistics_series<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    ns: &[usize],
    eps_grid: &[Rational],
    mode: Mode,
    plan: &McPlan,
    budget: u128,
) -> Result<Vec<OrbitStatistics>> {
    if !is_symmetric(a, nu) {
        return Err(Error::Config("inverted-orbit statistics need a symmetric measure".into()));
    }
    match mode {
        Mode::Exact => ns
            .iter()
            .map(|&n| OrbitStatistics::from_law(&size_law(a, nu, x, n, budget, Convention::Inverted)?, eps_grid))
            .collect(),
        Mode::MonteCarlo => {
            if plan.samples == 0 {
                return Err(Error::Config("Monte Carlo mode needs a positive sample count".into()));
            }
            let hists = mc_size_histograms(a, nu, x, ns, plan)?;
            Ok(ns
                .iter()
                .zip(&hists)
                .map(|(&n, h)| OrbitStatistics::from_histogram(n, h, eps_grid, plan))
                .collect())
        }
    }
}

pub fn orbit_statistics<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n: usize,
    eps_grid: &[Rational],
    mode: Mode,
    plan: &McPlan,
    budget: u128,
) -> Result<OrbitStatistics> {
    Ok(orbit_statistics_series(a, nu, x, &[n], eps_grid, mode, plan, budget)?.remove(0))
}

/// CSV rows `n,statistic,value,stderr`.
pub fn write_series_csv<W: std::io::Write>(series: &[OrbitStatistics], mut w: W) -> Result<()> {
    writeln!(w, "n,statistic,value,stderr")?;
    for s in series {
        writeln!(w, "{},mean_size,{},{}", s.n, s.mean_size.value, s.mean_size.stderr)?;
        writeln!(w, "{},two_pow,{},{}", s.n, s.two_pow.value, s.two_pow.stderr)?;
        for t in &s.tail {
            writeln!(w, "{},tail_{},{},{}", s.n, t.eps, t.estimate.value, t.estimate.stderr)?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct FeketeRow {
    pub n: usize,
    pub m: usize,
    pub eps: String,
    pub joint: Estimate,
    pub product: Estimate,
    pub holds: bool,
}

/// `P(|O_{n+m}| ≤ ε(n+m)) ≥ P(|O_n| ≤ εn) P(|O_m| ≤ εm)` per pair; exact or within 3σ.
pub fn fekete_check<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    eps: &Rational,
    pairs: &[(usize, usize)],
    mode: Mode,
    plan: &McPlan,
    budget: u128,
) -> Result<Vec<FeketeRow>> {
    let mut ns: Vec<usize> = pairs.iter().flat_map(|&(n, m)| [n, m, n + m]).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    match mode {
        Mode::Exact => {
            let laws: FxHashMap<usize, SizeLaw> = ns
                .iter()
                .map(|&n| Ok((n, size_law(a, nu, x, n, budget, Convention::Inverted)?)))
                .collect::<Result<_>>()?;
            for &(n, m) in pairs {
                let joint = laws[&(n + m)].prob_within(eps)?;
                let product = laws[&n].prob_within(eps)? * laws[&m].prob_within(eps)?;
                rows.push(FeketeRow {
                    n,
                    m,
                    eps: format_rational(eps),
                    holds: joint >= product,
                    joint: Estimate::exact(&joint),
                    product: Estimate::exact(&product),
                });
            }
        }
        Mode::MonteCarlo => {
            let grid = [eps.clone()];
            let stats = orbit_statistics_series(a, nu, x, &ns, &grid, mode, plan, budget)?;
            let at = |n: usize| stats.iter().find(|s| s.n == n).expect("checkpoint").tail[0].estimate.clone();
            for &(n, m) in pairs {
                let (j, p, q) = (at(n + m), at(n), at(m));
                let prod = p.value * q.value;
                let se = (q.value * p.stderr).hypot(p.value * q.stderr);
                let tol = 3.0 * (j.stderr.hypot(se));
                rows.push(FeketeRow {
                    n,
                    m,
                    eps: format_rational(eps),
                    holds: j.value + tol >= prod,
                    joint: j,
                    product: Estimate::mc(prod, se),
                });
            }
        }
    }
    if let Some(r) = rows.iter().find(|r| !r.holds && mode == Mode::Exact) {
        return Err(Error::InvariantViolation(format!(
            "supermultiplicativity fails at (n, m) = ({}, {}), eps = {}",
            r.n, r.m, r.eps
        )));
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub size_h: usize,
    pub size_t: usize,
    pub size_concat: usize,
    pub set_identity_holds: bool,
    pub inequality_holds: bool,
}

/// Checks `O_{(h,t)}(x) = O_t(x) ∪ t_m⋯t_1 O_h(x)` and `|O_{(h,t)}| ≤ |O_h| + |O_t|`.
pub fn subadditivity_check<A: ActionOracle + ?Sized>(
    a: &A,
    h: &[A::Elem],
    t: &[A::Elem],
    x: &A::Point,
) -> Result<SubadditivityReport> {
    let oh = inverted_orbit(a, h, x);
    let ot = inverted_orbit(a, t, x);
    let concat: Vec<A::Elem> = h.iter().chain(t).cloned().collect();
    let oht = inverted_orbit(a, &concat, x);
    let mut tm = a.identity();
    for tk in t.iter().rev() {
        tm = a.mul(&tm, tk);
    }
    let mut union = ot.points.clone();
    union.extend(oh.points.iter().map(|p| a.act(&tm, p)));
    let r = SubadditivityReport {
        size_h: oh.len(),
        size_t: ot.len(),
        size_concat: oht.len(),
        set_identity_holds: union == oht.points,
        inequality_holds: oht.len() <= oh.len() + ot.len(),
    };
    if !(r.set_identity_holds && r.inequality_holds) {
        return Err(Error::InvariantViolation(format!("inverted-orbit subadditivity fails: {r:?}")));
    }
    Ok(r)
}
