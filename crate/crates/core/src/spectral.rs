//! Return probabilities, spectral-radius estimators, edge expansion and linear-radius decay.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::action::{ActionOracle, FiniteRelationSpace, LampElem, Perm};
use crate::lamplighter::{lamp_walk_samples, relation_lamp_law, state_identity, sws_measure, RelationLamps};
use crate::mc::{McPlan, Sampler};
use crate::measure::{convolve, is_lazy, is_symmetric, srw, step, Measure};
use crate::stats::{decay_classify, DecayPoint, DecayRateEstimate, Estimate};
use crate::weight::{format_rational, rational_to_f64, Rational};
use crate::{Error, Result};

pub const DEFAULT_SUPPORT_BUDGET: usize = 1 << 22;

/// Default `n` grid for linear-radius decay.
pub const DEFAULT_RADIUS_GRID: [u64; 5] = [25, 50, 100, 200, 400];

/// `(k, q)` when `ν = (1 − q)·SRW + q·δ_id` on a free group of rank `k`.
pub fn free_chain_parameters<A: ActionOracle + ?Sized>(a: &A, nu: &Measure<A::Elem, Rational>) -> Option<(usize, Rational)> {
    let k = a.free_rank()?;
    if !nu.defect().is_zero() {
        return None;
    }
    let q = nu.get(&a.identity());
    if q >= Rational::one() {
        return Some((k, q));
    }
    let step: Measure<A::Elem, Rational> = srw(a).ok()?;
    let scale = Rational::one() - &q;
    let off = nu.len() - usize::from(q > Rational::zero());
    (off == step.len() && step.iter().all(|(g, w)| nu.get(g) == w * &scale)).then_some((k, q))
}

/// Law of the distance from the identity of the `(k, q)` walk on a free group, at each `n ≤ n_max`.
///
/// Off zero the distance moves up with probability `(1−q)(2k−1)/2k`, down with `(1−q)/2k`, and
/// holds with `q`; from zero it leaves with `1 − q`.
pub fn free_distance_laws(k: usize, hold: &Rational, n_max: usize) -> Vec<Vec<Rational>> {
    let move_p = Rational::one() - hold;
    let up = &move_p * Rational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k));
    let down = &move_p * Rational::new(BigInt::one(), BigInt::from(2 * k));
    let mut laws = Vec::with_capacity(n_max + 1);
    let mut cur = vec![Rational::one()];
    laws.push(cur.clone());
    for _ in 0..n_max {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (d, w) in cur.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            next[d] += w * hold;
            if d == 0 {
                next[1] += w * &move_p;
            } else {
                next[d + 1] += w * &up;
                next[d - 1] += w * &down;
            }
        }
        while next.len() > 1 && next.last().is_some_and(|w| w.is_zero()) {
            next.pop();
        }
        laws.push(next.clone());
        cur = next;
    }
    laws
}

/// Exact `p_n(x, x)` for `n = 0..=n_max` by evolving the law of the walk on the orbit.
pub fn return_probabilities<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n_max: usize,
    budget: usize,
) -> Result<Vec<Rational>> {
    if let Some((k, q)) = free_chain_parameters(a, nu) {
        if *x == a.base_point() {
            return Ok(free_distance_laws(k, &q, n_max).into_iter().map(|l| l[0].clone()).collect());
        }
    }
    let mut law = Measure::dirac(x.clone());
    let mut out = vec![Rational::one()];
    for n in 1..=n_max {
        law = step(a, &law, nu, None)?;
        if law.len() > budget {
            return Err(Error::resource(format!("orbit law support at n = {n}"), law.len(), budget));
        }
        out.push(law.get(x));
    }
    Ok(out)
}

/// Monte Carlo `p_n(x, x)` at each checkpoint.
pub fn return_probabilities_mc<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    checkpoints: &[usize],
    plan: &McPlan,
) -> Result<Vec<Estimate>> {
    let sampler = Sampler::new(nu)?;
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); last + 1];
    for (i, &c) in checkpoints.iter().enumerate() {
        slots[c].push(i);
    }
    let parts = plan.run(|rng, count| {
        let mut hits = vec![0u64; checkpoints.len()];
        for _ in 0..count {
            let mut y = x.clone();
            for (n, slot) in slots.iter().enumerate() {
                if n > 0 {
                    y = a.act(sampler.sample(rng), &y);
                }
                if y == *x {
                    for &i in slot {
                        hits[i] += 1;
                    }
                }
            }
        }
        hits
    });
    let mut hits = vec![0u64; checkpoints.len()];
    for p in parts {
        for (h, v) in hits.iter_mut().zip(p) {
            *h += v;
        }
    }
    Ok(hits.into_iter().map(|h| Estimate::proportion(h, plan.samples)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    DistanceChain,
    ExactEvolution,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralPoint {
    /// Even time `2n`.
    pub time: usize,
    pub p: Estimate,
    /// `p_{2n}^{1/(2n)}`.
    pub root: f64,
    /// `(p_{2n+2} / p_{2n})^{1/2}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub method: SpectralMethod,
    pub points: Vec<SpectralPoint>,
    pub rho_root: f64,
    pub rho_ratio: f64,
    /// Larger of the two estimators; both approach ρ from below for symmetric walks.
    pub rho_hat: f64,
    /// Gap between the two estimators plus three Monte Carlo standard errors.
    pub rho_err: f64,
    /// `p_{2n}^{1/(2n)}` nondecreasing along the exact series (asserted for lazy walks).
    pub root_nondecreasing: bool,
}

fn root_of(p: f64, t: usize) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        (p.ln() / t as f64).exp()
    }
}

/// Root and ratio estimators of ρ over even times `2, 4, …, n_max`.
pub fn spectral_radius<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    n_max: usize,
    mc: Option<&McPlan>,
    budget: usize,
) -> Result<SpectralReport> {
    if !is_symmetric(a, nu) {
        return Err(Error::Config("spectral radius estimation needs a symmetric measure".into()));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("need n_max ≥ 2, got {n_max}")));
    }
    let top = n_max - n_max % 2;
    let (method, ps): (SpectralMethod, Vec<Estimate>) = match mc {
        None => {
            let method = if free_chain_parameters(a, nu).is_some() && *x == a.base_point() {
                SpectralMethod::DistanceChain
            } else {
                SpectralMethod::ExactEvolution
            };
            let exact = return_probabilities(a, nu, x, top + 2, budget)?;
            (method, exact.iter().map(Estimate::exact).collect())
        }
        Some(plan) => {
            let cps: Vec<usize> = (0..=top + 2).collect();
            (SpectralMethod::MonteCarlo, return_probabilities_mc(a, nu, x, &cps, plan)?)
        }
    };
    let points: Vec<SpectralPoint> = (2..=top)
        .step_by(2)
        .map(|t| {
            let p = ps[t].clone();
            let next = ps[t + 2].value;
            let ratio = if p.value > 0.0 { (next / p.value).sqrt() } else { 0.0 };
            SpectralPoint { time: t, root: root_of(p.value, t), ratio, p }
        })
        .collect();
    let last = points.last().expect("n_max ≥ 2");
    let rho_root = last.root;
    let rho_ratio = last.ratio;
    let rho_hat = rho_root.max(rho_ratio).min(1.0);
    let rel = if last.p.value > 0.0 { last.p.stderr / last.p.value } else { 0.0 };
    let rho_err = (rho_ratio - rho_root).abs() + 3.0 * rho_hat * rel;
    let root_nondecreasing = points.windows(2).all(|w| w[1].root >= w[0].root * (1.0 - 1e-12));
    if method != SpectralMethod::MonteCarlo && is_lazy(a, nu) && !root_nondecreasing {
        return Err(Error::InvariantViolation("p_{2n}^{1/(2n)} decreased along a lazy symmetric walk".into()));
    }
    Ok(SpectralReport { method, rho_root, rho_ratio, rho_hat, rho_err, root_nondecreasing, points })
}

/// Finite network: symmetric conductances `c`, vertex weights `π`, and marks for vertices whose
/// edges were cut by a truncation.
#[derive(Clone, Debug)]
pub struct Network {
    adj: Vec<Vec<(usize, Rational)>>,
    pi: Vec<Rational>,
    truncated: Vec<bool>,
}

impl Network {
    /// Undirected edges; `π(x)` is the total conductance at `x`.
    pub fn new(n: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut pi = vec![Rational::zero(); n];
        for (u, v, c) in edges {
            if *u >= n || *v >= n {
                return Err(Error::Config(format!("edge ({u}, {v}) outside {n} vertices")));
            }
            if c < &Rational::zero() {
                return Err(Error::Config(format!("negative conductance on ({u}, {v})")));
            }
            adj[*u].push((*v, c.clone()));
            pi[*u] += c;
            if u != v {
                adj[*v].push((*u, c.clone()));
                pi[*v] += c;
            }
        }
        if let Some(x) = pi.iter().position(|p| p <= &Rational::zero()) {
            return Err(Error::Config(format!("vertex {x} has no incident conductance")));
        }
        let net = Network { adj, pi, truncated: vec![false; n] };
        if !net.connected() {
            return Err(Error::Config("network is not connected".into()));
        }
        Ok(net)
    }

    /// Lines `src,dst,conductance`, with an optional header; vertices are numbered densely.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut names: FxHashMap<String, usize> = FxHashMap::default();
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("src")) {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected src,dst,conductance", i + 1)));
            }
            let mut id = |s: &str| {
                let next = names.len();
                *names.entry(s.to_string()).or_insert(next)
            };
            let (u, v) = (id(f[0]), id(f[1]));
            edges.push((u, v, crate::weight::parse_rational(f[2])?));
        }
        Network::new(names.len(), &edges)
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn mark_truncated(&mut self, x: usize) {
        self.truncated[x] = true;
    }

    fn connected(&self) -> bool {
        if self.pi.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (v, _) in &self.adj[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    stack.push(*v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateRow {
    pub label: String,
    pub size: usize,
    pub boundary: String,
    pub volume: String,
    pub ratio: f64,
    /// Contains a vertex whose edges were cut by truncation: the ratio describes the truncated network.
    pub touches_truncation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    /// `min_S c(∂S)/π(S)` over the candidates; an upper bound on the edge-expansion constant.
    pub phi_hat: f64,
    pub phi_hat_exact: String,
    pub witness: String,
    pub candidates: Vec<CandidateRow>,
}

fn summarize(rows: Vec<(CandidateRow, Rational)>) -> Result<ExpansionReport> {
    let best = rows
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1))
        .ok_or_else(|| Error::Config("edge expansion needs at least one candidate set".into()))?;
    Ok(ExpansionReport {
        phi_hat: rational_to_f64(&best.1),
        phi_hat_exact: format_rational(&best.1),
        witness: best.0.label.clone(),
        candidates: rows.into_iter().map(|(r, _)| r).collect(),
    })
}

/// Boundary-to-volume ratio of each candidate vertex set.
pub fn edge_expansion(net: &Network, candidates: &[(String, Vec<usize>)]) -> Result<ExpansionReport> {
    let rows = candidates
        .iter()
        .map(|(label, set)| {
            let inside: FxHashSet<usize> = set.iter().copied().collect();
            if inside.is_empty() {
                return Err(Error::Config(format!("candidate {label} is empty")));
            }
            if let Some(x) = inside.iter().find(|&&x| x >= net.len()) {
                return Err(Error::Config(format!("candidate {label} names vertex {x} outside the network")));
            }
            let mut boundary = Rational::zero();
            let mut volume = Rational::zero();
            for &x in &inside {
                volume += &net.pi[x];
                for (y, c) in &net.adj[x] {
                    if !inside.contains(y) {
                        boundary += c;
                    }
                }
            }
            let ratio = &boundary / &volume;
            let row = CandidateRow {
                label: label.clone(),
                size: inside.len(),
                boundary: format_rational(&boundary),
                volume: format_rational(&volume),
                ratio: rational_to_f64(&ratio),
                touches_truncation: inside.iter().any(|&x| net.truncated[x]),
            };
            Ok((row, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(rows)
}

/// Edge expansion of point sets in the orbit network of `ν`: `c(x, y) = P(x, y)`, `π ≡ 1`.
/// Edges leaving a candidate are counted in the infinite network, so no truncation arises.
pub fn action_edge_expansion<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    candidates: &[(String, Vec<A::Point>)],
) -> Result<ExpansionReport> {
    if !is_symmetric(a, nu) {
        return Err(Error::Config("edge expansion needs a symmetric measure".into()));
    }
    let rows = candidates
        .iter()
        .map(|(label, set)| {
            let inside: FxHashSet<&A::Point> = set.iter().collect();
            if inside.is_empty() {
                return Err(Error::Config(format!("candidate {label} is empty")));
            }
            let mut boundary = Rational::zero();
            for x in &inside {
                for (g, w) in nu.iter() {
                    if !inside.contains(&a.act(g, x)) {
                        boundary += w;
                    }
                }
            }
            let volume = Rational::from_integer(BigInt::from(inside.len()));
            let ratio = &boundary / &volume;
            let row = CandidateRow {
                label: label.clone(),
                size: inside.len(),
                boundary: format_rational(&boundary),
                volume: format_rational(&volume),
                ratio: rational_to_f64(&ratio),
                touches_truncation: false,
            };
            Ok((row, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    summarize(rows)
}

/// Points reachable from `x` in at most `r` steps of `supp ν`, for each `r` in `radii`.
pub fn step_balls<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    x: &A::Point,
    radii: &[usize],
    cap: usize,
) -> Result<Vec<(String, Vec<A::Point>)>> {
    let gens: Vec<&A::Elem> = nu.support().collect();
    let mut seen: FxHashSet<A::Point> = [x.clone()].into_iter().collect();
    let mut order = vec![x.clone()];
    let mut frontier = vec![x.clone()];
    let mut out = Vec::new();
    let top = radii.iter().copied().max().unwrap_or(0);
    for r in 0..=top {
        if radii.contains(&r) {
            out.push((format!("ball:{r}"), order.clone()));
        }
        let mut next = Vec::new();
        for y in &frontier {
            for g in &gens {
                let z = a.act(g, y);
                if seen.insert(z.clone()) {
                    if seen.len() > cap {
                        return Err(Error::resource(format!("step ball of radius {}", r + 1), format!("more than {cap} points"), cap));
                    }
                    order.push(z.clone());
                    next.push(z);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Boxes `[0, L)^d` in ℤ^d.
pub fn lattice_boxes(d: usize, sides: &[i64]) -> Vec<(String, Vec<crate::action::Coords>)> {
    sides
        .iter()
        .map(|&l| {
            let mut pts = vec![crate::action::Coords::new()];
            for _ in 0..d {
                pts = pts
                    .into_iter()
                    .flat_map(|p| {
                        (0..l).map(move |v| {
                            let mut q = p.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            (format!("box:{l}"), pts)
        })
        .collect()
}

/// Følner sets of ℤ₂≀ℤ for the walk `g ↦ s g`: inverses of the elements with every lamp and the
/// lamplighter inside `[0, L)`.
pub fn lamplighter_boxes(sides: &[i64]) -> Vec<(String, Vec<LampElem>)> {
    let w = crate::action::Lamplighter::new();
    sides
        .iter()
        .map(|&l| {
            let mut pts = Vec::new();
            for mask in 0u64..(1 << l) {
                let lamps: Vec<i64> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
                for pos in 0..l {
                    pts.push(w.inverse(&LampElem::new(lamps.clone(), pos).expect("distinct lamps")));
                }
            }
            (format!("lamp-box:{l}"), pts)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MoharReport {
    pub rho_hat: f64,
    pub phi_hat: f64,
    pub witness: String,
    pub one_minus_rho: f64,
    /// `1 − √(1 − Φ̂²)`; informational, since Φ̂ only bounds Φ_E from above.
    pub lower_bound: f64,
    pub lower_holds: bool,
    pub slack: f64,
    /// `Φ̂ + slack − (1 − ρ̂)`.
    pub sound_margin: f64,
    pub sound_holds: bool,
}

/// `1 − ρ̂ ≤ Φ̂ + slack`, sound because `1 − ρ ≤ Φ_E ≤ Φ̂`; slack is the estimator error bar.
pub fn mohar_check(spectral: &SpectralReport, expansion: &ExpansionReport) -> Result<MoharReport> {
    let slack = spectral.rho_err + 1e-12;
    let one_minus_rho = 1.0 - spectral.rho_hat;
    let phi = expansion.phi_hat;
    let lower_bound = 1.0 - (1.0 - phi.min(1.0).powi(2)).sqrt();
    let sound_margin = phi + slack - one_minus_rho;
    let r = MoharReport {
        rho_hat: spectral.rho_hat,
        phi_hat: phi,
        witness: expansion.witness.clone(),
        one_minus_rho,
        lower_bound,
        lower_holds: lower_bound <= one_minus_rho + slack,
        slack,
        sound_margin,
        sound_holds: sound_margin >= 0.0,
    };
    if !r.sound_holds {
        return Err(Error::InvariantViolation(format!(
            "1 − ρ̂ = {one_minus_rho} exceeds Φ̂ + slack = {}",
            phi + slack
        )));
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    DistanceChain,
    ExactEvolution,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusRow {
    pub r: String,
    /// `(n, P(|X_n| ≤ r n))`.
    pub values: Vec<(u64, Estimate)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayRateEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unclassified: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KestenDecayReport {
    pub method: RadiusMethod,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<RadiusRow>,
    pub note: String,
}

const ONE_SIDED_NOTE: &str = "the radius-rn ball is a subset of U^n for U the r-ball: exponential decay certifies failure, subexponential decay is only supporting evidence";

fn radius_hits(len: u64, r: &Rational, n: u64) -> bool {
    Rational::from_integer(BigInt::from(len)) <= r * BigInt::from(n)
}

fn radius_report(
    method: RadiusMethod,
    plan: Option<&McPlan>,
    r_grid: &[Rational],
    n_grid: &[u64],
    values: Vec<Vec<Estimate>>,
) -> KestenDecayReport {
    let rows = r_grid
        .iter()
        .zip(values)
        .map(|(r, vals)| {
            let pts: Vec<DecayPoint> =
                n_grid.iter().zip(&vals).map(|(&n, e)| DecayPoint { n, value: e.value, stderr: e.stderr }).collect();
            let (decay, unclassified) = match decay_classify(&pts) {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            };
            RadiusRow { r: format_rational(r), values: n_grid.iter().copied().zip(vals).collect(), decay, unclassified }
        })
        .collect();
    KestenDecayReport {
        method,
        samples: plan.map_or(0, |p| p.samples),
        seed: plan.map_or(0, |p| p.seed),
        rows,
        note: ONE_SIDED_NOTE.into(),
    }
}

fn check_grids(r_grid: &[Rational], n_grid: &[u64]) -> Result<()> {
    if r_grid.iter().any(|r| r <= &Rational::zero()) {
        return Err(Error::Domain("radii must be positive".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("n grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Exact `P(|X_n| ≤ r n)` under the word length: distance chain for free groups, otherwise the
/// law of `X_n` evolved within `budget` atoms.
pub fn linear_radius_decay_exact<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    r_grid: &[Rational],
    n_grid: &[u64],
    budget: usize,
) -> Result<KestenDecayReport> {
    check_grids(r_grid, n_grid)?;
    if a.word_length(&a.identity()).is_none() {
        return Err(Error::Config(format!("{} supplies no word length", a.name())));
    }
    let top = n_grid.last().copied().unwrap_or(0) as usize;
    let mut values = vec![Vec::with_capacity(n_grid.len()); r_grid.len()];
    if let Some((k, q)) = free_chain_parameters(a, nu) {
        let laws = free_distance_laws(k, &q, top);
        for &n in n_grid {
            for (i, r) in r_grid.iter().enumerate() {
                let p: Rational =
                    laws[n as usize].iter().enumerate().filter(|(d, _)| radius_hits(*d as u64, r, n)).map(|(_, w)| w).sum();
                values[i].push(Estimate::exact(&p));
            }
        }
        return Ok(radius_report(RadiusMethod::DistanceChain, None, r_grid, n_grid, values));
    }
    let mut law: Measure<A::Elem, Rational> = Measure::dirac(a.identity());
    for n in 0..=top as u64 {
        if n > 0 {
            law = convolve(a, &law, nu, None)?;
            if law.len() > budget {
                return Err(Error::resource(format!("walk law support at n = {n}"), law.len(), budget));
            }
        }
        if n_grid.contains(&n) {
            for (i, r) in r_grid.iter().enumerate() {
                let p = law.mass_where(|g| radius_hits(a.word_length(g).expect("checked above"), r, n));
                values[i].push(Estimate::exact(&p));
            }
        }
    }
    Ok(radius_report(RadiusMethod::ExactEvolution, None, r_grid, n_grid, values))
}

/// Monte Carlo `P(|X_n| ≤ r n)` at every grid point from one set of sample paths.
pub fn linear_radius_decay_mc<A: ActionOracle + ?Sized>(
    a: &A,
    nu: &Measure<A::Elem, Rational>,
    r_grid: &[Rational],
    n_grid: &[u64],
    plan: &McPlan,
) -> Result<KestenDecayReport> {
    check_grids(r_grid, n_grid)?;
    if a.word_length(&a.identity()).is_none() {
        return Err(Error::Config(format!("{} supplies no word length", a.name())));
    }
    let sampler = Sampler::new(nu)?;
    let top = n_grid.last().copied().unwrap_or(0);
    let parts = plan.run(|rng, count| {
        let mut hits = vec![vec![0u64; n_grid.len()]; r_grid.len()];
        for _ in 0..count {
            let mut g = a.identity();
            let mut next_cp = 0;
            for n in 0..=top {
                if n > 0 {
                    g = a.mul(&g, sampler.sample(rng));
                }
                if next_cp < n_grid.len() && n_grid[next_cp] == n {
                    let len = a.word_length(&g).expect("checked above");
                    for (i, r) in r_grid.iter().enumerate() {
                        if radius_hits(len, r, n) {
                            hits[i][next_cp] += 1;
                        }
                    }
                    next_cp += 1;
                }
            }
        }
        hits
    });
    let mut hits = vec![vec![0u64; n_grid.len()]; r_grid.len()];
    for p in parts {
        for (row, prow) in hits.iter_mut().zip(p) {
            for (h, v) in row.iter_mut().zip(prow) {
                *h += v;
            }
        }
    }
    let values = hits
        .into_iter()
        .map(|row| row.into_iter().map(|h| Estimate::proportion(h, plan.samples)).collect())
        .collect();
    Ok(radius_report(RadiusMethod::MonteCarlo, Some(plan), r_grid, n_grid, values))
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckRow {
    pub r: String,
    pub n: u64,
    pub exact: f64,
    pub mc: f64,
    /// `3 √(p(1−p)/N)` from the exact `p`.
    pub tolerance: f64,
    pub agrees: bool,
}

/// Monte Carlo values against exact ones at every shared `(r, n)`.
pub fn radius_cross_check(exact: &KestenDecayReport, mc: &KestenDecayReport) -> Vec<CrossCheckRow> {
    let mut out = Vec::new();
    for er in &exact.rows {
        let Some(mr) = mc.rows.iter().find(|m| m.r == er.r) else { continue };
        for (n, e) in &er.values {
            let Some((_, m)) = mr.values.iter().find(|(k, _)| k == n) else { continue };
            let tolerance = 3.0 * (e.value * (1.0 - e.value) / mc.samples.max(1) as f64).sqrt() + 1e-12;
            out.push(CrossCheckRow {
                r: er.r.clone(),
                n: *n,
                exact: e.value,
                mc: m.value,
                tolerance,
                agrees: (e.value - m.value).abs() <= tolerance,
            });
        }
    }
    out
}

/// `P(D(ĝ_n, id) ≤ r n)` for the switch-walk-switch walk on a finite relation lamplighter, with
/// `D = d_C + d_R`; exact when `plan` is `None`.
pub fn relation_radius_decay(
    space: &Arc<FiniteRelationSpace>,
    nu: &Measure<Perm, Rational>,
    r_grid: &[Rational],
    n_grid: &[u64],
    plan: Option<&McPlan>,
    budget: u128,
) -> Result<KestenDecayReport> {
    check_grids(r_grid, n_grid)?;
    let ground = RelationLamps::new(space.clone());
    let id = state_identity(&ground);
    let mut values = vec![Vec::with_capacity(n_grid.len()); r_grid.len()];
    for &n in n_grid {
        match plan {
            None => {
                let law = relation_lamp_law(space, nu, n as usize, budget)?;
                for (i, r) in r_grid.iter().enumerate() {
                    let bound = r * BigInt::from(n);
                    values[i].push(Estimate::exact(&law.mass_where(|s| ground.metric(s, &id) <= bound)));
                }
            }
            Some(p) => {
                let hat = sws_measure(&ground, nu, &ground.diagonal())?;
                let samples = lamp_walk_samples(&ground, &hat, n as usize, p)?;
                for (i, r) in r_grid.iter().enumerate() {
                    let bound = r * BigInt::from(n);
                    let hits = samples.iter().filter(|s| ground.metric(s, &id) <= bound).count() as u64;
                    values[i].push(Estimate::proportion(hits, p.samples));
                }
            }
        }
    }
    let method = if plan.is_some() { RadiusMethod::MonteCarlo } else { RadiusMethod::ExactEvolution };
    Ok(radius_report(method, plan, r_grid, n_grid, values))
}
