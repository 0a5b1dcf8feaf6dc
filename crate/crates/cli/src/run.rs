//! Subcommand bodies; each returns a JSON result, an optional CSV projection and a verdict.

use std::sync::Arc;

use serde_json::{json, Value};
use walklab::action::*;
use walklab::inverted::*;
use walklab::lamplighter::*;
use walklab::mc::{McPlan, Sampler};
use walklab::measure::*;
use walklab::spectral::*;
use walklab::stats::Estimate;
use walklab::synth::*;
use walklab::weight::{format_rational, parse_rational, ratio, Rational};
use walklab::{with_action, Error, Result};

use crate::args::*;

pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
    /// A checked inequality or identity failed.
    pub failed: bool,
}

impl Output {
    fn ok(result: Value, csv: Option<String>) -> Self {
        Output { result, csv, failed: false }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn csv_of(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Encoding(e.to_string()))
}

fn rationals(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s)).collect()
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Mc => Mode::MonteCarlo,
    }
}

/// A relation space from a file or the presets `uniform-cycle:<n>` and `dyadic-cycle:<n>`.
pub fn load_space(spec: &str) -> Result<FiniteRelationSpace> {
    let size = |s: &str| s.parse::<usize>().map_err(|_| Error::Config(format!("bad cycle length in {spec:?}")));
    if let Some(n) = spec.strip_prefix("uniform-cycle:") {
        return FiniteRelationSpace::uniform_cycle(size(n)?, true);
    }
    if let Some(n) = spec.strip_prefix("dyadic-cycle:") {
        let n = size(n)?;
        if !(2..=62).contains(&n) {
            return Err(Error::Config(format!("dyadic cycle length must lie in 2..=62, got {n}")));
        }
        // Weights 2^-(k+1) for k < n-1; the last point takes the remaining 2^-(n-1).
        let mut w: Vec<Rational> = (0..n - 1).map(|k| ratio(1, 1i64 << (k + 1))).collect();
        w.push(ratio(1, 1i64 << (n - 1)));
        return FiniteRelationSpace::cycle(w, true);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::Config(format!("cannot read space file {spec:?}: {e}")))?;
    FiniteRelationSpace::parse(&text)
}

fn space_of(spec: &ActionSpec) -> Result<Option<FiniteRelationSpace>> {
    spec.space.as_deref().map(load_space).transpose()
}

fn require_space(spec: &ActionSpec) -> Result<Arc<FiniteRelationSpace>> {
    let s = space_of(spec)?.ok_or_else(|| Error::Config("--space is required for this check".into()))?;
    Ok(Arc::new(s))
}

pub fn build(spec: &ActionSpec) -> Result<AnyAction> {
    build_action(&spec.action, space_of(spec)?)
}

fn measure_text(spec: &str) -> Result<String> {
    match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read measure file {path:?}: {e}"))),
        None => Ok(spec.replace(';', "\n")),
    }
}

fn measure_of<A: ActionOracle + ?Sized>(a: &A, spec: &ActionSpec) -> Result<Measure<A::Elem, Rational>> {
    parse_measure(a, &measure_text(&spec.measure)?)
}

fn point_of<A: ActionOracle + ?Sized>(a: &A, spec: &ActionSpec) -> Result<A::Point> {
    match &spec.point {
        Some(s) => a.parse_point(s),
        None => Ok(a.base_point()),
    }
}

pub fn walk<A: ActionOracle + ?Sized>(a: &A, args: &WalkArgs, seed: u64) -> Result<Output> {
    let nu = measure_of(a, &args.spec)?;
    let x = point_of(a, &args.spec)?;
    match args.mode {
        ModeArg::Exact => {
            let mut d = Measure::dirac(x.clone());
            for _ in 0..args.n {
                d = step(a, &d, &nu, Some(args.cap))?;
            }
            let mut atoms: Vec<(&A::Point, &Rational)> = d.iter().collect();
            atoms.sort_by(|p, q| q.1.cmp(p.1).then_with(|| p.0.cmp(q.0)));
            let listed: Vec<Value> = atoms
                .iter()
                .take(args.max_atoms)
                .map(|(p, w)| json!({"point": a.encode_point(p), "p": Estimate::exact(w)}))
                .collect();
            let csv = csv_of(|b| write_distribution_csv(a, &d, b))?;
            Ok(Output::ok(
                json!({
                    "n": args.n,
                    "mode": "exact",
                    "support": d.len(),
                    "defect": format_rational(d.defect()),
                    "return_probability": Estimate::exact(&d.get(&x)),
                    "atoms": listed,
                }),
                Some(csv),
            ))
        }
        ModeArg::Mc => {
            let sampler = Sampler::new(&nu)?;
            let plan = McPlan::new(args.samples, seed);
            let parts = plan.run(|rng, count| {
                let (mut hits, mut s, mut s2) = (0u64, 0f64, 0f64);
                for _ in 0..count {
                    let mut c = a.identity();
                    for _ in 0..args.n {
                        c = a.mul(sampler.sample(rng), &c);
                    }
                    hits += u64::from(a.act(&c, &x) == x);
                    if let Some(l) = a.word_length(&c) {
                        s += l as f64;
                        s2 += (l * l) as f64;
                    }
                }
                (hits, s, s2)
            });
            let (hits, s, s2) = parts.into_iter().fold((0, 0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
            let ret = Estimate::proportion(hits, args.samples);
            let len = a.word_length(&a.identity()).map(|_| Estimate::from_sums(s, s2, args.samples));
            let mut csv = format!("statistic,value,stderr\nreturn_probability,{},{}\n", ret.value, ret.stderr);
            if let Some(l) = &len {
                csv.push_str(&format!("mean_word_length,{},{}\n", l.value, l.stderr));
            }
            Ok(Output::ok(
                json!({"n": args.n, "mode": "mc", "samples": args.samples, "seed": seed, "return_probability": ret, "mean_word_length": len}),
                Some(csv),
            ))
        }
    }
}

pub fn inverted_orbit<A: ActionOracle + ?Sized>(a: &A, args: &OrbitArgs, seed: u64) -> Result<Output> {
    let nu = measure_of(a, &args.spec)?;
    let x = point_of(a, &args.spec)?;
    let eps = if args.eps.is_empty() { default_eps_grid() } else { rationals(&args.eps)? };
    let mode = mode_of(args.mode.unwrap_or(if args.samples.is_some() { ModeArg::Mc } else { ModeArg::Exact }));
    let plan = McPlan::new(args.samples.unwrap_or(100_000), seed);
    let mut ns = args.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let series = orbit_statistics_series(a, &nu, &x, &ns, &eps, mode, &plan, args.budget)?;
    let mut result = json!({"series": to_json(&series)});
    let mut failed = false;
    if let Some(max) = args.fekete_max {
        let pairs: Vec<(usize, usize)> = (2..=max).flat_map(|t| (1..t).map(move |n| (n, t - n))).collect();
        let mut rows = Vec::new();
        for e in &eps {
            rows.extend(fekete_check(a, &nu, &x, e, &pairs, mode, &plan, args.budget)?);
        }
        failed = rows.iter().any(|r| !r.holds);
        result["fekete"] = to_json(&rows);
    }
    let csv = csv_of(|b| write_series_csv(&series, b))?;
    Ok(Output { result, csv: Some(csv), failed })
}

pub fn lamplighter(args: &LampArgs, seed: u64) -> Result<Output> {
    let eps = parse_rational(&args.eps)?;
    match args.check {
        LampCheck::Identity => {
            let action = build(&args.spec)?;
            with_action!(&action, a => {
                let nu = measure_of(a, &args.spec)?;
                let x = point_of(a, &args.spec)?;
                let plan = McPlan::new(args.samples, seed);
                let r = lamp_orbit_identity_check(a, &nu, &x, args.n, mode_of(args.mode), &plan, args.budget)?;
                Ok(Output { result: to_json(&r), csv: None, failed: !r.holds })
            })
        }
        LampCheck::Thm1 | LampCheck::Thm2 => {
            let space = require_space(&args.spec)?;
            let a = FullGroupAction::new(space.clone());
            let nu = measure_of(&a, &args.spec)?;
            let r = if args.check == LampCheck::Thm1 {
                thm1_inequality(&space, &nu, &eps, args.n, args.budget)?
            } else {
                thm2_inequality(&space, &nu, &eps, args.n, args.budget)?
            };
            Ok(Output { result: to_json(&r), csv: None, failed: !r.holds })
        }
        LampCheck::Thinning => {
            let n = args.n as u64;
            let dists: Vec<(String, Vec<Rational>)> = if args.dist.is_empty() {
                let mut v: Vec<(String, Vec<Rational>)> = (0..=args.n)
                    .map(|k| {
                        let mut d = vec![ratio(0, 1); args.n + 1];
                        d[k] = ratio(1, 1);
                        (format!("point mass at {k}"), d)
                    })
                    .collect();
                v.extend(problemma_grid(n).into_iter().enumerate().map(|(j, d)| (format!("grid {j}"), d)));
                v
            } else {
                vec![("given".to_string(), rationals(&args.dist)?)]
            };
            let mut rows = Vec::new();
            let mut failed = false;
            for (label, d) in dists {
                let r = problemma_check(n, &eps, &d)?;
                failed |= !r.holds;
                rows.push(json!({"distribution": label, "report": to_json(&r)}));
            }
            Ok(Output { result: json!({"checked": rows.len(), "rows": rows}), csv: None, failed })
        }
        LampCheck::Witness => {
            let space = require_space(&args.spec)?;
            let r = sin_defect_witness(&space, &parse_rational(&args.r)?, 1 << 20)?;
            let failed = !r.vacuous && !r.found;
            Ok(Output { result: to_json(&r), csv: None, failed })
        }
    }
}

pub fn liouville<A: ActionOracle + ?Sized>(a: &A, args: &LiouvilleArgs) -> Result<Output> {
    let base = measure_of(a, &args.spec)?;
    let origin = point_of(a, &args.spec)?;
    let t = match &args.shift {
        Some(w) => GroupWord::parse(a, w)?.evaluate(a)?,
        None => a.generator(Generator::new(0))?,
    };
    let family = ShiftFamily { t: t.clone(), origin: origin.clone(), base, eps_scale: parse_rational(&args.eps_scale)? };
    let weights = if args.weights.is_empty() {
        WeightRule::geometric_half()
    } else {
        WeightRule::new(rationals(&args.weights)?, parse_rational(&args.tail)?)?
    };
    let mut config = SynthConfig::new(weights, args.depth);
    config.max_n = args.max_n;
    config.max_convolutions = args.max_convolutions;
    let (nu, state) = synthesize(a, &family, &config)?;
    let x = match &args.x {
        Some(s) => a.parse_point(s)?,
        None => origin.clone(),
    };
    let y = match &args.y {
        Some(s) => a.parse_point(s)?,
        None => a.act(&a.mul(&t, &t), &x),
    };
    let targets = state.probe_targets(a, &family, &x, &y)?;
    let reach = targets.iter().map(|t| t.m).max().unwrap_or(0).max(args.max_m);
    let probe = liouville_probe(a, &nu, &x, &y, reach, args.cap, &targets)?;
    let failed = !state.invariants_hold || probe.checks.iter().any(|c| c.verdict == BoundVerdict::Fail);
    let csv = {
        let mut s = String::from("m,distance,defect\n");
        for (m, (d, e)) in probe.distances.iter().zip(&probe.defects).enumerate() {
            s.push_str(&format!("{m},{d},{e}\n"));
        }
        s
    };
    Ok(Output {
        result: json!({"support": nu.len(), "state": to_json(&state), "probe": to_json(&probe)}),
        csv: Some(csv),
        failed,
    })
}

pub fn network_expansion(path: &std::path::Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read network {path:?}: {e}")))?;
    let net = Network::parse_csv(&text)?;
    // Candidates: every vertex alone and every proper prefix of the vertex order.
    let mut candidates: Vec<(String, Vec<usize>)> = (0..net.len()).map(|v| (format!("vertex:{v}"), vec![v])).collect();
    candidates.extend((2..net.len()).map(|k| (format!("prefix:{k}"), (0..k).collect())));
    let e = edge_expansion(&net, &candidates)?;
    Ok(Output::ok(json!({"vertices": net.len(), "expansion": to_json(&e)}), None))
}

pub fn spectral<A: ActionOracle + ?Sized>(a: &A, args: &SpectralArgs, seed: u64) -> Result<Output> {
    let nu = measure_of(a, &args.spec)?;
    let x = point_of(a, &args.spec)?;
    let plan = McPlan::new(args.samples, seed);
    let mc = (args.mode == ModeArg::Mc).then_some(&plan);
    let report = spectral_radius(a, &nu, &x, args.n, mc, args.budget)?;
    let mut result = json!({"spectral": to_json(&report)});
    if !args.radii.is_empty() {
        let candidates = step_balls(a, &nu, &x, &args.radii, args.budget)?;
        let e = action_edge_expansion(a, &nu, &candidates)?;
        result["mohar"] = to_json(&mohar_check(&report, &e)?);
        result["expansion"] = to_json(&e);
    }
    if !args.decay_r.is_empty() {
        let r = rationals(&args.decay_r)?;
        let d = match args.mode {
            ModeArg::Exact => linear_radius_decay_exact(a, &nu, &r, &args.decay_n, args.budget)?,
            ModeArg::Mc => linear_radius_decay_mc(a, &nu, &r, &args.decay_n, &plan)?,
        };
        result["linear_radius_decay"] = to_json(&d);
    }
    let mut csv = String::from("time,p,stderr,root,ratio\n");
    for p in &report.points {
        csv.push_str(&format!("{},{},{},{},{}\n", p.time, p.p.value, p.p.stderr, p.root, p.ratio));
    }
    Ok(Output::ok(result, Some(csv)))
}

pub fn ball<A: ActionOracle + ?Sized>(a: &A, args: &BallArgs) -> Result<Output> {
    let x = point_of(a, &args.spec)?;
    let b = orbit_ball(a, &x, args.radius, args.cap)?;
    let sizes: Vec<usize> = (0..=args.radius).map(|r| b.sub_ball(r).count()).collect();
    let csv = csv_of(|w| write_ball_csv(a, &b, w))?;
    Ok(Output::ok(json!({"radius": args.radius, "points": b.len(), "edges": b.edges.len(), "ball_sizes": sizes}), Some(csv)))
}
