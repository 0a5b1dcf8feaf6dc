//! Finitely supported probability measures on groups and orbits.
//!
//! Every measure carries a `defect`: mass discarded by truncation. Atoms plus defect sum to one.

use std::collections::BTreeMap;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::action::{ActionOracle, GroupWord, Key};
use crate::error::{Error, Result};
use crate::weight::{parse_rational, Rational, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct Measure<K: Ord, W> {
    atoms: BTreeMap<K, W>,
    defect: W,
}

/// Law of a walk on an orbit; same representation as a group measure.
pub type OrbitDistribution<P, W> = Measure<P, W>;

impl<K: Key, W: Weight> Measure<K, W> {
    pub fn new(atoms: impl IntoIterator<Item = (K, W)>) -> Result<Self> {
        Self::with_defect(atoms, W::zero())
    }

    /// Duplicate keys are merged; atoms must be positive and atoms plus defect must total one.
    pub fn with_defect(atoms: impl IntoIterator<Item = (K, W)>, defect: W) -> Result<Self> {
        let mut map: BTreeMap<K, W> = BTreeMap::new();
        for (k, w) in atoms {
            if !w.is_positive() {
                return Err(Error::Config(format!("atom {k:?} has non-positive weight {w:?}")));
            }
            let e = map.entry(k).or_insert_with(W::zero);
            *e = e.add(&w);
        }
        if defect < W::zero() {
            return Err(Error::Config(format!("negative defect {defect:?}")));
        }
        let m = Measure { atoms: map, defect };
        if !m.total_mass().add(&m.defect).close_to(&W::one()) {
            return Err(Error::Config(format!(
                "weights sum to {:?} with defect {:?}, expected 1",
                m.total_mass(),
                m.defect
            )));
        }
        Ok(m)
    }


    pub fn dirac(k: K) -> Self {
        Measure { atoms: BTreeMap::from([(k, W::one())]), defect: W::zero() }
    }

    pub fn uniform(keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let keys: Vec<K> = keys.into_iter().collect();
        if keys.is_empty() {
            return Err(Error::Config("uniform measure on an empty set".into()));
        }
        let w = W::from_ratio(1, keys.len() as i64);
        Self::new(keys.into_iter().map(|k| (k, w.clone())))
    }

    pub fn get(&self, k: &K) -> W {
        self.atoms.get(k).cloned().unwrap_or_else(W::zero)
    }

    pub fn atoms(&self) -> &BTreeMap<K, W> {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &W)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.atoms.keys()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn defect(&self) -> &W {
        &self.defect
    }

    pub fn total_mass(&self) -> W {
        self.atoms.values().fold(W::zero(), |s, w| s.add(w))
    }

    pub fn mass_where(&self, mut pred: impl FnMut(&K) -> bool) -> W {
        self.atoms.iter().filter(|(k, _)| pred(k)).fold(W::zero(), |s, (_, w)| s.add(w))
    }

    pub fn map_weights<W2: Weight>(&self, f: impl Fn(&W) -> W2) -> Measure<K, W2> {
        Measure { atoms: self.atoms.iter().map(|(k, w)| (k.clone(), f(w))).collect(), defect: f(&self.defect) }
    }

    pub fn to_f64(&self) -> Measure<K, f64> {
        self.map_weights(|w| w.to_f64())
    }

    /// Keep the `cap` heaviest atoms (ties by key order); the rest moves to the defect.
    pub fn truncate(&self, cap: usize) -> Self {
        if self.atoms.len() <= cap {
            return self.clone();
        }
        let mut v: Vec<(&K, &W)> = self.atoms.iter().collect();
        v.sort_by(|a, b| b.1.partial_cmp(a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(b.0)));
        let mut defect = self.defect.clone();
        for (_, w) in &v[cap..] {
            defect = defect.add(w);
        }
        Measure { atoms: v[..cap].iter().map(|(k, w)| ((*k).clone(), (*w).clone())).collect(), defect }
    }

    fn from_accumulator(acc: FxHashMap<K, W>, defect: W, cap: Option<usize>) -> Self {
        let m = Measure { atoms: acc.into_iter().filter(|(_, w)| w.is_positive()).collect(), defect };
        match cap {
            Some(c) => m.truncate(c),
            None => m,
        }
    }
}

fn accumulate<K: Eq + Hash, W: Weight>(acc: &mut FxHashMap<K, W>, k: K, w: W) {
    match acc.get_mut(&k) {
        Some(e) => *e = e.add(&w),
        None => {
            acc.insert(k, w);
        }
    }
}

fn product_defect<W: Weight>(a: &W, b: &W) -> W {
    a.add(b).sub(&a.mul(b))
}

fn validate<A: ActionOracle + ?Sized, W: Weight>(a: &A, m: &Measure<A::Elem, W>) -> Result<()> {
    for g in m.support() {
        a.validate_elem(g)?;
    }
    Ok(())
}

/// `(μ * ν)(g) = Σ_{hk = g} μ(h) ν(k)`; `cap` bounds the support, excess mass joins the defect.
pub fn convolve<A: ActionOracle + ?Sized, W: Weight>(
    a: &A,
    mu: &Measure<A::Elem, W>,
    nu: &Measure<A::Elem, W>,
    cap: Option<usize>,
) -> Result<Measure<A::Elem, W>> {
    validate(a, mu)?;
    validate(a, nu)?;
    let mut acc = FxHashMap::default();
    for (h, wh) in mu.iter() {
        for (k, wk) in nu.iter() {
            accumulate(&mut acc, a.mul(h, k), wh.mul(wk));
        }
    }
    Ok(Measure::from_accumulator(acc, product_defect(&mu.defect, &nu.defect), cap))
}

/// `n`-fold convolution power; `nu^0` is the point mass at the identity.
pub fn convolution_power<A: ActionOracle + ?Sized, W: Weight>(
    a: &A,
    nu: &Measure<A::Elem, W>,
    n: u32,
    cap: Option<usize>,
) -> Result<Measure<A::Elem, W>> {
    let mut out = Measure::dirac(a.identity());
    for _ in 0..n {
        out = convolve(a, &out, nu, cap)?;
    }
    Ok(out)
}

/// Law of `g x` for `g ~ ν`.
pub fn push<A: ActionOracle + ?Sized, W: Weight>(
    a: &A,
    nu: &Measure<A::Elem, W>,
    x: &A::Point,
) -> Result<OrbitDistribution<A::Point, W>> {
    step(a, &Measure::dirac(x.clone()), nu, None)
}

/// One walk step: law of `g y` for `y ~ d`, `g ~ ν` independent.
pub fn step<A: ActionOracle + ?Sized, W: Weight>(
    a: &A,
    d: &OrbitDistribution<A::Point, W>,
    nu: &Measure<A::Elem, W>,
    cap: Option<usize>,
) -> Result<OrbitDistribution<A::Point, W>> {
    validate(a, nu)?;
    let mut acc = FxHashMap::default();
    for (y, wy) in d.iter() {
        for (g, wg) in nu.iter() {
            accumulate(&mut acc, a.act(g, y), wy.mul(wg));
        }
    }
    Ok(Measure::from_accumulator(acc, product_defect(&d.defect, &nu.defect), cap))
}

/// `Σ_k |d1(k) − d2(k)|` over the atoms (no halving); defects are not included.
pub fn l1_distance<K: Key, W: Weight>(d1: &Measure<K, W>, d2: &Measure<K, W>) -> W {
    let mut s = W::zero();
    for (k, w) in d1.iter() {
        s = s.add(&w.sub(&d2.get(k)).abs());
    }
    for (k, w) in d2.iter() {
        if !d1.atoms.contains_key(k) {
            s = s.add(w);
        }
    }
    s
}

/// Convex combination; coefficients must be positive and sum to one.
pub fn mix<K: Key, W: Weight>(parts: &[(W, &Measure<K, W>)]) -> Result<Measure<K, W>> {
    let total = parts.iter().fold(W::zero(), |s, (c, _)| s.add(c));
    if parts.iter().any(|(c, _)| !c.is_positive()) || !total.close_to(&W::one()) {
        return Err(Error::Config(format!("mixture coefficients must be positive and sum to 1, got {total:?}")));
    }
    let mut acc: FxHashMap<K, W> = FxHashMap::default();
    let mut defect = W::zero();
    for (c, m) in parts {
        for (k, w) in m.iter() {
            accumulate(&mut acc, k.clone(), c.mul(w));
        }
        defect = defect.add(&c.mul(&m.defect));
    }
    Ok(Measure::from_accumulator(acc, defect, None))
}

/// `½(ν + ν̌)` where `ν̌(g) = ν(g⁻¹)`.
pub fn symmetrize<A: ActionOracle + ?Sized, W: Weight>(a: &A, nu: &Measure<A::Elem, W>) -> Result<Measure<A::Elem, W>> {
    validate(a, nu)?;
    let half = W::from_ratio(1, 2);
    let mut acc = FxHashMap::default();
    for (g, w) in nu.iter() {
        accumulate(&mut acc, g.clone(), half.mul(w));
        accumulate(&mut acc, a.inverse(g), half.mul(w));
    }
    Ok(Measure::from_accumulator(acc, nu.defect.clone(), None))
}

/// `½ δ_e + ½ ν`.
pub fn lazify<A: ActionOracle + ?Sized, W: Weight>(a: &A, nu: &Measure<A::Elem, W>) -> Result<Measure<A::Elem, W>> {
    let half = W::from_ratio(1, 2);
    mix(&[(half.clone(), &Measure::dirac(a.identity())), (half, nu)])
}

pub fn is_symmetric<A: ActionOracle + ?Sized, W: Weight>(a: &A, nu: &Measure<A::Elem, W>) -> bool {
    nu.iter().all(|(g, w)| nu.get(&a.inverse(g)).close_to(w))
}

/// Uniform measure on the symmetric generating set.
pub fn srw<A: ActionOracle + ?Sized, W: Weight>(a: &A) -> Result<Measure<A::Elem, W>> {
    let elems: Vec<A::Elem> = a
        .symmetric_generators()
        .into_iter()
        .map(|g| a.generator(g))
        .collect::<Result<_>>()?;
    Measure::uniform(elems)
}

pub fn lazy_srw<A: ActionOracle + ?Sized, W: Weight>(a: &A) -> Result<Measure<A::Elem, W>> {
    lazify(a, &srw(a)?)
}

/// Uniform measure on group elements of word length at most `r`.
pub fn uniform_ball<A: ActionOracle + ?Sized, W: Weight>(a: &A, r: u32, cap: usize) -> Result<Measure<A::Elem, W>> {
    let gens: Vec<A::Elem> = a
        .symmetric_generators()
        .into_iter()
        .map(|g| a.generator(g))
        .collect::<Result<_>>()?;
    let mut seen: rustc_hash::FxHashSet<A::Elem> = [a.identity()].into_iter().collect();
    let mut frontier = vec![a.identity()];
    for _ in 0..r {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let h = a.mul(g, s);
                if seen.insert(h.clone()) {
                    if seen.len() > cap {
                        return Err(Error::resource("uniform ball support", format!("more than {cap} elements"), cap));
                    }
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    Measure::uniform(seen)
}

/// Presets `srw`, `lazy-srw`, `uniform-ball:<r>`, or lines `word : weight` (`#` comments).
pub fn parse_measure<A: ActionOracle + ?Sized, W: Weight>(a: &A, text: &str) -> Result<Measure<A::Elem, W>> {
    let t = text.trim();
    match t {
        "srw" => return srw(a),
        "lazy-srw" => return lazy_srw(a),
        _ => {}
    }
    if let Some(r) = t.strip_prefix("uniform-ball:") {
        let r: u32 = r.trim().parse().map_err(|_| Error::Parse(format!("bad ball radius in {t:?}")))?;
        return uniform_ball(a, r, 1_000_000);
    }
    let mut atoms = Vec::new();
    for (ln, line) in t.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (w, p) = line
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse(format!("measure line {}: expected `word : weight`", ln + 1)))?;
        let word = GroupWord::parse(a, w)?;
        let r: Rational = parse_rational(p)?;
        atoms.push((word.evaluate(a)?, W::from_rational(&r)));
    }
    Measure::new(atoms)
}

/// Text form matching [`parse_measure`], using normal words when available.
pub fn format_measure<A: ActionOracle + ?Sized>(a: &A, m: &Measure<A::Elem, Rational>) -> Option<String> {
    let mut out = String::new();
    for (g, w) in m.iter() {
        let word = a.normal_word(g)?;
        out.push_str(&format!("{} : {}\n", word.display(a), crate::weight::format_rational(w)));
    }
    Some(out)
}

pub fn is_lazy<A: ActionOracle + ?Sized, W: Weight>(a: &A, nu: &Measure<A::Elem, W>) -> bool {
    nu.get(&a.identity()) >= W::from_ratio(1, 2)
}

/// CSV with header `point,probability`; exact weights print as `p/q`.
pub fn write_distribution_csv<A: ActionOracle + ?Sized, W: Weight, Wr: std::io::Write>(
    a: &A,
    d: &OrbitDistribution<A::Point, W>,
    mut w: Wr,
) -> Result<()> {
    writeln!(w, "point,probability")?;
    for (p, pr) in d.iter() {
        let v = match pr.to_rational() {
            Some(r) => crate::weight::format_rational(&r),
            None => format!("{}", pr.to_f64()),
        };
        writeln!(w, "\"{}\",{}", a.encode_point(p), v)?;
    }
    Ok(())
}
