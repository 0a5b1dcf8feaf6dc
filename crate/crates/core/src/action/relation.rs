use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{ActionOracle, GeneratorInfo, PointId};
use crate::error::{Error, Result};
use crate::weight::{format_rational, parse_rational, ratio, Rational};

/// Permutation of `0..n`, stored as the image of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&y| self.0[y as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &y) in self.0.iter().enumerate() {
            out[y as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn support(&self) -> Vec<u32> {
        (0..self.0.len() as u32).filter(|&i| self.apply(i) != i).collect()
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y as usize >= n || std::mem::replace(&mut seen[y as usize], true) {
                return Err(Error::Encoding(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Perm(images))
    }

    /// Cycle notation such as `(0 1 2)(3 4)`; `()` is the identity.
    pub fn from_cycles(n: usize, s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("bad cycle notation {s:?}: {m}"));
        let mut img: Vec<u32> = (0..n as u32).collect();
        let mut seen = vec![false; n];
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = open.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let cyc: Vec<u32> = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| bad("non-integer point")))
                .collect::<Result<_>>()?;
            for &p in &cyc {
                if p as usize >= n {
                    return Err(bad("point out of range"));
                }
                if std::mem::replace(&mut seen[p as usize], true) {
                    return Err(bad("point repeated"));
                }
            }
            for (k, &p) in cyc.iter().enumerate() {
                img[p as usize] = cyc[(k + 1) % cyc.len()];
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Perm(img))
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() as u32 {
            if seen[s as usize] {
                continue;
            }
            let mut cyc = vec![s];
            seen[s as usize] = true;
            let mut x = self.apply(s);
            while x != s {
                seen[x as usize] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cyc: Vec<Vec<u32>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cyc.is_empty() {
            return write!(f, "()");
        }
        for c in cyc {
            let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

/// Finite probability space with a relation given by the orbits of one permutation `T`.
#[derive(Clone, Debug)]
pub struct FiniteRelationSpace {
    weights: Vec<Rational>,
    t: Perm,
    class_of: Vec<usize>,
    classes: Vec<Vec<u32>>,
    gens: Vec<(String, Perm)>,
}

impl FiniteRelationSpace {
    /// `extra` generators must preserve every `T`-orbit.
    pub fn new(weights: Vec<Rational>, t: Perm, extra: Vec<(String, Perm)>) -> Result<Self> {
        let n = weights.len();
        if n == 0 || t.len() != n {
            return Err(Error::Config("relation space needs n > 0 points and T on all of them".into()));
        }
        if weights.iter().any(|w| *w <= Rational::zero()) {
            return Err(Error::Config("point weights must be positive".into()));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::Config(format!("point weights sum to {total}, not 1")));
        }
        let classes = t.cycles();
        let mut class_of = vec![0; n];
        for (k, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x as usize] = k;
            }
        }
        let mut gens = vec![("T".to_string(), t.clone())];
        for (name, g) in extra {
            if g.len() != n {
                return Err(Error::Config(format!("generator {name} acts on {} points, space has {n}", g.len())));
            }
            if (0..n as u32).any(|x| class_of[g.apply(x) as usize] != class_of[x as usize]) {
                return Err(Error::Config(format!("generator {name} does not preserve the T-orbits")));
            }
            if gens.iter().any(|(m, _)| *m == name) {
                return Err(Error::Config(format!("duplicate generator name {name}")));
            }
            gens.push((name, g));
        }
        Ok(FiniteRelationSpace { weights, t, class_of, classes, gens })
    }

    /// `n` points in one `T`-cycle with the given weights; `tau` adds the transposition `(0 1)`.
    pub fn cycle(weights: Vec<Rational>, tau: bool) -> Result<Self> {
        let n = weights.len();
        let t = Perm((0..n as u32).map(|i| (i + 1) % n as u32).collect());
        let extra = if tau && n >= 2 {
            vec![("tau".to_string(), Perm::from_cycles(n, "(0 1)")?)]
        } else {
            vec![]
        };
        FiniteRelationSpace::new(weights, t, extra)
    }

    pub fn uniform_cycle(n: usize, tau: bool) -> Result<Self> {
        FiniteRelationSpace::cycle(vec![ratio(1, n as i64); n], tau)
    }

    /// Text format: `points = n`, `weights = uniform | w0 w1 ..`, `T = cycles`, `gen name = cycles`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut weights = None;
        let mut t = None;
        let mut extra = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "points" => n = Some(v.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad point count", ln + 1)))?),
                "weights" => weights = Some(v.to_string()),
                "T" => t = Some(v.to_string()),
                _ => match k.strip_prefix("gen ") {
                    Some(name) => extra.push((name.trim().to_string(), v.to_string())),
                    None => return Err(Error::Parse(format!("line {}: unknown key {k:?}", ln + 1))),
                },
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing `points`".into()))?;
        let w = match weights.as_deref() {
            None | Some("uniform") => vec![ratio(1, n as i64); n],
            Some(ws) => {
                let w: Vec<Rational> = ws.split_whitespace().map(parse_rational).collect::<Result<_>>()?;
                if w.len() != n {
                    return Err(Error::Parse(format!("{} weights for {n} points", w.len())));
                }
                w
            }
        };
        let t = Perm::from_cycles(n, &t.ok_or_else(|| Error::Parse("missing `T`".into()))?)?;
        let extra = extra
            .into_iter()
            .map(|(name, c)| Ok((name, Perm::from_cycles(n, &c)?)))
            .collect::<Result<_>>()?;
        FiniteRelationSpace::new(w, t, extra)
    }

    pub fn to_text(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(format_rational).collect();
        let mut s = format!("points = {}\nweights = {}\nT = {}\n", self.len(), w.join(" "), self.t);
        for (name, g) in &self.gens[1..] {
            s.push_str(&format!("gen {name} = {g}\n"));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: u32) -> &Rational {
        &self.weights[x as usize]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn t(&self) -> &Perm {
        &self.t
    }

    pub fn generators(&self) -> &[(String, Perm)] {
        &self.gens
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_of(&self, x: u32) -> usize {
        self.class_of[x as usize]
    }

    pub fn related(&self, x: u32, y: u32) -> bool {
        self.class_of(x) == self.class_of(y)
    }

    pub fn mass<'a>(&self, pts: impl IntoIterator<Item = &'a u32>) -> Rational {
        pts.into_iter().map(|&x| self.weight(x)).sum()
    }

    /// Left-counting mass of a set of pairs: `Σ μ(x)` over its pairs `(x, y)`.
    pub fn lamp_mass<'a>(&self, pairs: impl IntoIterator<Item = &'a (u32, u32)>) -> Rational {
        pairs.into_iter().map(|&(x, _)| self.weight(x)).sum()
    }

    /// Uniform distance `μ{x : g x ≠ h x}`.
    pub fn uniform_distance(&self, g: &Perm, h: &Perm) -> Rational {
        (0..self.len() as u32).filter(|&x| g.apply(x) != h.apply(x)).map(|x| self.weight(x)).sum()
    }

    /// Whether `g` maps every point into its own `T`-orbit.
    pub fn in_full_group(&self, g: &Perm) -> bool {
        g.len() == self.len() && (0..self.len() as u32).all(|x| self.related(x, g.apply(x)))
    }
}

/// The group generated by the space's generators, acting on its points.
#[derive(Clone, Debug)]
pub struct FullGroupAction {
    space: Arc<FiniteRelationSpace>,
    gens: Vec<GeneratorInfo>,
}

impl FullGroupAction {
    pub fn new(space: Arc<FiniteRelationSpace>) -> Self {
        let gens = space
            .generators()
            .iter()
            .map(|(name, g)| GeneratorInfo { name: name.clone(), involution: g.compose(g) == Perm::identity(g.len()) })
            .collect();
        FullGroupAction { space, gens }
    }

    pub fn space(&self) -> &Arc<FiniteRelationSpace> {
        &self.space
    }
}

impl ActionOracle for FullGroupAction {
    type Elem = Perm;
    type Point = u32;

    fn name(&self) -> String {
        format!("finite_relation:{}", self.space.len())
    }
    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }
    fn identity(&self) -> Perm {
        Perm::identity(self.space.len())
    }
    fn base_generator(&self, index: usize) -> Perm {
        self.space.generators()[index].1.clone()
    }
    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }
    fn inverse(&self, a: &Perm) -> Perm {
        a.inverse()
    }
    fn act(&self, g: &Perm, x: &u32) -> u32 {
        g.apply(*x)
    }
    fn base_point(&self) -> u32 {
        0
    }
    fn encode_point(&self, x: &u32) -> PointId {
        PointId::Index(*x as usize)
    }
    fn decode_point(&self, id: &PointId) -> Result<u32> {
        match id {
            PointId::Index(i) if *i < self.space.len() => Ok(*i as u32),
            other => Err(Error::Encoding(format!("{other} is not a point of {}", self.name()))),
        }
    }
    fn format_elem(&self, g: &Perm) -> String {
        g.to_string()
    }
    fn validate_elem(&self, g: &Perm) -> Result<()> {
        if !self.space.in_full_group(g) {
            return Err(Error::Config(format!("{g} is not in the full group of {}", self.name())));
        }
        Ok(())
    }
    fn parse_point(&self, s: &str) -> Result<u32> {
        let i: usize = s.trim().trim_start_matches('#').parse().map_err(|_| Error::Encoding(format!("bad point {s:?}")))?;
        self.decode_point(&PointId::Index(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_roundtrip() {
        let p = Perm::from_cycles(6, "(0 3 1)(4 5)").unwrap();
        assert_eq!(p.to_string(), "(0 3 1)(4 5)");
        assert_eq!(Perm::from_cycles(6, &p.to_string()).unwrap(), p);
        assert!(Perm::from_cycles(3, "(0 1)(1 2)").is_err());
    }

    #[test]
    fn space_text_roundtrip() {
        let s = FiniteRelationSpace::parse("points = 4\nweights = 1/2 1/4 1/8 1/8\nT = (0 1)(2 3)\ngen s = (2 3)\n").unwrap();
        assert_eq!(s.classes().len(), 2);
        let back = FiniteRelationSpace::parse(&s.to_text()).unwrap();
        assert_eq!(back.weights(), s.weights());
        assert!(FiniteRelationSpace::parse("points = 4\nT = (0 1)(2 3)\ngen s = (1 2)\n").is_err());
    }
}
