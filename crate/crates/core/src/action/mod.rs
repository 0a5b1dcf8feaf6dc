//! Group actions presented by generator oracles.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

mod ball;
mod catalogue;
mod free;
mod lattice;
mod relation;
mod thompson;
mod wreath;

pub use ball::{orbit_ball, write_ball_csv, SchreierBall};
pub use catalogue::{build_action, AnyAction};
pub use free::{FreeGroup, FreeWord};
pub use lattice::{Coords, Lattice};
pub use relation::{FiniteRelationSpace, FullGroupAction, Perm};
pub use thompson::{Dyadic, PlMap, ThompsonF};
pub use wreath::{LampElem, Lamplighter};

/// Bound shared by group elements and points.
pub trait Key: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static {}
impl<T: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static> Key for T {}

/// A base generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub index: usize,
    pub inverted: bool,
}

impl Generator {
    pub fn new(index: usize) -> Self {
        Generator { index, inverted: false }
    }
    pub fn inv(index: usize) -> Self {
        Generator { index, inverted: true }
    }
    pub fn inverse(self) -> Self {
        Generator { index: self.index, inverted: !self.inverted }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorInfo {
    pub name: String,
    pub involution: bool,
}

/// A word in the generators, applied rightmost letter first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(pub Vec<Generator>);

impl GroupWord {
    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn evaluate<A: ActionOracle + ?Sized>(&self, a: &A) -> Result<A::Elem> {
        let mut e = a.identity();
        for &g in &self.0 {
            e = a.mul(&e, &a.generator(g)?);
        }
        Ok(e)
    }

    /// Tokens separated by `.` or whitespace; `name^-1` for inverses; `1` or empty is the identity.
    pub fn parse<A: ActionOracle + ?Sized>(a: &A, s: &str) -> Result<GroupWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s == "e" {
            return Ok(GroupWord::default());
        }
        let gens = a.generators();
        let mut out = Vec::new();
        for tok in s.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (name, inverted) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let index = gens
                .iter()
                .position(|g| g.name == name)
                .ok_or_else(|| Error::Domain(format!("unknown generator {name:?} for {}", a.name())))?;
            let inverted = inverted && !gens[index].involution;
            out.push(Generator { index, inverted });
        }
        Ok(GroupWord(out))
    }

    pub fn display<A: ActionOracle + ?Sized>(&self, a: &A) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let gens = a.generators();
        self.0
            .iter()
            .map(|g| {
                let n = &gens[g.index].name;
                if g.inverted {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Serializable point identifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointId {
    Lattice(Vec<i64>),
    /// Reduced word, letters as `(generator index, inverted)`.
    Word(Vec<Generator>),
    Lamp { lamps: Vec<i64>, pos: i64 },
    /// The dyadic rational `p / 2^q`.
    Dyadic { p: BigUint, q: u32 },
    Index(usize),
}

impl Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointId::Lattice(v) => {
                let s: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", s.join(","))
            }
            PointId::Word(w) => {
                if w.is_empty() {
                    return write!(f, "1");
                }
                let s: Vec<String> = w
                    .iter()
                    .map(|g| format!("x{}{}", g.index, if g.inverted { "^-1" } else { "" }))
                    .collect();
                write!(f, "{}", s.join("."))
            }
            PointId::Lamp { lamps, pos } => {
                let s: Vec<String> = lamps.iter().map(|c| c.to_string()).collect();
                write!(f, "{{{}}}@{}", s.join(","), pos)
            }
            PointId::Dyadic { p, q } => write!(f, "{p}/2^{q}"),
            PointId::Index(i) => write!(f, "#{i}"),
        }
    }
}

impl Serialize for PointId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A group given by generators, acting on a point set.
///
/// `mul(a, b)` acts as `b` first, then `a`.
pub trait ActionOracle: Send + Sync {
    type Elem: Key;
    type Point: Key;

    fn name(&self) -> String;
    fn generators(&self) -> &[GeneratorInfo];
    fn identity(&self) -> Self::Elem;
    fn base_generator(&self, index: usize) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn act(&self, g: &Self::Elem, x: &Self::Point) -> Self::Point;
    fn base_point(&self) -> Self::Point;
    fn encode_point(&self, x: &Self::Point) -> PointId;
    fn decode_point(&self, id: &PointId) -> Result<Self::Point>;
    fn format_elem(&self, g: &Self::Elem) -> String;

    /// Rejects elements built for a different instance (dimension, rank, size).
    fn validate_elem(&self, _g: &Self::Elem) -> Result<()> {
        Ok(())
    }

    fn generator(&self, g: Generator) -> Result<Self::Elem> {
        if g.index >= self.generators().len() {
            return Err(Error::Domain(format!(
                "generator index {} out of range for {} ({} generators)",
                g.index,
                self.name(),
                self.generators().len()
            )));
        }
        let e = self.base_generator(g.index);
        Ok(if g.inverted { self.inverse(&e) } else { e })
    }

    fn act_gen(&self, g: Generator, x: &Self::Point) -> Result<Self::Point> {
        Ok(self.act(&self.generator(g)?, x))
    }

    /// Word metric on the group, when known in closed form.
    fn word_length(&self, _g: &Self::Elem) -> Option<u64> {
        None
    }

    /// Canonical word representing `g`, when the group has a normal form.
    fn normal_word(&self, _g: &Self::Elem) -> Option<GroupWord> {
        None
    }

    /// Rank when the action is a free group acting on itself.
    fn free_rank(&self) -> Option<usize> {
        None
    }

    fn symmetric_generators(&self) -> Vec<Generator> {
        let mut out = Vec::new();
        for (i, info) in self.generators().iter().enumerate() {
            out.push(Generator::new(i));
            if !info.involution {
                out.push(Generator::inv(i));
            }
        }
        out
    }

    fn parse_point(&self, s: &str) -> Result<Self::Point> {
        let _ = s;
        Err(Error::Encoding(format!("{} has no textual point syntax", self.name())))
    }
}

/// Apply a word to a point, rightmost letter first.
pub fn apply_word<A: ActionOracle + ?Sized>(a: &A, w: &GroupWord, x: &A::Point) -> Result<A::Point> {
    let mut p = x.clone();
    for &g in w.0.iter().rev() {
        p = a.act_gen(g, &p)?;
    }
    Ok(p)
}

/// Normal form of the element a word evaluates to.
pub fn normal_form<A: ActionOracle + ?Sized>(a: &A, w: &GroupWord) -> Result<Option<GroupWord>> {
    Ok(a.normal_word(&w.evaluate(a)?))
}
