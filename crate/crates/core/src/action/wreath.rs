use smallvec::SmallVec;

use super::{ActionOracle, Generator, GeneratorInfo, GroupWord, PointId};
use crate::error::{Error, Result};

/// Element of ℤ₂≀ℤ: a finite set of lit lamps (sorted) and the lamplighter position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampElem {
    pub lamps: SmallVec<[i64; 8]>,
    pub pos: i64,
}

impl LampElem {
    pub fn new(mut lamps: Vec<i64>, pos: i64) -> Result<Self> {
        lamps.sort_unstable();
        if lamps.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Encoding("repeated lamp position".into()));
        }
        Ok(LampElem { lamps: SmallVec::from_vec(lamps), pos })
    }

    pub fn toggle(&mut self, at: i64) {
        match self.lamps.binary_search(&at) {
            Ok(i) => {
                self.lamps.remove(i);
            }
            Err(i) => self.lamps.insert(i, at),
        }
    }
}

fn sym_diff_shifted(a: &[i64], b: &[i64], shift: i64) -> SmallVec<[i64; 8]> {
    let mut out = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let bj = b.get(j).map(|v| v + shift);
        match (a.get(i), bj) {
            (Some(&x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(&x), Some(y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(y)) | (None, Some(y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// The lamplighter group ℤ₂≀ℤ acting on itself; `a` moves the lamplighter, `t` toggles its lamp.
#[derive(Clone, Debug)]
pub struct Lamplighter {
    gens: Vec<GeneratorInfo>,
}

impl Default for Lamplighter {
    fn default() -> Self {
        Self::new()
    }
}

impl Lamplighter {
    pub fn new() -> Self {
        Lamplighter {
            gens: vec![
                GeneratorInfo { name: "a".into(), involution: false },
                GeneratorInfo { name: "t".into(), involution: true },
            ],
        }
    }

    /// Visiting order of a shortest route from 0 through every lit lamp to `pos`.
    fn route(&self, g: &LampElem) -> Vec<i64> {
        let lo = g.lamps.first().copied().unwrap_or(0).min(0).min(g.pos);
        let hi = g.lamps.last().copied().unwrap_or(0).max(0).max(g.pos);
        let left_first = -lo + (hi - lo) + (hi - g.pos);
        let right_first = hi + (hi - lo) + (g.pos - lo);
        let mut path = vec![0];
        let walk_to = |path: &mut Vec<i64>, to: i64| {
            let mut cur = *path.last().unwrap();
            while cur != to {
                cur += (to - cur).signum();
                path.push(cur);
            }
        };
        if left_first <= right_first {
            walk_to(&mut path, lo);
            walk_to(&mut path, hi);
        } else {
            walk_to(&mut path, hi);
            walk_to(&mut path, lo);
        }
        walk_to(&mut path, g.pos);
        path
    }
}

impl ActionOracle for Lamplighter {
    type Elem = LampElem;
    type Point = LampElem;

    fn name(&self) -> String {
        "wreath_z2_z".into()
    }
    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }
    fn identity(&self) -> LampElem {
        LampElem::default()
    }
    fn base_generator(&self, index: usize) -> LampElem {
        match index {
            0 => LampElem { lamps: SmallVec::new(), pos: 1 },
            _ => LampElem { lamps: SmallVec::from_slice(&[0]), pos: 0 },
        }
    }
    fn mul(&self, a: &LampElem, b: &LampElem) -> LampElem {
        LampElem { lamps: sym_diff_shifted(&a.lamps, &b.lamps, a.pos), pos: a.pos + b.pos }
    }
    fn inverse(&self, a: &LampElem) -> LampElem {
        LampElem { lamps: a.lamps.iter().map(|c| c - a.pos).collect(), pos: -a.pos }
    }
    fn act(&self, g: &LampElem, x: &LampElem) -> LampElem {
        self.mul(g, x)
    }
    fn base_point(&self) -> LampElem {
        LampElem::default()
    }
    fn encode_point(&self, x: &LampElem) -> PointId {
        PointId::Lamp { lamps: x.lamps.to_vec(), pos: x.pos }
    }
    fn decode_point(&self, id: &PointId) -> Result<LampElem> {
        match id {
            PointId::Lamp { lamps, pos } => LampElem::new(lamps.clone(), *pos),
            other => Err(Error::Encoding(format!("{other} is not a point of wreath_z2_z"))),
        }
    }
    fn format_elem(&self, g: &LampElem) -> String {
        self.encode_point(g).to_string()
    }
    fn word_length(&self, g: &LampElem) -> Option<u64> {
        let route = self.route(g);
        Some((g.lamps.len() + route.len() - 1) as u64)
    }
    fn normal_word(&self, g: &LampElem) -> Option<GroupWord> {
        let route = self.route(g);
        let mut pending: Vec<i64> = g.lamps.to_vec();
        let mut w = Vec::new();
        let mut cur = 0;
        for (k, &p) in route.iter().enumerate() {
            if k > 0 {
                w.push(if p > cur { Generator::new(0) } else { Generator::inv(0) });
                cur = p;
            }
            if let Some(i) = pending.iter().position(|&l| l == p) {
                pending.swap_remove(i);
                w.push(Generator::new(1));
            }
        }
        Some(GroupWord(w))
    }
    fn parse_point(&self, s: &str) -> Result<LampElem> {
        let bad = || Error::Encoding(format!("bad lamplighter point {s:?}, expected {{l1,l2,..}}@pos"));
        let (set, pos) = s.trim().split_once('@').ok_or_else(bad)?;
        let body = set.trim().strip_prefix('{').and_then(|b| b.strip_suffix('}')).ok_or_else(bad)?;
        let lamps: Vec<i64> = body
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        LampElem::new(lamps, pos.trim().parse().map_err(|_| bad())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggling_matches_right_multiplication() {
        let l = Lamplighter::new();
        let mut g = LampElem::new(vec![-2, 3], 1).unwrap();
        let t = l.base_generator(1);
        let expect = {
            let mut h = g.clone();
            h.toggle(1);
            h
        };
        g = l.mul(&g, &t);
        assert_eq!(g, expect);
    }
}
