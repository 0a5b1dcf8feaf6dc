use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{ActionOracle, GeneratorInfo, PointId};
use crate::error::{Error, Result};
use crate::weight::{parse_rational, ratio, Rational};

/// Dyadic rational in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic(pub Rational);

impl Dyadic {
    pub fn new(r: Rational) -> Result<Self> {
        let d = r.denom();
        let is_pow2 = d > &BigInt::zero() && (d & (d - BigInt::one())).is_zero();
        if !is_pow2 || r < Rational::zero() || r > Rational::one() {
            return Err(Error::Encoding(format!("{r} is not a dyadic rational in [0,1]")));
        }
        Ok(Dyadic(r))
    }
}

/// Piecewise-linear homeomorphism of `[0,1]`; breakpoints from `(0,0)` to `(1,1)`, no redundant ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlMap {
    pub bps: Vec<(Rational, Rational)>,
}

impl PlMap {
    pub fn from_pairs(pairs: &[((i64, i64), (i64, i64))]) -> Self {
        PlMap::canonical(pairs.iter().map(|&((a, b), (c, d))| (ratio(a, b), ratio(c, d))).collect())
    }

    fn canonical(bps: Vec<(Rational, Rational)>) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(bps.len());
        for p in bps {
            if out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (y1 - y0) * (&p.0 - x1) == (&p.1 - y1) * (x1 - x0) {
                    out.pop();
                }
            }
            out.push(p);
        }
        PlMap { bps: out }
    }

    pub fn identity() -> Self {
        PlMap { bps: vec![(Rational::zero(), Rational::zero()), (Rational::one(), Rational::one())] }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let i = match self.bps.binary_search_by(|(bx, _)| bx.cmp(x)) {
            Ok(i) => return self.bps[i].1.clone(),
            Err(i) => i.clamp(1, self.bps.len() - 1),
        };
        let (x0, y0) = &self.bps[i - 1];
        let (x1, y1) = &self.bps[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn inverse(&self) -> Self {
        PlMap { bps: self.bps.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PlMap) -> Self {
        let inv = other.inverse();
        let mut xs: Vec<Rational> = other.bps.iter().map(|(x, _)| x.clone()).collect();
        xs.extend(self.bps.iter().map(|(y, _)| inv.eval(y)));
        xs.sort();
        xs.dedup();
        PlMap::canonical(xs.into_iter().map(|x| {
            let y = self.eval(&other.eval(&x));
            (x, y)
        }).collect())
    }
}

/// Thompson's group F acting on the dyadic rationals of `[0,1]`.
#[derive(Clone, Debug)]
pub struct ThompsonF {
    gens: Vec<GeneratorInfo>,
    x0: PlMap,
    x1: PlMap,
}

impl Default for ThompsonF {
    fn default() -> Self {
        Self::new()
    }
}

impl ThompsonF {
    pub fn new() -> Self {
        ThompsonF {
            gens: vec![
                GeneratorInfo { name: "x0".into(), involution: false },
                GeneratorInfo { name: "x1".into(), involution: false },
            ],
            x0: PlMap::from_pairs(&[((0, 1), (0, 1)), ((1, 2), (1, 4)), ((3, 4), (1, 2)), ((1, 1), (1, 1))]),
            x1: PlMap::from_pairs(&[
                ((0, 1), (0, 1)),
                ((1, 2), (1, 2)),
                ((3, 4), (5, 8)),
                ((7, 8), (3, 4)),
                ((1, 1), (1, 1)),
            ]),
        }
    }
}

impl ActionOracle for ThompsonF {
    type Elem = PlMap;
    type Point = Dyadic;

    fn name(&self) -> String {
        "thompson_f_dyadic".into()
    }
    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }
    fn identity(&self) -> PlMap {
        PlMap::identity()
    }
    fn base_generator(&self, index: usize) -> PlMap {
        if index == 0 {
            self.x0.clone()
        } else {
            self.x1.clone()
        }
    }
    fn mul(&self, a: &PlMap, b: &PlMap) -> PlMap {
        a.compose(b)
    }
    fn inverse(&self, a: &PlMap) -> PlMap {
        a.inverse()
    }
    fn act(&self, g: &PlMap, x: &Dyadic) -> Dyadic {
        Dyadic(g.eval(&x.0))
    }
    fn base_point(&self) -> Dyadic {
        Dyadic(ratio(1, 2))
    }
    fn encode_point(&self, x: &Dyadic) -> PointId {
        let q = x.0.denom().bits() as u32 - 1;
        PointId::Dyadic { p: x.0.numer().to_biguint().unwrap_or_default(), q }
    }
    fn decode_point(&self, id: &PointId) -> Result<Dyadic> {
        match id {
            PointId::Dyadic { p, q } => {
                let d = BigUint::one() << (*q as usize);
                Dyadic::new(Rational::new(BigInt::from(p.clone()), BigInt::from(d)))
            }
            other => Err(Error::Encoding(format!("{other} is not a dyadic point"))),
        }
    }
    fn format_elem(&self, g: &PlMap) -> String {
        let s: Vec<String> = g.bps.iter().map(|(x, y)| format!("({x},{y})")).collect();
        format!("pl[{}]", s.join(" "))
    }
    fn parse_point(&self, s: &str) -> Result<Dyadic> {
        Dyadic::new(parse_rational(s).map_err(|e| Error::Encoding(e.to_string()))?)
    }
}
