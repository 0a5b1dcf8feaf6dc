use smallvec::SmallVec;

use super::{ActionOracle, GeneratorInfo, Generator, GroupWord, PointId};
use crate::error::{Error, Result};

pub type Coords = SmallVec<[i64; 4]>;

/// ℤ^d acting on itself by translation; generators are the unit vectors `e1..ed`.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    gens: Vec<GeneratorInfo>,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("lattice dimension must be positive".into()));
        }
        let gens = (1..=dim)
            .map(|i| GeneratorInfo { name: format!("e{i}"), involution: false })
            .collect();
        Ok(Lattice { dim, gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, c: &[i64]) -> Coords {
        Coords::from_slice(c)
    }
}

impl ActionOracle for Lattice {
    type Elem = Coords;
    type Point = Coords;

    fn name(&self) -> String {
        format!("zd:{}", self.dim)
    }
    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }
    fn identity(&self) -> Coords {
        SmallVec::from_elem(0, self.dim)
    }
    fn base_generator(&self, index: usize) -> Coords {
        let mut v = self.identity();
        v[index] = 1;
        v
    }
    fn mul(&self, a: &Coords, b: &Coords) -> Coords {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn inverse(&self, a: &Coords) -> Coords {
        a.iter().map(|x| -x).collect()
    }
    fn act(&self, g: &Coords, x: &Coords) -> Coords {
        self.mul(g, x)
    }
    fn act_gen(&self, g: Generator, x: &Coords) -> Result<Coords> {
        if g.index >= self.dim {
            return Err(Error::Domain(format!("generator index {} out of range for zd:{}", g.index, self.dim)));
        }
        let mut y = x.clone();
        y[g.index] += if g.inverted { -1 } else { 1 };
        Ok(y)
    }
    fn base_point(&self) -> Coords {
        self.identity()
    }
    fn encode_point(&self, x: &Coords) -> PointId {
        PointId::Lattice(x.to_vec())
    }
    fn decode_point(&self, id: &PointId) -> Result<Coords> {
        match id {
            PointId::Lattice(v) if v.len() == self.dim => Ok(Coords::from_slice(v)),
            other => Err(Error::Encoding(format!("{other} is not a point of zd:{}", self.dim))),
        }
    }
    fn format_elem(&self, g: &Coords) -> String {
        self.encode_point(g).to_string()
    }
    fn validate_elem(&self, g: &Coords) -> Result<()> {
        if g.len() != self.dim {
            return Err(Error::Config(format!("element of dimension {} used with zd:{}", g.len(), self.dim)));
        }
        Ok(())
    }
    fn word_length(&self, g: &Coords) -> Option<u64> {
        Some(g.iter().map(|c| c.unsigned_abs()).sum())
    }
    fn normal_word(&self, g: &Coords) -> Option<GroupWord> {
        let mut w = Vec::new();
        for (i, &c) in g.iter().enumerate() {
            let gen = if c < 0 { Generator::inv(i) } else { Generator::new(i) };
            w.extend(std::iter::repeat_n(gen, c.unsigned_abs() as usize));
        }
        Some(GroupWord(w))
    }
    fn parse_point(&self, s: &str) -> Result<Coords> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let v: Vec<i64> = body
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Encoding(format!("bad lattice point {s:?}")))?;
        self.decode_point(&PointId::Lattice(v))
    }
}
