use smallvec::SmallVec;

use super::{ActionOracle, Generator, GeneratorInfo, GroupWord, PointId};
use crate::error::{Error, Result};

/// Reduced word; letter `2i` is `x_i`, letter `2i+1` is `x_i^-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(pub SmallVec<[u8; 24]>);

impl FreeWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn letter(g: Generator) -> u8 {
    (2 * g.index + g.inverted as usize) as u8
}

fn gen_of(l: u8) -> Generator {
    Generator { index: (l / 2) as usize, inverted: l % 2 == 1 }
}

/// The free group `F_k` acting on itself by left multiplication.
#[derive(Clone, Debug)]
pub struct FreeGroup {
    rank: usize,
    gens: Vec<GeneratorInfo>,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 127 {
            return Err(Error::Config(format!("free group rank must lie in 1..=127, got {rank}")));
        }
        let gens = (0..rank)
            .map(|i| GeneratorInfo { name: format!("x{i}"), involution: false })
            .collect();
        Ok(FreeGroup { rank, gens })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Free reduction of an arbitrary word.
    pub fn reduce(&self, w: &GroupWord) -> FreeWord {
        let mut out: SmallVec<[u8; 24]> = SmallVec::new();
        for &g in &w.0 {
            push_letter(&mut out, letter(g));
        }
        FreeWord(out)
    }
}

fn push_letter(w: &mut SmallVec<[u8; 24]>, l: u8) {
    if w.last() == Some(&(l ^ 1)) {
        w.pop();
    } else {
        w.push(l);
    }
}

impl ActionOracle for FreeGroup {
    type Elem = FreeWord;
    type Point = FreeWord;

    fn name(&self) -> String {
        format!("free:{}", self.rank)
    }
    fn generators(&self) -> &[GeneratorInfo] {
        &self.gens
    }
    fn identity(&self) -> FreeWord {
        FreeWord::default()
    }
    fn base_generator(&self, index: usize) -> FreeWord {
        FreeWord(SmallVec::from_slice(&[(2 * index) as u8]))
    }
    fn mul(&self, a: &FreeWord, b: &FreeWord) -> FreeWord {
        let mut k = 0;
        while k < a.len() && k < b.len() && a.0[a.len() - 1 - k] == b.0[k] ^ 1 {
            k += 1;
        }
        let mut out: SmallVec<[u8; 24]> = SmallVec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a.0[..a.len() - k]);
        out.extend_from_slice(&b.0[k..]);
        FreeWord(out)
    }
    fn inverse(&self, a: &FreeWord) -> FreeWord {
        FreeWord(a.0.iter().rev().map(|l| l ^ 1).collect())
    }
    fn act(&self, g: &FreeWord, x: &FreeWord) -> FreeWord {
        self.mul(g, x)
    }
    fn act_gen(&self, g: Generator, x: &FreeWord) -> Result<FreeWord> {
        if g.index >= self.rank {
            return Err(Error::Domain(format!("generator index {} out of range for free:{}", g.index, self.rank)));
        }
        let l = letter(g);
        let mut out: SmallVec<[u8; 24]> = SmallVec::with_capacity(x.len() + 1);
        if x.0.first() == Some(&(l ^ 1)) {
            out.extend_from_slice(&x.0[1..]);
        } else {
            out.push(l);
            out.extend_from_slice(&x.0);
        }
        Ok(FreeWord(out))
    }
    fn base_point(&self) -> FreeWord {
        FreeWord::default()
    }
    fn encode_point(&self, x: &FreeWord) -> PointId {
        PointId::Word(x.0.iter().map(|&l| gen_of(l)).collect())
    }
    fn decode_point(&self, id: &PointId) -> Result<FreeWord> {
        match id {
            PointId::Word(w) => {
                if let Some(g) = w.iter().find(|g| g.index >= self.rank) {
                    return Err(Error::Encoding(format!("letter x{} outside free:{}", g.index, self.rank)));
                }
                let r = self.reduce(&GroupWord(w.clone()));
                if r.len() != w.len() {
                    return Err(Error::Encoding(format!("{id} is not freely reduced")));
                }
                Ok(r)
            }
            other => Err(Error::Encoding(format!("{other} is not a point of free:{}", self.rank))),
        }
    }
    fn format_elem(&self, g: &FreeWord) -> String {
        self.encode_point(g).to_string()
    }
    fn validate_elem(&self, g: &FreeWord) -> Result<()> {
        match g.0.iter().find(|&&l| l as usize >= 2 * self.rank) {
            Some(l) => Err(Error::Config(format!("letter {l} outside free:{}", self.rank))),
            None => Ok(()),
        }
    }
    fn word_length(&self, g: &FreeWord) -> Option<u64> {
        Some(g.len() as u64)
    }
    fn normal_word(&self, g: &FreeWord) -> Option<GroupWord> {
        Some(GroupWord(g.0.iter().map(|&l| gen_of(l)).collect()))
    }
    fn free_rank(&self) -> Option<usize> {
        Some(self.rank)
    }
    fn parse_point(&self, s: &str) -> Result<FreeWord> {
        let w = GroupWord::parse(self, s)?;
        Ok(self.reduce(&w))
    }
}
