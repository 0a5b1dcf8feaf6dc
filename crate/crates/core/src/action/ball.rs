use std::collections::VecDeque;
use std::io::Write;

use rustc_hash::FxHashMap;

use super::{ActionOracle, Generator};
use crate::error::{Error, Result};

/// Breadth-first ball in the Schreier graph of the symmetric generating set.
#[derive(Clone, Debug)]
pub struct SchreierBall<P> {
    pub radius: u32,
    pub points: Vec<P>,
    pub depth: Vec<u32>,
    pub index: FxHashMap<P, usize>,
    /// `(src, generator, dst)` for every generator step between ball points.
    pub edges: Vec<(usize, Generator, usize)>,
}

impl<P: Clone + Eq + std::hash::Hash> SchreierBall<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.index.contains_key(p)
    }

    /// Points at depth at most `r`.
    pub fn sub_ball(&self, r: u32) -> impl Iterator<Item = &P> {
        self.points.iter().zip(&self.depth).filter(move |(_, &d)| d <= r).map(|(p, _)| p)
    }
}

/// Ball of radius `r` about `x`; fails once more than `cap` points are discovered.
pub fn orbit_ball<A: ActionOracle + ?Sized>(a: &A, x: &A::Point, r: u32, cap: usize) -> Result<SchreierBall<A::Point>> {
    let gens = a.symmetric_generators();
    let gen_elems: Vec<A::Elem> = gens.iter().map(|&g| a.generator(g)).collect::<Result<_>>()?;
    let mut points = vec![x.clone()];
    let mut depth = vec![0];
    let mut index = FxHashMap::default();
    index.insert(x.clone(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let d = depth[i];
        for (g, ge) in gens.iter().zip(&gen_elems) {
            let y = a.act(ge, &points[i]);
            let j = match index.get(&y) {
                Some(&j) => j,
                None if d < r => {
                    if points.len() >= cap {
                        return Err(Error::resource(
                            format!("orbit ball of radius {r} in {}", a.name()),
                            format!("more than {cap} points"),
                            cap,
                        ));
                    }
                    let j = points.len();
                    index.insert(y.clone(), j);
                    points.push(y);
                    depth.push(d + 1);
                    queue.push_back(j);
                    j
                }
                None => continue,
            };
            edges.push((i, *g, j));
        }
    }
    Ok(SchreierBall { radius: r, points, depth, index, edges })
}

/// Edge list with header `src,generator,dst`; points in their textual encoding.
pub fn write_ball_csv<A: ActionOracle + ?Sized, W: Write>(a: &A, ball: &SchreierBall<A::Point>, mut w: W) -> Result<()> {
    writeln!(w, "src,generator,dst")?;
    let names = a.generators();
    for &(s, g, d) in &ball.edges {
        let gname = format!("{}{}", names[g.index].name, if g.inverted { "^-1" } else { "" });
        writeln!(
            w,
            "\"{}\",{},\"{}\"",
            a.encode_point(&ball.points[s]),
            gname,
            a.encode_point(&ball.points[d])
        )?;
    }
    Ok(())
}
