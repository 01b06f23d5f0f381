//! Persistence of vertex-filtered Rips complexes without materializing the
//! top-dimensional simplexes.
//!
//! Works dually, reducing coboundary matrices (persistent cohomology yields
//! the same pairs as homology). Cofacets of a simplex are the common
//! neighbours of its vertices in the `2r` threshold graph, so only the
//! simplexes of the dimension being reduced are listed.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::complexes::{check_levels, threshold_graph};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, PointCloud};

use super::diagram::{Pair, PersistenceDiagram};
use super::reduce::ElderUnionFind;

/// Largest simplex dimension the packed codes can hold.
pub const MAX_SIMPLEX_DIM: usize = 3;

/// Total order on simplexes of one dimension: filtration index, then
/// diameter, then the packed vertex code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Key {
    index: u32,
    diam: u64,
    code: u128,
}

/// Packs descending vertex labels, 32 bits each, most significant first.
fn encode(desc: &[u32]) -> u128 {
    desc.iter().enumerate().fold(0u128, |acc, (i, &v)| {
        acc | (((v as u128) + 1) << (32 * (3 - i)))
    })
}

fn decode(code: u128, out: &mut Vec<u32>) {
    out.clear();
    for i in 0..4 {
        let v = (code >> (32 * (3 - i))) as u32;
        if v == 0 {
            break;
        }
        out.push(v - 1);
    }
}

struct Engine<'a> {
    sub: PointCloud,
    vidx: Vec<u32>,
    adj: Vec<Vec<u32>>,
    levels: &'a [f64],
}

impl Engine<'_> {
    fn key_of(&self, desc: &[u32]) -> Key {
        let index = desc.iter().map(|&v| self.vidx[v as usize]).max().unwrap();
        let mut diam = 0.0f64;
        for a in 0..desc.len() {
            for b in a + 1..desc.len() {
                diam = diam.max(dist(
                    self.sub.point(desc[a] as usize),
                    self.sub.point(desc[b] as usize),
                ));
            }
        }
        Key {
            index,
            diam: diam.to_bits(),
            code: encode(desc),
        }
    }

    /// Calls `f` on every cofacet of the simplex with descending vertices
    /// `desc` and key `key`.
    fn for_each_cofacet(
        &self,
        desc: &[u32],
        key: Key,
        common: &mut Vec<u32>,
        f: &mut dyn FnMut(Key),
    ) {
        common.clear();
        common.extend_from_slice(&self.adj[desc[0] as usize]);
        for &v in &desc[1..] {
            let other = &self.adj[v as usize];
            let mut j = 0;
            common.retain(|&w| {
                while j < other.len() && other[j] < w {
                    j += 1;
                }
                j < other.len() && other[j] == w
            });
        }
        let base_diam = f64::from_bits(key.diam);
        let mut verts = [0u32; 4];
        for &w in common.iter() {
            let pw = self.sub.point(w as usize);
            let mut diam = base_diam;
            for &v in desc {
                diam = diam.max(dist(pw, self.sub.point(v as usize)));
            }
            // insert w into the descending tuple
            let pos = desc.iter().position(|&v| v < w).unwrap_or(desc.len());
            verts[..pos].copy_from_slice(&desc[..pos]);
            verts[pos] = w;
            verts[pos + 1..=desc.len()].copy_from_slice(&desc[pos..]);
            f(Key {
                index: key.index.max(self.vidx[w as usize]),
                diam: diam.to_bits(),
                code: encode(&verts[..=desc.len()]),
            });
        }
    }

    /// All `dim`-simplexes with their keys, ascending.
    fn simplices(&self, dim: usize, budget: usize) -> Result<Vec<Key>> {
        let mut out = Vec::new();
        let mut stack: Vec<u32> = Vec::with_capacity(dim + 1);
        let mut desc = Vec::with_capacity(dim + 1);
        // cliques are grown with ascending labels over upper neighbours
        fn grow(
            e: &Engine,
            dim: usize,
            budget: usize,
            stack: &mut Vec<u32>,
            cands: &[u32],
            desc: &mut Vec<u32>,
            out: &mut Vec<Key>,
        ) -> Result<()> {
            if stack.len() == dim + 1 {
                if out.len() >= budget {
                    return Err(Error::CapacityExceeded { budget });
                }
                desc.clear();
                desc.extend(stack.iter().rev());
                out.push(e.key_of(desc));
                return Ok(());
            }
            if stack.len() == dim {
                for &w in cands {
                    if out.len() >= budget {
                        return Err(Error::CapacityExceeded { budget });
                    }
                    desc.clear();
                    desc.push(w);
                    desc.extend(stack.iter().rev());
                    out.push(e.key_of(desc));
                }
                return Ok(());
            }
            for (i, &w) in cands.iter().enumerate() {
                let next: Vec<u32> = cands[i + 1..]
                    .iter()
                    .copied()
                    .filter(|x| e.adj[w as usize].binary_search(x).is_ok())
                    .collect();
                stack.push(w);
                grow(e, dim, budget, stack, &next, desc, out)?;
                stack.pop();
            }
            Ok(())
        }
        for v in 0..self.adj.len() as u32 {
            let upper: Vec<u32> = self.adj[v as usize]
                .iter()
                .copied()
                .filter(|&w| w > v)
                .collect();
            stack.push(v);
            grow(self, dim, budget, &mut stack, &upper, &mut desc, &mut out)?;
            stack.pop();
        }
        out.sort_unstable();
        Ok(out)
    }
}

fn push_pair(out: &mut Vec<Pair>, levels: &[f64], birth: u32, death: Option<u32>) {
    match death {
        None => out.push(Pair::essential(levels[birth as usize])),
        Some(d) if d > birth => out.push(Pair::new(levels[birth as usize], levels[d as usize])),
        Some(_) => {}
    }
}

/// Pops cancelling duplicates off the min-heap and returns its smallest
/// surviving entry, left in place.
fn pivot(heap: &mut BinaryHeap<Reverse<Key>>) -> Option<Key> {
    loop {
        let Reverse(top) = heap.pop()?;
        match heap.peek() {
            Some(Reverse(next)) if *next == top => {
                heap.pop();
            }
            _ => {
                heap.push(Reverse(top));
                return Some(top);
            }
        }
    }
}

/// Persistence diagrams of degrees `0..k_max` (degree 0 alone when
/// `k_max = 0`) of the Rips complex at radius `r` on the points with a
/// filtration index, each simplex entering at the largest index of its
/// vertices. Levels must be strictly decreasing.
///
/// `budget` caps the number of simplexes listed in any one dimension.
pub fn filtered_rips_persistence(
    points: &PointCloud,
    vertex_index: &[Option<u32>],
    levels: &[f64],
    r: f64,
    k_max: usize,
    budget: usize,
) -> Result<Vec<PersistenceDiagram>> {
    if k_max > MAX_SIMPLEX_DIM {
        return Err(invalid(format!(
            "simplex dimension {k_max} above {MAX_SIMPLEX_DIM}"
        )));
    }
    check_levels(levels)?;
    if vertex_index.len() != points.len() {
        return Err(invalid("one filtration index per point is required"));
    }
    if vertex_index
        .iter()
        .flatten()
        .any(|&i| i as usize >= levels.len())
    {
        return Err(invalid("filtration index without a level value"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!(
            "radius must be positive and finite, got {r}"
        )));
    }
    let ids: Vec<usize> = (0..points.len())
        .filter(|&i| vertex_index[i].is_some())
        .collect();
    if ids.len() >= u32::MAX as usize {
        return Err(invalid("too many points"));
    }
    let upper = threshold_graph(points, &ids, r);
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); ids.len()];
    for (a, up) in upper.iter().enumerate() {
        for &b in up {
            adj[a].push(b);
            adj[b as usize].push(a as u32);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let engine = Engine {
        sub: points.select(&ids),
        vidx: ids.iter().map(|&i| vertex_index[i].unwrap()).collect(),
        adj,
        levels,
    };

    let degrees = k_max.max(1);
    let mut diagrams = Vec::with_capacity(degrees);

    if k_max <= 1 {
        return Ok(vec![sweep_components(&engine, k_max == 1)]);
    }

    // degree 0
    let edges = engine.simplices(1, budget)?;
    let nv = engine.vidx.len();
    let mut uf = ElderUnionFind::new(nv);
    let older = |x: u32, y: u32| (engine.vidx[x as usize], x) < (engine.vidx[y as usize], y);
    let mut cleared: HashSet<u128> = HashSet::new();
    let mut h0 = Vec::new();
    let mut desc = Vec::with_capacity(4);
    for e in &edges {
        decode(e.code, &mut desc);
        if let Some(die) = uf.union(desc[0], desc[1], older) {
            cleared.insert(e.code);
            push_pair(
                &mut h0,
                engine.levels,
                engine.vidx[die as usize],
                Some(e.index),
            );
        }
    }
    for v in 0..nv as u32 {
        if uf.find(v) == v {
            push_pair(&mut h0, engine.levels, engine.vidx[v as usize], None);
        }
    }
    diagrams.push(PersistenceDiagram::new(0, h0).expect("valid pairs"));

    let mut columns = edges;
    for dim in 1..k_max {
        if dim > 1 {
            columns = engine.simplices(dim, budget)?;
        }
        let (pairs, next_cleared) = reduce_dimension(&engine, &columns, &cleared);
        diagrams.push(PersistenceDiagram::new(dim, pairs).expect("valid pairs"));
        cleared = next_cleared;
    }
    Ok(diagrams)
}

/// Degree 0 without listing edges: vertices enter in (index, label) order and
/// join the classes of their earlier neighbours. The diagram does not depend
/// on the order of merges within one index.
fn sweep_components(engine: &Engine, with_edges: bool) -> PersistenceDiagram {
    let nv = engine.vidx.len();
    let mut order: Vec<u32> = (0..nv as u32).collect();
    order.sort_unstable_by_key(|&v| (engine.vidx[v as usize], v));
    let mut rank = vec![0u32; nv];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    let mut uf = ElderUnionFind::new(nv);
    let mut pairs = Vec::new();
    if with_edges {
        for &v in &order {
            for &w in &engine.adj[v as usize] {
                if rank[w as usize] < rank[v as usize] {
                    if let Some(die) = uf.union(v, w, |x, y| rank[x as usize] < rank[y as usize]) {
                        push_pair(
                            &mut pairs,
                            engine.levels,
                            engine.vidx[die as usize],
                            Some(engine.vidx[v as usize]),
                        );
                    }
                }
            }
        }
    }
    for v in 0..nv as u32 {
        if uf.find(v) == v {
            push_pair(&mut pairs, engine.levels, engine.vidx[v as usize], None);
        }
    }
    PersistenceDiagram::new(0, pairs).expect("valid pairs")
}

/// Reduces the coboundary matrix of `dim`-simplexes (`columns`, ascending).
/// Returns the degree-`dim` pairs and the cofacets used as pivots.
fn reduce_dimension(
    engine: &Engine,
    columns: &[Key],
    cleared: &HashSet<u128>,
) -> (Vec<Pair>, HashSet<u128>) {
    let mut pairs = Vec::new();
    // pivot cofacet code → reduction column (list of simplexes summed)
    let mut pivot_of: HashMap<u128, u32> = HashMap::new();
    let mut stored: Vec<Vec<Key>> = Vec::new();
    let mut common = Vec::new();
    let mut desc = Vec::with_capacity(4);
    let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    let mut cofacets: Vec<Key> = Vec::new();

    for &sigma in columns.iter().rev() {
        if cleared.contains(&sigma.code) {
            continue;
        }
        decode(sigma.code, &mut desc);
        cofacets.clear();
        engine.for_each_cofacet(&desc, sigma, &mut common, &mut |k| cofacets.push(k));
        let Some(&first) = cofacets.iter().min() else {
            push_pair(&mut pairs, engine.levels, sigma.index, None);
            continue;
        };
        if let std::collections::hash_map::Entry::Vacant(e) = pivot_of.entry(first.code) {
            // the unreduced column already has a free pivot
            e.insert(stored.len() as u32);
            stored.push(vec![sigma]);
            push_pair(&mut pairs, engine.levels, sigma.index, Some(first.index));
            continue;
        }
        heap.clear();
        heap.extend(cofacets.iter().map(|&k| Reverse(k)));
        let mut v: Vec<Key> = vec![sigma];
        let outcome = loop {
            let Some(p) = pivot(&mut heap) else {
                break None;
            };
            match pivot_of.get(&p.code) {
                None => break Some(p),
                Some(&slot) => {
                    for &s in &stored[slot as usize] {
                        v.push(s);
                        decode(s.code, &mut desc);
                        engine.for_each_cofacet(&desc, s, &mut common, &mut |k| {
                            heap.push(Reverse(k))
                        });
                    }
                }
            }
        };
        match outcome {
            None => push_pair(&mut pairs, engine.levels, sigma.index, None),
            Some(p) => {
                // keep the reduction column with cancelling repeats removed
                v.sort_unstable();
                let mut compact: Vec<Key> = Vec::with_capacity(v.len());
                for k in v {
                    if compact.last() == Some(&k) {
                        compact.pop();
                    } else {
                        compact.push(k);
                    }
                }
                pivot_of.insert(p.code, stored.len() as u32);
                stored.push(compact);
                push_pair(&mut pairs, engine.levels, sigma.index, Some(p.index));
            }
        }
    }
    (pairs, pivot_of.into_keys().collect())
}
