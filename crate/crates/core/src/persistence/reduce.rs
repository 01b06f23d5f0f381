use crate::complexes::FilteredComplex;

use super::diagram::{Pair, PersistenceDiagram};

/// Disjoint sets whose representative is the oldest member.
pub(crate) struct ElderUnionFind {
    parent: Vec<u32>,
}

impl ElderUnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Joins the classes of `a` and `b`. Returns the root that dies (the
    /// younger one, `older(x, y)` deciding age), or `None` if already joined.
    pub fn union(&mut self, a: u32, b: u32, older: impl Fn(u32, u32) -> bool) -> Option<u32> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, die) = if older(ra, rb) { (ra, rb) } else { (rb, ra) };
        self.parent[die as usize] = keep;
        Some(die)
    }
}

fn push_pair(out: &mut Vec<Pair>, levels: &[f64], birth: u32, death: Option<u32>) {
    match death {
        None => out.push(Pair::essential(levels[birth as usize])),
        Some(d) if d > birth => out.push(Pair::new(levels[birth as usize], levels[d as usize])),
        // zero-length pairs are dropped
        Some(_) => {}
    }
}

/// Symmetric difference of two ascending index lists (ℤ/2 column addition).
pub(crate) fn add_columns(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Persistence diagrams of degrees `0..=k_max` over ℤ/2.
///
/// Simplexes are ordered by (filtration index, dimension, tuple). Pairs are
/// reported in level coordinates; zero-length pairs are dropped and unpaired
/// creators become essential. Degree `k_max` has no `(k_max+1)`-simplexes to
/// kill its classes, so its essential classes reflect the truncation.
pub fn reduce(fc: &FilteredComplex) -> Vec<PersistenceDiagram> {
    let c = fc.complex();
    let k_max = c.k_max();
    let levels = fc.level_values();

    // cleared[k][i]: the i-th k-simplex is the pivot of a reduced column of
    // ∂ₖ₊₁, so it creates a class and its own column would reduce to zero
    let mut cleared: Vec<Vec<bool>> = (0..=k_max).map(|k| vec![false; c.count(k)]).collect();
    let mut destroyer: Vec<Vec<bool>> = (0..=k_max).map(|k| vec![false; c.count(k)]).collect();
    let mut killed_by: Vec<Vec<Option<u32>>> =
        (0..=k_max).map(|k| vec![None; c.count(k)]).collect();

    for k in (2..=k_max).rev() {
        let faces = c.simplices(k - 1).positions();
        let mut pivot_of_row: Vec<Option<u32>> = vec![None; c.count(k - 1)];
        let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); c.count(k)];
        let mut face = Vec::with_capacity(k);
        for (j, s) in c.simplices(k).iter().enumerate() {
            if cleared[k][j] {
                continue;
            }
            let mut col: Vec<u32> = (0..=k)
                .map(|drop| {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(t, _)| t != drop)
                            .map(|(_, &v)| v),
                    );
                    faces[face.as_slice()] as u32
                })
                .collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match pivot_of_row[low as usize] {
                    Some(p) => col = add_columns(&col, &reduced[p as usize]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_of_row[low as usize] = Some(j as u32);
                destroyer[k][j] = true;
                killed_by[k - 1][low as usize] = Some(j as u32);
                cleared[k - 1][low as usize] = true;
            }
            reduced[j] = col;
        }
    }

    let mut diagrams = Vec::with_capacity(k_max + 1);

    // degree 0 by union-find; vertices are already in (index, tuple) order
    let nv = c.count(0);
    let vertex_pos: std::collections::HashMap<u32, u32> = c
        .simplices(0)
        .iter()
        .enumerate()
        .map(|(i, s)| (s[0], i as u32))
        .collect();
    let mut uf = ElderUnionFind::new(nv);
    let mut h0 = Vec::new();
    if k_max >= 1 {
        for (j, e) in c.simplices(1).iter().enumerate() {
            let (a, b) = (vertex_pos[&e[0]], vertex_pos[&e[1]]);
            if let Some(die) = uf.union(a, b, |x, y| x < y) {
                destroyer[1][j] = true;
                push_pair(
                    &mut h0,
                    levels,
                    fc.index(0, die as usize),
                    Some(fc.index(1, j)),
                );
            }
        }
    }
    for v in 0..nv as u32 {
        if uf.find(v) == v {
            push_pair(&mut h0, levels, fc.index(0, v as usize), None);
        }
    }
    diagrams.push(PersistenceDiagram::new(0, h0).expect("valid pairs"));

    for k in 1..=k_max {
        let mut pairs = Vec::new();
        for i in 0..c.count(k) {
            if destroyer[k][i] {
                continue;
            }
            let death = killed_by[k][i].map(|j| fc.index(k + 1, j as usize));
            push_pair(&mut pairs, levels, fc.index(k, i), death);
        }
        diagrams.push(PersistenceDiagram::new(k, pairs).expect("valid pairs"));
    }
    diagrams
}
