//! Abstract simplicial complexes and the Rips, Čech and vertex-filtered
//! Rips constructions on point clouds.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::geometry::{min_enclosing_ball, NeighborIndex, PointCloud};

pub type Vertex = u32;

/// Default cap on the number of simplexes a construction may produce.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Relative slack applied to distance thresholds so that exact ties
/// (`‖x−y‖ = 2r`) survive rounding.
pub const TIE_SLACK: f64 = 1e-12;

/// Simplexes of one dimension, stored flat as ascending vertex tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplexList {
    arity: usize,
    verts: Vec<Vertex>,
}

impl SimplexList {
    pub fn new(dim: usize) -> Self {
        Self {
            arity: dim + 1,
            verts: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.arity - 1
    }

    pub fn len(&self) -> usize {
        self.verts.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn get(&self, i: usize) -> &[Vertex] {
        &self.verts[i * self.arity..(i + 1) * self.arity]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Vertex]> + '_ {
        self.verts.chunks_exact(self.arity)
    }

    fn push(&mut self, s: &[Vertex]) {
        debug_assert_eq!(s.len(), self.arity);
        self.verts.extend_from_slice(s);
    }

    fn permuted(&self, order: &[usize]) -> SimplexList {
        let mut out = SimplexList::new(self.dim());
        out.verts.reserve(self.verts.len());
        for &i in order {
            out.push(self.get(i));
        }
        out
    }

    fn truncated(&self, len: usize) -> SimplexList {
        SimplexList {
            arity: self.arity,
            verts: self.verts[..len * self.arity].to_vec(),
        }
    }

    /// Map from vertex tuple to position in the list.
    pub fn positions(&self) -> HashMap<&[Vertex], usize> {
        self.iter().enumerate().map(|(i, s)| (s, i)).collect()
    }
}

/// A finite simplicial complex up to dimension `k_max`.
///
/// Every simplex is an ascending tuple of vertex labels (its canonical
/// orientation). The order of each dimension's list is significant: it fixes
/// the chain-space basis, and nested complexes are stored so that the
/// smaller one is a prefix of the larger one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<SimplexList>,
}

impl SimplicialComplex {
    pub fn empty(vertex_count: usize, k_max: usize) -> Self {
        Self {
            vertex_count,
            by_dim: (0..=k_max).map(SimplexList::new).collect(),
        }
    }

    /// Builds a complex from explicit per-dimension lists, validating
    /// orientation, uniqueness and closure under faces.
    pub fn from_lists(vertex_count: usize, lists: &[Vec<Vec<Vertex>>]) -> Result<Self> {
        if lists.is_empty() {
            return Err(invalid("a complex needs at least the vertex dimension"));
        }
        let mut c = Self::empty(vertex_count, lists.len() - 1);
        for (k, list) in lists.iter().enumerate() {
            for s in list {
                if s.len() != k + 1 {
                    return Err(invalid(format!("{s:?} listed in dimension {k}")));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("{s:?} is not strictly ascending")));
                }
                if s.iter().any(|&v| v as usize >= vertex_count) {
                    return Err(invalid(format!(
                        "{s:?} uses a vertex outside 0..{vertex_count}"
                    )));
                }
                c.by_dim[k].push(s);
            }
            if c.by_dim[k].positions().len() != c.by_dim[k].len() {
                return Err(invalid(format!("duplicate simplex in dimension {k}")));
            }
        }
        if !c.is_face_closed() {
            return Err(invalid("simplex list is not closed under taking faces"));
        }
        Ok(c)
    }

    /// The closure of `maximal` (all faces up to `k_max`), each dimension in
    /// lexicographic order.
    pub fn from_maximal(
        vertex_count: usize,
        k_max: usize,
        maximal: &[Vec<Vertex>],
    ) -> Result<Self> {
        let mut seen: Vec<std::collections::BTreeSet<Vec<Vertex>>> =
            vec![Default::default(); k_max + 1];
        for m in maximal {
            let mut m = m.clone();
            m.sort_unstable();
            m.dedup();
            let n = m.len();
            for mask in 1u64..(1u64 << n) {
                let face: Vec<Vertex> = (0..n)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| m[b])
                    .collect();
                if face.len() <= k_max + 1 {
                    seen[face.len() - 1].insert(face);
                }
            }
        }
        let lists: Vec<Vec<Vec<Vertex>>> =
            seen.into_iter().map(|s| s.into_iter().collect()).collect();
        Self::from_lists(vertex_count, &lists)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn k_max(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// Number of `k`-simplexes (0 beyond `k_max`).
    pub fn count(&self, k: usize) -> usize {
        self.by_dim.get(k).map_or(0, SimplexList::len)
    }

    pub fn total(&self) -> usize {
        self.by_dim.iter().map(SimplexList::len).sum()
    }

    pub fn simplices(&self, k: usize) -> &SimplexList {
        &self.by_dim[k]
    }

    pub fn contains(&self, s: &[Vertex]) -> bool {
        match s.len().checked_sub(1).and_then(|k| self.by_dim.get(k)) {
            Some(list) => list.iter().any(|t| t == s),
            None => false,
        }
    }

    pub fn is_face_closed(&self) -> bool {
        for k in 1..self.by_dim.len() {
            let lower = self.by_dim[k - 1].positions();
            let mut face = Vec::with_capacity(k);
            for s in self.by_dim[k].iter() {
                for drop in 0..=k {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != drop)
                            .map(|(_, &v)| v),
                    );
                    if !lower.contains_key(face.as_slice()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Ok when every dimension of `self` is a prefix of the same dimension
    /// of `other`.
    pub fn check_prefix_of(&self, other: &SimplicialComplex) -> Result<()> {
        for (k, list) in self.by_dim.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let Some(big) = other.by_dim.get(k) else {
                return Err(Error::NotASubcomplex { dim: k });
            };
            if big.len() < list.len() || big.verts[..list.verts.len()] != list.verts[..] {
                return Err(Error::NotASubcomplex { dim: k });
            }
        }
        Ok(())
    }

    /// Simplex sets per dimension, for order-insensitive comparisons.
    pub fn simplex_sets(&self) -> Vec<std::collections::BTreeSet<Vec<Vertex>>> {
        self.by_dim
            .iter()
            .map(|l| l.iter().map(<[Vertex]>::to_vec).collect())
            .collect()
    }
}

/// A complex whose simplexes enter at integer filtration indices, each index
/// standing for a level value `level_values[i]` (strictly decreasing).
///
/// Each dimension is sorted by `(index, tuple)`, so the complex at any index
/// is a prefix of the complexes after it.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    complex: SimplicialComplex,
    index: Vec<Vec<u32>>,
    level_values: Vec<f64>,
}

impl FilteredComplex {
    pub fn new(
        complex: SimplicialComplex,
        index: Vec<Vec<u32>>,
        level_values: Vec<f64>,
    ) -> Result<Self> {
        check_levels(&level_values)?;
        if index.len() != complex.by_dim.len()
            || index
                .iter()
                .zip(&complex.by_dim)
                .any(|(ix, l)| ix.len() != l.len())
        {
            return Err(invalid("filtration indices do not match the complex"));
        }
        if index
            .iter()
            .flatten()
            .any(|&i| i as usize >= level_values.len())
        {
            return Err(invalid("filtration index without a level value"));
        }
        // sort each dimension by (index, tuple)
        let mut complex = complex;
        let mut index = index;
        for k in 0..complex.by_dim.len() {
            let list = &complex.by_dim[k];
            let mut order: Vec<usize> = (0..list.len()).collect();
            order.sort_by(|&a, &b| {
                index[k][a]
                    .cmp(&index[k][b])
                    .then_with(|| list.get(a).cmp(list.get(b)))
            });
            index[k] = order.iter().map(|&i| index[k][i]).collect();
            complex.by_dim[k] = list.permuted(&order);
        }
        let fc = Self {
            complex,
            index,
            level_values,
        };
        if !fc.complex.is_face_closed() {
            return Err(invalid("filtered complex is not closed under faces"));
        }
        if !fc.is_monotone() {
            return Err(invalid("a face enters after one of its cofaces"));
        }
        Ok(fc)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn level_values(&self) -> &[f64] {
        &self.level_values
    }

    pub fn index(&self, k: usize, i: usize) -> u32 {
        self.index[k][i]
    }

    pub fn indices(&self, k: usize) -> &[u32] {
        &self.index[k]
    }

    /// `filtration_index(face) ≤ filtration_index(simplex)` for every face.
    pub fn is_monotone(&self) -> bool {
        for k in 1..self.complex.by_dim.len() {
            let lower = self.complex.by_dim[k - 1].positions();
            let mut face = Vec::with_capacity(k);
            for (i, s) in self.complex.by_dim[k].iter().enumerate() {
                for drop in 0..=k {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != drop)
                            .map(|(_, &v)| v),
                    );
                    match lower.get(face.as_slice()) {
                        Some(&f) if self.index[k - 1][f] <= self.index[k][i] => {}
                        _ => return false,
                    }
                }
            }
        }
        true
    }

    /// The subcomplex of simplexes with index ≤ `i`, stored as a prefix.
    pub fn sublevel(&self, i: u32) -> SimplicialComplex {
        let by_dim = self
            .complex
            .by_dim
            .iter()
            .zip(&self.index)
            .map(|(list, ix)| list.truncated(ix.partition_point(|&j| j <= i)))
            .collect();
        SimplicialComplex {
            vertex_count: self.complex.vertex_count,
            by_dim,
        }
    }
}

pub(crate) fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.iter().any(|l| l.is_nan()) {
        return Err(invalid("level values must not be NaN"));
    }
    if levels.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(invalid("level values must be strictly decreasing"));
    }
    Ok(())
}

/// Upper-neighbor lists of the `2r`-threshold graph on the selected points:
/// `upper[a]` holds local labels `b > a` with `‖x_a − x_b‖ ≤ 2r`, ascending.
pub(crate) fn threshold_graph(points: &PointCloud, ids: &[usize], r: f64) -> Vec<Vec<u32>> {
    let sub = points.select(ids);
    let index = NeighborIndex::new(&sub, 2.0 * r * (1.0 + TIE_SLACK));
    (0..sub.len())
        .map(|a| {
            let mut up: Vec<u32> = Vec::new();
            index.for_each_within(sub.point(a), |b, _| {
                if b > a {
                    up.push(b as u32);
                }
            });
            up.sort_unstable();
            up
        })
        .collect()
}

fn intersect_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Depth-first clique expansion over local labels. `accept(simplex)` may veto
/// a candidate (and with it every coface). Emits tuples in lexicographic
/// order within each dimension.
fn expand_cliques(
    upper: &[Vec<u32>],
    k_max: usize,
    budget: usize,
    accept: &mut dyn FnMut(&[u32]) -> bool,
    emit: &mut dyn FnMut(&[u32]),
) -> Result<usize> {
    let mut count = 0usize;
    let mut stack: Vec<u32> = Vec::with_capacity(k_max + 1);
    for v in 0..upper.len() as u32 {
        stack.push(v);
        count += 1;
        if count > budget {
            return Err(Error::CapacityExceeded { budget });
        }
        emit(&stack);
        if k_max >= 1 {
            let cands = upper[v as usize].clone();
            grow(
                upper, k_max, budget, &mut stack, &cands, &mut count, accept, emit,
            )?;
        }
        stack.pop();
    }
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    upper: &[Vec<u32>],
    k_max: usize,
    budget: usize,
    stack: &mut Vec<u32>,
    cands: &[u32],
    count: &mut usize,
    accept: &mut dyn FnMut(&[u32]) -> bool,
    emit: &mut dyn FnMut(&[u32]),
) -> Result<()> {
    let mut next = Vec::new();
    for (i, &w) in cands.iter().enumerate() {
        stack.push(w);
        if accept(stack) {
            *count += 1;
            if *count > budget {
                return Err(Error::CapacityExceeded { budget });
            }
            emit(stack);
            if stack.len() <= k_max {
                intersect_sorted(&cands[i + 1..], &upper[w as usize], &mut next);
                if !next.is_empty() {
                    let nc = std::mem::take(&mut next);
                    grow(upper, k_max, budget, stack, &nc, count, accept, emit)?;
                    next = nc;
                }
            }
        }
        stack.pop();
    }
    Ok(())
}

fn complex_on_subset(
    points: &PointCloud,
    ids: &[usize],
    r: f64,
    k_max: usize,
    budget: usize,
    accept: &mut dyn FnMut(&[u32]) -> bool,
) -> Result<SimplicialComplex> {
    debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
    let upper = threshold_graph(points, ids, r);
    let mut c = SimplicialComplex::empty(points.len(), k_max);
    let mut global = Vec::with_capacity(k_max + 1);
    let mut emit = |s: &[u32]| {
        global.clear();
        global.extend(s.iter().map(|&l| ids[l as usize] as Vertex));
        c.by_dim[s.len() - 1].push(&global);
    };
    expand_cliques(&upper, k_max, budget, accept, &mut emit)?;
    Ok(c)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "radius must be positive and finite, got {r}"
        )))
    }
}

/// Vietoris-Rips complex: a simplex for every set of points with pairwise
/// distances at most `2r`, up to dimension `k_max`.
pub fn build_rips(
    points: &PointCloud,
    r: f64,
    k_max: usize,
    budget: usize,
) -> Result<SimplicialComplex> {
    check_radius(r)?;
    let ids: Vec<usize> = (0..points.len()).collect();
    complex_on_subset(points, &ids, r, k_max, budget, &mut |_| true)
}

/// Number of simplexes `build_rips` would produce on `ids`, or `None` once
/// the count passes `limit`.
pub fn count_rips_simplices(
    points: &PointCloud,
    ids: &[usize],
    r: f64,
    k_max: usize,
    limit: usize,
) -> Option<usize> {
    let upper = threshold_graph(points, ids, r);
    expand_cliques(&upper, k_max, limit, &mut |_| true, &mut |_| {}).ok()
}

/// Čech complex: a simplex for every set of points whose closed `r`-balls
/// share a point, i.e. whose minimum enclosing ball has radius at most `r`.
pub fn build_cech(
    points: &PointCloud,
    r: f64,
    k_max: usize,
    budget: usize,
) -> Result<SimplicialComplex> {
    check_radius(r)?;
    if points.dim() > 3 {
        return Err(Error::UnsupportedDimension {
            dim: points.dim(),
            supported: "d ≤ 3",
        });
    }
    let limit = r * (1.0 + TIE_SLACK);
    let mut verts: Vec<&[f64]> = Vec::with_capacity(k_max + 1);
    let mut accept = |s: &[u32]| {
        if s.len() <= 2 {
            // pairs are already filtered by the 2r threshold graph
            return true;
        }
        verts.clear();
        verts.extend(s.iter().map(|&v| points.point(v as usize)));
        min_enclosing_ball(&verts).radius <= limit
    };
    let ids: Vec<usize> = (0..points.len()).collect();
    complex_on_subset(points, &ids, r, k_max, budget, &mut accept)
}

/// Index of the first level a value reaches (`value ≥ levels[i]`), if any.
pub fn level_index(value: f64, levels: &[f64]) -> Option<u32> {
    let i = levels.partition_point(|&l| l > value);
    (i < levels.len()).then_some(i as u32)
}

/// Rips complex on the vertices that reach some level, filtered by the level
/// at which their last vertex enters.
pub fn build_filtered_rips(
    points: &PointCloud,
    vertex_values: &[Option<f64>],
    levels: &[f64],
    r: f64,
    k_max: usize,
    budget: usize,
) -> Result<FilteredComplex> {
    check_radius(r)?;
    check_levels(levels)?;
    if vertex_values.len() != points.len() {
        return Err(invalid(format!(
            "{} vertex values for {} points",
            vertex_values.len(),
            points.len()
        )));
    }
    let vertex_index: Vec<Option<u32>> = vertex_values
        .iter()
        .map(|v| v.and_then(|v| level_index(v, levels)))
        .collect();
    let ids: Vec<usize> = (0..points.len())
        .filter(|&i| vertex_index[i].is_some())
        .collect();
    let complex = complex_on_subset(points, &ids, r, k_max, budget, &mut |_| true)?;
    let index = complex
        .by_dim
        .iter()
        .map(|list| {
            list.iter()
                .map(|s| {
                    s.iter()
                        .map(|&v| vertex_index[v as usize].unwrap())
                        .max()
                        .unwrap()
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(complex, index, levels.to_vec())
}
