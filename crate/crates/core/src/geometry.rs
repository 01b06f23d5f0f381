//! Point clouds, fixed-radius neighbor search and minimum enclosing balls.

use std::collections::HashMap;

use crate::error::{invalid, Result};

/// `n` points in ℝᵈ stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("point dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not split into rows of length {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!(
                "non-finite coordinate in point {}",
                bad / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(invalid(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        dist(self.point(i), self.point(j))
    }

    /// Sub-cloud made of the listed rows, in the given order.
    pub fn select(&self, ids: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const GRID_MAX_DIM: usize = 3;

/// Uniform-cell spatial hash answering "all points within `radius`" queries.
///
/// Cells have side `radius`, so a query inspects the 3ᵈ surrounding cells.
/// Above three dimensions the index degrades to a linear scan.
pub struct NeighborIndex<'a> {
    cloud: &'a PointCloud,
    radius: f64,
    cells: Option<HashMap<[i64; GRID_MAX_DIM], Vec<u32>>>,
}

impl<'a> NeighborIndex<'a> {
    pub fn new(cloud: &'a PointCloud, radius: f64) -> Self {
        let cells = if cloud.dim() <= GRID_MAX_DIM && radius > 0.0 && radius.is_finite() {
            let mut cells: HashMap<[i64; GRID_MAX_DIM], Vec<u32>> = HashMap::new();
            for (i, p) in cloud.iter().enumerate() {
                cells.entry(cell_of(p, radius)).or_default().push(i as u32);
            }
            Some(cells)
        } else {
            None
        };
        Self {
            cloud,
            radius,
            cells,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Calls `visit(j, distance)` for every point within `self.radius` of `query`
    /// (inclusive). Visit order is unspecified.
    pub fn for_each_within(&self, query: &[f64], mut visit: impl FnMut(usize, f64)) {
        let r2 = self.radius * self.radius;
        match &self.cells {
            None => {
                for (j, p) in self.cloud.iter().enumerate() {
                    let d2 = dist_sq(query, p);
                    if d2 <= r2 {
                        visit(j, d2.sqrt());
                    }
                }
            }
            Some(cells) => {
                let base = cell_of(query, self.radius);
                let dim = self.cloud.dim();
                let span = 3usize.pow(dim as u32);
                for code in 0..span {
                    let mut key = base;
                    let mut c = code;
                    for slot in key.iter_mut().take(dim) {
                        *slot += (c % 3) as i64 - 1;
                        c /= 3;
                    }
                    if let Some(bucket) = cells.get(&key) {
                        for &j in bucket {
                            let d2 = dist_sq(query, self.cloud.point(j as usize));
                            if d2 <= r2 {
                                visit(j as usize, d2.sqrt());
                            }
                        }
                    }
                }
            }
        }
    }

    /// Indices within `self.radius` of `query`, ascending.
    pub fn within(&self, query: &[f64]) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(query, |j, _| out.push(j));
        out.sort_unstable();
        out
    }
}

fn cell_of(p: &[f64], side: f64) -> [i64; GRID_MAX_DIM] {
    let mut key = [0i64; GRID_MAX_DIM];
    for (slot, x) in key.iter_mut().zip(p) {
        *slot = (x / side).floor() as i64;
    }
    key
}

/// A closed ball in ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        let slack = 1e-12 * (1.0 + self.radius);
        dist(&self.center, p) <= self.radius + slack
    }
}

/// Smallest ball enclosing `points`, by Welzl's recursive algorithm.
///
/// The recursion runs over the points in the given order without
/// shuffling, which is fine for the handful of vertices in a simplex.
pub fn min_enclosing_ball(points: &[&[f64]]) -> Ball {
    assert!(!points.is_empty(), "enclosing ball of an empty set");
    let dim = points[0].len();
    let mut boundary = Vec::with_capacity(dim + 1);
    welzl(points, points.len(), &mut boundary, dim)
}

fn welzl<'p>(points: &[&'p [f64]], n: usize, boundary: &mut Vec<&'p [f64]>, dim: usize) -> Ball {
    if n == 0 || boundary.len() == dim + 1 {
        return ball_on_boundary(boundary, dim);
    }
    let p = points[n - 1];
    let ball = welzl(points, n - 1, boundary, dim);
    if ball.radius >= 0.0 && ball.contains(p) {
        return ball;
    }
    boundary.push(p);
    let ball = welzl(points, n - 1, boundary, dim);
    boundary.pop();
    ball
}

/// Smallest ball having all of `boundary` on its sphere (circumball in the
/// affine hull). An empty boundary yields a ball of negative radius that
/// contains nothing.
fn ball_on_boundary(boundary: &[&[f64]], dim: usize) -> Ball {
    match boundary.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: boundary[0].to_vec(),
            radius: 0.0,
        },
        _ => circumball(boundary).unwrap_or_else(|| widest_pair_ball(boundary)),
    }
}

fn circumball(pts: &[&[f64]]) -> Option<Ball> {
    // center = p0 + Σ λⱼ (pⱼ − p0) with 2 (pᵢ−p0)·(pⱼ−p0) λ = |pᵢ−p0|²
    let p0 = pts[0];
    let m = pts.len() - 1;
    let diffs: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = 2.0 * dot(&diffs[i], &diffs[j]);
        }
        a[i][m] = dot(&diffs[i], &diffs[i]);
    }
    let lambda = solve_augmented(a)?;
    let mut center = p0.to_vec();
    for (l, d) in lambda.iter().zip(&diffs) {
        for (c, x) in center.iter_mut().zip(d) {
            *c += l * x;
        }
    }
    let radius = dist(&center, p0);
    Some(Ball { center, radius })
}

fn widest_pair_ball(pts: &[&[f64]]) -> Ball {
    let mut best = (0, 0, -1.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = dist(pts[i], pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let center = pts[best.0]
        .iter()
        .zip(pts[best.1])
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    Ball {
        center,
        radius: 0.5 * best.2,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_augmented(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, piv);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..=m {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}
