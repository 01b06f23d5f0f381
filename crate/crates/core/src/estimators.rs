//! Level-set homology, noisy-manifold recovery and persistent homology of
//! the estimated function, plus a grid oracle for the true function.
//!
//! All three estimators look at the Rips complexes of the sample points whose
//! estimate reaches a level. They share one code path: the vertices are
//! indexed by the first level they reach in a strictly decreasing list, and
//! the homology of each sublevel and of each inclusion between two sublevels
//! is read either from an explicit complex (exact linear algebra in the
//! chosen field) or from the persistence diagrams of the implicit ℤ/2 engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::{
    build_filtered_rips, count_rips_simplices, level_index, FilteredComplex, DEFAULT_BUDGET,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::PointCloud;
use crate::homology::{betti, image_rank, Arithmetic};
use crate::kernels::{estimate_at_samples, KernelSpec, LabeledSample, Mode};
use crate::persistence::rips::MAX_SIMPLEX_DIM;
use crate::persistence::{filtered_rips_persistence, reduce, PersistenceDiagram};

/// Hypotheses behind the consistency guarantees that cannot be checked from
/// a sample. Reports carry them so a result is never read as certified.
pub const UNCHECKED_ASSUMPTIONS: [&str; 3] = [
    "epsilon-regularity of the levels used",
    "tameness of the underlying function",
    "no critical values within two epsilon of the levels used",
];

/// Extra hypotheses of the manifold-recovery scan.
pub const MANIFOLD_ASSUMPTIONS: [&str; 2] = [
    "the manifold is closed, connected and orientable",
    "the density band around the manifold is wider than eight epsilon",
];

/// Above this many simplexes in the largest complex, `Auto` switches from
/// exact linear algebra to the implicit persistence engine.
pub const EXPLICIT_SIMPLEX_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Auto,
    /// Materialized complexes, ranks in the configured field.
    Explicit,
    /// Implicit Rips persistence over ℤ/2.
    Implicit,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "explicit" => Ok(Self::Explicit),
            "implicit" => Ok(Self::Implicit),
            other => Err(invalid(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub arithmetic: Arithmetic,
    pub backend: Backend,
    pub budget: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            arithmetic: Arithmetic::Rational,
            backend: Backend::Auto,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    pub level: f64,
    pub epsilon: f64,
    pub r: f64,
    pub k_max: usize,
    /// Rank of `Hₖ` of the upper complex into `Hₖ` of the lower one, per degree.
    pub betti_image: Vec<usize>,
    pub betti_upper: Vec<usize>,
    pub betti_lower: Vec<usize>,
    pub upper_size: usize,
    pub lower_size: usize,
    /// No sample point reaches the upper level.
    pub empty_level: bool,
    pub backend: Backend,
    pub warnings: Vec<String>,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub i: usize,
    pub level: f64,
    pub beta_m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldRecovery {
    pub i_star: usize,
    pub level_used: f64,
    pub epsilon: f64,
    pub l_max: f64,
    pub n_levels: usize,
    pub r: f64,
    pub betti: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub backend: Backend,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhEstimate {
    pub epsilon: f64,
    pub l_max: f64,
    pub r: f64,
    pub k_max: usize,
    pub levels: Vec<f64>,
    pub diagrams: Vec<PersistenceDiagram>,
    pub backend: Backend,
    pub assumptions: Vec<String>,
}

/// `(max f̂ − min f̂) / 50` over the defined estimates.
pub fn default_epsilon(values: &[Option<f64>]) -> Result<f64> {
    let (lo, hi) = value_range(values).ok_or_else(|| invalid("no defined estimates"))?;
    let eps = (hi - lo) / 50.0;
    if eps > 0.0 {
        Ok(eps)
    } else {
        Err(invalid("estimates are constant; set epsilon explicitly"))
    }
}

fn value_range(values: &[Option<f64>]) -> Option<(f64, f64)> {
    values.iter().flatten().fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// `max ⌈f̂ / 2ε⌉`, the number of `2ε` steps above zero.
fn level_count(values: &[Option<f64>], epsilon: f64) -> Result<i64> {
    let (_, hi) = value_range(values).ok_or_else(|| invalid("no defined estimates"))?;
    let n = (hi / (2.0 * epsilon)).ceil();
    if !n.is_finite() || n.abs() > 1e9 {
        return Err(invalid(format!("epsilon {epsilon} gives too many levels")));
    }
    Ok(n as i64)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("r must be positive, got {r}")))
    }
}

fn assumptions(extra: &[&str]) -> Vec<String> {
    UNCHECKED_ASSUMPTIONS
        .iter()
        .chain(extra)
        .map(|s| s.to_string())
        .collect()
}

/// Vertices indexed by a strictly decreasing level list, with ranks read
/// from the selected backend.
enum Scan {
    Explicit(FilteredComplex, Arithmetic),
    Implicit(Vec<PersistenceDiagram>, Vec<f64>),
}

struct Ranks {
    image: Vec<usize>,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

fn vertex_indices(values: &[Option<f64>], levels: &[f64]) -> Vec<Option<u32>> {
    values
        .iter()
        .map(|v| v.and_then(|v| level_index(v, levels)))
        .collect()
}

impl Scan {
    fn build(
        points: &PointCloud,
        values: &[Option<f64>],
        levels: &[f64],
        r: f64,
        k_max: usize,
        opts: &EstimateOptions,
    ) -> Result<(Scan, Backend)> {
        let backend = resolve_backend(points, values, levels, r, k_max, opts.backend);
        let scan = match backend {
            Backend::Implicit => Scan::Implicit(
                filtered_rips_persistence(
                    points,
                    &vertex_indices(values, levels),
                    levels,
                    r,
                    k_max,
                    opts.budget,
                )?,
                levels.to_vec(),
            ),
            _ => Scan::Explicit(
                build_filtered_rips(points, values, levels, r, k_max, opts.budget)?,
                opts.arithmetic,
            ),
        };
        Ok((scan, backend))
    }

    /// Ranks for sublevel `hi` included in sublevel `lo ≥ hi`, in degrees
    /// `0..degrees`.
    fn ranks(&self, hi: usize, lo: usize, degrees: usize) -> Result<Ranks> {
        match self {
            Scan::Implicit(diagrams, levels) => {
                let (a, b) = (levels[hi], levels[lo]);
                Ok(Ranks {
                    image: diagrams
                        .iter()
                        .take(degrees)
                        .map(|d| d.persistent_rank(a, b))
                        .collect(),
                    upper: diagrams
                        .iter()
                        .take(degrees)
                        .map(|d| d.alive_at(a))
                        .collect(),
                    lower: diagrams
                        .iter()
                        .take(degrees)
                        .map(|d| d.alive_at(b))
                        .collect(),
                })
            }
            Scan::Explicit(fc, arith) => {
                let c1 = fc.sublevel(hi as u32);
                let c2 = fc.sublevel(lo as u32);
                let per_degree: Vec<Result<[usize; 3]>> = (0..degrees)
                    .into_par_iter()
                    .map(|k| {
                        Ok([
                            image_rank(&c1, &c2, k, *arith)?,
                            betti(&c1, k, *arith),
                            betti(&c2, k, *arith),
                        ])
                    })
                    .collect();
                let mut out = Ranks {
                    image: Vec::new(),
                    upper: Vec::new(),
                    lower: Vec::new(),
                };
                for t in per_degree {
                    let [i, u, l] = t?;
                    out.image.push(i);
                    out.upper.push(u);
                    out.lower.push(l);
                }
                Ok(out)
            }
        }
    }
}

fn resolve_backend(
    points: &PointCloud,
    values: &[Option<f64>],
    levels: &[f64],
    r: f64,
    k_max: usize,
    requested: Backend,
) -> Backend {
    match requested {
        Backend::Auto => {
            if k_max > MAX_SIMPLEX_DIM {
                return Backend::Explicit;
            }
            let lowest = *levels.last().expect("at least one level");
            let ids: Vec<usize> = (0..points.len())
                .filter(|&i| matches!(values[i], Some(v) if v >= lowest))
                .collect();
            if count_rips_simplices(points, &ids, r, k_max, EXPLICIT_SIMPLEX_LIMIT).is_some() {
                Backend::Explicit
            } else {
                Backend::Implicit
            }
        }
        b => b,
    }
}

/// Degrees reported for complexes of simplex dimension up to `k_max`.
fn degree_count(k_max: usize) -> usize {
    k_max.max(1)
}

/// Image of the homology of the Rips complex on `{f̂ₙ ≥ L+ε}` in that of the
/// Rips complex on `{f̂ₙ ≥ L−ε}`, both at radius `r` (which is also the
/// kernel bandwidth). Degrees `0..k_max` are reported, or degree 0 alone when
/// `k_max = 0`.
pub fn estimate_level_homology(
    data: &LabeledSample,
    level: f64,
    epsilon: f64,
    r: f64,
    k_max: usize,
    mode: Mode,
    kernel: &KernelSpec,
    opts: &EstimateOptions,
) -> Result<LevelEstimate> {
    check_r(r)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) || !level.is_finite() {
        return Err(invalid(format!(
            "need finite L and epsilon ≥ 0, got L = {level}, epsilon = {epsilon}"
        )));
    }
    let mut warnings = Vec::new();
    if !(epsilon > 0.0 && epsilon < level / 2.0) {
        warnings.push(format!(
            "epsilon = {epsilon} lies outside (0, L/2) for L = {level}"
        ));
    }
    let values = estimate_at_samples(data, r, kernel, mode)?;
    let levels = if epsilon > 0.0 {
        vec![level + epsilon, level - epsilon]
    } else {
        vec![level]
    };
    let lo = levels.len() - 1;
    let count = |l: f64| values.iter().flatten().filter(|&&v| v >= l).count();
    let (upper_size, lower_size) = (count(levels[0]), count(levels[lo]));
    let (scan, backend) = Scan::build(&data.points, &values, &levels, r, k_max, opts)?;
    let ranks = scan.ranks(0, lo, degree_count(k_max))?;
    Ok(LevelEstimate {
        level,
        epsilon,
        r,
        k_max,
        betti_image: ranks.image,
        betti_upper: ranks.upper,
        betti_lower: ranks.lower,
        upper_size,
        lower_size,
        empty_level: upper_size == 0,
        backend,
        warnings,
        assumptions: assumptions(&[]),
    })
}

/// Scans `Lᵢ = L̂max − 2iε` for `i = 1, 2, …` and stops at
/// `i* = 1 + min{i : β̂ₘ(Lᵢ, ε) = 1}`, returning the image ranks at `L_{i*}`
/// in degrees `0..k_max`. Density mode only.
pub fn recover_manifold_homology(
    data: &LabeledSample,
    epsilon: f64,
    m: usize,
    r: f64,
    k_max: usize,
    kernel: &KernelSpec,
    opts: &EstimateOptions,
) -> Result<ManifoldRecovery> {
    check_epsilon(epsilon)?;
    check_r(r)?;
    if k_max < m + 1 {
        return Err(invalid(format!(
            "k_max = {k_max} cannot see degree {m}; need at least {}",
            m + 1
        )));
    }
    let values = estimate_at_samples(data, r, kernel, Mode::Density)?;
    let n_eps = level_count(&values, epsilon)?.max(1) as usize;
    let l_max = 2.0 * epsilon * n_eps as f64;
    // Λⱼ = L̂max − (2j−1)ε for j = 1..=n_eps+2, so that Lᵢ ± ε = Λᵢ, Λᵢ₊₁
    // for every i up to n_eps + 1
    let lambda: Vec<f64> = (1..=n_eps + 2)
        .map(|j| l_max - (2 * j - 1) as f64 * epsilon)
        .collect();
    let (scan, backend) = Scan::build(&data.points, &values, &lambda, r, k_max, opts)?;
    let degrees = degree_count(k_max);
    let mut trace = Vec::new();
    let mut first = None;
    for i in 1..=n_eps {
        let beta_m = scan.ranks(i - 1, i, degrees)?.image[m];
        trace.push(TraceEntry {
            i,
            level: l_max - 2.0 * epsilon * i as f64,
            beta_m,
        });
        if beta_m == 1 {
            first = Some(i);
            break;
        }
    }
    let i_star = first.ok_or(Error::NoStableLevel)? + 1;
    let ranks = scan.ranks(i_star - 1, i_star, degrees)?;
    let level_used = l_max - 2.0 * epsilon * i_star as f64;
    trace.push(TraceEntry {
        i: i_star,
        level: level_used,
        beta_m: ranks.image[m],
    });
    Ok(ManifoldRecovery {
        i_star,
        level_used,
        epsilon,
        l_max,
        n_levels: n_eps,
        r,
        betti: ranks.image,
        trace,
        backend,
        assumptions: assumptions(&MANIFOLD_ASSUMPTIONS),
    })
}

/// Persistence of the Rips complexes on `{f̂ₙ ≥ Lᵢ}` for the levels
/// `Lᵢ = L̂max − 2iε`, `i = 0, 1, …`, continued until every sample point has
/// entered. `epsilon = None` uses [`default_epsilon`].
pub fn estimate_ph(
    data: &LabeledSample,
    epsilon: Option<f64>,
    r: f64,
    k_max: usize,
    mode: Mode,
    kernel: &KernelSpec,
    opts: &EstimateOptions,
) -> Result<PhEstimate> {
    check_r(r)?;
    let values = estimate_at_samples(data, r, kernel, mode)?;
    let epsilon = match epsilon {
        Some(e) => e,
        None => default_epsilon(&values)?,
    };
    check_epsilon(epsilon)?;
    let n_eps = level_count(&values, epsilon)?;
    let l_max = 2.0 * epsilon * n_eps as f64;
    let (lo, _) = value_range(&values).expect("values present");
    let steps = ((l_max - lo) / (2.0 * epsilon)).ceil() as usize;
    if steps > 10_000_000 {
        return Err(invalid(format!("epsilon {epsilon} gives {steps} levels")));
    }
    let mut levels: Vec<f64> = (0..=steps)
        .map(|i| l_max - 2.0 * epsilon * i as f64)
        .collect();
    // rounding can leave the lowest estimate just below the last level
    while *levels.last().unwrap() > lo {
        levels.push(l_max - 2.0 * epsilon * levels.len() as f64);
    }
    let (diagrams, backend) = level_persistence(&data.points, &values, &levels, r, k_max, opts)?;
    Ok(PhEstimate {
        epsilon,
        l_max,
        r,
        k_max,
        levels,
        diagrams,
        backend,
        assumptions: assumptions(&[]),
    })
}

/// Diagrams of degrees `0..k_max` (degree 0 alone when `k_max = 0`) of the
/// Rips filtration by first level reached.
pub fn level_persistence(
    points: &PointCloud,
    values: &[Option<f64>],
    levels: &[f64],
    r: f64,
    k_max: usize,
    opts: &EstimateOptions,
) -> Result<(Vec<PersistenceDiagram>, Backend)> {
    // both backends compute over ℤ/2 here, so `Auto` only falls back to the
    // explicit complex where the implicit engine has no support
    let backend = match opts.backend {
        Backend::Auto if k_max > MAX_SIMPLEX_DIM => Backend::Explicit,
        Backend::Auto => Backend::Implicit,
        b => b,
    };
    let diagrams = match backend {
        Backend::Explicit => {
            let fc = build_filtered_rips(points, values, levels, r, k_max, opts.budget)?;
            let mut d = reduce(&fc);
            d.truncate(degree_count(k_max));
            d
        }
        _ => filtered_rips_persistence(
            points,
            &vertex_indices(values, levels),
            levels,
            r,
            k_max,
            opts.budget,
        )?,
    };
    Ok((diagrams, backend))
}

/// Axis-aligned box, one `(min, max)` pair per coordinate.
pub type BoundingBox = Vec<(f64, f64)>;

/// Persistence of the super-level filtration of `f` sampled on a grid.
///
/// Grid neighbours (including diagonals) are joined: the Rips radius is
/// `spacing · √2 · 1.01 / 2`. Every distinct grid value is a level, so the
/// result is the exact super-level persistence of the piecewise-linear
/// interpolation on the grid's flag complex, without level discretization.
pub fn grid_ph_oracle(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    bbox: &[(f64, f64)],
    spacing: f64,
    k_max: usize,
    budget: usize,
) -> Result<Vec<PersistenceDiagram>> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(invalid(format!("spacing must be positive, got {spacing}")));
    }
    if bbox.is_empty()
        || bbox
            .iter()
            .any(|&(a, b)| !(a <= b && a.is_finite() && b.is_finite()))
    {
        return Err(invalid("bounding box needs finite min ≤ max per axis"));
    }
    let dims: Vec<usize> = bbox
        .iter()
        .map(|&(a, b)| ((b - a) / spacing + 1e-9).floor() as usize + 1)
        .collect();
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if total > budget {
        return Err(Error::CapacityExceeded { budget });
    }
    let d = bbox.len();
    let mut coords = Vec::with_capacity(total * d);
    for mut flat in 0..total {
        for (axis, &n) in dims.iter().enumerate() {
            coords.push(bbox[axis].0 + (flat % n) as f64 * spacing);
            flat /= n;
        }
    }
    let points = PointCloud::new(d, coords)?;
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|i| Some(f(points.point(i))))
        .collect();
    if values.iter().any(|v| !v.unwrap().is_finite()) {
        return Err(invalid("function is not finite on the grid"));
    }
    let mut levels: Vec<f64> = values.iter().flatten().copied().collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let r = spacing * std::f64::consts::SQRT_2 * 1.01 / 2.0;
    let opts = EstimateOptions {
        backend: Backend::Implicit,
        budget,
        ..EstimateOptions::default()
    };
    Ok(level_persistence(&points, &values, &levels, r, k_max, &opts)?.0)
}
