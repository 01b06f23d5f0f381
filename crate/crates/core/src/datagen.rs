//! Seed-deterministic generators for the simulation experiments.
//!
//! Every sample index draws from its own ChaCha stream keyed on
//! `(seed, family)`, so output does not depend on generation order or on the
//! number of threads.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{norm, PointCloud};
use crate::kernels::LabeledSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AnnulusClassification,
    MixtureRegression,
    ThreeRings,
    HierarchicalDensity,
    NoisyCircle,
    NoisyTorus,
    TwoModes,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::AnnulusClassification,
        Family::MixtureRegression,
        Family::ThreeRings,
        Family::HierarchicalDensity,
        Family::NoisyCircle,
        Family::NoisyTorus,
        Family::TwoModes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AnnulusClassification => "annulus_classification",
            Family::MixtureRegression => "mixture_regression",
            Family::ThreeRings => "three_rings",
            Family::HierarchicalDensity => "hierarchical_density",
            Family::NoisyCircle => "noisy_circle",
            Family::NoisyTorus => "noisy_torus",
            Family::TwoModes => "two_modes",
        }
    }

    fn tag(self) -> u64 {
        Family::ALL.iter().position(|&f| f == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown family `{s}`")))
    }
}

/// What to generate. Unset parameters take the family defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub sigma: Option<f64>,
    /// Standard deviation of the wrapped normal on the torus longitude.
    pub longitude_spread: Option<f64>,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            seed,
            sigma: None,
            longitude_spread: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }
}

pub const DEFAULT_REGRESSION_SIGMA: f64 = 0.2;
pub const DEFAULT_RINGS_SIGMA: f64 = 0.2;
pub const DEFAULT_CIRCLE_SIGMA: f64 = 0.1;
pub const DEFAULT_TORUS_SIGMA: f64 = 0.1;
pub const DEFAULT_LONGITUDE_SPREAD: f64 = 2.0;
pub const TORUS_MAJOR: f64 = 2.0;
pub const TORUS_MINOR: f64 = 1.0;

pub fn generate(spec: &GenSpec) -> Result<LabeledSample> {
    if spec.n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if let Some(s) = spec.sigma {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(invalid(format!("sigma must be non-negative, got {s}")));
        }
    }
    let (n, seed) = (spec.n, spec.seed);
    match spec.family {
        Family::AnnulusClassification => Ok(gen_annulus_classification(n, seed)),
        Family::MixtureRegression => Ok(gen_mixture_regression(
            n,
            spec.sigma.unwrap_or(DEFAULT_REGRESSION_SIGMA),
            seed,
            &BumpSurface::standard(),
        )),
        Family::ThreeRings => LabeledSample::unlabeled(gen_three_rings(
            n,
            spec.sigma.unwrap_or(DEFAULT_RINGS_SIGMA),
            seed,
        )),
        Family::HierarchicalDensity => LabeledSample::unlabeled(
            GaussianMixture::hierarchical().sample(n, seed, Family::HierarchicalDensity),
        ),
        Family::TwoModes => {
            LabeledSample::unlabeled(GaussianMixture::two_modes().sample(n, seed, Family::TwoModes))
        }
        Family::NoisyCircle => LabeledSample::unlabeled(gen_noisy_circle(
            n,
            spec.sigma.unwrap_or(DEFAULT_CIRCLE_SIGMA),
            seed,
        )),
        Family::NoisyTorus => {
            let spread = spec.longitude_spread.unwrap_or(DEFAULT_LONGITUDE_SPREAD);
            if !(spread > 0.0 && spread.is_finite()) {
                return Err(invalid(format!(
                    "longitude spread must be positive, got {spread}"
                )));
            }
            LabeledSample::unlabeled(gen_noisy_torus(
                n,
                spec.sigma.unwrap_or(DEFAULT_TORUS_SIGMA),
                spread,
                seed,
            ))
        }
    }
}

/// Independent generator for sample `index`.
pub fn index_rng(seed: u64, family: Family, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&family.tag().to_le_bytes());
    key[16..].copy_from_slice(b"superlevel/datag");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

fn per_index<T: Send>(
    n: usize,
    seed: u64,
    family: Family,
    f: impl Fn(&mut ChaCha8Rng) -> T + Sync,
) -> Vec<T> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(&mut index_rng(seed, family, i)))
        .collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `C(1 + sin(4π‖x‖²)) exp(−100(‖x‖ − ¼)²)` with `C = ½`.
pub fn annulus_probability(x: &[f64]) -> f64 {
    let rho = norm(x);
    0.5 * (1.0 + (4.0 * PI * rho * rho).sin()) * (-100.0 * (rho - 0.25).powi(2)).exp()
}

/// `X` uniform on `[−½, ½]²`, `Y ~ Bernoulli(annulus_probability(X))`.
pub fn gen_annulus_classification(n: usize, seed: u64) -> LabeledSample {
    let rows = per_index(n, seed, Family::AnnulusClassification, |rng| {
        let x = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
        let y = if rng.random::<f64>() < annulus_probability(&x) {
            1.0
        } else {
            0.0
        };
        (x, y)
    });
    let coords = rows.iter().flat_map(|(x, _)| *x).collect();
    let ys = rows.iter().map(|(_, y)| *y).collect();
    LabeledSample::new(
        PointCloud::new(2, coords).expect("finite"),
        Some(ys),
        Some(1.0),
    )
    .expect("valid sample")
}

/// A signed sum of isotropic Gaussian bumps on the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSurface {
    /// `(center, amplitude, width)`
    pub bumps: Vec<([f64; 2], f64, f64)>,
}

impl BumpSurface {
    /// Five peaks and three pits placed by a fixed-seed draw inside
    /// `[−0.7, 0.7]²` with pairwise separation at least 0.45, so each pit is
    /// ringed by the zero background.
    pub fn standard() -> Self {
        const WIDTH: f64 = 0.12;
        let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d0f5_u64);
        let mut bumps: Vec<([f64; 2], f64, f64)> = Vec::new();
        while bumps.len() < 8 {
            let c = [
                1.4 * rng.random::<f64>() - 0.7,
                1.4 * rng.random::<f64>() - 0.7,
            ];
            if bumps
                .iter()
                .any(|(o, _, _)| ((o[0] - c[0]).powi(2) + (o[1] - c[1]).powi(2)).sqrt() < 0.45)
            {
                continue;
            }
            let size = 0.6 + 0.4 * rng.random::<f64>();
            let amplitude = if bumps.len() < 5 { size } else { -size };
            bumps.push((c, amplitude, WIDTH));
        }
        Self { bumps }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.bumps
            .iter()
            .map(|(c, a, w)| {
                a * (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (2.0 * w * w)).exp()
            })
            .sum()
    }

    /// `max |f|` over a 401 × 401 grid on `[−1, 1]²` and the bump centres.
    pub fn abs_max(&self) -> f64 {
        let mut m = self
            .bumps
            .iter()
            .map(|(c, _, _)| self.value(c).abs())
            .fold(0.0, f64::max);
        for i in 0..=400 {
            for j in 0..=400 {
                let x = [-1.0 + i as f64 * 0.005, -1.0 + j as f64 * 0.005];
                m = m.max(self.value(&x).abs());
            }
        }
        m
    }
}

/// `X` uniform on `[−1, 1]²`, `Y = f(X) + ξ` with `ξ ~ N(0, σ²)` truncated
/// at `5σ`. `y_max` is `max |f| + 5σ`.
pub fn gen_mixture_regression(
    n: usize,
    sigma: f64,
    seed: u64,
    surface: &BumpSurface,
) -> LabeledSample {
    let rows = per_index(n, seed, Family::MixtureRegression, |rng| {
        let x = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        let xi = loop {
            let z = normal(rng);
            if z.abs() <= 5.0 {
                break sigma * z;
            }
        };
        (x, surface.value(&x) + xi)
    });
    let sample_max = rows
        .iter()
        .map(|(x, _)| surface.value(x).abs())
        .fold(0.0, f64::max);
    let y_max = surface.abs_max().max(sample_max) + 5.0 * sigma;
    let coords = rows.iter().flat_map(|(x, _)| *x).collect();
    let ys = rows.iter().map(|(_, y)| *y).collect();
    LabeledSample::new(
        PointCloud::new(2, coords).expect("finite"),
        Some(ys),
        Some(y_max),
    )
    .expect("valid sample")
}

/// Ring radius uniform over {1, 2, 3}, angle uniform, plus `N(0, σ²I)`.
pub fn gen_three_rings(n: usize, sigma: f64, seed: u64) -> PointCloud {
    let rows = per_index(n, seed, Family::ThreeRings, |rng| {
        let radius = (rng.random_range(0..3u32) + 1) as f64;
        let t = TAU * rng.random::<f64>();
        [
            radius * t.cos() + sigma * normal(rng),
            radius * t.sin() + sigma * normal(rng),
        ]
    });
    PointCloud::new(2, rows.into_iter().flatten().collect()).expect("finite")
}

/// Uniform on the unit circle plus `N(0, σ²I₂)`.
pub fn gen_noisy_circle(n: usize, sigma: f64, seed: u64) -> PointCloud {
    let rows = per_index(n, seed, Family::NoisyCircle, |rng| {
        let t = TAU * rng.random::<f64>();
        [t.cos() + sigma * normal(rng), t.sin() + sigma * normal(rng)]
    });
    PointCloud::new(2, rows.into_iter().flatten().collect()).expect("finite")
}

/// Torus with radii 2 and 1: tube (latitude) angle uniform, longitude a
/// wrapped normal with standard deviation `spread`, plus `N(0, σ²I₃)`.
pub fn gen_noisy_torus(n: usize, sigma: f64, spread: f64, seed: u64) -> PointCloud {
    let rows = per_index(n, seed, Family::NoisyTorus, |rng| {
        let theta = TAU * rng.random::<f64>();
        let phi = (spread * normal(rng)).rem_euclid(TAU);
        let ring = TORUS_MAJOR + TORUS_MINOR * theta.cos();
        [
            ring * phi.cos() + sigma * normal(rng),
            ring * phi.sin() + sigma * normal(rng),
            TORUS_MINOR * theta.sin() + sigma * normal(rng),
        ]
    });
    PointCloud::new(3, rows.into_iter().flatten().collect()).expect("finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    Circle,
    Torus,
}

pub fn gen_noisy_manifold(kind: ManifoldKind, n: usize, sigma: f64, seed: u64) -> PointCloud {
    match kind {
        ManifoldKind::Circle => gen_noisy_circle(n, sigma, seed),
        ManifoldKind::Torus => gen_noisy_torus(n, sigma, DEFAULT_LONGITUDE_SPREAD, seed),
    }
}

/// Mixture of isotropic Gaussians on the plane with an analytic density.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    /// `(weight, center, sigma)`, weights summing to 1
    pub components: Vec<(f64, [f64; 2], f64)>,
}

pub const HIERARCHY_OFFSET: f64 = 0.25;
pub const CRATER_RADIUS: f64 = 0.05;
pub const CRATER_WIDTH: f64 = 0.012;
pub const CRATER_COUNT: usize = 100;
pub const CLUSTER_SPACING: f64 = 0.04;
pub const CLUSTER_WIDTH: f64 = 0.015;

impl GaussianMixture {
    /// Two separated modes at `(±0.6, 0)` with width 0.2.
    pub fn two_modes() -> Self {
        Self {
            components: vec![(0.5, [-0.6, 0.0], 0.2), (0.5, [0.6, 0.0], 0.2)],
        }
    }

    /// Right half: four tight Gaussians around `(0.25, 0)`. Left half: a
    /// crater of 100 Gaussians on a circle around `(−0.25, 0)`, their radii
    /// jittered by a fixed-seed draw so the rim is uneven.
    pub fn hierarchical() -> Self {
        let mut components = Vec::with_capacity(4 + CRATER_COUNT);
        for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            components.push((
                0.125,
                [
                    HIERARCHY_OFFSET + dx * CLUSTER_SPACING,
                    dy * CLUSTER_SPACING,
                ],
                CLUSTER_WIDTH,
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xc7a7e5);
        for i in 0..CRATER_COUNT {
            let t = TAU * i as f64 / CRATER_COUNT as f64;
            let rho = CRATER_RADIUS * (1.0 + 0.1 * (rng.random::<f64>() - 0.5));
            components.push((
                0.5 / CRATER_COUNT as f64,
                [-HIERARCHY_OFFSET + rho * t.cos(), rho * t.sin()],
                CRATER_WIDTH,
            ));
        }
        Self { components }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|(w, c, s)| {
                let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                w * (-d2 / (2.0 * s * s)).exp() / (TAU * s * s)
            })
            .sum()
    }

    pub fn sample(&self, n: usize, seed: u64, family: Family) -> PointCloud {
        let rows = per_index(n, seed, family, |rng| {
            let mut u = rng.random::<f64>();
            let mut pick = self.components.len() - 1;
            for (i, (w, _, _)) in self.components.iter().enumerate() {
                if u < *w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            let (_, c, s) = self.components[pick];
            [c[0] + s * normal(rng), c[1] + s * normal(rng)]
        });
        PointCloud::new(2, rows.into_iter().flatten().collect()).expect("finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};

    #[test]
    fn annulus_probability_examples() {
        let x = [0.25, 0.0];
        assert_relative_eq!(
            annulus_probability(&x),
            0.5 * (1.0 + (PI / 4.0).sin()),
            max_relative = 1e-12
        );
        assert_relative_eq!(annulus_probability(&x), 0.85355, epsilon = 1e-5);
        assert!(annulus_probability(&[0.6, 0.0]) <= (-100.0f64 * 0.35 * 0.35).exp());
        assert!(annulus_probability(&[0.6, 0.0]) < 9.7e-6);
    }

    #[test]
    fn annulus_normalization_keeps_probabilities_below_one() {
        let max = (0..=200_000)
            .map(|i| {
                annulus_probability(&[i as f64 * 1e-5 * std::f64::consts::SQRT_2 / 2.0 / 2.0, 0.0])
            })
            .chain((0..=100_000).map(|i| annulus_probability(&[0.0, i as f64 * 1e-5 * 0.75])))
            .fold(0.0, f64::max);
        assert!(max <= 1.0);
        assert!(max > 0.85);
    }

    #[test]
    fn annulus_label_mean_matches_quadrature() {
        let n = 100_000;
        let s = gen_annulus_classification(n, 11);
        let mean = s.responses.as_ref().unwrap().iter().sum::<f64>() / n as f64;
        // midpoint rule over the unit square
        let m = 1000;
        let h = 1.0 / m as f64;
        let mut integral = 0.0;
        for i in 0..m {
            for j in 0..m {
                integral += annulus_probability(&[
                    -0.5 + (i as f64 + 0.5) * h,
                    -0.5 + (j as f64 + 0.5) * h,
                ]);
            }
        }
        integral *= h * h;
        let se = (integral * (1.0 - integral) / n as f64).sqrt();
        assert!(
            (mean - integral).abs() < 3.0 * se,
            "mean {mean} vs {integral} (se {se})"
        );
        assert!(s.points.iter().all(|p| p.iter().all(|c| c.abs() <= 0.5)));
    }

    #[test]
    fn regression_noise_contract() {
        let surface = BumpSurface::standard();
        let exact = gen_mixture_regression(500, 0.0, 3, &surface);
        for (p, y) in exact.points.iter().zip(exact.responses.as_ref().unwrap()) {
            assert_eq!(*y, surface.value(p));
        }
        let n = 100_000;
        let s = gen_mixture_regression(n, 0.2, 4, &surface);
        let resid: Vec<f64> = s
            .points
            .iter()
            .zip(s.responses.as_ref().unwrap())
            .map(|(p, y)| y - surface.value(p))
            .collect();
        assert!(resid.iter().all(|r| r.abs() <= 5.0 * 0.2 + 1e-12));
        let mean = resid.iter().sum::<f64>() / n as f64;
        let var = resid.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // truncated-normal variance at ±5σ
        let z = Normal::new(0.0, 1.0).unwrap();
        let expected = 0.04 * (1.0 - 2.0 * 5.0 * z.pdf(5.0) / (2.0 * z.cdf(5.0) - 1.0));
        assert!((var / expected - 1.0).abs() < 0.05, "{var} vs {expected}");
        assert!(s.y_max.unwrap() >= surface.abs_max() + 1.0 - 1e-12);
    }

    #[test]
    fn surface_has_five_peaks_and_three_pits_inside_the_box() {
        let s = BumpSurface::standard();
        assert_eq!(s.bumps.iter().filter(|b| b.1 > 0.0).count(), 5);
        assert_eq!(s.bumps.iter().filter(|b| b.1 < 0.0).count(), 3);
        for (c, a, _) in &s.bumps {
            assert!(c[0].abs() <= 0.7 && c[1].abs() <= 0.7);
            // each centre is a strict local extremum of the surface
            let v = s.value(c);
            for (dx, dy) in [(0.02, 0.0), (-0.02, 0.0), (0.0, 0.02), (0.0, -0.02)] {
                let w = s.value(&[c[0] + dx, c[1] + dy]);
                assert!(if *a > 0.0 { w < v } else { w > v });
            }
        }
    }

    #[test]
    fn three_rings_contract() {
        let exact = gen_three_rings(3000, 0.0, 5);
        for p in exact.iter() {
            let r = norm(p);
            assert!([1.0, 2.0, 3.0].iter().any(|k| (r - k).abs() < 1e-12));
        }
        let n = 30_000;
        let counts = exact_counts(&gen_three_rings(n, 0.0, 9));
        let sd = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 3.0).abs() < 4.0 * sd);
        }
        // radial offsets are nearly half-normal for small σ
        let sigma = 0.05;
        let pts = gen_three_rings(100_000, sigma, 6);
        let mean_dev = pts
            .iter()
            .map(|p| {
                let r = norm(p);
                [1.0, 2.0, 3.0]
                    .iter()
                    .map(|k| (r - k).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / pts.len() as f64;
        let expected = sigma * (2.0 / PI).sqrt();
        assert!(
            (mean_dev / expected - 1.0).abs() < 0.05,
            "{mean_dev} vs {expected}"
        );
    }

    fn exact_counts(pts: &PointCloud) -> [usize; 3] {
        let mut c = [0; 3];
        for p in pts.iter() {
            c[(norm(p).round() as usize) - 1] += 1;
        }
        c
    }

    #[test]
    fn hierarchical_counts() {
        let n = 40_000;
        let pts = GaussianMixture::hierarchical().sample(n, 8, Family::HierarchicalDensity);
        let right = pts.iter().filter(|p| p[0] > 0.0).count();
        let sd_half = (n as f64 * 0.25).sqrt();
        assert!((right as f64 - n as f64 / 2.0).abs() < 4.0 * sd_half);
        let sd_eighth = (n as f64 * 0.125 * 0.875).sqrt();
        for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let q = pts
                .iter()
                .filter(|p| p[0] > 0.0 && (p[0] - HIERARCHY_OFFSET) * sx > 0.0 && p[1] * sy > 0.0)
                .count();
            // nearly all of each tight component lies in its own quadrant
            assert!(
                (q as f64 - n as f64 / 8.0).abs() < 4.0 * sd_eighth + 0.01 * n as f64,
                "{q}"
            );
        }
    }

    #[test]
    fn manifold_contracts() {
        for p in gen_noisy_circle(1000, 0.0, 1).iter() {
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
        for p in gen_noisy_torus(1000, 0.0, 1.0, 2).iter() {
            let lhs = ((p[0] * p[0] + p[1] * p[1]).sqrt() - 2.0).powi(2) + p[2] * p[2];
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }

    /// Modified Bessel function of the first kind by its power series.
    fn bessel_i(order: u32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(order as i32) / (1..=order).map(f64::from).product::<f64>();
        let mut sum = term;
        for k in 1..500 {
            term *= (x / 2.0).powi(2) / (k as f64 * (k + order) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum
    }

    #[test]
    fn circle_radius_follows_rice_moments() {
        let sigma = 0.1;
        let pts = gen_noisy_circle(100_000, sigma, 12);
        let n = pts.len() as f64;
        let m1 = pts.iter().map(norm).sum::<f64>() / n;
        let m2 = pts.iter().map(|p| norm(p).powi(2)).sum::<f64>() / n;
        // Rice(ν = 1, σ): E R² = 2σ² + ν², E R = σ √(π/2) L½(−ν²/2σ²)
        let x = -1.0 / (2.0 * sigma * sigma);
        let laguerre =
            (x / 2.0).exp() * ((1.0 - x) * bessel_i(0, -x / 2.0) - x * bessel_i(1, -x / 2.0));
        let e1 = sigma * (PI / 2.0).sqrt() * laguerre;
        assert!((m1 / e1 - 1.0).abs() < 0.05);
        assert!((m2 / (2.0 * sigma * sigma + 1.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn byte_identical_across_thread_counts() {
        let spec = GenSpec::new(Family::NoisyTorus, 777, 42);
        let a = generate(&spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| generate(&spec).unwrap());
        assert_eq!(a, b);
        let c = generate(&GenSpec::new(Family::NoisyTorus, 777, 43)).unwrap();
        assert_ne!(a, c);
        // a prefix of a longer run is the shorter run
        let long = generate(&GenSpec::new(Family::NoisyTorus, 1000, 42)).unwrap();
        assert_eq!(&long.points.coords()[..777 * 3], a.points.coords());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("rings".parse::<Family>().is_err());
    }

    #[test]
    fn mixtures_integrate_to_one() {
        for m in [
            GaussianMixture::two_modes(),
            GaussianMixture::hierarchical(),
        ] {
            let h = 0.002;
            let mut total = 0.0;
            for i in 0..1500 {
                for j in 0..1000 {
                    total += m.density(&[-1.5 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h]);
                }
            }
            assert!((total * h * h - 1.0).abs() < 1e-3);
        }
    }
}
