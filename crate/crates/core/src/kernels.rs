//! Compactly supported kernels, the density and Nadaraya-Watson estimators
//! built from them, and the constants that tie bandwidth to level accuracy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist_sq, norm, NeighborIndex, PointCloud};

/// Default width of the truncated Gaussian, in units of the support radius.
pub const DEFAULT_GAUSSIAN_WIDTH: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    /// `exp(-|x|²/(2s²))` on the open unit ball, zero elsewhere.
    TruncatedGaussian { s: f64 },
    /// `exp(1 - 1/(1-|x|²))` on the open unit ball.
    Bump,
}

/// A radial kernel supported in the unit ball with `K(0) = 1`, `0 ≤ K ≤ 1`
/// and total mass `c_k ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    shape: KernelShape,
    dim: usize,
    c_k: f64,
}

impl KernelSpec {
    pub fn new(shape: KernelShape, dim: usize) -> Result<Self> {
        let c_k = compute_ck(shape, dim)?;
        if !(c_k > 0.0 && c_k < 1.0) {
            return Err(Error::OutOfRange { value: c_k });
        }
        Ok(Self { shape, dim, c_k })
    }

    pub fn truncated_gaussian(s: f64, dim: usize) -> Result<Self> {
        Self::new(KernelShape::TruncatedGaussian { s }, dim)
    }

    /// The truncated Gaussian with the default width.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::truncated_gaussian(DEFAULT_GAUSSIAN_WIDTH, dim)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    /// Radial profile: the kernel value at any point of norm `rho`.
    pub fn profile(&self, rho: f64) -> f64 {
        profile(self.shape, rho)
    }

    /// `K_r(x) = K(x / r)`.
    pub fn eval(&self, x: &[f64], r: f64) -> f64 {
        debug_assert!(r > 0.0);
        self.profile(norm(x) / r)
    }

    fn eval_sq(&self, d2: f64, r: f64) -> f64 {
        self.profile(d2.sqrt() / r)
    }
}

fn profile(shape: KernelShape, rho: f64) -> f64 {
    if rho >= 1.0 {
        return 0.0;
    }
    match shape {
        KernelShape::TruncatedGaussian { s } => (-rho * rho / (2.0 * s * s)).exp(),
        KernelShape::Bump => (1.0 - 1.0 / (1.0 - rho * rho)).exp(),
    }
}

/// `∫ K` over ℝᵈ by adaptive radial quadrature.
///
/// Fails with [`Error::OutOfRange`] when the integral is not in (0, 1), i.e.
/// the shape cannot be used in this dimension.
pub fn compute_ck(shape: KernelShape, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(invalid("kernel dimension must be positive"));
    }
    if let KernelShape::TruncatedGaussian { s } = shape {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid(format!("Gaussian width must be positive, got {s}")));
        }
    }
    let radial = |rho: f64| profile(shape, rho) * rho.powi(dim as i32 - 1);
    let integral = sphere_area(dim) * adaptive_simpson(&radial, 0.0, 1.0, 1e-13);
    if integral > 0.0 && integral < 1.0 {
        Ok(integral)
    } else {
        Err(Error::OutOfRange { value: integral })
    }
}

/// Surface area of the unit sphere in ℝᵈ, `2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(dim: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

/// Γ(k/2) for positive integers k.
fn gamma_half(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Sample `X₁..Xₙ` with optional bounded responses `Y₁..Yₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub points: PointCloud,
    pub responses: Option<Vec<f64>>,
    pub y_max: Option<f64>,
}

impl LabeledSample {
    pub fn new(
        points: PointCloud,
        responses: Option<Vec<f64>>,
        y_max: Option<f64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("sample must contain at least one point"));
        }
        if let Some(ys) = &responses {
            if ys.len() != points.len() {
                return Err(invalid(format!(
                    "{} responses for {} points",
                    ys.len(),
                    points.len()
                )));
            }
            if ys.iter().any(|y| !y.is_finite()) {
                return Err(invalid("non-finite response"));
            }
            if let Some(bound) = y_max {
                if let Some(i) = ys.iter().position(|y| y.abs() > bound) {
                    return Err(invalid(format!("|Y_{i}| exceeds y_max = {bound}")));
                }
            }
        }
        Ok(Self {
            points,
            responses,
            y_max,
        })
    }

    pub fn unlabeled(points: PointCloud) -> Result<Self> {
        Self::new(points, None, None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    fn responses(&self) -> Result<&[f64]> {
        self.responses.as_deref().ok_or(Error::MissingResponses)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Density,
    Regression,
}

/// Known bounds on the model: `p_max ≥ sup p`, `p_min ≤ inf p` on the
/// support, `y_max ≥ |Y|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelBounds {
    pub p_max: Option<f64>,
    pub p_min: Option<f64>,
    pub y_max: Option<f64>,
}

/// Density estimate `(n C_K rᵈ)⁻¹ Σ K_r(x − Xᵢ)`.
pub fn kde_at(data: &LabeledSample, x: &[f64], r: f64, k: &KernelSpec) -> f64 {
    let sum: f64 = data
        .points
        .iter()
        .map(|p| k.eval_sq(dist_sq(x, p), r))
        .sum();
    sum / density_normalizer(data.len(), r, k)
}

/// Nadaraya-Watson estimate `Σ Yᵢ K_r(x−Xᵢ) / Σ K_r(x−Xᵢ)`; `None` when no
/// sample point carries weight at `x`.
pub fn nw_at(data: &LabeledSample, x: &[f64], r: f64, k: &KernelSpec) -> Result<Option<f64>> {
    let ys = data.responses()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (p, y) in data.points.iter().zip(ys) {
        let w = k.eval_sq(dist_sq(x, p), r);
        num += w * y;
        den += w;
    }
    Ok((den > 0.0).then(|| num / den))
}

fn density_normalizer(n: usize, r: f64, k: &KernelSpec) -> f64 {
    n as f64 * k.c_k() * r.powi(k.dim() as i32)
}

/// `f̂ₙ(Xᵢ)` for every sample point. Regression estimates that are undefined
/// come back as `None`; density estimates are always present.
pub fn estimate_at_samples(
    data: &LabeledSample,
    r: f64,
    k: &KernelSpec,
    mode: Mode,
) -> Result<Vec<Option<f64>>> {
    if !(r > 0.0) {
        return Err(invalid(format!("bandwidth must be positive, got {r}")));
    }
    let ys = match mode {
        Mode::Density => None,
        Mode::Regression => Some(data.responses()?),
    };
    let index = NeighborIndex::new(&data.points, r);
    let norm = density_normalizer(data.len(), r, k);
    let values = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let (mut num, mut den) = (0.0, 0.0);
            let mut hits: Vec<(usize, f64)> = Vec::new();
            index.for_each_within(data.points.point(i), |j, d| hits.push((j, d)));
            // fixed summation order keeps the estimate independent of the grid layout
            hits.sort_unstable_by_key(|h| h.0);
            for (j, d) in hits {
                let w = k.profile(d / r);
                den += w;
                if let Some(ys) = ys {
                    num += w * ys[j];
                }
            }
            match ys {
                None => Some(den / norm),
                Some(_) => (den > 0.0).then(|| num / den),
            }
        })
        .collect();
    Ok(values)
}

/// Indices `i` with `f̂ₙ(Xᵢ) ≥ level`, ascending.
pub fn filter_points(
    data: &LabeledSample,
    level: f64,
    r: f64,
    k: &KernelSpec,
    mode: Mode,
) -> Result<Vec<usize>> {
    let values = estimate_at_samples(data, r, k, mode)?;
    Ok(filter_by_values(&values, level))
}

pub fn filter_by_values(values: &[Option<f64>], level: f64) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| matches!(v, Some(v) if *v >= level).then_some(i))
        .collect()
}

/// The exponent constant `C*_ε` governing how fast the level-set
/// estimates concentrate.
pub fn theory_constant(mode: Mode, epsilon: f64, c_k: f64, bounds: &ModelBounds) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let p_max = bounds.p_max.ok_or(Error::MissingBound("p_max"))?;
    match mode {
        Mode::Density => Ok(epsilon * epsilon * c_k / (3.0 * p_max + epsilon)),
        Mode::Regression => {
            let p_min = bounds.p_min.ok_or(Error::MissingBound("p_min"))?;
            let y_max = bounds.y_max.ok_or(Error::MissingBound("y_max"))?;
            if !(p_min > 0.0) {
                return Err(invalid("regression requires p_min > 0"));
            }
            let num = epsilon * epsilon * p_min * p_min * c_k;
            let den = 3.0 * (y_max * y_max + epsilon * epsilon) * p_max
                + 2.0 * epsilon * p_min * (y_max + epsilon);
            Ok(num / den)
        }
    }
}

/// Safety factor applied to `1 / C*_{ε/2}` when model bounds are known.
pub const BANDWIDTH_SAFETY: f64 = 1.01;

/// Bandwidth for `n` samples: `(D log n / n)^{1/d}` with `D = 1.01 / C*_{ε/2}`
/// when bounds are supplied, otherwise `((log n)² / n)^{1/d}`.
///
/// `n` is real-valued so the rule can be evaluated off the integers; it must
/// exceed 1.
pub fn recommended_bandwidth(
    n: f64,
    kernel: &KernelSpec,
    epsilon: f64,
    mode: Mode,
    bounds: Option<&ModelBounds>,
) -> Result<f64> {
    if !(n > 1.0) {
        return Err(invalid(format!("bandwidth rule needs n > 1, got {n}")));
    }
    let d = kernel.dim() as f64;
    let log_n = n.ln();
    let scale = match bounds {
        Some(b) => {
            BANDWIDTH_SAFETY / theory_constant(mode, epsilon / 2.0, kernel.c_k(), b)? * log_n
        }
        None => log_n * log_n,
    };
    Ok((scale / n).powf(1.0 / d))
}

/// Fallback bandwidth for an integer sample size.
pub fn fallback_bandwidth(n: usize, dim: usize) -> f64 {
    let log_n = (n.max(2) as f64).ln();
    (log_n * log_n / n.max(2) as f64).powf(1.0 / dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn line(xs: &[f64]) -> LabeledSample {
        LabeledSample::unlabeled(PointCloud::new(1, xs.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn kernel_value_examples() {
        let k = KernelSpec::truncated_gaussian(0.3, 1).unwrap();
        assert_eq!(k.eval(&[0.0], 0.7), 1.0);
        assert_eq!(k.eval(&[1.4], 0.7), 0.0);
        assert_relative_eq!(k.eval(&[0.3], 1.0), (-0.5f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(k.eval(&[0.3], 1.0), 0.60653, epsilon = 1e-5);
    }

    #[test]
    fn ck_matches_closed_forms() {
        // oracle: 1-D closed form through the normal CDF
        let phi = Normal::new(0.0, 1.0).unwrap();
        let s = 0.3;
        let closed_1d = (2.0 * std::f64::consts::PI).sqrt() * s * (2.0 * phi.cdf(1.0 / s) - 1.0);
        let c1 = compute_ck(KernelShape::TruncatedGaussian { s }, 1).unwrap();
        assert_relative_eq!(c1, closed_1d, max_relative = 1e-8);
        assert_relative_eq!(c1, 0.751343, epsilon = 1e-6);

        // oracle: radial closed form in 2-D
        let closed_2d = 2.0 * std::f64::consts::PI * s * s * (1.0 - (-1.0 / (2.0 * s * s)).exp());
        let c2 = compute_ck(KernelShape::TruncatedGaussian { s }, 2).unwrap();
        assert_relative_eq!(c2, closed_2d, max_relative = 1e-8);
        assert_relative_eq!(c2, 0.563301, epsilon = 1e-6);
    }

    #[test]
    fn bump_violates_mass_bound_on_the_line() {
        match compute_ck(KernelShape::Bump, 1) {
            Err(Error::OutOfRange { value }) => {
                // e · 0.443994 from the standard bump integral
                assert_relative_eq!(value, std::f64::consts::E * 0.443994, epsilon = 1e-5);
                assert_relative_eq!(value, 1.2069, epsilon = 1e-4);
            }
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        assert!(KernelSpec::new(KernelShape::Bump, 2).is_err());
    }

    #[test]
    fn wide_gaussian_rejected() {
        assert!(matches!(
            KernelSpec::truncated_gaussian(0.6, 2),
            Err(Error::OutOfRange { .. })
        ));
        assert!(KernelSpec::truncated_gaussian(-0.1, 2).is_err());
    }

    #[test]
    fn kernel_support_and_range_on_random_probes() {
        let kernels = [
            KernelSpec::standard(1).unwrap(),
            KernelSpec::standard(2).unwrap(),
            KernelSpec::standard(3).unwrap(),
            KernelSpec::standard(4).unwrap(),
            KernelSpec::truncated_gaussian(0.2, 2).unwrap(),
        ];
        let mut u = 0.5f64;
        for k in &kernels {
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..k.dim())
                    .map(|_| {
                        u = (u * 9301.0 + 0.2113).fract();
                        4.0 * u - 2.0
                    })
                    .collect();
                let v = k.eval(&x, 1.0);
                assert!((0.0..=1.0).contains(&v));
                if norm(&x) > 1.0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn kde_examples() {
        let k = KernelSpec::standard(1).unwrap();
        let one = line(&[0.4]);
        assert_relative_eq!(kde_at(&one, &[0.4], 0.5, &k), 1.0 / (k.c_k() * 0.5));
        assert_eq!(kde_at(&one, &[2.0], 0.5, &k), 0.0);
        // K vanishes on the boundary of its support
        let two = line(&[0.0, 1.0]);
        let v = kde_at(&two, &[0.0], 1.0, &k);
        assert_relative_eq!(v, 1.0 / (2.0 * k.c_k()), max_relative = 1e-12);
        assert_relative_eq!(v, 0.665475, epsilon = 1e-6);
    }

    #[test]
    fn single_point_kde_integrates_to_one() {
        for dim in [1usize, 2] {
            let k = KernelSpec::standard(dim).unwrap();
            let data =
                LabeledSample::unlabeled(PointCloud::new(dim, vec![0.1; dim]).unwrap()).unwrap();
            let r = 0.8;
            let m = 800;
            let h = 2.0 * r / m as f64;
            let mut total = 0.0;
            if dim == 1 {
                for i in 0..m {
                    let x = 0.1 - r + (i as f64 + 0.5) * h;
                    total += kde_at(&data, &[x], r, &k) * h;
                }
            } else {
                for i in 0..m {
                    for j in 0..m {
                        let x = [
                            0.1 - r + (i as f64 + 0.5) * h,
                            0.1 - r + (j as f64 + 0.5) * h,
                        ];
                        total += kde_at(&data, &x, r, &k) * h * h;
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-4, "dim {dim}: {total}");
        }
    }

    #[test]
    fn nadaraya_watson_examples() {
        let k = KernelSpec::standard(1).unwrap();
        let pts = PointCloud::new(1, vec![-0.2, 0.2, 0.1]).unwrap();
        let constant = LabeledSample::new(pts.clone(), Some(vec![3.5; 3]), None).unwrap();
        assert_relative_eq!(nw_at(&constant, &[0.0], 0.5, &k).unwrap().unwrap(), 3.5);
        assert_eq!(nw_at(&constant, &[5.0], 0.5, &k).unwrap(), None);

        let sym = LabeledSample::new(
            PointCloud::new(1, vec![-0.2, 0.2]).unwrap(),
            Some(vec![0.0, 1.0]),
            None,
        )
        .unwrap();
        assert_relative_eq!(nw_at(&sym, &[0.0], 0.5, &k).unwrap().unwrap(), 0.5);

        let bare = line(&[0.0]);
        assert!(matches!(
            nw_at(&bare, &[0.0], 0.5, &k),
            Err(Error::MissingResponses)
        ));
    }

    #[test]
    fn batch_estimates_match_pointwise() {
        let k = KernelSpec::standard(2).unwrap();
        let mut coords = Vec::new();
        let mut u = 0.77f64;
        for _ in 0..300 {
            u = (u * 4099.0 + 0.31).fract();
            coords.push(u);
        }
        let ys: Vec<f64> = coords.chunks(2).map(|c| c[0] - c[1]).collect();
        let data = LabeledSample::new(PointCloud::new(2, coords).unwrap(), Some(ys), None).unwrap();
        let dens = estimate_at_samples(&data, 0.2, &k, Mode::Density).unwrap();
        let regr = estimate_at_samples(&data, 0.2, &k, Mode::Regression).unwrap();
        for i in 0..data.len() {
            let x = data.points.point(i);
            assert_relative_eq!(
                dens[i].unwrap(),
                kde_at(&data, x, 0.2, &k),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                regr[i].unwrap(),
                nw_at(&data, x, 0.2, &k).unwrap().unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn filter_examples() {
        let k = KernelSpec::standard(1).unwrap();
        let data = line(&[0.0, 0.05, 0.1, 0.9]);
        assert_eq!(
            filter_points(&data, 0.0, 0.3, &k, Mode::Density).unwrap(),
            vec![0, 1, 2, 3]
        );
        let max = estimate_at_samples(&data, 0.3, &k, Mode::Density)
            .unwrap()
            .into_iter()
            .flatten()
            .fold(f64::MIN, f64::max);
        assert!(filter_points(&data, max * 1.001, 0.3, &k, Mode::Density)
            .unwrap()
            .is_empty());
        assert!(matches!(
            filter_points(&data, 0.0, 0.3, &k, Mode::Regression),
            Err(Error::MissingResponses)
        ));
    }

    #[test]
    fn undefined_regression_points_are_filtered_out() {
        let values = vec![Some(0.5), None, Some(-1.0)];
        assert_eq!(filter_by_values(&values, f64::NEG_INFINITY), vec![0, 2]);
    }

    #[test]
    fn theory_constant_examples() {
        let b = ModelBounds {
            p_max: Some(1.0),
            p_min: Some(0.5),
            y_max: Some(1.0),
        };
        assert_relative_eq!(
            theory_constant(Mode::Density, 0.5, 0.5, &b).unwrap(),
            0.25 * 0.5 / 3.5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            theory_constant(Mode::Density, 0.5, 0.5, &b).unwrap(),
            0.035714,
            epsilon = 1e-6
        );
        assert!(theory_constant(Mode::Density, 1e-9, 0.5, &b).unwrap() < 1e-18);
        assert_relative_eq!(
            theory_constant(Mode::Regression, 0.5, 0.5, &b).unwrap(),
            0.03125 / 4.5,
            max_relative = 1e-14
        );
        let only_pmax = ModelBounds {
            p_max: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            theory_constant(Mode::Regression, 0.5, 0.5, &only_pmax),
            Err(Error::MissingBound("p_min"))
        ));
        assert!(matches!(
            theory_constant(Mode::Density, 0.5, 0.5, &ModelBounds::default()),
            Err(Error::MissingBound("p_max"))
        ));
    }

    #[test]
    fn density_constant_increases_with_epsilon() {
        let b = ModelBounds {
            p_max: Some(2.0),
            ..Default::default()
        };
        let mut prev = 0.0;
        for i in 1..=1000 {
            let c = theory_constant(Mode::Density, i as f64 / 1000.0, 0.56, &b).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn bandwidth_examples() {
        let k1 = KernelSpec::standard(1).unwrap();
        let k2 = KernelSpec::standard(2).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(
            recommended_bandwidth(e, &k1, 0.1, Mode::Density, None).unwrap(),
            1.0 / e,
            max_relative = 1e-14
        );
        let r = recommended_bandwidth(10_000.0, &k2, 0.1, Mode::Density, None).unwrap();
        assert_relative_eq!(r, 10_000f64.ln() / 100.0, max_relative = 1e-14);
        assert_relative_eq!(r, 0.09210, epsilon = 1e-5);
        assert_relative_eq!(fallback_bandwidth(10_000, 2), r, max_relative = 1e-14);

        let b = ModelBounds {
            p_max: Some(1.0),
            ..Default::default()
        };
        let r1 = recommended_bandwidth(1000.0, &k1, 0.5, Mode::Density, Some(&b)).unwrap();
        let r2 = recommended_bandwidth(2000.0, &k1, 0.5, Mode::Density, Some(&b)).unwrap();
        assert!(r2 < r1);
        let c = theory_constant(Mode::Density, 0.25, k1.c_k(), &b).unwrap();
        assert_relative_eq!(r1, 1.01 / c * 1000f64.ln() / 1000.0, max_relative = 1e-12);
    }
}
