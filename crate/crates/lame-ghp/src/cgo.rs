//! Complex geometrical optics probe, sector Laplace integrals and the
//! integral identity over a sector `S_h = {0 < φ < φ₀, r < h}`.
//!
//! The probe `v = e^{-s√z}(1, i)` with `z = x₁ + ix₂` is holomorphic and
//! divergence-free, so the Lamé operator without its `κ` term annihilates it.
//! Green's formula on `S_h` then gives `I₃ = I₁⁺ + I₁⁻ + I₂` with
//! `I₃ = -κ∫_{S_h} u·v` and boundary terms `∫ (T_ν u)·v - (T_ν v)·u`
//! over the two straight sides and the arc `Λ_h = {h(cos φ, sin φ): 0 ≤ φ ≤ φ₀}`
//! with outward normals. Products `u·v` are bilinear, without conjugation.

use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elastic_field::{
    FourierCoefficients, LameMedium, PolarPoint, e1, evaluate_field, evaluate_gradient,
};
use crate::error::{Error, Result};
use crate::finite_diff::{CMat2, CVec2};
use crate::quadrature::GaussLegendre;
use crate::specfun::bessel_j_orders;
use crate::traces::{LineSegment, traction_from_gradient};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gauss–Legendre nodes per panel and per dimension.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// Default decay parameters of the identity sweep.
pub const DEFAULT_S_GRID: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

/// Graded radial panels (in `t = √r`) towards the corner.
const RADIAL_PANELS: usize = 8;

/// Graded panels for the Laplace integrand `t^{2α+1}`, which is only finitely
/// smooth at the origin for non-integer `2α`.
const LAPLACE_PANELS: usize = 32;

/// Uniform panels for the Laplace tail integral.
const TAIL_PANELS: usize = 16;

/// Extent of the tail integral in units of the decay length `1/(sδ)`.
const TAIL_DECAY_LENGTHS: f64 = 80.0;

/// Quadrature differences above this fraction of the integral scale flag
/// non-convergence.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Largest relative residual accepted from the `b₀` fit.
pub const FIT_TOL: f64 = 1e-2;

/// Tolerance on the ratio spread of a geometric `s` grid.
const GEOMETRIC_GRID_TOL: f64 = 1e-9;

/// The probe `v(x) = e^{-s√r e^{iφ/2}} (1, i)` with the principal root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgoProbe {
    s: f64,
}

impl CgoProbe {
    /// Probe with decay parameter `s > 0`.
    ///
    /// # Errors
    /// [`Error::Precondition`] for non-positive or non-finite `s`.
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Precondition(format!(
                "CGO decay parameter must be > 0, got {s}"
            )));
        }
        Ok(Self { s })
    }

    /// Decay parameter `s`.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Principal `√z = √r e^{iφ/2}`.
    fn root(p: &PolarPoint) -> Complex64 {
        Complex64::from_polar(p.r().sqrt(), 0.5 * p.phi())
    }

    /// Scalar factor `e^{-s√z}`.
    pub fn scalar(&self, p: &PolarPoint) -> Complex64 {
        (-self.s * Self::root(p)).exp()
    }

    /// `v(x)`.
    pub fn value(&self, p: &PolarPoint) -> CVec2 {
        e1() * self.scalar(p)
    }

    /// `∇v` with entries `(i, j) = ∂_j v_i`; with `f = e^{-s√z}` this is
    /// `f'(z)·[[1, i], [i, -1]]`.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] at the origin, where `f'` is singular.
    pub fn gradient(&self, p: &PolarPoint) -> Result<CMat2> {
        if p.r() <= 0.0 {
            return Err(Error::InvalidGeometry(
                "CGO gradient is singular at the origin".into(),
            ));
        }
        let root = Self::root(p);
        let derivative = -self.s / (2.0 * root) * (-self.s * root).exp();
        Ok(CMat2::new(Complex64::new(1.0, 0.0), I, I, Complex64::new(-1.0, 0.0)) * derivative)
    }
}

/// Sector opening `φ₀ ∈ (0, π)` and radius `h ∈ (0, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SectorRecord", into = "SectorRecord")]
pub struct SectorGeometry {
    phi0: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct SectorRecord {
    phi0: f64,
    h: f64,
}

impl TryFrom<SectorRecord> for SectorGeometry {
    type Error = Error;

    fn try_from(r: SectorRecord) -> Result<Self> {
        Self::new(r.phi0, r.h)
    }
}

impl From<SectorGeometry> for SectorRecord {
    fn from(g: SectorGeometry) -> Self {
        Self {
            phi0: g.phi0,
            h: g.h,
        }
    }
}

impl Default for SectorGeometry {
    /// `φ₀ = π/3`, `h = 1/2`.
    fn default() -> Self {
        Self {
            phi0: PI / 3.0,
            h: 0.5,
        }
    }
}

impl SectorGeometry {
    /// Validated sector.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] for `φ₀ ∉ (0, π)` or `h ∉ (0, e)`.
    pub fn new(phi0: f64, h: f64) -> Result<Self> {
        if !(phi0 > 0.0 && phi0 < PI) {
            return Err(Error::InvalidGeometry(format!(
                "sector opening must lie in (0, pi), got {phi0}"
            )));
        }
        if !(h > 0.0 && h < E) {
            return Err(Error::InvalidGeometry(format!(
                "sector radius must lie in (0, e), got {h}"
            )));
        }
        Ok(Self { phi0, h })
    }

    /// Opening angle `φ₀`.
    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Radius `h`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `δ_K = min_{0<φ<φ₀} cos(φ/2) = cos(φ₀/2)`.
    pub fn delta_k(&self) -> f64 {
        (0.5 * self.phi0).cos()
    }
}

/// Smallest `s` for which the Laplace tail bound holds:
/// `t^{2α+1} e^{-sδt/2} ≤ 1` for all `t > 0` iff `s ≥ 2(2α+1)/(eδ)`.
pub fn laplace_min_s(alpha: f64, delta: f64) -> f64 {
    2.0 * (2.0 * alpha + 1.0) / (E * delta)
}

/// Tail bound `(4/(sδ)) e^{-s√h δ/2}`.
pub fn laplace_tail_bound(s: f64, h: f64, delta: f64) -> f64 {
    4.0 / (s * delta) * (-s * h.sqrt() * delta / 2.0).exp()
}

/// Truncated Laplace integral and its asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceIntegral {
    /// Exponent `α`.
    pub alpha: f64,
    /// Decay parameter.
    pub s: f64,
    /// Angle `φ`.
    pub phi: f64,
    /// Upper limit `h`.
    pub h: f64,
    /// `cos(φ/2)`, the sector constant of the opening `φ`.
    pub delta: f64,
    /// `∫_0^h r^α e^{-s√r e^{iφ/2}} dr` by quadrature.
    pub numeric: Complex64,
    /// `2Γ(2α+2)/(s e^{iφ/2})^{2α+2}`.
    pub leading: Complex64,
    /// `-2∫_{√h}^∞ t^{2α+1} e^{-s e^{iφ/2} t} dt` by quadrature, so that
    /// `numeric = leading + tail`.
    pub tail: Complex64,
    /// [`laplace_tail_bound`].
    pub bound: f64,
}

impl LaplaceIntegral {
    /// `|numeric - leading|`.
    pub fn deviation(&self) -> f64 {
        (self.numeric - self.leading).norm()
    }

    /// Whether the deviation respects the tail bound.
    pub fn within_bound(&self) -> bool {
        self.deviation() <= self.bound
    }
}

/// `∫_0^h r^α e^{-s√r e^{iφ/2}} dr` through `r = t²`, with its leading term
/// and tail bound for `δ = cos(φ/2)`.
///
/// # Errors
/// [`Error::Precondition`] for `α ≤ 0`, `|φ| ≥ π`, `h ∉ (0, e)` or
/// `s < 2(2α+1)/(eδ)`.
pub fn laplace_sector_integral(alpha: f64, s: f64, phi: f64, h: f64) -> Result<LaplaceIntegral> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!(
            "alpha must be > 0, got {alpha}"
        )));
    }
    if phi.is_nan() || phi.abs() >= PI {
        return Err(Error::Precondition(format!(
            "phi must lie in (-pi, pi), got {phi}"
        )));
    }
    if !(h > 0.0 && h < E) {
        return Err(Error::Precondition(format!(
            "h must lie in (0, e), got {h}"
        )));
    }
    let delta = (0.5 * phi).cos();
    let min_s = laplace_min_s(alpha, delta);
    if !(s >= min_s && s.is_finite()) {
        return Err(Error::Precondition(format!(
            "s = {s} is below 2(2alpha+1)/(e delta) = {min_s}"
        )));
    }
    let rule = GaussLegendre::new(DEFAULT_QUADRATURE_ORDER)?;
    let rate = Complex64::from_polar(s, 0.5 * phi);
    let power = 2.0 * alpha + 1.0;
    let integrand = |t: f64| Ok(2.0 * t.powf(power) * (-rate * t).exp());
    let root_h = h.sqrt();
    let numeric = rule.integrate_graded(root_h, LAPLACE_PANELS, integrand)?;
    let extent = TAIL_DECAY_LENGTHS / (s * delta);
    let tail = -rule.integrate_uniform(root_h, root_h + extent, TAIL_PANELS, integrand)?;
    let exponent = 2.0 * alpha + 2.0;
    let leading = Complex64::from_polar(
        2.0 * libm::tgamma(exponent) / s.powf(exponent),
        -0.5 * phi * exponent,
    );
    Ok(LaplaceIntegral {
        alpha,
        s,
        phi,
        h,
        delta,
        numeric,
        leading,
        tail,
        bound: laplace_tail_bound(s, h, delta),
    })
}

/// `u·v` from the series
/// `e^{-s√z} Σ_m e^{i(m+1)φ}[-k_p a_m J_{m+1}(k_p r) + i k_s b_m J_{m+1}(k_s r)]`.
///
/// # Errors
/// Bessel domain errors.
pub fn uv_expansion(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    probe: &CgoProbe,
    p: &PolarPoint,
) -> Result<Complex64> {
    let order = coeffs.truncation_order();
    let (kp, ks) = (medium.k_p(), medium.k_s());
    let jp = bessel_j_orders(order + 1, kp * p.r())?;
    let js = bessel_j_orders(order + 1, ks * p.r())?;
    let phase = Complex64::from_polar(1.0, p.phi());
    let mut rotation = phase;
    let mut sum = Complex64::default();
    for m in 0..=order {
        sum += rotation * (-kp * coeffs.a()[m] * jp[m + 1] + I * ks * coeffs.b()[m] * js[m + 1]);
        rotation *= phase;
    }
    Ok(probe.scalar(p) * sum)
}

fn dot(u: &CVec2, v: &CVec2) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

/// The four integrals of the identity at one decay parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityTerms {
    /// Decay parameter.
    pub s: f64,
    /// Boundary term on the upper side `φ = φ₀`.
    pub i1_plus: Complex64,
    /// Boundary term on the lower side `φ = 0`.
    pub i1_minus: Complex64,
    /// Boundary term on the arc `r = h`.
    pub i2: Complex64,
    /// `-κ∫_{S_h} u·v`.
    pub i3: Complex64,
    /// `|I₃ - I₁⁺ - I₁⁻ - I₂|`.
    pub residual: f64,
    /// `|I₁⁺| + |I₁⁻| + |I₂| + |I₃|`.
    pub scale: f64,
    /// Largest change of any integral when the quadrature order is doubled.
    pub quadrature_error: f64,
    /// Whether `quadrature_error ≤ QUADRATURE_TOL · scale`.
    pub converged: bool,
}

impl IdentityTerms {
    /// Residual relative to the integral scale (zero for a vanishing field).
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            0.0
        }
    }
}

struct Integrals {
    i1_plus: Complex64,
    i1_minus: Complex64,
    i2: Complex64,
    i3: Complex64,
}

fn boundary_density(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    probe: &CgoProbe,
    p: &PolarPoint,
    nu: [f64; 2],
) -> Result<Complex64> {
    let u = evaluate_field(medium, coeffs, p)?;
    let tu = traction_from_gradient(medium, &evaluate_gradient(medium, coeffs, p)?, nu);
    let tv = traction_from_gradient(medium, &probe.gradient(p)?, nu);
    Ok(dot(&tu, &probe.value(p)) - dot(&tv, &u))
}

fn integrals(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    geometry: &SectorGeometry,
    probe: &CgoProbe,
    rule: &GaussLegendre,
) -> Result<Integrals> {
    let (phi0, h) = (geometry.phi0, geometry.h);
    let root_h = h.sqrt();
    let side = |segment: LineSegment| {
        rule.integrate_graded(root_h, RADIAL_PANELS, |t| {
            let density = boundary_density(
                medium,
                coeffs,
                probe,
                &segment.polar_point(t * t),
                segment.nu(),
            )?;
            Ok(density * (2.0 * t))
        })
    };
    let i1_plus = side(LineSegment::upper(phi0, h)?)?;
    let i1_minus = side(LineSegment::lower(h)?)?;
    let i2 = rule.integrate(0.0, phi0, |phi| {
        let p = PolarPoint::new(h, phi)?;
        Ok(boundary_density(medium, coeffs, probe, &p, [phi.cos(), phi.sin()])? * h)
    })?;
    let area = rule.integrate(0.0, phi0, |phi| {
        rule.integrate_graded(root_h, RADIAL_PANELS, |t| {
            let p = PolarPoint::new(t * t, phi)?;
            let uv = dot(&evaluate_field(medium, coeffs, &p)?, &probe.value(&p));
            Ok(uv * (2.0 * t * t * t))
        })
    })?;
    Ok(Integrals {
        i1_plus,
        i1_minus,
        i2,
        i3: -medium.kappa() * area,
    })
}

/// Identity terms at decay parameter `s` with `order` nodes per panel, the
/// doubled order providing the convergence estimate.
///
/// # Errors
/// [`Error::Precondition`] for invalid `s` or `order`; evaluation errors.
pub fn identity_terms(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    geometry: &SectorGeometry,
    s: f64,
    order: usize,
) -> Result<IdentityTerms> {
    let probe = CgoProbe::new(s)?;
    let base = integrals(
        medium,
        coeffs,
        geometry,
        &probe,
        &GaussLegendre::new(order)?,
    )?;
    let fine = integrals(
        medium,
        coeffs,
        geometry,
        &probe,
        &GaussLegendre::new(2 * order)?,
    )?;
    let pairs = [
        (base.i1_plus, fine.i1_plus),
        (base.i1_minus, fine.i1_minus),
        (base.i2, fine.i2),
        (base.i3, fine.i3),
    ];
    let quadrature_error = pairs
        .iter()
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let scale = pairs.iter().map(|(a, _)| a.norm()).sum::<f64>();
    let residual = (base.i3 - base.i1_plus - base.i1_minus - base.i2).norm();
    Ok(IdentityTerms {
        s,
        i1_plus: base.i1_plus,
        i1_minus: base.i1_minus,
        i2: base.i2,
        i3: base.i3,
        residual,
        scale,
        quadrature_error,
        converged: quadrature_error <= QUADRATURE_TOL * scale,
    })
}

/// [`identity_terms`] over `s_grid`, evaluated in parallel and returned in
/// grid order.
///
/// # Errors
/// As [`identity_terms`].
pub fn cgo_identity_check(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    geometry: &SectorGeometry,
    s_grid: &[f64],
    order: usize,
) -> Result<Vec<IdentityTerms>> {
    s_grid
        .par_iter()
        .map(|&s| identity_terms(medium, coeffs, geometry, s, order))
        .collect()
}

/// `60κk_s²(e^{-2iφ₀} - 1)`: the `s^{-6}` coefficient of `I₃` per unit `b₀`
/// when `a₀ = 0`.
pub fn b0_leading_factor(medium: &LameMedium, phi0: f64) -> Complex64 {
    60.0 * medium.kappa() * medium.k_s().powi(2) * (Complex64::from_polar(1.0, -2.0 * phi0) - 1.0)
}

/// Coefficient of `b₀` in the traction-free pair relation
/// `60κk_s²(e^{-2iφ₀} - 1) + 90μ(1 - e^{-2iφ₀})k_s⁴`, which equals
/// `30(e^{-2iφ₀} - 1)k_s²(2κ - 3μk_s²) = -30κk_s²(e^{-2iφ₀} - 1)`.
pub fn b0_relation_coefficient(medium: &LameMedium, phi0: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -2.0 * phi0);
    let ks2 = medium.k_s().powi(2);
    b0_leading_factor(medium, phi0) + 90.0 * medium.mu() * (1.0 - e) * ks2 * ks2
}

/// Least-squares estimate of `b₀` from `I₃(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B0Fit {
    /// Decay parameters used.
    pub s_grid: Vec<f64>,
    /// Fitted `s^{-6}` coefficient.
    pub leading: Complex64,
    /// Fitted `s^{-8}, s^{-10}, …` coefficients.
    pub corrections: Vec<Complex64>,
    /// [`b0_leading_factor`].
    pub factor: Complex64,
    /// `leading / factor`.
    pub b0: Complex64,
    /// `‖fit - data‖/‖data‖` on the `s⁶I₃` values.
    pub relative_residual: f64,
}

/// Fits `s⁶I₃(s) ≈ c₆ + c₈s^{-2} (+ c₁₀s^{-4})` and returns
/// `b₀ = c₆ / (60κk_s²(e^{-2iφ₀} - 1))`. Three terms are used from four
/// grid points on, two otherwise.
///
/// # Errors
/// [`Error::Precondition`] for mismatched lengths, fewer than two points or a
/// non-geometric grid; [`Error::Numeric`] when the fit residual exceeds
/// [`FIT_TOL`].
pub fn leading_coefficient_b0(
    medium: &LameMedium,
    geometry: &SectorGeometry,
    s_grid: &[f64],
    i3_values: &[Complex64],
) -> Result<B0Fit> {
    if s_grid.len() != i3_values.len() || s_grid.len() < 2 {
        return Err(Error::Precondition(format!(
            "b0 fit needs at least two matching (s, I3) pairs, got {} and {}",
            s_grid.len(),
            i3_values.len()
        )));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Precondition("s grid must be positive".into()));
    }
    let ratios: Vec<f64> = s_grid.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios[0] <= 1.0
        || ratios
            .iter()
            .any(|r| (r - ratios[0]).abs() > GEOMETRIC_GRID_TOL * ratios[0])
    {
        return Err(Error::Precondition(
            "s grid must be increasing and geometric".into(),
        ));
    }
    let terms = if s_grid.len() >= 4 { 3 } else { 2 };
    let design = DMatrix::from_fn(s_grid.len(), terms, |i, j| {
        Complex64::new(s_grid[i].powi(-2 * j as i32), 0.0)
    });
    let data = DVector::from_iterator(
        s_grid.len(),
        s_grid.iter().zip(i3_values).map(|(s, v)| v * s.powi(6)),
    );
    let svd = design.clone().svd(true, true);
    let coefficients = svd
        .solve(&data, 1e-14)
        .map_err(|e| Error::Numeric(format!("b0 fit: {e}")))?;
    let data_norm = data.norm();
    let relative_residual = if data_norm > 0.0 {
        (&design * &coefficients - &data).norm() / data_norm
    } else {
        0.0
    };
    if relative_residual > FIT_TOL {
        return Err(Error::Numeric(format!(
            "b0 fit residual {relative_residual:e} exceeds {FIT_TOL:e}"
        )));
    }
    let factor = b0_leading_factor(medium, geometry.phi0);
    Ok(B0Fit {
        s_grid: s_grid.to_vec(),
        leading: coefficients[0],
        corrections: coefficients.iter().skip(1).copied().collect(),
        factor,
        b0: coefficients[0] / factor,
        relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(order: usize, seed: u64) -> FourierCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a = (0..=order).map(|_| draw()).collect();
        let b = (0..=order).map(|_| draw()).collect();
        FourierCoefficients::new(a, b).unwrap()
    }

    #[test]
    fn probe_is_annihilated_by_the_lame_operator_without_kappa() {
        let probe = CgoProbe::new(3.0).unwrap();
        let medium = LameMedium::reference();
        let field = |x: [f64; 2]| Ok(probe.value(&PolarPoint::from_cartesian(x)));
        for x in [[0.3, 0.2], [0.1, 0.4], [0.5, 0.05]] {
            let d2 = crate::finite_diff::second_derivatives(field, x, 1e-3).unwrap();
            let lap = d2.xx + d2.yy;
            let grad_div = CVec2::new(d2.xx[0] + d2.xy[1], d2.xy[0] + d2.yy[1]);
            let residual = lap.scale(medium.mu()) + grad_div.scale(medium.lambda() + medium.mu());
            assert!(residual.norm() < 1e-7, "{residual}");
            let jac = crate::finite_diff::jacobian(field, x, 1e-4).unwrap();
            let exact = probe.gradient(&PolarPoint::from_cartesian(x)).unwrap();
            assert!((jac - exact).norm() < 1e-9 * exact.norm());
        }
        assert!(probe.gradient(&PolarPoint::new(0.0, 0.0).unwrap()).is_err());
        assert!(CgoProbe::new(0.0).is_err());
    }

    #[test]
    fn sector_constant() {
        let g = SectorGeometry::new(2.0, 1.0).unwrap();
        assert!((g.delta_k() - 1f64.cos()).abs() < 1e-15);
        let narrow = SectorGeometry::new(1.0, 1.0).unwrap();
        assert!(narrow.delta_k() > g.delta_k());
        assert!(SectorGeometry::new(PI, 0.5).is_err());
        assert!(SectorGeometry::new(1.0, E).is_err());
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<SectorGeometry>(&json).unwrap(), g);
        assert!(serde_json::from_str::<SectorGeometry>(r#"{"phi0": 4.0, "h": 0.5}"#).is_err());
    }

    #[test]
    fn laplace_reference_values() {
        let r = laplace_sector_integral(0.5, 40.0, 0.0, 1.0).unwrap();
        assert!((r.leading - Complex64::new(4.0 / 40f64.powi(3), 0.0)).norm() < 1e-20);
        assert!(r.within_bound());
        assert!((r.numeric - r.leading - r.tail).norm() < 1e-14 * r.leading.norm());
        // Non-integer exponent and a rotated rate.
        let q = laplace_sector_integral(0.3, 30.0, 1.2, 2.0).unwrap();
        assert!((q.numeric - q.leading - q.tail).norm() < 1e-13 * q.leading.norm());
        assert!(q.within_bound());
    }

    #[test]
    fn laplace_preconditions() {
        assert!(laplace_sector_integral(2.0, 2.0, 0.0, 0.5).is_err());
        assert!(laplace_sector_integral(0.0, 40.0, 0.0, 0.5).is_err());
        assert!(laplace_sector_integral(1.0, 40.0, PI, 0.5).is_err());
        assert!(laplace_sector_integral(1.0, 40.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn laplace_tail_decays_at_the_bound_rate() {
        let (alpha, phi, h) = (1.0, PI / 4.0, 0.5);
        let delta = (phi / 2.0).cos();
        let grid = [10.0, 15.0, 20.0, 25.0, 30.0];
        let logs: Vec<f64> = grid
            .iter()
            .map(|&s| {
                laplace_sector_integral(alpha, s, phi, h)
                    .unwrap()
                    .tail
                    .norm()
                    .ln()
            })
            .collect();
        for (w, s) in logs.windows(2).zip(grid.windows(2)) {
            let slope = (w[1] - w[0]) / (s[1] - s[0]);
            assert!(slope <= -h.sqrt() * delta / 2.0, "slope {slope}");
        }
    }

    #[test]
    fn uv_expansion_matches_direct_product() {
        let medium = LameMedium::reference();
        let coeffs = random_coeffs(8, 11);
        let probe = CgoProbe::new(7.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let p = PolarPoint::new(rng.random_range(0.0..1.0), rng.random_range(0.0..PI / 3.0))
                .unwrap();
            let direct = dot(
                &evaluate_field(&medium, &coeffs, &p).unwrap(),
                &probe.value(&p),
            );
            let series = uv_expansion(&medium, &coeffs, &probe, &p).unwrap();
            assert!((direct - series).norm() < 1e-9 * (1.0 + direct.norm()));
        }
        let p = PolarPoint::new(0.4, 0.7).unwrap();
        assert_eq!(
            uv_expansion(&medium, &FourierCoefficients::zeros(4), &probe, &p).unwrap(),
            Complex64::default()
        );
        let mut only_b0 = FourierCoefficients::zeros(3);
        only_b0.b_mut()[0] = Complex64::new(1.0, 0.0);
        let ks = medium.k_s();
        let expected = probe.scalar(&p)
            * I
            * ks
            * Complex64::from_polar(1.0, 0.7)
            * crate::specfun::bessel_j(1, ks * 0.4).unwrap();
        assert!((uv_expansion(&medium, &only_b0, &probe, &p).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn identity_holds_for_random_fields() {
        let medium = LameMedium::reference();
        let geometry = SectorGeometry::default();
        let coeffs = random_coeffs(8, 3);
        let terms = cgo_identity_check(
            &medium,
            &coeffs,
            &geometry,
            &[20.0, 40.0, 80.0],
            DEFAULT_QUADRATURE_ORDER,
        )
        .unwrap();
        for t in &terms {
            assert!(t.converged, "{t:?}");
            assert!(t.residual < 1e-8, "{t:?}");
            assert!(t.relative_residual() < 1e-10, "{t:?}");
        }
        assert_eq!(
            terms.iter().map(|t| t.s).collect::<Vec<_>>(),
            vec![20.0, 40.0, 80.0]
        );
        let zero =
            identity_terms(&medium, &FourierCoefficients::zeros(3), &geometry, 20.0, 16).unwrap();
        assert_eq!(zero.scale, 0.0);
    }

    #[test]
    fn leading_factor_matches_the_angular_integral() {
        let medium = LameMedium::new(1.5, 0.7, 2.0).unwrap();
        let phi0 = 1.1;
        let rule = GaussLegendre::new(32).unwrap();
        // -(i/2)κk_s² ∫ e^{iφ} 2Γ(6)/(e^{iφ/2})⁶ dφ, the s^{-6} part of I₃ per unit b₀.
        let angular = rule
            .integrate(0.0, phi0, |phi| {
                Ok(Complex64::from_polar(240.0, phi - 3.0 * phi))
            })
            .unwrap();
        let direct = -0.5 * I * medium.kappa() * medium.k_s().powi(2) * angular;
        assert!((direct - b0_leading_factor(&medium, phi0)).norm() < 1e-12 * direct.norm());
        let (kappa, mu, ks) = (medium.kappa(), medium.mu(), medium.k_s());
        assert!((2.0 * kappa - 3.0 * mu * ks * ks + kappa).abs() < 1e-12);
        let e = Complex64::from_polar(1.0, -2.0 * phi0);
        let expected = -30.0 * kappa * ks * ks * (e - 1.0);
        assert!(
            (b0_relation_coefficient(&medium, phi0) - expected).norm() < 1e-12 * expected.norm()
        );
    }

    #[test]
    fn planted_b0_is_recovered() {
        let medium = LameMedium::reference();
        let geometry = SectorGeometry::default();
        let mut coeffs = random_coeffs(6, 21);
        for (k, (a, b)) in coeffs
            .clone()
            .a()
            .iter()
            .zip(coeffs.clone().b())
            .enumerate()
        {
            coeffs.a_mut()[k] = a * 0.3;
            coeffs.b_mut()[k] = b * 0.3;
        }
        coeffs.a_mut()[0] = Complex64::default();
        coeffs.b_mut()[0] = Complex64::new(0.7, 0.0);
        let grid = [20.0, 40.0, 80.0, 160.0];
        let i3: Vec<Complex64> =
            cgo_identity_check(&medium, &coeffs, &geometry, &grid, DEFAULT_QUADRATURE_ORDER)
                .unwrap()
                .iter()
                .map(|t| t.i3)
                .collect();
        let fit = leading_coefficient_b0(&medium, &geometry, &grid, &i3).unwrap();
        assert!((fit.b0 - 0.7).norm() < 0.05 * 0.7, "{fit:?}");
        coeffs.b_mut()[0] = Complex64::default();
        let i3: Vec<Complex64> =
            cgo_identity_check(&medium, &coeffs, &geometry, &grid, DEFAULT_QUADRATURE_ORDER)
                .unwrap()
                .iter()
                .map(|t| t.i3)
                .collect();
        let fit = leading_coefficient_b0(&medium, &geometry, &grid, &i3).unwrap();
        assert!(fit.b0.norm() < 1e-3, "{fit:?}");
    }

    #[test]
    fn fit_preconditions() {
        let medium = LameMedium::reference();
        let g = SectorGeometry::default();
        let v = [Complex64::new(1.0, 0.0); 3];
        assert!(leading_coefficient_b0(&medium, &g, &[10.0, 20.0], &v).is_err());
        assert!(leading_coefficient_b0(&medium, &g, &[10.0, 20.0, 30.0], &v).is_err());
        assert!(leading_coefficient_b0(&medium, &g, &[10.0], &v[..1]).is_err());
    }
}
