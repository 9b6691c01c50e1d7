//! Lamé media, the Fourier–Bessel representation of an eigenfunction, and
//! evaluation of the field, its gradient, the Lamé residual and the point
//! values at the origin.
//!
//! An eigenfunction is encoded by coefficients `a_m, b_m` (`0 <= m <= M`) through
//!
//! ```text
//! u = Σ_m (k_p/2) a_m [W^p_{m-1} e₁ - W^p_{m+1} e₂] + (i k_s/2) b_m [W^s_{m-1} e₁ + W^s_{m+1} e₂]
//! ```
//!
//! with `W^β_n(x) = J_n(k_β r) e^{inφ}`, `e₁ = (1, i)ᵀ` and `e₂ = (1, -i)ᵀ`. The
//! pressure part equals `Σ a_m ∇W^p_m` and the shear part `-Σ b_m ∇^⊥W^s_m`.
//!
//! Gradients use the ladder identities `∂₁W_n = (k/2)(W_{n-1} - W_{n+1})` and
//! `∂₂W_n = (ik/2)(W_{n-1} + W_{n+1})`, which are free of `1/r` factors and
//! therefore valid at the origin as well.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_diff::{self, CMat2, CVec2};
use crate::specfun::bessel_j_orders;

/// Step used by [`pde_residual`].
pub const RESIDUAL_STEP: f64 = 1e-3;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `e₁ = (1, i)ᵀ`.
pub fn e1() -> CVec2 {
    CVec2::new(Complex64::new(1.0, 0.0), I)
}

/// `e₂ = (1, -i)ᵀ`.
pub fn e2() -> CVec2 {
    CVec2::new(Complex64::new(1.0, 0.0), -I)
}

/// Raw Lamé parameters as they appear in input documents.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct MediumRecord {
    lambda: f64,
    mu: f64,
    kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
}

/// Homogeneous isotropic medium with eigenvalue `κ = ω²`.
///
/// Deserialisation validates the strong convexity condition and, when the
/// derived wavenumbers are present, their consistency with `λ, μ, κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MediumRecord", into = "MediumRecord")]
pub struct LameMedium {
    lambda: f64,
    mu: f64,
    kappa: f64,
    k_p: f64,
    k_s: f64,
    omega: f64,
}

impl LameMedium {
    /// Medium with Lamé constants `lambda`, `mu` and eigenvalue `kappa`.
    ///
    /// # Errors
    /// [`Error::InvalidMedium`] unless `μ > 0`, `λ + μ > 0`, `κ > 0` and all are finite.
    pub fn new(lambda: f64, mu: f64, kappa: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidMedium("parameters must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(Error::InvalidMedium(format!(
                "strong convexity requires mu > 0, got mu = {mu}"
            )));
        }
        if lambda + mu <= 0.0 {
            return Err(Error::InvalidMedium(format!(
                "strong convexity requires lambda + mu > 0, got lambda + mu = {}",
                lambda + mu
            )));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidMedium(format!(
                "eigenvalue kappa must be positive, got {kappa}"
            )));
        }
        Ok(Self {
            lambda,
            mu,
            kappa,
            k_p: (kappa / (lambda + 2.0 * mu)).sqrt(),
            k_s: (kappa / mu).sqrt(),
            omega: kappa.sqrt(),
        })
    }

    /// Reference medium `λ = 2, μ = 1, κ = 1` (so `k_p = 1/2`, `k_s = 1`).
    pub fn reference() -> Self {
        Self::new(2.0, 1.0, 1.0).expect("reference medium is convex")
    }

    /// Lamé constant `λ`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Lamé constant `μ`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Eigenvalue `κ`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Compressional wavenumber `√(κ/(λ+2μ))`.
    pub fn k_p(&self) -> f64 {
        self.k_p
    }

    /// Shear wavenumber `√(κ/μ)`.
    pub fn k_s(&self) -> f64 {
        self.k_s
    }

    /// Angular frequency `√κ`.
    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl TryFrom<MediumRecord> for LameMedium {
    type Error = Error;

    fn try_from(record: MediumRecord) -> Result<Self> {
        let medium = LameMedium::new(record.lambda, record.mu, record.kappa)?;
        let checks = [
            ("k_p", record.k_p, medium.k_p),
            ("k_s", record.k_s, medium.k_s),
            ("omega", record.omega, medium.omega),
        ];
        for (name, given, derived) in checks {
            if let Some(given) = given
                && (given - derived).abs() > 1e-12 * derived.abs().max(1.0)
            {
                return Err(Error::InvalidMedium(format!(
                    "{name} = {given} is inconsistent with lambda, mu, kappa (expected {derived})"
                )));
            }
        }
        Ok(medium)
    }
}

impl From<LameMedium> for MediumRecord {
    fn from(m: LameMedium) -> Self {
        Self {
            lambda: m.lambda,
            mu: m.mu,
            kappa: m.kappa,
            k_p: Some(m.k_p),
            k_s: Some(m.k_s),
            omega: Some(m.omega),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CoefficientRecord {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncation_order: Option<usize>,
}

/// Truncated Fourier coefficients `a_0..a_M`, `b_0..b_M` of an eigenfunction.
///
/// Coefficient vectors used by the constraint systems are laid out as
/// `(a_0, …, a_M, b_0, …, b_M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientRecord", into = "CoefficientRecord")]
pub struct FourierCoefficients {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl FourierCoefficients {
    /// Coefficients from two sequences of equal, nonzero length `M + 1`.
    ///
    /// # Errors
    /// [`Error::InvalidCoefficients`] on empty or mismatched sequences or non-finite entries.
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidCoefficients(format!(
                "a and b must have equal nonzero length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter()
            .chain(&b)
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::InvalidCoefficients("entries must be finite".into()));
        }
        Ok(Self { a, b })
    }

    /// All-zero coefficients of truncation order `order`.
    pub fn zeros(order: usize) -> Self {
        Self {
            a: vec![Complex64::new(0.0, 0.0); order + 1],
            b: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    /// Coefficients from a stacked vector `(a_0..a_M, b_0..b_M)`.
    ///
    /// # Errors
    /// [`Error::InvalidCoefficients`] if the length is odd or zero.
    pub fn from_stacked(values: &[Complex64]) -> Result<Self> {
        if values.is_empty() || values.len() % 2 == 1 {
            return Err(Error::InvalidCoefficients(format!(
                "stacked vector must have even nonzero length, got {}",
                values.len()
            )));
        }
        let half = values.len() / 2;
        Self::new(values[..half].to_vec(), values[half..].to_vec())
    }

    /// Stacked vector `(a_0..a_M, b_0..b_M)`.
    pub fn stacked(&self) -> Vec<Complex64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    /// Truncation order `M`.
    pub fn truncation_order(&self) -> usize {
        self.a.len() - 1
    }

    /// Pressure coefficients `a_m`.
    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    /// Shear coefficients `b_m`.
    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Mutable pressure coefficients.
    pub fn a_mut(&mut self) -> &mut [Complex64] {
        &mut self.a
    }

    /// Mutable shear coefficients.
    pub fn b_mut(&mut self) -> &mut [Complex64] {
        &mut self.b
    }

    /// `c₁·self + c₂·other`, padding the shorter sequence with zeros.
    pub fn combine(&self, c1: Complex64, other: &Self, c2: Complex64) -> Self {
        let len = self.a.len().max(other.a.len());
        let pick = |v: &[Complex64], m: usize| v.get(m).copied().unwrap_or_default();
        let a = (0..len)
            .map(|m| c1 * pick(&self.a, m) + c2 * pick(&other.a, m))
            .collect();
        let b = (0..len)
            .map(|m| c1 * pick(&self.b, m) + c2 * pick(&other.b, m))
            .collect();
        Self { a, b }
    }
}

impl TryFrom<CoefficientRecord> for FourierCoefficients {
    type Error = Error;

    fn try_from(record: CoefficientRecord) -> Result<Self> {
        let coeffs = FourierCoefficients::new(record.a, record.b)?;
        if let Some(order) = record.truncation_order
            && order != coeffs.truncation_order()
        {
            return Err(Error::InvalidCoefficients(format!(
                "truncation_order {order} does not match sequence length {}",
                coeffs.a.len()
            )));
        }
        Ok(coeffs)
    }
}

impl From<FourierCoefficients> for CoefficientRecord {
    fn from(c: FourierCoefficients) -> Self {
        let order = c.truncation_order();
        Self {
            a: c.a,
            b: c.b,
            truncation_order: Some(order),
        }
    }
}

/// Point `x = r(cos φ, sin φ)` with `r >= 0` and `φ ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    r: f64,
    phi: f64,
}

impl PolarPoint {
    /// Polar point with validated radius and principal angle.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] for negative radius or angle outside `(-π, π]`.
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "radius must be >= 0, got {r}"
            )));
        }
        if !(phi > -PI && phi <= PI) {
            return Err(Error::InvalidGeometry(format!(
                "angle must lie in (-pi, pi], got {phi}"
            )));
        }
        Ok(Self { r, phi })
    }

    /// Polar form of a Cartesian point, with angle in `(-π, π]`.
    pub fn from_cartesian(x: [f64; 2]) -> Self {
        let r = x[0].hypot(x[1]);
        let mut phi = x[1].atan2(x[0]);
        if phi <= -PI {
            phi = PI;
        }
        Self { r, phi }
    }

    /// Radius `r`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Angle `φ`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Cartesian coordinates.
    pub fn to_cartesian(&self) -> [f64; 2] {
        [self.r * self.phi.cos(), self.r * self.phi.sin()]
    }
}

/// Values `W_n = J_n(k r) e^{inφ}` for `n ∈ [-2, M+3]`, indexed by `n + 2`.
struct Waves {
    values: Vec<Complex64>,
}

impl Waves {
    fn new(k: f64, p: &PolarPoint, order: usize) -> Result<Self> {
        let bessel = bessel_j_orders(order + 3, k * p.r)?;
        let phase = Complex64::from_polar(1.0, p.phi);
        let mut values = Vec::with_capacity(order + 6);
        values.push(bessel[2] * phase.inv().powi(2));
        values.push(-bessel[1] * phase.inv());
        let mut e = Complex64::new(1.0, 0.0);
        for j in bessel.iter() {
            values.push(*j * e);
            e *= phase;
        }
        Ok(Self { values })
    }

    fn at(&self, n: i64) -> Complex64 {
        self.values[(n + 2) as usize]
    }
}

fn waves(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<(Waves, Waves)> {
    let order = coeffs.truncation_order();
    Ok((
        Waves::new(medium.k_p, p, order)?,
        Waves::new(medium.k_s, p, order)?,
    ))
}

/// Field `u(x)` of the truncated expansion.
///
/// # Errors
/// [`Error::BesselDomain`] when `k_s r` exceeds the Bessel domain.
pub fn evaluate_field(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<CVec2> {
    let (wp, ws) = waves(medium, coeffs, p)?;
    let (kp, ks) = (medium.k_p, medium.k_s);
    let (mut c1, mut c2) = (Complex64::default(), Complex64::default());
    for m in 0..=coeffs.truncation_order() {
        let n = m as i64;
        let (a, b) = (coeffs.a[m], coeffs.b[m]);
        c1 += a * (kp / 2.0) * wp.at(n - 1) + b * (I * ks / 2.0) * ws.at(n - 1);
        c2 += -a * (kp / 2.0) * wp.at(n + 1) + b * (I * ks / 2.0) * ws.at(n + 1);
    }
    Ok(e1() * c1 + e2() * c2)
}

/// Field at a Cartesian point.
///
/// # Errors
/// As [`evaluate_field`].
pub fn evaluate_field_cartesian(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    x: [f64; 2],
) -> Result<CVec2> {
    evaluate_field(medium, coeffs, &PolarPoint::from_cartesian(x))
}

/// Gradient `∇u` with entries `(i, j) = ∂_j u_i`, valid for every `r >= 0`.
///
/// # Errors
/// [`Error::BesselDomain`] when `k_s r` exceeds the Bessel domain.
pub fn evaluate_gradient(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<CMat2> {
    let (wp, ws) = waves(medium, coeffs, p)?;
    let (kp, ks) = (medium.k_p, medium.k_s);
    // u = e₁ c₁ + e₂ c₂ with c₁ = Σ α_m W_{m-1}, c₂ = Σ β_m W_{m+1}.
    let mut d1 = [Complex64::default(); 2];
    let mut d2 = [Complex64::default(); 2];
    for m in 0..=coeffs.truncation_order() {
        let n = m as i64;
        let (a, b) = (coeffs.a[m], coeffs.b[m]);
        let terms = [
            (a * (kp / 2.0), &wp, kp, n - 1, 0usize),
            (b * (I * ks / 2.0), &ws, ks, n - 1, 0),
            (-a * (kp / 2.0), &wp, kp, n + 1, 1),
            (b * (I * ks / 2.0), &ws, ks, n + 1, 1),
        ];
        for (weight, w, k, order, slot) in terms {
            let lower = w.at(order - 1);
            let upper = w.at(order + 1);
            d1[slot] += weight * (k / 2.0) * (lower - upper);
            d2[slot] += weight * (I * k / 2.0) * (lower + upper);
        }
    }
    let col1 = e1() * d1[0] + e2() * d1[1];
    let col2 = e1() * d2[0] + e2() * d2[1];
    Ok(CMat2::from_columns(&[col1, col2]))
}

/// Divergence `∇·u`.
///
/// # Errors
/// As [`evaluate_gradient`].
pub fn divergence(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<Complex64> {
    let g = evaluate_gradient(medium, coeffs, p)?;
    Ok(g[(0, 0)] + g[(1, 1)])
}

/// Scalar curl `∂₁u₂ - ∂₂u₁`.
///
/// # Errors
/// As [`evaluate_gradient`].
pub fn curl(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<Complex64> {
    let g = evaluate_gradient(medium, coeffs, p)?;
    Ok(g[(1, 0)] - g[(0, 1)])
}

/// `μΔu + (λ+μ)∇(∇·u) + κu` for an arbitrary twice differentiable field,
/// from fourth-order finite differences with step [`RESIDUAL_STEP`].
///
/// # Errors
/// Propagates failures of `field`.
pub fn lame_residual_of<F>(medium: &LameMedium, field: F, x: [f64; 2]) -> Result<CVec2>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let centre = field(x)?;
    let d = finite_diff::second_derivatives(&field, x, RESIDUAL_STEP)?;
    let laplacian = d.xx + d.yy;
    let grad_div = CVec2::new(d.xx[0] + d.xy[1], d.xy[0] + d.yy[1]);
    Ok(laplacian.scale(medium.mu)
        + grad_div.scale(medium.lambda + medium.mu)
        + centre.scale(medium.kappa))
}

/// Lamé residual `L(u) + κu` of the expansion at an interior point `p` (`r > 0`).
///
/// # Errors
/// [`Error::Precondition`] at the origin; Bessel domain errors otherwise.
pub fn pde_residual(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    p: &PolarPoint,
) -> Result<CVec2> {
    if p.r <= 0.0 {
        return Err(Error::Precondition("pde_residual requires r > 0".into()));
    }
    lame_residual_of(
        medium,
        |x| evaluate_field_cartesian(medium, coeffs, x),
        p.to_cartesian(),
    )
}

/// Values at the origin used by the singular-line conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValues {
    /// `u(0)`.
    pub u_at_origin: CVec2,
    /// `νᵀ ∇u ν` at the origin, with `ν = (-sin φ₀, cos φ₀)ᵀ`.
    pub nu_grad_nu: Complex64,
    /// `τᵀ ∇u ν` at the origin, with `τ = (-cos φ₀, -sin φ₀)ᵀ`.
    pub tau_grad_nu: Complex64,
}

/// Closed-form point values at the origin for the segment of angle `phi0`.
///
/// With `E = e^{2iφ₀}`:
/// `νᵀ∇uν = -¼[2k_p²a₀ + E(k_p²a₂ + ik_s²b₂)]`,
/// `τᵀ∇uν = -(i/4)[2ik_s²b₀ + E(k_p²a₂ + ik_s²b₂)]` and
/// `u(0) = (k_p a₁/2 + ik_s b₁/2) e₁`. These are the exact directional
/// derivatives, i.e. the `r⁰` coefficients of the gradient series.
///
/// # Errors
/// [`Error::Truncation`] if the coefficients stop before `m = 2`.
pub fn point_conditions(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    phi0: f64,
) -> Result<PointValues> {
    if coeffs.truncation_order() < 2 {
        return Err(Error::Truncation(
            "point conditions need coefficients up to m = 2".into(),
        ));
    }
    let (kp, ks) = (medium.k_p, medium.k_s);
    let e = Complex64::from_polar(1.0, 2.0 * phi0);
    let (a, b) = (&coeffs.a, &coeffs.b);
    let shared = e * (a[2] * kp * kp + I * ks * ks * b[2]);
    Ok(PointValues {
        u_at_origin: e1() * (a[1] * (kp / 2.0) + b[1] * (I * ks / 2.0)),
        nu_grad_nu: -(a[0] * 2.0 * kp * kp + shared) / 4.0,
        tau_grad_nu: -(I / 4.0) * (b[0] * 2.0 * I * ks * ks + shared),
    })
}
