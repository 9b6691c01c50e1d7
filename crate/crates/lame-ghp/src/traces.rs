//! Line segments through the origin, class-A impedance series, and the six
//! boundary trace operators evaluated two independent ways:
//! directly from the field and gradient, or from Fourier–Bessel series.
//!
//! The traction is `T_ν u = σ(u)ν = λ(∇·u)ν + μ(∇u + ∇uᵀ)ν`, which equals
//! `2μ∂_ν u + λν(∇·u) + μτ(∂₂u₁ - ∂₁u₂)` when `τ` is `ν` rotated
//! counterclockwise. The traces are
//!
//! | kind                  | value                    |
//! |-----------------------|--------------------------|
//! | traction-free         | `T_ν u`                  |
//! | rigid                 | `u`                      |
//! | soft-clamped          | `(ν·u, τ·T_ν u)`         |
//! | simply-supported      | `(τ·u, ν·T_ν u)`         |
//! | impedance             | `T_ν u + η u`            |
//! | generalized impedance | soft-clamped + η·simply-supported |
//!
//! The upper segment at angle `φ₀` carries `ν = (-sin φ₀, cos φ₀)` and
//! `τ = (-cos φ₀, -sin φ₀)`. The lower segment at angle `0` carries the outward
//! normal of the sector between the two segments, `ν = (0, -1)`, and
//! `τ = (1, 0)`. With these orientations each lower-segment series equals the
//! upper series at angle zero with the components that are odd under `ν → -ν`
//! negated.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastic_field::{self, FourierCoefficients, LameMedium, PolarPoint, e1, e2};
use crate::error::{Error, Result};
use crate::finite_diff::{CMat2, CVec2};
use crate::specfun::{bessel_j_orders, bessel_power_coefficient};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which of the two segments bounding the sector a line is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Segment along the positive `x₁` axis.
    Lower,
    /// Segment at the opening angle `φ₀`.
    Upper,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct SegmentRecord {
    side: Side,
    #[serde(default)]
    angle: Option<f64>,
    length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<[f64; 2]>,
}

/// Segment `{r(cos φ, sin φ) : 0 <= r <= h}` with its unit normal and tangent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SegmentRecord", into = "SegmentRecord")]
pub struct LineSegment {
    side: Side,
    angle: f64,
    length: f64,
    nu: [f64; 2],
    tau: [f64; 2],
}

impl LineSegment {
    /// Upper segment at angle `phi0 ∈ (0, 2π]` and length `length > 0`.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] for an out-of-range angle or length.
    pub fn upper(phi0: f64, length: f64) -> Result<Self> {
        if !(phi0 > 0.0 && phi0 <= 2.0 * PI) {
            return Err(Error::InvalidGeometry(format!(
                "segment angle must lie in (0, 2pi], got {phi0}"
            )));
        }
        check_length(length)?;
        Ok(Self {
            side: Side::Upper,
            angle: phi0,
            length,
            nu: [-phi0.sin(), phi0.cos()],
            tau: [-phi0.cos(), -phi0.sin()],
        })
    }

    /// Lower segment along the positive `x₁` axis.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] for a non-positive length.
    pub fn lower(length: f64) -> Result<Self> {
        check_length(length)?;
        Ok(Self {
            side: Side::Lower,
            angle: 0.0,
            length,
            nu: [0.0, -1.0],
            tau: [1.0, 0.0],
        })
    }

    /// Segment on `side`; `phi0` is ignored for the lower segment.
    ///
    /// # Errors
    /// As [`LineSegment::upper`] and [`LineSegment::lower`].
    pub fn on_side(side: Side, phi0: f64, length: f64) -> Result<Self> {
        match side {
            Side::Lower => Self::lower(length),
            Side::Upper => Self::upper(phi0, length),
        }
    }

    /// Side of the sector.
    pub fn side(&self) -> Side {
        self.side
    }

    /// Direction angle of the segment.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Length `h`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unit normal `ν`.
    pub fn nu(&self) -> [f64; 2] {
        self.nu
    }

    /// Unit tangent `τ`.
    pub fn tau(&self) -> [f64; 2] {
        self.tau
    }

    /// Point at distance `r` from the origin.
    pub fn point(&self, r: f64) -> [f64; 2] {
        [r * self.angle.cos(), r * self.angle.sin()]
    }

    /// Polar form of the point at distance `r`, with angle in `(-π, π]`.
    pub fn polar_point(&self, r: f64) -> PolarPoint {
        let phi = if self.angle > PI {
            self.angle - 2.0 * PI
        } else {
            self.angle
        };
        PolarPoint::new(r, phi).unwrap_or_else(|_| PolarPoint::from_cartesian(self.point(r)))
    }

    fn check_radius(&self, r: f64, allow_origin: bool) -> Result<()> {
        let lower_ok = if allow_origin { r >= 0.0 } else { r > 0.0 };
        if !(lower_ok && r <= self.length) {
            return Err(Error::InvalidGeometry(format!(
                "radius {r} outside the segment (0, {}]",
                self.length
            )));
        }
        Ok(())
    }
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "segment length must be positive, got {length}"
        )));
    }
    Ok(())
}

impl TryFrom<SegmentRecord> for LineSegment {
    type Error = Error;

    fn try_from(record: SegmentRecord) -> Result<Self> {
        let segment = match record.side {
            Side::Lower => {
                if let Some(angle) = record.angle
                    && angle != 0.0
                    && angle != 2.0 * PI
                {
                    return Err(Error::InvalidGeometry(format!(
                        "the lower segment lies at angle 0, got {angle}"
                    )));
                }
                LineSegment::lower(record.length)?
            }
            Side::Upper => {
                let angle = record
                    .angle
                    .ok_or_else(|| Error::InvalidGeometry("upper segment needs an angle".into()))?;
                LineSegment::upper(angle, record.length)?
            }
        };
        let close =
            |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12;
        if record.nu.is_some_and(|nu| !close(nu, segment.nu))
            || record.tau.is_some_and(|tau| !close(tau, segment.tau))
        {
            return Err(Error::InvalidGeometry(
                "normal/tangent do not match the segment orientation convention".into(),
            ));
        }
        Ok(segment)
    }
}

impl From<LineSegment> for SegmentRecord {
    fn from(s: LineSegment) -> Self {
        Self {
            side: s.side,
            angle: Some(s.angle),
            length: s.length,
            nu: Some(s.nu),
            tau: Some(s.tau),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ImpedanceRecord {
    eta0: Complex64,
    #[serde(default)]
    higher: Vec<Complex64>,
    radius: f64,
}

/// Class-A impedance `η(r) = η₀ + Σ_{j>=1} η_j r^j` on `[0, r₀]` with `η₀ ≠ 0`.
///
/// Absolute convergence on `[0, r₀]` is checked by the ratio of the last two
/// supplied coefficients: `|η_J| r₀ < |η_{J-1}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImpedanceRecord", into = "ImpedanceRecord")]
pub struct ImpedanceSeries {
    eta0: Complex64,
    higher: Vec<Complex64>,
    radius: f64,
}

impl ImpedanceSeries {
    /// Series with constant part `eta0`, higher coefficients `η_1, η_2, …`
    /// and validity radius `radius`.
    ///
    /// # Errors
    /// [`Error::InvalidImpedance`] when `η₀ = 0`, the radius is not positive,
    /// or the ratio check fails.
    pub fn new(eta0: Complex64, higher: Vec<Complex64>, radius: f64) -> Result<Self> {
        if eta0 == Complex64::default() || !(eta0.re.is_finite() && eta0.im.is_finite()) {
            return Err(Error::InvalidImpedance(
                "constant part must be a nonzero finite value".into(),
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidImpedance(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let series = Self {
            eta0,
            higher,
            radius,
        };
        let n = series.higher.len();
        if n > 0 {
            let last = series.coefficient(n);
            let previous = series.coefficient(n - 1);
            if last != Complex64::default()
                && (last.norm() * radius).partial_cmp(&previous.norm()) != Some(Ordering::Less)
            {
                return Err(Error::InvalidImpedance(format!(
                    "ratio |eta_{n}| r0 / |eta_{}| = {} is not below 1",
                    n - 1,
                    last.norm() * radius / previous.norm()
                )));
            }
        }
        Ok(series)
    }

    /// Constant impedance `η ≡ eta` valid on `[0, radius]`.
    ///
    /// # Errors
    /// As [`ImpedanceSeries::new`].
    pub fn constant(eta: Complex64, radius: f64) -> Result<Self> {
        Self::new(eta, Vec::new(), radius)
    }

    /// Constant part `η₀`.
    pub fn eta0(&self) -> Complex64 {
        self.eta0
    }

    /// Higher coefficients `η_1, η_2, …`.
    pub fn higher(&self) -> &[Complex64] {
        &self.higher
    }

    /// Validity radius `r₀`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Coefficient of `r^j` (zero beyond the supplied terms).
    pub fn coefficient(&self, j: usize) -> Complex64 {
        if j == 0 {
            self.eta0
        } else {
            self.higher.get(j - 1).copied().unwrap_or_default()
        }
    }

    /// `η(r)`.
    ///
    /// # Errors
    /// [`Error::InvalidGeometry`] outside `[0, r₀]`.
    pub fn evaluate(&self, r: f64) -> Result<Complex64> {
        if !(0.0..=self.radius).contains(&r) {
            return Err(Error::InvalidGeometry(format!(
                "impedance evaluated at r = {r} outside [0, {}]",
                self.radius
            )));
        }
        Ok(self
            .higher
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, c| (acc + c) * r)
            + self.eta0)
    }
}

impl TryFrom<ImpedanceRecord> for ImpedanceSeries {
    type Error = Error;

    fn try_from(r: ImpedanceRecord) -> Result<Self> {
        ImpedanceSeries::new(r.eta0, r.higher, r.radius)
    }
}

impl From<ImpedanceSeries> for ImpedanceRecord {
    fn from(s: ImpedanceSeries) -> Self {
        Self {
            eta0: s.eta0,
            higher: s.higher,
            radius: s.radius,
        }
    }
}

/// Homogeneous boundary condition imposed on a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryConditionKind {
    /// `u = 0`.
    Rigid,
    /// `T_ν u = 0`.
    TractionFree,
    /// `ν·u = τ·T_ν u = 0`.
    SoftClamped,
    /// `τ·u = ν·T_ν u = 0`.
    SimplySupported,
    /// `T_ν u + η u = 0`.
    Impedance { eta: ImpedanceSeries },
    /// Soft-clamped trace plus `η` times the simply-supported trace vanishes.
    GeneralizedImpedance { eta: ImpedanceSeries },
}

impl BoundaryConditionKind {
    /// One-letter code: `R`, `T`, `G`, `F`, `I` or `H`.
    pub fn code(&self) -> char {
        match self {
            Self::Rigid => 'R',
            Self::TractionFree => 'T',
            Self::SoftClamped => 'G',
            Self::SimplySupported => 'F',
            Self::Impedance { .. } => 'I',
            Self::GeneralizedImpedance { .. } => 'H',
        }
    }

    /// Human-readable name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Rigid => "rigid",
            Self::TractionFree => "traction-free",
            Self::SoftClamped => "soft-clamped",
            Self::SimplySupported => "simply-supported",
            Self::Impedance { .. } => "impedance",
            Self::GeneralizedImpedance { .. } => "generalized-impedance",
        }
    }

    /// Impedance series of the impedance kinds.
    pub fn impedance(&self) -> Option<&ImpedanceSeries> {
        match self {
            Self::Impedance { eta } | Self::GeneralizedImpedance { eta } => Some(eta),
            _ => None,
        }
    }

    /// Decomposition `base + η · secondary` into elementary traces.
    fn structure(&self) -> (ElementaryTrace, Option<(ElementaryTrace, &ImpedanceSeries)>) {
        match self {
            Self::Rigid => (ElementaryTrace::Displacement, None),
            Self::TractionFree => (ElementaryTrace::Traction, None),
            Self::SoftClamped => (ElementaryTrace::SoftClamped, None),
            Self::SimplySupported => (ElementaryTrace::SimplySupported, None),
            Self::Impedance { eta } => (
                ElementaryTrace::Traction,
                Some((ElementaryTrace::Displacement, eta)),
            ),
            Self::GeneralizedImpedance { eta } => (
                ElementaryTrace::SoftClamped,
                Some((ElementaryTrace::SimplySupported, eta)),
            ),
        }
    }
}

/// The four impedance-free traces from which all six kinds are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ElementaryTrace {
    Traction,
    Displacement,
    SoftClamped,
    SimplySupported,
}

impl ElementaryTrace {
    /// Whether a component changes sign when `ν` and `τ` are reversed.
    fn is_odd(self, component: usize) -> bool {
        match self {
            Self::Traction => true,
            Self::Displacement => false,
            Self::SoftClamped | Self::SimplySupported => component == 0,
        }
    }
}

/// Coefficient family a series term multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Pressure,
    Shear,
}

/// One series term: it contributes
/// `weight[c] · e^{i(m + phase_offset)φ} · J_{m + shift}(k r) · coefficient_m`
/// to component `c`, summed over `m`.
#[derive(Debug, Clone, Copy)]
struct SeriesTerm {
    family: Family,
    shift: i32,
    phase_offset: i32,
    weight: CVec2,
}

fn term(family: Family, shift: i32, phase_offset: i32, weight: CVec2) -> SeriesTerm {
    SeriesTerm {
        family,
        shift,
        phase_offset,
        weight,
    }
}

fn first(value: Complex64) -> CVec2 {
    CVec2::new(value, Complex64::default())
}

fn second(value: Complex64) -> CVec2 {
    CVec2::new(Complex64::default(), value)
}

/// Series terms on the upper segment; the lower segment reuses them at angle
/// zero with odd components negated.
fn series_terms(medium: &LameMedium, trace: ElementaryTrace) -> Vec<SeriesTerm> {
    use Family::{Pressure as A, Shear as B};
    let (kp, ks) = (medium.k_p(), medium.k_s());
    let (lambda, mu) = (medium.lambda(), medium.mu());
    let re = |x: f64| Complex64::new(x, 0.0);
    match trace {
        ElementaryTrace::Displacement => vec![
            term(A, -1, -1, e1() * re(kp / 2.0)),
            term(A, 1, 1, e2() * re(-kp / 2.0)),
            term(B, -1, -1, e1() * (I * ks / 2.0)),
            term(B, 1, 1, e2() * (I * ks / 2.0)),
        ],
        ElementaryTrace::Traction => {
            let c = I * kp * kp / 2.0;
            let shear = re(-mu * ks * ks / 2.0);
            vec![
                term(A, -2, -1, e1() * (c * mu)),
                term(A, 0, -1, e1() * (c * (lambda + mu))),
                term(A, 2, 1, e2() * (-c * mu)),
                term(A, 0, 1, e2() * (-c * (lambda + mu))),
                term(B, -2, -1, e1() * shear),
                term(B, 2, 1, e2() * shear),
            ]
        }
        ElementaryTrace::SoftClamped => vec![
            term(A, -1, 0, first(I * kp / 2.0)),
            term(A, 1, 0, first(I * kp / 2.0)),
            term(B, -1, 0, first(re(-ks / 2.0))),
            term(B, 1, 0, first(re(ks / 2.0))),
            term(A, -2, 0, second(-I * kp * kp * mu / 2.0)),
            term(A, 2, 0, second(I * kp * kp * mu / 2.0)),
            term(B, -2, 0, second(re(ks * ks * mu / 2.0))),
            term(B, 2, 0, second(re(ks * ks * mu / 2.0))),
        ],
        ElementaryTrace::SimplySupported => vec![
            term(A, -1, 0, first(re(-kp / 2.0))),
            term(A, 1, 0, first(re(kp / 2.0))),
            term(B, -1, 0, first(-I * ks / 2.0)),
            term(B, 1, 0, first(-I * ks / 2.0)),
            term(A, -2, 0, second(re(-kp * kp * mu / 2.0))),
            term(A, 0, 0, second(re(-kp * kp * (lambda + mu)))),
            term(A, 2, 0, second(re(-kp * kp * mu / 2.0))),
            term(B, -2, 0, second(-I * ks * ks * mu / 2.0)),
            term(B, 2, 0, second(I * ks * ks * mu / 2.0)),
        ],
    }
}

/// Terms oriented for `segment`: upper terms, or angle-zero terms with odd
/// components negated on the lower segment.
fn oriented_terms(
    medium: &LameMedium,
    trace: ElementaryTrace,
    segment: &LineSegment,
) -> Vec<SeriesTerm> {
    let mut terms = series_terms(medium, trace);
    if segment.side == Side::Lower {
        for t in terms.iter_mut() {
            for c in 0..2 {
                if trace.is_odd(c) {
                    t.weight[c] = -t.weight[c];
                }
            }
        }
    }
    terms
}

/// `σ(u)ν = λ tr(∇u) ν + μ(∇u + ∇uᵀ)ν` for a gradient with entries `∂_j u_i`.
pub fn traction_from_gradient(medium: &LameMedium, gradient: &CMat2, nu: [f64; 2]) -> CVec2 {
    let nu = CVec2::new(Complex64::new(nu[0], 0.0), Complex64::new(nu[1], 0.0));
    let div = gradient[(0, 0)] + gradient[(1, 1)];
    nu * (div * medium.lambda())
        + (gradient + gradient.transpose()) * nu * Complex64::new(medium.mu(), 0.0)
}

/// Traction `T_ν u` at distance `r ∈ (0, h]` along `segment`, from the analytic gradient.
///
/// # Errors
/// [`Error::InvalidGeometry`] for `r` outside the segment; Bessel domain errors.
pub fn traction_direct(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    segment: &LineSegment,
    r: f64,
) -> Result<CVec2> {
    segment.check_radius(r, false)?;
    let g = elastic_field::evaluate_gradient(medium, coeffs, &segment.polar_point(r))?;
    Ok(traction_from_gradient(medium, &g, segment.nu))
}

fn dot(v: [f64; 2], w: &CVec2) -> Complex64 {
    w[0] * v[0] + w[1] * v[1]
}

fn elementary_direct(
    trace: ElementaryTrace,
    segment: &LineSegment,
    u: &CVec2,
    traction: &CVec2,
) -> CVec2 {
    match trace {
        ElementaryTrace::Traction => *traction,
        ElementaryTrace::Displacement => *u,
        ElementaryTrace::SoftClamped => CVec2::new(dot(segment.nu, u), dot(segment.tau, traction)),
        ElementaryTrace::SimplySupported => {
            CVec2::new(dot(segment.tau, u), dot(segment.nu, traction))
        }
    }
}

/// Boundary trace of `kind` at distance `r` along `segment`, assembled from
/// [`elastic_field::evaluate_field`] and [`traction_direct`].
///
/// # Errors
/// As [`traction_direct`]; impedance evaluation errors beyond its radius.
pub fn trace_direct(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    segment: &LineSegment,
    kind: &BoundaryConditionKind,
    r: f64,
) -> Result<CVec2> {
    let u = elastic_field::evaluate_field(medium, coeffs, &segment.polar_point(r))?;
    let traction = traction_direct(medium, coeffs, segment, r)?;
    let (base, extra) = kind.structure();
    let mut value = elementary_direct(base, segment, &u, &traction);
    if let Some((secondary, eta)) = extra {
        value += elementary_direct(secondary, segment, &u, &traction) * eta.evaluate(r)?;
    }
    Ok(value)
}

fn elementary_series(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    segment: &LineSegment,
    trace: ElementaryTrace,
    r: f64,
) -> Result<CVec2> {
    let order = coeffs.truncation_order();
    let jp = bessel_j_orders(order + 2, medium.k_p() * r)?;
    let js = bessel_j_orders(order + 2, medium.k_s() * r)?;
    let bessel = |family: Family, n: i64| {
        let table = if family == Family::Pressure { &jp } else { &js };
        let value = table[n.unsigned_abs() as usize];
        if n < 0 && n % 2 != 0 { -value } else { value }
    };
    let mut value = CVec2::zeros();
    for t in oriented_terms(medium, trace, segment) {
        let values = if t.family == Family::Pressure {
            coeffs.a()
        } else {
            coeffs.b()
        };
        let mut sum = Complex64::default();
        for (m, coefficient) in values.iter().enumerate() {
            let m = m as i64;
            let phase =
                Complex64::from_polar(1.0, (m + i64::from(t.phase_offset)) as f64 * segment.angle);
            sum += phase * bessel(t.family, m + i64::from(t.shift)) * coefficient;
        }
        value += t.weight * sum;
    }
    Ok(value)
}

/// Boundary trace of `kind` at distance `r ∈ [0, h]` from the Fourier–Bessel
/// trace series.
///
/// # Errors
/// [`Error::InvalidGeometry`] for `r` outside the segment or the impedance radius.
pub fn trace_series(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    segment: &LineSegment,
    kind: &BoundaryConditionKind,
    r: f64,
) -> Result<CVec2> {
    segment.check_radius(r, true)?;
    let (base, extra) = kind.structure();
    let mut value = elementary_series(medium, coeffs, segment, base, r)?;
    if let Some((secondary, eta)) = extra {
        value += elementary_series(medium, coeffs, segment, secondary, r)? * eta.evaluate(r)?;
    }
    Ok(value)
}

/// Linear functionals giving the coefficient of `r^k` in each trace component,
/// for `k = 0..N-1`, acting on stacked coefficients `(a_0..a_M, b_0..b_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesRows {
    order: usize,
    powers: usize,
    rows: [Vec<Vec<Complex64>>; 2],
    min_shift: [i32; 2],
}

impl PowerSeriesRows {
    /// Truncation order `M` of the coefficient vector.
    pub fn truncation_order(&self) -> usize {
        self.order
    }

    /// Number of powers `N`.
    pub fn powers(&self) -> usize {
        self.powers
    }

    /// Functional of the `r^power` coefficient of `component`.
    pub fn row(&self, component: usize, power: usize) -> &[Complex64] {
        &self.rows[component][power]
    }

    /// Whether every coefficient order feeding this row lies within the
    /// truncation, so the row is the exact functional of the infinite expansion.
    pub fn is_complete(&self, component: usize, power: usize) -> bool {
        power as i64 - i64::from(self.min_shift[component]) <= self.order as i64
    }

    /// Partial sum `Σ_k row_k(c) r^k` of the trace series for coefficients `coeffs`.
    pub fn evaluate(&self, coeffs: &FourierCoefficients, r: f64) -> CVec2 {
        let stacked = padded_stack(coeffs, self.order);
        let mut value = CVec2::zeros();
        for c in 0..2 {
            let mut rk = 1.0;
            for row in &self.rows[c] {
                let s: Complex64 = row.iter().zip(&stacked).map(|(x, y)| x * y).sum();
                value[c] += s * rk;
                rk *= r;
            }
        }
        value
    }
}

fn padded_stack(coeffs: &FourierCoefficients, order: usize) -> Vec<Complex64> {
    let pick = |v: &[Complex64], m: usize| v.get(m).copied().unwrap_or_default();
    (0..=order)
        .map(|m| pick(coeffs.a(), m))
        .chain((0..=order).map(|m| pick(coeffs.b(), m)))
        .collect()
}

fn elementary_rows(
    medium: &LameMedium,
    segment: &LineSegment,
    trace: ElementaryTrace,
    order: usize,
    powers: usize,
) -> ([Vec<Vec<Complex64>>; 2], [i32; 2]) {
    let width = 2 * (order + 1);
    let mut rows = [
        vec![vec![Complex64::default(); width]; powers],
        vec![vec![Complex64::default(); width]; powers],
    ];
    let terms = oriented_terms(medium, trace, segment);
    let mut min_shift = [i32::MAX; 2];
    for t in &terms {
        let wavenumber = if t.family == Family::Pressure {
            medium.k_p()
        } else {
            medium.k_s()
        };
        let offset = if t.family == Family::Pressure {
            0
        } else {
            order + 1
        };
        for c in 0..2 {
            if t.weight[c] == Complex64::default() {
                continue;
            }
            min_shift[c] = min_shift[c].min(t.shift);
            for m in 0..=order {
                let n = m as i32 + t.shift;
                let phase =
                    Complex64::from_polar(1.0, (m as i32 + t.phase_offset) as f64 * segment.angle);
                let base = t.weight[c] * phase;
                let mut k_pow = 1.0;
                for (k, row) in rows[c].iter_mut().enumerate() {
                    let coefficient = bessel_power_coefficient(n, k as u32);
                    if coefficient != 0.0 {
                        row[offset + m] += base * (k_pow * coefficient);
                    }
                    k_pow *= wavenumber;
                }
            }
        }
    }
    (rows, min_shift)
}

/// Power-series functionals of the trace of `kind` on `segment`, truncated at
/// coefficient order `order` (`M`) and powers `r^0 .. r^{powers-1}` (`N`).
///
/// For impedance kinds the `η` series enters through the Cauchy product.
///
/// # Errors
/// [`Error::Truncation`] unless `powers <= 2·order`.
pub fn trace_power_series(
    medium: &LameMedium,
    segment: &LineSegment,
    kind: &BoundaryConditionKind,
    order: usize,
    powers: usize,
) -> Result<PowerSeriesRows> {
    if powers > 2 * order {
        return Err(Error::Truncation(format!(
            "{powers} powers exceed twice the truncation order {order}"
        )));
    }
    let (base, extra) = kind.structure();
    let (mut rows, mut min_shift) = elementary_rows(medium, segment, base, order, powers);
    if let Some((secondary, eta)) = extra {
        let (other, other_shift) = elementary_rows(medium, segment, secondary, order, powers);
        for c in 0..2 {
            min_shift[c] = min_shift[c].min(other_shift[c]);
            for k in 0..powers {
                for j in 0..=k {
                    let eta_j = eta.coefficient(j);
                    if eta_j == Complex64::default() {
                        continue;
                    }
                    for (target, source) in rows[c][k].iter_mut().zip(&other[c][k - j]) {
                        *target += eta_j * source;
                    }
                }
            }
        }
    }
    Ok(PowerSeriesRows {
        order,
        powers,
        rows,
        min_shift,
    })
}
