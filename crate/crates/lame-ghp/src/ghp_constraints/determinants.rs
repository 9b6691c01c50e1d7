//! Forcing determinants of the generalized-impedance cascades and the
//! impedance values at which they vanish.

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastic_field::LameMedium;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative tolerance for recognising an exceptional impedance value,
/// applied after normalising by `|η| + 1`.
pub const EXCEPTIONAL_TOL: f64 = 1e-12;

/// Whether `eta` coincides with `value` to [`EXCEPTIONAL_TOL`]`·(|η| + 1)`.
pub fn is_close(eta: Complex64, value: Complex64) -> bool {
    (eta - value).norm() <= EXCEPTIONAL_TOL * (eta.norm() + 1.0)
}

/// The 3×3 matrix whose determinant decides the order-`m` step of the
/// singular generalized-impedance cascade: columns act on `(a_m, b_m, X)`
/// with `X` the combination `i k_p^{m+2} a_{m+2} - k_s^{m+2} b_{m+2}`.
pub fn singular_matrix(
    medium: &LameMedium,
    eta: Complex64,
    phi0: f64,
    m: u32,
) -> Matrix3<Complex64> {
    let (kp, ks, lambda, mu) = (medium.k_p(), medium.k_s(), medium.lambda(), medium.mu());
    let mf = f64::from(m);
    let e = Complex64::from_polar(1.0, 2.0 * phi0);
    let kpm = kp.powi(m as i32);
    let ksm = ks.powi(m as i32);
    Matrix3::new(
        I * kpm,
        Complex64::new(-ksm, 0.0),
        Complex64::default(),
        (I * mf * mu + mf * mu * eta - 2.0 * lambda * eta - 2.0 * mu * eta) * kpm * kp * kp,
        mf * mu * (I * eta - 1.0) * ksm * ks * ks,
        mu * (I * eta - 1.0) * e,
        (mf * eta + 2.0 * eta - I * mf) * kpm * kp * kp,
        (mf + 2.0 + I * mf * eta) * ksm * ks * ks,
        (1.0 + I * eta) * e,
    )
}

/// The quadratic `iη² + (λ/(λ+2μ) - 1)η - i` whose roots are the
/// medium-dependent exceptional impedances.
pub fn singular_quadratic(medium: &LameMedium, eta: Complex64) -> Complex64 {
    let ratio = medium.lambda() / (medium.lambda() + 2.0 * medium.mu());
    I * eta * eta + (ratio - 1.0) * eta - I
}

/// Closed form `D_m = -2 e^{2iφ₀} k_p^m k_s^m κ [iη² + (λ/(λ+2μ) - 1)η - i]`
/// of the determinant of [`singular_matrix`].
pub fn determinant_singular(medium: &LameMedium, eta: Complex64, phi0: f64, m: u32) -> Complex64 {
    let scale = medium.k_p().powi(m as i32) * medium.k_s().powi(m as i32) * medium.kappa();
    -2.0 * Complex64::from_polar(1.0, 2.0 * phi0) * scale * singular_quadratic(medium, eta)
}

/// The 2×2 matrix deciding the order-`m` step for two generalized-impedance
/// lines with a common impedance `η`; columns act on `(a_m, b_m)`.
pub fn pair_matrix(medium: &LameMedium, eta: Complex64, m: u32) -> Matrix2<Complex64> {
    let (kp, ks, lambda, mu) = (medium.k_p(), medium.k_s(), medium.lambda(), medium.mu());
    let mf = f64::from(m);
    let kpm = kp.powi(m as i32);
    let ksm = ks.powi(m as i32);
    Matrix2::new(
        I * kpm,
        Complex64::new(-ksm, 0.0),
        (I * mf * mu - 2.0 * lambda * eta + (mf - 2.0) * mu * eta) * kpm * kp * kp,
        mf * mu * (I * eta - 1.0) * ksm * ks * ks,
    )
}

/// Closed form `D_m = -k_p^m k_s^m (λ+μ) κ [(m+2)η + im] / (λ+2μ)` of the
/// determinant of [`pair_matrix`].
pub fn determinant_pair(medium: &LameMedium, eta: Complex64, m: u32) -> Complex64 {
    let (lambda, mu) = (medium.lambda(), medium.mu());
    let mf = f64::from(m);
    let scale =
        medium.k_p().powi(m as i32) * medium.k_s().powi(m as i32) * (lambda + mu) * medium.kappa()
            / (lambda + 2.0 * mu);
    -scale * ((mf + 2.0) * eta + I * mf)
}

/// The order-`m` exceptional value `-im/(m+2)` of the pair determinant.
pub fn pair_root(m: u32) -> Complex64 {
    Complex64::new(0.0, -f64::from(m) / (f64::from(m) + 2.0))
}

/// Exceptional value classes, reported by impedance scans and exclusion checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ExceptionalValue {
    /// `η = i`.
    PlusI,
    /// `η = -i`.
    MinusI,
    /// `η = η_root+`.
    RootPlus,
    /// `η = η_root-`.
    RootMinus,
    /// `η = -im/(m+2)`.
    PairRoot { m: u32 },
    /// `η = -iμe^{2iφ₀}/(λ + μ(1 + e^{2iφ₀}))`.
    AngleDependent,
    /// `η₁e^{-iφ₀} + η₂ = 0`.
    ImpedanceLocus,
}

/// Exceptional impedance values for a medium and opening angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalParameters {
    /// `(√((λ+3μ)(λ+μ)) - μi)/(λ+2μ)`.
    pub root_plus: Complex64,
    /// `(-√((λ+3μ)(λ+μ)) - μi)/(λ+2μ)`.
    pub root_minus: Complex64,
    /// `-iμe^{2iφ₀}/(λ + μ(1 + e^{2iφ₀}))`.
    pub angle_dependent: Complex64,
    /// Opening angle used for the angle-dependent value.
    pub phi0: f64,
}

impl ExceptionalParameters {
    /// Exceptional values for `medium` and `phi0`.
    pub fn new(medium: &LameMedium, phi0: f64) -> Self {
        let (lambda, mu) = (medium.lambda(), medium.mu());
        let root = ((lambda + 3.0 * mu) * (lambda + mu)).sqrt();
        let e = Complex64::from_polar(1.0, 2.0 * phi0);
        Self {
            root_plus: Complex64::new(root, -mu) / (lambda + 2.0 * mu),
            root_minus: Complex64::new(-root, -mu) / (lambda + 2.0 * mu),
            angle_dependent: -I * mu * e / (lambda + mu * (1.0 + e)),
            phi0,
        }
    }

    /// Pair-determinant root order `m >= 1` with `η = -im/(m+2)`, if any.
    pub fn pair_root_order(eta: Complex64) -> Option<u32> {
        // -Im(η) = m/(m+2)  gives  m = 2t/(1 - t).
        let t = -eta.im;
        if !(t > 0.0 && t < 1.0) {
            return None;
        }
        let m = (2.0 * t / (1.0 - t)).round();
        (m >= 1.0 && m < f64::from(u32::MAX))
            .then_some(m as u32)
            .filter(|&m| is_close(eta, pair_root(m)))
    }

    /// Every single-impedance class that `eta` falls into.
    pub fn classify(&self, eta: Complex64) -> Vec<ExceptionalValue> {
        let mut found = Vec::new();
        let checks = [
            (I, ExceptionalValue::PlusI),
            (-I, ExceptionalValue::MinusI),
            (self.root_plus, ExceptionalValue::RootPlus),
            (self.root_minus, ExceptionalValue::RootMinus),
            (self.angle_dependent, ExceptionalValue::AngleDependent),
        ];
        for (value, class) in checks {
            if is_close(eta, value) {
                found.push(class);
            }
        }
        if let Some(m) = Self::pair_root_order(eta) {
            found.push(ExceptionalValue::PairRoot { m });
        }
        found
    }

    /// Whether `(η_upper, η_lower)` lies on `η_upper e^{-iφ₀} + η_lower = 0`.
    pub fn on_impedance_locus(&self, eta_upper: Complex64, eta_lower: Complex64) -> bool {
        let value = eta_upper * Complex64::from_polar(1.0, -self.phi0) + eta_lower;
        value.norm() <= EXCEPTIONAL_TOL * (eta_upper.norm() + eta_lower.norm() + 1.0)
    }
}
