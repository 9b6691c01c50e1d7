//! Incident plane waves, the Helmholtz split of a field into pressure and
//! shear parts, and the projection of a plane wave onto the Fourier–Bessel
//! representation.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastic_field::{FourierCoefficients, LameMedium};
use crate::error::{Error, Result};
use crate::finite_diff::{self, CVec2};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance on `|d| = 1`.
const UNIT_TOL: f64 = 1e-12;

/// Finite-difference step of [`helmholtz_split`].
pub const SPLIT_STEP: f64 = 1e-3;

#[derive(Serialize, Deserialize)]
struct WaveRecord {
    medium: LameMedium,
    direction: [f64; 2],
    alpha_p: Complex64,
    alpha_s: Complex64,
}

/// Plane wave `u^i(x) = α_p d e^{ik_p x·d} + α_s d^⊥ e^{ik_s x·d}` with `d^⊥`
/// the counterclockwise rotation of `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveRecord", into = "WaveRecord")]
pub struct IncidentWave {
    medium: LameMedium,
    direction: [f64; 2],
    alpha_p: Complex64,
    alpha_s: Complex64,
}

impl TryFrom<WaveRecord> for IncidentWave {
    type Error = Error;

    fn try_from(r: WaveRecord) -> Result<Self> {
        Self::new(r.medium, r.direction, r.alpha_p, r.alpha_s)
    }
}

impl From<IncidentWave> for WaveRecord {
    fn from(w: IncidentWave) -> Self {
        Self {
            medium: w.medium,
            direction: w.direction,
            alpha_p: w.alpha_p,
            alpha_s: w.alpha_s,
        }
    }
}

impl IncidentWave {
    /// Wave travelling along the unit vector `direction`.
    ///
    /// # Errors
    /// [`Error::InvalidWave`] for a non-unit direction, non-finite amplitudes
    /// or `α_p = α_s = 0`.
    pub fn new(
        medium: LameMedium,
        direction: [f64; 2],
        alpha_p: Complex64,
        alpha_s: Complex64,
    ) -> Result<Self> {
        let norm = direction[0].hypot(direction[1]);
        if norm.is_nan() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidWave(format!(
                "direction must be a unit vector, |d| = {norm}"
            )));
        }
        if ![alpha_p, alpha_s]
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
        {
            return Err(Error::InvalidWave("amplitudes must be finite".into()));
        }
        if alpha_p.norm() + alpha_s.norm() == 0.0 {
            return Err(Error::InvalidWave(
                "at least one of alpha_p, alpha_s must be nonzero".into(),
            ));
        }
        Ok(Self {
            medium,
            direction,
            alpha_p,
            alpha_s,
        })
    }

    /// Wave with direction `(cos ψ, sin ψ)`.
    ///
    /// # Errors
    /// As [`IncidentWave::new`].
    pub fn from_angle(
        medium: LameMedium,
        angle: f64,
        alpha_p: Complex64,
        alpha_s: Complex64,
    ) -> Result<Self> {
        Self::new(medium, [angle.cos(), angle.sin()], alpha_p, alpha_s)
    }

    /// Downward grating illumination `d = (sin θ, -cos θ)` with
    /// `θ ∈ (-π/2, π/2)`, so that `d^⊥ = (cos θ, sin θ)`.
    ///
    /// # Errors
    /// [`Error::InvalidWave`] for `θ` outside the open interval; as
    /// [`IncidentWave::new`] otherwise.
    pub fn grating(
        medium: LameMedium,
        theta: f64,
        alpha_p: Complex64,
        alpha_s: Complex64,
    ) -> Result<Self> {
        check_grating_angle(theta)?;
        Self::new(medium, [theta.sin(), -theta.cos()], alpha_p, alpha_s)
    }

    /// Medium the wave travels in.
    pub fn medium(&self) -> &LameMedium {
        &self.medium
    }

    /// Unit direction `d`.
    pub fn direction(&self) -> [f64; 2] {
        self.direction
    }

    /// `d^⊥ = (-d₂, d₁)`.
    pub fn perpendicular(&self) -> [f64; 2] {
        [-self.direction[1], self.direction[0]]
    }

    /// Polar angle of `d`.
    pub fn angle(&self) -> f64 {
        self.direction[1].atan2(self.direction[0])
    }

    /// Pressure amplitude `α_p`.
    pub fn alpha_p(&self) -> Complex64 {
        self.alpha_p
    }

    /// Shear amplitude `α_s`.
    pub fn alpha_s(&self) -> Complex64 {
        self.alpha_s
    }

    fn phase(&self, k: f64, x: [f64; 2]) -> Complex64 {
        (I * k * (x[0] * self.direction[0] + x[1] * self.direction[1])).exp()
    }

    /// Pressure summand `α_p d e^{ik_p x·d}`.
    pub fn pressure(&self, x: [f64; 2]) -> CVec2 {
        let d = self.direction;
        CVec2::new(d[0].into(), d[1].into()) * (self.alpha_p * self.phase(self.medium.k_p(), x))
    }

    /// Shear summand `α_s d^⊥ e^{ik_s x·d}`.
    pub fn shear(&self, x: [f64; 2]) -> CVec2 {
        let p = self.perpendicular();
        CVec2::new(p[0].into(), p[1].into()) * (self.alpha_s * self.phase(self.medium.k_s(), x))
    }
}

/// Rejects grating angles outside `(-π/2, π/2)`.
pub(crate) fn check_grating_angle(theta: f64) -> Result<()> {
    if theta.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::InvalidWave(format!(
            "grating angle must lie in (-pi/2, pi/2), got {theta}"
        )))
    }
}

/// `u^i(x)`.
pub fn evaluate_incident(wave: &IncidentWave, x: [f64; 2]) -> CVec2 {
    wave.pressure(x) + wave.shear(x)
}

/// Pressure and shear parts of a field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzParts {
    /// `u_p = -(1/k_p²)∇(∇·u)`.
    pub pressure: CVec2,
    /// `u_s = (1/k_s²) curl curl u = (1/k_s²)(∇(∇·u) - Δu)`.
    pub shear: CVec2,
}

/// Helmholtz split of `field` at `x` from fourth-order finite differences with
/// step [`SPLIT_STEP`]. For a Lamé eigenfunction the parts sum to the field.
///
/// # Errors
/// Propagates failures of `field`, for example when the stencil leaves its domain.
pub fn helmholtz_split<F>(medium: &LameMedium, field: F, x: [f64; 2]) -> Result<HelmholtzParts>
where
    F: Fn([f64; 2]) -> Result<CVec2>,
{
    let d = finite_diff::second_derivatives(field, x, SPLIT_STEP)?;
    let grad_div = CVec2::new(d.xx[0] + d.xy[1], d.xy[0] + d.yy[1]);
    let laplacian = d.xx + d.yy;
    Ok(HelmholtzParts {
        pressure: grad_div.unscale(-medium.k_p().powi(2)),
        shear: (grad_div - laplacian).unscale(medium.k_s().powi(2)),
    })
}

/// Non-negative-order projection of a plane wave onto the Fourier–Bessel
/// representation:
/// `a_m = α_p i^{m-1} e^{-imψ}/k_p` and `b_m = -α_s i^{m-1} e^{-imψ}/k_s`
/// with `ψ` the angle of `d`. The representation carries orders `m ≥ 0`
/// only, so the result reproduces the `m ≥ 0` part of the Jacobi–Anger
/// series `e^{ik x·d} = Σ_{m∈ℤ} i^m J_m(kr) e^{im(φ-ψ)}` of each potential,
/// not the full plane wave.
///
/// # Errors
/// [`Error::Truncation`] for `order < 2`.
pub fn jacobi_anger_coefficients(wave: &IncidentWave, order: usize) -> Result<FourierCoefficients> {
    if order < 2 {
        return Err(Error::Truncation(format!(
            "Jacobi-Anger projection needs M >= 2, got {order}"
        )));
    }
    let psi = wave.angle();
    let (kp, ks) = (wave.medium.k_p(), wave.medium.k_s());
    let mut a = Vec::with_capacity(order + 1);
    let mut b = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let weight = I.powi(m as i32 - 1) * Complex64::from_polar(1.0, -(m as f64) * psi);
        a.push(wave.alpha_p * weight / kp);
        b.push(-wave.alpha_s * weight / ks);
    }
    FourierCoefficients::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic_field::{PolarPoint, evaluate_field_cartesian, lame_residual_of};
    use crate::specfun::bessel_j_orders;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn medium() -> LameMedium {
        LameMedium::reference()
    }

    fn random_points(seed: u64, count: usize) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn pressure_wave_at_origin_is_the_direction() {
        let w = IncidentWave::from_angle(medium(), 0.4, one(), Complex64::default()).unwrap();
        let u = evaluate_incident(&w, [0.0, 0.0]);
        assert_eq!(u, CVec2::new(0.4f64.cos().into(), 0.4f64.sin().into()));
    }

    #[test]
    fn invariants_of_the_wave() {
        let m = medium();
        assert!(IncidentWave::new(m, [1.0, 1.0], one(), one()).is_err());
        assert!(
            IncidentWave::new(m, [1.0, 0.0], Complex64::default(), Complex64::default()).is_err()
        );
        assert!(IncidentWave::grating(m, std::f64::consts::FRAC_PI_2, one(), one()).is_err());
        let g = IncidentWave::grating(m, 0.3, one(), one()).unwrap();
        let p = g.perpendicular();
        assert!((p[0] - 0.3f64.cos()).abs() < 1e-15 && (p[1] - 0.3f64.sin()).abs() < 1e-15);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<IncidentWave>(&json).unwrap(), g);
        let bad = json.replace("\"direction\":[", "\"direction\":[2.0,");
        assert!(serde_json::from_str::<IncidentWave>(&bad).is_err());
    }

    #[test]
    fn plane_waves_solve_the_lame_system() {
        let m = medium();
        let w =
            IncidentWave::from_angle(m, 1.1, Complex64::new(0.5, 1.0), Complex64::new(-1.0, 0.2))
                .unwrap();
        for x in random_points(1, 10) {
            let r = lame_residual_of(&m, |y| Ok(evaluate_incident(&w, y)), x).unwrap();
            assert!(r.norm() < 1e-6, "{r}");
        }
    }

    #[test]
    fn pressure_waves_are_curl_free_and_shear_waves_divergence_free() {
        let m = medium();
        let p = IncidentWave::from_angle(m, 2.0, one(), Complex64::default()).unwrap();
        let s = IncidentWave::from_angle(m, 2.0, Complex64::default(), one()).unwrap();
        for x in random_points(2, 10) {
            let jp = finite_diff::jacobian(|y| Ok(evaluate_incident(&p, y)), x, 1e-3).unwrap();
            assert!((jp[(1, 0)] - jp[(0, 1)]).norm() < 1e-6);
            let js = finite_diff::jacobian(|y| Ok(evaluate_incident(&s, y)), x, 1e-3).unwrap();
            assert!((js[(0, 0)] + js[(1, 1)]).norm() < 1e-6);
        }
    }

    #[test]
    fn helmholtz_split_separates_plane_waves() {
        let m = medium();
        let mixed = IncidentWave::from_angle(m, -0.7, one(), one()).unwrap();
        let p = IncidentWave::from_angle(m, -0.7, one(), Complex64::default()).unwrap();
        let s = IncidentWave::from_angle(m, -0.7, Complex64::default(), one()).unwrap();
        for x in random_points(3, 10) {
            let parts = helmholtz_split(&m, |y| Ok(evaluate_incident(&p, y)), x).unwrap();
            assert!((parts.pressure - evaluate_incident(&p, x)).norm() < 1e-6);
            assert!(parts.shear.norm() < 1e-6);
            let parts = helmholtz_split(&m, |y| Ok(evaluate_incident(&s, y)), x).unwrap();
            assert!(parts.pressure.norm() < 1e-6);
            assert!((parts.shear - evaluate_incident(&s, x)).norm() < 1e-6);
            let parts = helmholtz_split(&m, |y| Ok(evaluate_incident(&mixed, y)), x).unwrap();
            assert!((parts.pressure - mixed.pressure(x)).norm() < 1e-6);
            assert!((parts.shear - mixed.shear(x)).norm() < 1e-6);
        }
    }

    #[test]
    fn helmholtz_parts_of_an_expansion_are_curl_and_divergence_free() {
        let m = medium();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let coeffs = FourierCoefficients::new(
            (0..=6).map(|_| draw()).collect(),
            (0..=6).map(|_| draw()).collect(),
        )
        .unwrap();
        let field = |y: [f64; 2]| evaluate_field_cartesian(&m, &coeffs, y);
        for x in [[0.4, 0.3], [-0.5, 0.6], [0.2, -0.7]] {
            let parts = helmholtz_split(&m, field, x).unwrap();
            assert!((parts.pressure + parts.shear - field(x).unwrap()).norm() < 1e-6);
            let jp =
                finite_diff::jacobian(|y| Ok(helmholtz_split(&m, field, y)?.pressure), x, 1e-2)
                    .unwrap();
            assert!((jp[(1, 0)] - jp[(0, 1)]).norm() < 1e-6);
            let js = finite_diff::jacobian(|y| Ok(helmholtz_split(&m, field, y)?.shear), x, 1e-2)
                .unwrap();
            assert!((js[(0, 0)] + js[(1, 1)]).norm() < 1e-6);
        }
    }

    /// `Σ_{m=0}^M c i^m J_m(kr) e^{im(φ-ψ)}`, the non-negative-order part of the
    /// plane-wave potential.
    fn partial_potential(k: f64, psi: f64, order: usize, x: [f64; 2]) -> Complex64 {
        let p = PolarPoint::from_cartesian(x);
        let j = bessel_j_orders(order, k * p.r()).unwrap();
        (0..=order)
            .map(|m| {
                I.powi(m as i32) * j[m] * Complex64::from_polar(1.0, m as f64 * (p.phi() - psi))
            })
            .sum()
    }

    #[test]
    fn projection_matches_the_truncated_jacobi_anger_potentials() {
        let m = medium();
        let (order, psi) = (16, 0.9);
        let wave =
            IncidentWave::from_angle(m, psi, Complex64::new(1.0, -0.5), Complex64::new(0.3, 0.8))
                .unwrap();
        let coeffs = jacobi_anger_coefficients(&wave, order).unwrap();
        let (kp, ks) = (m.k_p(), m.k_s());
        // Pressure part ∇(α_p/(ik_p) ψ_p), shear part ∇^⊥(α_s/(ik_s) ψ_s) with ∇^⊥ = (-∂₂, ∂₁).
        let potentials = |y: [f64; 2]| {
            Ok(CVec2::new(
                wave.alpha_p() / (I * kp) * partial_potential(kp, psi, order, y),
                wave.alpha_s() / (I * ks) * partial_potential(ks, psi, order, y),
            ))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let p =
                PolarPoint::new(rng.random_range(0.05..0.5), rng.random_range(-3.0..3.0)).unwrap();
            let x = p.to_cartesian();
            let g = finite_diff::jacobian(potentials, x, 1e-3).unwrap();
            let expected = CVec2::new(g[(0, 0)] - g[(1, 1)], g[(0, 1)] + g[(1, 0)]);
            let got = evaluate_field_cartesian(&m, &coeffs, x).unwrap();
            assert!((got - expected).norm() < 1e-9, "{got} vs {expected}");
        }
    }

    #[test]
    fn projection_channels() {
        let m = medium();
        let shear = IncidentWave::from_angle(m, 0.2, Complex64::default(), one()).unwrap();
        let c = jacobi_anger_coefficients(&shear, 8).unwrap();
        assert!(c.a().iter().all(|a| a.norm() == 0.0));
        assert!(
            c.b()
                .iter()
                .all(|b| (b.norm() - 1.0 / m.k_s()).abs() < 1e-15)
        );
        assert!(jacobi_anger_coefficients(&shear, 1).is_err());
    }
}
