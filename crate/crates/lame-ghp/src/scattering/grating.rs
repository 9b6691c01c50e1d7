//! Rayleigh modes of a `2π`-periodic grating, the quasiperiodic modal field
//! above the profile, and the sampled independence check for families of
//! plane exponentials.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::incident::check_grating_angle;
use crate::elastic_field::LameMedium;
use crate::error::{Error, Result};
use crate::finite_diff::CVec2;

/// Planar wavevectors `[k_1, k_2]`.
pub type Wavevectors = Vec<[f64; 2]>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest admissible mode index `|n|`.
pub const MAX_MODE_INDEX: i32 = 64;

/// Evanescent terms with `Im(β)·x₂` above this value are dropped; each dropped
/// term is bounded by `|u_n| |ξ_n| e^{-40}`.
pub const EVANESCENT_CUTOFF: f64 = 40.0;

/// Minimal distance between two wavevectors of the independence check.
const DISTINCT_TOL: f64 = 1e-12;

/// One Rayleigh mode `ξ_{β,n} = (α_n, β_{β,n})` for `β ∈ {p, s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighMode {
    /// Mode index.
    pub n: i32,
    /// `α_n = n + k_p sin θ`.
    pub alpha_n: f64,
    /// `β_{p,n}`.
    pub beta_p: Complex64,
    /// `β_{s,n}`.
    pub beta_s: Complex64,
    /// `|α_n| ≤ k_p`.
    pub propagating_p: bool,
    /// `|α_n| ≤ k_s`.
    pub propagating_s: bool,
}

impl RayleighMode {
    /// `ξ_{p,n}`.
    pub fn pressure_wavevector(&self) -> [Complex64; 2] {
        [self.alpha_n.into(), self.beta_p]
    }

    /// `ξ_{s,n}`.
    pub fn shear_wavevector(&self) -> [Complex64; 2] {
        [self.alpha_n.into(), self.beta_s]
    }
}

/// `√(k² - α²)` for `|α| ≤ k`, `i√(α² - k²)` otherwise.
fn vertical_wavenumber(k: f64, alpha: f64) -> Complex64 {
    if alpha.abs() <= k {
        Complex64::new((k * k - alpha * alpha).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (alpha * alpha - k * k).sqrt())
    }
}

/// Quasiperiodicity parameter `α = k_p sin θ` of a pressure incidence.
pub fn quasiperiodicity(medium: &LameMedium, theta: f64) -> f64 {
    medium.k_p() * theta.sin()
}

/// Mode `n` for the grating angle `θ`.
///
/// # Errors
/// [`Error::InvalidWave`] for `θ ∉ (-π/2, π/2)`.
pub fn rayleigh_mode(medium: &LameMedium, theta: f64, n: i32) -> Result<RayleighMode> {
    check_grating_angle(theta)?;
    let alpha_n = f64::from(n) + quasiperiodicity(medium, theta);
    let (kp, ks) = (medium.k_p(), medium.k_s());
    Ok(RayleighMode {
        n,
        alpha_n,
        beta_p: vertical_wavenumber(kp, alpha_n),
        beta_s: vertical_wavenumber(ks, alpha_n),
        propagating_p: alpha_n.abs() <= kp,
        propagating_s: alpha_n.abs() <= ks,
    })
}

/// Rayleigh coefficients `u_{p,n}`, `u_{s,n}` of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighCoefficient {
    /// Mode index.
    pub n: i32,
    /// `u_{p,n}`.
    pub pressure: Complex64,
    /// `u_{s,n}`.
    pub shear: Complex64,
}

#[derive(Serialize, Deserialize)]
struct CoefficientSetRecord {
    theta: f64,
    profile_max: f64,
    modes: Vec<RayleighCoefficient>,
}

/// Mode coefficients of a scattered field for the grating angle `θ`, valid
/// above the profile maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientSetRecord", into = "CoefficientSetRecord")]
pub struct RayleighCoefficients {
    theta: f64,
    profile_max: f64,
    modes: Vec<RayleighCoefficient>,
}

impl TryFrom<CoefficientSetRecord> for RayleighCoefficients {
    type Error = Error;

    fn try_from(r: CoefficientSetRecord) -> Result<Self> {
        Self::new(r.theta, r.profile_max, r.modes)
    }
}

impl From<RayleighCoefficients> for CoefficientSetRecord {
    fn from(c: RayleighCoefficients) -> Self {
        Self {
            theta: c.theta,
            profile_max: c.profile_max,
            modes: c.modes,
        }
    }
}

impl RayleighCoefficients {
    /// Validated coefficient set, sorted by mode index.
    ///
    /// # Errors
    /// [`Error::InvalidWave`] for an invalid angle or profile height, a mode
    /// index beyond [`MAX_MODE_INDEX`], a repeated index or a non-finite value.
    pub fn new(theta: f64, profile_max: f64, mut modes: Vec<RayleighCoefficient>) -> Result<Self> {
        check_grating_angle(theta)?;
        if !profile_max.is_finite() {
            return Err(Error::InvalidWave("profile maximum must be finite".into()));
        }
        let mut seen = BTreeSet::new();
        for m in &modes {
            if m.n.abs() > MAX_MODE_INDEX {
                return Err(Error::InvalidWave(format!(
                    "mode index {} exceeds the limit {MAX_MODE_INDEX}",
                    m.n
                )));
            }
            if !seen.insert(m.n) {
                return Err(Error::InvalidWave(format!("mode index {} repeated", m.n)));
            }
            if ![m.pressure, m.shear]
                .iter()
                .all(|c| c.re.is_finite() && c.im.is_finite())
            {
                return Err(Error::InvalidWave(format!(
                    "mode {} has a non-finite coefficient",
                    m.n
                )));
            }
        }
        modes.sort_by_key(|m| m.n);
        Ok(Self {
            theta,
            profile_max,
            modes,
        })
    }

    /// Grating angle `θ`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Height above which the expansion is valid.
    pub fn profile_max(&self) -> f64 {
        self.profile_max
    }

    /// Coefficients sorted by mode index.
    pub fn modes(&self) -> &[RayleighCoefficient] {
        &self.modes
    }
}

fn dot(xi: &[Complex64; 2], x: [f64; 2]) -> Complex64 {
    xi[0] * x[0] + xi[1] * x[1]
}

/// Modal field and the total modulus bound of the dropped evanescent terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighEvaluation {
    /// `Σ u_{p,n} e^{iξ_{p,n}·x} ξ_{p,n} + Σ u_{s,n} e^{iξ_{s,n}·x} Rξ_{s,n}`.
    pub value: CVec2,
    /// `Σ |u_n| |ξ_n| e^{-Im(β_n) x₂}` over the dropped terms.
    pub dropped_bound: f64,
}

/// Rayleigh field at `x` with `R = [[0, 1], [-1, 0]]` and evanescent terms
/// beyond [`EVANESCENT_CUTOFF`] dropped.
///
/// # Errors
/// [`Error::Precondition`] for `x₂` not above the profile maximum.
pub fn rayleigh_field(
    medium: &LameMedium,
    coeffs: &RayleighCoefficients,
    x: [f64; 2],
) -> Result<RayleighEvaluation> {
    if x[1].is_nan() || x[1] <= coeffs.profile_max {
        return Err(Error::Precondition(format!(
            "Rayleigh expansion evaluated at x2 = {} not above the profile maximum {}",
            x[1], coeffs.profile_max
        )));
    }
    let mut value = CVec2::zeros();
    let mut dropped_bound = 0.0;
    for c in &coeffs.modes {
        let mode = rayleigh_mode(medium, coeffs.theta, c.n)?;
        let xi_p = mode.pressure_wavevector();
        let xi_s = mode.shear_wavevector();
        let terms = [
            (c.pressure, mode.beta_p, xi_p, CVec2::new(xi_p[0], xi_p[1])),
            (c.shear, mode.beta_s, xi_s, CVec2::new(xi_s[1], -xi_s[0])),
        ];
        for (amplitude, beta, xi, polarization) in terms {
            if amplitude == Complex64::default() {
                continue;
            }
            if beta.im * x[1] > EVANESCENT_CUTOFF {
                dropped_bound += amplitude.norm() * polarization.norm() * (-beta.im * x[1]).exp();
                continue;
            }
            value += polarization * (amplitude * (I * dot(&xi, x)).exp());
        }
    }
    Ok(RayleighEvaluation {
        value,
        dropped_bound,
    })
}

/// Rectangular sample grid of cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    /// Lower-left corner.
    pub origin: [f64; 2],
    /// Side lengths.
    pub extent: [f64; 2],
    /// Samples per axis.
    pub counts: [usize; 2],
}

impl SampleGrid {
    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    /// Whether the grid has no points.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample `k` in row-major order.
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = (k % self.counts[0], k / self.counts[0]);
        [
            self.origin[0] + (i as f64 + 0.5) * self.extent[0] / self.counts[0] as f64,
            self.origin[1] + (j as f64 + 0.5) * self.extent[1] / self.counts[1] as f64,
        ]
    }
}

/// Singular values of the sampled exponential system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// Number of wavevectors.
    pub vectors: usize,
    /// Number of sample points.
    pub samples: usize,
    /// Smallest singular value of `[e^{iξ_ℓ·x_k}]`.
    pub sigma_min: f64,
    /// Largest singular value.
    pub sigma_max: f64,
}

/// Smallest singular value of the samples `e^{iξ_ℓ·x_k}`, a finite-sample
/// proxy for the linear independence of the exponentials. Rows are the sample
/// points, built in parallel.
///
/// # Errors
/// [`Error::Precondition`] for an empty set, coinciding vectors, non-finite
/// entries or fewer than four samples per vector; [`Error::Numeric`] when the
/// SVD fails.
pub fn exponential_independence_check(
    xis: &[[f64; 2]],
    grid: &SampleGrid,
) -> Result<IndependenceReport> {
    if xis.is_empty() {
        return Err(Error::Precondition(
            "independence check needs at least one vector".into(),
        ));
    }
    if xis.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("wavevectors must be finite".into()));
    }
    for (i, a) in xis.iter().enumerate() {
        for (j, b) in xis.iter().enumerate().skip(i + 1) {
            if (a[0] - b[0]).hypot(a[1] - b[1]) <= DISTINCT_TOL {
                return Err(Error::Precondition(format!(
                    "wavevectors {i} and {j} coincide"
                )));
            }
        }
    }
    let samples = grid.len();
    if samples < 4 * xis.len() {
        return Err(Error::Precondition(format!(
            "{samples} samples are fewer than four per vector ({} vectors)",
            xis.len()
        )));
    }
    let rows: Vec<Complex64> = (0..samples)
        .into_par_iter()
        .flat_map_iter(|k| {
            let x = grid.point(k);
            xis.iter()
                .map(move |xi| (I * (xi[0] * x[0] + xi[1] * x[1])).exp())
        })
        .collect();
    let matrix = DMatrix::from_row_slice(samples, xis.len(), &rows);
    let sv = matrix
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD of the exponential samples did not converge".into()))?
        .singular_values;
    Ok(IndependenceReport {
        vectors: xis.len(),
        samples,
        sigma_min: sv.min(),
        sigma_max: sv.max(),
    })
}

/// Real wavevectors of pressure incidences at the grating angles `thetas`:
/// the incident vectors `k_p d_ℓ` and the propagating Rayleigh vectors
/// `ξ_{p,n}`, `ξ_{s,n}` for `|n| ≤ max_index`, in angle-major order.
///
/// # Errors
/// [`Error::InvalidWave`] for an invalid angle.
pub fn grating_wavevectors(
    medium: &LameMedium,
    thetas: &[f64],
    max_index: i32,
) -> Result<(Wavevectors, Wavevectors)> {
    let mut incident = Vec::with_capacity(thetas.len());
    let mut rayleigh = Vec::new();
    for &theta in thetas {
        check_grating_angle(theta)?;
        incident.push([medium.k_p() * theta.sin(), -medium.k_p() * theta.cos()]);
        for n in -max_index..=max_index {
            let mode = rayleigh_mode(medium, theta, n)?;
            if mode.propagating_p {
                rayleigh.push([mode.alpha_n, mode.beta_p.re]);
            }
            if mode.propagating_s {
                rayleigh.push([mode.alpha_n, mode.beta_s.re]);
            }
        }
    }
    Ok((incident, rayleigh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic_field::lame_residual_of;
    use crate::finite_diff;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn medium() -> LameMedium {
        LameMedium::reference()
    }

    #[test]
    fn normal_incidence_modes() {
        let m = medium();
        let zero = rayleigh_mode(&m, 0.0, 0).unwrap();
        assert_eq!(zero.alpha_n, 0.0);
        assert_eq!(zero.beta_p, Complex64::new(0.5, 0.0));
        assert!(zero.propagating_p && zero.propagating_s);
        let one = rayleigh_mode(&m, 0.0, 1).unwrap();
        assert!((one.beta_p - Complex64::new(0.0, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!(!one.propagating_p && one.propagating_s);
        assert!(rayleigh_mode(&m, FRAC_PI_2, 0).is_err());
    }

    #[test]
    fn branch_identities_are_exact() {
        for medium in [medium(), LameMedium::new(3.7, 0.4, 2.3).unwrap()] {
            let (kp, ks) = (medium.k_p(), medium.k_s());
            for t in 0..20 {
                let theta = -1.5 + 3.0 * f64::from(t) / 19.0;
                for n in -MAX_MODE_INDEX..=MAX_MODE_INDEX {
                    let mode = rayleigh_mode(&medium, theta, n).unwrap();
                    let a2 = mode.alpha_n * mode.alpha_n;
                    assert!(
                        (a2 + mode.beta_p * mode.beta_p - kp * kp).norm() <= 1e-14 * (a2 + kp * kp)
                    );
                    assert!(
                        (a2 + mode.beta_s * mode.beta_s - ks * ks).norm() <= 1e-14 * (a2 + ks * ks)
                    );
                    for (beta, propagating) in [
                        (mode.beta_p, mode.propagating_p),
                        (mode.beta_s, mode.propagating_s),
                    ] {
                        if propagating {
                            assert!(beta.im == 0.0 && beta.re >= 0.0);
                        } else {
                            assert!(beta.re == 0.0 && beta.im > 0.0);
                        }
                    }
                }
            }
        }
    }

    fn sample_coefficients(theta: f64) -> RayleighCoefficients {
        let modes = (-6..=6)
            .map(|n| RayleighCoefficient {
                n,
                pressure: Complex64::new(1.0 / (1.0 + f64::from(n * n)), 0.3),
                shear: Complex64::new(-0.2, 0.5 / (1.0 + f64::from(n).abs())),
            })
            .collect();
        RayleighCoefficients::new(theta, 0.5, modes).unwrap()
    }

    #[test]
    fn field_is_quasiperiodic() {
        let m = medium();
        let theta = 0.7;
        let coeffs = sample_coefficients(theta);
        let factor = Complex64::from_polar(1.0, 2.0 * PI * quasiperiodicity(&m, theta));
        for x in [[0.1, 0.8], [2.0, 1.5], [-3.0, 4.0], [5.5, 0.6]] {
            let here = rayleigh_field(&m, &coeffs, x).unwrap().value;
            let shifted = rayleigh_field(&m, &coeffs, [x[0] + 2.0 * PI, x[1]])
                .unwrap()
                .value;
            assert!((shifted - here * factor).norm() <= 1e-12 * (1.0 + here.norm()));
        }
    }

    #[test]
    fn modal_field_solves_the_lame_system() {
        let m = medium();
        let single = RayleighCoefficients::new(
            0.4,
            0.0,
            vec![RayleighCoefficient {
                n: 0,
                pressure: Complex64::new(1.0, 0.0),
                shear: Complex64::default(),
            }],
        )
        .unwrap();
        assert!(rayleigh_mode(&m, 0.4, 0).unwrap().propagating_p);
        let all = sample_coefficients(0.4);
        for coeffs in [&single, &all] {
            for x in [[0.3, 1.0], [1.7, 2.2], [-2.0, 1.4]] {
                let r =
                    lame_residual_of(&m, |y| Ok(rayleigh_field(&m, coeffs, y)?.value), x).unwrap();
                assert!(r.norm() < 1e-6, "{r}");
            }
        }
        // The pressure modes are curl-free.
        let jac = finite_diff::jacobian(
            |y| Ok(rayleigh_field(&m, &single, y)?.value),
            [0.5, 1.0],
            1e-3,
        )
        .unwrap();
        assert!((jac[(1, 0)] - jac[(0, 1)]).norm() < 1e-8);
    }

    #[test]
    fn zero_and_dropped_terms() {
        let m = medium();
        let zero = RayleighCoefficients::new(0.1, 0.0, Vec::new()).unwrap();
        assert_eq!(
            rayleigh_field(&m, &zero, [0.0, 1.0]).unwrap().value,
            CVec2::zeros()
        );
        let far = RayleighCoefficients::new(
            0.1,
            0.0,
            vec![RayleighCoefficient {
                n: 60,
                pressure: Complex64::new(1.0, 0.0),
                shear: Complex64::new(1.0, 0.0),
            }],
        )
        .unwrap();
        let e = rayleigh_field(&m, &far, [0.0, 1.0]).unwrap();
        assert_eq!(e.value, CVec2::zeros());
        assert!(e.dropped_bound > 0.0 && e.dropped_bound < 200.0 * (-40f64).exp());
        assert!(rayleigh_field(&m, &far, [0.0, -1.0]).is_err());
    }

    #[test]
    fn coefficient_sets_are_validated() {
        let c = |n| RayleighCoefficient {
            n,
            pressure: Complex64::new(1.0, 0.0),
            shear: Complex64::default(),
        };
        assert!(RayleighCoefficients::new(0.0, 0.0, vec![c(65)]).is_err());
        assert!(RayleighCoefficients::new(0.0, 0.0, vec![c(1), c(1)]).is_err());
        let set = RayleighCoefficients::new(0.2, 0.1, vec![c(2), c(-1)]).unwrap();
        assert_eq!(set.modes()[0].n, -1);
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(
            serde_json::from_str::<RayleighCoefficients>(&json).unwrap(),
            set
        );
    }

    #[test]
    fn independence_check_reference_cases() {
        let grid = SampleGrid {
            origin: [0.0, 0.0],
            extent: [1.0, 1.0],
            counts: [5, 5],
        };
        assert!(exponential_independence_check(&[[1.0, 2.0], [1.0, 2.0]], &grid).is_err());
        let single = exponential_independence_check(&[[0.0, 0.0]], &grid).unwrap();
        assert!((single.sigma_min - 5.0).abs() < 1e-12);
        let small = SampleGrid {
            counts: [2, 3],
            ..grid
        };
        assert!(exponential_independence_check(&[[0.0, 0.0], [1.0, 0.0]], &small).is_err());
    }

    #[test]
    fn incident_and_rayleigh_exponentials_are_independent() {
        let m = medium();
        let thetas: Vec<f64> = (0..8).map(|l| -1.4 + 2.8 * f64::from(l) / 7.0).collect();
        let (incident, rayleigh) = grating_wavevectors(&m, &thetas, 2).unwrap();
        assert!(rayleigh.len() >= 20);
        let mut xis = incident;
        xis.extend(rayleigh.into_iter().take(20));
        let grid = SampleGrid {
            origin: [0.0, 0.0],
            extent: [4.0 * PI, 4.0 * PI],
            counts: [40, 40],
        };
        let report = exponential_independence_check(&xis, &grid).unwrap();
        assert_eq!(report.vectors, 28);
        assert!(report.sigma_min > 1e-3, "{report:?}");
    }
}
