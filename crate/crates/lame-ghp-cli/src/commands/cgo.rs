//! `cgo-identity` and `cgo-b0fit`: the sector integral identity for a random
//! field and the leading-coefficient fit of a field with a planted `b₀`.

use lame_ghp::cgo::{
    B0Fit, IdentityTerms, SectorGeometry, b0_leading_factor, b0_relation_coefficient,
    cgo_identity_check, leading_coefficient_b0,
};
use lame_ghp::elastic_field::LameMedium;
use lame_ghp::quadrature::GaussLegendre;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::random_coefficients;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Outcome, Status, csv_table, json_report};

/// Default truncation order of the identity field.
pub const DEFAULT_IDENTITY_ORDER: usize = 8;
/// Default bound on the identity residual.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;
/// Default truncation order of the fit field.
pub const DEFAULT_FIT_ORDER: usize = 6;
/// Default bound on the relative `b₀` recovery error.
pub const FIT_RECOVERY_TOLERANCE: f64 = 0.05;
/// Bound on the relative mismatch of the closed-form leading factor.
pub const FACTOR_TOLERANCE: f64 = 1e-12;

/// One CSV row of the identity sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    /// Decay parameter.
    pub s: f64,
    /// Upper side term, real part.
    pub i1_plus_re: f64,
    /// Upper side term, imaginary part.
    pub i1_plus_im: f64,
    /// Lower side term, real part.
    pub i1_minus_re: f64,
    /// Lower side term, imaginary part.
    pub i1_minus_im: f64,
    /// Arc term, real part.
    pub i2_re: f64,
    /// Arc term, imaginary part.
    pub i2_im: f64,
    /// Area term, real part.
    pub i3_re: f64,
    /// Area term, imaginary part.
    pub i3_im: f64,
    /// `|I₃ - I₁⁺ - I₁⁻ - I₂|`.
    pub residual: f64,
    /// Residual relative to the integral scale.
    pub relative_residual: f64,
    /// Change under doubling of the quadrature order.
    pub quadrature_error: f64,
    /// Whether the quadrature converged.
    pub converged: bool,
}

impl From<&IdentityTerms> for IdentityRow {
    fn from(t: &IdentityTerms) -> Self {
        Self {
            s: t.s,
            i1_plus_re: t.i1_plus.re,
            i1_plus_im: t.i1_plus.im,
            i1_minus_re: t.i1_minus.re,
            i1_minus_im: t.i1_minus.im,
            i2_re: t.i2.re,
            i2_im: t.i2.im,
            i3_re: t.i3.re,
            i3_im: t.i3.im,
            residual: t.residual,
            relative_residual: t.relative_residual(),
            quadrature_error: t.quadrature_error,
            converged: t.converged,
        }
    }
}

fn geometry(config: &RunConfig) -> CliResult<SectorGeometry> {
    Ok(SectorGeometry::new(config.cgo.phi0, config.cgo.h)?)
}

/// Identity sweep over the configured decay grid for a random field.
///
/// # Errors
/// Invalid sector or medium; evaluation failures.
pub fn cgo_identity(config: &RunConfig) -> CliResult<Outcome> {
    let medium = config.medium()?;
    let geometry = geometry(config)?;
    let tolerance = config.tolerance("cgo-identity", Some(IDENTITY_TOLERANCE))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let coeffs = random_coefficients(&mut rng, config.order(DEFAULT_IDENTITY_ORDER), 1.0);
    let terms = cgo_identity_check(
        &medium,
        &coeffs,
        &geometry,
        &config.cgo.s_grid,
        config.cgo.quadrature_order,
    )?;
    let rows: Vec<IdentityRow> = terms.iter().map(IdentityRow::from).collect();
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "{}: s = {} residual {:.3e} (relative {:.3e}, quadrature change {:.3e})",
                if r.residual < tolerance && r.converged {
                    "PASS"
                } else {
                    "FAIL"
                },
                r.s,
                r.residual,
                r.relative_residual,
                r.quadrature_error
            )
        })
        .collect();
    let passed = rows.iter().all(|r| r.residual < tolerance);
    let mut outcome = Outcome::new(csv_table(&rows)?, summary, passed);
    if rows.iter().any(|r| !r.converged) {
        outcome.status = Status::Unconverged;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct FactorCheck {
    closed_form: Complex64,
    angular_integral: Complex64,
    relative_deviation: f64,
    relation_coefficient: Complex64,
    relation_ratio: Complex64,
    passed: bool,
}

/// Compares the closed-form `s⁻⁶` factor with a quadrature of
/// `-(i/2)κk_s² ∫_0^{φ₀} 2Γ(6) e^{iφ} e^{-3iφ} dφ`, and reports the ratio of
/// the traction-free pair coefficient of `b₀` to it (`-1/2` exactly).
fn factor_check(medium: &LameMedium, phi0: f64) -> CliResult<FactorCheck> {
    let rule = GaussLegendre::new(32)?;
    let integral = rule.integrate(0.0, phi0, |phi| {
        Ok(Complex64::from_polar(240.0, -2.0 * phi))
    })?;
    let angular_integral =
        Complex64::new(0.0, -0.5) * medium.kappa() * medium.k_s().powi(2) * integral;
    let closed_form = b0_leading_factor(medium, phi0);
    let relative_deviation = (closed_form - angular_integral).norm() / closed_form.norm();
    let relation_coefficient = b0_relation_coefficient(medium, phi0);
    Ok(FactorCheck {
        closed_form,
        angular_integral,
        relative_deviation,
        relation_coefficient,
        relation_ratio: relation_coefficient / closed_form,
        passed: relative_deviation < FACTOR_TOLERANCE,
    })
}

#[derive(Serialize)]
struct FitReport {
    seed: u64,
    medium: LameMedium,
    geometry: SectorGeometry,
    truncation_order: usize,
    planted_b0: Complex64,
    fit: B0Fit,
    relative_error: f64,
    tolerance: f64,
    identity: Vec<IdentityRow>,
    factor: FactorCheck,
    passed: bool,
}

/// Fits `s⁶I₃` for a random field with `a₀ = 0` and the configured `b₀`.
///
/// # Errors
/// Invalid sector, grid or medium; quadrature and fit failures.
pub fn cgo_b0fit(config: &RunConfig) -> CliResult<Outcome> {
    let medium = config.medium()?;
    let geometry = geometry(config)?;
    let tolerance = config.tolerance("cgo-b0fit", Some(FIT_RECOVERY_TOLERANCE))?;
    let order = config.order(DEFAULT_FIT_ORDER);
    let planted = config.cgo.planted_b0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let mut coeffs = random_coefficients(&mut rng, order, config.cgo.background_scale);
    coeffs.a_mut()[0] = Complex64::default();
    coeffs.b_mut()[0] = planted;
    let grid = &config.cgo.fit_grid;
    let terms = cgo_identity_check(
        &medium,
        &coeffs,
        &geometry,
        grid,
        config.cgo.quadrature_order,
    )?;
    let i3: Vec<Complex64> = terms.iter().map(|t| t.i3).collect();
    let fit = leading_coefficient_b0(&medium, &geometry, grid, &i3)?;
    let relative_error = if planted.norm() > 0.0 {
        (fit.b0 - planted).norm() / planted.norm()
    } else {
        fit.b0.norm()
    };
    let factor = factor_check(&medium, geometry.phi0())?;
    let passed = relative_error < tolerance && factor.passed;
    let summary = vec![
        format!(
            "{}: b0 = {:.6} (planted {planted}), relative error {relative_error:.3e}, fit residual {:.3e}",
            if relative_error < tolerance {
                "PASS"
            } else {
                "FAIL"
            },
            fit.b0,
            fit.relative_residual
        ),
        format!(
            "{}: leading factor {:.6} vs angular integral, relative deviation {:.3e}; pair relation ratio {:.6}",
            if factor.passed { "PASS" } else { "FAIL" },
            factor.closed_form,
            factor.relative_deviation,
            factor.relation_ratio
        ),
    ];
    let converged = terms.iter().all(|t| t.converged);
    let report = FitReport {
        seed: config.seed(),
        medium,
        geometry,
        truncation_order: order,
        planted_b0: planted,
        fit,
        relative_error,
        tolerance,
        identity: terms.iter().map(IdentityRow::from).collect(),
        factor,
        passed,
    };
    let mut outcome = Outcome::new(json_report("cgo-b0fit", &report)?, summary, passed);
    if !converged {
        outcome.status = Status::Unconverged;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Artifact;

    #[test]
    fn factor_matches_quadrature_and_pair_ratio_is_minus_half() {
        let medium = LameMedium::new(1.5, 0.7, 2.0).unwrap();
        let check = factor_check(&medium, 1.1).unwrap();
        assert!(check.passed);
        assert!((check.relation_ratio + 0.5).norm() < 1e-12);
    }

    #[test]
    fn identity_csv_header() {
        let config = RunConfig {
            cgo: crate::config::CgoSettings {
                s_grid: vec![20.0],
                quadrature_order: 16,
                ..Default::default()
            },
            truncation: crate::config::Truncation {
                m: Some(3),
                n: None,
            },
            ..RunConfig::default()
        };
        let outcome = cgo_identity(&config).unwrap();
        let Artifact::Csv(text) = &outcome.artifact else {
            panic!("identity emits CSV");
        };
        assert!(text.starts_with(
            "s,i1_plus_re,i1_plus_im,i1_minus_re,i1_minus_im,i2_re,i2_im,i3_re,i3_im,residual,"
        ));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn invalid_sector_is_a_configuration_error() {
        let config = RunConfig {
            cgo: crate::config::CgoSettings {
                h: 3.0,
                ..Default::default()
            },
            ..RunConfig::default()
        };
        assert_eq!(
            cgo_identity(&config).unwrap_err().exit_code(),
            crate::error::EXIT_CONFIG_ERROR
        );
    }
}
