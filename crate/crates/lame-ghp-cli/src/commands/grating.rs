//! `grating-modes`: Rayleigh mode table, branch identities and the
//! quasiperiodicity of modal fields, with an optional sampled-field CSV.

use std::f64::consts::{PI, TAU};

use lame_ghp::elastic_field::LameMedium;
use lame_ghp::scattering::{
    RayleighCoefficient, RayleighCoefficients, RayleighMode, SampleGrid, quasiperiodicity,
    rayleigh_field, rayleigh_mode,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Outcome, csv_table};

/// Bound on the relative branch identity residual `|α² + β² - k²|/(α² + k²)`.
pub const BRANCH_TOLERANCE: f64 = 1e-14;
/// Default bound on the relative quasiperiodicity defect.
pub const QUASIPERIODICITY_TOLERANCE: f64 = 1e-12;
/// Random sample points per angle of the quasiperiodicity check.
const QUASIPERIODICITY_POINTS: usize = 16;
/// Height of the grating profile above which the expansion is evaluated.
const PROFILE_MAX: f64 = 0.5;
/// Vertical range of the sample points above the profile.
const HEIGHT_RANGE: (f64, f64) = (0.6, 3.0);

/// One CSV row of the mode table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    /// Incidence angle.
    pub theta: f64,
    /// Mode index.
    pub n: i32,
    /// Horizontal wavenumber `α_n`.
    pub alpha_n: f64,
    /// Pressure vertical wavenumber, real part.
    pub beta_p_re: f64,
    /// Pressure vertical wavenumber, imaginary part.
    pub beta_p_im: f64,
    /// Shear vertical wavenumber, real part.
    pub beta_s_re: f64,
    /// Shear vertical wavenumber, imaginary part.
    pub beta_s_im: f64,
    /// Whether the pressure mode propagates.
    pub propagating_p: bool,
    /// Whether the shear mode propagates.
    pub propagating_s: bool,
    /// Relative pressure branch residual.
    pub branch_residual_p: f64,
    /// Relative shear branch residual.
    pub branch_residual_s: f64,
}

fn branch_residual(alpha: f64, beta: Complex64, k: f64) -> f64 {
    let a2 = alpha * alpha;
    (a2 + beta * beta - k * k).norm() / (a2 + k * k)
}

fn mode_row(medium: &LameMedium, theta: f64, mode: &RayleighMode) -> ModeRow {
    ModeRow {
        theta,
        n: mode.n,
        alpha_n: mode.alpha_n,
        beta_p_re: mode.beta_p.re,
        beta_p_im: mode.beta_p.im,
        beta_s_re: mode.beta_s.re,
        beta_s_im: mode.beta_s.im,
        propagating_p: mode.propagating_p,
        propagating_s: mode.propagating_s,
        branch_residual_p: branch_residual(mode.alpha_n, mode.beta_p, medium.k_p()),
        branch_residual_s: branch_residual(mode.alpha_n, mode.beta_s, medium.k_s()),
    }
}

/// One CSV row of the sampled field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRow {
    /// Horizontal coordinate.
    pub x1: f64,
    /// Vertical coordinate.
    pub x2: f64,
    /// First component, real part.
    pub u1_re: f64,
    /// First component, imaginary part.
    pub u1_im: f64,
    /// Second component, real part.
    pub u2_re: f64,
    /// Second component, imaginary part.
    pub u2_im: f64,
}

fn random_modes(
    rng: &mut ChaCha8Rng,
    theta: f64,
    max_index: i32,
) -> CliResult<RayleighCoefficients> {
    let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let modes = (-max_index..=max_index)
        .map(|n| RayleighCoefficient {
            n,
            pressure: draw(),
            shear: draw(),
        })
        .collect();
    Ok(RayleighCoefficients::new(theta, PROFILE_MAX, modes)?)
}

/// Largest `|u(x + 2π e₁) - e^{2iπα} u(x)| / (1 + |u(x)|)` over random points.
fn quasiperiodicity_defect(
    medium: &LameMedium,
    coeffs: &RayleighCoefficients,
    points: &[[f64; 2]],
) -> CliResult<f64> {
    let factor = Complex64::from_polar(1.0, TAU * quasiperiodicity(medium, coeffs.theta()));
    points.iter().try_fold(0.0f64, |worst, &x| {
        let here = rayleigh_field(medium, coeffs, x)?.value;
        let shifted = rayleigh_field(medium, coeffs, [x[0] + TAU, x[1]])?.value;
        Ok(worst.max((shifted - here * factor).norm() / (1.0 + here.norm())))
    })
}

/// Mode table over the configured angles.
///
/// # Errors
/// Angles outside `(-π/2, π/2)`, a negative mode range or an invalid medium.
pub fn grating_modes(config: &RunConfig) -> CliResult<Outcome> {
    let medium = config.medium()?;
    let settings = &config.grating;
    if settings.max_index < 0 || settings.thetas.is_empty() {
        return Err(CliError::Config(
            "grating needs at least one angle and max_index >= 0".into(),
        ));
    }
    let tolerance = config.tolerance("grating-modes", Some(QUASIPERIODICITY_TOLERANCE))?;
    let mut rows = Vec::new();
    for &theta in &settings.thetas {
        for n in -settings.max_index..=settings.max_index {
            rows.push(mode_row(&medium, theta, &rayleigh_mode(&medium, theta, n)?));
        }
    }
    let branch = rows
        .iter()
        .map(|r| r.branch_residual_p.max(r.branch_residual_s))
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let mut defect = 0.0f64;
    let mut sets = Vec::new();
    for &theta in &settings.thetas {
        let coeffs = random_modes(&mut rng, theta, settings.max_index)?;
        let points: Vec<[f64; 2]> = (0..QUASIPERIODICITY_POINTS)
            .map(|_| {
                [
                    rng.random_range(-PI..PI),
                    rng.random_range(HEIGHT_RANGE.0..HEIGHT_RANGE.1),
                ]
            })
            .collect();
        defect = defect.max(quasiperiodicity_defect(&medium, &coeffs, &points)?);
        sets.push(coeffs);
    }
    let branch_ok = branch <= BRANCH_TOLERANCE;
    let periodic_ok = defect < tolerance;
    let propagating = rows.iter().filter(|r| r.propagating_p).count();
    let summary = vec![
        format!(
            "{}: branch identities, max relative residual {branch:.3e} (tolerance {BRANCH_TOLERANCE:.0e})",
            if branch_ok { "PASS" } else { "FAIL" }
        ),
        format!(
            "{}: quasiperiodicity, max relative defect {defect:.3e} (tolerance {tolerance:.0e})",
            if periodic_ok { "PASS" } else { "FAIL" }
        ),
        format!(
            "{} modes over {} angles, {propagating} propagating pressure modes",
            rows.len(),
            settings.thetas.len()
        ),
    ];
    let mut outcome = Outcome::new(csv_table(&rows)?, summary, branch_ok && periodic_ok);
    let field_path = settings.field_output.as_ref().map(|p| config.resolve(p));
    if let Some(path) = field_path {
        let grid = SampleGrid {
            origin: [0.0, HEIGHT_RANGE.0],
            extent: [TAU, HEIGHT_RANGE.1 - HEIGHT_RANGE.0],
            counts: settings.field_counts,
        };
        let field = (0..grid.len())
            .map(|k| {
                let x = grid.point(k);
                let u = rayleigh_field(&medium, &sets[0], x)?.value;
                Ok(FieldRow {
                    x1: x[0],
                    x2: x[1],
                    u1_re: u[0].re,
                    u1_im: u[0].im,
                    u2_re: u[1].re,
                    u2_im: u[1].im,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        outcome.attachments.push((path, csv_table(&field)?));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Artifact;

    #[test]
    fn default_table_passes_both_checks() {
        let outcome = grating_modes(&RunConfig::default()).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.summary);
        let Artifact::Csv(text) = &outcome.artifact else {
            panic!("grating emits CSV");
        };
        assert_eq!(text.lines().count(), 1 + 4 * 17);
        assert!(text.starts_with("theta,n,alpha_n,beta_p_re,beta_p_im,beta_s_re,beta_s_im,"));
        assert!(outcome.attachments.is_empty());
    }

    #[test]
    fn field_attachment_has_one_row_per_grid_point() {
        let mut config = RunConfig::default();
        config.grating.field_output = Some("field.csv".into());
        config.grating.field_counts = [4, 3];
        let outcome = grating_modes(&config).unwrap();
        let (path, Artifact::Csv(text)) = &outcome.attachments[0] else {
            panic!("field emits CSV");
        };
        assert!(path.ends_with("field.csv"));
        assert_eq!(text.lines().next(), Some("x1,x2,u1_re,u1_im,u2_re,u2_im"));
        assert_eq!(text.lines().count(), 13);
    }

    #[test]
    fn grazing_angles_are_rejected() {
        let mut config = RunConfig::default();
        config.grating.thetas = vec![PI / 2.0];
        assert!(grating_modes(&config).is_err());
    }
}
