//! `verify-expansions` and `verify-traces`: randomized self-tests of the
//! field expansion, its gradient and the two trace evaluation paths.

use std::f64::consts::PI;

use lame_ghp::elastic_field::{
    FourierCoefficients, LameMedium, PolarPoint, evaluate_field_cartesian, evaluate_gradient,
    pde_residual,
};
use lame_ghp::finite_diff::jacobian;
use lame_ghp::traces::{BoundaryConditionKind, LineSegment, Side, trace_direct, trace_series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CheckResult, random_coefficients};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Outcome, json_report};

/// Default truncation order of the random fields.
pub const DEFAULT_ORDER: usize = 12;
/// Default random fields of `verify-expansions`.
pub const DEFAULT_FIELD_SAMPLES: usize = 50;
/// Interior points per field.
pub const POINTS_PER_FIELD: usize = 20;
/// Default bound on the finite-difference PDE residual.
pub const PDE_TOLERANCE: f64 = 1e-6;
/// Bound on the gradient mismatch against finite differences.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Finite-difference step of the gradient check.
pub const GRADIENT_STEP: f64 = 1e-4;
/// Radial range of the interior sample points.
const RADIUS_RANGE: (f64, f64) = (0.1, 3.0);

/// Default random fields of `verify-traces`.
pub const DEFAULT_TRACE_SAMPLES: usize = 20;
/// Radii per segment.
pub const TRACE_RADII: usize = 10;
/// Default bound on the series/direct trace mismatch.
pub const TRACE_TOLERANCE: f64 = 1e-8;
/// Segment length of the trace check.
const TRACE_SEGMENT_LENGTH: f64 = 0.5;

#[derive(Serialize)]
struct ExpansionReport {
    seed: u64,
    medium: LameMedium,
    truncation_order: usize,
    samples: usize,
    points_per_sample: usize,
    checks: Vec<CheckResult>,
    passed: bool,
}

fn random_points(rng: &mut ChaCha8Rng) -> Vec<PolarPoint> {
    (0..POINTS_PER_FIELD)
        .map(|_| {
            let r = rng.random_range(RADIUS_RANGE.0..RADIUS_RANGE.1);
            let phi = rng.random_range(-PI..PI);
            PolarPoint::new(r, phi).expect("positive radius")
        })
        .collect()
}

fn field_deviations(
    medium: &LameMedium,
    coeffs: &FourierCoefficients,
    points: &[PolarPoint],
) -> CliResult<(f64, f64)> {
    let (mut pde, mut gradient) = (0.0f64, 0.0f64);
    for p in points {
        pde = pde.max(pde_residual(medium, coeffs, p)?.norm());
        let exact = evaluate_gradient(medium, coeffs, p)?;
        let fd = jacobian(
            |x| evaluate_field_cartesian(medium, coeffs, x),
            p.to_cartesian(),
            GRADIENT_STEP,
        )?;
        gradient = gradient.max((exact - fd).iter().map(|d| d.norm()).fold(0.0, f64::max));
    }
    Ok((pde, gradient))
}

/// PDE residual and gradient checks on random fields.
///
/// # Errors
/// Invalid medium overrides; evaluation failures.
pub fn verify_expansions(config: &RunConfig) -> CliResult<Outcome> {
    let medium = config.medium()?;
    let order = config.order(DEFAULT_ORDER);
    let samples = config.samples(DEFAULT_FIELD_SAMPLES);
    let tolerance = config.tolerance("verify-expansions", Some(PDE_TOLERANCE))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let fields: Vec<(FourierCoefficients, Vec<PolarPoint>)> = (0..samples)
        .map(|_| {
            let coeffs = random_coefficients(&mut rng, order, 1.0);
            (coeffs, random_points(&mut rng))
        })
        .collect();
    let deviations = fields
        .par_iter()
        .map(|(coeffs, points)| field_deviations(&medium, coeffs, points))
        .collect::<CliResult<Vec<_>>>()?;
    let checks = vec![
        CheckResult::new(
            "pde_residual",
            tolerance,
            deviations.iter().map(|d| d.0).collect(),
        ),
        CheckResult::new(
            "gradient_vs_finite_difference",
            GRADIENT_TOLERANCE,
            deviations.iter().map(|d| d.1).collect(),
        ),
    ];
    let passed = checks.iter().all(|c| c.passed);
    let summary = checks.iter().map(CheckResult::line).collect();
    let report = ExpansionReport {
        seed: config.seed(),
        medium,
        truncation_order: order,
        samples,
        points_per_sample: POINTS_PER_FIELD,
        checks,
        passed,
    };
    Ok(Outcome::new(
        json_report("verify-expansions", &report)?,
        summary,
        passed,
    ))
}

#[derive(Serialize)]
struct TraceReport {
    seed: u64,
    medium: LameMedium,
    truncation_order: usize,
    samples: usize,
    phi0: f64,
    segment_length: f64,
    radii: Vec<f64>,
    checks: Vec<CheckResult>,
    passed: bool,
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Upper => "upper",
        Side::Lower => "lower",
    }
}

/// Series versus direct evaluation of all six traces on both segments.
///
/// # Errors
/// Invalid medium or scenario overrides; evaluation failures.
pub fn verify_traces(config: &RunConfig) -> CliResult<Outcome> {
    let medium = config.medium()?;
    let order = config.order(DEFAULT_ORDER);
    let samples = config.samples(DEFAULT_TRACE_SAMPLES);
    let tolerance = config.tolerance("verify-traces", Some(TRACE_TOLERANCE))?;
    let params = config.scenario_parameters()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    let fields: Vec<FourierCoefficients> = (0..samples)
        .map(|_| random_coefficients(&mut rng, order, 1.0))
        .collect();
    let radii: Vec<f64> = (1..=TRACE_RADII)
        .map(|k| TRACE_SEGMENT_LENGTH * k as f64 / TRACE_RADII as f64)
        .collect();
    let mut cases = Vec::new();
    for side in [Side::Lower, Side::Upper] {
        let segment = LineSegment::on_side(side, params.phi0, TRACE_SEGMENT_LENGTH)?;
        let eta = match side {
            Side::Upper => params.eta_upper.clone(),
            Side::Lower => params.eta_lower.clone(),
        };
        let kinds = [
            BoundaryConditionKind::TractionFree,
            BoundaryConditionKind::Rigid,
            BoundaryConditionKind::SoftClamped,
            BoundaryConditionKind::SimplySupported,
            BoundaryConditionKind::Impedance { eta: eta.clone() },
            BoundaryConditionKind::GeneralizedImpedance { eta },
        ];
        for kind in kinds {
            cases.push((segment, kind));
        }
    }
    let checks = cases
        .par_iter()
        .map(|(segment, kind)| {
            let per_sample = fields
                .iter()
                .map(|coeffs| {
                    radii.iter().try_fold(0.0f64, |worst, &r| {
                        let series = trace_series(&medium, coeffs, segment, kind, r)?;
                        let direct = trace_direct(&medium, coeffs, segment, kind, r)?;
                        Ok(worst.max((series - direct).norm()))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let name = format!("{}/{}", kind.name(), side_name(segment.side()));
            Ok(CheckResult::new(name, tolerance, per_sample))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let passed = checks.iter().all(|c| c.passed);
    let summary = checks.iter().map(CheckResult::line).collect();
    let report = TraceReport {
        seed: config.seed(),
        medium,
        truncation_order: order,
        samples,
        phi0: params.phi0,
        segment_length: TRACE_SEGMENT_LENGTH,
        radii,
        checks,
        passed,
    };
    Ok(Outcome::new(
        json_report("verify-traces", &report)?,
        summary,
        passed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            samples: Some(3),
            seed: Some(11),
            ..RunConfig::default()
        }
    }

    #[test]
    fn expansion_checks_pass_on_small_sweeps() {
        let outcome = verify_expansions(&small()).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.summary);
        assert_eq!(outcome.summary.len(), 2);
        assert_eq!(verify_expansions(&small()).unwrap(), outcome);
    }

    #[test]
    fn trace_checks_cover_six_kinds_on_both_sides() {
        let outcome = verify_traces(&small()).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.summary);
        assert_eq!(outcome.summary.len(), 12);
    }

    #[test]
    fn impossible_tolerance_fails_the_check() {
        let config = RunConfig {
            tolerance: Some(1e-30),
            ..small()
        };
        assert!(!verify_expansions(&config).unwrap().passed());
    }
}
