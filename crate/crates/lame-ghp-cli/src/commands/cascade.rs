//! `cascade <label>`: assemble a catalog row, compute its forced-zero prefix
//! and replay the hand relations attached to it.

use lame_ghp::elastic_field::LameMedium;
use lame_ghp::ghp_constraints::cascade::DEFAULT_RANK_TOL;
use lame_ghp::ghp_constraints::{
    CascadeReport, Exclusion, LineScenario, ReplayRecord, cascade_verify, lookup, recurrence_replay,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Outcome, json_report};

/// Default truncation order `M`.
pub const DEFAULT_ORDER: usize = 20;
/// Default trace powers `N`.
pub const DEFAULT_POWERS: usize = 24;

/// Verdict when every guarded order is forced to vanish.
pub const VERDICT_VANISHING: &str = "consistent with u ≡ 0";
/// Verdict when the parameters hit an exclusion of the row.
pub const VERDICT_DEGENERATE: &str = "degenerate (cataloged exceptional value)";
/// Verdict when generic parameters leave a guarded order free.
pub const VERDICT_UNFORCED: &str = "not forced to vanish at this truncation";

#[derive(Serialize)]
struct ReplaySummary {
    instances: usize,
    generated: usize,
    unexpected: usize,
    worst_generated_residual: f64,
    records: Vec<ReplayRecord>,
}

#[derive(Serialize)]
struct CascadeOutput<'a> {
    label: &'a str,
    title: &'a str,
    hypotheses: &'a str,
    expected_conclusion: &'a str,
    medium: LameMedium,
    scenario: &'a LineScenario,
    violated_exclusions: Vec<Exclusion>,
    verdict: &'static str,
    cascade: CascadeReport,
    replay: ReplaySummary,
    passed: bool,
}

/// Runs the cascade and relation replay of catalog row `label`.
///
/// # Errors
/// Unknown labels, invalid parameters (including the collinear angle `π`),
/// a scenario file whose label differs from `label`, and SVD failures.
pub fn cascade(config: &RunConfig, label: &str) -> CliResult<Outcome> {
    let entry = lookup(label)?;
    let medium = config.medium()?;
    let scenario = match config.scenario_from_file()? {
        Some(s) if s.label() != label => {
            return Err(CliError::Config(format!(
                "scenario file describes `{}`, not `{label}`",
                s.label()
            )));
        }
        Some(s) => s,
        None => entry.scenario(&config.scenario_parameters()?)?,
    };
    let order = config.order(DEFAULT_ORDER);
    let powers = config.powers(DEFAULT_POWERS);
    let rank_tol = config.tolerance("cascade", Some(DEFAULT_RANK_TOL))?;
    let report = cascade_verify(&scenario, &medium, order, powers, rank_tol)?;
    let violated = entry.violated_exclusions(&medium, &scenario);
    let records = recurrence_replay(&scenario, &medium, order)?;

    let verdict = if !violated.is_empty() {
        VERDICT_DEGENERATE
    } else if report.all_guarded_forced {
        VERDICT_VANISHING
    } else {
        VERDICT_UNFORCED
    };
    let unexpected = records.iter().filter(|r| !r.as_expected()).count();
    let replay = ReplaySummary {
        instances: records.len(),
        generated: records.iter().filter(|r| r.generated).count(),
        unexpected,
        worst_generated_residual: records
            .iter()
            .filter(|r| r.status.expects_generated())
            .map(|r| r.residual)
            .fold(0.0, f64::max),
        records,
    };
    let passed = verdict != VERDICT_UNFORCED && unexpected == 0;
    let summary = vec![
        format!(
            "{label}: forced_zero_prefix = {} of {} guarded orders | expected: {} | verdict: {verdict}",
            report.forced_zero_prefix, report.guarded_orders, entry.conclusion
        ),
        format!(
            "replay: {} of {} relation instances generated, {} unexpected, worst residual {:.3e}",
            replay.generated, replay.instances, replay.unexpected, replay.worst_generated_residual
        ),
    ];
    let output = CascadeOutput {
        label,
        title: &entry.title,
        hypotheses: &entry.hypotheses,
        expected_conclusion: &entry.conclusion,
        medium,
        scenario: &scenario,
        violated_exclusions: violated,
        verdict,
        cascade: report,
        replay,
        passed,
    };
    Ok(Outcome::new(
        json_report("cascade", &output)?,
        summary,
        passed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioOverrides;
    use crate::output::Artifact;
    use num_complex::Complex64;

    fn run(label: &str, scenario: ScenarioOverrides) -> CliResult<(Outcome, serde_json::Value)> {
        let config = RunConfig {
            scenario,
            ..RunConfig::default()
        };
        let outcome = cascade(&config, label)?;
        let Artifact::Json(text) = &outcome.artifact else {
            panic!("cascade emits JSON");
        };
        let value = serde_json::from_str(text).unwrap();
        Ok((outcome, value))
    }

    #[test]
    fn generic_row_forces_the_guarded_prefix() {
        let (outcome, value) = run("R+G", ScenarioOverrides::default()).unwrap();
        assert!(outcome.passed());
        assert_eq!(value["verdict"], VERDICT_VANISHING);
        assert_eq!(value["cascade"]["forced_zero_prefix"], 17);
        assert_eq!(value["expected_conclusion"], "u ≡ 0");
        assert!(outcome.summary[0].contains("forced_zero_prefix = 17"));
    }

    #[test]
    fn exceptional_override_is_reported_as_degenerate() {
        let overrides = ScenarioOverrides {
            eta: Some(Complex64::new(0.0, -1.0 / 3.0)),
            ..ScenarioOverrides::default()
        };
        let (outcome, value) = run("H+H", overrides).unwrap();
        assert_eq!(value["verdict"], VERDICT_DEGENERATE);
        assert_eq!(
            value["violated_exclusions"][0]["rule"],
            "pair_determinant_roots"
        );
        assert!(outcome.passed());
    }

    #[test]
    fn collinear_rows_and_unknown_labels_are_rejected() {
        let collinear = ScenarioOverrides {
            phi0: Some(std::f64::consts::PI),
            ..ScenarioOverrides::default()
        };
        let err = run("R+R", collinear).unwrap_err();
        assert!(err.to_string().contains("collinear"));
        assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG_ERROR);
        assert!(run("X+Y", ScenarioOverrides::default()).is_err());
    }
}
