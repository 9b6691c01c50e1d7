//! `catalog`: the scenario catalog and the measurement-count table as data.

use lame_ghp::ghp_constraints::{CatalogEntry, catalog};
use lame_ghp::scattering::{MeasurementCatalog, measurement_catalog};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Outcome, json_report};

#[derive(Serialize)]
struct CatalogReport<'a> {
    scenarios: &'a [CatalogEntry],
    measurement_counts: &'a MeasurementCatalog,
}

/// Both catalogs as JSON; the summary lists them as text tables.
///
/// # Errors
/// A tolerance given on the command line or in the configuration.
pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    config.tolerance("catalog", None)?;
    let scenarios = catalog();
    let counts = measurement_catalog();
    let mut summary = vec![format!("{} scenario rows", scenarios.len())];
    summary.extend(scenarios.iter().map(|e| {
        format!(
            "  {:<5} {} | {} | {}",
            e.label, e.title, e.hypotheses, e.conclusion
        )
    }));
    summary.push("incident directions per obstacle type".to_string());
    summary.extend(
        counts
            .obstacle_types
            .iter()
            .map(|t| format!("  {} {:<40} {}", t.code, t.obstacle, t.incident_directions)),
    );
    summary.extend(
        counts
            .uniqueness_settings
            .iter()
            .map(|s| format!("  {:<42} {}", s.setting, s.incident_directions)),
    );
    let report = CatalogReport {
        scenarios,
        measurement_counts: counts,
    };
    Ok(Outcome::new(
        json_report("catalog", &report)?,
        summary,
        true,
    ))
}
