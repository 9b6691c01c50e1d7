//! `scan-eta` and `scan-angle`: conditioning scans of a catalog row over an
//! impedance or opening-angle grid.

use lame_ghp::ghp_constraints::{
    ExceptionalValue, ScanFamily, ScanParameter, ScanTable, exceptional_scan,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Outcome, csv_table};

/// Default truncation order `M`.
pub const DEFAULT_ORDER: usize = 20;
/// Default trace powers `N`.
pub const DEFAULT_POWERS: usize = 24;
/// Row scanned by `scan-eta` by default.
pub const DEFAULT_ETA_FAMILY: &str = "S(H)";
/// Row scanned by `scan-angle` by default.
pub const DEFAULT_ANGLE_FAMILY: &str = "R+G";

/// One CSV row of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    /// Grid index.
    pub index: usize,
    /// Real part of the parameter.
    pub param_re: f64,
    /// Imaginary part of the parameter.
    pub param_im: f64,
    /// Conditioning metric.
    pub sigma_min: f64,
    /// Metric divided by the grid median.
    pub ratio: f64,
    /// Whether the point is a dip.
    pub dip: bool,
    /// Whether the dip is attributed to an exceptional value.
    pub explained: bool,
    /// Exceptional classes the parameter falls into, `;`-separated.
    pub classes: String,
}

fn class_names(classes: &[ExceptionalValue]) -> String {
    classes
        .iter()
        .map(|c| match c {
            ExceptionalValue::PlusI => "plus_i".to_string(),
            ExceptionalValue::MinusI => "minus_i".to_string(),
            ExceptionalValue::RootPlus => "root_plus".to_string(),
            ExceptionalValue::RootMinus => "root_minus".to_string(),
            ExceptionalValue::PairRoot { m } => format!("pair_root(m={m})"),
            ExceptionalValue::AngleDependent => "angle_dependent".to_string(),
            ExceptionalValue::ImpedanceLocus => "impedance_locus".to_string(),
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Rows of `table` in grid order.
pub fn scan_rows(table: &ScanTable) -> Vec<ScanRow> {
    table
        .points
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let dip = table.dips.iter().find(|d| d.index == index);
            ScanRow {
                index,
                param_re: p.param.re,
                param_im: p.param.im,
                sigma_min: p.sigma_min,
                ratio: if table.median > 0.0 {
                    p.sigma_min / table.median
                } else {
                    0.0
                },
                dip: dip.is_some(),
                explained: dip.is_some_and(|d| d.is_explained()),
                classes: dip.map(|d| class_names(&d.classes)).unwrap_or_default(),
            }
        })
        .collect()
}

fn eta_family(config: &RunConfig) -> CliResult<ScanFamily> {
    let label = config.scan.family.as_deref().unwrap_or(DEFAULT_ETA_FAMILY);
    let builtin = [
        ScanFamily::singular_generalized_impedance(),
        ScanFamily::impedance_pair(),
        ScanFamily::rigid_generalized_impedance(),
        ScanFamily::generalized_impedance_pair(),
    ]
    .into_iter()
    .find(|f| f.label == label);
    let parameter = match (config.scan.parameter, &builtin) {
        (Some(ScanParameter::Angle), _) => {
            return Err(CliError::Config(
                "scan-eta scans an impedance; use scan-angle for angles".into(),
            ));
        }
        (Some(p), _) => p,
        (None, Some(f)) => f.parameter,
        (None, None) => ScanParameter::CommonEta,
    };
    Ok(ScanFamily::new(label, parameter)?)
}

fn angle_family(config: &RunConfig) -> CliResult<ScanFamily> {
    match config.scan.parameter {
        None | Some(ScanParameter::Angle) => {}
        Some(_) => {
            return Err(CliError::Config(
                "scan-angle scans the opening angle; use scan-eta for impedances".into(),
            ));
        }
    }
    let label = config
        .scan
        .family
        .as_deref()
        .unwrap_or(DEFAULT_ANGLE_FAMILY);
    Ok(ScanFamily::new(label, ScanParameter::Angle)?)
}

fn run_scan(config: &RunConfig, family: &ScanFamily) -> CliResult<Outcome> {
    config.tolerance("scan", None)?;
    let medium = config.medium()?;
    let base = config.scenario_parameters()?;
    let grid = match &config.scan.grid {
        Some(grid) => grid.clone(),
        None => family.default_grid(&medium, &base),
    };
    let order = config.order(DEFAULT_ORDER);
    let powers = config.powers(DEFAULT_POWERS);
    let table = exceptional_scan(&medium, family, &base, &grid, order, powers)?;
    let unexplained = table.unexplained_dips();
    let mut summary = vec![format!(
        "{} over {} points at (M, N) = ({order}, {powers}): median {:.3e}, {} dips, {} unexplained",
        family.label,
        table.points.len(),
        table.median,
        table.dips.len(),
        unexplained.len()
    )];
    summary.extend(table.dips.iter().map(|d| {
        format!(
            "dip at {} ({}): ratio {:.3e}, {}",
            d.param,
            d.index,
            d.ratio,
            if d.is_explained() {
                "explained"
            } else {
                "UNEXPLAINED"
            }
        )
    }));
    let passed = unexplained.is_empty();
    Ok(Outcome::new(
        csv_table(&scan_rows(&table))?,
        summary,
        passed,
    ))
}

/// Impedance scan; passes iff every dip is attributed to an exceptional value.
///
/// # Errors
/// Unknown families, invalid grids and SVD failures.
pub fn scan_eta(config: &RunConfig) -> CliResult<Outcome> {
    run_scan(config, &eta_family(config)?)
}

/// Opening-angle scan; passes iff every dip is attributed to an exceptional value.
///
/// # Errors
/// Unknown families, invalid grids (including `φ₀ = π`) and SVD failures.
pub fn scan_angle(config: &RunConfig) -> CliResult<Outcome> {
    run_scan(config, &angle_family(config)?)
}
