//! `phi-root`: the critical opening angle as the root of
//! `(4/3) φ / cos⁶(φ/2) = 1`.

use lame_ghp::scattering::{phi_root, phi_root_function};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Outcome, json_report};

/// Default bound on `|g(φ_root)|`.
pub const ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Serialize)]
struct RootReport {
    phi_root: f64,
    phi_root_degrees: f64,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

/// Bisection root and its residual.
///
/// # Errors
/// A tolerance that is not positive.
pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    let tolerance = config.tolerance("phi-root", Some(ROOT_TOLERANCE))?;
    let root = phi_root();
    let residual = phi_root_function(root).abs();
    let passed = residual < tolerance;
    let summary = vec![format!(
        "{}: phi_root = {root:.16} rad ({:.12} deg), |g| = {residual:.3e}",
        if passed { "PASS" } else { "FAIL" },
        root.to_degrees()
    )];
    let report = RootReport {
        phi_root: root,
        phi_root_degrees: root.to_degrees(),
        residual,
        tolerance,
        passed,
    };
    Ok(Outcome::new(
        json_report("phi-root", &report)?,
        summary,
        passed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_report_passes() {
        let outcome = run(&RunConfig::default()).unwrap();
        assert!(outcome.passed());
        assert!(outcome.summary[0].contains("phi_root = 0.58043041944"));
    }
}
