//! Coefficient-vanishing analysis for homogeneous line configurations meeting
//! at the origin: scenario catalog, constraint assembly, rank cascade,
//! exceptional-parameter determinants, relation replay and parameter scans.

pub mod assemble;
pub mod cascade;
pub mod catalog;
pub mod determinants;
pub mod replay;
pub mod scan;
pub mod scenario;

pub use assemble::{ConstraintSystem, RowTag, assemble};
pub use cascade::{CascadeReport, cascade_from_system, cascade_verify};
pub use catalog::{CatalogEntry, Exclusion, ScenarioParameters, catalog, lookup};
pub use determinants::{ExceptionalParameters, ExceptionalValue};
pub use replay::{RelationSummary, ReplayRecord, recurrence_replay, replay_catalog};
pub use scan::{Dip, ScanFamily, ScanParameter, ScanPoint, ScanTable, exceptional_scan};
pub use scenario::{LineCondition, LineScenario, PointCondition};
