//! Polygonal obstacles and gratings with piecewise boundary conditions, their
//! admissibility, and the class-C predicate on corner impedance pairs.
//!
//! Every condition piece is encoded as `B_i(u) + η B_{i+1}(u) = 0` with
//! `i ∈ {traction, clamping}` and `η ∈ {0, ∞}` or a class-A series, where
//! `η = ∞` stands for `B_{i+1}(u) = 0`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastic_field::LameMedium;
use crate::ghp_constraints::ExceptionalParameters;
use crate::ghp_constraints::determinants::is_close;
use crate::traces::{BoundaryConditionKind, ImpedanceSeries};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance for geometric coincidences.
const GEOMETRY_TOL: f64 = 1e-12;

/// Pair of traces combined by a condition piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionFamily {
    /// Traction with displacement: `T_ν u + η u`.
    Traction,
    /// Soft-clamped with simply-supported traces.
    Clamping,
}

/// Impedance value of a condition piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ImpedanceValue {
    /// `η = 0`: only the first trace of the family vanishes.
    Zero,
    /// `η = ∞`: only the second trace of the family vanishes.
    Infinite,
    /// Class-A series.
    Variable { eta: ImpedanceSeries },
}

impl ImpedanceValue {
    /// Constant part of a variable impedance.
    pub fn constant_part(&self) -> Option<Complex64> {
        match self {
            Self::Variable { eta } => Some(eta.eta0()),
            _ => None,
        }
    }
}

/// Condition on the sub-interval `[start, end]` of an edge, in fractions of
/// the edge length measured from its first vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionPiece {
    /// Trace family.
    pub family: ConditionFamily,
    /// Impedance value.
    pub impedance: ImpedanceValue,
    /// Start fraction.
    pub start: f64,
    /// End fraction.
    pub end: f64,
}

impl ConditionPiece {
    /// Piece imposing `kind` on `[start, end]`.
    pub fn from_kind(kind: &BoundaryConditionKind, start: f64, end: f64) -> Self {
        let (family, impedance) = match kind {
            BoundaryConditionKind::Rigid => (ConditionFamily::Traction, ImpedanceValue::Infinite),
            BoundaryConditionKind::TractionFree => {
                (ConditionFamily::Traction, ImpedanceValue::Zero)
            }
            BoundaryConditionKind::SoftClamped => (ConditionFamily::Clamping, ImpedanceValue::Zero),
            BoundaryConditionKind::SimplySupported => {
                (ConditionFamily::Clamping, ImpedanceValue::Infinite)
            }
            BoundaryConditionKind::Impedance { eta } => (
                ConditionFamily::Traction,
                ImpedanceValue::Variable { eta: eta.clone() },
            ),
            BoundaryConditionKind::GeneralizedImpedance { eta } => (
                ConditionFamily::Clamping,
                ImpedanceValue::Variable { eta: eta.clone() },
            ),
        };
        Self {
            family,
            impedance,
            start,
            end,
        }
    }

    /// The homogeneous condition this piece imposes.
    pub fn kind(&self) -> BoundaryConditionKind {
        match (self.family, &self.impedance) {
            (ConditionFamily::Traction, ImpedanceValue::Zero) => {
                BoundaryConditionKind::TractionFree
            }
            (ConditionFamily::Traction, ImpedanceValue::Infinite) => BoundaryConditionKind::Rigid,
            (ConditionFamily::Traction, ImpedanceValue::Variable { eta }) => {
                BoundaryConditionKind::Impedance { eta: eta.clone() }
            }
            (ConditionFamily::Clamping, ImpedanceValue::Zero) => BoundaryConditionKind::SoftClamped,
            (ConditionFamily::Clamping, ImpedanceValue::Infinite) => {
                BoundaryConditionKind::SimplySupported
            }
            (ConditionFamily::Clamping, ImpedanceValue::Variable { eta }) => {
                BoundaryConditionKind::GeneralizedImpedance { eta: eta.clone() }
            }
        }
    }
}

/// Dissection of one edge into condition pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleEdge {
    /// Pieces ordered from the first vertex of the edge.
    pub pieces: Vec<ConditionPiece>,
}

impl ObstacleEdge {
    /// Edge carrying a single condition.
    pub fn uniform(kind: &BoundaryConditionKind) -> Self {
        Self {
            pieces: vec![ConditionPiece::from_kind(kind, 0.0, 1.0)],
        }
    }
}

/// Polygon whose edge `j` joins vertex `j` to vertex `j + 1` (cyclically).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstaclePolygon {
    /// Vertices in boundary order.
    pub vertices: Vec<[f64; 2]>,
    /// One dissection per edge.
    pub edges: Vec<ObstacleEdge>,
}

/// Union of pairwise disjoint polygonal components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalObstacle {
    /// Components.
    pub components: Vec<ObstaclePolygon>,
}

/// Location of a condition piece: component (or 0 for a grating), edge, piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceLocation {
    /// Component index.
    pub component: usize,
    /// Edge index within the component.
    pub edge: usize,
    /// Piece index within the edge.
    pub piece: usize,
}

/// Reason for rejecting an obstacle or grating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum AdmissibilityViolation {
    /// Fewer than three (obstacle) or two (grating) vertices, non-finite
    /// coordinates, or an edge count that differs from the vertex count.
    MalformedPolygon { component: usize, reason: String },
    /// The boundary is not a simple closed polygon with nonzero area.
    NotSimple { component: usize },
    /// Two components intersect or one contains the other.
    Overlapping { first: usize, second: usize },
    /// The pieces of an edge do not tile `[0, 1]`.
    PieceCoverage { component: usize, edge: usize },
    /// A constant part equals `±i` or `η_root±`.
    ExceptionalImpedance {
        location: PieceLocation,
        value: Complex64,
    },
    /// A constant part has negative imaginary part.
    NegativeImaginaryPart {
        location: PieceLocation,
        value: Complex64,
    },
    /// The profile is not the graph of a `2π`-periodic function.
    NotPeriodicGraph { reason: String },
}

fn pieces_tile(edge: &ObstacleEdge) -> bool {
    let mut cursor = 0.0;
    for p in &edge.pieces {
        if !((p.start - cursor).abs() <= GEOMETRY_TOL && p.end > p.start) {
            return false;
        }
        cursor = p.end;
    }
    !edge.pieces.is_empty() && (cursor - 1.0).abs() <= GEOMETRY_TOL
}

/// Values `η` must avoid on every variable piece: `±i`, `η_root±`.
fn forbidden_constants(medium: &LameMedium) -> [Complex64; 4] {
    // The opening angle only enters the angle-dependent value, which is not needed here.
    let ex = ExceptionalParameters::new(medium, PI / 2.0);
    [I, -I, ex.root_plus, ex.root_minus]
}

fn impedance_violations(
    medium: &LameMedium,
    component: usize,
    edges: &[ObstacleEdge],
    out: &mut Vec<AdmissibilityViolation>,
) {
    let forbidden = forbidden_constants(medium);
    for (e, edge) in edges.iter().enumerate() {
        if !pieces_tile(edge) {
            out.push(AdmissibilityViolation::PieceCoverage { component, edge: e });
        }
        for (p, piece) in edge.pieces.iter().enumerate() {
            let Some(value) = piece.impedance.constant_part() else {
                continue;
            };
            let location = PieceLocation {
                component,
                edge: e,
                piece: p,
            };
            if value.im < 0.0 {
                out.push(AdmissibilityViolation::NegativeImaginaryPart { location, value });
            }
            if forbidden.iter().any(|&f| is_close(value, f)) {
                out.push(AdmissibilityViolation::ExceptionalImpedance { location, value });
            }
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    cross(a, b, p).abs() <= GEOMETRY_TOL
        && p[0] >= a[0].min(b[0]) - GEOMETRY_TOL
        && p[0] <= a[0].max(b[0]) + GEOMETRY_TOL
        && p[1] >= a[1].min(b[1]) - GEOMETRY_TOL
        && p[1] <= a[1].max(b[1]) + GEOMETRY_TOL
}

/// Whether the closed segments `[a, b]` and `[c, d]` share a point.
fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (d1, d2) = (cross(c, d, a), cross(c, d, b));
    let (d3, d4) = (cross(a, b, c), cross(a, b, d));
    if ((d1 > GEOMETRY_TOL && d2 < -GEOMETRY_TOL) || (d1 < -GEOMETRY_TOL && d2 > GEOMETRY_TOL))
        && ((d3 > GEOMETRY_TOL && d4 < -GEOMETRY_TOL) || (d3 < -GEOMETRY_TOL && d4 > GEOMETRY_TOL))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Even-odd test for a point strictly inside a polygon.
fn contains(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1])
            && p[0] < a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
        {
            inside = !inside;
        }
    }
    inside
}

impl ObstaclePolygon {
    fn edge_endpoints(&self, j: usize) -> ([f64; 2], [f64; 2]) {
        (
            self.vertices[j],
            self.vertices[(j + 1) % self.vertices.len()],
        )
    }

    /// Signed area (positive for counterclockwise order).
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = self.edge_endpoints(i);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if self.signed_area().abs() <= GEOMETRY_TOL {
            return false;
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = self.edge_endpoints(i);
                let (c, d) = self.edge_endpoints(j);
                if adjacent {
                    // Adjacent edges share one vertex and must not fold back onto each other.
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    if on_segment(p, c, d) || on_segment(q, a, b) {
                        return false;
                    }
                } else if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    fn structural_violation(&self) -> Option<String> {
        if self.vertices.len() < 3 {
            return Some(format!(
                "{} vertices, at least 3 required",
                self.vertices.len()
            ));
        }
        if self.vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Some("non-finite vertex coordinates".into());
        }
        if self.edges.len() != self.vertices.len() {
            return Some(format!(
                "{} edge dissections for {} vertices",
                self.edges.len(),
                self.vertices.len()
            ));
        }
        None
    }

    fn overlaps(&self, other: &Self) -> bool {
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge_endpoints(i);
            for j in 0..other.vertices.len() {
                let (c, d) = other.edge_endpoints(j);
                if segments_intersect(a, b, c, d) {
                    return true;
                }
            }
        }
        contains(&self.vertices, other.vertices[0]) || contains(&other.vertices, self.vertices[0])
    }

    /// Impedance pairs at every vertex: the last piece of the incoming edge
    /// and the first piece of the outgoing edge.
    pub fn corner_pairs(&self) -> Vec<CornerImpedancePair> {
        let n = self.edges.len();
        (0..n)
            .filter_map(|v| {
                let incoming = self.edges[(v + n - 1) % n].pieces.last()?;
                let outgoing = self.edges[v].pieces.first()?;
                Some(CornerImpedancePair {
                    zeta: incoming.impedance.clone(),
                    zeta_prime: outgoing.impedance.clone(),
                })
            })
            .collect()
    }
}

impl PolygonalObstacle {
    /// Every admissibility violation; empty for an admissible obstacle.
    pub fn violations(&self, medium: &LameMedium) -> Vec<AdmissibilityViolation> {
        let mut out = Vec::new();
        let mut well_formed = Vec::new();
        for (c, polygon) in self.components.iter().enumerate() {
            if let Some(reason) = polygon.structural_violation() {
                out.push(AdmissibilityViolation::MalformedPolygon {
                    component: c,
                    reason,
                });
                continue;
            }
            if !polygon.is_simple() {
                out.push(AdmissibilityViolation::NotSimple { component: c });
            }
            impedance_violations(medium, c, &polygon.edges, &mut out);
            well_formed.push(c);
        }
        for (k, &first) in well_formed.iter().enumerate() {
            for &second in &well_formed[k + 1..] {
                if self.components[first].overlaps(&self.components[second]) {
                    out.push(AdmissibilityViolation::Overlapping { first, second });
                }
            }
        }
        out
    }

    /// Whether the obstacle has nonempty components and no violation.
    pub fn is_admissible(&self, medium: &LameMedium) -> bool {
        !self.components.is_empty() && self.violations(medium).is_empty()
    }

    /// Corner impedance pairs of all components.
    pub fn corner_pairs(&self) -> Vec<CornerImpedancePair> {
        self.components
            .iter()
            .flat_map(ObstaclePolygon::corner_pairs)
            .collect()
    }

    /// Whether every corner pair belongs to class C.
    pub fn in_class_c(&self) -> bool {
        self.corner_pairs()
            .iter()
            .all(CornerImpedancePair::in_class_c)
    }
}

/// Impedance values `ζ`, `ζ'` on two adjacent edges near their common vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerImpedancePair {
    /// Value on the first edge.
    pub zeta: ImpedanceValue,
    /// Value on the second edge.
    pub zeta_prime: ImpedanceValue,
}

impl CornerImpedancePair {
    /// Class-C membership: every variable value has `Im(ζ) ∈ ℝ₊∖{1}`, and
    /// `ζ = ζ'` when both are variable (constant parts compared exactly).
    pub fn in_class_c(&self) -> bool {
        let admissible =
            |v: &ImpedanceValue| v.constant_part().is_none_or(|z| z.im > 0.0 && z.im != 1.0);
        if !(admissible(&self.zeta) && admissible(&self.zeta_prime)) {
            return false;
        }
        match (self.zeta.constant_part(), self.zeta_prime.constant_part()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// Polygonal grating profile `x₂ = f(x₁)` over one period `[0, 2π]`, with
/// `vertices[0].x₁ = 0`, `vertices.last().x₁ = 2π`, equal end heights and
/// one dissection per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalGrating {
    /// Profile vertices with increasing `x₁`.
    pub vertices: Vec<[f64; 2]>,
    /// One dissection per profile segment.
    pub edges: Vec<ObstacleEdge>,
}

impl PolygonalGrating {
    /// `max f`.
    pub fn profile_max(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every admissibility violation; empty for an admissible grating.
    pub fn violations(&self, medium: &LameMedium) -> Vec<AdmissibilityViolation> {
        let mut out = Vec::new();
        let v = &self.vertices;
        if v.len() < 2 || v.iter().flatten().any(|c| !c.is_finite()) {
            out.push(AdmissibilityViolation::MalformedPolygon {
                component: 0,
                reason: "a profile needs at least two finite vertices".into(),
            });
            return out;
        }
        if self.edges.len() + 1 != v.len() {
            out.push(AdmissibilityViolation::MalformedPolygon {
                component: 0,
                reason: format!(
                    "{} dissections for {} segments",
                    self.edges.len(),
                    v.len() - 1
                ),
            });
        }
        let last = v[v.len() - 1];
        if v[0][0].abs() > GEOMETRY_TOL || (last[0] - 2.0 * PI).abs() > GEOMETRY_TOL {
            out.push(AdmissibilityViolation::NotPeriodicGraph {
                reason: "profile must span x1 in [0, 2pi]".into(),
            });
        }
        if (v[0][1] - last[1]).abs() > GEOMETRY_TOL {
            out.push(AdmissibilityViolation::NotPeriodicGraph {
                reason: "end heights differ".into(),
            });
        }
        if v.windows(2)
            .any(|w| w[1][0].partial_cmp(&w[0][0]) != Some(Ordering::Greater))
        {
            out.push(AdmissibilityViolation::NotPeriodicGraph {
                reason: "x1 must increase strictly along the profile".into(),
            });
        }
        impedance_violations(medium, 0, &self.edges, &mut out);
        out
    }

    /// Whether the grating has no violation.
    pub fn is_admissible(&self, medium: &LameMedium) -> bool {
        self.violations(medium).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn impedance(eta: Complex64) -> BoundaryConditionKind {
        BoundaryConditionKind::Impedance {
            eta: ImpedanceSeries::constant(eta, 1.0).unwrap(),
        }
    }

    fn square(offset: [f64; 2], kinds: [BoundaryConditionKind; 4]) -> ObstaclePolygon {
        let [x, y] = offset;
        ObstaclePolygon {
            vertices: vec![[x, y], [x + 1.0, y], [x + 1.0, y + 1.0], [x, y + 1.0]],
            edges: kinds.iter().map(ObstacleEdge::uniform).collect(),
        }
    }

    fn rigid_square(offset: [f64; 2]) -> ObstaclePolygon {
        square(
            offset,
            std::array::from_fn(|_| BoundaryConditionKind::Rigid),
        )
    }

    #[test]
    fn unified_encoding_round_trips() {
        let eta = ImpedanceSeries::constant(Complex64::new(1.0, 2.0), 1.0).unwrap();
        let kinds = [
            BoundaryConditionKind::Rigid,
            BoundaryConditionKind::TractionFree,
            BoundaryConditionKind::SoftClamped,
            BoundaryConditionKind::SimplySupported,
            BoundaryConditionKind::Impedance { eta: eta.clone() },
            BoundaryConditionKind::GeneralizedImpedance { eta },
        ];
        for kind in kinds {
            assert_eq!(ConditionPiece::from_kind(&kind, 0.0, 1.0).kind(), kind);
        }
        let rigid = ConditionPiece::from_kind(&BoundaryConditionKind::Rigid, 0.0, 1.0);
        assert_eq!(rigid.impedance, ImpedanceValue::Infinite);
        assert_eq!(rigid.family, ConditionFamily::Traction);
    }

    #[test]
    fn disjoint_components_are_admissible() {
        let m = LameMedium::reference();
        let good = PolygonalObstacle {
            components: vec![rigid_square([0.0, 0.0]), rigid_square([3.0, 0.0])],
        };
        assert!(good.is_admissible(&m));
        let overlapping = PolygonalObstacle {
            components: vec![rigid_square([0.0, 0.0]), rigid_square([0.5, 0.5])],
        };
        assert_eq!(
            overlapping.violations(&m),
            vec![AdmissibilityViolation::Overlapping {
                first: 0,
                second: 1
            }]
        );
        let mut inner = rigid_square([0.0, 0.0]);
        for v in &mut inner.vertices {
            *v = [0.4 + 0.1 * v[0], 0.4 + 0.1 * v[1]];
        }
        let nested = PolygonalObstacle {
            components: vec![rigid_square([0.0, 0.0]), inner],
        };
        assert!(!nested.is_admissible(&m));
    }

    #[test]
    fn malformed_geometry_is_rejected() {
        let m = LameMedium::reference();
        let mut bowtie = rigid_square([0.0, 0.0]);
        bowtie.vertices.swap(1, 2);
        assert!(bowtie.vertices.len() == 4);
        let o = PolygonalObstacle {
            components: vec![bowtie],
        };
        assert!(
            o.violations(&m)
                .contains(&AdmissibilityViolation::NotSimple { component: 0 })
        );
        let mut short = rigid_square([0.0, 0.0]);
        short.edges.pop();
        let o = PolygonalObstacle {
            components: vec![short],
        };
        assert!(matches!(
            o.violations(&m)[0],
            AdmissibilityViolation::MalformedPolygon { .. }
        ));
        let mut gap = rigid_square([0.0, 0.0]);
        gap.edges[2].pieces[0].end = 0.5;
        let o = PolygonalObstacle {
            components: vec![gap],
        };
        assert_eq!(
            o.violations(&m),
            vec![AdmissibilityViolation::PieceCoverage {
                component: 0,
                edge: 2
            }]
        );
    }

    #[test]
    fn exceptional_impedances_are_rejected() {
        let m = LameMedium::reference();
        let ex = ExceptionalParameters::new(&m, 1.0);
        for (eta, expect_negative) in [
            (I, false),
            (-I, true),
            (ex.root_plus, true),
            (ex.root_minus, true),
        ] {
            let o = PolygonalObstacle {
                components: vec![square(
                    [0.0, 0.0],
                    [
                        impedance(eta),
                        BoundaryConditionKind::Rigid,
                        BoundaryConditionKind::Rigid,
                        BoundaryConditionKind::Rigid,
                    ],
                )],
            };
            let v = o.violations(&m);
            assert!(
                v.iter()
                    .any(|x| matches!(x, AdmissibilityViolation::ExceptionalImpedance { .. }))
            );
            assert_eq!(
                v.iter()
                    .any(|x| matches!(x, AdmissibilityViolation::NegativeImaginaryPart { .. })),
                expect_negative
            );
        }
        let fine = PolygonalObstacle {
            components: vec![square(
                [0.0, 0.0],
                [
                    impedance(Complex64::new(1.0, 2.0)),
                    BoundaryConditionKind::TractionFree,
                    BoundaryConditionKind::SoftClamped,
                    BoundaryConditionKind::SimplySupported,
                ],
            )],
        };
        assert!(fine.is_admissible(&m));
    }

    fn variable(eta: Complex64) -> ImpedanceValue {
        ImpedanceValue::Variable {
            eta: ImpedanceSeries::new(eta, vec![Complex64::new(0.1, 0.0)], 1.0).unwrap(),
        }
    }

    #[test]
    fn class_c_membership() {
        let pair = |zeta, zeta_prime| CornerImpedancePair { zeta, zeta_prime };
        assert!(pair(ImpedanceValue::Zero, ImpedanceValue::Infinite).in_class_c());
        assert!(pair(variable(Complex64::new(0.5, 2.0)), ImpedanceValue::Zero).in_class_c());
        assert!(!pair(variable(Complex64::new(0.5, 1.0)), ImpedanceValue::Zero).in_class_c());
        assert!(!pair(ImpedanceValue::Infinite, variable(Complex64::new(0.5, 0.0))).in_class_c());
        assert!(
            !pair(
                ImpedanceValue::Infinite,
                variable(Complex64::new(0.5, -2.0))
            )
            .in_class_c()
        );
        assert!(
            pair(
                variable(Complex64::new(0.5, 2.0)),
                variable(Complex64::new(0.5, 2.0))
            )
            .in_class_c()
        );
        assert!(
            !pair(
                variable(Complex64::new(0.5, 2.0)),
                variable(Complex64::new(0.5, 3.0))
            )
            .in_class_c()
        );
    }

    #[test]
    fn corner_pairs_follow_the_boundary() {
        let mut poly = rigid_square([0.0, 0.0]);
        poly.edges[0] = ObstacleEdge {
            pieces: vec![
                ConditionPiece::from_kind(&impedance(Complex64::new(0.0, 2.0)), 0.0, 0.5),
                ConditionPiece::from_kind(&BoundaryConditionKind::TractionFree, 0.5, 1.0),
            ],
        };
        let pairs = poly.corner_pairs();
        assert_eq!(pairs.len(), 4);
        assert_eq!(pairs[0].zeta, ImpedanceValue::Infinite);
        assert_eq!(
            pairs[0].zeta_prime.constant_part(),
            Some(Complex64::new(0.0, 2.0))
        );
        assert_eq!(pairs[1].zeta, ImpedanceValue::Zero);
        let o = PolygonalObstacle {
            components: vec![poly],
        };
        assert!(o.in_class_c());
        assert!(o.is_admissible(&LameMedium::reference()));
    }

    #[test]
    fn grating_profiles() {
        let m = LameMedium::reference();
        let g = PolygonalGrating {
            vertices: vec![[0.0, 0.0], [PI, 0.7], [2.0 * PI, 0.0]],
            edges: vec![
                ObstacleEdge::uniform(&BoundaryConditionKind::Rigid),
                ObstacleEdge::uniform(&impedance(Complex64::new(0.3, 0.4))),
            ],
        };
        assert!(g.is_admissible(&m));
        assert_eq!(g.profile_max(), 0.7);
        let mut tilted = g.clone();
        tilted.vertices[2][1] = 0.2;
        assert!(!tilted.is_admissible(&m));
        let mut folded = g.clone();
        folded.vertices[1][0] = 7.0;
        assert!(!folded.is_admissible(&m));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<PolygonalGrating>(&json).unwrap(), g);
    }
}
