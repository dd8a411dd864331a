//! Two-sided bounds on the torsional rigidity for non-negative strengths,
//! the eigenvalue product bound and the Kohler-Jobin explorer.
//!
//! Every record is oriented as `lhs ≤ rhs` with `margin = rhs - lhs`, and it
//! passes when `margin ≥ -1e-9 · max(|lhs|, |rhs|)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::graph::{is_connected, is_doubly_connected, summarize, MetricGraph, Topology};
use crate::spectral::{lambda1, secular_lambda1_interval};
use crate::torsion::torsional_rigidity;
use crate::{Error, Result};

/// Relative roundoff allowance for a pass.
pub const PASS_TOLERANCE: f64 = 1e-9;
/// Relative distance below which a record counts as saturated.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// `rhs - lhs`; non-negative means the inequality holds.
    pub margin: Option<f64>,
    pub tolerance: f64,
    /// `None` when the record is informational.
    pub pass: Option<bool>,
    pub hypothesis_ok: bool,
    /// The graph is one of the documented extremizers of this bound.
    pub equality_case: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundRecord {
    fn evaluated(name: &str, lhs: f64, rhs: f64, equality_case: bool) -> Self {
        let margin = rhs - lhs;
        let tolerance = PASS_TOLERANCE * lhs.abs().max(rhs.abs());
        BoundRecord {
            name: name.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            tolerance,
            pass: Some(margin >= -tolerance),
            hypothesis_ok: true,
            equality_case,
            note: None,
        }
    }

    fn informational(name: &str, err: &Error) -> Self {
        BoundRecord {
            name: name.into(),
            lhs: None,
            rhs: None,
            margin: None,
            tolerance: 0.0,
            pass: None,
            hypothesis_ok: false,
            equality_case: false,
            note: Some(err.to_string()),
        }
    }

    /// `|margin| ≤ EQUALITY_TOLERANCE · max(|lhs|, |rhs|)`.
    pub fn saturated(&self) -> bool {
        match (self.lhs, self.rhs, self.margin) {
            (Some(l), Some(r), Some(m)) => m.abs() <= EQUALITY_TOLERANCE * l.abs().max(r.abs()),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub total_length: f64,
    pub total_strength: f64,
    pub rigidity: Option<f64>,
    pub records: Vec<BoundRecord>,
}

impl BoundsReport {
    /// No record with a satisfied hypothesis fails.
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass != Some(false))
    }
}

/// Non-negative strengths, not all zero, no Dirichlet vertex, connected.
fn check_hypotheses(g: &MetricGraph) -> Result<f64> {
    Topology::new(g)?;
    if g.has_dirichlet() {
        return Err(Error::HypothesisViolated(
            "the bound is stated for δ-conditions only".into(),
        ));
    }
    if g.strengths().any(|a| a < 0.0) {
        return Err(Error::HypothesisViolated(
            "strengths must be non-negative".into(),
        ));
    }
    let total: f64 = g.strengths().sum();
    if !(total > 0.0) {
        return Err(Error::HypothesisViolated(
            "strengths must not all vanish".into(),
        ));
    }
    if !is_connected(g, false) {
        return Err(Error::NotConnected);
    }
    Ok(total)
}

/// One vertex carrying every edge as a loop.
pub fn is_flower(g: &MetricGraph) -> bool {
    g.vertices.len() == 1 && g.edges.iter().all(|e| e.is_loop())
}

fn all_equal(xs: impl Iterator<Item = f64>) -> bool {
    let xs: Vec<f64> = xs.collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    hi - lo <= 1e-12 * hi.abs()
}

/// Strength concentrated on the vertex with index `at`.
fn concentrated_at(g: &MetricGraph, at: usize, total: f64) -> bool {
    g.vertices.iter().enumerate().all(|(i, v)| {
        i == at
            || v.condition
                .strength()
                .is_some_and(|a| a.abs() <= 1e-15 * total)
    })
}

/// A path whose whole strength sits at one of its two end vertices.
pub fn is_concentrated_path(g: &MetricGraph) -> bool {
    let Ok(topo) = Topology::new(g) else {
        return false;
    };
    let deg = topo.degrees(g.vertices.len());
    let total: f64 = g.strengths().sum();
    let is_path = g.edges.len() + 1 == g.vertices.len()
        && !g.edges.iter().any(|e| e.is_loop())
        && deg.iter().all(|&d| (1..=2).contains(&d))
        && is_connected(g, false);
    is_path && (0..g.vertices.len()).any(|i| deg[i] == 1 && concentrated_at(g, i, total))
}

/// A cycle (possibly a single loop) whose whole strength sits at one vertex.
pub fn is_concentrated_cycle(g: &MetricGraph) -> bool {
    let Ok(topo) = Topology::new(g) else {
        return false;
    };
    let deg = topo.degrees(g.vertices.len());
    let total: f64 = g.strengths().sum();
    let is_cycle =
        g.edges.len() == g.vertices.len() && deg.iter().all(|&d| d == 2) && is_connected(g, false);
    is_cycle && (0..g.vertices.len()).any(|i| concentrated_at(g, i, total))
}

/// `|G|³/(12|E|²) + |G|²/|α|₁ ≤ T`; saturated by equilateral flowers.
pub fn flower_lower_bound(g: &MetricGraph) -> Result<BoundRecord> {
    let alpha = check_hypotheses(g)?;
    let len = g.total_length();
    let m = g.edges.len() as f64;
    let bound = len.powi(3) / (12.0 * m * m) + len * len / alpha;
    let equality = is_flower(g) && all_equal(g.edges.iter().map(|e| e.length));
    Ok(BoundRecord::evaluated(
        "flower_lower_bound",
        bound,
        torsional_rigidity(g)?,
        equality,
    ))
}

/// `Σ l³/12 + |G|²/|α|₁ ≤ T`, the rigidity of the flower with the same edges;
/// saturated by every flower.
pub fn flower_lower_bound_by_lengths(g: &MetricGraph) -> Result<BoundRecord> {
    let alpha = check_hypotheses(g)?;
    let len = g.total_length();
    let cubes: f64 = g.edges.iter().map(|e| e.length.powi(3)).sum();
    let bound = cubes / 12.0 + len * len / alpha;
    Ok(BoundRecord::evaluated(
        "flower_lower_bound_by_lengths",
        bound,
        torsional_rigidity(g)?,
        is_flower(g),
    ))
}

/// `T ≤ |G|³/3 + |G|²/|α|₁`; saturated by a path with all strength at one end.
pub fn saint_venant_upper_bound(g: &MetricGraph) -> Result<BoundRecord> {
    let alpha = check_hypotheses(g)?;
    let len = g.total_length();
    let bound = len.powi(3) / 3.0 + len * len / alpha;
    Ok(BoundRecord::evaluated(
        "saint_venant_upper_bound",
        torsional_rigidity(g)?,
        bound,
        is_concentrated_path(g),
    ))
}

/// `T ≤ 2 T(J, {|α|₁/2, 0}) = |G|³/12 + |G|²/|α|₁` with `J` of length `|G|/2`,
/// for bridgeless graphs; saturated by a cycle with all strength at one
/// vertex.
pub fn doubly_connected_upper_bound(g: &MetricGraph) -> Result<BoundRecord> {
    let alpha = check_hypotheses(g)?;
    if !is_doubly_connected(g)? {
        return Err(Error::NotDoublyConnected);
    }
    let half = g.total_length() / 2.0;
    let bound = 2.0 * (half.powi(3) / 3.0 + half * half / (alpha / 2.0));
    Ok(BoundRecord::evaluated(
        "doubly_connected_upper_bound",
        torsional_rigidity(g)?,
        bound,
        is_concentrated_cycle(g),
    ))
}

/// Eigenvalue tolerances tried in turn by [`eigenvalue_product_bound`].
const PRODUCT_TARGETS: [f64; 3] = [1e-6, 1e-8, 1e-10];

/// `λ₁ T < |G|`. The eigenvalue is refined until the margin exceeds ten
/// times its error estimate times `T`; otherwise
/// [`Error::InconclusiveAccuracy`].
pub fn eigenvalue_product_bound(g: &MetricGraph) -> Result<BoundRecord> {
    check_hypotheses(g)?;
    let t = torsional_rigidity(g)?;
    let len = g.total_length();
    let mut last = (0.0, 0.0);
    for target in PRODUCT_TARGETS {
        let r = lambda1(g, target)?;
        let product = r.lambda1_refined * t;
        let margin = len - product;
        let needed = 10.0 * r.error_estimate * t;
        if margin > needed {
            let mut rec = BoundRecord::evaluated("eigenvalue_product_bound", product, len, false);
            rec.pass = Some(true);
            rec.note = Some(format!(
                "lambda1 = {:.12e} ± {:.1e}",
                r.lambda1_refined, r.error_estimate
            ));
            return Ok(rec);
        }
        if margin < -needed {
            let mut rec = BoundRecord::evaluated("eigenvalue_product_bound", product, len, false);
            rec.pass = Some(false);
            return Ok(rec);
        }
        last = (margin, r.error_estimate * t);
    }
    Err(Error::InconclusiveAccuracy {
        margin: last.0,
        error: last.1,
    })
}

/// Evaluates every bound; failed hypotheses give informational records.
pub fn bounds_report(g: &MetricGraph) -> Result<BoundsReport> {
    Topology::new(g)?;
    let summary = summarize(g);
    let rigidity = torsional_rigidity(g).ok();
    type BoundFn = fn(&MetricGraph) -> Result<BoundRecord>;
    let all: [(&str, BoundFn); 5] = [
        ("flower_lower_bound", flower_lower_bound),
        (
            "flower_lower_bound_by_lengths",
            flower_lower_bound_by_lengths,
        ),
        ("saint_venant_upper_bound", saint_venant_upper_bound),
        ("doubly_connected_upper_bound", doubly_connected_upper_bound),
        ("eigenvalue_product_bound", eigenvalue_product_bound),
    ];
    let mut records = Vec::with_capacity(all.len());
    for (name, f) in all {
        match f(g) {
            Ok(r) => records.push(r),
            Err(
                e @ (Error::HypothesisViolated(_)
                | Error::NotDoublyConnected
                | Error::NotConnected
                | Error::NoTorsion { .. }),
            ) => records.push(BoundRecord::informational(name, &e)),
            Err(e) => return Err(e),
        }
    }
    Ok(BoundsReport {
        total_length: summary.total_length,
        total_strength: summary.total_strength,
        rigidity,
        records,
    })
}

/// `(π / ∛24)²`, the Dirichlet-Kirchhoff constant the proxy tends to.
pub fn kohler_jobin_limit() -> f64 {
    (PI / 24f64.cbrt()).powi(2)
}

/// `π²α / (|J| (π² + 4α|J|)) · (|J|³/3 + |J|²/α)^{2/3}`.
pub fn kohler_jobin_proxy(length: f64, alpha: f64) -> f64 {
    let pi2 = PI * PI;
    pi2 * alpha / (length * (pi2 + 4.0 * alpha * length))
        * interval_rigidity(length, alpha).powf(2.0 / 3.0)
}

/// `π²α / (∛9 (π² + 4α))`.
pub fn kohler_jobin_constrained(alpha: f64) -> f64 {
    let pi2 = PI * PI;
    pi2 * alpha / (9f64.cbrt() * (pi2 + 4.0 * alpha))
}

/// Rigidity of `[0, length]` with strength `alpha` at one end and a
/// Kirchhoff end.
fn interval_rigidity(length: f64, alpha: f64) -> f64 {
    length.powi(3) / 3.0 + length * length / alpha
}

/// One (length, strength) row of the exploratory Kohler-Jobin table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KohlerJobinRow {
    pub length: f64,
    pub alpha: f64,
    pub lambda1: f64,
    pub rigidity: f64,
    /// `λ₁ T^{2/3}`.
    pub product: f64,
    pub proxy: f64,
    pub proxy_below_product: bool,
    /// Only for `length ≥ 1`.
    pub constrained_bound: Option<f64>,
    pub constrained_holds: Option<bool>,
}

/// Exploratory table over all pairs; the intervals carry `alpha` at one end
/// and a Kirchhoff condition at the other.
pub fn kohler_jobin_explorer(lengths: &[f64], alphas: &[f64]) -> Result<Vec<KohlerJobinRow>> {
    let mut rows = Vec::with_capacity(lengths.len() * alphas.len());
    for &length in lengths {
        for &alpha in alphas {
            rows.push(kohler_jobin_row(length, alpha)?);
        }
    }
    Ok(rows)
}

pub fn kohler_jobin_row(length: f64, alpha: f64) -> Result<KohlerJobinRow> {
    if !(length > 0.0 && alpha > 0.0 && length.is_finite() && alpha.is_finite()) {
        return Err(Error::HypothesisViolated(format!(
            "need length > 0 and alpha > 0, got ({length}, {alpha})"
        )));
    }
    let lambda1 = secular_lambda1_interval(length, alpha, 0.0)?;
    let rigidity = interval_rigidity(length, alpha);
    let product = lambda1 * rigidity.powf(2.0 / 3.0);
    let proxy = kohler_jobin_proxy(length, alpha);
    let slack = 1e-12 * product.abs();
    let constrained_bound = (length >= 1.0).then(|| kohler_jobin_constrained(alpha));
    Ok(KohlerJobinRow {
        length,
        alpha,
        lambda1,
        rigidity,
        product,
        proxy,
        proxy_below_product: proxy <= product + slack,
        constrained_bound,
        constrained_holds: constrained_bound.map(|b| b <= product + slack),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexCondition::{Delta, Dirichlet};

    #[test]
    fn equilateral_flower_saturates() {
        let r = flower_lower_bound(&MetricGraph::flower(&[0.5; 4], 2.0)).unwrap();
        assert!(r.equality_case && r.saturated() && r.pass == Some(true));
    }

    #[test]
    fn uneven_flower() {
        let g = MetricGraph::flower(&[0.5, 1.0, 2.0], 2.0);
        let by_count = flower_lower_bound(&g).unwrap();
        assert!(!by_count.equality_case && by_count.margin.unwrap() > 1e-3);
        let by_lengths = flower_lower_bound_by_lengths(&g).unwrap();
        assert!(by_lengths.equality_case && by_lengths.saturated());
    }

    #[test]
    fn tree_strictly_above_flower() {
        let g = MetricGraph::new()
            .with_vertex("c", Delta(0.5))
            .with_vertex("a", Delta(1.0))
            .with_vertex("b", Delta(0.0))
            .with_vertex("d", Delta(0.2))
            .with_edge("e0", "c", "a", 1.0)
            .with_edge("e1", "c", "b", 0.5)
            .with_edge("e2", "c", "d", 2.0);
        let r = flower_lower_bound(&g).unwrap();
        assert!(r.pass == Some(true) && r.margin.unwrap() > 0.0);
        let s = saint_venant_upper_bound(&g).unwrap();
        assert!(s.pass == Some(true) && s.margin.unwrap() > 0.0 && !s.equality_case);
    }

    #[test]
    fn saint_venant_equality_on_path() {
        let g = MetricGraph::path(&[0.4, 1.1], &[Delta(0.0), Delta(0.0), Delta(2.5)]);
        let r = saint_venant_upper_bound(&g).unwrap();
        assert!(r.equality_case && r.saturated());
        let split = saint_venant_upper_bound(&MetricGraph::interval(1.5, 1.25, 1.25)).unwrap();
        assert!(!split.equality_case && split.margin.unwrap() > 1e-3);
        let circle = saint_venant_upper_bound(&MetricGraph::flower(&[1.5], 2.5)).unwrap();
        assert!(circle.margin.unwrap() > 1e-3);
    }

    #[test]
    fn circle_saturates_doubly_connected_bound() {
        let (l, a) = (2.0, 0.8);
        let g = MetricGraph::flower(&[l], a);
        let r = doubly_connected_upper_bound(&g).unwrap();
        assert!(r.equality_case && r.saturated());
        assert!((r.rhs.unwrap() - (l.powi(3) / 12.0 + l * l / a)).abs() < 1e-12);
        // the same cycle drawn with three vertices
        let tri = MetricGraph::new()
            .with_vertex("a", Delta(a))
            .with_vertex("b", Delta(0.0))
            .with_vertex("c", Delta(0.0))
            .with_edge("e0", "a", "b", 0.5)
            .with_edge("e1", "b", "c", 0.7)
            .with_edge("e2", "c", "a", 0.8);
        let r = doubly_connected_upper_bound(&tri).unwrap();
        assert!(r.equality_case && r.saturated());
    }

    #[test]
    fn figure_eight_and_interval() {
        let r = doubly_connected_upper_bound(&MetricGraph::flower(&[1.0, 1.0], 1.0)).unwrap();
        assert!(r.pass == Some(true) && r.margin.unwrap() > 1e-3);
        assert!(matches!(
            doubly_connected_upper_bound(&MetricGraph::interval(1.0, 1.0, 0.0)),
            Err(Error::NotDoublyConnected)
        ));
    }

    #[test]
    fn hypotheses() {
        let neg = MetricGraph::interval(1.0, -1.0, 3.0);
        assert!(matches!(
            saint_venant_upper_bound(&neg),
            Err(Error::HypothesisViolated(_))
        ));
        let zero = MetricGraph::interval(1.0, 0.0, 0.0);
        assert!(matches!(
            flower_lower_bound(&zero),
            Err(Error::HypothesisViolated(_))
        ));
        let dir = MetricGraph::path(&[1.0], &[Dirichlet, Delta(1.0)]);
        assert!(matches!(
            flower_lower_bound(&dir),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn product_bound_on_unit_interval() {
        let r = eigenvalue_product_bound(&MetricGraph::interval(1.0, 1.0, 0.0)).unwrap();
        assert!((r.lhs.unwrap() - 0.9868985125265638).abs() < 1e-7);
        assert_eq!(r.pass, Some(true));
    }

    #[test]
    fn report_marks_informational_records() {
        let rep = bounds_report(&MetricGraph::interval(1.0, 1.0, 0.0)).unwrap();
        let dc = rep
            .records
            .iter()
            .find(|r| r.name == "doubly_connected_upper_bound")
            .unwrap();
        assert!(!dc.hypothesis_ok && dc.pass.is_none());
        assert!(rep.all_pass());
        let sv = rep
            .records
            .iter()
            .find(|r| r.name == "saint_venant_upper_bound")
            .unwrap();
        assert!(sv.equality_case && sv.saturated());
    }

    #[test]
    fn kohler_jobin_values() {
        assert!((kohler_jobin_limit() - 1.1862027255479362).abs() < 1e-15);
        assert!((kohler_jobin_proxy(1.0, 1e6) - kohler_jobin_limit()).abs() < 1e-4);
        let row = kohler_jobin_row(1.0, 1.0).unwrap();
        assert!(row.proxy_below_product);
        let row = kohler_jobin_row(2.0, 5.0).unwrap();
        assert_eq!(row.constrained_holds, Some(true));
        assert!(kohler_jobin_row(0.5, 1.0)
            .unwrap()
            .constrained_bound
            .is_none());
    }
}
