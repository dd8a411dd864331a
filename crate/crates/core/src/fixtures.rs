//! Curated graphs with machine-checkable expected values.
//!
//! Each fixture is a canonical graph JSON file plus an entry in
//! `manifest.json` listing expectations. Every expectation carries its
//! provenance: a value printed in the reference text, a trivial consequence
//! of the definitions, or a value derived by an independent oracle. When the
//! printed number disagrees with the oracle, both are stored and the oracle
//! value is the one checked.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::graph::MetricGraph;
use crate::spectral::lambda1;
use crate::torsion::{classify_positivity, solve_torsion, torsional_rigidity, Classification};
use crate::{Error, Result};

/// Relative tolerance for rigidity and vertex-value checks.
pub const FIXTURE_TOLERANCE: f64 = 1e-9;

const MANIFEST: &str = include_str!("../fixtures/manifest.json");

macro_rules! fixture_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".json")))),*]
    };
}

const GRAPHS: &[(&str, &str)] = fixture_files!(
    "signed-path-zero-sum",
    "signed-path-negative-ground",
    "interval-kirchhoff-end",
    "interval-one-negative",
    "flower",
    "equilateral-flower",
    "concentrated-circle",
    "concentrated-path",
    "insert-before",
    "insert-after",
    "insert-after-alternative",
    "unfold-pendants",
    "unfold-unfolded",
    "unfold-limit",
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Printed in the reference text.
    Reference { source: String },
    /// Follows directly from the definitions.
    Trivial { reason: String },
    /// Computed by the named independent oracle.
    Derived { oracle: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    Rigidity {
        value: f64,
        exact: String,
    },
    VertexValue {
        vertex: String,
        value: f64,
        exact: String,
    },
    Classification {
        value: Classification,
    },
    /// The first eigenvalue of the Laplacian is negative.
    Lambda1Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub quantity: Quantity,
    pub provenance: Provenance,
    /// The number printed in the reference text when it differs from `value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct ManifestEntry {
    name: String,
    graph: String,
    description: String,
    expectations: Vec<Expectation>,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    fixtures: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub graph: MetricGraph,
    /// Canonical JSON text of the graph file.
    #[serde(skip)]
    pub graph_json: &'static str,
    pub expectations: Vec<Expectation>,
}

fn manifest() -> Manifest {
    serde_json::from_str(MANIFEST).expect("bundled manifest is valid JSON")
}

/// Fixture names in manifest order.
pub fn names() -> Vec<String> {
    manifest().fixtures.into_iter().map(|f| f.name).collect()
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let entry = manifest()
        .fixtures
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.into()))?;
    let stem = entry.graph.trim_end_matches(".json");
    let (_, text) = GRAPHS
        .iter()
        .find(|(n, _)| *n == stem)
        .ok_or_else(|| Error::UnknownFixture(entry.graph.clone()))?;
    Ok(Fixture {
        name: entry.name,
        description: entry.description,
        graph: MetricGraph::from_json(text)?,
        graph_json: text,
        expectations: entry.expectations,
    })
}

pub fn all_fixtures() -> Result<Vec<Fixture>> {
    names().iter().map(|n| load_fixture(n)).collect()
}

/// Result of checking one expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub fixture: String,
    pub quantity: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
    /// Set when the printed value differs from the checked one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<String>,
}

fn close(observed: f64, expected: f64) -> bool {
    (observed - expected).abs() <= FIXTURE_TOLERANCE * expected.abs().max(1e-3)
}

/// Runs the solvers on the fixture graph and compares every expectation.
pub fn check_fixture(f: &Fixture) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::with_capacity(f.expectations.len());
    for e in &f.expectations {
        let (quantity, expected, observed, pass) = match &e.quantity {
            Quantity::Rigidity { value, .. } => {
                let t = torsional_rigidity(&f.graph)?;
                (
                    "rigidity".to_string(),
                    json!(value),
                    json!(t),
                    close(t, *value),
                )
            }
            Quantity::VertexValue { vertex, value, .. } => {
                let t = solve_torsion(&f.graph)?;
                let x = t
                    .at_vertex(vertex)
                    .ok_or_else(|| Error::UnknownVertex(vertex.clone()))?;
                (
                    format!("vertex_value[{vertex}]"),
                    json!(value),
                    json!(x),
                    close(x, *value),
                )
            }
            Quantity::Classification { value } => {
                let c = classify_positivity(&f.graph)?.classification;
                (
                    "classification".to_string(),
                    json!(value),
                    json!(c),
                    c == *value,
                )
            }
            Quantity::Lambda1Negative => {
                let (observed, pass) = match lambda1(&f.graph, 1e-6) {
                    Ok(r) => (
                        json!(r.lambda1_refined),
                        r.lambda1_refined + r.error_estimate < 0.0,
                    ),
                    Err(Error::NegativeGroundState) => (json!("negative"), true),
                    Err(e) => return Err(e),
                };
                (
                    "lambda1_negative".to_string(),
                    json!("negative"),
                    observed,
                    pass,
                )
            }
        };
        let discrepancy = e.printed.map(|p| {
            format!(
                "printed {p} differs from the checked value {expected}{}",
                e.note
                    .as_deref()
                    .map(|n| format!(": {n}"))
                    .unwrap_or_default()
            )
        });
        out.push(CheckOutcome {
            fixture: f.name.clone(),
            quantity,
            expected,
            observed,
            pass,
            discrepancy,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_manifest_entry_loads() {
        let all = all_fixtures().unwrap();
        assert_eq!(all.len(), GRAPHS.len());
        for f in &all {
            assert!(!f.expectations.is_empty(), "{}", f.name);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            load_fixture("nope"),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn graph_files_are_canonical() {
        for f in all_fixtures().unwrap() {
            assert_eq!(f.graph.to_json(), f.graph_json, "{}", f.name);
        }
    }

    #[test]
    fn every_expectation_holds() {
        for f in all_fixtures().unwrap() {
            for c in check_fixture(&f).unwrap() {
                assert!(c.pass, "{c:?}");
            }
        }
    }

    #[test]
    fn printed_discrepancies_are_reported() {
        let f = load_fixture("insert-after").unwrap();
        let c = check_fixture(&f).unwrap();
        assert!(c[0].discrepancy.as_deref().unwrap().contains("0.69696"));
        let f = load_fixture("unfold-limit").unwrap();
        assert!(check_fixture(&f)
            .unwrap()
            .iter()
            .all(|c| c.discrepancy.is_none()));
    }
}
