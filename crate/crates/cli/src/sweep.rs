//! Parameter sweeps over one edge length or one vertex strength.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qgtorsion::calculus::{gradient, Gradient};
use qgtorsion::spectral::lambda1;
use qgtorsion::surgery::set_strength;
use qgtorsion::torsion::{classify_positivity, torsional_rigidity, Classification};
use qgtorsion::{Error, MetricGraph, Result};

use crate::output::{num, opt, Table};

pub const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Length,
    Strength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Record {
    T,
    Lambda1,
    /// `λ₁ · T`.
    Product,
    Gradient,
    Positivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: Target,
    pub id: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Geometric instead of uniform spacing.
    #[serde(default)]
    pub log: bool,
    #[serde(default = "default_record")]
    pub record: Vec<Record>,
}

fn default_record() -> Vec<Record> {
    vec![Record::T]
}

impl SweepSpec {
    fn check(&self, g: &MetricGraph) -> Result<()> {
        let bad = |msg: String| Err(Error::Parse(format!("sweep: {msg}")));
        if self.from >= self.to || !self.from.is_finite() || !self.to.is_finite() {
            return bad(format!(
                "need finite from < to, got {} and {}",
                self.from, self.to
            ));
        }
        if !(2..=MAX_STEPS).contains(&self.steps) {
            return bad(format!(
                "steps must lie in 2..={MAX_STEPS}, got {}",
                self.steps
            ));
        }
        if self.log && self.from <= 0.0 {
            return bad("log spacing needs from > 0".into());
        }
        match self.target {
            Target::Length => {
                g.edge(&self.id)
                    .ok_or_else(|| Error::UnknownEdge(self.id.clone()))?;
                if self.from <= 0.0 {
                    return bad("edge lengths must stay positive".into());
                }
            }
            Target::Strength => {
                let v = g
                    .vertex(&self.id)
                    .ok_or_else(|| Error::UnknownVertex(self.id.clone()))?;
                if v.condition.is_dirichlet() {
                    return Err(Error::DirichletUnsupported(self.id.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let s = i as f64 / last;
                if i + 1 == self.steps {
                    self.to
                } else if self.log {
                    self.from * (self.to / self.from).powf(s)
                } else {
                    self.from + s * (self.to - self.from)
                }
            })
            .collect()
    }

    fn apply(&self, g: &MetricGraph, x: f64) -> Result<MetricGraph> {
        match self.target {
            Target::Strength => set_strength(g, &self.id, x),
            Target::Length => {
                let mut out = g.clone();
                out.edges
                    .iter_mut()
                    .find(|e| e.id.as_str() == self.id)
                    .expect("checked")
                    .length = x;
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Gradient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<Classification>,
    /// First failure met on this row; the other cells stay empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn evaluate(
    spec: &SweepSpec,
    g: &MetricGraph,
    index: usize,
    value: f64,
    target_error: f64,
) -> SweepRow {
    let mut row = SweepRow {
        index,
        value,
        rigidity: None,
        lambda1: None,
        lambda1_error: None,
        product: None,
        gradient: None,
        positivity: None,
        error: None,
    };
    let fill = |row: &mut SweepRow| -> Result<()> {
        let h = spec.apply(g, value)?;
        let wants = |r: Record| spec.record.contains(&r);
        if wants(Record::Positivity) {
            row.positivity = Some(classify_positivity(&h)?.classification);
        }
        if wants(Record::T) || wants(Record::Product) {
            row.rigidity = Some(torsional_rigidity(&h)?);
        }
        if wants(Record::Lambda1) || wants(Record::Product) {
            let r = lambda1(&h, target_error)?;
            row.lambda1 = Some(r.lambda1_refined);
            row.lambda1_error = Some(r.error_estimate);
        }
        if wants(Record::Product) {
            row.product = row.lambda1.zip(row.rigidity).map(|(l, t)| l * t);
        }
        if wants(Record::Gradient) {
            row.gradient = Some(gradient(&h)?);
        }
        Ok(())
    };
    if let Err(e) = fill(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

/// Rows are evaluated in parallel and returned in index order.
pub fn run(g: &MetricGraph, spec: &SweepSpec, target_error: f64) -> Result<Vec<SweepRow>> {
    spec.check(g)?;
    let values = spec.values();
    Ok(values
        .par_iter()
        .enumerate()
        .map(|(i, &x)| evaluate(spec, g, i, x, target_error))
        .collect())
}

pub fn table(g: &MetricGraph, spec: &SweepSpec, rows: &[SweepRow]) -> Table {
    let param = match spec.target {
        Target::Length => format!("length[{}]", spec.id),
        Target::Strength => format!("strength[{}]", spec.id),
    };
    let mut header = vec!["index".to_string(), param];
    let wants = |r: Record| spec.record.contains(&r);
    if wants(Record::T) || wants(Record::Product) {
        header.push("rigidity".into());
    }
    if wants(Record::Lambda1) || wants(Record::Product) {
        header.extend(["lambda1".into(), "lambda1_error".into()]);
    }
    if wants(Record::Product) {
        header.push("product".into());
    }
    let edge_ids: Vec<String> = g.edges.iter().map(|e| e.id.to_string()).collect();
    let vertex_ids: Vec<String> = g
        .vertices
        .iter()
        .filter(|v| !v.condition.is_dirichlet())
        .map(|v| v.id.to_string())
        .collect();
    if wants(Record::Gradient) {
        header.extend(edge_ids.iter().map(|e| format!("dT/dlength[{e}]")));
        header.extend(vertex_ids.iter().map(|v| format!("dT/dstrength[{v}]")));
    }
    if wants(Record::Positivity) {
        header.push("positivity".into());
    }
    header.push("error".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for r in rows {
        let mut cells = vec![r.index.to_string(), num(r.value)];
        if wants(Record::T) || wants(Record::Product) {
            cells.push(opt(r.rigidity));
        }
        if wants(Record::Lambda1) || wants(Record::Product) {
            cells.extend([opt(r.lambda1), opt(r.lambda1_error)]);
        }
        if wants(Record::Product) {
            cells.push(opt(r.product));
        }
        if wants(Record::Gradient) {
            let grad = r.gradient.as_ref();
            cells.extend(
                edge_ids
                    .iter()
                    .map(|e| opt(grad.and_then(|x| x.d_by_length.get(e.as_str()).copied()))),
            );
            cells.extend(
                vertex_ids
                    .iter()
                    .map(|v| opt(grad.and_then(|x| x.d_by_strength.get(v.as_str()).copied()))),
            );
        }
        if wants(Record::Positivity) {
            cells.push(
                r.positivity
                    .map(|c| classification_name(c).to_string())
                    .unwrap_or_default(),
            );
        }
        cells.push(r.error.clone().unwrap_or_default());
        t.push(cells);
    }
    t
}

pub fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::PositiveTorsion => "positive_torsion",
        Classification::TorsionExistsNotPositive => "torsion_exists_not_positive",
        Classification::NoTorsion => "no_torsion",
    }
}
