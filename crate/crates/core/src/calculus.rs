//! Derivatives of the torsional rigidity with respect to edge lengths and
//! vertex strengths, plus a finite-difference cross-check.
//!
//! With `v` the torsion function, `∂T/∂l_e = 2v(x) + v'(x)²` for any point
//! `x` of `e` (the expression is constant along the edge because `-v'' = 1`)
//! and `∂T/∂α_v = -v(v)²`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::MetricGraph;
use crate::surgery::set_strength;
use crate::torsion::{solve_torsion, torsional_rigidity, EdgePiece, TorsionFunction};
use crate::{EdgeId, Error, Result, VertexCondition, VertexId};

/// Relative spread allowed between the three evaluation points.
const POINT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Gradient {
    pub d_by_length: BTreeMap<EdgeId, f64>,
    /// δ-vertices only; Dirichlet vertices have no entry.
    pub d_by_strength: BTreeMap<VertexId, f64>,
}

fn length_derivative(p: &EdgePiece, l: f64) -> Result<f64> {
    let at = |x: f64| 2.0 * p.value(x) + p.derivative(x).powi(2);
    let vals = [at(0.0), at(l / 2.0), at(l)];
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let size = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if hi - lo > POINT_TOLERANCE * size.max(f64::MIN_POSITIVE) {
        return Err(Error::PointDependence {
            edge: p.id.to_string(),
            spread: hi - lo,
        });
    }
    Ok(vals[0])
}

fn gradient_of(t: &TorsionFunction, g: &MetricGraph) -> Result<Gradient> {
    let mut d_by_length = BTreeMap::new();
    for e in &g.edges {
        let p = t
            .piece(e.id.as_str())
            .ok_or_else(|| Error::UnknownEdge(e.id.to_string()))?;
        d_by_length.insert(e.id.clone(), length_derivative(p, e.length)?);
    }
    let d_by_strength = g
        .vertices
        .iter()
        .filter(|v| !v.condition.is_dirichlet())
        .map(|v| {
            let x = t.at_vertex(v.id.as_str()).unwrap_or(0.0);
            (v.id.clone(), -x * x)
        })
        .collect();
    Ok(Gradient {
        d_by_length,
        d_by_strength,
    })
}

/// `∂T/∂l_e`, evaluated at the tail and confirmed at the midpoint and head.
pub fn dt_dlength(g: &MetricGraph, edge: &str) -> Result<f64> {
    let e = g
        .edge(edge)
        .ok_or_else(|| Error::UnknownEdge(edge.into()))?;
    let t = solve_torsion(g)?;
    length_derivative(t.piece(edge).expect("solver covers every edge"), e.length)
}

/// `∂T/∂α_v = -v(v)²` at a δ-vertex.
pub fn dt_dstrength(g: &MetricGraph, vertex: &str) -> Result<f64> {
    let v = g
        .vertex(vertex)
        .ok_or_else(|| Error::UnknownVertex(vertex.into()))?;
    if v.condition.is_dirichlet() {
        return Err(Error::DirichletUnsupported(vertex.into()));
    }
    let t = solve_torsion(g)?;
    let x = t.at_vertex(vertex).unwrap_or(0.0);
    Ok(-x * x)
}

/// Both derivative maps from a single solve.
pub fn gradient(g: &MetricGraph) -> Result<Gradient> {
    let t = solve_torsion(g)?;
    gradient_of(&t, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Length,
    Strength,
}

/// One analytic-versus-numeric comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdRow {
    pub parameter: Parameter,
    pub id: String,
    pub analytic: f64,
    pub numeric: f64,
    pub step: f64,
    pub relative_error: f64,
}

fn with_length(g: &MetricGraph, k: usize, l: f64) -> MetricGraph {
    let mut out = g.clone();
    out.edges[k].length = l;
    out
}

/// Central differences of the rigidity with step `rel_step` times the
/// parameter scale (the edge length, or `max(|α|, 1/|G|)` for strengths).
pub fn fd_check(g: &MetricGraph, rel_step: f64) -> Result<Vec<FdRow>> {
    let grad = gradient(g)?;
    let mut rows = Vec::new();
    let row = |parameter, id: String, analytic: f64, plus: f64, minus: f64, step: f64| {
        let numeric = (plus - minus) / (2.0 * step);
        let relative_error = (numeric - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE);
        FdRow {
            parameter,
            id,
            analytic,
            numeric,
            step,
            relative_error,
        }
    };
    for (k, e) in g.edges.iter().enumerate() {
        let h = rel_step * e.length;
        let plus = torsional_rigidity(&with_length(g, k, e.length + h))?;
        let minus = torsional_rigidity(&with_length(g, k, e.length - h))?;
        rows.push(row(
            Parameter::Length,
            e.id.to_string(),
            grad.d_by_length[&e.id],
            plus,
            minus,
            h,
        ));
    }
    let inv_len = 1.0 / g.total_length();
    for v in &g.vertices {
        let VertexCondition::Delta(alpha) = v.condition else {
            continue;
        };
        let h = rel_step * alpha.abs().max(inv_len);
        let plus = torsional_rigidity(&set_strength(g, v.id.as_str(), alpha + h)?)?;
        let minus = torsional_rigidity(&set_strength(g, v.id.as_str(), alpha - h)?)?;
        rows.push(row(
            Parameter::Strength,
            v.id.to_string(),
            grad.d_by_strength[&v.id],
            plus,
            minus,
            h,
        ));
    }
    Ok(rows)
}
