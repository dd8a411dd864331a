//! Graph transformations with a known effect on the torsional rigidity.
//!
//! Every operation returns a fresh graph. Operations acting on a vertex
//! reject Dirichlet vertices.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{
    is_connected, validate, Edge, MetricGraph, Topology, Vertex, VertexCondition, Violation,
};
use crate::torsion::torsional_rigidity;
use crate::{EdgeId, Error, Result, VertexId};

/// Which end of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Tail,
    Head,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub end: End,
}

impl EdgeEnd {
    pub fn new(edge: &str, end: End) -> Self {
        EdgeEnd {
            edge: edge.into(),
            end,
        }
    }
}

/// Where one edge-end formerly at the insertion vertex is reattached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub edge: EdgeId,
    pub end: End,
    pub vertex: VertexId,
}

/// Strength of the new tip after unfolding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TipRule {
    /// Tip strength 0; the rigidity cannot decrease.
    #[default]
    Zero,
    /// Tip strength equal to the sum of the removed tip strengths; no
    /// monotonicity guarantee.
    Sum,
}

/// A surgery step in its JSON form, tagged by `"op"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SurgerySpec {
    Lengthen {
        edge: EdgeId,
        new_length: f64,
    },
    Scale {
        t: f64,
    },
    Glue {
        v1: VertexId,
        v2: VertexId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        new_id: Option<VertexId>,
    },
    /// Splits `v0` into `v1` (receiving the listed edge-ends) and `v2`
    /// (receiving the rest).
    Cut {
        v0: VertexId,
        v1: VertexId,
        alpha1: f64,
        v2: VertexId,
        alpha2: f64,
        to_v1: Vec<EdgeEnd>,
    },
    Insert {
        at: VertexId,
        graph: MetricGraph,
        attachment: Vec<Attachment>,
    },
    Unfold {
        v0: VertexId,
        pendants: Vec<EdgeId>,
        #[serde(default)]
        tip_rule: TipRule,
    },
    SetStrength {
        v: VertexId,
        alpha: f64,
    },
}

/// Result of [`apply`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applied {
    pub graph: MetricGraph,
    /// For insertion: whether the inserted strengths sum to at most the
    /// strength of the replaced vertex.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis_holds: Option<bool>,
}

pub fn apply(g: &MetricGraph, spec: &SurgerySpec) -> Result<Applied> {
    let plain = |graph| {
        Ok(Applied {
            graph,
            hypothesis_holds: None,
        })
    };
    match spec {
        SurgerySpec::Lengthen { edge, new_length } => {
            plain(lengthen(g, edge.as_str(), *new_length)?)
        }
        SurgerySpec::Scale { t } => plain(scale(g, *t)?),
        SurgerySpec::Glue { v1, v2, new_id } => plain(glue(
            g,
            v1.as_str(),
            v2.as_str(),
            new_id.as_ref().map(|x| x.as_str()),
        )?),
        SurgerySpec::Cut {
            v0,
            v1,
            alpha1,
            v2,
            alpha2,
            to_v1,
        } => plain(cut(
            g,
            v0.as_str(),
            (v1.as_str(), *alpha1),
            (v2.as_str(), *alpha2),
            to_v1,
        )?),
        SurgerySpec::Insert {
            at,
            graph,
            attachment,
        } => {
            let (graph, ok) = insert(g, at.as_str(), graph, attachment)?;
            Ok(Applied {
                graph,
                hypothesis_holds: Some(ok),
            })
        }
        SurgerySpec::Unfold {
            v0,
            pendants,
            tip_rule,
        } => {
            let ids: Vec<&str> = pendants.iter().map(|e| e.as_str()).collect();
            plain(unfold(g, v0.as_str(), &ids, *tip_rule)?)
        }
        SurgerySpec::SetStrength { v, alpha } => plain(set_strength(g, v.as_str(), *alpha)?),
    }
}

fn delta_vertex<'a>(g: &'a MetricGraph, id: &str) -> Result<(usize, &'a Vertex, f64)> {
    let (i, v) = g
        .vertices
        .iter()
        .enumerate()
        .find(|(_, v)| v.id.as_str() == id)
        .ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
    match v.condition {
        VertexCondition::Delta(a) => Ok((i, v, a)),
        VertexCondition::Dirichlet => Err(Error::DirichletUnsupported(id.to_string())),
    }
}

fn checked(g: MetricGraph) -> Result<MetricGraph> {
    let violations = validate(&g);
    if violations.is_empty() {
        Ok(g)
    } else {
        Err(Error::InvalidGraph(violations))
    }
}

fn require_connected(g: &MetricGraph) -> Result<()> {
    if is_connected(g, false) && is_connected(g, g.has_dirichlet()) {
        Ok(())
    } else {
        Err(Error::Disconnects)
    }
}

/// Replaces the length of `edge` by a strictly larger one.
pub fn lengthen(g: &MetricGraph, edge: &str, new_length: f64) -> Result<MetricGraph> {
    let mut out = g.clone();
    let e = out
        .edges
        .iter_mut()
        .find(|e| e.id.as_str() == edge)
        .ok_or_else(|| Error::UnknownEdge(edge.into()))?;
    if !(new_length > e.length) {
        return Err(Error::NotLonger {
            old: e.length,
            new: new_length,
        });
    }
    e.length = new_length;
    checked(out)
}

/// Multiplies every length by `t` and divides every strength by `t`, so that
/// `T(scale(g, t)) = t³ T(g)`.
pub fn scale(g: &MetricGraph, t: f64) -> Result<MetricGraph> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveScale(t));
    }
    let mut out = g.clone();
    for e in &mut out.edges {
        e.length *= t;
    }
    for v in &mut out.vertices {
        if let VertexCondition::Delta(a) = &mut v.condition {
            *a /= t;
        }
    }
    Ok(out)
}

/// Identifies `v1` and `v2`; the merged vertex carries the summed strength,
/// sits at `v1`'s position and is named `new_id` (default: `v1`).
pub fn glue(g: &MetricGraph, v1: &str, v2: &str, new_id: Option<&str>) -> Result<MetricGraph> {
    if v1 == v2 {
        return Err(Error::SameVertex);
    }
    let (i1, _, a1) = delta_vertex(g, v1)?;
    let (_, _, a2) = delta_vertex(g, v2)?;
    let name = new_id.unwrap_or(v1);
    if name != v1 && name != v2 && g.vertex(name).is_some() {
        return Err(Error::IdCollision(name.into()));
    }
    let mut out = MetricGraph::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if i == i1 {
            out.add_vertex(name, VertexCondition::Delta(a1 + a2));
        } else if v.id.as_str() != v2 {
            out.vertices.push(v.clone());
        }
    }
    let rename = |x: &VertexId| {
        if x.as_str() == v1 || x.as_str() == v2 {
            VertexId::from(name)
        } else {
            x.clone()
        }
    };
    out.edges = g
        .edges
        .iter()
        .map(|e| Edge {
            id: e.id.clone(),
            tail: rename(&e.tail),
            head: rename(&e.head),
            length: e.length,
        })
        .collect();
    checked(out)
}

/// Splits `v0` into two vertices. Edge-ends at `v0` listed in `to_v1` move to
/// the first new vertex, all others to the second. The strengths must add up
/// to the strength of `v0` and the result must stay connected.
pub fn cut(
    g: &MetricGraph,
    v0: &str,
    (v1, alpha1): (&str, f64),
    (v2, alpha2): (&str, f64),
    to_v1: &[EdgeEnd],
) -> Result<MetricGraph> {
    let (i0, _, a0) = delta_vertex(g, v0)?;
    let split = alpha1 + alpha2;
    if (split - a0).abs() > 1e-12 * (1.0 + a0.abs().max(alpha1.abs()).max(alpha2.abs())) {
        return Err(Error::StrengthMismatch {
            original: a0,
            split,
        });
    }
    if v1 == v2 {
        return Err(Error::IdCollision(v1.into()));
    }
    for name in [v1, v2] {
        if name != v0 && g.vertex(name).is_some() {
            return Err(Error::IdCollision(name.into()));
        }
    }
    let listed: HashSet<&EdgeEnd> = to_v1.iter().collect();
    for ee in to_v1 {
        let e = g
            .edge(ee.edge.as_str())
            .ok_or_else(|| Error::UnknownEdge(ee.edge.to_string()))?;
        let at = match ee.end {
            End::Tail => &e.tail,
            End::Head => &e.head,
        };
        if at.as_str() != v0 {
            return Err(Error::BadAttachment(format!(
                "{} end of `{}` is not at `{v0}`",
                end_name(ee.end),
                e.id
            )));
        }
    }
    let mut out = MetricGraph::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if i == i0 {
            out.add_vertex(v1, VertexCondition::Delta(alpha1));
            out.add_vertex(v2, VertexCondition::Delta(alpha2));
        } else {
            out.vertices.push(v.clone());
        }
    }
    let target = |e: &Edge, end: End, x: &VertexId| -> VertexId {
        if x.as_str() != v0 {
            x.clone()
        } else if listed.contains(&EdgeEnd {
            edge: e.id.clone(),
            end,
        }) {
            v1.into()
        } else {
            v2.into()
        }
    };
    out.edges = g
        .edges
        .iter()
        .map(|e| Edge {
            id: e.id.clone(),
            tail: target(e, End::Tail, &e.tail),
            head: target(e, End::Head, &e.head),
            length: e.length,
        })
        .collect();
    let out = checked(out)?;
    require_connected(&out)?;
    Ok(out)
}

fn end_name(end: End) -> &'static str {
    match end {
        End::Tail => "tail",
        End::Head => "head",
    }
}

/// Replaces vertex `at` by the graph `inserted`; every edge-end formerly at
/// `at` is reattached to the vertex named in `attachment`. Returns the new
/// graph and whether the inserted strengths sum to at most `α_at`, the
/// hypothesis under which the rigidity cannot decrease.
pub fn insert(
    g: &MetricGraph,
    at: &str,
    inserted: &MetricGraph,
    attachment: &[Attachment],
) -> Result<(MetricGraph, bool)> {
    let (i0, _, a0) = delta_vertex(g, at)?;
    let violations: Vec<Violation> = validate(inserted)
        .into_iter()
        .filter(|v| !matches!(v, Violation::NoEdges))
        .collect();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    if inserted.vertices.is_empty() {
        return Err(Error::BadAttachment(
            "inserted graph has no vertices".into(),
        ));
    }
    if let Some(v) = inserted
        .vertices
        .iter()
        .find(|v| v.condition.is_dirichlet())
    {
        return Err(Error::DirichletUnsupported(v.id.to_string()));
    }
    for v in &inserted.vertices {
        if g.vertices
            .iter()
            .enumerate()
            .any(|(i, w)| i != i0 && w.id == v.id)
        {
            return Err(Error::IdCollision(v.id.to_string()));
        }
    }
    for e in &inserted.edges {
        if g.edge(e.id.as_str()).is_some() {
            return Err(Error::IdCollision(e.id.to_string()));
        }
    }
    let mut map: BTreeMap<EdgeEnd, VertexId> = BTreeMap::new();
    for a in attachment {
        if inserted.vertex(a.vertex.as_str()).is_none() {
            return Err(Error::BadAttachment(format!(
                "`{}` is not a vertex of the inserted graph",
                a.vertex
            )));
        }
        let key = EdgeEnd {
            edge: a.edge.clone(),
            end: a.end,
        };
        if map.insert(key, a.vertex.clone()).is_some() {
            return Err(Error::BadAttachment(format!(
                "{} end of `{}` attached twice",
                end_name(a.end),
                a.edge
            )));
        }
    }
    let mut used = 0;
    let mut edges = Vec::with_capacity(g.edges.len() + inserted.edges.len());
    for e in &g.edges {
        let mut e2 = e.clone();
        for (end, slot) in [(End::Tail, &mut e2.tail), (End::Head, &mut e2.head)] {
            if slot.as_str() == at {
                let key = EdgeEnd {
                    edge: e.id.clone(),
                    end,
                };
                let v = map.get(&key).ok_or_else(|| {
                    Error::BadAttachment(format!(
                        "{} end of `{}` is not attached",
                        end_name(end),
                        e.id
                    ))
                })?;
                *slot = v.clone();
                used += 1;
            }
        }
        edges.push(e2);
    }
    if used != map.len() {
        return Err(Error::BadAttachment(
            "attachment lists an edge-end that is not at the insertion vertex".into(),
        ));
    }
    edges.extend(inserted.edges.iter().cloned());
    let mut vertices = Vec::with_capacity(g.vertices.len() + inserted.vertices.len());
    for (i, v) in g.vertices.iter().enumerate() {
        if i == i0 {
            vertices.extend(inserted.vertices.iter().cloned());
        } else {
            vertices.push(v.clone());
        }
    }
    let out = checked(MetricGraph { vertices, edges })?;
    require_connected(&out)?;
    let inserted_strength: f64 = inserted.strengths().sum();
    Ok((out, inserted_strength <= a0 + 1e-12 * (1.0 + a0.abs())))
}

/// Replaces the pendant edges at `v0` by one pendant edge of the summed
/// length. The removed tips disappear; the new edge reuses the id of the
/// first listed edge and the new tip the id of its tip.
pub fn unfold(g: &MetricGraph, v0: &str, pendants: &[&str], rule: TipRule) -> Result<MetricGraph> {
    delta_vertex(g, v0)?;
    let Some(&first) = pendants.first() else {
        return Err(Error::NotPendant("(no edges listed)".into()));
    };
    let topo = Topology::new(g)?;
    let deg = topo.degrees(g.vertices.len());
    let mut seen = HashSet::new();
    let mut tips = Vec::new();
    let mut total = 0.0;
    for &id in pendants {
        let k = g
            .edges
            .iter()
            .position(|e| e.id.as_str() == id)
            .ok_or_else(|| Error::UnknownEdge(id.into()))?;
        if !seen.insert(id) {
            return Err(Error::NotPendant(id.into()));
        }
        let e = &g.edges[k];
        let (t, h) = topo.ends[k];
        let tip = if e.tail.as_str() == v0 && e.head.as_str() != v0 {
            h
        } else if e.head.as_str() == v0 && e.tail.as_str() != v0 {
            t
        } else {
            return Err(Error::NotPendant(id.into()));
        };
        if deg[tip] != 1 {
            return Err(Error::NotPendant(id.into()));
        }
        let strength = match g.vertices[tip].condition {
            VertexCondition::Delta(a) => a,
            VertexCondition::Dirichlet => {
                return Err(Error::DirichletUnsupported(g.vertices[tip].id.to_string()))
            }
        };
        tips.push((tip, strength));
        total += e.length;
    }
    let tip_strength = match rule {
        TipRule::Zero => 0.0,
        TipRule::Sum => tips.iter().map(|t| t.1).sum(),
    };
    let first_tip = tips[0].0;
    let removed: HashSet<usize> = tips.iter().map(|t| t.0).collect();
    let mut out = MetricGraph::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if i == first_tip {
            out.vertices.push(Vertex {
                id: v.id.clone(),
                condition: VertexCondition::Delta(tip_strength),
            });
        } else if !removed.contains(&i) {
            out.vertices.push(v.clone());
        }
    }
    for e in &g.edges {
        if e.id.as_str() == first {
            let tip = g.vertices[first_tip].id.clone();
            out.edges.push(Edge {
                id: e.id.clone(),
                tail: v0.into(),
                head: tip,
                length: total,
            });
        } else if !seen.contains(e.id.as_str()) {
            out.edges.push(e.clone());
        }
    }
    checked(out)
}

/// Replaces the strength of a δ-vertex.
pub fn set_strength(g: &MetricGraph, v: &str, alpha: f64) -> Result<MetricGraph> {
    let (i, _, _) = delta_vertex(g, v)?;
    let mut out = g.clone();
    out.vertices[i].condition = VertexCondition::Delta(alpha);
    checked(out)
}

/// What the rigidity is predicted to do under a surgery step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    Increases,
    Decreases,
    DoesNotDecrease,
    DoesNotIncrease,
    /// `T(after) = t³ T(before)`.
    ScalesCubically {
        t: f64,
    },
    /// Identity: `T(after) = T(before)`.
    Unchanged,
    /// No statement applies (hypothesis fails or the rule carries none).
    None,
}

/// Before/after rigidities with the predicted change.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub before: f64,
    pub after: f64,
    pub prediction: Prediction,
    /// Whether the prediction holds within `1e-9` relative; `None` without a
    /// prediction.
    pub holds: Option<bool>,
    pub hypothesis_holds: Option<bool>,
}

/// Prediction for a step, given whether an insertion hypothesis holds.
///
/// Strength changes are predicted from the sign of the change; the
/// statements assume non-negative strengths.
pub fn prediction(
    g: &MetricGraph,
    spec: &SurgerySpec,
    hypothesis_holds: Option<bool>,
) -> Prediction {
    match spec {
        SurgerySpec::Lengthen { .. } => Prediction::Increases,
        SurgerySpec::Scale { t } => Prediction::ScalesCubically { t: *t },
        SurgerySpec::Glue { .. } => Prediction::DoesNotIncrease,
        SurgerySpec::Cut { .. } => Prediction::DoesNotDecrease,
        SurgerySpec::Insert { .. } if hypothesis_holds == Some(true) => Prediction::DoesNotDecrease,
        SurgerySpec::Insert { .. } => Prediction::None,
        SurgerySpec::Unfold {
            tip_rule: TipRule::Zero,
            ..
        } => Prediction::DoesNotDecrease,
        SurgerySpec::Unfold {
            tip_rule: TipRule::Sum,
            ..
        } => Prediction::None,
        SurgerySpec::SetStrength { v, alpha } => {
            match g.vertex(v.as_str()).and_then(|x| x.condition.strength()) {
                Some(old) if *alpha > old => Prediction::Decreases,
                Some(old) if *alpha < old => Prediction::Increases,
                Some(_) => Prediction::Unchanged,
                None => Prediction::None,
            }
        }
    }
}

/// Applies `spec` and compares the rigidity before and after.
pub fn compare(g: &MetricGraph, spec: &SurgerySpec) -> Result<Comparison> {
    let applied = apply(g, spec)?;
    let before = torsional_rigidity(g)?;
    let after = torsional_rigidity(&applied.graph)?;
    let prediction = prediction(g, spec, applied.hypothesis_holds);
    let tol = 1e-9 * before.abs().max(after.abs());
    let holds = match prediction {
        Prediction::Increases => Some(after > before),
        Prediction::Decreases => Some(after < before),
        Prediction::DoesNotDecrease => Some(after >= before - tol),
        Prediction::DoesNotIncrease => Some(after <= before + tol),
        Prediction::ScalesCubically { t } => Some((after / t.powi(3) - before).abs() <= tol),
        Prediction::Unchanged => Some((after - before).abs() <= tol),
        Prediction::None => None,
    };
    Ok(Comparison {
        before,
        after,
        prediction,
        holds,
        hypothesis_holds: applied.hypothesis_holds,
    })
}
