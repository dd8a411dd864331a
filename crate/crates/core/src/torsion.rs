//! Torsion function, torsional rigidity and the positivity verdict.
//!
//! On an edge `e` of length `l`, parametrized from tail to head, the torsion
//! function is `v_e(x) = -x²/2 + b x + a` with `a = g(tail)` and
//! `b = l/2 + (g(head) - g(tail))/l`. Plugging this into the vertex
//! conditions gives `A g = D 1` where
//!
//! * `A[v][v] = Σ 1/l` over non-loop edge-ends at `v`, plus `α_v`,
//! * `A[v][w] = -Σ 1/l` over edges joining `v` and `w`,
//! * `D[v] = d_v/2` with `d_v` the summed incident length, loops twice.
//!
//! Dirichlet vertices are removed from the system (their value is 0).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{connected_with, MetricGraph, Topology, VertexCondition};
use crate::numerics::{eigenvalues_sym, solve_sym, Inertia, NumericsError, SymMatrix};
use crate::{EdgeId, Error, Result, VertexId};

/// Relative zero tolerance for the normalized discrete Laplacian.
pub const ZERO_TOLERANCE: f64 = 1e-10;

/// The vertex system in symmetric factored form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteLaplacian {
    /// Free (non-Dirichlet) vertices in system order.
    pub vertices: Vec<VertexId>,
    /// Symmetric form `A`.
    #[serde(serialize_with = "serialize_rows")]
    pub form: SymMatrix,
    /// Diagonal of `D`.
    pub scaling: Vec<f64>,
}

fn serialize_rows<S: serde::Serializer>(
    m: &SymMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

impl DiscreteLaplacian {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    /// `L = D⁻¹ A`, row-major.
    pub fn row_scaled_matrix(&self) -> Vec<Vec<f64>> {
        let mut rows = self.form.to_rows();
        for (row, d) in rows.iter_mut().zip(&self.scaling) {
            row.iter_mut().for_each(|x| *x /= d);
        }
        rows
    }

    /// `D^{-1/2} A D^{-1/2}`, symmetric and similar to `L`.
    pub fn normalized(&self) -> SymMatrix {
        let s: Vec<f64> = self.scaling.iter().map(|d| 1.0 / d.sqrt()).collect();
        self.form.scaled(&s)
    }

    /// Ascending spectrum of `L`.
    pub fn spectrum(&self) -> Vec<f64> {
        eigenvalues_sym(&self.normalized())
    }

    /// Absolute zero tolerance used for singularity and sign decisions.
    pub fn zero_tolerance(&self) -> f64 {
        ZERO_TOLERANCE * self.normalized().norm_inf()
    }
}

/// Assembly plus the bookkeeping needed to rebuild edge pieces.
struct Assembled {
    lap: DiscreteLaplacian,
    topo: Topology,
    /// Position in the system for each vertex, `None` for Dirichlet.
    slot: Vec<Option<usize>>,
}

fn assemble(g: &MetricGraph) -> Result<Assembled> {
    let topo = Topology::new(g)?;
    let punctured = g.has_dirichlet();
    if !connected_with(g, &topo, punctured) {
        return Err(Error::NotConnected);
    }
    let mut slot = vec![None; g.vertices.len()];
    let mut vertices = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if !v.condition.is_dirichlet() {
            slot[i] = Some(vertices.len());
            vertices.push(v.id.clone());
        }
    }
    let n = vertices.len();
    let mut form = SymMatrix::zeros(n);
    let mut scaling = vec![0.0; n];
    for (i, v) in g.vertices.iter().enumerate() {
        if let (Some(s), VertexCondition::Delta(alpha)) = (slot[i], v.condition) {
            form.add(s, s, alpha);
        }
    }
    for (e, &(t, h)) in g.edges.iter().zip(&topo.ends) {
        let l = e.length;
        for v in [t, h] {
            if let Some(s) = slot[v] {
                scaling[s] += l / 2.0;
            }
        }
        if t == h {
            continue;
        }
        for v in [t, h] {
            if let Some(s) = slot[v] {
                form.add(s, s, 1.0 / l);
            }
        }
        if let (Some(st), Some(sh)) = (slot[t], slot[h]) {
            form.add(st, sh, -1.0 / l);
        }
    }
    Ok(Assembled {
        lap: DiscreteLaplacian {
            vertices,
            form,
            scaling,
        },
        topo,
        slot,
    })
}

/// Builds the vertex system for `g`.
///
/// Fails with [`Error::NotConnected`] when the graph (punctured at its
/// Dirichlet vertices, if any) is disconnected.
pub fn assemble_system(g: &MetricGraph) -> Result<DiscreteLaplacian> {
    assemble(g).map(|a| a.lap)
}

/// Quadratic piece `-x²/2 + b x + a` on one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePiece {
    pub id: EdgeId,
    pub a: f64,
    pub b: f64,
}

impl EdgePiece {
    pub fn value(&self, x: f64) -> f64 {
        -0.5 * x * x + self.b * x + self.a
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.b - x
    }

    /// `∫_0^l v(x) dx`.
    pub fn integral(&self, l: f64) -> f64 {
        -l * l * l / 6.0 + self.b * l * l / 2.0 + self.a * l
    }

    /// `∫_0^l v'(x)² dx`.
    pub fn dirichlet_energy(&self, l: f64) -> f64 {
        self.b * self.b * l - self.b * l * l + l * l * l / 3.0
    }
}

/// The torsion function as vertex values plus exact edge pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionFunction {
    pub vertex_values: BTreeMap<VertexId, f64>,
    pub edges: Vec<EdgePiece>,
}

impl TorsionFunction {
    pub fn piece(&self, edge: &str) -> Option<&EdgePiece> {
        self.edges.iter().find(|p| p.id.as_str() == edge)
    }

    pub fn at_vertex(&self, v: &str) -> Option<f64> {
        self.vertex_values.get(v).copied()
    }

    fn from_values(g: &MetricGraph, topo: &Topology, values: &[f64]) -> Self {
        let vertex_values = g
            .vertices
            .iter()
            .map(|v| v.id.clone())
            .zip(values.iter().copied())
            .collect();
        let edges = g
            .edges
            .iter()
            .zip(&topo.ends)
            .map(|(e, &(t, h))| {
                let l = e.length;
                EdgePiece {
                    id: e.id.clone(),
                    a: values[t],
                    b: l / 2.0 + (values[h] - values[t]) / l,
                }
            })
            .collect();
        TorsionFunction {
            vertex_values,
            edges,
        }
    }
}

/// Eigenvalue of smallest magnitude, or `None` for an empty spectrum.
fn nearest_zero(spectrum: &[f64]) -> Option<f64> {
    spectrum
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
}

fn solve_assembled(g: &MetricGraph, asm: &Assembled) -> Result<Vec<f64>> {
    let lap = &asm.lap;
    let mut values = vec![0.0; g.vertices.len()];
    if lap.dim() == 0 {
        return Ok(values);
    }
    let spectrum = lap.spectrum();
    let tol = lap.zero_tolerance();
    if let Some(near) = nearest_zero(&spectrum).filter(|x| x.abs() <= tol) {
        return Err(Error::NoTorsion { spectrum_min: near });
    }
    let x = match solve_sym(&lap.form, &lap.scaling) {
        Ok(x) => x,
        Err(NumericsError::SingularMatrix { .. }) => {
            return Err(Error::NoTorsion {
                spectrum_min: nearest_zero(&spectrum).unwrap_or(0.0),
            })
        }
        Err(e) => return Err(e.into()),
    };
    for (i, s) in asm.slot.iter().enumerate() {
        if let Some(s) = *s {
            values[i] = x[s];
        }
    }
    Ok(values)
}

/// Solves the torsion problem exactly.
///
/// Fails with [`Error::NoTorsion`] when 0 is in the spectrum of the discrete
/// Laplacian (checked on the normalized form at tolerance
/// `ZERO_TOLERANCE * ‖·‖∞`).
pub fn solve_torsion(g: &MetricGraph) -> Result<TorsionFunction> {
    let asm = assemble(g)?;
    let values = solve_assembled(g, &asm)?;
    Ok(TorsionFunction::from_values(g, &asm.topo, &values))
}

/// `Σ_e [l³/12 + l (g(tail) + g(head))/2]`, the integral of `t` over `g`.
///
/// Edges without a piece in `t` are skipped.
pub fn rigidity(t: &TorsionFunction, g: &MetricGraph) -> f64 {
    g.edges
        .iter()
        .filter_map(|e| {
            let p = t.piece(e.id.as_str())?;
            let l = e.length;
            Some(l * l * l / 12.0 + l * (p.value(0.0) + p.value(l)) / 2.0)
        })
        .sum()
}

/// Torsional rigidity `T(G, α)`.
pub fn torsional_rigidity(g: &MetricGraph) -> Result<f64> {
    Ok(rigidity(&solve_torsion(g)?, g))
}

/// `∫ v'² + Σ α_v v(v)²`; equals the rigidity for the torsion function.
pub fn energy(t: &TorsionFunction, g: &MetricGraph) -> f64 {
    let kinetic: f64 = g
        .edges
        .iter()
        .filter_map(|e| Some(t.piece(e.id.as_str())?.dirichlet_energy(e.length)))
        .sum();
    let potential: f64 = g
        .vertices
        .iter()
        .filter_map(|v| {
            let alpha = v.condition.strength()?;
            let x = t.at_vertex(v.id.as_str())?;
            Some(alpha * x * x)
        })
        .sum();
    kinetic + potential
}

/// Largest violation of the vertex conditions: `|Σ inward derivatives + α g(v)|`
/// at δ-vertices and `|g(v)|` at Dirichlet vertices.
pub fn check_vertex_residuals(t: &TorsionFunction, g: &MetricGraph) -> f64 {
    let mut flux: BTreeMap<&str, f64> = BTreeMap::new();
    for e in &g.edges {
        let Some(p) = t.piece(e.id.as_str()) else {
            continue;
        };
        *flux.entry(e.tail.as_str()).or_default() += -p.derivative(0.0);
        *flux.entry(e.head.as_str()).or_default() += p.derivative(e.length);
    }
    g.vertices
        .iter()
        .map(|v| {
            let x = t.at_vertex(v.id.as_str()).unwrap_or(0.0);
            match v.condition {
                VertexCondition::Dirichlet => x.abs(),
                VertexCondition::Delta(alpha) => {
                    (flux.get(v.id.as_str()).copied().unwrap_or(0.0) + alpha * x).abs()
                }
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    PositiveTorsion,
    TorsionExistsNotPositive,
    NoTorsion,
}

/// Outcome of the positivity test by both routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityVerdict {
    /// Verdict from the spectrum of the discrete Laplacian.
    pub classification: Classification,
    /// Verdict from the signs of the solved vertex values.
    pub sign_classification: Classification,
    pub routes_agree: bool,
    /// The smallest eigenvalue is within `10 * zero_tolerance` of 0, so the
    /// verdict depends on the tolerance.
    pub indeterminate: bool,
    /// Smallest eigenvalue of `L` (`+inf` when every vertex is Dirichlet).
    pub discrete_spectrum_min: f64,
    /// Smallest free-vertex value of the torsion function, if it exists.
    pub vertex_min: Option<f64>,
    pub inertia: Inertia,
}

/// Decides whether the torsion function exists and is strictly positive.
pub fn classify_positivity(g: &MetricGraph) -> Result<PositivityVerdict> {
    let asm = assemble(g)?;
    let lap = &asm.lap;
    let tol = lap.zero_tolerance();
    let spectrum = lap.spectrum();
    let inertia = Inertia {
        n_negative: spectrum.iter().filter(|&&x| x < -tol).count(),
        n_zero: spectrum.iter().filter(|&&x| x.abs() <= tol).count(),
        n_positive: spectrum.iter().filter(|&&x| x > tol).count(),
        zero_tolerance: tol,
    };
    let classification = if inertia.n_zero > 0 {
        Classification::NoTorsion
    } else if inertia.n_negative > 0 {
        Classification::TorsionExistsNotPositive
    } else {
        Classification::PositiveTorsion
    };
    let solved = if lap.dim() == 0 {
        Some(Vec::new())
    } else {
        solve_sym(&lap.form, &lap.scaling).ok()
    };
    let vertex_min = solved
        .as_ref()
        .and_then(|x| x.iter().copied().reduce(f64::min));
    let sign_classification = match &solved {
        None => Classification::NoTorsion,
        Some(x) if x.iter().all(|&v| v > 0.0) => Classification::PositiveTorsion,
        Some(_) => Classification::TorsionExistsNotPositive,
    };
    let discrete_spectrum_min = spectrum.first().copied().unwrap_or(f64::INFINITY);
    Ok(PositivityVerdict {
        classification,
        sign_classification,
        routes_agree: classification == sign_classification,
        indeterminate: nearest_zero(&spectrum).is_some_and(|x| x.abs() <= 10.0 * tol),
        discrete_spectrum_min,
        vertex_min,
        inertia,
    })
}

/// Continuous test function with one quadratic `c0 + c1 x + c2 x²` per edge
/// (tail to head parametrization).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PiecewiseQuadratic {
    pub pieces: BTreeMap<EdgeId, [f64; 3]>,
}

impl PiecewiseQuadratic {
    pub fn constant(g: &MetricGraph, c: f64) -> Self {
        PiecewiseQuadratic {
            pieces: g
                .edges
                .iter()
                .map(|e| (e.id.clone(), [c, 0.0, 0.0]))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        PiecewiseQuadratic {
            pieces: self
                .pieces
                .iter()
                .map(|(k, c)| (k.clone(), [s * c[0], s * c[1], s * c[2]]))
                .collect(),
        }
    }
}

impl From<&TorsionFunction> for PiecewiseQuadratic {
    fn from(t: &TorsionFunction) -> Self {
        PiecewiseQuadratic {
            pieces: t
                .edges
                .iter()
                .map(|p| (p.id.clone(), [p.a, p.b, -0.5]))
                .collect(),
        }
    }
}

fn quad(c: &[f64; 3], x: f64) -> f64 {
    c[0] + x * (c[1] + x * c[2])
}

fn quad_antiderivative(c: &[f64; 3], x: f64) -> f64 {
    x * (c[0] + x * (c[1] / 2.0 + x * c[2] / 3.0))
}

/// Real roots of the quadratic strictly inside `(0, l)`, ascending.
fn interior_roots(c: &[f64; 3], l: f64) -> Vec<f64> {
    let [c0, c1, c2] = *c;
    let scale = c0.abs().max(c1.abs() * l).max(c2.abs() * l * l);
    let mut roots = Vec::new();
    if scale == 0.0 {
        return roots;
    }
    if c2.abs() * l * l <= 1e-14 * scale {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc > 1e-14 * c1.abs().max((4.0 * c2 * c0).abs()) {
            let sgn = if c1 >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (c1 + sgn * disc.sqrt());
            roots.push(q / c2);
            if q != 0.0 {
                roots.push(c0 / q);
            }
        }
    }
    roots.retain(|&x| x > 0.0 && x < l);
    roots.sort_by(f64::total_cmp);
    roots
}

fn abs_integral(c: &[f64; 3], l: f64) -> f64 {
    let mut knots = vec![0.0];
    knots.extend(interior_roots(c, l));
    knots.push(l);
    knots
        .windows(2)
        .map(|w| (quad_antiderivative(c, w[1]) - quad_antiderivative(c, w[0])).abs())
        .sum()
}

/// Pólya quotient `(∫|u|)² / h_α(u)`, both integrals in closed form.
///
/// `u` must have a piece on every edge, agree at shared vertices and vanish
/// at Dirichlet vertices. Fails with [`Error::DegenerateForm`] when
/// `h_α(u) ≤ 0`.
pub fn polya_quotient(g: &MetricGraph, u: &PiecewiseQuadratic) -> Result<f64> {
    let topo = Topology::new(g)?;
    let mut at_vertex: Vec<Option<f64>> = vec![None; g.vertices.len()];
    let mut mass = 0.0;
    let mut kinetic = 0.0;
    for (e, &(t, h)) in g.edges.iter().zip(&topo.ends) {
        let c = u
            .pieces
            .get(&e.id)
            .ok_or_else(|| Error::MissingPiece(e.id.to_string()))?;
        let l = e.length;
        for (v, x) in [(t, quad(c, 0.0)), (h, quad(c, l))] {
            match at_vertex[v] {
                None => at_vertex[v] = Some(x),
                Some(y) if (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())) => {}
                Some(_) => return Err(Error::Discontinuous(g.vertices[v].id.to_string())),
            }
        }
        mass += abs_integral(c, l);
        kinetic +=
            c[1] * c[1] * l + 2.0 * c[1] * c[2] * l * l + 4.0 * c[2] * c[2] * l * l * l / 3.0;
    }
    let size = at_vertex
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let mut potential = 0.0;
    for (v, x) in g.vertices.iter().zip(&at_vertex) {
        let x = x.unwrap_or(0.0);
        match v.condition {
            VertexCondition::Dirichlet if x.abs() > 1e-9 * (1.0 + size) => {
                return Err(Error::NonzeroAtDirichlet(v.id.to_string()))
            }
            VertexCondition::Dirichlet => {}
            VertexCondition::Delta(alpha) => potential += alpha * x * x,
        }
    }
    let form = kinetic + potential;
    if !(form > 0.0) {
        return Err(Error::DegenerateForm { energy: form });
    }
    Ok(mass * mass / form)
}
