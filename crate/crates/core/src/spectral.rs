//! First eigenvalue of the vertex-condition Laplacian.
//!
//! The operator is discretized with continuous piecewise-linear elements.
//! Instead of a dense eigensolve, the smallest generalized eigenvalue of
//! `(K, M)` is located by bisection on the Sylvester count of negative
//! eigenvalues of `K - σM`: the interior nodes of every edge form a
//! tridiagonal block that is eliminated in `O(m_e)`, leaving a small
//! vertex-sized Schur complement. Refinement doubles every edge and the
//! last two levels are Richardson-extrapolated.

use serde::{Deserialize, Serialize};

use crate::graph::{connected_with, MetricGraph, Topology, VertexCondition};
use crate::numerics::{bisect_root, eigenvalues_sym, SymMatrix};
use crate::{Error, Result};

/// Default cap on degrees of freedom for [`lambda1`].
pub const DEFAULT_DOF_CAP: usize = 200_000;

/// Per-edge cell counts, aligned with `g.edges`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mesh {
    pub cells: Vec<usize>,
}

impl Mesh {
    /// `m_e = max(4, ceil(l_e / h0))` with `h0 = |G| / 64`.
    pub fn initial(g: &MetricGraph) -> Self {
        let h0 = g.total_length() / 64.0;
        Mesh {
            cells: g
                .edges
                .iter()
                .map(|e| ((e.length / h0).ceil() as usize).max(4))
                .collect(),
        }
    }

    pub fn uniform(g: &MetricGraph, m: usize) -> Self {
        Mesh {
            cells: vec![m.max(1); g.edges.len()],
        }
    }

    pub fn refined(&self) -> Self {
        Mesh {
            cells: self.cells.iter().map(|m| 2 * m).collect(),
        }
    }

    /// Largest cell width.
    pub fn h_max(&self, g: &MetricGraph) -> f64 {
        g.edges
            .iter()
            .zip(&self.cells)
            .map(|(e, &m)| e.length / m as f64)
            .fold(0.0, f64::max)
    }

    /// Free vertex DOFs plus interior nodes.
    pub fn dofs(&self, g: &MetricGraph) -> usize {
        let free = g
            .vertices
            .iter()
            .filter(|v| !v.condition.is_dirichlet())
            .count();
        free + self.cells.iter().map(|m| m - 1).sum::<usize>()
    }

    fn check(&self, g: &MetricGraph) -> Result<()> {
        if self.cells.len() != g.edges.len() || self.cells.contains(&0) {
            return Err(Error::Parse(format!(
                "mesh has {} cell counts for {} edges (all must be >= 1)",
                self.cells.len(),
                g.edges.len()
            )));
        }
        Ok(())
    }
}

fn free_slots(g: &MetricGraph) -> (Vec<Option<usize>>, usize) {
    let mut n = 0;
    let slots = g
        .vertices
        .iter()
        .map(|v| {
            (!v.condition.is_dirichlet()).then(|| {
                n += 1;
                n - 1
            })
        })
        .collect();
    (slots, n)
}

/// Dense stiffness and mass matrices.
///
/// DOFs are the free vertices (graph order) followed by the interior nodes of
/// each edge, tail to head. Meant for small meshes and cross-checks; the
/// eigenvalue routines never form these matrices.
pub fn assemble_fem(g: &MetricGraph, mesh: &Mesh) -> Result<(SymMatrix, SymMatrix)> {
    let topo = Topology::new(g)?;
    mesh.check(g)?;
    let (slot, n_free) = free_slots(g);
    let n = mesh.dofs(g);
    let mut k = SymMatrix::zeros(n);
    let mut m = SymMatrix::zeros(n);
    for (i, v) in g.vertices.iter().enumerate() {
        if let (Some(s), VertexCondition::Delta(alpha)) = (slot[i], v.condition) {
            k.add(s, s, alpha);
        }
    }
    let mut next = n_free;
    for ((e, &(t, h)), &cells) in g.edges.iter().zip(&topo.ends).zip(&mesh.cells) {
        let w = e.length / cells as f64;
        let node = |j: usize| -> Option<usize> {
            match j {
                0 => slot[t],
                j if j == cells => slot[h],
                j => Some(next + j - 1),
            }
        };
        for c in 0..cells {
            let (p, q) = (node(c), node(c + 1));
            for (x, y, kk, mm) in [
                (p, p, 1.0 / w, w / 3.0),
                (q, q, 1.0 / w, w / 3.0),
                (p, q, -1.0 / w, w / 6.0),
            ] {
                if let (Some(x), Some(y)) = (x, y) {
                    k.add(x, y, kk);
                    m.add(x, y, mm);
                }
            }
            if p == q {
                // One-cell loop: both off-diagonal entries land on the diagonal.
                if let Some(x) = p {
                    k.add(x, x, -1.0 / w);
                    m.add(x, x, w / 6.0);
                }
            }
        }
        next += cells - 1;
    }
    Ok((k, m))
}

/// Number of generalized eigenvalues of `(K, M)` strictly below `sigma`.
pub fn eigenvalue_count_below(g: &MetricGraph, mesh: &Mesh, sigma: f64) -> Result<usize> {
    let topo = Topology::new(g)?;
    mesh.check(g)?;
    let (slot, n_free) = free_slots(g);
    Ok(count_below(g, &topo, &slot, n_free, mesh, sigma))
}

fn nonzero(p: f64, scale: f64) -> f64 {
    if p == 0.0 {
        f64::EPSILON * scale
    } else {
        p
    }
}

/// Sylvester count for `K - σM` with interior nodes condensed edge by edge.
fn count_below(
    g: &MetricGraph,
    topo: &Topology,
    slot: &[Option<usize>],
    n_free: usize,
    mesh: &Mesh,
    sigma: f64,
) -> usize {
    let mut negatives = 0;
    let mut schur = SymMatrix::zeros(n_free);
    for (i, v) in g.vertices.iter().enumerate() {
        if let (Some(s), VertexCondition::Delta(alpha)) = (slot[i], v.condition) {
            schur.add(s, s, alpha);
        }
    }
    for ((e, &(t, h)), &cells) in g.edges.iter().zip(&topo.ends).zip(&mesh.cells) {
        let w = e.length / cells as f64;
        let off = -1.0 / w - sigma * w / 6.0;
        let scale = 1.0 / w + sigma.abs() * w;
        // Condensed end diagonal (equal at both ends by symmetry) and the
        // tail-head coupling. Pivots are tracked through r = p + off, which
        // avoids the O(1/h) cancellation in d - off²/p.
        let (mut a, mut c) = (1.0 / w - sigma * w / 3.0, off);
        if cells > 1 {
            let mut r = 1.0 / w - 5.0 * sigma * w / 6.0;
            for i in 1..cells {
                let p = nonzero(r - off, scale);
                if p < 0.0 {
                    negatives += 1;
                }
                c = -c * off / p;
                if i + 1 < cells {
                    r = -sigma * w - off * r / p;
                } else {
                    a = -sigma * w / 2.0 - off * r / p;
                }
            }
        }
        let (a0, am) = (a, a);
        match (slot[t], slot[h]) {
            (Some(x), Some(_)) if t == h => schur.add(x, x, a0 + am + 2.0 * c),
            (st, sh) => {
                if let Some(x) = st {
                    schur.add(x, x, a0);
                }
                if let Some(y) = sh {
                    schur.add(y, y, am);
                }
                if let (Some(x), Some(y)) = (st, sh) {
                    schur.add(x, y, c);
                }
            }
        }
    }
    negatives + eigenvalues_sym(&schur).iter().filter(|&&x| x < 0.0).count()
}

/// Smallest generalized eigenvalue on one mesh, by bisection on the count.
pub fn lambda1_on_mesh(g: &MetricGraph, mesh: &Mesh) -> Result<f64> {
    let topo = Topology::new(g)?;
    mesh.check(g)?;
    let (slot, n_free) = free_slots(g);
    let count = |s: f64| count_below(g, &topo, &slot, n_free, mesh, s);
    let (mut lo, mut hi);
    if count(0.0) == 0 {
        lo = 0.0;
        hi = 1.0 / g.total_length().powi(2);
        while count(hi) == 0 {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        hi = 0.0;
        lo = -1.0 / g.total_length().powi(2);
        while count(lo) > 0 {
            hi = lo;
            lo *= 2.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub h_max: f64,
    pub dofs: usize,
    pub lambda1: f64,
}

/// First-eigenvalue estimate with its refinement history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Value on the finest mesh.
    pub lambda1: f64,
    pub h_max: f64,
    /// Richardson extrapolation of the two finest levels.
    pub lambda1_refined: f64,
    /// `|lambda1_refined - lambda1|`.
    pub error_estimate: f64,
    /// `log2` of the ratio of successive level differences; `None` when a
    /// difference vanishes.
    pub observed_order: Option<f64>,
    pub levels: Vec<RefinementLevel>,
}

/// [`lambda1_with_cap`] with the default DOF cap.
pub fn lambda1(g: &MetricGraph, target_error: f64) -> Result<SpectralResult> {
    lambda1_with_cap(g, target_error, DEFAULT_DOF_CAP)
}

/// Refines the initial mesh by doubling until the Richardson error estimate
/// is at most `target_error` (at least three levels are always computed).
pub fn lambda1_with_cap(
    g: &MetricGraph,
    target_error: f64,
    dof_cap: usize,
) -> Result<SpectralResult> {
    let topo = Topology::new(g)?;
    if !connected_with(g, &topo, g.has_dirichlet()) {
        return Err(Error::NotConnected);
    }
    let mut mesh = Mesh::initial(g);
    let mut levels: Vec<RefinementLevel> = Vec::new();
    loop {
        let dofs = mesh.dofs(g);
        if dofs > dof_cap {
            return Err(Error::BudgetExceeded { cap: dof_cap });
        }
        levels.push(RefinementLevel {
            h_max: mesh.h_max(g),
            dofs,
            lambda1: lambda1_on_mesh(g, &mesh)?,
        });
        if levels.len() >= 3 {
            let result = summarize_levels(&levels);
            if result.error_estimate <= target_error {
                return Ok(result);
            }
        }
        mesh = mesh.refined();
    }
}

fn summarize_levels(levels: &[RefinementLevel]) -> SpectralResult {
    let n = levels.len();
    let (coarse, fine) = (levels[n - 2].lambda1, levels[n - 1].lambda1);
    let refined = (4.0 * fine - coarse) / 3.0;
    let d1 = (levels[n - 2].lambda1 - levels[n - 3].lambda1).abs();
    let d2 = (fine - coarse).abs();
    let observed_order = (d1 > 0.0 && d2 > 0.0).then(|| (d1 / d2).log2());
    SpectralResult {
        lambda1: fine,
        h_max: levels[n - 1].h_max,
        lambda1_refined: refined,
        error_estimate: (refined - fine).abs(),
        observed_order,
        levels: levels.to_vec(),
    }
}

/// Secular function of the interval `[0, L]` with δ-strengths at both ends;
/// its positive roots `k` give the eigenvalues `k²`.
pub fn interval_secular(length: f64, alpha0: f64, alpha1: f64, k: f64) -> f64 {
    let sinc = if k == 0.0 {
        length
    } else {
        (k * length).sin() / k
    };
    (alpha0 * alpha1 - k * k) * sinc + (alpha0 + alpha1) * (k * length).cos()
}

/// Same with `k = iκ`, divided by `cosh(κL)`; roots give eigenvalues `-κ²`.
fn interval_secular_negative(length: f64, alpha0: f64, alpha1: f64, kappa: f64) -> f64 {
    let tanhc = if kappa == 0.0 {
        length
    } else {
        (kappa * length).tanh() / kappa
    };
    (alpha0 * alpha1 + kappa * kappa) * tanhc + alpha0 + alpha1
}

/// First eigenvalue of the interval `[0, length]` with δ-strengths at both
/// ends, as a root of the secular equation.
///
/// Fails with [`Error::NegativeGroundState`] when the ground state lies
/// below 0, detected by the inertia of a fine FEM stiffness matrix and by a
/// sign scan of the continued secular function.
pub fn secular_lambda1_interval(length: f64, alpha0: f64, alpha1: f64) -> Result<f64> {
    let g = MetricGraph::interval(length, alpha0, alpha1);
    if eigenvalue_count_below(&g, &Mesh::uniform(&g, 256), 0.0)? > 0 {
        return Err(Error::NegativeGroundState);
    }
    let f0 = interval_secular(length, alpha0, alpha1, 0.0);
    let scale = (alpha0 * alpha1 * length).abs() + alpha0.abs() + alpha1.abs() + 1.0 / length;
    if f0.abs() <= 1e-12 * scale {
        return Ok(0.0);
    }
    if f0 < 0.0 {
        return Err(Error::NegativeGroundState);
    }
    let kappa_max = 2.0 * alpha0.abs().max(alpha1.abs()) + 1.0 / length;
    const GRID: usize = 4096;
    let mut prev = f0;
    for i in 1..=GRID {
        let kappa = kappa_max * i as f64 / GRID as f64;
        let val = interval_secular_negative(length, alpha0, alpha1, kappa);
        if val.signum() != prev.signum() {
            return Err(Error::NegativeGroundState);
        }
        prev = val;
    }
    // Below the Dirichlet ground state once λ ≥ 0, so the first root lies in
    // (0, π/L]; the scan runs a little past it.
    let k_max = 4.0 * std::f64::consts::PI / length;
    let f = |k: f64| interval_secular(length, alpha0, alpha1, k);
    let mut a = 0.0;
    let mut fa = f0;
    for i in 1..=GRID {
        let b = k_max * i as f64 / GRID as f64;
        let fb = f(b);
        if fb == 0.0 {
            return Ok(b * b);
        }
        if fa.signum() != fb.signum() {
            let k = bisect_root(f, a, b, 1e-15 * b)?;
            return Ok(k * k);
        }
        a = b;
        fa = fb;
    }
    Err(Error::Numerics(
        crate::numerics::NumericsError::NoSignChange { lo: 0.0, hi: k_max },
    ))
}
