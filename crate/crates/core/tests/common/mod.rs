//! Seeded random graph generators shared by the integration tests.
#![allow(dead_code)]

use qgtorsion::{MetricGraph, VertexCondition};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn length(rng: &mut impl Rng) -> f64 {
    rng.gen_range(0.2..2.0)
}

/// Strengths drawn from `lo..hi`; when `lo >= 0` one random vertex is forced
/// to at least `0.1` so the torsion function is positive.
pub fn strengths(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n)
        .map(|_| if lo == hi { lo } else { rng.gen_range(lo..hi) })
        .collect();
    if lo >= 0.0 {
        let k = rng.gen_range(0..n);
        a[k] = a[k].max(0.1);
    }
    a
}

fn assemble(alphas: &[f64], edges: &[(usize, usize)], rng: &mut impl Rng) -> MetricGraph {
    let mut g = MetricGraph::new();
    for (i, &a) in alphas.iter().enumerate() {
        g.add_vertex(&format!("v{i}"), VertexCondition::Delta(a));
    }
    for (k, &(t, h)) in edges.iter().enumerate() {
        let l = length(rng);
        g.add_edge(&format!("e{k}"), &format!("v{t}"), &format!("v{h}"), l);
    }
    g
}

/// Connected multigraph: a random spanning tree plus extra edges (loops and
/// parallel edges allowed), at most `max_v` vertices and `max_e` edges.
pub fn connected(rng: &mut impl Rng, max_v: usize, max_e: usize, lo: f64, hi: f64) -> MetricGraph {
    let n = rng.gen_range(1..=max_v.min(max_e + 1));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let target = rng.gen_range(edges.len().max(1)..=max_e);
    while edges.len() < target {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    edges.shuffle(rng);
    let alphas = strengths(rng, n, lo, hi);
    assemble(&alphas, &edges, rng)
}

/// Bridgeless multigraph: a Hamiltonian cycle plus extra edges.
pub fn bridgeless(rng: &mut impl Rng, max_v: usize, max_e: usize, lo: f64, hi: f64) -> MetricGraph {
    let n = rng.gen_range(1..=max_v.min(max_e));
    let mut edges: Vec<(usize, usize)> = if n == 1 {
        vec![(0, 0)]
    } else {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    };
    let target = rng.gen_range(edges.len()..=max_e.max(edges.len()));
    while edges.len() < target {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let alphas = strengths(rng, n, lo, hi);
    assemble(&alphas, &edges, rng)
}

/// Flower with `1..=max_petals` loops.
pub fn flower(rng: &mut impl Rng, max_petals: usize) -> MetricGraph {
    let k = rng.gen_range(1..=max_petals);
    let lengths: Vec<f64> = (0..k).map(|_| length(rng)).collect();
    MetricGraph::flower(&lengths, rng.gen_range(0.1..5.0))
}

/// Ids of δ-vertices.
pub fn delta_vertices(g: &MetricGraph) -> Vec<String> {
    g.vertices
        .iter()
        .filter(|v| !v.condition.is_dirichlet())
        .map(|v| v.id.to_string())
        .collect()
}

/// `a ≥ b` up to `1e-9` relative.
pub fn geq(a: f64, b: f64) -> bool {
    a >= b - 1e-9 * a.abs().max(b.abs())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
