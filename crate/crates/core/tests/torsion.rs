mod common;

use common::{connected, rel_err, rng};
use proptest::prelude::*;
use qgtorsion::torsion::{
    assemble_system, check_vertex_residuals, classify_positivity, energy, polya_quotient, rigidity,
    solve_torsion, torsional_rigidity, Classification, PiecewiseQuadratic,
};
use qgtorsion::{Error, MetricGraph, VertexCondition};
use rand::Rng;

proptest! {
    #[test]
    fn rigidity_equals_energy(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let u = solve_torsion(&g).unwrap();
        let t = rigidity(&u, &g);
        prop_assert!(rel_err(energy(&u, &g), t) <= 1e-10);
        prop_assert!(check_vertex_residuals(&u, &g) <= 1e-9 * (1.0 + t));
    }

    #[test]
    fn nonnegative_strengths_give_positive_torsion(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let v = classify_positivity(&g).unwrap();
        prop_assert_eq!(v.classification, Classification::PositiveTorsion);
        prop_assert!(v.routes_agree);
        prop_assert!(v.vertex_min.unwrap() > 0.0);
    }

    #[test]
    fn torsion_maximizes_polya_quotient(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let g = connected(&mut r, 6, 8, 0.0, 5.0);
        let u = solve_torsion(&g).unwrap();
        let t = rigidity(&u, &g);
        let own = PiecewiseQuadratic::from(&u);
        prop_assert!(rel_err(polya_quotient(&g, &own.scaled(c)).unwrap(), t) <= 1e-10);
        // constants give |G|^2 / sum(alpha)
        let flat = polya_quotient(&g, &PiecewiseQuadratic::constant(&g, c)).unwrap();
        let len = g.total_length();
        prop_assert!(rel_err(flat, len * len / g.strengths().sum::<f64>()) <= 1e-12);
        prop_assert!(flat <= t * (1.0 + 1e-12));
        // a perturbation that keeps vertex values lowers the quotient
        let mut bumped = own.clone();
        for e in &g.edges {
            let s = r.gen_range(-0.5..0.5);
            let p = bumped.pieces.get_mut(&e.id).unwrap();
            p[1] -= s * e.length;
            p[2] += s;
        }
        prop_assert!(polya_quotient(&g, &bumped).unwrap() <= t * (1.0 + 1e-12));
    }

    #[test]
    fn signed_strength_routes_agree(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, -3.0, 3.0);
        let v = classify_positivity(&g).unwrap();
        if !v.indeterminate {
            prop_assert!(v.routes_agree, "{:?}", v);
        }
    }
}

#[test]
fn interval_matrix_matches_closed_form() {
    for (a, a0, a1) in [(1.0, 1.0, 1.0), (0.25, -1.0, 2.0), (2.0, 0.5, 0.0)] {
        let l = assemble_system(&MetricGraph::interval(a, a0, a1))
            .unwrap()
            .row_scaled_matrix();
        let want = [
            [2.0 / a * (1.0 / a + a0), -2.0 / (a * a)],
            [-2.0 / (a * a), 2.0 / a * (1.0 / a + a1)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((l[i][j] - want[i][j]).abs() <= 1e-14 * want[i][j].abs().max(1.0));
            }
        }
    }
}

#[test]
fn interval_positivity_region() {
    // positive iff alpha0 + alpha1 > max(-2/a, -a alpha0 alpha1)
    let g = MetricGraph::interval(0.25, -1.0, 2.0);
    assert_eq!(
        classify_positivity(&g).unwrap().classification,
        Classification::PositiveTorsion
    );
    let g = MetricGraph::interval(1.0, -1.0, 0.5);
    assert_ne!(
        classify_positivity(&g).unwrap().classification,
        Classification::PositiveTorsion
    );
}

#[test]
fn neumann_graph_has_no_torsion() {
    let g = MetricGraph::flower(&[1.0, 2.0], 0.0);
    assert!(matches!(
        torsional_rigidity(&g),
        Err(Error::NoTorsion { .. })
    ));
    assert_eq!(
        classify_positivity(&g).unwrap().classification,
        Classification::NoTorsion
    );
    let balanced = MetricGraph::interval(1.0, 2.0, -2.0 / 3.0);
    assert_eq!(
        classify_positivity(&balanced).unwrap().classification,
        Classification::NoTorsion
    );
}

#[test]
fn dirichlet_interval() {
    use VertexCondition::{Delta, Dirichlet};
    let g = MetricGraph::path(&[2.0], &[Dirichlet, Dirichlet]);
    assert!(rel_err(torsional_rigidity(&g).unwrap(), 8.0 / 12.0) <= 1e-14);
    let g = MetricGraph::path(&[1.0], &[Dirichlet, Delta(0.0)]);
    assert!(rel_err(torsional_rigidity(&g).unwrap(), 1.0 / 3.0) <= 1e-14);
}

#[test]
fn disconnected_graph_is_rejected() {
    let g = MetricGraph::new()
        .with_vertex("a", VertexCondition::Delta(1.0))
        .with_vertex("b", VertexCondition::Delta(1.0))
        .with_edge("e0", "a", "a", 1.0)
        .with_edge("e1", "b", "b", 1.0);
    assert!(matches!(torsional_rigidity(&g), Err(Error::NotConnected)));
}
