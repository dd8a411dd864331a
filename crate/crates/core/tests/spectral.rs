mod common;

use common::{connected, rng};
use proptest::prelude::*;
use qgtorsion::spectral::{
    eigenvalue_count_below, lambda1, lambda1_on_mesh, lambda1_with_cap, secular_lambda1_interval,
    Mesh,
};
use qgtorsion::surgery::set_strength;
use qgtorsion::{Error, MetricGraph, VertexCondition};
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fem_matches_secular(l in 0.3f64..3.0, a0 in 0.05f64..8.0, a1 in 0.0f64..8.0) {
        let g = MetricGraph::interval(l, a0, a1);
        let fem = lambda1(&g, 1e-7).unwrap();
        let exact = secular_lambda1_interval(l, a0, a1).unwrap();
        prop_assert!((fem.lambda1_refined - exact).abs() <= 1e-6, "{} vs {}", fem.lambda1_refined, exact);
        // piecewise-linear FEM approximates from above
        prop_assert!(fem.lambda1 >= exact - 1e-12);
    }

    #[test]
    fn raising_a_strength_raises_lambda1(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 5, 6, 0.0, 3.0);
        let v = g.vertices[0].id.to_string();
        let a = g.vertices[0].condition.strength().unwrap();
        let m = Mesh::uniform(&g, 16);
        let before = lambda1_on_mesh(&g, &m).unwrap();
        let after = lambda1_on_mesh(&set_strength(&g, &v, a + 1.0).unwrap(), &m).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn count_is_monotone_in_the_shift(seed in any::<u64>(), s in 0.0f64..50.0) {
        let g = connected(&mut rng(seed), 5, 6, -1.0, 3.0);
        let m = Mesh::uniform(&g, 8);
        prop_assert!(eigenvalue_count_below(&g, &m, s).unwrap() <= eigenvalue_count_below(&g, &m, s + 5.0).unwrap());
    }
}

#[test]
fn dirichlet_interval_eigenvalue() {
    use VertexCondition::Dirichlet;
    let g = MetricGraph::path(&[1.0], &[Dirichlet, Dirichlet]);
    let r = lambda1(&g, 1e-8).unwrap();
    assert!((r.lambda1_refined - PI * PI).abs() <= 1e-7);
    let o = r.observed_order.unwrap();
    assert!((1.8..=2.2).contains(&o), "{o}");
}

#[test]
fn circle_with_kirchhoff_vertex_has_zero_ground_state() {
    let r = lambda1(&MetricGraph::flower(&[2.0], 0.0), 1e-8).unwrap();
    assert!(r.lambda1_refined.abs() <= 1e-9);
}

#[test]
fn large_strengths_approach_dirichlet() {
    let exact = secular_lambda1_interval(1.0, 1e6, 1e6).unwrap();
    assert!((exact - 9.869564922789825).abs() <= 1e-9 * exact);
    assert!(exact < PI * PI);
}

#[test]
fn negative_ground_state() {
    assert!(matches!(
        secular_lambda1_interval(1.0, -0.5, -0.5),
        Err(Error::NegativeGroundState)
    ));
    let g = MetricGraph::interval(1.0, -0.5, 0.0);
    assert!(lambda1(&g, 1e-6).unwrap().lambda1_refined < 0.0);
}

#[test]
fn budget_is_enforced() {
    let g = MetricGraph::interval(1.0, 1.0, 0.0);
    assert!(matches!(
        lambda1_with_cap(&g, 1e-14, 2000),
        Err(Error::BudgetExceeded { cap: 2000 })
    ));
}
