mod common;

use common::{bridgeless, connected, rng};
use proptest::prelude::*;
use qgtorsion::graph::{is_connected, is_doubly_connected, summarize, validate, Violation};
use qgtorsion::{Error, MetricGraph, VertexCondition};

proptest! {
    #[test]
    fn json_round_trip_is_byte_identical(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, -2.0, 5.0);
        let text = g.to_json();
        let back = MetricGraph::from_json(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn generated_graphs_validate_and_connect(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        prop_assert!(validate(&g).is_empty());
        prop_assert!(is_connected(&g, false));
    }

    #[test]
    fn cycles_with_chords_are_bridgeless(seed in any::<u64>()) {
        let g = bridgeless(&mut rng(seed), 8, 12, 0.0, 5.0);
        prop_assert!(is_doubly_connected(&g).unwrap());
    }

    #[test]
    fn a_pendant_edge_is_a_bridge(seed in any::<u64>()) {
        let mut g = bridgeless(&mut rng(seed), 8, 12, 0.0, 5.0);
        g.add_vertex("tip", VertexCondition::Delta(0.0));
        g.add_edge("pendant", "v0", "tip", 1.0);
        prop_assert!(!is_doubly_connected(&g).unwrap());
    }

    #[test]
    fn ell_degrees_sum_to_twice_the_length(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let s = summarize(&g);
        let total: f64 = s.ell_degree.values().sum();
        prop_assert!((total - 2.0 * s.total_length).abs() <= 1e-12 * s.total_length);
    }
}

#[test]
fn rejects_bad_files() {
    let dangling = r#"{"vertices":[{"id":"a","condition":{"delta":1.0}}],
        "edges":[{"id":"e","tail":"a","head":"b","length":1.0}]}"#;
    match MetricGraph::from_json(dangling) {
        Err(Error::InvalidGraph(v)) => assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DanglingEndpoint { .. }))),
        other => panic!("{other:?}"),
    }
    let negative = r#"{"vertices":[{"id":"a","condition":"dirichlet"}],
        "edges":[{"id":"e","tail":"a","head":"a","length":-1.0}]}"#;
    assert!(matches!(
        MetricGraph::from_json(negative),
        Err(Error::InvalidGraph(_))
    ));
    assert!(matches!(MetricGraph::from_json("{"), Err(Error::Parse(_))));
}

#[test]
fn file_round_trip() {
    let dir = std::env::temp_dir().join(format!("qgtorsion-graph-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let g = MetricGraph::flower(&[1.0, 0.5], 2.0);
    g.save(&path).unwrap();
    assert_eq!(MetricGraph::load(&path).unwrap(), g);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn punctured_circle_is_not_connected() {
    let g = MetricGraph::path(
        &[1.0],
        &[VertexCondition::Dirichlet, VertexCondition::Dirichlet],
    );
    assert!(is_connected(&g, false));
    let circle = MetricGraph::new()
        .with_vertex("d", VertexCondition::Dirichlet)
        .with_vertex("a", VertexCondition::Delta(0.0))
        .with_edge("e0", "d", "a", 1.0)
        .with_edge("e1", "a", "d", 1.0);
    assert!(is_connected(&circle, true));
    let loop_only = MetricGraph::new()
        .with_vertex("d", VertexCondition::Dirichlet)
        .with_edge("e0", "d", "d", 1.0);
    assert!(is_connected(&loop_only, true));
    let two_loops = loop_only.clone().with_edge("e1", "d", "d", 1.0);
    assert!(!is_connected(&two_loops, true));
}
