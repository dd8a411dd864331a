mod common;

use common::{bridgeless, connected, rng};
use proptest::prelude::*;
use qgtorsion::bounds::{
    bounds_report, doubly_connected_upper_bound, flower_lower_bound, kohler_jobin_explorer,
    kohler_jobin_limit, saint_venant_upper_bound,
};
use qgtorsion::fixtures::load_fixture;
use qgtorsion::MetricGraph;

proptest! {
    #[test]
    fn two_sided_bounds_hold(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let lo = flower_lower_bound(&g).unwrap();
        let hi = saint_venant_upper_bound(&g).unwrap();
        prop_assert_eq!(lo.pass, Some(true));
        prop_assert_eq!(hi.pass, Some(true));
        prop_assert!(lo.rhs == hi.lhs);
    }

    #[test]
    fn bridgeless_bound_holds(seed in any::<u64>()) {
        let g = bridgeless(&mut rng(seed), 8, 12, 0.0, 5.0);
        prop_assert_eq!(doubly_connected_upper_bound(&g).unwrap().pass, Some(true));
    }

    #[test]
    fn equality_flags_only_on_extremizers(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let lo = flower_lower_bound(&g).unwrap();
        if lo.equality_case {
            prop_assert!(g.vertices.len() == 1 && lo.saturated());
        }
        let hi = saint_venant_upper_bound(&g).unwrap();
        if hi.equality_case {
            prop_assert!(hi.saturated());
        }
    }
}

#[test]
fn documented_extremizers_saturate() {
    let flower = flower_lower_bound(&load_fixture("equilateral-flower").unwrap().graph).unwrap();
    assert!(flower.equality_case && flower.saturated());
    let path = saint_venant_upper_bound(&load_fixture("concentrated-path").unwrap().graph).unwrap();
    assert!(path.equality_case && path.saturated());
    let circle =
        doubly_connected_upper_bound(&load_fixture("concentrated-circle").unwrap().graph).unwrap();
    assert!(circle.equality_case);
    assert!(circle.margin.unwrap().abs() <= 1e-9 * circle.rhs.unwrap());
}

#[test]
fn report_serializes() {
    let rep = bounds_report(&load_fixture("concentrated-path").unwrap().graph).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 5);
    assert!(rep.all_pass());
}

#[test]
fn signed_strengths_are_informational() {
    let rep = bounds_report(&MetricGraph::interval(0.25, -1.0, 2.0)).unwrap();
    assert!(rep
        .records
        .iter()
        .all(|r| !r.hypothesis_ok && r.pass.is_none()));
}

#[test]
fn explorer_table() {
    let rows = kohler_jobin_explorer(&[1.0, 2.0], &[1.0, 1e6]).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.proxy_below_product));
    assert!((rows[1].proxy - kohler_jobin_limit()).abs() <= 1e-4);
    assert!(rows
        .iter()
        .filter(|r| r.length >= 1.0)
        .all(|r| r.constrained_holds == Some(true)));
}
