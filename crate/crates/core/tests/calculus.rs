mod common;

use common::{connected, rel_err, rng};
use proptest::prelude::*;
use qgtorsion::calculus::{fd_check, gradient};
use qgtorsion::torsion::torsional_rigidity;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `T(s l, α / s) = s³ T(l, α)` differentiated at `s = 1`.
    #[test]
    fn euler_identity(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.1, 5.0);
        let grad = gradient(&g).unwrap();
        let by_len: f64 = g.edges.iter().map(|e| e.length * grad.d_by_length[&e.id]).sum();
        let by_str: f64 = g.vertices.iter().map(|v| v.condition.strength().unwrap() * grad.d_by_strength[&v.id]).sum();
        let t = torsional_rigidity(&g).unwrap();
        prop_assert!(rel_err(by_len - by_str, 3.0 * t) <= 1e-10);
    }

    #[test]
    fn signs_of_the_derivatives(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 8, 12, 0.0, 5.0);
        let grad = gradient(&g).unwrap();
        prop_assert!(grad.d_by_length.values().all(|&d| d > 0.0));
        prop_assert!(grad.d_by_strength.values().all(|&d| d < 0.0));
    }

    #[test]
    fn central_differences_agree(seed in any::<u64>()) {
        let g = connected(&mut rng(seed), 6, 8, 0.1, 5.0);
        for row in fd_check(&g, 1e-5).unwrap() {
            prop_assert!(row.relative_error <= 1e-6, "{:?}", row);
        }
    }
}
