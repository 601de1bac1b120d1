//! Randomized property checks across the library: algebraic identities,
//! bound domination, and agreement between independent code paths.

use proptest::prelude::*;

use volterra_core::analysis::{estimate_order, exact_example1};
use volterra_core::model::{Grid, Kernel, ProblemSpec};
use volterra_core::oracles::{gronwall_bound, recurrence_bound, simulate_recurrence};
use volterra_core::quad::{generic_rhs, midpoint_rhs, WeightRule};

proptest! {
    #[test]
    fn original_form_roundtrip(u in 1e-12f64..1e6, m in 1.0f64..100.0) {
        // u ↦ y = u^{1/(m+1)} ↦ y^{m+1} recovers u
        let y = u.powf(1.0 / (m + 1.0));
        let back = y.powf(m + 1.0);
        prop_assert!((back - u).abs() <= 1e-13 * u);
    }

    #[test]
    fn builtin_kernel_bounds_hold(
        x in 0.0f64..1.0,
        frac in 0.0f64..1.0,
        c in 0.1f64..10.0,
    ) {
        let t = frac * x;
        for kernel in [Kernel::Constant(c), Kernel::ExpConvolution] {
            let (lo, hi) = kernel.bounds(1.0).unwrap();
            let v = kernel.eval(x, t).unwrap();
            prop_assert!(lo <= v && v <= hi, "{kernel:?} at ({x}, {t}): {v} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn midpoint_weights_positive_and_bounded(m in 0.1f64..1000.0, n in 2usize..200) {
        let rule = WeightRule::midpoint(m);
        let weights = rule.node_weights(n);
        prop_assert!(!weights.is_empty());
        for (i, w) in weights {
            prop_assert!(i >= 1 && i < n);
            prop_assert!(w > 0.0 && w <= rule.w_max);
        }
    }

    #[test]
    fn generic_rule_reproduces_midpoint(
        m in 1.0f64..50.0,
        seed in any::<u64>(),
        n in 2usize..40,
    ) {
        // pseudo-random positive history from the seed
        let mut state = seed | 1;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            1e-3 + (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let history: Vec<f64> = (0..=n).map(|_| next()).collect();
        let spec = ProblemSpec::new(m, Kernel::ExpConvolution, 1.0).unwrap();
        let grid = Grid::new(1.0, 40).unwrap();
        let rule = WeightRule::midpoint(m);
        let a = midpoint_rhs(n, &history, &spec, &grid).unwrap();
        let b = generic_rhs(n, &history, &spec, &grid, &rule).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
    }

    #[test]
    fn regression_recovers_power_laws(p in 0.05f64..4.0, scale in 0.1f64..100.0) {
        let samples: Vec<(f64, f64)> = (1..=12)
            .map(|j| {
                let h = 0.5f64.powi(j);
                (h, scale * h.powf(p))
            })
            .collect();
        let (slope, r2) = estimate_order(&samples).unwrap();
        prop_assert!((slope - p).abs() < 1e-12, "p = {p}: slope {slope}");
        prop_assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recurrence_bound_dominates_extremal_sequence(
        a in 0.05f64..2.0,
        b in 0.0f64..10.0,
        e1 in 1e-6f64..10.0,
    ) {
        let bound = recurrence_bound(a, b, e1).unwrap();
        let seq = simulate_recurrence(a, b, e1, 2_000).unwrap();
        for (i, e) in seq.iter().enumerate() {
            let n = i + 1;
            prop_assert!(
                *e <= bound.at(n) * (1.0 + 1e-12),
                "A={a} B={b} e1={e1} n={n}: {e} > {}",
                bound.at(n)
            );
        }
    }

    #[test]
    fn comparison_bound_equals_constant_kernel_solution(
        m in 0.1f64..500.0,
        x in 0.0f64..10.0,
    ) {
        let g = gronwall_bound(1.0, 0.0, 0.0, m, x).unwrap();
        let e = exact_example1(m, x);
        prop_assert!((g - e).abs() <= 1e-14 * e.abs());
    }
}
