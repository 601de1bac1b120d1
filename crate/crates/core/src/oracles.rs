//! Independent desk-scale verifiers for the analytical machinery behind
//! the scheme: the continuous comparison bound, the iterate lower bound,
//! the discrete recurrence bound e_n ≤ M/n^{1−A} with its ζ(1−A) constant,
//! and above/below bracketing of numerical iterates against an exact
//! solution.
//!
//! Everything here is deliberately implemented from scratch, independent
//! of the solver path, so agreement between the two is evidence rather
//! than tautology.

use crate::error::{Result, VolterraError};
use crate::model::Solution;
use crate::quad::DeltaSign;

/// Terms in the accelerated alternating series; error decays like
/// (3+√8)^{−n} ≈ 5.8^{−n}, far below 1e−10 at this depth.
const ZETA_ACCEL_TERMS: usize = 48;
/// Partial sums kept by the repeated-averaging evaluator.
const ZETA_AVG_TERMS: usize = 64;

/// ζ(s) on 0 < s < 1 via the alternating eta series
/// η(s) = Σ (−1)^{k} (k+1)^{−s} with Chebyshev-polynomial acceleration,
/// then ζ(s) = η(s) / (1 − 2^{1−s}).
///
/// Absolute error ≤ 1e−10 on the interval. ζ < 0 on (0,1).
pub fn zeta_open_interval(s: f64) -> Result<f64> {
    eta_checked(s).map(|eta| eta / (1.0 - 2.0f64.powf(1.0 - s)))
}

/// Independent second evaluator: the same eta series summed by repeated
/// averaging of partial sums (Euler transform in its van Wijngaarden
/// form). Used only to cross-validate [`zeta_open_interval`].
pub fn zeta_averaged_series(s: f64) -> Result<f64> {
    check_zeta_domain(s)?;
    let mut row: Vec<f64> = Vec::with_capacity(ZETA_AVG_TERMS);
    let mut partial = 0.0f64;
    for k in 0..ZETA_AVG_TERMS {
        let term = (k as f64 + 1.0).powf(-s);
        partial += if k % 2 == 0 { term } else { -term };
        row.push(partial);
    }
    for len in (1..ZETA_AVG_TERMS).rev() {
        for i in 0..len {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
    }
    Ok(row[0] / (1.0 - 2.0f64.powf(1.0 - s)))
}

fn check_zeta_domain(s: f64) -> Result<()> {
    if !(0.0 < s && s < 1.0) {
        return Err(VolterraError::ZetaDomain(s));
    }
    Ok(())
}

fn eta_checked(s: f64) -> Result<f64> {
    check_zeta_domain(s)?;
    let n = ZETA_ACCEL_TERMS;
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0f64;
    let mut c = -d;
    let mut sum = 0.0f64;
    for k in 0..n {
        let kf = k as f64;
        c = b - c;
        sum += c * (kf + 1.0).powf(-s);
        b *= (kf + n as f64) * (kf - n as f64) / ((kf + 0.5) * (kf + 1.0));
    }
    Ok(sum / d)
}

/// Closed-form constant for the recurrence e_n ≤ (1/n)(A Σ_{i<n} e_i + B):
/// the decay bound is e_n ≤ M · n^{A−1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceBound {
    pub a: f64,
    pub b: f64,
    pub e1: f64,
    /// Constant M: max{e1, B}/(−A·ζ(1−A)) when 0 < A < 1, else max{e1, B}.
    pub m_const: f64,
    /// Decay exponent 1 − A (bound is M / n^{1−A}).
    pub exponent: f64,
}

impl RecurrenceBound {
    /// The bound value M / n^{1−A} at index n.
    pub fn at(&self, n: usize) -> f64 {
        self.m_const * (n as f64).powf(-self.exponent)
    }
}

/// Computes the decay constant M for the recurrence above.
///
/// For 0 < A < 1 the proof constant is max{e1, B}/(−A·ζ(1−A)), with
/// −A·ζ(1−A) ∈ (0, 1); for A ≥ 1 it is max{e1, B}.
pub fn recurrence_bound(a: f64, b: f64, e1: f64) -> Result<RecurrenceBound> {
    if !(a > 0.0) || !(b >= 0.0) || !(e1 >= 0.0) {
        return Err(VolterraError::Invalid(format!(
            "recurrence bound needs A > 0 and B, e1 >= 0; got A={a}, B={b}, e1={e1}"
        )));
    }
    let cap = e1.max(b);
    let m_const = if a < 1.0 {
        let denom = -a * zeta_open_interval(1.0 - a)?;
        debug_assert!(denom > 0.0 && denom < 1.0);
        cap / denom
    } else {
        cap
    };
    Ok(RecurrenceBound {
        a,
        b,
        e1,
        m_const,
        exponent: 1.0 - a,
    })
}

/// The extremal sequence of the recurrence: equality at every step,
/// e_n = (1/n)(A Σ_{i<n} e_i + B). Any admissible sequence (satisfying the
/// inequality with the same A, B, e1) is pointwise dominated by it, so it
/// is the worst case the decay bound must cover.
///
/// Returns e_1..e_{n_max} (index i holds e_{i+1}).
pub fn simulate_recurrence(a: f64, b: f64, e1: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(VolterraError::Invalid(format!(
            "recurrence simulation needs n_max >= 2, got {n_max}"
        )));
    }
    let mut seq = Vec::with_capacity(n_max);
    seq.push(e1);
    let mut sum = e1;
    for n in 2..=n_max {
        let e_n = (a * sum + b) / n as f64;
        if !e_n.is_finite() {
            return Err(VolterraError::Invalid(format!(
                "recurrence overflowed at n = {n} (A = {a})"
            )));
        }
        seq.push(e_n);
        sum += e_n;
    }
    Ok(seq)
}

/// Self-similar comparison value for the power-kernel inequality
/// y^{m+1} ≶ C·x^μ ∫₀ˣ t^ν y(t) dt: the closed form
/// (C·(m/(m+1))/(1+ν+μ/(m+1)))^{1/m} · x^{(1+ν+μ)/m}, which bounds any
/// solution from the side matching the hypothesis direction. With
/// μ = ν = 0 and C = 1 it is the constant-kernel exact solution.
pub fn gronwall_bound(c: f64, mu: f64, nu: f64, m: f64, x: f64) -> Result<f64> {
    if !(c > 0.0) || !(m > 0.0) || !(mu >= 0.0) || !(nu >= 0.0) || !(x >= 0.0) {
        return Err(VolterraError::Invalid(format!(
            "comparison bound needs C, m > 0 and mu, nu, x >= 0; got C={c}, mu={mu}, nu={nu}, m={m}, x={x}"
        )));
    }
    let coeff = (c * (m / (m + 1.0)) / (1.0 + nu + mu / (m + 1.0))).powf(1.0 / m);
    Ok(coeff * x.powf((1.0 + nu + mu) / m))
}

/// The iterate lower bound: its value, the consistency prefactor, and
/// whether the bound is vacuous (prefactor ≤ 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// E(h) = 1 − (m+1)/m · ε(h) · h^{−(m+1)/m}.
    pub prefactor: f64,
    /// The prefactor is ≤ 0: the bound says nothing for this h.
    pub vacuous: bool,
}

/// Lower bound on midpoint iterates for a kernel with C ≤ K:
/// y_n ≥ E(h) · (C·m/(m+1)·nh)^{1/m}, E(h) as above, valid for m ≥ 1.
///
/// A nonpositive prefactor is reported via the `vacuous` flag, not as an
/// error: the hypothesis ε(h)·h^{−(m+1)/m} < 1 can fail for coarse h.
pub fn iteration_lower_bound(c: f64, m: f64, h: f64, eps: f64, n: usize) -> Result<LowerBound> {
    if !(m >= 1.0) {
        return Err(VolterraError::Invalid(format!(
            "iterate lower bound requires m >= 1, got {m}"
        )));
    }
    if !(c > 0.0) || !(h > 0.0) || !(eps >= 0.0) {
        return Err(VolterraError::Invalid(format!(
            "iterate lower bound needs C, h > 0 and eps >= 0; got C={c}, h={h}, eps={eps}"
        )));
    }
    let prefactor = 1.0 - (m + 1.0) / m * eps * h.powf(-(m + 1.0) / m);
    let base = (c * m / (m + 1.0) * n as f64 * h).powf(1.0 / m);
    Ok(LowerBound {
        value: prefactor * base,
        prefactor,
        vacuous: prefactor <= 0.0,
    })
}

/// Which side of the exact solution the iterates are claimed to sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketDirection {
    /// y_n ≥ y(x_n) at every node.
    Above,
    /// y_n ≤ y(x_n) at every node.
    Below,
}

/// Result of a bracketing check: the worst signed violation (positive
/// means the claimed ordering failed by that much) and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketReport {
    pub direction: BracketDirection,
    pub worst_violation: f64,
    pub worst_node: usize,
}

/// Bracketing side implied by the quadrature's δ_n sign and the starting
/// comparison, or `None` when the δ sign is unknown (check skipped).
///
/// δ_n ≤ 0 with y_1 ≥ y(h) keeps the iterates above the solution at every
/// node; δ_n ≥ 0 with y_1 ≤ y(h) keeps them below.
pub fn bracket_direction(delta_sign: DeltaSign, start_overestimates: bool) -> Option<BracketDirection> {
    match (delta_sign, start_overestimates) {
        (DeltaSign::Nonpositive, true) => Some(BracketDirection::Above),
        (DeltaSign::Nonnegative, false) => Some(BracketDirection::Below),
        _ => None,
    }
}

/// Checks the claimed ordering between iterates and the exact solution at
/// every node and reports the worst signed violation.
pub fn check_bracketing<F: Fn(f64) -> f64>(
    sol: &Solution,
    exact: &F,
    direction: BracketDirection,
) -> BracketReport {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_node = 0;
    for n in 0..=sol.grid.panels() {
        let gap = exact(sol.grid.node(n)) - sol.values[n];
        // positive `violation` means the ordering failed at this node
        let violation = match direction {
            BracketDirection::Above => gap,
            BracketDirection::Below => -gap,
        };
        if violation > worst {
            worst = violation;
            worst_node = n;
        }
    }
    BracketReport {
        direction,
        worst_violation: worst,
        worst_node,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{exact_example1, exact_example2};
    use crate::model::{Grid, Kernel, ProblemSpec};
    use crate::quad::epsilon_max;
    use crate::solver::{solve, SolverConfig};

    #[test]
    fn zeta_half_frozen() {
        let z = zeta_open_interval(0.5).unwrap();
        assert!((z - -1.4603545088095868).abs() < 1e-10, "{z}");
    }

    #[test]
    fn zeta_negative_on_interval() {
        for s in [0.1, 0.3, 0.7, 0.9] {
            assert!(zeta_open_interval(s).unwrap() < 0.0, "s = {s}");
        }
    }

    #[test]
    fn zeta_bracket_property() {
        // with A = 1 − s: −1 < A·ζ(1−A) < 0 on the whole interval
        for i in 1..=20 {
            let a = i as f64 / 21.0;
            let v = a * zeta_open_interval(1.0 - a).unwrap();
            assert!(-1.0 < v && v < 0.0, "A = {a}: {v}");
        }
    }

    #[test]
    fn zeta_evaluators_agree() {
        for i in 1..=20 {
            let s = i as f64 / 21.0;
            let a = zeta_open_interval(s).unwrap();
            let b = zeta_averaged_series(s).unwrap();
            assert!((a - b).abs() < 1e-9, "s = {s}: {a} vs {b}");
        }
    }

    #[test]
    fn zeta_domain_enforced() {
        for s in [0.0, 1.0, -0.5, 2.0] {
            assert!(matches!(
                zeta_open_interval(s),
                Err(VolterraError::ZetaDomain(_))
            ));
            assert!(zeta_averaged_series(s).is_err());
        }
    }

    #[test]
    fn recurrence_bound_branches() {
        // A ≥ 1 branch: M = max{e1, B}, growing bound n^{A−1}
        let rb = recurrence_bound(2.0, 1.0, 1.0).unwrap();
        assert_eq!(rb.m_const, 1.0);
        assert_eq!(rb.exponent, -1.0);
        assert_eq!(rb.at(5), 5.0);
        // boundary A = 1: constant bound
        let rb = recurrence_bound(1.0, 0.0, 1.0).unwrap();
        assert_eq!(rb.m_const, 1.0);
        assert_eq!(rb.at(1000), 1.0);
        // 0 < A < 1 branch uses the zeta constant
        let rb = recurrence_bound(0.5, 0.5, 0.5).unwrap();
        assert!((rb.m_const - 0.6847652360899365).abs() < 1e-9, "{}", rb.m_const);
        assert!((rb.at(4) - rb.m_const / 2.0).abs() < 1e-15);
        assert!(recurrence_bound(0.0, 1.0, 1.0).is_err());
        assert!(recurrence_bound(0.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn recurrence_extremal_sequence_hand_values() {
        // A = B = e1 = 1: constant sequence 1, and the bound is tight
        let seq = simulate_recurrence(1.0, 1.0, 1.0, 10).unwrap();
        for e in &seq {
            assert!((e - 1.0).abs() < 1e-15);
        }
        // A=2: e_2 = (2·1 + 1)/2 = 1.5, dominated by bound M·n = 2
        let seq = simulate_recurrence(2.0, 1.0, 1.0, 2).unwrap();
        assert!((seq[1] - 1.5).abs() < 1e-15);
        assert!(seq[1] <= recurrence_bound(2.0, 1.0, 1.0).unwrap().at(2));
        assert!(simulate_recurrence(1.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn recurrence_bound_dominates_simulation() {
        for a in [0.25, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0] {
            let rb = recurrence_bound(a, 1.0, 1.0).unwrap();
            let seq = simulate_recurrence(a, 1.0, 1.0, 10_000).unwrap();
            for (i, e) in seq.iter().enumerate() {
                let n = i + 1;
                let scaled = e * (n as f64).powf(rb.exponent);
                assert!(
                    scaled <= rb.m_const * (1.0 + 1e-12),
                    "A = {a}, n = {n}: {scaled} > {}",
                    rb.m_const
                );
            }
        }
    }

    #[test]
    fn gronwall_bound_reduces_to_constant_kernel_solution() {
        for m in [1.0, 1.5, 2.0, 10.0, 100.0] {
            for x in [0.0, 1e-6, 0.001, 0.5, 1.0] {
                let g = gronwall_bound(1.0, 0.0, 0.0, m, x).unwrap();
                let e = exact_example1(m, x);
                assert!((g - e).abs() <= 1e-14 * e.abs(), "m={m} x={x}: {g} vs {e}");
            }
        }
        let g = gronwall_bound(1.0, 0.0, 0.0, 2.0, 0.001).unwrap();
        assert!((g - 2.5819888974716113e-2).abs() < 1e-15);
        assert!(gronwall_bound(-1.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gronwall_bound_is_example2_lower_bound() {
        // e^{x−t} ≥ 1, so the convolution-kernel solution dominates the
        // constant-kernel comparison value on the matching side
        for m in [1.0, 2.0, 10.0] {
            for i in 1..=10 {
                let x = 0.0001 * i as f64;
                let lb = gronwall_bound(1.0, 0.0, 0.0, m, x).unwrap();
                assert!(exact_example2(m, x) >= lb, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn lower_bound_prefactor_cases() {
        // eps = 0 collapses the prefactor to 1 and the bound to the
        // constant-kernel exact solution at nh
        let lb = iteration_lower_bound(1.0, 2.0, 0.01, 0.0, 7).unwrap();
        assert_eq!(lb.prefactor, 1.0);
        assert!(!lb.vacuous);
        assert!((lb.value - exact_example1(2.0, 0.07)).abs() < 1e-16);
        // large eps flags the bound as vacuous instead of erroring
        let lb = iteration_lower_bound(1.0, 2.0, 0.01, 1.0, 7).unwrap();
        assert!(lb.vacuous);
        assert!(lb.prefactor <= 0.0);
        assert!(iteration_lower_bound(1.0, 0.5, 0.01, 0.0, 1).is_err());
    }

    #[test]
    fn solver_attains_lower_bound_exactly_at_m1() {
        // K≡1, m=1: ε(h) = 0 and the extrapolated start reproduces y(h),
        // so iterates equal the bound nh/2
        let spec = ProblemSpec::new(1.0, Kernel::Constant(1.0), 1.0).unwrap();
        let grid = Grid::new(1.0, 100).unwrap();
        let sol = solve(&SolverConfig::new(spec, grid).with_richardson(true)).unwrap();
        // exact up to rounding for linear integrands
        assert!(epsilon_max(grid.step(), 1.0, 100).unwrap() <= 1e-14);
        for n in 1..=100 {
            let lb = iteration_lower_bound(1.0, 1.0, grid.step(), 0.0, n).unwrap();
            assert!((sol.values[n] - lb.value).abs() <= 1e-14, "n = {n}");
        }
    }

    #[test]
    fn solver_dominates_lower_bound_m2() {
        let m = 2.0;
        let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0).unwrap();
        let grid = Grid::new(1.0, 100).unwrap();
        let h = grid.step();
        let sol = solve(&SolverConfig::new(spec, grid)).unwrap();
        let eps = epsilon_max(h, m, 100).unwrap();
        for n in 1..=100 {
            let lb = iteration_lower_bound(1.0, m, h, eps, n).unwrap();
            assert!(!lb.vacuous);
            assert!(sol.values[n] >= lb.value, "n = {n}");
        }
    }

    #[test]
    fn bracketing_above_for_concave_solutions() {
        for m in [1.0, 2.0, 10.0] {
            let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0).unwrap();
            let grid = Grid::new(1.0, 256).unwrap();
            let sol = solve(&SolverConfig::new(spec, grid)).unwrap();
            let rep = check_bracketing(&sol, &|x| exact_example1(m, x), BracketDirection::Above);
            assert!(rep.worst_violation <= 1e-13, "m = {m}: {:?}", rep);
        }
    }

    #[test]
    fn bracketing_equality_and_injected_fault() {
        let m = 2.0;
        let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0).unwrap();
        let grid = Grid::new(1.0, 16).unwrap();
        let mut sol = solve(&SolverConfig::new(spec, grid)).unwrap();
        for n in 0..=16 {
            sol.values[n] = exact_example1(m, grid.node(n));
        }
        let rep = check_bracketing(&sol, &|x| exact_example1(m, x), BracketDirection::Above);
        assert_eq!(rep.worst_violation, 0.0);
        // a deliberate dip below the exact curve must be found and located
        sol.values[5] -= 1e-3;
        let rep = check_bracketing(&sol, &|x| exact_example1(m, x), BracketDirection::Above);
        assert_eq!(rep.worst_node, 5);
        assert!((rep.worst_violation - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn bracket_direction_dispatch() {
        assert_eq!(
            bracket_direction(DeltaSign::Nonpositive, true),
            Some(BracketDirection::Above)
        );
        assert_eq!(
            bracket_direction(DeltaSign::Nonnegative, false),
            Some(BracketDirection::Below)
        );
        assert_eq!(bracket_direction(DeltaSign::Unknown, true), None);
        assert_eq!(bracket_direction(DeltaSign::Nonpositive, false), None);
    }
}
