//! Quadrature layer: the parity-aware midpoint rule, generic weight rules,
//! and the local consistency errors δ(h) and ε(h).
//!
//! The discretization is
//!
//! ```text
//! ∫₀^{x_n} K(x_n,t) y(t) dt = h Σ_{i=1}^{n-1} w_{n,i} K_{n,i} y(x_i) + δ_n(h),
//! ```
//!
//! with weights 0 < w_{n,i} ≤ W. The midpoint rule covers [0, x_n] with
//! panels of width 2h whose midpoints are grid nodes; whether the terminal
//! node is a panel midpoint depends on the parity of n, so even and odd
//! chains carry different weight patterns. On the odd chain the leading
//! interval [0, h] is integrated with weight m/(m+1) on y_1 — the exact
//! integral of the local behavior y ∝ t^{1/m} — which keeps δ_n ≤ 0 for
//! concave solutions (m ≥ 1) and reduces to the trapezoid value h·y_1/2
//! at m = 1.

use std::sync::Arc;

use crate::error::{Result, VolterraError};
use crate::integrate::adaptive_simpson;
use crate::model::{Grid, ProblemSpec};

/// Known sign of the local consistency error δ_n(h) under a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSign {
    Nonpositive,
    Nonnegative,
    Unknown,
}

/// A quadrature weight pattern w_{n,i} for the scheme's right-hand side.
///
/// `node_weights(n)` lists the active summands (i, w_{n,i}) for node n in
/// ascending index order; every listed weight must lie in (0, w_max].
#[derive(Clone)]
pub struct WeightRule {
    pub name: String,
    /// Uniform upper bound W on the weights.
    pub w_max: f64,
    pub delta_sign: DeltaSign,
    weights: Arc<dyn Fn(usize) -> Vec<(usize, f64)> + Send + Sync>,
}

impl std::fmt::Debug for WeightRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightRule({:?}, W={})", self.name, self.w_max)
    }
}

/// Weight on the leading [0, h] interval of the odd chain.
#[inline]
fn first_panel_weight(m: f64) -> f64 {
    m / (m + 1.0)
}

fn midpoint_pairs(n: usize, m: f64) -> impl Iterator<Item = (usize, f64)> {
    let k = n % 2;
    let head = (k == 1).then(|| (1usize, first_panel_weight(m)));
    let first_mid = if k == 1 { 2 } else { 1 };
    head.into_iter()
        .chain((first_mid..n).step_by(2).map(|i| (i, 2.0)))
}

impl WeightRule {
    pub fn from_fn<F>(name: impl Into<String>, w_max: f64, delta_sign: DeltaSign, f: F) -> Self
    where
        F: Fn(usize) -> Vec<(usize, f64)> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            w_max,
            delta_sign,
            weights: Arc::new(f),
        }
    }

    /// The parity-aware midpoint rule for exponent m. W = 2.
    ///
    /// δ_n ≤ 0 holds for the concave power-type solutions (m ≥ 1); for
    /// 0 < m < 1 the sign is not guaranteed.
    pub fn midpoint(m: f64) -> Self {
        let sign = if m >= 1.0 {
            DeltaSign::Nonpositive
        } else {
            DeltaSign::Unknown
        };
        Self::from_fn("midpoint", 2.0, sign, move |n| {
            midpoint_pairs(n, m).collect()
        })
    }

    /// Left-rectangle rule, w ≡ 1. W = 1.
    pub fn rectangle() -> Self {
        Self::from_fn("rectangle", 1.0, DeltaSign::Unknown, |n| {
            (1..n).map(|i| (i, 1.0)).collect()
        })
    }

    /// Active summands (i, w_{n,i}) for node n, ascending in i.
    pub fn node_weights(&self, n: usize) -> Vec<(usize, f64)> {
        (self.weights)(n)
    }
}

/// Kahan-compensated sum of h · Σ w_i · K(x_n, x_i) · y_i over the pairs.
fn weighted_sum(
    pairs: impl Iterator<Item = (usize, f64)>,
    history: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    n: usize,
    check_positive: bool,
) -> Result<f64> {
    let x_n = grid.node(n);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (i, w) in pairs {
        if check_positive && !(w > 0.0) {
            return Err(VolterraError::NonPositiveWeight { n, i, w });
        }
        let term = w * spec.kernel().eval_unchecked(x_n, grid.node(i)) * history[i];
        let t = term - comp;
        let s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    Ok(grid.step() * sum)
}

/// Right-hand side of the midpoint scheme at node n ≥ 2:
/// the (m+1)-th power of y_n given the history y_0..y_{n-1}.
pub fn midpoint_rhs(n: usize, history: &[f64], spec: &ProblemSpec, grid: &Grid) -> Result<f64> {
    if n < 2 {
        return Err(VolterraError::NodeOutOfRange(n));
    }
    debug_assert!(history.len() >= n);
    weighted_sum(midpoint_pairs(n, spec.m()), history, spec, grid, n, false)
}

/// Right-hand side h · Σ_{i=1}^{n-1} w_{n,i} K_{n,i} y_i for an arbitrary
/// weight rule. Rejects nonpositive weights.
pub fn generic_rhs(
    n: usize,
    history: &[f64],
    spec: &ProblemSpec,
    grid: &Grid,
    rule: &WeightRule,
) -> Result<f64> {
    if n < 2 {
        return Err(VolterraError::NodeOutOfRange(n));
    }
    weighted_sum(
        rule.node_weights(n).into_iter(),
        history,
        spec,
        grid,
        n,
        true,
    )
}

/// Per-node consistency errors δ_n(h) and their maximum δ(h).
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// Node index of `per_node[0]` (the scheme starts at n = 2).
    pub first_node: usize,
    pub per_node: Vec<f64>,
    /// δ(h) = max_n |δ_n(h)|.
    pub delta_max: f64,
}

/// Local consistency errors of `rule` against a known exact solution:
/// δ_n(h) = ∫₀^{x_n} K(x_n,t)·exact(t) dt − h Σ w_{n,i} K_{n,i} exact(x_i).
///
/// Reference integrals are computed by adaptive bisection to 1e-13
/// absolute, an order below the smallest scheme error measured here.
pub fn delta_report<F: Fn(f64) -> f64>(
    exact: &F,
    spec: &ProblemSpec,
    grid: &Grid,
    rule: &WeightRule,
) -> Result<ConsistencyReport> {
    const REF_TOL: f64 = 1e-13;
    let n_panels = grid.panels();
    let exact_nodes: Vec<f64> = grid.nodes().map(exact).collect();
    let mut per_node = Vec::with_capacity(n_panels - 1);
    let mut delta_max = 0.0f64;
    for n in 2..=n_panels {
        let x_n = grid.node(n);
        let kernel = spec.kernel();
        let reference =
            adaptive_simpson(&|t| kernel.eval_unchecked(x_n, t) * exact(t), 0.0, x_n, REF_TOL)?;
        let q = weighted_sum(
            rule.node_weights(n).into_iter(),
            &exact_nodes,
            spec,
            grid,
            n,
            true,
        )?;
        let d = reference - q;
        delta_max = delta_max.max(d.abs());
        per_node.push(d);
    }
    Ok(ConsistencyReport {
        first_node: 2,
        per_node,
        delta_max,
    })
}

/// ε(h): the maximal consistency error of the midpoint quadrature applied
/// to t^{1/m}, against the exact antiderivative (m/(m+1))·x^{(m+1)/m}.
///
/// This is the quantity controlling the iterate-lower-bound prefactor
/// E(h) = 1 − (m+1)/m · ε(h)·h^{−(m+1)/m}.
pub fn epsilon_max(h: f64, m: f64, n_panels: usize) -> Result<f64> {
    if !(m > 0.0) {
        return Err(VolterraError::NonPositiveExponent(m));
    }
    if n_panels < 2 || n_panels % 2 != 0 {
        return Err(VolterraError::BadPanelCount(n_panels));
    }
    let p = 1.0 / m;
    let exact = |x: f64| m / (m + 1.0) * x.powf((m + 1.0) / m);
    let vals: Vec<f64> = (0..=n_panels).map(|i| (i as f64 * h).powf(p)).collect();
    let w1 = first_panel_weight(m);
    // running sums over the two parity classes
    let mut sum_odd = vals[1];
    let mut sum_even = 0.0f64;
    let mut worst = 0.0f64;
    for n in 2..=n_panels {
        let q = if n % 2 == 1 {
            h * (w1 * vals[1] + 2.0 * sum_even)
        } else {
            h * 2.0 * sum_odd
        };
        worst = worst.max((exact(n as f64 * h) - q).abs());
        if n % 2 == 0 {
            sum_even += vals[n];
        } else {
            sum_odd += vals[n];
        }
    }
    Ok(worst)
}

/// Bounded-variation local error bound for the midpoint rule on one [0, h]
/// panel applied to t^{1/m}: (h/2)·V₀^h(t^{1/m}) = (h/2)·h^{1/m}.
///
/// Requires m ≥ 1 so that t^{1/m} is monotone with total variation h^{1/m}.
pub fn bv_local_error_bound(h: f64, m: f64) -> Result<f64> {
    if !(m >= 1.0) {
        return Err(VolterraError::Invalid(format!(
            "bounded-variation bound requires m >= 1, got {m}"
        )));
    }
    Ok(0.5 * h * h.powf(1.0 / m))
}
