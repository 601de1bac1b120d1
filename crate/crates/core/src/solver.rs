//! The explicit iteration: starting value y_1, optional Richardson
//! extrapolation of it, and the node-by-node advance
//! y_n = rhs(n)^{1/(m+1)}.
//!
//! The equation has the trivial solution y ≡ 0; starting with the positive
//! rectangle-rule overestimate y_1 = (∫₀^h K(h,t) dt)^{1/m} ≥ y(h) forces
//! convergence to the nontrivial solution.

use crate::error::{Result, VolterraError};
use crate::integrate::adaptive_simpson;
use crate::model::{Grid, ProblemSpec, Solution, SolutionMeta, StartRule};
use crate::quad::{generic_rhs, midpoint_rhs, WeightRule};

/// Configuration of one solver run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub spec: ProblemSpec,
    pub grid: Grid,
    /// Quadrature rule; `None` selects the built-in midpoint scheme.
    pub rule: Option<WeightRule>,
    /// Richardson-extrapolate the starting value (off by default).
    pub richardson: bool,
    /// Replaces the computed starting value when set. Must be ≥ 0;
    /// zero collapses the iteration onto the trivial solution.
    pub start_override: Option<f64>,
}

impl SolverConfig {
    pub fn new(spec: ProblemSpec, grid: Grid) -> Self {
        Self {
            spec,
            grid,
            rule: None,
            richardson: false,
            start_override: None,
        }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn with_rule(mut self, rule: WeightRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn with_start_override(mut self, y1: f64) -> Self {
        self.start_override = Some(y1);
        self
    }
}

/// Outcome of the Richardson starting-value computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartValue {
    pub value: f64,
    /// The extrapolated value fell below the iterate lower bound and was
    /// replaced by it.
    pub clamped: bool,
    /// Extrapolation was numerically unusable (2^{1/m} − 1 underflow) and
    /// the plain starting value was used instead.
    pub fell_back: bool,
}

/// Starting value y_1 = (∫₀^h K(h,t) dt)^{1/m}.
///
/// The integral is evaluated in closed form for the built-in kernels and
/// by adaptive refinement (1e-14 relative) otherwise. By the rectangle
/// overestimate this guarantees y_1 ≥ y(h): y is increasing and K positive.
pub fn initial_value(spec: &ProblemSpec, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(VolterraError::Invalid(format!("step must be positive, got {h}")));
    }
    let integral = match spec.kernel() {
        crate::model::Kernel::Constant(c) => c * h,
        crate::model::Kernel::ExpConvolution => h.exp_m1(),
        crate::model::Kernel::Power { coeff, mu, nu } => {
            coeff * h.powf(mu + nu + 1.0) / (nu + 1.0)
        }
        kernel => {
            let scale = kernel.eval_unchecked(h, 0.5 * h).abs() * h;
            adaptive_simpson(
                &|t| kernel.eval_unchecked(h, t),
                0.0,
                h,
                (1e-14 * scale).max(f64::MIN_POSITIVE),
            )?
        }
    };
    if !(integral > 0.0) {
        return Err(VolterraError::KernelBound(integral));
    }
    Ok(integral.powf(1.0 / spec.m()))
}

/// Richardson extrapolation of the starting value with the known leading
/// error exponent q = 1/m: y* = (2^q·v(h/2) − v(h)) / (2^q − 1).
///
/// The result is clamped from below to (C·m/(m+1)·h)^{1/m} — the ε(h)→0
/// form of the iterate lower bound, which dominates the bound for any
/// ε(h) ≥ 0 — so convergence-forcing is preserved. For a constant kernel
/// the clamp value is the exact y(h).
pub fn richardson_initial(spec: &ProblemSpec, h: f64) -> Result<StartValue> {
    let q = 1.0 / spec.m();
    let denom = 2.0f64.powf(q) - 1.0;
    if !(denom > 1e-12) {
        return Ok(StartValue {
            value: initial_value(spec, h)?,
            clamped: false,
            fell_back: true,
        });
    }
    let v_h = initial_value(spec, h)?;
    let v_half = initial_value(spec, h / 2.0)?;
    let extrapolated = (2.0f64.powf(q) * v_half - v_h) / denom;
    let (c_low, _) = spec.bounds();
    let m = spec.m();
    let lower = (c_low * m / (m + 1.0) * h).powf(1.0 / m);
    if extrapolated < lower {
        Ok(StartValue {
            value: lower,
            clamped: true,
            fell_back: false,
        })
    } else {
        Ok(StartValue {
            value: extrapolated,
            clamped: false,
            fell_back: false,
        })
    }
}

/// Runs the explicit scheme: y_0 = 0, y_1 from the configured start rule,
/// then y_n = rhs(n)^{1/(m+1)} for n = 2..N.
///
/// Deterministic: identical configurations produce bit-identical arrays.
pub fn solve(cfg: &SolverConfig) -> Result<Solution> {
    let n_panels = cfg.grid.panels();
    let m = cfg.spec.m();
    let h = cfg.grid.step();

    let (y1, start_rule) = match cfg.start_override {
        Some(v) if v < 0.0 => {
            return Err(VolterraError::Invalid(format!(
                "start override must be nonnegative, got {v}"
            )))
        }
        Some(v) => (v, StartRule::Override),
        None if cfg.richardson => (richardson_initial(&cfg.spec, h)?.value, StartRule::Richardson),
        None => (initial_value(&cfg.spec, h)?, StartRule::RectangleOverestimate),
    };

    let mut values = vec![0.0f64; n_panels + 1];
    values[1] = y1;
    let root_exp = 1.0 / (m + 1.0);
    for n in 2..=n_panels {
        let rhs = match &cfg.rule {
            Some(rule) => generic_rhs(n, &values, &cfg.spec, &cfg.grid, rule)?,
            None => midpoint_rhs(n, &values, &cfg.spec, &cfg.grid)?,
        };
        if rhs < 0.0 || !rhs.is_finite() {
            return Err(VolterraError::SolverAbort {
                index: n,
                reason: format!("right-hand side {rhs} (requires a finite, nonnegative value)"),
            });
        }
        // (m+1)-th root in log space
        let y_n = if rhs == 0.0 {
            0.0
        } else {
            (rhs.ln() * root_exp).exp()
        };
        if !y_n.is_finite() {
            return Err(VolterraError::SolverAbort {
                index: n,
                reason: format!("iterate overflowed to {y_n}"),
            });
        }
        values[n] = y_n;
    }

    if y1 > 0.0 {
        if let Some(n) = (1..=n_panels).find(|&n| !(values[n] > 0.0)) {
            return Err(VolterraError::SolverAbort {
                index: n,
                reason: "positivity lost despite a positive start".into(),
            });
        }
    }

    let scheme = cfg
        .rule
        .as_ref()
        .map(|r| r.name.clone())
        .unwrap_or_else(|| "midpoint".into());
    Ok(Solution {
        grid: cfg.grid,
        values,
        m,
        meta: SolutionMeta {
            scheme,
            start_rule,
            richardson: cfg.richardson,
        },
    })
}

/// Solves and maps back to the original unknown u_n = y_n^{m+1}.
pub fn solve_original(cfg: &SolverConfig) -> Result<Vec<f64>> {
    Ok(solve(cfg)?.to_original_form())
}
