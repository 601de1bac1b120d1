//! Error measurement and convergence-order analysis: closed-form reference
//! solutions, pointwise error at a grid node, log-log regression of the
//! empirical order, the theoretical order bound, and step-halving sweeps.

use crate::error::{Result, VolterraError};
use crate::model::{Grid, ProblemSpec, Solution};
use crate::solver::{solve, SolverConfig};

/// Samples with errors below this multiple of machine epsilon (scaled by
/// the solution magnitude) sit at the rounding floor and are excluded from
/// the regression.
const EXACTNESS_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Empirical convergence order from a step-size ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Least-squares slope of ln(error) against ln(h), with the r² of the fit.
    Fitted { slope: f64, r2: f64 },
    /// Every sample sat at the rounding floor: the scheme integrates this
    /// problem exactly and no finite order is observable.
    ExactIntegration,
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceSample {
    pub h: f64,
    pub n_panels: usize,
    /// |exact(x*) − y_{x*/h}|.
    pub error: f64,
}

/// Result of a step-halving convergence sweep at a fixed evaluation point.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub eval_point: f64,
    pub samples: Vec<ConvergenceSample>,
    pub fitted: OrderEstimate,
    /// Order exponent from the a-priori bound; may be ≤ 0 (no guarantee).
    pub theoretical_order: f64,
    /// Set when a solve failed mid-sweep; partial samples are retained.
    pub aborted: Option<String>,
}

/// Leading behavior y(x) ~ coeff · x^exponent as x → 0⁺ for a kernel with
/// K(x,t) ~ C·x^μ near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticForm {
    pub coeff: f64,
    pub exponent: f64,
}

impl AsymptoticForm {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * x.powf(self.exponent)
    }
}

/// Exact solution of y^{m+1} = ∫₀ˣ y dt (constant kernel K ≡ 1):
/// y(x) = (m/(m+1) · x)^{1/m}.
pub fn exact_example1(m: f64, x: f64) -> f64 {
    (m / (m + 1.0) * x).powf(1.0 / m)
}

/// Exact solution for the convolution kernel K = e^{x−t}:
/// y(x) = e^{x/(m+1)} (1 − e^{−m x/(m+1)})^{1/m}, with the inner difference
/// computed as −expm1(−m x/(m+1)) to avoid cancellation at small x.
pub fn exact_example2(m: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let a = x / (m + 1.0);
    a.exp() * (-(-m * a).exp_m1()).powf(1.0 / m)
}

/// |exact(x*) − y_{n*}| with n* = x*/h. The point must be a grid node;
/// no interpolation is performed.
pub fn error_at<F: Fn(f64) -> f64>(sol: &Solution, exact: &F, x_star: f64) -> Result<f64> {
    let h = sol.grid.step();
    let n = (x_star / h).round();
    let on_node = n >= 0.0
        && (n as usize) <= sol.grid.panels()
        && (x_star - n * h).abs() <= 1e-9 * h.max(x_star.abs());
    if !on_node {
        return Err(VolterraError::OffGridPoint(x_star));
    }
    Ok((exact(x_star) - sol.values[n as usize]).abs())
}

/// Ordinary least-squares slope and r² of ln e against ln h.
///
/// Requires at least two samples with positive error and distinct steps.
pub fn estimate_order(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(_, e)| e > 0.0)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(VolterraError::Invalid(
            "order regression needs at least two samples with positive error".into(),
        ));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(VolterraError::Invalid(
            "order regression needs distinct step sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, r2))
}

/// Regression with a rounding-floor cutoff: samples with error ≤ `floor`
/// are excluded; when fewer than two remain the problem is integrated
/// exactly at this precision and [`OrderEstimate::ExactIntegration`] is
/// returned instead of a meaningless slope.
pub fn estimate_order_with_floor(samples: &[(f64, f64)], floor: f64) -> Result<OrderEstimate> {
    let kept: Vec<(f64, f64)> = samples.iter().copied().filter(|&(_, e)| e > floor).collect();
    if kept.len() < 2 {
        return Ok(OrderEstimate::ExactIntegration);
    }
    let (slope, r2) = estimate_order(&kept)?;
    Ok(OrderEstimate::Fitted { slope, r2 })
}

/// A-priori convergence-order exponent 1 − (1/m)(W·D/C) + min(p, q − 1)
/// where W bounds the quadrature weights, C ≤ K ≤ D, p is the h-exponent
/// of the starting error and q the h-exponent of δ(h).
///
/// For the midpoint scheme on a constant kernel (W = 2, D = C, p = 1/m,
/// q = 1 + 1/m) this collapses to 1 − 1/m. A nonpositive result means the
/// bound is vacuous; it is returned as-is for the caller to flag.
pub fn theoretical_order(m: f64, w: f64, d: f64, c: f64, p: f64, delta_exp: f64) -> f64 {
    1.0 - (w * d / c) / m + p.min(delta_exp - 1.0)
}

/// Variant with an explicit consistency prefactor E(h) ∈ (0, 1]: the kernel
/// ratio is amplified to W·D/(C·E(h)).
pub fn theoretical_order_with_prefactor(
    m: f64,
    w: f64,
    d: f64,
    c: f64,
    p: f64,
    delta_exp: f64,
    e_h: f64,
) -> f64 {
    theoretical_order(m, w, d / e_h, c, p, delta_exp)
}

/// Small-x asymptotic form of the solution for a kernel behaving like
/// C·x^μ near the origin: y(x) ~ (C·m/(m+1)·1/(1+μ/(m+1)))^{1/m}·x^{(1+μ)/m}.
pub fn asymptotic_form(c: f64, mu: f64, m: f64) -> AsymptoticForm {
    AsymptoticForm {
        coeff: (c * (m / (m + 1.0)) / (1.0 + mu / (m + 1.0))).powf(1.0 / m),
        exponent: (1.0 + mu) / m,
    }
}

/// Step-halving sweep with the default (rectangle-overestimate) start.
/// See [`convergence_sweep_with`].
pub fn convergence_sweep<F: Fn(f64) -> f64>(
    spec: &ProblemSpec,
    x_star: f64,
    depths: &[u32],
    exact: &F,
) -> Result<ConvergenceReport> {
    convergence_sweep_with(spec, x_star, depths, exact, false)
}

/// Solves on [0, x*] with N = 2^j panels for each depth j, records the
/// error at the final node, fits the empirical order (excluding samples at
/// the rounding floor), and attaches the a-priori order exponent.
///
/// A solve failure aborts the sweep; partial samples are retained and the
/// failure recorded in `aborted`.
pub fn convergence_sweep_with<F: Fn(f64) -> f64>(
    spec: &ProblemSpec,
    x_star: f64,
    depths: &[u32],
    exact: &F,
    richardson: bool,
) -> Result<ConvergenceReport> {
    if !(x_star > 0.0) {
        return Err(VolterraError::NonPositiveInterval(x_star));
    }
    let local = spec.with_interval(x_star)?;
    let m = local.m();
    let (c, d) = local.bounds();
    let theoretical = theoretical_order(m, 2.0, d, c, 1.0 / m, 1.0 + 1.0 / m);

    let mut samples = Vec::with_capacity(depths.len());
    let mut aborted = None;
    for &j in depths {
        if j == 0 {
            return Err(VolterraError::BadPanelCount(1));
        }
        let n_panels = 1usize << j;
        let grid = Grid::new(x_star, n_panels)?;
        let cfg = SolverConfig::new(local.clone(), grid).with_richardson(richardson);
        let sol = match solve(&cfg) {
            Ok(s) => s,
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        };
        samples.push(ConvergenceSample {
            h: grid.step(),
            n_panels,
            error: error_at(&sol, exact, x_star)?,
        });
    }

    let floor = EXACTNESS_FLOOR * exact(x_star).abs();
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.h, s.error)).collect();
    let fitted = estimate_order_with_floor(&pairs, floor)?;
    Ok(ConvergenceReport {
        eval_point: x_star,
        samples,
        fitted,
        theoretical_order: theoretical,
        aborted,
    })
}

impl ConvergenceReport {
    /// CSV rendering: `h,N,error,log10_h,log10_error` rows plus footer
    /// comment lines with the fitted and theoretical orders. Deterministic
    /// for identical inputs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,N,error,log10_h,log10_error\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.12e},{},{:.12e},{:.12e},{:.12e}\n",
                s.h,
                s.n_panels,
                s.error,
                s.h.log10(),
                s.error.log10()
            ));
        }
        match self.fitted {
            OrderEstimate::Fitted { slope, r2 } => {
                out.push_str(&format!("# fitted_order={slope:.12e} r2={r2:.12e}\n"));
            }
            OrderEstimate::ExactIntegration => out.push_str("# fitted_order=exact\n"),
        }
        out.push_str(&format!("# theoretical_order={:.12e}\n", self.theoretical_order));
        if let Some(reason) = &self.aborted {
            out.push_str(&format!("# aborted={reason}\n"));
        }
        out
    }
}
