//! Problem definition: exponent, kernel, interval, grid and solution
//! containers.
//!
//! All types are immutable after construction and `Send + Sync`; kernel
//! evaluation is pure and reentrant.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, VolterraError};

/// Lattice resolution for sampled bound estimation of custom kernels.
const BOUND_LATTICE: usize = 501;
/// Relative widening applied to sampled bounds.
const BOUND_MARGIN: f64 = 0.01;

/// Power-asymptotic metadata: K(x,t) ~ coeff · x^mu · t^nu as x → 0⁺.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAsymptotics {
    pub coeff: f64,
    pub mu: f64,
    pub nu: f64,
}

/// An evaluatable kernel K(x,t) on the triangle 0 ≤ t ≤ x ≤ X, required to
/// satisfy 0 < C ≤ K(x,t) ≤ D there.
///
/// Built-in kernels carry analytic bounds; custom kernels get sampled
/// bounds over a dense triangular lattice, widened by a safety margin.
#[derive(Clone)]
pub enum Kernel {
    /// K ≡ c.
    Constant(f64),
    /// K(x,t) = e^{x−t}.
    ExpConvolution,
    /// K(x,t) = coeff · x^mu · t^nu.
    Power { coeff: f64, mu: f64, nu: f64 },
    /// User-supplied kernel; bounds are estimated by sampling.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Kernel {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Constant(c) => write!(fm, "Kernel::Constant({c})"),
            Kernel::ExpConvolution => write!(fm, "Kernel::ExpConvolution"),
            Kernel::Power { coeff, mu, nu } => {
                write!(fm, "Kernel::Power({coeff}, mu={mu}, nu={nu})")
            }
            Kernel::Custom { name, .. } => write!(fm, "Kernel::Custom({name:?})"),
        }
    }
}

impl Kernel {
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Kernel::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Raw evaluation without the domain check.
    #[inline]
    pub fn eval_unchecked(&self, x: f64, t: f64) -> f64 {
        match self {
            Kernel::Constant(c) => *c,
            Kernel::ExpConvolution => (x - t).exp(),
            Kernel::Power { coeff, mu, nu } => {
                let xp = if *mu == 0.0 { 1.0 } else { x.powf(*mu) };
                let tp = if *nu == 0.0 { 1.0 } else { t.powf(*nu) };
                coeff * xp * tp
            }
            Kernel::Custom { f, .. } => f(x, t),
        }
    }

    /// Evaluates K(x,t); the arguments must satisfy 0 ≤ t ≤ x.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        if !(0.0 <= t && t <= x) {
            return Err(VolterraError::KernelDomain { x, t });
        }
        Ok(self.eval_unchecked(x, t))
    }

    /// Bounds (C, D) with 0 < C ≤ K ≤ D over the triangle 0 ≤ t ≤ x ≤ X.
    ///
    /// Analytic for built-ins (constant: (c,c); exp-convolution: (1, e^X)).
    /// Custom kernels are sampled on a 501×501 triangular lattice and the
    /// result widened by 1%. A nonpositive lower bound is an invalid kernel.
    pub fn bounds(&self, x_end: f64) -> Result<(f64, f64)> {
        let (lo, hi) = match self {
            Kernel::Constant(c) => (*c, *c),
            Kernel::ExpConvolution => (1.0, x_end.exp()),
            Kernel::Power { coeff, mu, nu } => {
                // infimum over the triangle is at x = t = 0 when mu+nu > 0
                let hi = coeff * x_end.powf(mu + nu);
                let lo = if mu + nu == 0.0 { *coeff } else { 0.0 };
                (lo.min(hi), lo.max(hi))
            }
            Kernel::Custom { f, .. } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let n = BOUND_LATTICE - 1;
                for i in 0..BOUND_LATTICE {
                    let x = x_end * i as f64 / n as f64;
                    for j in 0..=i {
                        let t = x * if i == 0 { 0.0 } else { j as f64 / i as f64 };
                        let v = f(x, t);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                (lo - BOUND_MARGIN * lo.abs(), hi + BOUND_MARGIN * hi.abs())
            }
        };
        if lo <= 0.0 {
            return Err(VolterraError::KernelBound(lo));
        }
        Ok((lo, hi))
    }

    /// Power-asymptotic metadata (coeff, mu, nu), if known.
    pub fn asymptotics(&self) -> Option<KernelAsymptotics> {
        match self {
            Kernel::Constant(c) => Some(KernelAsymptotics {
                coeff: *c,
                mu: 0.0,
                nu: 0.0,
            }),
            Kernel::ExpConvolution => Some(KernelAsymptotics {
                coeff: 1.0,
                mu: 0.0,
                nu: 0.0,
            }),
            Kernel::Power { coeff, mu, nu } => Some(KernelAsymptotics {
                coeff: *coeff,
                mu: *mu,
                nu: *nu,
            }),
            Kernel::Custom { .. } => None,
        }
    }
}

/// One instance of the equation y^{m+1} = ∫₀ˣ K(x,t) y(t) dt on [0, X].
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    m: f64,
    kernel: Kernel,
    x_end: f64,
}

impl ProblemSpec {
    /// Validates m > 0, X > 0 and the kernel bound 0 < C ≤ D on [0, X].
    pub fn new(m: f64, kernel: Kernel, x_end: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(VolterraError::NonPositiveExponent(m));
        }
        if !(x_end > 0.0) {
            return Err(VolterraError::NonPositiveInterval(x_end));
        }
        kernel.bounds(x_end)?;
        Ok(Self { m, kernel, x_end })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn x_end(&self) -> f64 {
        self.x_end
    }

    /// Kernel bounds (C, D) over the problem's own triangle.
    pub fn bounds(&self) -> (f64, f64) {
        // validated at construction
        self.kernel.bounds(self.x_end).expect("bounds were validated")
    }

    /// Same problem restated on [0, x_end'] (used by convergence sweeps).
    pub fn with_interval(&self, x_end: f64) -> Result<Self> {
        Self::new(self.m, self.kernel.clone(), x_end)
    }
}

/// Uniform mesh x_n = n·h, h = X/N, with an even panel count so the
/// 2h-midpoint panels tile exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_end: f64,
    panels: usize,
    step: f64,
}

impl Grid {
    pub fn new(x_end: f64, panels: usize) -> Result<Self> {
        if !(x_end > 0.0) {
            return Err(VolterraError::NonPositiveInterval(x_end));
        }
        if panels < 2 || panels % 2 != 0 {
            return Err(VolterraError::BadPanelCount(panels));
        }
        Ok(Self {
            x_end,
            panels,
            step: x_end / panels as f64,
        })
    }

    pub fn x_end(&self) -> f64 {
        self.x_end
    }

    /// Panel count N.
    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Step h = X/N.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Node x_n = n·h.
    pub fn node(&self, n: usize) -> f64 {
        n as f64 * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.panels).map(|n| self.node(n))
    }
}

/// How the starting value y_1 was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartRule {
    /// Eq.-(y1)-style rectangle overestimate (∫₀^h K(h,t) dt)^{1/m}.
    RectangleOverestimate,
    /// Richardson extrapolation of the rectangle start, clamped from below.
    Richardson,
    /// Caller-supplied value.
    Override,
}

impl StartRule {
    pub fn label(&self) -> &'static str {
        match self {
            StartRule::RectangleOverestimate => "rectangle-overestimate",
            StartRule::Richardson => "richardson",
            StartRule::Override => "override",
        }
    }
}

/// Solution provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionMeta {
    pub scheme: String,
    pub start_rule: StartRule,
    pub richardson: bool,
}

/// Grid values y_0..y_N produced by the explicit scheme.
#[derive(Debug, Clone)]
pub struct Solution {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub m: f64,
    pub meta: SolutionMeta,
}

impl Solution {
    /// Maps back to the original unknown: u_n = y_n^{m+1}.
    pub fn to_original_form(&self) -> Vec<f64> {
        let p = self.m + 1.0;
        self.values.iter().map(|&y| y.powf(p)).collect()
    }
}
