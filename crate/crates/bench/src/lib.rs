//! Shared fixtures for the benchmark targets.

use volterra_core::{Grid, Kernel, ProblemSpec};
use volterra_core::solver::SolverConfig;

/// Standard benchmark instance: constant kernel on [0, 1].
pub fn constant_kernel_config(m: f64, n_panels: usize) -> SolverConfig {
    let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0).expect("valid spec");
    let grid = Grid::new(1.0, n_panels).expect("valid grid");
    SolverConfig::new(spec, grid)
}

/// Convolution-kernel instance on [0, 1].
pub fn convolution_kernel_config(m: f64, n_panels: usize) -> SolverConfig {
    let spec = ProblemSpec::new(m, Kernel::ExpConvolution, 1.0).expect("valid spec");
    let grid = Grid::new(1.0, n_panels).expect("valid grid");
    SolverConfig::new(spec, grid)
}
