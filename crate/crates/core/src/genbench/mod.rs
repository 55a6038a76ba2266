//! Planted-partition instances, the exact brute-force baseline, and the
//! success-rate sweep harness.

mod generator;
mod oracle;
mod sweep;

pub use generator::{generate_instance, GeneratorParams, Instance, NoiseMode};
pub use oracle::{brute_force_min, ORACLE_MAX_N};
pub use sweep::{cell_seed, run_sweep, run_sweep_with, sweep_meta, Axis, AxisName, SweepResult, SweepSolver, SweepSpec, SweepTemplate, TemplateMode};
