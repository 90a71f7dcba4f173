//! Probabilistic quantities behind the exactness certificate: moments of the
//! defect-edge probability, the five-vertex-tree union bound, full-instance
//! Monte Carlo, and the tail-decay classification.

pub mod moments;
pub mod quadrature;
pub mod simulate;
pub mod tail;

pub use moments::{
    binomial, exp_moment_closed_form, five_tree_bound, moment_closed_form, moment_mc,
    moment_quadrature, sample_diag_min, MomentMethod, MomentReport,
};
pub use simulate::{simulate, SimulateOptions, Simulation, SimulationSummary, TrialRecord};
pub use tail::{tail_condition_report, TailReport, Trend, Verdict};
