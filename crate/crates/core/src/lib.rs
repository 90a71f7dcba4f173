//! Exact solver for standard quadratic programs
//!
//! ```text
//!     minimize xᵀQx  subject to  x ≥ 0, 1ᵀx = 1
//! ```
//!
//! on random symmetric instances. The solver shifts `Q` by its smallest
//! diagonal entry, splits the index set along the connected components of the
//! *defect graph* (pairs `i < j` with `Q_ij` strictly below the diagonal
//! minimum) and enumerates KKT support candidates inside each component. When
//! every component has at most four vertices, the doubly nonnegative relaxation
//! of the instance is exact and its optimizer is the rank-one lift of the
//! returned minimizer; the solution carries that certificate.
//!
//! The [`stats`] module holds the Monte Carlo and quadrature machinery used to
//! measure how often that certificate holds under the random models of
//! [`ensemble`].

pub mod defect;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod kkt;
pub mod matrix;
pub mod normal;
pub mod oracle;
pub mod rng;
pub mod solver;
pub mod stats;

pub use defect::{build_defect_graph, diag_min, shifted_entry, DefectDecomposition};
pub use ensemble::{sample_matrix, sample_trial, EnsembleEcho, EnsembleSpec};
pub use error::{Error, Result};
pub use exec::Exec;
pub use kkt::{local_stqp, LocalSolution, SupportCandidate, Tolerances};
pub use matrix::SymmetricMatrix;
pub use oracle::{brute_force_stqp, grid_refine_check};
pub use solver::{solve, Solution, SolveOptions};
