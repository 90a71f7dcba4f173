use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid ensemble parameter: {0}")]
    Parameter(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    /// A defect component is too large for exhaustive support enumeration.
    /// `component` is 0-based; the message shows it 1-based.
    #[error("component {} has {size} vertices, above the support cap of {cap}", .component + 1)]
    Capacity {
        component: usize,
        size: usize,
        cap: usize,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("matrix format error: {0}")]
    Format(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
