//! Random symmetric matrix models.
//!
//! Each model draws the diagonal i.i.d. from a law `F_D` and the strict upper
//! triangle i.i.d. from a law `F_O`, all independent. Every law here has a
//! closed-form quantile, and sampling is by inverse transform from the
//! open-interval uniforms of [`crate::rng::Stream`], so a matrix is a pure
//! function of `(spec, n, seed, trial)` on any platform with IEEE doubles.
//!
//! The heavy-tail and endpoint families are fixed to unit-scale
//! representatives:
//!
//! | variant | `F(t)` |
//! |---|---|
//! | heavy tail | `|t|^(-α)` for `t ≤ -1`, `1` above |
//! | endpoint power | `(t + a)^β` on `[-a, -a + 1]`, `0` below, `1` above |
//! | shifted exponential | `1 - exp(-λ (t + a))` for `t ≥ -a` |

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::normal;
use crate::rng::{domain, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnsembleSpec {
    /// Gaussian orthogonal ensemble: diagonal `N(0, 1)`, off-diagonal `N(0, 1/2)`.
    Goe,
    GaussianWigner {
        gamma2: f64,
        sigma2: f64,
    },
    HeavyTail {
        alpha_d: f64,
        alpha_o: f64,
    },
    EndpointPower {
        a: f64,
        beta_d: f64,
        beta_o: f64,
    },
    ShiftedExponential {
        a: f64,
        lambda_d: f64,
        lambda_o: f64,
    },
}

/// JSON echo of a spec: `{"variant": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleEcho {
    pub variant: &'static str,
    pub params: BTreeMap<&'static str, f64>,
}

/// Which of the two entry laws to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Diagonal,
    OffDiagonal,
}

/// Per-entry law, after resolving a spec and an [`Entry`] kind.
#[derive(Debug, Clone, Copy)]
enum Law {
    Normal { sd: f64 },
    NegPareto { alpha: f64 },
    Power { a: f64, beta: f64 },
    Exponential { a: f64, rate: f64 },
}

impl Law {
    fn cdf(self, t: f64) -> f64 {
        match self {
            Law::Normal { sd } => normal::cdf(t / sd),
            Law::NegPareto { alpha } => {
                if t <= -1.0 {
                    (-t).powf(-alpha)
                } else {
                    1.0
                }
            }
            Law::Power { a, beta } => {
                let s = t + a;
                if s <= 0.0 {
                    0.0
                } else if s >= 1.0 {
                    1.0
                } else {
                    s.powf(beta)
                }
            }
            Law::Exponential { a, rate } => {
                let s = t + a;
                if s <= 0.0 {
                    0.0
                } else {
                    -(-rate * s).exp_m1()
                }
            }
        }
    }

    /// Inverse CDF on `(0, 1)`; callers check the domain.
    fn quantile(self, u: f64) -> f64 {
        match self {
            Law::Normal { sd } => sd * normal::quantile(u),
            Law::NegPareto { alpha } => -u.powf(-1.0 / alpha),
            Law::Power { a, beta } => -a + u.powf(1.0 / beta),
            Law::Exponential { a, rate } => -a - (-u).ln_1p() / rate,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {v}")))
    }
}

fn check_unit_open(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {u}"
        )))
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::Goe => Ok(()),
            EnsembleSpec::GaussianWigner { gamma2, sigma2 } => {
                positive("gamma2", gamma2)?;
                positive("sigma2", sigma2)
            }
            EnsembleSpec::HeavyTail { alpha_d, alpha_o } => {
                positive("alphaD", alpha_d)?;
                positive("alphaO", alpha_o)
            }
            EnsembleSpec::EndpointPower { a, beta_d, beta_o } => {
                finite("a", a)?;
                positive("betaD", beta_d)?;
                positive("betaO", beta_o)
            }
            EnsembleSpec::ShiftedExponential {
                a,
                lambda_d,
                lambda_o,
            } => {
                finite("a", a)?;
                positive("lambdaD", lambda_d)?;
                positive("lambdaO", lambda_o)
            }
        }
    }

    fn law(&self, entry: Entry) -> Law {
        let diag = entry == Entry::Diagonal;
        match *self {
            EnsembleSpec::Goe => Law::Normal {
                sd: if diag { 1.0 } else { SQRT_2.recip() },
            },
            EnsembleSpec::GaussianWigner { gamma2, sigma2 } => Law::Normal {
                sd: if diag { gamma2.sqrt() } else { sigma2.sqrt() },
            },
            EnsembleSpec::HeavyTail { alpha_d, alpha_o } => Law::NegPareto {
                alpha: if diag { alpha_d } else { alpha_o },
            },
            EnsembleSpec::EndpointPower { a, beta_d, beta_o } => Law::Power {
                a,
                beta: if diag { beta_d } else { beta_o },
            },
            EnsembleSpec::ShiftedExponential {
                a,
                lambda_d,
                lambda_o,
            } => Law::Exponential {
                a,
                rate: if diag { lambda_d } else { lambda_o },
            },
        }
    }

    /// Diagonal distribution function `F_D(t)`.
    pub fn diag_cdf(&self, t: f64) -> f64 {
        self.law(Entry::Diagonal).cdf(t)
    }

    /// Off-diagonal distribution function `F_O(t)`.
    pub fn off_cdf(&self, t: f64) -> f64 {
        self.law(Entry::OffDiagonal).cdf(t)
    }

    pub fn diag_quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        Ok(self.law(Entry::Diagonal).quantile(u))
    }

    pub fn off_quantile(&self, u: f64) -> Result<f64> {
        check_unit_open(u)?;
        Ok(self.law(Entry::OffDiagonal).quantile(u))
    }

    /// Probability that a given off-diagonal entry falls strictly below `m`,
    /// i.e. `F_O(m)`. With `m` the diagonal minimum this is the defect-edge
    /// probability conditional on `m`.
    pub fn edge_probability(&self, m: f64) -> f64 {
        self.off_cdf(m)
    }

    /// `F_O(F_D⁻¹(u))`, evaluated in a form that keeps relative precision as
    /// `u → 0` (no cancellation against the endpoint `a`).
    pub fn edge_probability_at_level(&self, u: f64) -> f64 {
        match *self {
            EnsembleSpec::Goe => normal::cdf(SQRT_2 * normal::quantile(u)),
            EnsembleSpec::GaussianWigner { gamma2, sigma2 } => {
                normal::cdf((gamma2 / sigma2).sqrt() * normal::quantile(u))
            }
            EnsembleSpec::HeavyTail { alpha_d, alpha_o } => u.powf(alpha_o / alpha_d).min(1.0),
            EnsembleSpec::EndpointPower { beta_d, beta_o, .. } => u.powf(beta_o / beta_d).min(1.0),
            EnsembleSpec::ShiftedExponential {
                lambda_d, lambda_o, ..
            } => -((lambda_o / lambda_d) * (-u).ln_1p()).exp_m1(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            EnsembleSpec::Goe => "goe",
            EnsembleSpec::GaussianWigner { .. } => "wigner",
            EnsembleSpec::HeavyTail { .. } => "heavy-tail",
            EnsembleSpec::EndpointPower { .. } => "endpoint-power",
            EnsembleSpec::ShiftedExponential { .. } => "shifted-exponential",
        }
    }

    pub fn echo(&self) -> EnsembleEcho {
        let params: BTreeMap<&'static str, f64> = match *self {
            EnsembleSpec::Goe => BTreeMap::new(),
            EnsembleSpec::GaussianWigner { gamma2, sigma2 } => {
                [("gamma2", gamma2), ("sigma2", sigma2)].into()
            }
            EnsembleSpec::HeavyTail { alpha_d, alpha_o } => {
                [("alphaD", alpha_d), ("alphaO", alpha_o)].into()
            }
            EnsembleSpec::EndpointPower { a, beta_d, beta_o } => {
                [("a", a), ("betaD", beta_d), ("betaO", beta_o)].into()
            }
            EnsembleSpec::ShiftedExponential {
                a,
                lambda_d,
                lambda_o,
            } => [("a", a), ("lambdaD", lambda_d), ("lambdaO", lambda_o)].into(),
        };
        EnsembleEcho {
            variant: self.variant_name(),
            params,
        }
    }

    /// Draws one entry of the given kind from a uniform level in `(0, 1)`.
    #[inline]
    fn draw(&self, entry: Entry, u: f64) -> f64 {
        self.law(entry).quantile(u)
    }
}

/// Samples the matrix for `trial` of an experiment keyed by `seed`.
///
/// Entries are generated in row-major order over the upper triangle
/// (diagonal included) from the stream `(seed, trial)`, so entry `(i, j)` is a
/// pure function of `(seed, trial, i, j)`.
pub fn sample_trial(
    spec: &EnsembleSpec,
    n: usize,
    seed: u64,
    trial: u64,
) -> Result<SymmetricMatrix> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut stream = Stream::new(seed, domain::MATRIX + trial);
    let diag = spec.law(Entry::Diagonal);
    let off = spec.law(Entry::OffDiagonal);
    SymmetricMatrix::from_upper_fn(n, |i, j| {
        let u = stream.open01();
        if i == j {
            diag.quantile(u)
        } else {
            off.quantile(u)
        }
    })
}

/// Samples a single instance; identical to trial 0 of [`sample_trial`].
pub fn sample_matrix(spec: &EnsembleSpec, n: usize, seed: u64) -> Result<SymmetricMatrix> {
    sample_trial(spec, n, seed, 0)
}

/// Draws `count` i.i.d. entries of one kind; used for distribution checks.
pub fn sample_entries(spec: &EnsembleSpec, entry: Entry, count: usize, seed: u64) -> Vec<f64> {
    let mut stream = Stream::new(seed, domain::TEST);
    (0..count)
        .map(|_| spec.draw(entry, stream.open01()))
        .collect()
}
