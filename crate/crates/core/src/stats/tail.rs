//! Growth of `n⁵·E[F_O(m_n)⁴]` along a grid of sizes.
//!
//! The theoretical verdict comes from the parameter inequality that controls
//! each family; the empirical trend is the least-squares slope of
//! `ln(n⁵·E)` against `ln n` with moments computed by quadrature.

use serde::Serialize;

use super::moments::moment_quadrature;
use crate::ensemble::{EnsembleEcho, EnsembleSpec};
use crate::error::{Error, Result};

/// Slopes with absolute value below this are reported as inconclusive.
pub const TREND_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `n⁵·E[F_O(m_n)⁴] → 0`.
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decreasing,
    Increasing,
    Inconclusive,
}

impl Trend {
    pub fn from_slope(slope: f64) -> Self {
        if !slope.is_finite() || slope.abs() < TREND_THRESHOLD {
            Trend::Inconclusive
        } else if slope < 0.0 {
            Trend::Decreasing
        } else {
            Trend::Increasing
        }
    }

    fn expected_for(verdict: Verdict) -> Trend {
        match verdict {
            Verdict::Satisfied => Trend::Decreasing,
            Verdict::Violated => Trend::Increasing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub e4: f64,
    /// `n⁵·e4`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub ensemble: EnsembleEcho,
    pub rows: Vec<TailRow>,
    pub slope: f64,
    pub empirical: Trend,
    pub theoretical: Verdict,
    /// Parameter inequality behind the verdict.
    pub condition: String,
    pub agree: bool,
}

/// Verdict from the tail parameters alone.
pub fn theoretical_verdict(spec: &EnsembleSpec) -> (Verdict, String) {
    let pick = |ok: bool| {
        if ok {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    };
    match *spec {
        EnsembleSpec::Goe => (
            Verdict::Satisfied,
            "sigma2 = 1/2 < (4/5)·gamma2 = 4/5".into(),
        ),
        EnsembleSpec::GaussianWigner { gamma2, sigma2 } => (
            pick(sigma2 < 0.8 * gamma2),
            format!("sigma2 = {sigma2} vs (4/5)·gamma2 = {}", 0.8 * gamma2),
        ),
        EnsembleSpec::HeavyTail { alpha_d, alpha_o } => (
            pick(alpha_o > 1.25 * alpha_d),
            format!("alphaO = {alpha_o} vs (5/4)·alphaD = {}", 1.25 * alpha_d),
        ),
        EnsembleSpec::EndpointPower { beta_d, beta_o, .. } => (
            pick(beta_o > 1.25 * beta_d),
            format!("betaO = {beta_o} vs (5/4)·betaD = {}", 1.25 * beta_d),
        ),
        EnsembleSpec::ShiftedExponential { .. } => (
            Verdict::Violated,
            "shifted exponentials have endpoint exponents betaD = betaO = 1".into(),
        ),
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn tail_condition_report(spec: &EnsembleSpec, n_grid: &[usize]) -> Result<TailReport> {
    spec.validate()?;
    if n_grid.len() < 3 || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::Domain(
            "n grid must be strictly increasing, positive, with at least 3 points".into(),
        ));
    }
    let rows = n_grid
        .iter()
        .map(|&n| {
            let e4 = moment_quadrature(spec, n, 4)?.estimate;
            Ok(TailRow {
                n,
                e4,
                scaled: (n as f64).powi(5) * e4,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = if rows.iter().all(|r| r.scaled > 0.0) {
        let lx: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ly: Vec<f64> = rows.iter().map(|r| r.scaled.ln()).collect();
        ls_slope(&lx, &ly)
    } else {
        f64::NAN
    };
    let empirical = Trend::from_slope(slope);
    let (theoretical, condition) = theoretical_verdict(spec);
    Ok(TailReport {
        ensemble: spec.echo(),
        rows,
        slope,
        empirical,
        theoretical,
        condition,
        agree: empirical == Trend::expected_for(theoretical),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [usize; 4] = [100, 200, 400, 800];

    #[test]
    fn wigner_regimes() {
        let ok = tail_condition_report(
            &EnsembleSpec::GaussianWigner {
                gamma2: 1.0,
                sigma2: 0.5,
            },
            &GRID,
        )
        .unwrap();
        assert_eq!(ok.theoretical, Verdict::Satisfied);
        assert_eq!(ok.empirical, Trend::Decreasing);
        assert!(ok.agree);

        let bad = tail_condition_report(
            &EnsembleSpec::GaussianWigner {
                gamma2: 1.0,
                sigma2: 0.9,
            },
            &GRID,
        )
        .unwrap();
        assert_eq!(bad.theoretical, Verdict::Violated);
        assert_eq!(bad.empirical, Trend::Increasing);
        // Exponent 5 − 4γ²/σ² ≈ 0.556, plus a slowly growing log factor.
        assert!(bad.slope > 0.4 && bad.slope < 0.9, "{}", bad.slope);
    }

    #[test]
    fn shifted_exponential_grows_linearly() {
        let r = tail_condition_report(
            &EnsembleSpec::ShiftedExponential {
                a: 0.0,
                lambda_d: 1.0,
                lambda_o: 1.0,
            },
            &GRID,
        )
        .unwrap();
        assert_eq!(r.theoretical, Verdict::Violated);
        assert_eq!(r.empirical, Trend::Increasing);
        assert!((r.slope - 1.0).abs() < 0.05);
    }

    #[test]
    fn pure_power_slopes_match_exponents() {
        // n⁵·E ~ n^{5 − 4·ratio}; finite-n corrections shift the fitted slope a little.
        let ht = tail_condition_report(
            &EnsembleSpec::HeavyTail {
                alpha_d: 2.0,
                alpha_o: 3.0,
            },
            &GRID,
        )
        .unwrap();
        assert!((ht.slope + 1.0).abs() < 0.15, "{}", ht.slope);
        let ep = tail_condition_report(
            &EnsembleSpec::EndpointPower {
                a: 0.0,
                beta_d: 1.0,
                beta_o: 2.0,
            },
            &GRID,
        )
        .unwrap();
        assert!((ep.slope + 3.0).abs() < 0.25, "{}", ep.slope);
    }

    #[test]
    fn grid_validation_and_trend_threshold() {
        assert!(tail_condition_report(&EnsembleSpec::Goe, &[10, 20]).is_err());
        assert!(tail_condition_report(&EnsembleSpec::Goe, &[10, 30, 20]).is_err());
        assert_eq!(Trend::from_slope(0.05), Trend::Inconclusive);
        assert_eq!(Trend::from_slope(-0.5), Trend::Decreasing);
        assert_eq!(Trend::from_slope(f64::NAN), Trend::Inconclusive);
        assert!((ls_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
    }
}
