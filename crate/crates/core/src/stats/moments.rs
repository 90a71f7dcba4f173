//! Moments of the defect-edge probability `F_O(m_n)`.
//!
//! With `U = F_D(m_n)`, the minimum of `n` uniforms, `U` has density
//! `n(1−u)^{n−1}` and `m_n` has the law of `F_D⁻¹(U)`. That gives both an
//! O(1) sampler for `m_n` and the one-dimensional integral
//!
//! ```text
//!     E[F_O(m_n)^s] = n ∫₀¹ F_O(F_D⁻¹(u))^s (1−u)^{n−1} du.
//! ```

use serde::Serialize;

use super::quadrature::{integrate, QuadConfig};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::{domain, Stream};

/// Trials per independent random stream in Monte Carlo estimators.
pub const MC_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub s: u32,
    pub estimate: f64,
    pub method: MomentMethod,
    /// Standard error of the Monte Carlo mean.
    pub stderr: Option<f64>,
    /// `n⁵·estimate` for the fourth moment.
    pub scaled: Option<f64>,
}

impl MomentReport {
    fn new(n: usize, s: u32, estimate: f64, method: MomentMethod, stderr: Option<f64>) -> Self {
        Self {
            n,
            s,
            estimate,
            method,
            stderr,
            scaled: (s == 4).then(|| (n as f64).powi(5) * estimate),
        }
    }
}

/// Exact draw of `min_i Q_ii` without forming the diagonal.
pub fn sample_diag_min(spec: &EnsembleSpec, n: usize, stream: &mut Stream) -> f64 {
    let v = stream.open01();
    // U = 1 − (1 − V)^{1/n}, written to keep precision for small U.
    let u = -((-v).ln_1p() / n as f64).exp_m1();
    spec.diag_quantile(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
        .expect("level in (0, 1)")
}

/// Monte Carlo estimate of `E[F_O(m_n)^s]` via [`sample_diag_min`].
pub fn moment_mc(
    spec: &EnsembleSpec,
    n: usize,
    s: u32,
    trials: u64,
    seed: u64,
    exec: Exec,
) -> Result<MomentReport> {
    spec.validate()?;
    check_n(n)?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let batches = trials.div_ceil(MC_BATCH);
    let partial = exec.map(batches, |b| {
        let mut stream = Stream::new(seed, domain::DIAG_MIN + b);
        let len = MC_BATCH.min(trials - b * MC_BATCH);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..len {
            let m = sample_diag_min(spec, n, &mut stream);
            let v = spec.edge_probability(m).powi(s as i32);
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let t = trials as f64;
    let mean = sum / t;
    let var = if trials > 1 {
        ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MomentReport::new(
        n,
        s,
        mean,
        MomentMethod::MonteCarlo,
        Some((var / t).sqrt()),
    ))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Breakpoints for the `v = (n−1)u` integrand: geometric near zero where the
/// edge probability may carry power or logarithmic singularities, then
/// spanning the exponential bulk.
fn breakpoints(upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend(
        [
            1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0, 20.0, 30.0, 50.0,
            80.0, 150.0, 300.0, 800.0,
        ]
        .into_iter()
        .filter(|&p| p < upper),
    );
    pts.push(upper);
    pts
}

/// `E[F_O(m_n)^s]` by adaptive quadrature, to about 1e−10 relative.
pub fn moment_quadrature(spec: &EnsembleSpec, n: usize, s: u32) -> Result<MomentReport> {
    spec.validate()?;
    check_n(n)?;
    if s == 0 {
        return Ok(MomentReport::new(n, s, 1.0, MomentMethod::Quadrature, None));
    }
    let cfg = QuadConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        max_panels: 50_000,
    };
    let p = |u: f64| spec.edge_probability_at_level(u).powi(s as i32);
    let result = if n == 1 {
        integrate(p, &breakpoints(1.0), &cfg)
    } else {
        let nm1 = (n - 1) as f64;
        let lead = n as f64 / nm1;
        let g = |v: f64| {
            let u = v / nm1;
            let weight = (nm1 * (-u).ln_1p()).exp();
            if weight == 0.0 {
                return 0.0;
            }
            lead * p(u) * weight
        };
        integrate(g, &breakpoints(nm1), &cfg)
    }
    .map_err(|e| match e {
        Error::Quadrature(msg) => {
            Error::Quadrature(format!("{} n={n} s={s}: {msg}", spec.variant_name()))
        }
        other => other,
    })?;
    Ok(MomentReport::new(
        n,
        s,
        result.value,
        MomentMethod::Quadrature,
        None,
    ))
}

/// `E[F_O(m_n)^s]` for shifted exponentials with a common endpoint, for
/// general `s`:
///
/// ```text
///     Σ_k C(s,k)(−1)^k · nλ_D/(nλ_D + kλ_O)  =  s!·r^s / Π_{k=1..s} (1 + k·r),
///     r = λ_O / (nλ_D).
/// ```
///
/// The product on the right is the same number without the alternating-sum
/// cancellation, which destroys all precision once `r` is small.
pub fn exp_moment_closed_form_s(lambda_d: f64, lambda_o: f64, n: usize, s: u32) -> f64 {
    let r = lambda_o / (n as f64 * lambda_d);
    (1..=s).fold(1.0, |acc, k| acc * k as f64 * r / (1.0 + k as f64 * r))
}

/// Fourth moment of the shifted-exponential edge probability.
pub fn exp_moment_closed_form(lambda_d: f64, lambda_o: f64, n: usize) -> f64 {
    exp_moment_closed_form_s(lambda_d, lambda_o, n, 4)
}

/// The alternating binomial expansion, evaluated term by term.
pub fn exp_moment_binomial_sum(lambda_d: f64, lambda_o: f64, n: usize, s: u32) -> f64 {
    let b = n as f64 * lambda_d;
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=s {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * b / (b + k as f64 * lambda_o);
        binom = binom * (s - k) as f64 / (k + 1) as f64;
    }
    total
}

/// Closed-form moment report; only shifted exponentials qualify.
pub fn moment_closed_form(spec: &EnsembleSpec, n: usize, s: u32) -> Result<MomentReport> {
    spec.validate()?;
    check_n(n)?;
    match *spec {
        EnsembleSpec::ShiftedExponential {
            lambda_d, lambda_o, ..
        } => Ok(MomentReport::new(
            n,
            s,
            exp_moment_closed_form_s(lambda_d, lambda_o, n, s),
            MomentMethod::ClosedForm,
            None,
        )),
        _ => Err(Error::Domain(format!(
            "closed form is only available for shifted-exponential ensembles, not {}",
            spec.variant_name()
        ))),
    }
}

/// `C(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Union bound on a defect component of size ≥ 5: `C(n,5)·125·e4`, where 125
/// counts labeled trees on five vertices and `e4 = E[F_O(m_n)⁴]`.
pub fn five_tree_bound(n: usize, e4: f64) -> f64 {
    if n < 5 {
        return 0.0;
    }
    binomial(n, 5) * 125.0 * e4
}
