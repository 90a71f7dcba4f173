//! Face-by-face optimization of a quadratic form over the simplex.
//!
//! For a support `T`, the candidate minimizer on the face `{x ≥ 0, 1ᵀx = 1,
//! supp x ⊆ T}` solves the bordered system
//!
//! ```text
//!     [ A_T  -1 ] [ x ]   [ 0 ]
//!     [ 1ᵀ    0 ] [ λ ] = [ 1 ]
//! ```
//!
//! and is accepted (admissible) when the system is nonsingular, `x > 0`, and
//! `A_T` is positive definite on the tangent space `{u : 1ᵀu = 0}`. The value
//! of the program over the whole simplex is the smallest `λ_T` over admissible
//! supports, so enumerating all supports of a small block solves it exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Numerical thresholds for classifying support candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `min(x)` must exceed this (absolute).
    pub positivity: f64,
    /// Cholesky pivots of the projected Hessian must exceed `pd·(1 + ‖A_T‖_max)`.
    pub pd: f64,
    /// Elimination pivots below `singular·(1 + ‖K‖_max)` mean a singular system.
    pub singular: f64,
    /// Candidate values closer than `tie·(1 + |λ|)` count as tied.
    pub tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            positivity: 1e-10,
            pd: 1e-12,
            singular: 1e-12,
            tie: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    SingularKkt,
    NonpositiveEntry,
    IndefiniteOnTangent,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportCandidate {
    /// Sorted local indices.
    pub support: Vec<usize>,
    /// `None` when the bordered system is singular.
    pub lambda: Option<f64>,
    /// Face minimizer on `support`; present iff admissible.
    pub x: Option<Vec<f64>>,
    pub admissible: bool,
    pub rejection: Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSolution {
    pub value: f64,
    /// Minimizer embedded in the block's full index range.
    pub x: Vec<f64>,
    pub support: Vec<usize>,
    /// Another admissible candidate came within the tie tolerance of `value`.
    pub near_tie: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<SupportCandidate>>,
}

/// Helmert basis of `{u ∈ ℝ^s : 1ᵀu = 0}`, as `s − 1` columns of length `s`.
///
/// Column `k` (1-based) has `1/√(k(k+1))` on the first `k` coordinates and
/// `−k/√(k(k+1))` on coordinate `k + 1`.
pub fn tangent_basis(s: usize) -> Result<Vec<Vec<f64>>> {
    if s < 2 {
        return Err(Error::Domain(format!(
            "tangent basis needs s >= 2, got {s}"
        )));
    }
    Ok((1..s)
        .map(|k| {
            let kf = k as f64;
            let scale = (kf * (kf + 1.0)).sqrt().recip();
            let mut col = vec![0.0; s];
            col[..k].fill(scale);
            col[k] = -kf * scale;
            col
        })
        .collect())
}

/// Solves the bordered KKT system for a `t × t` block. Returns `None` when an
/// elimination pivot falls below `tol·(1 + ‖K‖_max)`.
pub fn kkt_solve(a: &SymmetricMatrix, tol: f64) -> Option<(Vec<f64>, f64)> {
    let t = a.n();
    if t == 1 {
        return Some((vec![1.0], a.get(0, 0)));
    }
    let dim = t + 1;
    let mut k = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    for i in 0..t {
        for j in 0..t {
            k[i * dim + j] = a.get(i, j);
        }
        k[i * dim + t] = -1.0;
        k[t * dim + i] = 1.0;
    }
    rhs[t] = 1.0;
    let threshold = tol * (1.0 + a.max_abs().max(1.0));
    let sol = gauss_solve(&mut k, &mut rhs, dim, threshold)?;
    let lambda = sol[t];
    Some((sol[..t].to_vec(), lambda))
}

/// Dense Gaussian elimination with partial pivoting, in place.
fn gauss_solve(m: &mut [f64], b: &mut [f64], dim: usize, threshold: f64) -> Option<Vec<f64>> {
    for col in 0..dim {
        let (piv, piv_abs) =
            (col..dim)
                .map(|r| (r, m[r * dim + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs < threshold {
            return None;
        }
        if piv != col {
            for c in 0..dim {
                m.swap(col * dim + c, piv * dim + c);
            }
            b.swap(col, piv);
        }
        let p = m[col * dim + col];
        for r in col + 1..dim {
            let f = m[r * dim + col] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..dim {
                m[r * dim + c] -= f * m[col * dim + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for r in (0..dim).rev() {
        let s: f64 = (r + 1..dim).map(|c| m[r * dim + c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r * dim + r];
    }
    Some(x)
}

/// `BᵀAB` for the Helmert basis `B`.
fn projected_hessian(a: &SymmetricMatrix) -> Vec<Vec<f64>> {
    let s = a.n();
    let basis = tangent_basis(s).expect("s >= 2");
    let ab: Vec<Vec<f64>> = basis
        .iter()
        .map(|col| {
            (0..s)
                .map(|i| (0..s).map(|j| a.get(i, j) * col[j]).sum())
                .collect()
        })
        .collect();
    basis
        .iter()
        .map(|bi| {
            ab.iter()
                .map(|abj: &Vec<f64>| bi.iter().zip(abj).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect()
}

/// Cholesky test: every pivot must exceed `threshold`.
fn cholesky_pivots_exceed(mut h: Vec<Vec<f64>>, threshold: f64) -> bool {
    let d = h.len();
    for k in 0..d {
        let pivot = h[k][k] - (0..k).map(|p| h[k][p] * h[k][p]).sum::<f64>();
        if pivot.is_nan() || pivot <= threshold {
            return false;
        }
        let root = pivot.sqrt();
        h[k][k] = root;
        for i in k + 1..d {
            let s = h[i][k] - (0..k).map(|p| h[i][p] * h[k][p]).sum::<f64>();
            h[i][k] = s / root;
        }
    }
    true
}

/// Admissibility verdict for a solved candidate. Reasons are checked in the
/// order: nonpositive entry, then indefinite on the tangent space.
pub fn is_admissible(a: &SymmetricMatrix, x: &[f64], tol: &Tolerances) -> (bool, Rejection) {
    if a.n() == 1 {
        return (true, Rejection::None);
    }
    if x.iter().any(|&v| v.is_nan() || v <= tol.positivity) {
        return (false, Rejection::NonpositiveEntry);
    }
    let threshold = tol.pd * (1.0 + a.max_abs());
    if !cholesky_pivots_exceed(projected_hessian(a), threshold) {
        return (false, Rejection::IndefiniteOnTangent);
    }
    (true, Rejection::None)
}

/// Solves and classifies the support `support` of the block `a`.
pub fn evaluate_support(
    a: &SymmetricMatrix,
    support: &[usize],
    tol: &Tolerances,
) -> SupportCandidate {
    let sub = a.principal(support);
    let Some((x, lambda)) = kkt_solve(&sub, tol.singular) else {
        return SupportCandidate {
            support: support.to_vec(),
            lambda: None,
            x: None,
            admissible: false,
            rejection: Rejection::SingularKkt,
        };
    };
    let (admissible, rejection) = is_admissible(&sub, &x, tol);
    SupportCandidate {
        support: support.to_vec(),
        lambda: Some(lambda),
        x: admissible.then_some(x),
        admissible,
        rejection,
    }
}

/// Calls `visit` on every nonempty subset of `0..r`, by increasing size and
/// lexicographically within a size.
pub fn for_each_support(r: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = Vec::with_capacity(r);
    for size in 1..=r {
        idx.clear();
        idx.extend(0..size);
        loop {
            visit(&idx);
            // Advance to the next combination in lexicographic order.
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == r - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for p in pos..size {
                idx[p] = idx[p - 1] + 1;
            }
        }
    }
}

/// Exact minimum of `xᵀAx` over the simplex by enumeration of all
/// `2^r − 1` supports.
pub fn local_stqp(a: &SymmetricMatrix, support_cap: usize) -> Result<LocalSolution> {
    local_stqp_with(a, support_cap, &Tolerances::default(), false)
}

pub fn local_stqp_with(
    a: &SymmetricMatrix,
    support_cap: usize,
    tol: &Tolerances,
    keep_candidates: bool,
) -> Result<LocalSolution> {
    let r = a.n();
    if r > support_cap {
        return Err(Error::Capacity {
            component: 0,
            size: r,
            cap: support_cap,
        });
    }
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let mut admissible_values: Vec<f64> = Vec::new();
    let mut candidates = keep_candidates.then(Vec::new);
    for_each_support(r, |support| {
        let cand = evaluate_support(a, support, tol);
        if cand.admissible {
            let lambda = cand.lambda.expect("admissible candidates carry lambda");
            admissible_values.push(lambda);
            let better = match &best {
                None => true,
                Some((b, _, _)) => lambda < b - tol.tie * (1.0 + b.abs()),
            };
            if better {
                best = Some((
                    lambda,
                    cand.support.clone(),
                    cand.x.clone().expect("admissible"),
                ));
            }
        }
        if let Some(list) = candidates.as_mut() {
            list.push(cand);
        }
    });
    let (value, support, xs) = best.expect("singleton supports are always admissible");
    let tie_band = tol.tie * (1.0 + value.abs());
    let near_tie = admissible_values
        .iter()
        .filter(|&&v| (v - value).abs() <= tie_band)
        .count()
        > 1;
    let mut x = vec![0.0; r];
    for (&i, &w) in support.iter().zip(&xs) {
        x[i] = w;
    }
    Ok(LocalSolution {
        value,
        x,
        support,
        near_tie,
        candidates,
    })
}

/// `diag(2, 4, …, 2^r)`, whose support candidates all have distinct values.
pub fn dyadic_matrix(r: usize) -> Result<SymmetricMatrix> {
    if !(1..=4).contains(&r) {
        return Err(Error::Domain(format!(
            "dyadic matrix size must be 1..=4, got {r}"
        )));
    }
    Ok(SymmetricMatrix::diagonal(
        &(1..=r).map(|p| (1u32 << p) as f64).collect::<Vec<_>>(),
    ))
}
