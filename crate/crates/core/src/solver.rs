//! Global solver: decompose over defect components, solve each block, pick
//! the best.
//!
//! After the shift `M = Q − m_n·E`, every entry of `M` between different
//! defect components is nonnegative, so a feasible point that spreads mass
//! across components never beats the best single-component point. The global
//! value is therefore `m_n` plus the smallest shifted block value, and the
//! minimizer is supported inside one component. When all components have at
//! most four vertices the doubly nonnegative relaxation is exact on every
//! block and the rank-one lift of the minimizer is its unique optimizer; the
//! solution records this as `certified_exact_dnn`.

use serde::Serialize;

use crate::defect::{build_defect_graph, DefectDecomposition};
use crate::error::{Error, Result};
use crate::kkt::{local_stqp_with, LocalSolution, Tolerances};
use crate::matrix::SymmetricMatrix;
use crate::rng::{domain, Stream};

/// Largest component size for which the relaxation is certified exact.
pub const CERTIFIED_COMPONENT_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub support_cap: usize,
    pub tol: Tolerances,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            support_cap: 25,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub n: usize,
    /// Global value `xᵀQx`.
    pub value: f64,
    pub m_n: f64,
    /// `value − m_n`; never positive.
    pub shifted_value: f64,
    /// Sorted 0-based global indices.
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    pub winning_component: usize,
    pub certified_exact_dnn: bool,
    /// Shifted block value of each component, in component order.
    pub component_values: Vec<f64>,
    pub near_tie: bool,
    pub decomposition: DefectDecomposition,
}

/// JSON view of a [`Solution`] with 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    pub n: usize,
    pub value: f64,
    pub m_n: f64,
    pub shifted_value: f64,
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    pub winning_component: usize,
    pub certified_exact_dnn: bool,
    pub component_sizes: Vec<usize>,
    pub near_tie: bool,
}

impl Solution {
    pub fn report(&self) -> SolutionReport {
        SolutionReport {
            n: self.n,
            value: self.value,
            m_n: self.m_n,
            shifted_value: self.shifted_value,
            support: self.support.iter().map(|i| i + 1).collect(),
            weights: self.weights.clone(),
            winning_component: self.winning_component + 1,
            certified_exact_dnn: self.certified_exact_dnn,
            component_sizes: self.decomposition.component_sizes(),
            near_tie: self.near_tie,
        }
    }

    /// Dense minimizer in `ℝⁿ`.
    pub fn x(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &w) in self.support.iter().zip(&self.weights) {
            x[i] = w;
        }
        x
    }
}

pub fn solve(q: &SymmetricMatrix, opts: &SolveOptions) -> Result<Solution> {
    let d = build_defect_graph(q);
    solve_decomposed(q, d, opts)
}

/// Solves with a precomputed decomposition of `q`.
pub fn solve_decomposed(
    q: &SymmetricMatrix,
    d: DefectDecomposition,
    opts: &SolveOptions,
) -> Result<Solution> {
    if let Some((component, c)) = d
        .components
        .iter()
        .enumerate()
        .find(|(_, c)| c.len() > opts.support_cap)
    {
        return Err(Error::Capacity {
            component,
            size: c.len(),
            cap: opts.support_cap,
        });
    }
    let mut component_values = Vec::with_capacity(d.components.len());
    let mut best: Option<(usize, f64, LocalSolution)> = None;
    for (a, comp) in d.components.iter().enumerate() {
        let block = q.principal(comp);
        let local = local_stqp_with(&block, opts.support_cap, &opts.tol, false)?;
        let shifted = local.value - d.m_n;
        component_values.push(shifted);
        let better = match &best {
            None => true,
            Some((_, b, ..)) => shifted < b - opts.tol.tie * (1.0 + b.abs()),
        };
        if better {
            best = Some((a, shifted, local));
        }
    }
    let (winning_component, shifted_value, local) = best.expect("at least one component");
    let comp = &d.components[winning_component];
    let support: Vec<usize> = local.support.iter().map(|&i| comp[i]).collect();
    let weights: Vec<f64> = local.support.iter().map(|&i| local.x[i]).collect();
    let local_tie = local.near_tie;
    let band = opts.tol.tie * (1.0 + shifted_value.abs());
    let component_tie = component_values
        .iter()
        .filter(|&&v| (v - shifted_value).abs() <= band)
        .count()
        > 1;
    Ok(Solution {
        n: q.n(),
        value: q.sparse_quad_form(&support, &weights),
        m_n: d.m_n,
        shifted_value,
        support,
        weights,
        winning_component,
        certified_exact_dnn: d.max_component_size() <= CERTIFIED_COMPONENT_SIZE,
        component_values,
        near_tie: component_tie || local_tie,
        decomposition: d,
    })
}

/// Rank-one lift `X = x xᵀ` of a solution, stored on the support block.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneLift {
    pub n: usize,
    pub support: Vec<usize>,
    /// Row-major `k × k` block on `support`.
    pub block: Vec<f64>,
    /// `⟨E, X⟩`.
    pub total_mass: f64,
    /// `⟨Q, X⟩`.
    pub objective: f64,
}

impl RankOneLift {
    pub fn to_dense(&self) -> SymmetricMatrix {
        let k = self.support.len();
        let mut pos = vec![usize::MAX; self.n];
        for (p, &i) in self.support.iter().enumerate() {
            pos[i] = p;
        }
        SymmetricMatrix::from_upper_fn(self.n, |i, j| {
            if pos[i] == usize::MAX || pos[j] == usize::MAX {
                0.0
            } else {
                self.block[pos[i] * k + pos[j]]
            }
        })
        .expect("finite lift")
    }
}

/// Builds `X = x xᵀ` and checks that it is feasible for the relaxation and
/// attains the solution value.
pub fn embed_rank_one(q: &SymmetricMatrix, sol: &Solution) -> Result<RankOneLift> {
    let k = sol.support.len();
    if sol.weights.len() != k || k == 0 {
        return Err(Error::Consistency(
            "support and weights differ in length".into(),
        ));
    }
    if sol.weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::Consistency("negative weight in minimizer".into()));
    }
    let mut block = Vec::with_capacity(k * k);
    for &wi in &sol.weights {
        for &wj in &sol.weights {
            block.push(wi * wj);
        }
    }
    let total_mass: f64 = block.iter().sum();
    let sum_w: f64 = sol.weights.iter().sum();
    if (total_mass - 1.0).abs() > 1e-12 || (sum_w * sum_w - total_mass).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "lift has total mass {total_mass}"
        )));
    }
    let mut objective = 0.0;
    for (a, &i) in sol.support.iter().enumerate() {
        for (b, &j) in sol.support.iter().enumerate() {
            objective += q.get(i, j) * block[a * k + b];
        }
    }
    if (objective - sol.value).abs() > 1e-9 * sol.value.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "lift objective {objective} differs from value {}",
            sol.value
        )));
    }
    Ok(RankOneLift {
        n: sol.n,
        support: sol.support.clone(),
        block,
        total_mass,
        objective,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockMassReport {
    /// Mass of `X` on each diagonal component block.
    pub tau: Vec<f64>,
    /// Mass on blocks pairing different components.
    pub eta: f64,
    pub total: f64,
}

/// Splits the mass of a nonnegative `X` with `⟨E, X⟩ = 1` into
/// per-component and cross-component parts.
pub fn block_masses(x: &SymmetricMatrix, d: &DefectDecomposition) -> Result<BlockMassReport> {
    if x.n() != d.n {
        return Err(Error::Domain(format!(
            "matrix is {}×{} but decomposition has n = {}",
            x.n(),
            x.n(),
            d.n
        )));
    }
    let labels = d.labels();
    let mut tau = vec![0.0; d.components.len()];
    let mut eta = 0.0;
    let mut total = 0.0;
    for i in 0..x.n() {
        for (j, &v) in x.row(i).iter().enumerate() {
            if v < 0.0 {
                return Err(Error::Domain(format!(
                    "negative entry at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            total += v;
            if labels[i] == labels[j] {
                tau[labels[i]] += v;
            } else {
                eta += v;
            }
        }
    }
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("total mass is {total}, expected 1")));
    }
    Ok(BlockMassReport { tau, eta, total })
}

/// Outcome of [`lower_bound_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub passed: bool,
    pub samples: usize,
    /// Smallest `⟨Q, Y⟩ − value` seen.
    pub min_gap: f64,
    /// Factors `y` of the first violating sample, as `(index, weight)` lists.
    pub violation: Option<Vec<Vec<(usize, f64)>>>,
}

/// Draws completely positive matrices `Y = Σ_k y_k y_kᵀ / Σ_k (1ᵀy_k)²` with
/// `y_k ≥ 0` (one to five terms, each on a random support of up to eight
/// indices) and checks `⟨Q, Y⟩ ≥ value − 1e−8·max(1, |value|)`.
pub fn lower_bound_probe(
    q: &SymmetricMatrix,
    sol: &Solution,
    trials: usize,
    seed: u64,
) -> ProbeOutcome {
    let n = q.n();
    let mut stream = Stream::new(seed, domain::PROBE);
    let slack = 1e-8 * sol.value.abs().max(1.0);
    let mut min_gap = f64::INFINITY;
    let mut violation = None;
    let mut picked = vec![false; n];
    for _ in 0..trials {
        let terms = 1 + stream.below(5) as usize;
        let mut factors = Vec::with_capacity(terms);
        let mut num = 0.0;
        let mut den = 0.0;
        for _ in 0..terms {
            let size = 1 + stream.below(n.min(8) as u64) as usize;
            let mut idx = Vec::with_capacity(size);
            while idx.len() < size {
                let i = stream.below(n as u64) as usize;
                if !picked[i] {
                    picked[i] = true;
                    idx.push(i);
                }
            }
            for &i in &idx {
                picked[i] = false;
            }
            let w: Vec<f64> = idx.iter().map(|_| -stream.open01().ln()).collect();
            num += q.sparse_quad_form(&idx, &w);
            let s: f64 = w.iter().sum();
            den += s * s;
            factors.push(idx.into_iter().zip(w).collect::<Vec<_>>());
        }
        let gap = num / den - sol.value;
        min_gap = min_gap.min(gap);
        if gap < -slack && violation.is_none() {
            violation = Some(factors);
        }
    }
    ProbeOutcome {
        passed: violation.is_none(),
        samples: trials,
        min_gap,
        violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_trial, EnsembleSpec};

    fn mat(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn solve_examples() {
        let q =
            SymmetricMatrix::from_upper_fn(3, |i, j| if i == j { (i + 1) as f64 } else { 10.0 })
                .unwrap();
        let s = solve(&q, &SolveOptions::default()).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!((s.support.clone(), s.weights.clone()), (vec![0], vec![1.0]));
        assert!(s.certified_exact_dnn);
        assert_eq!(s.decomposition.components.len(), 3);
        assert_eq!(s.shifted_value, 0.0);

        let s = solve(
            &mat(&[&[0.0, -1.0], &[-1.0, 0.0]]),
            &SolveOptions::default(),
        )
        .unwrap();
        assert!((s.value + 0.5).abs() < 1e-15);
        assert_eq!(s.weights, vec![0.5, 0.5]);
        assert_eq!(s.decomposition.edge_count, 1);
        assert!(s.certified_exact_dnn);

        let s = solve(
            &SymmetricMatrix::diagonal(&[-3.5]),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!((s.value, s.weights.clone()), (-3.5, vec![1.0]));
        assert!(s.certified_exact_dnn);
    }

    fn separated(diag: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::from_upper_fn(diag.len(), |i, j| if i == j { diag[i] } else { 10.0 })
            .unwrap()
    }

    #[test]
    fn report_uses_one_based_indices() {
        let s = solve(&separated(&[3.0, 1.0]), &SolveOptions::default()).unwrap();
        let r = s.report();
        assert_eq!(r.support, vec![2]);
        assert_eq!(r.winning_component, 2);
        assert_eq!(r.component_sizes, vec![1, 1]);
    }

    #[test]
    fn tied_components_are_flagged_and_first_wins() {
        let s = solve(&separated(&[1.0, 1.0, 2.0]), &SolveOptions::default()).unwrap();
        assert!(s.near_tie);
        assert_eq!(s.support, vec![0]);
        assert_eq!(s.winning_component, 0);
    }

    #[test]
    fn capacity_error_names_the_component() {
        let q = SymmetricMatrix::from_upper_fn(7, |i, j| match (i, j) {
            _ if i == j => 1.0,
            (0, _) => 5.0,
            _ => 0.0,
        })
        .unwrap();
        let opts = SolveOptions {
            support_cap: 4,
            ..SolveOptions::default()
        };
        let err = solve(&q, &opts).unwrap_err();
        assert_eq!(
            err,
            Error::Capacity {
                component: 1,
                size: 6,
                cap: 4
            }
        );
    }

    #[test]
    fn five_vertex_tree_is_solved_but_not_certified() {
        // Path 1-2-3-4-5 of defect edges plus an isolated vertex.
        let q = SymmetricMatrix::from_upper_fn(6, |i, j| {
            if i == j {
                1.0
            } else if j == i + 1 && j < 5 {
                0.5
            } else {
                3.0
            }
        })
        .unwrap();
        let s = solve(&q, &SolveOptions::default()).unwrap();
        assert!(!s.certified_exact_dnn);
        assert_eq!(s.decomposition.max_component_size(), 5);
        let oracle = crate::oracle::brute_force_stqp(&q, 16).unwrap();
        assert!((s.value - oracle.value).abs() < 1e-12);
    }

    #[test]
    fn rank_one_lift_examples() {
        let q = separated(&[1.0, 2.0]);
        let s = solve(&q, &SolveOptions::default()).unwrap();
        let lift = embed_rank_one(&q, &s).unwrap();
        assert_eq!(lift.total_mass, 1.0);
        assert_eq!(lift.to_dense().get(0, 0), 1.0);

        let q = mat(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let s = solve(&q, &SolveOptions::default()).unwrap();
        let lift = embed_rank_one(&q, &s).unwrap();
        assert!(lift.block.iter().all(|&v| v == 0.25));
        assert!((lift.objective - s.value).abs() < 1e-15);
    }

    #[test]
    fn lift_rejects_inconsistent_solutions() {
        let q = separated(&[1.0, 2.0]);
        let mut s = solve(&q, &SolveOptions::default()).unwrap();
        s.value = 0.5;
        assert!(matches!(embed_rank_one(&q, &s), Err(Error::Consistency(_))));
        s.value = 1.0;
        s.weights = vec![0.9];
        assert!(matches!(embed_rank_one(&q, &s), Err(Error::Consistency(_))));
    }

    #[test]
    fn block_mass_examples() {
        let n = 4;
        let d = build_defect_graph(&separated(&[1.0, 2.0, 3.0, 4.0]));
        let e1 = SymmetricMatrix::from_upper_fn(n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 })
            .unwrap();
        let r = block_masses(&e1, &d).unwrap();
        assert_eq!(r.tau, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.eta, 0.0);

        let uniform = SymmetricMatrix::from_upper_fn(n, |_, _| 1.0 / 16.0).unwrap();
        let r = block_masses(&uniform, &d).unwrap();
        assert!(r.tau.iter().all(|&t| (t - 1.0 / 16.0).abs() < 1e-15));
        assert!((r.eta - 0.75).abs() < 1e-15);

        let neg =
            SymmetricMatrix::from_upper_fn(n, |i, j| if i == j { 0.3 } else { -0.01 }).unwrap();
        assert!(matches!(block_masses(&neg, &d), Err(Error::Domain(_))));
        let light = SymmetricMatrix::from_upper_fn(n, |_, _| 0.01).unwrap();
        assert!(matches!(block_masses(&light, &d), Err(Error::Domain(_))));
    }

    #[test]
    fn probe_examples() {
        let q = sample_trial(&EnsembleSpec::Goe, 50, 1, 0).unwrap();
        let s = solve(&q, &SolveOptions::default()).unwrap();
        let own = embed_rank_one(&q, &s).unwrap();
        assert!((own.objective - s.value).abs() < 1e-12);
        let (m, i) = crate::defect::diag_min(&q);
        assert_eq!(q.get(i, i), m);
        assert!(m >= s.value);
        let outcome = lower_bound_probe(&q, &s, 1000, 9);
        assert!(outcome.passed, "{outcome:?}");
        assert!(outcome.min_gap >= -1e-8);
    }

    #[test]
    fn probe_detects_a_wrong_value() {
        let q = SymmetricMatrix::identity(3);
        let mut s = solve(&q, &SolveOptions::default()).unwrap();
        s.value = 0.9;
        let outcome = lower_bound_probe(&q, &s, 200, 1);
        assert!(!outcome.passed);
        assert!(outcome.violation.is_some());
    }
}
