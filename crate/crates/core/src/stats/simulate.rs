//! Monte Carlo over full random instances.
//!
//! Every trial materializes the matrix and builds its defect graph, so the
//! component statistics come from the real instance rather than from the
//! conditional Erdős–Rényi model.

use serde::Serialize;

use super::moments::five_tree_bound;
use crate::defect::build_defect_graph;
use crate::ensemble::{sample_trial, EnsembleEcho, EnsembleSpec};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrix::SymmetricMatrix;
use crate::solver::{solve_decomposed, SolveOptions, CERTIFIED_COMPONENT_SIZE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub m_n: f64,
    /// Edge probability at `m_n`.
    pub q_n: f64,
    pub max_component: usize,
    pub edge_count: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub ensemble: EnsembleEcho,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub large_component_trials: u64,
    /// Fraction of trials with a component of size ≥ 5.
    pub freq_large_component: f64,
    /// Binomial standard error of `freq_large_component`.
    pub freq_large_stderr: f64,
    pub freq_certified: f64,
    /// Sample mean of `q_n⁴`.
    pub mean_q4: f64,
    pub mean_q4_stderr: f64,
    /// `C(n,5)·125·mean_q4`.
    pub five_tree_bound: f64,
    /// `(ln n)²/n³`, the GOE rate without its constant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goe_theory_bound: Option<f64>,
    pub mean_edge_count: f64,
    /// Trials whose solve hit the support cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_failures: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub summary: SimulationSummary,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimulateOptions {
    pub solve: bool,
    pub solve_options: SolveOptions,
    pub exec: Exec,
}

pub fn simulate(
    spec: &EnsembleSpec,
    n: usize,
    trials: u64,
    seed: u64,
    opts: &SimulateOptions,
) -> Result<Simulation> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let goe = matches!(spec, EnsembleSpec::Goe);
    simulate_with(
        spec.echo(),
        n,
        trials,
        seed,
        opts,
        goe,
        |t| sample_trial(spec, n, seed, t).expect("validated spec"),
        |m| spec.edge_probability(m),
    )
}

/// Core loop, generic over the instance generator and edge-probability law.
#[allow(clippy::too_many_arguments)]
pub fn simulate_with<G, P>(
    ensemble: EnsembleEcho,
    n: usize,
    trials: u64,
    seed: u64,
    opts: &SimulateOptions,
    goe_reference: bool,
    generate: G,
    edge_probability: P,
) -> Result<Simulation>
where
    G: Fn(u64) -> SymmetricMatrix + Sync + Send,
    P: Fn(f64) -> f64 + Sync + Send,
{
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let records = opts.exec.map(trials, |t| {
        let q = generate(t);
        let d = build_defect_graph(&q);
        let max_component = d.max_component_size();
        let mut rec = TrialRecord {
            trial: t,
            m_n: d.m_n,
            q_n: edge_probability(d.m_n),
            max_component,
            edge_count: d.edge_count,
            certified: max_component <= CERTIFIED_COMPONENT_SIZE,
            value: None,
        };
        if opts.solve {
            rec.value = solve_decomposed(&q, d, &opts.solve_options)
                .ok()
                .map(|s| s.value);
        }
        rec
    });
    let summary = summarize(ensemble, n, seed, &records, opts.solve, goe_reference);
    Ok(Simulation { summary, records })
}

/// Aggregates records in trial order.
pub fn summarize(
    ensemble: EnsembleEcho,
    n: usize,
    seed: u64,
    records: &[TrialRecord],
    solved: bool,
    goe_reference: bool,
) -> SimulationSummary {
    let t = records.len() as f64;
    let large = records.iter().filter(|r| !r.certified).count() as u64;
    let freq_large = large as f64 / t;
    let (sum4, sum8) = records.iter().fold((0.0, 0.0), |(a, b), r| {
        let q4 = r.q_n.powi(4);
        (a + q4, b + q4 * q4)
    });
    let mean_q4 = sum4 / t;
    let var_q4 = if records.len() > 1 {
        ((sum8 - t * mean_q4 * mean_q4) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    let nf = n as f64;
    SimulationSummary {
        ensemble,
        n,
        trials: records.len() as u64,
        seed,
        large_component_trials: large,
        freq_large_component: freq_large,
        freq_large_stderr: (freq_large * (1.0 - freq_large) / t).sqrt(),
        freq_certified: 1.0 - freq_large,
        mean_q4,
        mean_q4_stderr: (var_q4 / t).sqrt(),
        five_tree_bound: five_tree_bound(n, mean_q4),
        goe_theory_bound: goe_reference.then(|| nf.ln().powi(2) / nf.powi(3)),
        mean_edge_count: records.iter().map(|r| r.edge_count as f64).sum::<f64>() / t,
        solve_failures: solved.then(|| records.iter().filter(|r| r.value.is_none()).count() as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_summary_matches_record() {
        let sim = simulate(&EnsembleSpec::Goe, 12, 1, 77, &SimulateOptions::default()).unwrap();
        let r = &sim.records[0];
        let s = &sim.summary;
        assert_eq!(s.trials, 1);
        assert_eq!(s.freq_certified, if r.certified { 1.0 } else { 0.0 });
        assert_eq!(s.mean_q4, r.q_n.powi(4));
        assert_eq!(s.mean_edge_count, r.edge_count as f64);
        let q = sample_trial(&EnsembleSpec::Goe, 12, 77, 0).unwrap();
        assert_eq!(r.m_n, build_defect_graph(&q).m_n);
    }

    #[test]
    fn complete_defect_graph_is_never_certified() {
        let echo = EnsembleSpec::Goe.echo();
        for n in [5usize, 6, 9] {
            let sim = simulate_with(
                echo.clone(),
                n,
                50,
                0,
                &SimulateOptions::default(),
                false,
                |t| {
                    SymmetricMatrix::from_upper_fn(n, |i, j| if i == j { t as f64 } else { -1.0 })
                        .unwrap()
                },
                |_| 1.0,
            )
            .unwrap();
            assert_eq!(sim.summary.freq_large_component, 1.0);
            assert_eq!(sim.summary.freq_certified, 0.0);
        }
    }

    #[test]
    fn summary_invariants_and_solving() {
        let opts = SimulateOptions {
            solve: true,
            ..SimulateOptions::default()
        };
        let sim = simulate(&EnsembleSpec::Goe, 20, 300, 5, &opts).unwrap();
        let s = &sim.summary;
        assert!((s.freq_large_component + s.freq_certified - 1.0).abs() < 1e-15);
        assert_eq!(s.five_tree_bound, five_tree_bound(20, s.mean_q4));
        assert!(s.goe_theory_bound.is_some());
        assert_eq!(s.solve_failures, Some(0));
        for r in &sim.records {
            assert_eq!(r.certified, r.max_component <= 4);
            assert!((0.0..=1.0).contains(&r.q_n));
            assert!(r.value.unwrap() <= r.m_n);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let run = |exec| {
            simulate(
                &EnsembleSpec::Goe,
                15,
                2000,
                9,
                &SimulateOptions {
                    solve: true,
                    exec,
                    ..SimulateOptions::default()
                },
            )
            .unwrap()
        };
        let a = run(Exec::Sequential);
        let b = run(Exec::ParallelWith { threads: 8 });
        assert_eq!(a, b);
    }
}
