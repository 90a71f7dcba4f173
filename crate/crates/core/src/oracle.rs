//! Independent reference solvers for small instances.
//!
//! [`brute_force_stqp`] enumerates every support of the full matrix and never
//! looks at the defect graph, so agreement with [`crate::solver::solve`]
//! checks the decomposition. [`grid_refine_check`] avoids KKT arithmetic
//! altogether and evaluates the objective on a barycentric grid.

use crate::error::{Error, Result};
use crate::kkt::{local_stqp_with, LocalSolution, Tolerances};
use crate::matrix::SymmetricMatrix;

pub const DEFAULT_ORACLE_CAP: usize = 16;
pub const GRID_MAX_DIM: usize = 6;

/// Minimum over all `2ⁿ − 1` supports of the full matrix.
pub fn brute_force_stqp(q: &SymmetricMatrix, cap: usize) -> Result<LocalSolution> {
    if q.n() > cap {
        return Err(Error::Capacity {
            component: 0,
            size: q.n(),
            cap,
        });
    }
    local_stqp_with(q, cap, &Tolerances::default(), false)
}

/// Smallest `xᵀQx` over grid points `x = k / grid` of the simplex.
pub fn grid_minimum(q: &SymmetricMatrix, grid: usize) -> Result<f64> {
    let n = q.n();
    if n > GRID_MAX_DIM {
        return Err(Error::Domain(format!(
            "grid check supports n <= {GRID_MAX_DIM}, got {n}"
        )));
    }
    if grid == 0 {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    let mut counts = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut best = f64::INFINITY;
    visit_compositions(&mut counts, 0, grid, &mut |c| {
        for (xi, &ci) in x.iter_mut().zip(c) {
            *xi = ci as f64 / grid as f64;
        }
        best = best.min(q.quad_form(&x));
    });
    Ok(best)
}

fn visit_compositions(counts: &mut [usize], pos: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[pos] = k;
        visit_compositions(counts, pos + 1, left - k, f);
    }
}

/// `true` when no grid point beats `value − 1e−6`.
pub fn grid_refine_check(q: &SymmetricMatrix, value: f64, grid: usize) -> Result<bool> {
    Ok(grid_minimum(q, grid)? >= value - 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defect::build_defect_graph;
    use crate::kkt::{dyadic_matrix, local_stqp};
    use crate::rng::{domain, Stream};

    fn mat(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let s = brute_force_stqp(&SymmetricMatrix::identity(3), 16).unwrap();
        assert!((s.value - 1.0 / 3.0).abs() < 1e-15);
        let s = brute_force_stqp(&dyadic_matrix(4).unwrap(), 16).unwrap();
        assert!((s.value - 16.0 / 15.0).abs() < 1e-14);
        let s = brute_force_stqp(&mat(&[&[0.0, -1.0], &[-1.0, 0.0]]), 16).unwrap();
        assert!((s.value + 0.5).abs() < 1e-15);
        assert!(matches!(
            brute_force_stqp(&SymmetricMatrix::identity(17), 16),
            Err(Error::Capacity { size: 17, .. })
        ));
    }

    #[test]
    fn grid_examples() {
        assert!((grid_minimum(&SymmetricMatrix::identity(2), 100).unwrap() - 0.5).abs() < 1e-15);
        assert!(grid_refine_check(&SymmetricMatrix::identity(2), 0.5, 100).unwrap());
        let neg = mat(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        assert!((grid_minimum(&neg, 100).unwrap() + 0.5).abs() < 1e-15);
        assert!(grid_refine_check(&neg, -0.5, 100).unwrap());
        assert!(!grid_refine_check(&neg, -0.4, 100).unwrap());
        assert!(grid_minimum(&SymmetricMatrix::identity(7), 4).is_err());
    }

    #[test]
    fn random_three_by_three_blocks_pass_the_grid_check() {
        let mut s = Stream::new(17, domain::TEST);
        for _ in 0..100 {
            let q = SymmetricMatrix::from_upper_fn(3, |_, _| 2.0 * s.open01() - 1.0).unwrap();
            let exact = brute_force_stqp(&q, 16).unwrap();
            assert!(grid_refine_check(&q, exact.value, 200).unwrap());
            // Grid points are feasible, so the grid minimum can only be higher,
            // and a fine grid gets within its Lipschitz error of the optimum.
            let g = grid_minimum(&q, 200).unwrap();
            assert!(g >= exact.value - 1e-12);
            assert!(g - exact.value <= 4.0 * q.max_abs() / 200.0);
        }
    }

    #[test]
    fn single_component_matrices_match_local_solver() {
        let mut s = Stream::new(21, domain::TEST);
        let mut seen = 0;
        while seen < 50 {
            let n = 2 + s.below(5) as usize;
            let q = SymmetricMatrix::from_upper_fn(n, |i, j| {
                if i == j {
                    s.open01()
                } else {
                    s.open01() - 1.0
                }
            })
            .unwrap();
            let d = build_defect_graph(&q);
            if d.components.len() != 1 {
                continue;
            }
            seen += 1;
            let a = brute_force_stqp(&q, 16).unwrap();
            let b = local_stqp(&q.principal(&d.components[0]), 25).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.support, b.support);
        }
    }
}
