//! Diagonal minimum, shift, and the defect graph.
//!
//! The defect graph has an edge `{i, j}` exactly when `Q_ij < m_n`, where
//! `m_n` is the smallest diagonal entry. The comparison is strict and carries
//! no tolerance: an entry equal to `m_n` is not an edge.

use serde::Serialize;

use crate::matrix::SymmetricMatrix;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Connected components of the defect graph of one instance.
///
/// Vertices are 0-based. Each component is sorted ascending and components
/// are ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectDecomposition {
    pub n: usize,
    pub m_n: f64,
    pub min_index: usize,
    pub components: Vec<Vec<usize>>,
    pub edge_count: usize,
}

impl DefectDecomposition {
    pub fn max_component_size(&self) -> usize {
        self.components.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Component label of every vertex.
    pub fn labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.n];
        for (c, comp) in self.components.iter().enumerate() {
            for &v in comp {
                label[v] = c;
            }
        }
        label
    }
}

/// Smallest diagonal entry and the first index attaining it.
pub fn diag_min(q: &SymmetricMatrix) -> (f64, usize) {
    let mut best = (q.get(0, 0), 0);
    for i in 1..q.n() {
        let d = q.get(i, i);
        if d < best.0 {
            best = (d, i);
        }
    }
    best
}

/// Entry of `M = Q − m_n·E`.
#[inline]
pub fn shifted_entry(q: &SymmetricMatrix, m_n: f64, i: usize, j: usize) -> f64 {
    q.get(i, j) - m_n
}

/// Scans the strict upper triangle once and returns the defect components.
pub fn build_defect_graph(q: &SymmetricMatrix) -> DefectDecomposition {
    let n = q.n();
    let (m_n, min_index) = diag_min(q);
    let mut sets = DisjointSets::new(n);
    let mut edge_count = 0;
    for i in 0..n {
        let row = q.row(i);
        for (j, &v) in row.iter().enumerate().skip(i + 1) {
            if v < m_n {
                edge_count += 1;
                sets.union(i, j);
            }
        }
    }
    DefectDecomposition {
        n,
        m_n,
        min_index,
        components: components_of(&mut sets, n),
        edge_count,
    }
}

/// Groups vertices by root. Visiting vertices in increasing order makes each
/// list sorted and orders components by their smallest member.
fn components_of(sets: &mut DisjointSets, n: usize) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = sets.find(v);
        if slot[r] == usize::MAX {
            slot[r] = components.len();
            components.push(Vec::new());
        }
        components[slot[r]].push(v);
    }
    components
}

/// Largest component cardinality.
pub fn max_component_size(d: &DefectDecomposition) -> usize {
    d.max_component_size()
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;

    use super::*;
    use crate::ensemble::{sample_trial, EnsembleSpec};

    fn with_offdiag(diag: &[f64], off: f64) -> SymmetricMatrix {
        SymmetricMatrix::from_upper_fn(diag.len(), |i, j| if i == j { diag[i] } else { off })
            .unwrap()
    }

    #[test]
    fn diag_min_examples() {
        assert_eq!(
            diag_min(&SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0])),
            (1.0, 1)
        );
        assert_eq!(diag_min(&SymmetricMatrix::diagonal(&[5.0])), (5.0, 0));
        assert_eq!(
            diag_min(&SymmetricMatrix::diagonal(&[2.0, 2.0, 3.0])),
            (2.0, 0)
        );
    }

    #[test]
    fn shifted_entry_examples() {
        let q = with_offdiag(&[1.0, 2.0], 0.3);
        assert_eq!(shifted_entry(&q, 1.0, 0, 0), 0.0);
        assert!((shifted_entry(&q, 1.0, 0, 1) + 0.7).abs() < 1e-15);
        let (m, k) = diag_min(&q);
        assert_eq!(shifted_entry(&q, m, k, k), 0.0);
    }

    #[test]
    fn dense_defects_give_one_component() {
        let d = build_defect_graph(&with_offdiag(&[1.0, 2.0, 3.0], 0.5));
        assert_eq!(d.components, vec![vec![0, 1, 2]]);
        assert_eq!(d.edge_count, 3);
        let d = build_defect_graph(&SymmetricMatrix::identity(3));
        assert_eq!(d.components.len(), 1);
        assert_eq!(max_component_size(&d), 3);
    }

    #[test]
    fn large_off_diagonals_give_singletons() {
        let d = build_defect_graph(&with_offdiag(&[1.0, 2.0, 3.0], 10.0));
        assert_eq!(d.components, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(d.edge_count, 0);
    }

    #[test]
    fn ties_with_the_minimum_are_not_edges() {
        let d = build_defect_graph(&with_offdiag(&[1.0, 2.0, 3.0, 4.0], 1.0));
        assert_eq!(d.edge_count, 0);
        assert_eq!(d.max_component_size(), 1);
    }

    #[test]
    fn max_component_size_examples() {
        let n = 7;
        let edgeless = with_offdiag(&[1.0; 7], 5.0);
        assert_eq!(build_defect_graph(&edgeless).max_component_size(), 1);
        let one_edge = SymmetricMatrix::from_upper_fn(n, |i, j| match (i, j) {
            _ if i == j => 1.0,
            (2, 5) => 0.0,
            _ => 5.0,
        })
        .unwrap();
        let d = build_defect_graph(&one_edge);
        assert_eq!(d.max_component_size(), 2);
        assert_eq!(d.components[2], vec![2, 5]);
        assert_eq!(
            build_defect_graph(&with_offdiag(&[1.0; 7], 0.0)).max_component_size(),
            7
        );
    }

    #[allow(clippy::needless_range_loop)]
    fn bfs_components(q: &SymmetricMatrix) -> Vec<Vec<usize>> {
        let n = q.n();
        let m = q.diag().fold(f64::INFINITY, f64::min);
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in 0..n {
                    if w != v && !seen[w] && q.get(v, w) < m {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    #[test]
    fn union_find_matches_bfs_and_partitions() {
        let specs = [
            EnsembleSpec::GaussianWigner {
                gamma2: 1.0,
                sigma2: 3.0,
            },
            EnsembleSpec::ShiftedExponential {
                a: 0.0,
                lambda_d: 1.0,
                lambda_o: 1.0,
            },
        ];
        for t in 0..1000u64 {
            let spec = &specs[(t % 2) as usize];
            let n = 2 + (t % 29) as usize;
            let q = sample_trial(spec, n, 42, t).unwrap();
            let d = build_defect_graph(&q);
            assert_eq!(d.components, bfs_components(&q));
            let total: usize = d.components.iter().map(Vec::len).sum();
            assert_eq!(total, n);
            let labels = d.labels();
            for i in 0..n {
                for j in i + 1..n {
                    if labels[i] != labels[j] {
                        assert!(q.get(i, j) >= d.m_n);
                    }
                }
            }
            assert_eq!(d.m_n, q.get(d.min_index, d.min_index));
        }
    }
}
