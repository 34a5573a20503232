//! Exact transition kernels of the chain on tiny instances.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use super::McmcError;
use crate::percolation::{Configuration, PathSpace, Side};
use crate::scalar::Scalar;

/// Budget for [`exact_kernel`]: states times resampling assignments.
pub const KERNEL_WORK_LIMIT: u128 = 1 << 24;

/// A sparse row-stochastic matrix; `rows[i]` lists `(j, P(i, j))` by increasing `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<S> {
    pub rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> Kernel<S> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row vector times matrix.
    pub fn apply(&self, mu: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.rows.len()];
        for (row, m) in self.rows.iter().zip(mu) {
            for (j, p) in row {
                out[*j] = out[*j].clone() + m.clone() * p.clone();
            }
        }
        out
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Kernel<S>) -> Kernel<S> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (j, a) in row {
                    for (k, b) in &next.rows[*j] {
                        let entry = acc.entry(*k).or_insert_with(S::zero);
                        *entry = entry.clone() + a.clone() * b.clone();
                    }
                }
                acc.into_iter().filter(|(_, p)| !p.is_zero()).collect()
            })
            .collect();
        Kernel { rows }
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows.iter().map(|r| r.iter().map(|(_, p)| p.clone()).sum()).collect()
    }

    fn reach(&self, forward: bool) -> FixedBitSet {
        let n = self.rows.len();
        let mut adj = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row {
                if *p > S::zero() {
                    if forward {
                        adj[i].push(*j);
                    } else {
                        adj[*j].push(i);
                    }
                }
            }
        }
        let mut seen = FixedBitSet::with_capacity(n);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen.put(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Strong connectivity of the positive-probability transition graph.
    pub fn is_irreducible(&self) -> bool {
        self.rows.is_empty() || (self.reach(true).is_full() && self.reach(false).is_full())
    }

    /// Whether some state can stay put; with irreducibility this gives aperiodicity.
    pub fn has_positive_diagonal(&self) -> bool {
        self.rows.iter().enumerate().any(|(i, row)| row.iter().any(|(j, p)| *j == i && *p > S::zero()))
    }
}

/// `Γ` restricted to the support of the product measure (edges with
/// `p ∈ {0, 1}` frozen), the conditioned law `μ`, and the kernels of the
/// two substeps and of a full step.
#[derive(Debug, Clone)]
pub struct ExactChain<S> {
    pub states: Vec<Configuration>,
    pub mu: Vec<S>,
    pub substep_i: Kernel<S>,
    pub substep_ii: Kernel<S>,
    pub full: Kernel<S>,
}

impl<S: Scalar> ExactChain<S> {
    /// Largest `|(μK)(ω) − μ(ω)|`.
    pub fn max_deviation(&self, kernel: &Kernel<S>) -> f64 {
        kernel.apply(&self.mu).iter().zip(&self.mu).map(|(a, b)| (a.clone() - b.clone()).to_f64().abs()).fold(0.0, f64::max)
    }

    /// `μK = μ`; exact equality for exact scalars, `1e-12` slack otherwise.
    pub fn is_stationary(&self, kernel: &Kernel<S>) -> bool {
        if S::EXACT {
            kernel.apply(&self.mu) == self.mu
        } else {
            self.max_deviation(kernel) <= 1e-12
        }
    }

    pub fn index_of(&self, omega: &Configuration) -> Option<usize> {
        self.states.iter().position(|s| s == omega)
    }
}

/// Enumerates the chain exactly.
pub fn exact_kernel<S: Scalar>(space: &PathSpace) -> Result<ExactChain<S>, McmcError> {
    let g = space.graph();
    let m = g.edge_count();
    let probs: Vec<S> = g.edges().iter().map(|e| e.p.get::<S>()).collect();
    let free: Vec<usize> = (0..m).filter(|&e| !g.edges()[e].p.is_degenerate()).collect();
    if free.len() >= 64 || (1u128 << free.len()) > KERNEL_WORK_LIMIT {
        return Err(McmcError::TooLarge { work: 1u128 << free.len().min(127), limit: KERNEL_WORK_LIMIT });
    }
    let mut base = Configuration::all_closed(m);
    for (e, edge) in g.edges().iter().enumerate() {
        base.set(e, edge.p.exact() == &num_rational::BigRational::from_integer(1.into()));
    }
    let weight = |w: &Configuration, edges: &[usize]| -> S {
        edges.iter().fold(S::one(), |acc, &e| acc * if w.is_open(e) { probs[e].clone() } else { S::one() - probs[e].clone() })
    };

    let mut states = Vec::new();
    let mut raw = Vec::new();
    for bits in 0..1u64 << free.len() {
        let mut w = base.clone();
        for (k, &e) in free.iter().enumerate() {
            w.set(e, bits >> k & 1 == 1);
        }
        if space.in_gamma(&w) {
            raw.push(weight(&w, &free));
            states.push(w);
        }
    }
    let z: S = raw.iter().cloned().sum();
    let mu: Vec<S> = raw.into_iter().map(|x| x / z.clone()).collect();
    let index: HashMap<&Configuration, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let mut work: u128 = 0;
    let mut substep_kernel = |side: Side| -> Result<Kernel<S>, McmcError> {
        let mut rows = Vec::with_capacity(states.len());
        for w in &states {
            let guide = space.extreme_path(w, side.opposite()).expect("state in Γ");
            let part = space.partition(&guide)?;
            let resampled: Vec<usize> = part.side(side).ones().filter(|e| free.binary_search(e).is_ok()).collect();
            work += 1u128 << resampled.len();
            if work > KERNEL_WORK_LIMIT {
                return Err(McmcError::TooLarge { work, limit: KERNEL_WORK_LIMIT });
            }
            let mut row = Vec::with_capacity(1 << resampled.len());
            for bits in 0..1u64 << resampled.len() {
                let mut next = w.clone();
                for (k, &e) in resampled.iter().enumerate() {
                    next.set(e, bits >> k & 1 == 1);
                }
                let j = *index.get(&next).expect("substeps preserve Γ and the support");
                row.push((j, weight(&next, &resampled)));
            }
            row.sort_by_key(|(j, _)| *j);
            rows.push(row);
        }
        Ok(Kernel { rows })
    };
    let substep_i = substep_kernel(Side::Right)?;
    let substep_ii = substep_kernel(Side::Left)?;
    let full = substep_i.then(&substep_ii);
    Ok(ExactChain { states, mu, substep_i, substep_ii, full })
}
