//! Exact conditional laws by enumeration, monotone Boolean functions, and
//! the association checks built on them.

mod association;
mod theorems;

pub use association::{
    check_conjunction_pairs, check_positive_association, monotone_functions, AssociationReport, MonotoneFunction,
    Witness, CONJUNCTION_LIMIT, MAX_ARITY,
};
pub use theorems::{
    verify_conjecture1, verify_theorem3, verify_theorem4, ConjectureMode, ConjectureReport, ConjectureSetup,
    TheoremReport,
};

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::contact::ContactError;
use crate::graph::{GraphError, MixedPlanarGraph};
use crate::percolation::Configuration;
use crate::scalar::{Prob, Scalar};

/// Largest number of non-degenerate edges [`enumerate_measure`] will sum over.
pub const ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("{free} edges with probability strictly between 0 and 1 exceed the enumeration limit of {ENUMERATION_LIMIT}")]
    TooManyEdges { free: usize },
    #[error("the conditioning event has probability zero")]
    ConditionNull,
    #[error("the conditioning event was never observed in {reps} replicas")]
    NeverObserved { reps: u64 },
    #[error("source and target sets must be disjoint and non-empty")]
    BadSets,
    #[error("arity {0} exceeds {MAX_ARITY}")]
    Arity(usize),
    #[error("{0} variables exceed the limit of 64")]
    TooManyVariables(usize),
    #[error("{0} variables exceed the conjunction-pair limit of {CONJUNCTION_LIMIT}")]
    TooManyForConjunctions(usize),
    #[error("weights do not form a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("sites 1..={n} to the left and 1..={m} to the right must fit in the window of radius {radius}")]
    Sites { n: i64, m: i64, radius: i64 },
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Law of a finite collection of binary variables. Outcome bit `i` is the
/// value of variable `i`; outcomes of probability zero are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<S> {
    labels: Vec<String>,
    weights: BTreeMap<u64, S>,
}

impl<S: Scalar> JointDistribution<S> {
    /// Checks non-negativity and total mass one (exactly for exact scalars).
    pub fn new(labels: Vec<String>, weights: BTreeMap<u64, S>) -> Result<Self, VerifyError> {
        if labels.len() > 64 {
            return Err(VerifyError::TooManyVariables(labels.len()));
        }
        if let Some((o, _)) = weights.iter().find(|(_, w)| **w < S::zero()) {
            return Err(VerifyError::InvalidDistribution(format!("negative weight at outcome {o}")));
        }
        if let Some(o) = weights.keys().find(|&&o| labels.len() < 64 && o >> labels.len() != 0) {
            return Err(VerifyError::InvalidDistribution(format!("outcome {o} sets an unknown variable")));
        }
        let total: S = weights.values().cloned().sum();
        let ok = if S::EXACT { total.is_one() } else { (total.to_f64() - 1.0).abs() <= 1e-9 };
        if !ok {
            return Err(VerifyError::InvalidDistribution(format!("total mass {total}")));
        }
        let weights = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(Self { labels, weights })
    }

    /// Dense form: `weights[o]` for `o < 2^k`.
    pub fn from_dense(labels: Vec<String>, weights: Vec<S>) -> Result<Self, VerifyError> {
        Self::new(labels, weights.into_iter().enumerate().map(|(o, w)| (o as u64, w)).collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weights(&self) -> &BTreeMap<u64, S> {
        &self.weights
    }

    pub fn probability(&self, outcome: u64) -> S {
        self.weights.get(&outcome).cloned().unwrap_or_else(S::zero)
    }

    /// `P(X_i = 1)`.
    pub fn mean(&self, i: usize) -> S {
        self.weights.iter().filter(|(o, _)| *o >> i & 1 == 1).map(|(_, w)| w.clone()).sum()
    }

    /// Law of `(X_{vars[0]}, …)` as a dense vector; bit `j` is `X_{vars[j]}`.
    pub fn marginal(&self, vars: &[usize]) -> Vec<S> {
        let mut out = vec![S::zero(); 1 << vars.len()];
        for (o, w) in &self.weights {
            let j = vars.iter().enumerate().fold(0, |m, (j, &v)| m | ((o >> v & 1) as usize) << j);
            out[j] = out[j].clone() + w.clone();
        }
        out
    }
}

/// Exact conditional law of `variables(ω)` given `condition(ω)` under the
/// product measure of `g`.
///
/// Edges with probability 0 or 1 are frozen; the others are summed over.
/// Configurations are tallied by outcome and by how many edges of each
/// distinct probability are open, so the inner loop is integer counting and
/// the scalar weights are formed once per tally class.
pub fn enumerate_measure<S, C, V>(
    g: &MixedPlanarGraph,
    condition: C,
    variables: V,
    labels: Vec<String>,
) -> Result<JointDistribution<S>, VerifyError>
where
    S: Scalar,
    C: Fn(&Configuration) -> bool + Sync,
    V: Fn(&Configuration) -> u64 + Sync,
{
    use rayon::prelude::*;
    let m = g.edge_count();
    let free: Vec<usize> = (0..m).filter(|&e| !g.edges()[e].p.is_degenerate()).collect();
    if free.len() > ENUMERATION_LIMIT {
        return Err(VerifyError::TooManyEdges { free: free.len() });
    }
    let mut base = Configuration::all_closed(m);
    for (e, edge) in g.edges().iter().enumerate() {
        base.set(e, edge.p.exact().is_one());
    }
    let mut classes: Vec<(Prob, usize)> = Vec::new();
    let class_of: Vec<usize> = free
        .iter()
        .map(|&e| {
            let p = &g.edges()[e].p;
            match classes.iter().position(|(q, _)| q == p) {
                Some(c) => {
                    classes[c].1 += 1;
                    c
                }
                None => {
                    classes.push((p.clone(), 1));
                    classes.len() - 1
                }
            }
        })
        .collect();
    // Mixed-radix place value of each class in the tally key.
    let mut place = Vec::with_capacity(classes.len());
    let mut acc = 1u64;
    for (_, size) in &classes {
        place.push(acc);
        acc *= *size as u64 + 1;
    }
    let step: Vec<u64> = class_of.iter().map(|&c| place[c]).collect();

    const BLOCK: u64 = 1 << 12;
    let total = 1u64 << free.len();
    let tallies: HashMap<(u64, u64), u64> = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut local: HashMap<(u64, u64), u64> = HashMap::new();
            let mut omega = base.clone();
            for bits in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut key = 0u64;
                for (i, &e) in free.iter().enumerate() {
                    let open = bits >> i & 1 == 1;
                    omega.set(e, open);
                    if open {
                        key += step[i];
                    }
                }
                if condition(&omega) {
                    *local.entry((variables(&omega), key)).or_default() += 1;
                }
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let powers: Vec<(Vec<BigRational>, Vec<BigRational>)> = classes
        .iter()
        .map(|(p, size)| {
            let (mut up, mut down) = (vec![BigRational::one()], vec![BigRational::one()]);
            for j in 0..*size {
                up.push(&up[j] * p.exact());
                down.push(&down[j] * p.complement().exact());
            }
            (up, down)
        })
        .collect();
    let class_weight = |key: u64| -> BigRational {
        classes.iter().enumerate().fold(BigRational::one(), |w, (c, (_, size))| {
            let open = (key / place[c] % (*size as u64 + 1)) as usize;
            w * &powers[c].0[open] * &powers[c].1[size - open]
        })
    };
    let mut raw: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut keys: Vec<_> = tallies.into_iter().collect();
    keys.sort_unstable();
    for ((outcome, key), count) in keys {
        let w = class_weight(key) * BigRational::from_integer(count.into());
        *raw.entry(outcome).or_insert_with(BigRational::zero) += w;
    }
    let z: BigRational = raw.values().sum();
    if z.is_zero() {
        return Err(VerifyError::ConditionNull);
    }
    let weights = raw.into_iter().filter(|(_, w)| !w.is_zero()).map(|(o, w)| (o, S::from_exact(&(w / &z)))).collect();
    JointDistribution::new(labels, weights)
}
