use std::fmt::Write as _;
use std::sync::OnceLock;

use super::{JointDistribution, VerifyError};
use crate::scalar::Scalar;

/// Largest arity for which every monotone function is generated.
pub const MAX_ARITY: usize = 4;

/// Largest collection on which [`check_conjunction_pairs`] runs.
pub const CONJUNCTION_LIMIT: usize = 10;

/// An increasing Boolean function of `arity ≤ 4` variables; bit `v` of
/// `table` is `f(v)`, where bit `i` of `v` is the `i`-th argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonotoneFunction {
    arity: u8,
    table: u16,
}

impl MonotoneFunction {
    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn table(&self) -> u16 {
        self.table
    }

    pub fn eval(&self, v: usize) -> bool {
        self.table >> v & 1 == 1
    }
}

fn is_monotone(k: usize, table: u32) -> bool {
    (0..1usize << k).all(|v| (0..k).all(|i| v >> i & 1 == 1 || table >> v & 1 <= table >> (v | 1 << i) & 1))
}

/// All increasing Boolean functions of `k` variables, found by filtering
/// every truth table, in increasing table order.
pub fn monotone_functions(k: usize) -> Result<&'static [MonotoneFunction], VerifyError> {
    static CACHE: OnceLock<Vec<Vec<MonotoneFunction>>> = OnceLock::new();
    if k > MAX_ARITY {
        return Err(VerifyError::Arity(k));
    }
    let all = CACHE.get_or_init(|| {
        (0..=MAX_ARITY)
            .map(|k| {
                (0..1u32 << (1 << k))
                    .filter(|&t| is_monotone(k, t))
                    .map(|t| MonotoneFunction { arity: k as u8, table: t as u16 })
                    .collect()
            })
            .collect()
    });
    Ok(&all[k])
}

/// Where the minimum covariance was attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub variables: Vec<usize>,
    pub f: MonotoneFunction,
    pub g: MonotoneFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationReport<S> {
    pub labels: Vec<String>,
    pub k_max: usize,
    pub subsets_tested: u64,
    pub pairs_tested: u64,
    /// `None` when nothing was tested.
    pub min_covariance: Option<S>,
    pub argmin: Option<Witness>,
    /// Pairs where `Cov(f, 1 − g) ≠ −Cov(f, g)`.
    pub identity_failures: u64,
    pub tolerance: f64,
    pub pass: bool,
}

impl<S: Scalar> AssociationReport<S> {
    fn finish(mut self) -> Self {
        let min_ok = match &self.min_covariance {
            None => true,
            Some(m) if S::EXACT => *m >= S::zero(),
            Some(m) => m.to_f64() >= -self.tolerance,
        };
        self.pass = min_ok && self.identity_failures == 0;
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "variables: {}", self.labels.join(" "));
        let _ = writeln!(out, "subset_size_cap: {}", self.k_max);
        let _ = writeln!(out, "subsets_tested: {}", self.subsets_tested);
        let _ = writeln!(out, "pairs_tested: {}", self.pairs_tested);
        match &self.min_covariance {
            Some(m) => {
                let _ = writeln!(out, "min_covariance: {m}");
                let _ = writeln!(out, "min_covariance_f64: {:.6e}", m.to_f64());
            }
            None => {
                let _ = writeln!(out, "min_covariance: none");
            }
        }
        if let Some(w) = &self.argmin {
            let names: Vec<&str> = w.variables.iter().map(|&i| self.labels[i].as_str()).collect();
            let _ = writeln!(out, "argmin: vars=[{}] f={:#06x} g={:#06x}", names.join(" "), w.f.table, w.g.table);
        }
        let _ = writeln!(out, "identity_failures: {}", self.identity_failures);
        let _ = writeln!(out, "verdict: {}", if self.pass { "pass" } else { "fail" });
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

struct SubsetResult<S> {
    pairs: u64,
    min: Option<(S, MonotoneFunction, MonotoneFunction)>,
    identity_failures: u64,
}

fn check_subset<S: Scalar>(law: &[S], k: usize, tolerance: f64) -> SubsetResult<S> {
    let funcs = monotone_functions(k).expect("arity checked by caller");
    // sums[t] = P(v ∈ t) for every truth table t.
    let tables = 1usize << (1 << k);
    let mut sums = vec![S::zero(); tables];
    for t in 1..tables {
        let low = t.trailing_zeros() as usize;
        sums[t] = sums[t & (t - 1)].clone() + law[low].clone();
    }
    let full = tables - 1;
    let mut out = SubsetResult { pairs: 0, min: None, identity_failures: 0 };
    for f in funcs {
        let ef = sums[f.table as usize].clone();
        for g in funcs {
            let eg = sums[g.table as usize].clone();
            let cov = sums[(f.table & g.table) as usize].clone() - ef.clone() * eg.clone();
            // Increasing f against the decreasing 1 − g.
            let not_g = full & !(g.table as usize);
            let cov_dec = sums[f.table as usize & not_g].clone() - ef.clone() * sums[not_g].clone();
            let identity = if S::EXACT {
                cov_dec == -cov.clone()
            } else {
                (cov_dec.to_f64() + cov.to_f64()).abs() <= tolerance.max(1e-12)
            };
            out.identity_failures += u64::from(!identity);
            out.pairs += 1;
            if out.min.as_ref().is_none_or(|(m, _, _)| cov < *m) {
                out.min = Some((cov, *f, *g));
            }
        }
    }
    out
}

/// Covariances of every ordered pair of increasing functions on every
/// subset of at most `k_max ≤ 4` variables, together with the check that
/// each increasing–decreasing pair has the opposite covariance.
///
/// Exact scalars pass iff the minimum is `≥ 0`; floating scalars iff it is
/// `≥ −tolerance`.
pub fn check_positive_association<S: Scalar>(
    dist: &JointDistribution<S>,
    k_max: usize,
    tolerance: f64,
) -> Result<AssociationReport<S>, VerifyError> {
    use rayon::prelude::*;
    if k_max > MAX_ARITY {
        return Err(VerifyError::Arity(k_max));
    }
    let subsets: Vec<Vec<usize>> = (1..=k_max.min(dist.len())).flat_map(|k| combinations(dist.len(), k)).collect();
    let results: Vec<SubsetResult<S>> =
        subsets.par_iter().map(|vars| check_subset(&dist.marginal(vars), vars.len(), tolerance)).collect();
    let mut report = AssociationReport {
        labels: dist.labels().to_vec(),
        k_max,
        subsets_tested: subsets.len() as u64,
        pairs_tested: 0,
        min_covariance: None,
        argmin: None,
        identity_failures: 0,
        tolerance,
        pass: false,
    };
    for (vars, r) in subsets.iter().zip(results) {
        report.pairs_tested += r.pairs;
        report.identity_failures += r.identity_failures;
        if let Some((m, f, g)) = r.min {
            if report.min_covariance.as_ref().is_none_or(|cur| m < *cur) {
                report.min_covariance = Some(m);
                report.argmin = Some(Witness { variables: vars.clone(), f, g });
            }
        }
    }
    Ok(report.finish())
}

/// Covariances of every pair of events `{X_i = 1 for all i ∈ A}`,
/// `{X_j = 1 for all j ∈ B}` over non-empty `A, B`, for collections of at most
/// [`CONJUNCTION_LIMIT`] variables. The witness records `A` and `B` as the
/// tables of `f` and `g` with arity 0.
pub fn check_conjunction_pairs<S: Scalar>(
    dist: &JointDistribution<S>,
    tolerance: f64,
) -> Result<AssociationReport<S>, VerifyError> {
    use rayon::prelude::*;
    let n = dist.len();
    if n > CONJUNCTION_LIMIT {
        return Err(VerifyError::TooManyForConjunctions(n));
    }
    // up[a] = P(X_i = 1 for all i ∈ a), by a superset-sum transform.
    let mut up = dist.marginal(&(0..n).collect::<Vec<_>>());
    for i in 0..n {
        for a in 0..1usize << n {
            if a >> i & 1 == 0 {
                up[a] = up[a].clone() + up[a | 1 << i].clone();
            }
        }
    }
    let rows: Vec<(u64, Option<(S, usize, usize)>)> = (1..1usize << n)
        .into_par_iter()
        .map(|a| {
            let mut best: Option<(S, usize, usize)> = None;
            for b in 1..1usize << n {
                let cov = up[a | b].clone() - up[a].clone() * up[b].clone();
                if best.as_ref().is_none_or(|(m, _, _)| cov < *m) {
                    best = Some((cov, a, b));
                }
            }
            ((1u64 << n) - 1, best)
        })
        .collect();
    let mut report = AssociationReport {
        labels: dist.labels().to_vec(),
        k_max: n,
        subsets_tested: 1,
        pairs_tested: 0,
        min_covariance: None,
        argmin: None,
        identity_failures: 0,
        tolerance,
        pass: false,
    };
    for (pairs, best) in rows {
        report.pairs_tested += pairs;
        if let Some((m, a, b)) = best {
            if report.min_covariance.as_ref().is_none_or(|cur| m < *cur) {
                report.min_covariance = Some(m);
                let f = MonotoneFunction { arity: 0, table: a as u16 };
                let g = MonotoneFunction { arity: 0, table: b as u16 };
                report.argmin = Some(Witness { variables: (0..n).collect(), f, g });
            }
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (0..=4).map(|k| monotone_functions(k).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168]);
        assert!(monotone_functions(5).is_err());
    }

    #[test]
    fn independent_bits_are_associated() {
        // Two independent Bernoulli(1/3) bits.
        let p = q(1, 3);
        let one = BigRational::from_integer(1.into());
        let w = vec![
            (&one - &p) * (&one - &p),
            &p * (&one - &p),
            (&one - &p) * &p,
            &p * &p,
        ];
        let d = JointDistribution::from_dense(vec!["x".into(), "y".into()], w).unwrap();
        let r = check_positive_association(&d, 2, 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.min_covariance, Some(q(0, 1)));
        assert_eq!(r.identity_failures, 0);
        let x = MonotoneFunction { arity: 1, table: 0b10 };
        let law = d.marginal(&[0]);
        let res = check_subset(&law, 1, 0.0);
        assert_eq!(res.pairs, 9);
        let var = law[1].clone() - law[1].clone() * law[1].clone();
        assert_eq!(var, q(2, 9));
        assert!(x.eval(1) && !x.eval(0));
    }

    #[test]
    fn anticorrelated_pair_fails() {
        // (X, 1 − X) with X ~ Bernoulli(1/2).
        let d = JointDistribution::from_dense(vec!["x".into(), "1-x".into()], vec![q(0, 1), q(1, 2), q(1, 2), q(0, 1)])
            .unwrap();
        let r = check_positive_association(&d, 2, 0.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.min_covariance, Some(q(-1, 4)));
        let c = check_conjunction_pairs(&d, 0.0).unwrap();
        assert_eq!(c.min_covariance, Some(q(-1, 4)));
        assert_eq!(c.pairs_tested, 9);
    }

    #[test]
    fn float_mode_uses_the_tolerance() {
        let d = JointDistribution::from_dense(vec!["x".into(), "y".into()], vec![0.25 - 1e-10, 0.25 + 1e-10, 0.25 + 1e-10, 0.25 - 1e-10])
            .unwrap();
        assert!(check_positive_association(&d, 2, 1e-9).unwrap().pass);
        assert!(!check_positive_association(&d, 2, 1e-12).unwrap().pass);
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(combinations(2, 3).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_measures_never_fail(ps in proptest::collection::vec(1i64..8, 3)) {
            let probs: Vec<BigRational> = ps.iter().map(|&p| q(p, 8)).collect();
            let one = BigRational::from_integer(1.into());
            let w: Vec<BigRational> = (0..8usize)
                .map(|o| (0..3).fold(one.clone(), |acc, i| acc * if o >> i & 1 == 1 { probs[i].clone() } else { &one - &probs[i] }))
                .collect();
            let d = JointDistribution::from_dense(vec!["a".into(), "b".into(), "c".into()], w).unwrap();
            let r = check_positive_association(&d, 3, 0.0).unwrap();
            prop_assert!(r.pass);
            prop_assert_eq!(r.identity_failures, 0);
        }

        #[test]
        fn monotone_tables_are_closed_under_and_or(k in 0usize..=4, i in 0usize..168, j in 0usize..168) {
            let funcs = monotone_functions(k).unwrap();
            let (f, g) = (funcs[i % funcs.len()], funcs[j % funcs.len()]);
            prop_assert!(is_monotone(k, u32::from(f.table & g.table)));
            prop_assert!(is_monotone(k, u32::from(f.table | g.table)));
        }
    }
}
