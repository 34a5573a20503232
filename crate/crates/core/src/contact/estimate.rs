use std::fmt::Write as _;

use rand::Rng;

use super::{ContactError, ContactParams, DiscreteDiagram, SiteConfig, StateSampler};
use crate::percolation::sample_config;
use crate::seed;

/// Largest target set accepted by [`estimate_joint`].
pub const MAX_TARGETS: usize = 12;

/// Where the samples of `η_t` come from.
#[derive(Debug, Clone, Copy)]
pub enum JointSource<'a> {
    Continuous { params: &'a ContactParams, initial: &'a SiteConfig, t: f64 },
    /// `η^{(n,N)}` at the top of the diagram, from product-measure samples.
    Discrete(&'a DiscreteDiagram),
}

/// Outcome counts of `(η_t(x) : x ∈ targets)`; outcome bit `i` is `η_t(targets[i])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalJoint {
    pub targets: Vec<i64>,
    pub counts: Vec<u64>,
    pub reps: u64,
    pub master_seed: u64,
}

impl EmpiricalJoint {
    pub fn probability(&self, outcome: usize) -> f64 {
        self.counts[outcome] as f64 / self.reps as f64
    }

    /// Binomial standard error of [`probability`](Self::probability).
    pub fn std_error(&self, outcome: usize) -> f64 {
        let p = self.probability(outcome);
        (p * (1.0 - p) / self.reps as f64).sqrt()
    }

    /// `P(η_t(targets[i]) = 1)` and its standard error.
    pub fn marginal(&self, i: usize) -> (f64, f64) {
        let hits: u64 = self.counts.iter().enumerate().filter(|(o, _)| o >> i & 1 == 1).map(|(_, c)| c).sum();
        let p = hits as f64 / self.reps as f64;
        (p, (p * (1.0 - p) / self.reps as f64).sqrt())
    }

    /// One row per outcome: the target values, the count, the estimate and its standard error.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for x in &self.targets {
            let _ = write!(out, "eta({x}),");
        }
        out.push_str("count,probability,std_error\n");
        for (o, c) in self.counts.iter().enumerate() {
            for i in 0..self.targets.len() {
                let _ = write!(out, "{},", o >> i & 1);
            }
            let _ = writeln!(out, "{c},{:.6},{:.6}", self.probability(o), self.std_error(o));
        }
        out
    }
}

/// Empirical joint law of `η_t` on `targets`. One `u64` is drawn from `rng`
/// as the master seed of the replica streams.
///
/// The continuous source samples through [`StateSampler`]; the discrete one
/// through [`sample_config`] and [`DiscreteDiagram::eta`].
pub fn estimate_joint<R: Rng + ?Sized>(
    source: JointSource<'_>,
    targets: &[i64],
    reps: u64,
    rng: &mut R,
) -> Result<EmpiricalJoint, ContactError> {
    if targets.len() > MAX_TARGETS {
        return Err(ContactError::TooManyTargets(targets.len()));
    }
    if reps == 0 {
        return Err(ContactError::NoReplicas);
    }
    let radius = match source {
        JointSource::Continuous { params, initial, t } => {
            if initial.radius() != params.radius() {
                return Err(ContactError::RadiusMismatch { got: initial.radius(), want: params.radius() });
            }
            if t.is_nan() || t < 0.0 {
                return Err(ContactError::NonPositiveTime(t.to_string()));
            }
            params.radius()
        }
        JointSource::Discrete(d) => d.n(),
    };
    if let Some(&x) = targets.iter().find(|x| x.abs() > radius) {
        return Err(ContactError::OutsideWindow { x, radius });
    }
    let encode = |eta: &SiteConfig| targets.iter().enumerate().fold(0, |m, (i, &x)| m | usize::from(eta.get(x)) << i);
    let master = rng.next_u64();
    let outcomes = 1usize << targets.len();
    let counts = match source {
        JointSource::Continuous { params, initial, t } => {
            let sampler = StateSampler::new(params);
            seed::tally(master, reps, outcomes, |r| encode(&sampler.sample(initial, t, r)))
        }
        JointSource::Discrete(d) => seed::tally(master, reps, outcomes, |r| encode(&d.eta(&sample_config(d.graph(), r)))),
    };
    Ok(EmpiricalJoint { targets: targets.to_vec(), counts, reps, master_seed: master })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::build_discrete;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn frozen_process_stays_infected() {
        let p = ContactParams::homogeneous(3, BigRational::zero(), BigRational::zero()).unwrap();
        let init = SiteConfig::all_infected(3);
        let src = JointSource::Continuous { params: &p, initial: &init, t: 2.0 };
        let est = estimate_joint(src, &[-1, 0, 2], 500, &mut Xoshiro256PlusPlus::seed_from_u64(1)).unwrap();
        assert_eq!(est.counts[0b111], 500);
    }

    #[test]
    fn single_site_dies_exponentially() {
        let p = ContactParams::homogeneous(0, BigRational::zero(), BigRational::one()).unwrap();
        let init = SiteConfig::all_infected(0);
        let src = JointSource::Continuous { params: &p, initial: &init, t: 1.3 };
        let est = estimate_joint(src, &[0], 50_000, &mut Xoshiro256PlusPlus::seed_from_u64(2)).unwrap();
        let (ph, se) = est.marginal(0);
        assert!((ph - (-1.3f64).exp()).abs() < 3.0 * se, "{ph} ± {se}");
    }

    #[test]
    fn guards_and_reproducibility() {
        let p = ContactParams::homogeneous(13, BigRational::one(), BigRational::one()).unwrap();
        let init = SiteConfig::all_infected(13);
        let src = JointSource::Continuous { params: &p, initial: &init, t: 1.0 };
        let many: Vec<i64> = (-6..=6).collect();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        assert_eq!(estimate_joint(src, &many, 10, &mut rng).unwrap_err(), ContactError::TooManyTargets(13));
        assert!(estimate_joint(src, &[14], 10, &mut rng).is_err());
        assert!(estimate_joint(src, &[0], 0, &mut rng).is_err());
        let a = estimate_joint(src, &[-1, 0, 1], 9000, &mut Xoshiro256PlusPlus::seed_from_u64(4)).unwrap();
        let b = estimate_joint(src, &[-1, 0, 1], 9000, &mut Xoshiro256PlusPlus::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.to_csv().starts_with("eta(-1),eta(0),eta(1),count"));
    }

    #[test]
    fn discrete_estimate_matches_exact_law() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let p = ContactParams::homogeneous(1, q(2, 1), q(1, 1)).unwrap();
        let d = build_discrete(&p, 1, 3, &q(1, 1), &SiteConfig::all_infected(1)).unwrap();
        let law = d.exact_top_law::<f64>().unwrap();
        let est = estimate_joint(JointSource::Discrete(&d), &[-1, 0, 1], 30_000, &mut Xoshiro256PlusPlus::seed_from_u64(5))
            .unwrap();
        for (o, p) in law.iter().enumerate() {
            let se = (p * (1.0 - p) / 30_000.0).sqrt().max(1e-9);
            assert!((est.probability(o) - p).abs() < 4.0 * se);
        }
    }
}
