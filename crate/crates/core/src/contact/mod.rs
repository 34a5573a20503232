//! The one-dimensional contact process on a finite window of sites: its
//! graphical representation, a forward event sweep, and the discrete
//! space-time diagram `G_{n,N}` as a percolation graph.
//!
//! Sites outside the window `[-L, L]` do not exist, so infection arrows that
//! would leave the window are never drawn.

mod discrete;
mod estimate;
pub mod oracle;

pub use discrete::{build_discrete, DiscreteDiagram, TRANSFER_SITE_LIMIT};
pub use estimate::{estimate_joint, EmpiricalJoint, JointSource, MAX_TARGETS};

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Poisson;

use crate::graph::GraphError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContactError {
    #[error("rate {0} is negative")]
    NegativeRate(String),
    #[error("window radius must be at least {min}, got {radius}")]
    Radius { radius: i64, min: i64 },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(String),
    #[error("time {t} exceeds the simulated horizon {t_max}")]
    BeyondHorizon { t: f64, t_max: f64 },
    #[error("resolution N = {resolution} is below the rate bound M = {bound}, so some edge probability leaves [0, 1]")]
    Resolution { resolution: u64, bound: String },
    #[error("no initially infected site inside the window")]
    NoSource,
    #[error("site {x} lies outside the window [-{radius}, {radius}]")]
    OutsideWindow { x: i64, radius: i64 },
    #[error("site configuration has radius {got}, expected {want}")]
    RadiusMismatch { got: i64, want: i64 },
    #[error("{0} target sites exceed the limit of {MAX_TARGETS}")]
    TooManyTargets(usize),
    #[error("at least one replica is required")]
    NoReplicas,
    #[error("event times {0} are not strictly increasing inside (0, t_max]")]
    BadEvents(String),
    #[error("exact top-row law over {sites} sites exceeds the limit of {TRANSFER_SITE_LIMIT}")]
    TransferTooLarge { sites: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rates of a contact process on the sites `-L..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactParams {
    radius: i64,
    /// `right[x + L]` is the rate of arrows `x → x + 1`, i.e. `λ(x + 1, x)`.
    right: Vec<BigRational>,
    /// `left[x + L]` is the rate of arrows `x → x − 1`, i.e. `λ(x − 1, x)`.
    left: Vec<BigRational>,
    delta: Vec<BigRational>,
}

impl ContactParams {
    /// `lambda(x, y)` is the rate at which an infected `y` infects its
    /// neighbour `x`; `delta(x)` the recovery rate of `x`.
    pub fn new(
        radius: i64,
        lambda: impl Fn(i64, i64) -> BigRational,
        delta: impl Fn(i64) -> BigRational,
    ) -> Result<Self, ContactError> {
        if radius < 0 {
            return Err(ContactError::Radius { radius, min: 0 });
        }
        let sites = -radius..=radius;
        let right: Vec<BigRational> =
            sites.clone().map(|x| if x < radius { lambda(x + 1, x) } else { BigRational::zero() }).collect();
        let left: Vec<BigRational> =
            sites.clone().map(|x| if x > -radius { lambda(x - 1, x) } else { BigRational::zero() }).collect();
        let delta: Vec<BigRational> = sites.map(delta).collect();
        if let Some(bad) = right.iter().chain(&left).chain(&delta).find(|r| r.is_negative()) {
            return Err(ContactError::NegativeRate(bad.to_string()));
        }
        Ok(Self { radius, right, left, delta })
    }

    /// Every infection rate `lambda`, every recovery rate `delta`.
    pub fn homogeneous(radius: i64, lambda: BigRational, delta: BigRational) -> Result<Self, ContactError> {
        Self::new(radius, |_, _| lambda.clone(), |_| delta.clone())
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        -self.radius..=self.radius
    }

    pub fn site_count(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn idx(&self, x: i64) -> usize {
        (x + self.radius) as usize
    }

    fn contains(&self, x: i64) -> bool {
        x.abs() <= self.radius
    }

    /// Rate at which `y` infects `x`; zero unless they are neighbours inside the window.
    pub fn lambda(&self, x: i64, y: i64) -> BigRational {
        if !self.contains(x) || !self.contains(y) {
            return BigRational::zero();
        }
        match x - y {
            1 => self.right[self.idx(y)].clone(),
            -1 => self.left[self.idx(y)].clone(),
            _ => BigRational::zero(),
        }
    }

    pub fn delta(&self, x: i64) -> BigRational {
        if self.contains(x) {
            self.delta[self.idx(x)].clone()
        } else {
            BigRational::zero()
        }
    }

    /// `M`, the largest rate.
    pub fn bound(&self) -> BigRational {
        self.right.iter().chain(&self.left).chain(&self.delta).max().cloned().unwrap_or_else(BigRational::zero)
    }

    /// The same process seen through `x ↦ −x`.
    pub fn reflected(&self) -> Self {
        let mut right = self.left.clone();
        let mut left = self.right.clone();
        let mut delta = self.delta.clone();
        right.reverse();
        left.reverse();
        delta.reverse();
        Self { radius: self.radius, right, left, delta }
    }
}

/// Infection indicators `η(x)` on the sites `-L..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteConfig {
    radius: i64,
    infected: FixedBitSet,
}

impl SiteConfig {
    pub fn healthy(radius: i64) -> Self {
        Self { radius, infected: FixedBitSet::with_capacity((2 * radius + 1) as usize) }
    }

    pub fn all_infected(radius: i64) -> Self {
        let mut c = Self::healthy(radius);
        c.infected.insert_range(..);
        c
    }

    pub fn from_sites(radius: i64, sites: impl IntoIterator<Item = i64>) -> Result<Self, ContactError> {
        let mut c = Self::healthy(radius);
        for x in sites {
            if x.abs() > radius {
                return Err(ContactError::OutsideWindow { x, radius });
            }
            c.set(x, true);
        }
        Ok(c)
    }

    pub(crate) fn from_flags(radius: i64, flags: &[bool]) -> Self {
        let mut c = Self::healthy(radius);
        for (i, &f) in flags.iter().enumerate() {
            c.infected.set(i, f);
        }
        c
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// `false` outside the window.
    pub fn get(&self, x: i64) -> bool {
        x.abs() <= self.radius && self.infected.contains((x + self.radius) as usize)
    }

    pub fn set(&mut self, x: i64, infected: bool) {
        assert!(x.abs() <= self.radius, "site {x} outside the window");
        self.infected.set((x + self.radius) as usize, infected);
    }

    pub fn infected(&self) -> impl Iterator<Item = i64> + '_ {
        self.infected.ones().map(|i| i as i64 - self.radius)
    }

    pub fn count(&self) -> usize {
        self.infected.count_ones(..)
    }

    /// Pointwise `self ≤ other` (same window assumed).
    pub fn le(&self, other: &SiteConfig) -> bool {
        self.infected.is_subset(&other.infected)
    }

    /// Sites `-r..=r` of `self`; `r` must not exceed the radius.
    pub fn restrict(&self, r: i64) -> Self {
        assert!(r <= self.radius);
        let mut c = Self::healthy(r);
        for x in -r..=r {
            c.set(x, self.get(x));
        }
        c
    }

    pub fn reflected(&self) -> Self {
        let mut c = Self::healthy(self.radius);
        for x in self.infected() {
            c.set(-x, true);
        }
        c
    }

    pub(crate) fn flags(&self) -> Vec<bool> {
        (0..self.infected.len()).map(|i| self.infected.contains(i)).collect()
    }
}

impl std::fmt::Display for SiteConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.infected.len() {
            f.write_str(if self.infected.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// A `*` on the time line.
    Recovery,
    /// An infection arrow towards the neighbouring site `to`.
    Arrow { to: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: i64,
    pub kind: EventKind,
}

/// Marks on the time lines `l_x`, `x ∈ [-L, L]`, up to `t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphicalRep {
    radius: i64,
    t_max: f64,
    recoveries: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
    left: Vec<Vec<f64>>,
}

impl GraphicalRep {
    /// Lists are indexed by `x + L`; arrows listed under `right` point to
    /// `x + 1`, those under `left` to `x − 1`.
    pub fn from_events(
        radius: i64,
        t_max: f64,
        recoveries: Vec<Vec<f64>>,
        right: Vec<Vec<f64>>,
        left: Vec<Vec<f64>>,
    ) -> Result<Self, ContactError> {
        let n = (2 * radius + 1) as usize;
        if radius < 0 {
            return Err(ContactError::Radius { radius, min: 0 });
        }
        if t_max.is_nan() || t_max <= 0.0 {
            return Err(ContactError::NonPositiveTime(t_max.to_string()));
        }
        for lists in [&recoveries, &right, &left] {
            if lists.len() != n {
                return Err(ContactError::BadEvents(format!("need {n} lists, got {}", lists.len())));
            }
            for l in lists {
                let ok = l.windows(2).all(|w| w[0] < w[1]) && l.iter().all(|&s| s > 0.0 && s <= t_max);
                if !ok {
                    return Err(ContactError::BadEvents(format!("{l:?}")));
                }
            }
        }
        if !right[n - 1].is_empty() || !left[0].is_empty() {
            return Err(ContactError::BadEvents("arrow leaving the window".into()));
        }
        Ok(Self { radius, t_max, recoveries, right, left })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn idx(&self, x: i64) -> usize {
        (x + self.radius) as usize
    }

    pub fn recoveries(&self, x: i64) -> &[f64] {
        &self.recoveries[self.idx(x)]
    }

    pub fn arrows_right(&self, x: i64) -> &[f64] {
        &self.right[self.idx(x)]
    }

    pub fn arrows_left(&self, x: i64) -> &[f64] {
        &self.left[self.idx(x)]
    }

    pub fn event_count(&self) -> usize {
        [&self.recoveries, &self.right, &self.left].iter().flat_map(|l| l.iter()).map(Vec::len).sum()
    }

    /// All marks in increasing time order.
    pub fn events(&self) -> Vec<Event> {
        let mut out = Vec::with_capacity(self.event_count());
        for x in -self.radius..=self.radius {
            let i = self.idx(x);
            out.extend(self.recoveries[i].iter().map(|&time| Event { time, site: x, kind: EventKind::Recovery }));
            out.extend(self.right[i].iter().map(|&time| Event { time, site: x, kind: EventKind::Arrow { to: x + 1 } }));
            out.extend(self.left[i].iter().map(|&time| Event { time, site: x, kind: EventKind::Arrow { to: x - 1 } }));
        }
        out.sort_by(|a, b| a.time.total_cmp(&b.time));
        out
    }
}

fn poisson_times<R: Rng + ?Sized>(rate: f64, t_max: f64, rng: &mut R) -> Vec<f64> {
    if rate <= 0.0 {
        return Vec::new();
    }
    let k = Poisson::new(rate * t_max).expect("positive mean").sample(rng) as usize;
    // 1 − U lies in (0, 1], so every time is in (0, t_max].
    let mut times: Vec<f64> = (0..k).map(|_| t_max * (1.0 - rng.random::<f64>())).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

/// Independent Poisson processes of densities `δ_x`, `λ(x − 1, x)` and
/// `λ(x + 1, x)` on every time line, over `(0, t_max]`.
pub fn simulate_graphical<R: Rng + ?Sized>(
    params: &ContactParams,
    t_max: f64,
    rng: &mut R,
) -> Result<GraphicalRep, ContactError> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(ContactError::NonPositiveTime(t_max.to_string()));
    }
    let mut recoveries = Vec::with_capacity(params.site_count());
    let mut right = Vec::with_capacity(params.site_count());
    let mut left = Vec::with_capacity(params.site_count());
    for i in 0..params.site_count() {
        recoveries.push(poisson_times(Scalar::to_f64(&params.delta[i]), t_max, rng));
        left.push(poisson_times(Scalar::to_f64(&params.left[i]), t_max, rng));
        right.push(poisson_times(Scalar::to_f64(&params.right[i]), t_max, rng));
    }
    Ok(GraphicalRep { radius: params.radius, t_max, recoveries, right, left })
}

/// Infection state at time `t`, by sweeping the marks forward in time: a `*`
/// at `x` heals `x`, an arrow from `y` to `x` infects `x` when `y` is infected.
pub fn evolve_state(gr: &GraphicalRep, initial: &SiteConfig, t: f64) -> Result<SiteConfig, ContactError> {
    if t > gr.t_max {
        return Err(ContactError::BeyondHorizon { t, t_max: gr.t_max });
    }
    if initial.radius != gr.radius {
        return Err(ContactError::RadiusMismatch { got: initial.radius, want: gr.radius });
    }
    let mut state = initial.clone();
    for ev in gr.events().into_iter().take_while(|e| e.time <= t) {
        match ev.kind {
            EventKind::Recovery => state.set(ev.site, false),
            EventKind::Arrow { to } => {
                if state.get(ev.site) {
                    state.set(to, true);
                }
            }
        }
    }
    Ok(state)
}

enum Picker {
    Empty,
    Uniform(Uniform<usize>),
    Alias(WeightedAliasIndex<f64>),
}

/// Samples `η_t` directly, without storing the marks.
///
/// The state at time `t` depends only on the order of the marks in
/// `(0, t]`; for the superposed process that order is a `Poisson(R t)`
/// number of independent mark types drawn with probability proportional to
/// their rates, `R` being the total rate.
pub struct StateSampler {
    radius: i64,
    /// `(from, to)` site indices; `to == u32::MAX` marks a recovery.
    events: Vec<(u32, u32)>,
    total_rate: f64,
    picker: Picker,
}

const RECOVERY: u32 = u32::MAX;

impl StateSampler {
    pub fn new(params: &ContactParams) -> Self {
        let mut events = Vec::new();
        let mut weights = Vec::new();
        for i in 0..params.site_count() {
            let from = i as u32;
            for (rate, to) in [
                (&params.delta[i], RECOVERY),
                (&params.left[i], from.wrapping_sub(1) /* rate is zero at the left edge */),
                (&params.right[i], from + 1),
            ] {
                let r = Scalar::to_f64(rate);
                if r > 0.0 {
                    events.push((from, to));
                    weights.push(r);
                }
            }
        }
        let total_rate = weights.iter().sum();
        let picker = if events.is_empty() {
            Picker::Empty
        } else if weights.iter().all(|&w| w == weights[0]) {
            Picker::Uniform(Uniform::new(0, events.len()).expect("non-empty range"))
        } else {
            Picker::Alias(WeightedAliasIndex::new(weights).expect("positive finite weights"))
        };
        Self { radius: params.radius, events, total_rate, picker }
    }

    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    /// Advances `state` (one flag per site, index `x + L`) by time `t`.
    pub fn run<R: Rng + ?Sized>(&self, state: &mut [bool], t: f64, rng: &mut R) {
        let mean = self.total_rate * t;
        if mean <= 0.0 {
            return;
        }
        let k = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
        let mut alive = state.iter().filter(|&&s| s).count();
        for _ in 0..k {
            if alive == 0 {
                return;
            }
            let j = match &self.picker {
                Picker::Empty => return,
                Picker::Uniform(u) => u.sample(rng),
                Picker::Alias(a) => a.sample(rng),
            };
            let (from, to) = self.events[j];
            if to == RECOVERY {
                if state[from as usize] {
                    state[from as usize] = false;
                    alive -= 1;
                }
            } else if state[from as usize] && !state[to as usize] {
                state[to as usize] = true;
                alive += 1;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, initial: &SiteConfig, t: f64, rng: &mut R) -> SiteConfig {
        assert_eq!(initial.radius, self.radius, "initial configuration window");
        let mut flags = initial.flags();
        self.run(&mut flags, t, rng);
        SiteConfig::from_flags(self.radius, &flags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::replica_rng;
    use num_traits::One;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn params_keep_arrows_inside_the_window() {
        let p = ContactParams::homogeneous(2, q(2, 1), q(1, 1)).unwrap();
        assert_eq!(p.lambda(3, 2), q(0, 1));
        assert_eq!(p.lambda(1, 2), q(2, 1));
        assert_eq!(p.lambda(0, 2), q(0, 1));
        assert_eq!(p.bound(), q(2, 1));
        assert!(ContactParams::homogeneous(1, q(-1, 1), q(1, 1)).is_err());
        let skew = ContactParams::new(1, |x, y| if x > y { q(3, 1) } else { q(1, 1) }, |x| q(x + 2, 1)).unwrap();
        let r = skew.reflected();
        assert_eq!(r.lambda(0, 1), q(3, 1));
        assert_eq!(r.delta(-1), q(3, 1));
    }

    #[test]
    fn no_recovery_rate_means_no_marks() {
        let p = ContactParams::homogeneous(3, q(1, 1), BigRational::zero()).unwrap();
        let gr = simulate_graphical(&p, 4.0, &mut replica_rng(1, 0)).unwrap();
        assert!((-3..=3).all(|x| gr.recoveries(x).is_empty()));
        assert!(gr.arrows_right(3).is_empty() && gr.arrows_left(-3).is_empty());
    }

    #[test]
    fn arrow_counts_have_the_poisson_mean() {
        let p = ContactParams::homogeneous(1, q(2, 1), q(1, 1)).unwrap();
        let reps = 10_000;
        let counts: Vec<f64> = (0..reps)
            .map(|i| simulate_graphical(&p, 5.0, &mut replica_rng(2, i)).unwrap().arrows_right(0).len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - 10.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn lists_are_sorted_and_positive() {
        let p = ContactParams::homogeneous(2, q(3, 1), q(2, 1)).unwrap();
        let gr = simulate_graphical(&p, 2.0, &mut replica_rng(3, 0)).unwrap();
        for x in -2..=2 {
            for l in [gr.recoveries(x), gr.arrows_left(x), gr.arrows_right(x)] {
                assert!(l.windows(2).all(|w| w[0] < w[1]));
                assert!(l.iter().all(|&s| s > 0.0 && s <= 2.0));
            }
        }
        assert!(simulate_graphical(&p, 0.0, &mut replica_rng(3, 0)).is_err());
    }

    fn empty_lists(n: usize) -> Vec<Vec<f64>> {
        vec![Vec::new(); n]
    }

    #[test]
    fn no_marks_keep_the_infection() {
        let gr = GraphicalRep::from_events(1, 1.0, empty_lists(3), empty_lists(3), empty_lists(3)).unwrap();
        let init = SiteConfig::from_sites(1, [0]).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(evolve_state(&gr, &init, t).unwrap(), init);
        }
        assert!(evolve_state(&gr, &init, 1.5).is_err());
    }

    #[test]
    fn a_mark_heals_the_site() {
        let mut rec = empty_lists(3);
        rec[1] = vec![0.3];
        let gr = GraphicalRep::from_events(1, 1.0, rec, empty_lists(3), empty_lists(3)).unwrap();
        let init = SiteConfig::from_sites(1, [0]).unwrap();
        assert!(evolve_state(&gr, &init, 0.2).unwrap().get(0));
        assert!(!evolve_state(&gr, &init, 0.5).unwrap().get(0));
    }

    #[test]
    fn crafted_three_sites_match_the_path_search() {
        // Site -1 infects 0 at 0.2, 0 heals at 0.6; -1 heals at 0.4 and
        // 0 passes the infection to 1 at 0.5.
        let mut rec = empty_lists(3);
        rec[0] = vec![0.4];
        rec[1] = vec![0.6];
        let mut right = empty_lists(3);
        right[0] = vec![0.2];
        right[1] = vec![0.5];
        let gr = GraphicalRep::from_events(1, 1.0, rec, right, empty_lists(3)).unwrap();
        let init = SiteConfig::from_sites(1, [-1]).unwrap();
        for t in [0.1, 0.3, 0.45, 0.55, 0.7, 1.0] {
            let swept = evolve_state(&gr, &init, t).unwrap();
            assert_eq!(swept, oracle::infected_by_paths(&gr, &init, t), "t = {t}");
        }
        let end = evolve_state(&gr, &init, 1.0).unwrap();
        assert_eq!(end.infected().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn misordered_events_are_rejected() {
        let mut rec = empty_lists(3);
        rec[0] = vec![0.5, 0.2];
        assert!(GraphicalRep::from_events(1, 1.0, rec, empty_lists(3), empty_lists(3)).is_err());
        let mut right = empty_lists(3);
        right[2] = vec![0.5];
        assert!(GraphicalRep::from_events(1, 1.0, empty_lists(3), right, empty_lists(3)).is_err());
    }

    #[test]
    fn sweep_matches_path_search_on_random_instances() {
        for i in 0..1000 {
            let (gr, init, times) = oracle::random_instance(&mut replica_rng(11, i));
            for t in times {
                assert_eq!(evolve_state(&gr, &init, t).unwrap(), oracle::infected_by_paths(&gr, &init, t));
            }
        }
    }

    #[test]
    fn streaming_sampler_matches_the_graphical_law() {
        // Three sites, all infected, t = 1: compare the law of the middle site.
        let p = ContactParams::new(1, |x, _| q(x + 3, 2), |x| q(2 - x, 2)).unwrap();
        let init = SiteConfig::all_infected(1);
        let sampler = StateSampler::new(&p);
        let reps = 40_000u64;
        let (mut a, mut b) = (0u64, 0u64);
        for i in 0..reps {
            let gr = simulate_graphical(&p, 1.0, &mut replica_rng(5, i)).unwrap();
            a += u64::from(evolve_state(&gr, &init, 1.0).unwrap().get(0));
            b += u64::from(sampler.sample(&init, 1.0, &mut replica_rng(6, i)).get(0));
        }
        let (pa, pb) = (a as f64 / reps as f64, b as f64 / reps as f64);
        let se = ((pa * (1.0 - pa) + pb * (1.0 - pb)) / reps as f64).sqrt();
        assert!((pa - pb).abs() < 4.0 * se, "{pa} vs {pb}");
    }

    #[test]
    fn pure_death_survival_is_exponential() {
        let p = ContactParams::homogeneous(0, BigRational::zero(), BigRational::one()).unwrap();
        let sampler = StateSampler::new(&p);
        let init = SiteConfig::all_infected(0);
        let reps = 20_000u64;
        let alive = (0..reps).filter(|&i| sampler.sample(&init, 0.7, &mut replica_rng(8, i)).get(0)).count();
        let ph = alive as f64 / reps as f64;
        let se = (ph * (1.0 - ph) / reps as f64).sqrt();
        assert!((ph - (-0.7f64).exp()).abs() < 3.0 * se);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn sweep_is_monotone_in_the_initial_state(seed in any::<u64>(), lo in 0u32..32, extra in 0u32..32, t in 0.0f64..2.0) {
            let p = ContactParams::homogeneous(2, q(3, 2), q(1, 1)).unwrap();
            let gr = simulate_graphical(&p, 2.0, &mut replica_rng(seed, 0)).unwrap();
            let small = SiteConfig::from_sites(2, (-2..=2).filter(|x| lo >> (x + 2) & 1 == 1)).unwrap();
            let large = SiteConfig::from_sites(2, (-2..=2).filter(|x| (lo | extra) >> (x + 2) & 1 == 1)).unwrap();
            let (a, b) = (evolve_state(&gr, &small, t).unwrap(), evolve_state(&gr, &large, t).unwrap());
            prop_assert!(a.le(&b));
        }
    }
}
