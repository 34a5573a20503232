//! The resampling chain on `Γ = {u → w}`: substep (i) redraws everything
//! right of the leftmost open path, substep (ii) everything left of the
//! rightmost open path.

mod diagnostics;
mod exact;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::percolation::{reachable, sample_config, Configuration, PathSpace, PercolationError, Side};

pub use diagnostics::{coupled_trial, flip_trial, FlipKind, FlipOutcome, TrialOutcome};
pub use exact::{exact_kernel, ExactChain, Kernel, KERNEL_WORK_LIMIT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McmcError {
    #[error(transparent)]
    Percolation(#[from] PercolationError),
    #[error("thinning interval must be at least 1")]
    ZeroThin,
    #[error("burn-in {burn_in} exceeds the number of steps {steps}")]
    BurnInTooLong { steps: u64, burn_in: u64 },
    #[error("exact kernel needs {work} units of work, above the limit {limit}")]
    TooLarge { work: u128, limit: u128 },
}

/// The auxiliary variables of one step: `r` drives substep (i), `l` substep (ii).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxBlock {
    pub l: Configuration,
    pub r: Configuration,
}

impl AuxBlock {
    /// Draws `r` for every edge, then `l` for every edge, each open with
    /// probability `p_e`. Always consumes the same amount of randomness.
    pub fn draw<R: Rng + ?Sized>(space: &PathSpace, rng: &mut R) -> Self {
        let r = sample_config(space.graph(), rng);
        let l = sample_config(space.graph(), rng);
        Self { l, r }
    }
}

/// One resampling substep. `Side::Right` is substep (i): the edges right of
/// the leftmost open path take their values from `aux.r`. `Side::Left` is
/// substep (ii): the edges left of the rightmost open path take `aux.l`.
pub fn substep(space: &PathSpace, omega: &Configuration, aux: &AuxBlock, side: Side) -> Result<Configuration, McmcError> {
    let guide = space.extreme_path(omega, side.opposite()).ok_or(PercolationError::NotInGamma)?;
    let part = space.partition(&guide)?;
    let source = match side {
        Side::Right => &aux.r,
        Side::Left => &aux.l,
    };
    let mut out = omega.clone();
    for e in part.side(side).ones() {
        out.set(e, source.is_open(e));
    }
    Ok(out)
}

/// Both substeps, (i) then (ii).
pub fn step_with(space: &PathSpace, omega: &Configuration, aux: &AuxBlock) -> Result<Configuration, McmcError> {
    let mid = substep(space, omega, aux, Side::Right)?;
    substep(space, &mid, aux, Side::Left)
}

#[derive(Debug, Clone)]
pub struct ChainState<'g> {
    space: PathSpace<'g>,
    pub current: Configuration,
    pub step_count: u64,
}

/// Starts the chain at `alpha`, which must lie in `Γ`.
pub fn init_chain<'g>(space: PathSpace<'g>, alpha: Configuration) -> Result<ChainState<'g>, McmcError> {
    if alpha.len() != space.graph().edge_count() {
        return Err(PercolationError::WrongLength { expected: space.graph().edge_count(), found: alpha.len() }.into());
    }
    if !space.in_gamma(&alpha) {
        return Err(PercolationError::NotInGamma.into());
    }
    Ok(ChainState { space, current: alpha, step_count: 0 })
}

impl<'g> ChainState<'g> {
    pub fn space(&self) -> &PathSpace<'g> {
        &self.space
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let aux = AuxBlock::draw(&self.space, rng);
        self.step_aux(&aux);
    }

    pub fn step_aux(&mut self, aux: &AuxBlock) {
        self.current = step_with(&self.space, &self.current, aux).expect("the chain stays in Γ");
        self.step_count += 1;
    }

    /// `η(x) = I{u → x}` for every vertex.
    pub fn indicators(&self) -> FixedBitSet {
        reachable(self.space.graph(), &self.current, &[self.space.source()])
    }
}

/// A configuration emitted by [`run_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub step: u64,
    pub config: Configuration,
    pub eta: FixedBitSet,
}

/// Lazy stream of every `thin`-th state after `burn_in` steps, up to `steps`.
pub struct ChainRun<'s, 'g, R> {
    state: &'s mut ChainState<'g>,
    rng: R,
    end: u64,
    burn_in_until: u64,
    thin: u64,
}

impl<R: Rng> Iterator for ChainRun<'_, '_, R> {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        while self.state.step_count < self.end {
            self.state.step(&mut self.rng);
            let n = self.state.step_count;
            if n > self.burn_in_until && (n - self.burn_in_until).is_multiple_of(self.thin) {
                return Some(Sample { step: n, config: self.state.current.clone(), eta: self.state.indicators() });
            }
        }
        None
    }
}

/// Runs `steps` further steps from `state`, discarding the first `burn_in`.
pub fn run_chain<'s, 'g, R: Rng>(
    state: &'s mut ChainState<'g>,
    steps: u64,
    burn_in: u64,
    thin: u64,
    rng: R,
) -> Result<ChainRun<'s, 'g, R>, McmcError> {
    if thin == 0 {
        return Err(McmcError::ZeroThin);
    }
    if burn_in > steps {
        return Err(McmcError::BurnInTooLong { steps, burn_in });
    }
    let start = state.step_count;
    Ok(ChainRun { state, rng, end: start + steps, burn_in_until: start + burn_in, thin })
}

/// Default burn-in: ten sweeps' worth of edges.
pub fn default_burn_in(space: &PathSpace) -> u64 {
    10 * space.graph().edge_count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::{diamond, diamond_with_chord};
    use crate::graph::{normalize, MixedPlanarGraph, Normalized, Role};
    use crate::scalar::Prob;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn diamond_half() -> Normalized {
        let (g, c) = diamond(Prob::ratio(1, 2).unwrap());
        normalize(&g, &c).unwrap()
    }

    fn edge(g: &MixedPlanarGraph, t: usize, h: usize) -> usize {
        g.edges().iter().position(|e| e.tail == t && e.head == h).unwrap()
    }

    #[test]
    fn init_accepts_gamma_and_rejects_the_rest() {
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        assert!(init_chain(space, Configuration::all_open(m)).is_ok());
        assert_eq!(init_chain(space, Configuration::all_closed(m)).unwrap_err(), McmcError::Percolation(PercolationError::NotInGamma));
        for i in 0..1u64 << m {
            let w = Configuration::from_index(i, m);
            assert_eq!(init_chain(space, w.clone()).is_ok(), space.in_gamma(&w));
        }
    }

    #[test]
    fn substep_right_on_all_open_diamond() {
        let n = diamond_half();
        let g = &n.graph;
        let space = PathSpace::from_normalized(&n);
        let m = g.edge_count();
        let aux = AuxBlock { l: Configuration::all_open(m), r: Configuration::all_closed(m) };
        let out = substep(&space, &Configuration::all_open(m), &aux, Side::Right).unwrap();
        for (t, h) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert!(out.is_open(edge(g, t, h)));
        }
        for (t, h) in [(0, 3), (3, 0), (3, 2), (2, 3)] {
            assert!(!out.is_open(edge(g, t, h)));
        }
    }

    #[test]
    fn aux_equal_to_state_is_the_identity() {
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        for i in 0..1u64 << m {
            let w = Configuration::from_index(i, m);
            if space.in_gamma(&w) {
                let aux = AuxBlock { l: w.clone(), r: w.clone() };
                assert_eq!(step_with(&space, &w, &aux).unwrap(), w);
            }
        }
    }

    #[test]
    fn substeps_stay_in_gamma_exhaustively() {
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        let gamma: Vec<_> = (0..1u64 << m).map(|i| Configuration::from_index(i, m)).filter(|w| space.in_gamma(w)).collect();
        for w in &gamma {
            for a in 0..1u64 << m {
                let aux = Configuration::from_index(a, m);
                let block = AuxBlock { l: aux.clone(), r: aux };
                for side in [Side::Right, Side::Left] {
                    assert!(space.in_gamma(&substep(&space, w, &block, side).unwrap()));
                }
            }
        }
    }

    #[test]
    fn substeps_stay_in_gamma_randomly() {
        let (g, c) = diamond_with_chord(Prob::ratio(1, 3).unwrap());
        let n = normalize(&g, &c).unwrap();
        let space = PathSpace::from_normalized(&n);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
        let mut state = init_chain(space, Configuration::all_open(n.graph.edge_count())).unwrap();
        for _ in 0..100_000 {
            let aux = AuxBlock::draw(&space, &mut rng);
            let mid = substep(&space, &state.current, &aux, Side::Right).unwrap();
            assert!(space.in_gamma(&mid));
            state.step_aux(&aux);
            assert!(space.in_gamma(&state.current));
        }
    }

    #[test]
    fn single_edge_graph_never_moves() {
        use crate::graph::{BoundaryCycle, Edge, Vertex};
        use crate::graph::geometry::Point;
        // A triangle u, w, x whose only route u → w is the direct edge.
        let p = Prob::ratio(1, 2).unwrap();
        let vertices = vec![
            Vertex { id: 0, pos: Point::new(0.0, 0.0) },
            Vertex { id: 1, pos: Point::new(1.0, 1.0) },
            Vertex { id: 2, pos: Point::new(2.0, 0.0) },
        ];
        let edges = vec![
            Edge { id: 0, tail: 0, head: 2, oriented: true, p: p.clone() },
            Edge { id: 1, tail: 1, head: 0, oriented: true, p: p.clone() },
            Edge { id: 2, tail: 1, head: 2, oriented: true, p },
        ];
        let g = MixedPlanarGraph::new(vertices, edges, true).unwrap();
        let c = BoundaryCycle::new(&g, vec![0, 1, 2], vec![Role::U, Role::A, Role::W], vec![0], vec![2]).unwrap();
        let n = normalize(&g, &c).unwrap();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        let mut alpha = Configuration::all_closed(m);
        alpha.set(edge(&n.graph, 0, 2), true);
        let mut state = init_chain(space, alpha.clone()).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let mut visited = std::collections::HashSet::new();
        for _ in 0..1000 {
            state.step(&mut rng);
            assert!(state.current.is_open(edge(&n.graph, 0, 2)));
            visited.insert(state.current.clone());
        }
        // Only the edges off the direct route move; the route itself never does.
        assert!(visited.len() > 1);
    }

    #[test]
    fn identical_seeds_give_identical_trajectories() {
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        let run = |seed| {
            let mut s = init_chain(space, Configuration::all_open(m)).unwrap();
            run_chain(&mut s, 200, 0, 1, Xoshiro256PlusPlus::seed_from_u64(seed)).unwrap().map(|x| x.config).collect::<Vec<_>>()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn run_chain_counts() {
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        let mut s = init_chain(space, Configuration::all_open(m)).unwrap();
        let rng = || Xoshiro256PlusPlus::seed_from_u64(1);
        assert_eq!(run_chain(&mut s, 7, 7, 1, rng()).unwrap().count(), 0);
        assert_eq!(run_chain(&mut s, 17, 7, 1, rng()).unwrap().count(), 10);
        assert_eq!(run_chain(&mut s, 17, 7, 3, rng()).unwrap().count(), 3);
        assert_eq!(run_chain(&mut s, 3, 7, 1, rng()).err(), Some(McmcError::BurnInTooLong { steps: 3, burn_in: 7 }));
        assert_eq!(run_chain(&mut s, 3, 0, 0, rng()).err(), Some(McmcError::ZeroThin));
        assert_eq!(s.step_count, 41);
    }

    #[test]
    fn empirical_connection_frequency_matches_exact_law() {
        use crate::scalar::Scalar;
        let n = diamond_half();
        let space = PathSpace::from_normalized(&n);
        let exact = exact_kernel::<f64>(&space).unwrap();
        let a = n.cycle.block(Role::A)[0];
        let target: f64 = exact.states.iter().zip(&exact.mu).filter(|(w, _)| reachable(&n.graph, w, &[0]).contains(a)).map(|(_, p)| p.to_f64()).sum();
        let mut s = init_chain(space, Configuration::all_open(n.graph.edge_count())).unwrap();
        let k = 200_000;
        let hits = run_chain(&mut s, k + 100, 100, 1, Xoshiro256PlusPlus::seed_from_u64(3)).unwrap().filter(|x| x.eta.contains(a)).count();
        let freq = hits as f64 / k as f64;
        // Consecutive states are correlated; allow for an integrated autocorrelation time of a few steps.
        let se = (target * (1.0 - target) / k as f64).sqrt() * 3.0;
        assert!((freq - target).abs() < 3.0 * se, "freq {freq} exact {target}");
    }
}
