//! Monotonicity experiments: coupled trajectories under shared auxiliary
//! variables, and single auxiliary-variable flips.

use fixedbitset::FixedBitSet;
use rand::seq::IndexedRandom;
use rand::Rng;

use super::{step_with, AuxBlock, McmcError};
use crate::graph::Role;
use crate::percolation::{more_leftish_given, reachable, Configuration, PathSpace, PercolationError};

/// Violation counts for one coupled pair of trajectories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub steps: u64,
    /// Steps after which `hat` was no longer more leftish than `omega`.
    pub order_violations: u64,
    /// Steps with `η̂(x) < η(x)` for an a-block `x` or `η̂(y) > η(y)` for a b-block `y`.
    pub indicator_violations: u64,
}

impl TrialOutcome {
    pub fn is_clean(&self) -> bool {
        self.order_violations == 0 && self.indicator_violations == 0
    }
}

fn indicator_violated(space: &PathSpace, hat: &Configuration, omega: &Configuration) -> bool {
    let g = space.graph();
    let c = space.cycle();
    let (rh, r): (FixedBitSet, FixedBitSet) = (reachable(g, hat, &[space.source()]), reachable(g, omega, &[space.source()]));
    c.block(Role::A).iter().any(|&x| r.contains(x) && !rh.contains(x))
        || c.block(Role::B).iter().any(|&y| rh.contains(y) && !r.contains(y))
}

fn ordered(space: &PathSpace, hat: &Configuration, omega: &Configuration) -> Result<bool, McmcError> {
    let (xh, x) = (space.extremes(hat)?, space.extremes(omega)?);
    Ok(more_leftish_given(hat, &xh, omega, &x))
}

/// Runs `hat` and `omega` side by side for `steps` steps with the same
/// auxiliary draws, checking the order and the indicator monotonicity after
/// each step. `hat` must start more leftish than `omega`.
pub fn coupled_trial<R: Rng + ?Sized>(
    space: &PathSpace,
    hat: &Configuration,
    omega: &Configuration,
    steps: u64,
    rng: &mut R,
) -> Result<TrialOutcome, McmcError> {
    if !ordered(space, hat, omega)? {
        return Err(PercolationError::InvalidPath("coupled trial needs an ordered starting pair".into()).into());
    }
    let (mut hat, mut omega) = (hat.clone(), omega.clone());
    let mut out = TrialOutcome { steps, ..Default::default() };
    for _ in 0..steps {
        let aux = AuxBlock::draw(space, rng);
        hat = step_with(space, &hat, &aux)?;
        omega = step_with(space, &omega, &aux)?;
        out.order_violations += u64::from(!ordered(space, &hat, &omega)?);
        out.indicator_violations += u64::from(indicator_violated(space, &hat, &omega));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipKind {
    /// `l_k(e)` raised from 0 to 1.
    RaiseL,
    /// `r_k(e)` lowered from 1 to 0.
    LowerR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipOutcome {
    /// `None` when the drawn step had no flippable variable of the drawn kind.
    pub flip: Option<(FlipKind, u64, usize)>,
    pub outcome: TrialOutcome,
}

/// Draws `steps` auxiliary blocks, copies them with one variable flipped in
/// the leftish direction at a random step, runs both from `alpha` and checks
/// that the flipped run stays more leftish than the original from the flip on.
pub fn flip_trial<R: Rng + ?Sized>(
    space: &PathSpace,
    alpha: &Configuration,
    steps: u64,
    rng: &mut R,
) -> Result<FlipOutcome, McmcError> {
    assert!(steps > 0);
    let auxes: Vec<AuxBlock> = (0..steps).map(|_| AuxBlock::draw(space, rng)).collect();
    let k = rng.random_range(0..steps);
    let kind = if rng.random::<bool>() { FlipKind::RaiseL } else { FlipKind::LowerR };
    let block = &auxes[k as usize];
    let candidates: Vec<usize> = (0..block.l.len())
        .filter(|&e| match kind {
            FlipKind::RaiseL => !block.l.is_open(e),
            FlipKind::LowerR => block.r.is_open(e),
        })
        .collect();
    let Some(&e) = candidates.choose(rng) else {
        return Ok(FlipOutcome { flip: None, outcome: TrialOutcome::default() });
    };
    let mut flipped = auxes.clone();
    match kind {
        FlipKind::RaiseL => flipped[k as usize].l.set(e, true),
        FlipKind::LowerR => flipped[k as usize].r.set(e, false),
    }
    let (mut omega, mut hat) = (alpha.clone(), alpha.clone());
    let mut out = TrialOutcome { steps: steps - k, ..Default::default() };
    for (n, (a, b)) in auxes.iter().zip(&flipped).enumerate() {
        omega = step_with(space, &omega, a)?;
        hat = step_with(space, &hat, b)?;
        if n as u64 >= k {
            out.order_violations += u64::from(!ordered(space, &hat, &omega)?);
            out.indicator_violations += u64::from(indicator_violated(space, &hat, &omega));
        }
    }
    Ok(FlipOutcome { flip: Some((kind, k, e)), outcome: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::normalize;
    use crate::graph::samples::{diamond, diamond_with_chord, grid};
    use crate::percolation::sample_config;
    use crate::scalar::Prob;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn coupled_trials_preserve_the_order() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(17);
        for pair in [diamond(Prob::ratio(1, 2).unwrap()), diamond_with_chord(Prob::ratio(1, 2).unwrap())] {
            let n = normalize(&pair.0, &pair.1).unwrap();
            let space = PathSpace::from_normalized(&n);
            let mut trials = 0;
            while trials < 200 {
                let (h, w) = (sample_config(&n.graph, &mut rng), sample_config(&n.graph, &mut rng));
                if !space.in_gamma(&h) || !space.in_gamma(&w) || !ordered(&space, &h, &w).unwrap() {
                    continue;
                }
                let out = coupled_trial(&space, &h, &w, 20, &mut rng).unwrap();
                assert!(out.is_clean(), "{} vs {}: {out:?}", h.to_hex(), w.to_hex());
                trials += 1;
            }
        }
    }

    #[test]
    fn single_flips_push_leftwards() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(23);
        let (g, c) = grid(3, 2, Prob::ratio(1, 2).unwrap());
        let n = normalize(&g, &c).unwrap();
        let space = PathSpace::from_normalized(&n);
        let alpha = Configuration::all_open(n.graph.edge_count());
        for _ in 0..300 {
            let out = flip_trial(&space, &alpha, 10, &mut rng).unwrap();
            assert!(out.outcome.is_clean(), "{out:?}");
        }
    }

    #[test]
    fn unordered_start_is_rejected() {
        let (g, c) = diamond(Prob::ratio(1, 2).unwrap());
        let n = normalize(&g, &c).unwrap();
        let space = PathSpace::from_normalized(&n);
        let m = n.graph.edge_count();
        let only = |pairs: &[(usize, usize)]| {
            let mut w = Configuration::all_closed(m);
            for &(t, h) in pairs {
                w.set(n.graph.edges().iter().position(|e| e.tail == t && e.head == h).unwrap(), true);
            }
            w
        };
        let (top, bottom) = (only(&[(0, 1), (1, 2)]), only(&[(0, 3), (3, 2)]));
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0);
        assert!(coupled_trial(&space, &bottom, &top, 1, &mut rng).is_err());
        assert!(coupled_trial(&space, &top, &bottom, 1, &mut rng).is_ok());
    }
}
