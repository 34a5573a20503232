use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{ContactError, ContactParams, SiteConfig};
use crate::graph::geometry::Point;
use crate::graph::{BoundaryCycle, Edge, GraphDescription, MixedPlanarGraph, Role, Vertex, VertexIndex};
use crate::percolation::{reachable, Configuration};
use crate::scalar::{Prob, Scalar};

/// Largest row width `2n + 1` accepted by [`DiscreteDiagram::exact_top_law`].
pub const TRANSFER_SITE_LIMIT: usize = 7;

/// The percolation graph `G_{n,N}` on `{(x, k/N) : |x| ≤ n, 0 ≤ k ≤ N t̂}`.
///
/// Vertex `(x, k)` (level `k`, time `k/N`) has index `k (2n + 1) + x + n` and
/// is drawn at `(x, k)`. Its out-edges go to `(x + 1, k)` with probability
/// `λ(x + 1, x)/N`, to `(x − 1, k)` with `λ(x − 1, x)/N` and to `(x, k + 1)`
/// with `1 − δ_x/N`.
///
/// The boundary cycle runs clockwise around the rectangle: up the left
/// column, along the top row, down the right column and back along the
/// bottom row. The top row is split by the target `(0, t̂)`: sites `x < 0`
/// form the a-block and sites `x > 0` the b-block; every other boundary
/// vertex is in the u-block. `U` holds the initially infected bottom sites.
#[derive(Debug, Clone)]
pub struct DiscreteDiagram {
    params: ContactParams,
    n: i64,
    resolution: u64,
    levels: u64,
    t_hat: BigRational,
    initial: SiteConfig,
    graph: MixedPlanarGraph,
    cycle: BoundaryCycle,
    up: Vec<Prob>,
}

/// Builds `G_{n,N}` for time `t`; `initial` may be wider than the diagram
/// and is cut down to `[-n, n]`.
pub fn build_discrete(
    params: &ContactParams,
    n: i64,
    resolution: u64,
    t: &BigRational,
    initial: &SiteConfig,
) -> Result<DiscreteDiagram, ContactError> {
    if n < 1 {
        return Err(ContactError::Radius { radius: n, min: 1 });
    }
    if params.radius() < n {
        return Err(ContactError::Radius { radius: params.radius(), min: n });
    }
    if initial.radius() < n {
        return Err(ContactError::RadiusMismatch { got: initial.radius(), want: n });
    }
    if !t.is_positive() {
        return Err(ContactError::NonPositiveTime(t.to_string()));
    }
    let big_n = BigRational::from_integer(resolution.into());
    let bound = params.bound();
    if resolution == 0 || bound > big_n {
        return Err(ContactError::Resolution { resolution, bound: bound.to_string() });
    }
    let levels_q = (t * &big_n).ceil();
    let levels: u64 = levels_q.to_integer().try_into().expect("level count fits in u64");
    let t_hat = levels_q / &big_n;
    let initial = initial.restrict(n);
    if initial.count() == 0 {
        return Err(ContactError::NoSource);
    }

    let width = (2 * n + 1) as usize;
    let at = |x: i64, k: u64| k as usize * width + (x + n) as usize;
    let prob = |rate: BigRational| Prob::new(rate / &big_n).expect("rates are bounded by N");
    let up: Vec<Prob> = (-n..=n).map(|x| prob(params.delta(x)).complement()).collect();

    let mut vertices = Vec::with_capacity(width * (levels as usize + 1));
    for k in 0..=levels {
        for x in -n..=n {
            vertices.push(Vertex { id: at(x, k) as i64, pos: Point::new(x as f64, k as f64) });
        }
    }
    let mut edges = Vec::new();
    let mut push = |tail: usize, head: usize, p: Prob| {
        edges.push(Edge { id: edges.len() as i64, tail, head, oriented: true, p });
    };
    for k in 0..=levels {
        for x in -n..=n {
            if x < n {
                push(at(x, k), at(x + 1, k), prob(params.lambda(x + 1, x)));
            }
            if x > -n {
                push(at(x, k), at(x - 1, k), prob(params.lambda(x - 1, x)));
            }
            if k < levels {
                push(at(x, k), at(x, k + 1), up[(x + n) as usize].clone());
            }
        }
    }
    let graph = MixedPlanarGraph::new(vertices, edges, true)?;

    let mut order = Vec::new();
    order.extend((0..=levels).map(|k| at(-n, k)));
    order.extend((-n + 1..=n).map(|x| at(x, levels)));
    order.extend((0..levels).rev().map(|k| at(n, k)));
    order.extend((-n + 1..n).rev().map(|x| at(x, 0)));
    let target = at(0, levels);
    let roles = order
        .iter()
        .map(|&v| {
            let (x, k) = ((v % width) as i64 - n, (v / width) as u64);
            match (k == levels, x.signum()) {
                (true, -1) => Role::A,
                (true, 0) => Role::W,
                (true, _) => Role::B,
                _ => Role::U,
            }
        })
        .collect();
    let sources = initial.infected().map(|x| at(x, 0)).collect();
    let cycle = BoundaryCycle::new(&graph, order, roles, sources, vec![target])?;
    Ok(DiscreteDiagram { params: params.clone(), n, resolution, levels, t_hat, initial, graph, cycle, up })
}

impl DiscreteDiagram {
    pub fn n(&self) -> i64 {
        self.n
    }

    /// `N`.
    pub fn resolution(&self) -> u64 {
        self.resolution
    }

    /// `N t̂`, the index of the top level.
    pub fn levels(&self) -> u64 {
        self.levels
    }

    pub fn t_hat(&self) -> &BigRational {
        &self.t_hat
    }

    pub fn params(&self) -> &ContactParams {
        &self.params
    }

    /// `η_0` on `[-n, n]`.
    pub fn initial(&self) -> &SiteConfig {
        &self.initial
    }

    pub fn graph(&self) -> &MixedPlanarGraph {
        &self.graph
    }

    pub fn cycle(&self) -> &BoundaryCycle {
        &self.cycle
    }

    /// `U` as vertex indices.
    pub fn sources(&self) -> &[VertexIndex] {
        self.cycle.sources()
    }

    /// `(0, t̂)`.
    pub fn target(&self) -> VertexIndex {
        self.vertex(0, self.levels)
    }

    fn width(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    pub fn vertex(&self, x: i64, k: u64) -> VertexIndex {
        assert!(x.abs() <= self.n && k <= self.levels, "({x}, {k}) outside the diagram");
        k as usize * self.width() + (x + self.n) as usize
    }

    /// `(x, k)` of a vertex.
    pub fn site(&self, v: VertexIndex) -> (i64, u64) {
        ((v % self.width()) as i64 - self.n, (v / self.width()) as u64)
    }

    /// `η^{(n,N)}_t(x) = I{U → (x, t̂)}` for every `|x| ≤ n`.
    pub fn eta(&self, omega: &Configuration) -> SiteConfig {
        let seen = reachable(&self.graph, omega, self.sources());
        let mut out = SiteConfig::healthy(self.n);
        for x in -self.n..=self.n {
            out.set(x, seen.contains(self.vertex(x, self.levels)));
        }
        out
    }

    /// The diagram of the reflected process `x ↦ −x`, in which the a-block
    /// holds the mirror images of the sites `x > 0` and the b-block those of
    /// `x < 0`. Site `x` here corresponds to `−x` there.
    pub fn mirrored(&self) -> Result<DiscreteDiagram, ContactError> {
        build_discrete(&self.params.reflected(), self.n, self.resolution, &self.t_hat, &self.initial.reflected())
    }

    pub fn to_description(&self) -> GraphDescription {
        GraphDescription::from_graph(&self.graph, Some(&self.cycle))
    }

    /// Exact law of the whole top row, as weights indexed by the bit mask
    /// `Σ_{x : η(x) = 1} 2^{x + n}`.
    ///
    /// Computed level by level. The spread inside one row is tabulated by
    /// calling [`reachable`] on the bottom row of the diagram for every
    /// setting of its horizontal edges; the vertical step keeps each
    /// infected site independently with its vertical edge probability.
    pub fn exact_top_law<S: Scalar>(&self) -> Result<Vec<S>, ContactError> {
        let width = self.width();
        if width > TRANSFER_SITE_LIMIT {
            return Err(ContactError::TransferTooLarge { sites: width });
        }
        let states = 1usize << width;
        let g = &self.graph;
        let row: Vec<usize> = (0..g.edge_count())
            .filter(|&e| {
                let edge = &g.edges()[e];
                self.site(edge.tail).1 == 0 && self.site(edge.head).1 == 0
            })
            .collect();
        let free: Vec<usize> = row.iter().copied().filter(|&e| !g.edges()[e].p.is_degenerate()).collect();
        let mut base = Configuration::all_closed(g.edge_count());
        for &e in &row {
            base.set(e, g.edges()[e].p.exact().is_one());
        }

        // spread[b][c]: probability that the infected set `b` grows to `c` within a row.
        let mut spread = vec![vec![S::zero(); states]; states];
        for bits in 0..1u64 << free.len() {
            let mut omega = base.clone();
            let mut weight = S::one();
            for (i, &e) in free.iter().enumerate() {
                let open = bits >> i & 1 == 1;
                omega.set(e, open);
                let p = &g.edges()[e].p;
                weight = weight * if open { p.get::<S>() } else { p.complement().get::<S>() };
            }
            for (b, out) in spread.iter_mut().enumerate() {
                let start: Vec<usize> = (0..width).filter(|i| b >> i & 1 == 1).collect();
                let seen = reachable(g, &omega, &start);
                let c = (0..width).filter(|&i| seen.contains(i)).fold(0, |m, i| m | 1 << i);
                out[c] = out[c].clone() + weight.clone();
            }
        }

        // step[a][c]: one vertical step from `a` followed by a row spread.
        let keep: Vec<S> = self.up.iter().map(|p| p.get::<S>()).collect();
        let mut step = vec![vec![S::zero(); states]; states];
        for (a, out) in step.iter_mut().enumerate() {
            let mut b = a;
            loop {
                let w = (0..width).filter(|i| a >> i & 1 == 1).fold(S::one(), |acc, i| {
                    acc * if b >> i & 1 == 1 { keep[i].clone() } else { S::one() - keep[i].clone() }
                });
                if !w.is_zero() {
                    for (c, s) in spread[b].iter().enumerate() {
                        if !s.is_zero() {
                            out[c] = out[c].clone() + w.clone() * s.clone();
                        }
                    }
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & a;
            }
        }

        let start = self.initial.infected().fold(0usize, |m, x| m | 1 << (x + self.n));
        let mut law = spread[start].clone();
        for _ in 0..self.levels {
            let mut next = vec![S::zero(); states];
            for (a, m) in law.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                for (c, s) in step[a].iter().enumerate() {
                    if !s.is_zero() {
                        next[c] = next[c].clone() + m.clone() * s.clone();
                    }
                }
            }
            law = next;
        }
        Ok(law)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::sample_config;
    use crate::seed::replica_rng;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn diagram(lambda: BigRational, delta: BigRational, n: i64, big_n: u64, t: BigRational) -> DiscreteDiagram {
        let p = ContactParams::homogeneous(n, lambda, delta).unwrap();
        build_discrete(&p, n, big_n, &t, &SiteConfig::all_infected(n)).unwrap()
    }

    #[test]
    fn edge_probabilities_follow_the_rates() {
        let d = diagram(q(2, 1), q(1, 1), 2, 10, q(1, 1));
        let g = d.graph();
        for e in g.edges() {
            let ((x0, k0), (x1, k1)) = (d.site(e.tail), d.site(e.head));
            if k0 == k1 {
                assert_eq!((x1 - x0).abs(), 1);
                assert_eq!(e.p.exact(), &q(1, 5));
            } else {
                assert_eq!((x0, k0 + 1), (x1, k1));
                assert_eq!(e.p.exact(), &q(9, 10));
            }
        }
        let width = 5;
        let levels = 10;
        assert_eq!(g.edge_count(), (levels + 1) * 2 * (width - 1) + levels * width);
    }

    #[test]
    fn time_is_rounded_up_to_the_grid() {
        let d = diagram(q(2, 1), q(1, 1), 1, 10, q(21, 20));
        assert_eq!(d.t_hat(), &q(11, 10));
        assert_eq!(d.levels(), 11);
        let d = diagram(q(2, 1), q(1, 1), 1, 10, q(1, 1));
        assert_eq!(d.levels(), 10);
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        let p = ContactParams::homogeneous(1, q(2, 1), q(1, 1)).unwrap();
        let err = build_discrete(&p, 1, 1, &q(1, 1), &SiteConfig::all_infected(1)).unwrap_err();
        assert!(matches!(err, ContactError::Resolution { .. }));
        // N = M is allowed: probabilities 1 and 0 are still probabilities.
        assert!(build_discrete(&p, 1, 2, &q(1, 1), &SiteConfig::all_infected(1)).is_ok());
    }

    #[test]
    fn rectangle_blocks() {
        let d = diagram(q(1, 1), q(1, 1), 2, 2, q(1, 1));
        let c = d.cycle();
        let top = |xs: &[i64]| xs.iter().map(|&x| d.vertex(x, 2)).collect::<Vec<_>>();
        assert_eq!(c.block(Role::A), top(&[-2, -1]));
        assert_eq!(c.block(Role::W), top(&[0]));
        assert_eq!(c.block(Role::B), top(&[1, 2]));
        assert_eq!(c.len(), 2 * (5 + 3) - 4);
        assert_eq!(d.sources().len(), 5);
        assert_eq!(d.target(), d.vertex(0, 2));
        let f = d.graph().faces().unwrap().len();
        assert_eq!(d.graph().vertex_count() + f, d.graph().segments().len() + 2);
    }

    #[test]
    fn mirror_swaps_the_sides() {
        let p = ContactParams::new(1, |x, y| if x > y { q(1, 1) } else { q(1, 2) }, |_| q(1, 1)).unwrap();
        let init = SiteConfig::from_sites(1, [-1]).unwrap();
        let d = build_discrete(&p, 1, 2, &q(1, 1), &init).unwrap();
        let m = d.mirrored().unwrap();
        assert_eq!(m.initial().infected().collect::<Vec<_>>(), vec![1]);
        let law: Vec<BigRational> = d.exact_top_law().unwrap();
        let mirror_law: Vec<BigRational> = m.exact_top_law().unwrap();
        let flip = |mask: usize| (0..3).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| acc | 1 << (2 - i));
        for mask in 0..8 {
            assert_eq!(law[mask], mirror_law[flip(mask)]);
        }
    }

    #[test]
    fn no_infected_site_is_an_error() {
        let p = ContactParams::homogeneous(3, q(1, 1), q(1, 1)).unwrap();
        let init = SiteConfig::from_sites(3, [3]).unwrap();
        assert_eq!(build_discrete(&p, 1, 2, &q(1, 1), &init).unwrap_err(), ContactError::NoSource);
    }

    fn enumerated_law(d: &DiscreteDiagram) -> Vec<BigRational> {
        let g = d.graph();
        let m = g.edge_count();
        let mut law = vec![BigRational::zero(); 1 << (2 * d.n() + 1)];
        for index in 0..1u64 << m {
            let omega = Configuration::from_index(index, m);
            let w = g.edges().iter().enumerate().fold(BigRational::one(), |acc, (e, edge)| {
                acc * if omega.is_open(e) { edge.p.exact().clone() } else { BigRational::one() - edge.p.exact() }
            });
            if w.is_zero() {
                continue;
            }
            let eta = d.eta(&omega);
            let mask = eta.infected().fold(0, |acc, x| acc | 1 << (x + d.n()));
            law[mask] += w;
        }
        law
    }

    #[test]
    fn transfer_law_equals_enumeration() {
        let p = ContactParams::new(1, |x, y| q(1 + (x - y).abs() * (x + 2), 4), |x| q(x + 2, 4)).unwrap();
        let init = SiteConfig::from_sites(1, [-1, 1]).unwrap();
        let d = build_discrete(&p, 1, 1, &q(1, 1), &init).unwrap();
        assert_eq!(d.exact_top_law::<BigRational>().unwrap(), enumerated_law(&d));
        let d = diagram(q(1, 1), q(1, 1), 1, 2, q(1, 2));
        let law = d.exact_top_law::<BigRational>().unwrap();
        assert_eq!(law, enumerated_law(&d));
        assert_eq!(law.iter().cloned().sum::<BigRational>(), BigRational::one());
    }

    #[test]
    fn sampled_tops_follow_the_exact_law() {
        let d = diagram(q(2, 1), q(1, 1), 1, 4, q(1, 1));
        let law = d.exact_top_law::<f64>().unwrap();
        let reps = 20_000u64;
        let mut counts = [0u64; 8];
        for i in 0..reps {
            let eta = d.eta(&sample_config(d.graph(), &mut replica_rng(4, i)));
            counts[eta.infected().fold(0, |acc, x| acc | 1 << (x + 1))] += 1;
        }
        for (c, p) in counts.iter().zip(&law) {
            let ph = *c as f64 / reps as f64;
            let se = (p * (1.0 - p) / reps as f64).sqrt().max(1e-9);
            assert!((ph - p).abs() < 4.0 * se, "{ph} vs {p}");
        }
    }
}
