use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::Zero;

use super::association::{check_conjunction_pairs, check_positive_association, AssociationReport, CONJUNCTION_LIMIT};
use super::{enumerate_measure, JointDistribution, VerifyError};
use crate::contact::{build_discrete, ContactParams, SiteConfig, StateSampler};
use crate::graph::{BoundaryCycle, MixedPlanarGraph, Role, VertexIndex};
use crate::percolation::{connects, reachable, Configuration};
use crate::scalar::Scalar;
use crate::seed;

/// An association check together with the conditioning probability and, for
/// collections small enough, the check over conjunction events of the whole
/// collection.
#[derive(Debug, Clone)]
pub struct TheoremReport<S> {
    pub condition_probability: S,
    pub association: AssociationReport<S>,
    pub conjunctions: Option<AssociationReport<S>>,
}

impl<S: Scalar> TheoremReport<S> {
    pub fn pass(&self) -> bool {
        self.association.pass && self.conjunctions.as_ref().is_none_or(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("condition_probability: {}\n", self.condition_probability);
        out.push_str(&self.association.to_text());
        if let Some(c) = &self.conjunctions {
            out.push_str("conjunction_pairs:\n");
            for line in c.to_text().lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        let _ = writeln!(out, "overall: {}", if self.pass() { "pass" } else { "fail" });
        out
    }
}

/// Vertices from which some vertex of `targets` is reachable along open edges.
fn reaching(g: &MixedPlanarGraph, omega: &Configuration, targets: &[VertexIndex]) -> FixedBitSet {
    let mut into: Vec<Vec<VertexIndex>> = vec![Vec::new(); g.vertex_count()];
    for v in 0..g.vertex_count() {
        for &(e, to) in g.out_edges(v) {
            if omega.is_open(e) {
                into[to].push(v);
            }
        }
    }
    let mut seen = FixedBitSet::with_capacity(g.vertex_count());
    let mut stack = Vec::new();
    for &t in targets {
        if !seen.put(t) {
            stack.push(t);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &into[v] {
            if !seen.put(w) {
                stack.push(w);
            }
        }
    }
    seen
}

fn finish<S: Scalar>(
    dist: JointDistribution<S>,
    condition_probability: S,
    k_max: usize,
) -> Result<TheoremReport<S>, VerifyError> {
    let association = check_positive_association(&dist, k_max, 1e-12)?;
    let conjunctions = if dist.len() > k_max && dist.len() <= CONJUNCTION_LIMIT {
        Some(check_conjunction_pairs(&dist, 1e-12)?)
    } else {
        None
    };
    Ok(TheoremReport { condition_probability, association, conjunctions })
}

fn probability_of<S: Scalar, C: Fn(&Configuration) -> bool + Sync>(
    g: &MixedPlanarGraph,
    event: C,
) -> Result<S, VerifyError> {
    let d: JointDistribution<S> = enumerate_measure(g, |_| true, |w| u64::from(event(w)), vec!["event".into()])?;
    Ok(d.mean(0))
}

/// Given `{S ↛ T}`, the variables `X_e` (`e` is open and lies on an open
/// path from `S`) and `1 − Y_e` (`Y_e`: `e` is open and lies on an open path
/// into `T`) for `e ∈ edges`, checked for positive association on all
/// subsets of at most `k_max` variables.
///
/// A path may revisit vertices, so `X_e` holds iff `e` is open and it can be
/// entered from a vertex reachable from `S`; `Y_e` iff `e` is open and it
/// can be left towards a vertex that reaches `T`. Planarity is not needed.
pub fn verify_theorem3<S: Scalar>(
    g: &MixedPlanarGraph,
    sources: &[VertexIndex],
    targets: &[VertexIndex],
    edges: &[usize],
    k_max: usize,
) -> Result<TheoremReport<S>, VerifyError> {
    if sources.is_empty() || targets.is_empty() || sources.iter().any(|s| targets.contains(s)) {
        return Err(VerifyError::BadSets);
    }
    if 2 * edges.len() > 64 {
        return Err(VerifyError::TooManyVariables(2 * edges.len()));
    }
    let labels = edges
        .iter()
        .flat_map(|&e| {
            let id = g.edges()[e].id;
            [format!("X[{id}]"), format!("1-Y[{id}]")]
        })
        .collect();
    let statistics = |w: &Configuration| -> u64 {
        let from_s = reachable(g, w, sources);
        let to_t = reaching(g, w, targets);
        let mut out = 0u64;
        for (i, &e) in edges.iter().enumerate() {
            if !w.is_open(e) {
                out |= 1 << (2 * i + 1);
                continue;
            }
            let edge = &g.edges()[e];
            let x = from_s.contains(edge.tail) || (!edge.oriented && from_s.contains(edge.head));
            let y = to_t.contains(edge.head) || (!edge.oriented && to_t.contains(edge.tail));
            out |= u64::from(x) << (2 * i) | u64::from(!y) << (2 * i + 1);
        }
        out
    };
    let blocked = |w: &Configuration| !connects(g, w, sources, targets);
    let dist = enumerate_measure(g, blocked, statistics, labels)?;
    let p = probability_of(g, blocked)?;
    finish(dist, p, k_max)
}

/// Given `{U → W}`, the indicators `I{U → a}` over the a-block and
/// `I{U ↛ b}` over the b-block of `cycle`, checked for positive association
/// on all subsets of at most `k_max` variables.
pub fn verify_theorem4<S: Scalar>(
    g: &MixedPlanarGraph,
    cycle: &BoundaryCycle,
    k_max: usize,
) -> Result<TheoremReport<S>, VerifyError> {
    let (a, b) = (cycle.block(Role::A), cycle.block(Role::B));
    if a.len() + b.len() > 64 {
        return Err(VerifyError::TooManyVariables(a.len() + b.len()));
    }
    let name = |v: VertexIndex| g.vertices()[v].id;
    let labels = a.iter().map(|&v| format!("U->{}", name(v))).chain(b.iter().map(|&v| format!("U-/->{}", name(v)))).collect();
    let (sources, targets) = (cycle.sources(), cycle.targets());
    let statistics = |w: &Configuration| -> u64 {
        let seen = reachable(g, w, sources);
        let hits = a.iter().map(|&v| seen.contains(v)).chain(b.iter().map(|&v| !seen.contains(v)));
        hits.enumerate().fold(0, |m, (i, h)| m | u64::from(h) << i)
    };
    let joined = |w: &Configuration| connects(g, w, sources, targets);
    let dist = enumerate_measure(g, joined, statistics, labels)?;
    let p = probability_of(g, joined)?;
    finish(dist, p, k_max)
}

/// A contact process with constant rates started from all sites infected,
/// and the blocks `-n..=-1`, `1..=m` around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureSetup {
    pub lambda: BigRational,
    pub delta: BigRational,
    pub t: BigRational,
    pub n: i64,
    pub m: i64,
    /// Window radius `L`.
    pub radius: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjectureMode {
    /// Exact law of `η^{(L,N)}` on the discrete diagram.
    ExactDiscrete { resolution: u64 },
    /// Continuous-time replicas.
    MonteCarlo { reps: u64, seed: u64 },
}

/// With `A = {η(x) = 0, −n ≤ x ≤ −1}`, `B = {η(x) = 0, 1 ≤ x ≤ m}` and
/// `C = {η(0) = 1}`: `lhs = P(A ∩ B | C)`, `rhs = P(A | C) P(B | C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub setup: ConjectureSetup,
    pub mode: ConjectureMode,
    pub p_condition: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Exact values in exact mode.
    pub lhs_exact: Option<BigRational>,
    pub rhs_exact: Option<BigRational>,
    /// Standard errors of `lhs`, `rhs` and `lhs − rhs` in Monte Carlo mode.
    pub se_lhs: Option<f64>,
    pub se_rhs: Option<f64>,
    pub se_diff: Option<f64>,
    /// Replicas with `η(0) = 1`.
    pub conditioned: Option<u64>,
    pub pass: bool,
}

impl ConjectureReport {
    pub fn csv_header() -> &'static str {
        "instance,mode,lambda,delta,t,n,m,radius,resolution,reps,seed,p_condition,lhs,rhs,se,verdict"
    }

    pub fn csv_row(&self, instance: &str) -> String {
        let s = &self.setup;
        let (mode, resolution, reps, seed) = match self.mode {
            ConjectureMode::ExactDiscrete { resolution } => ("exact-discrete", resolution.to_string(), String::new(), String::new()),
            ConjectureMode::MonteCarlo { reps, seed } => ("monte-carlo", String::new(), reps.to_string(), seed.to_string()),
        };
        format!(
            "{instance},{mode},{},{},{},{},{},{},{resolution},{reps},{seed},{:.6},{:.6},{:.6},{},{}",
            s.lambda,
            s.delta,
            s.t,
            s.n,
            s.m,
            s.radius,
            self.p_condition,
            self.lhs,
            self.rhs,
            self.se_diff.map(|x| format!("{x:.6}")).unwrap_or_default(),
            if self.pass { "pass" } else { "fail" }
        )
    }

    pub fn to_text(&self) -> String {
        let s = &self.setup;
        let mut out = String::new();
        let _ = writeln!(out, "lambda: {}\ndelta: {}\nt: {}\nn: {}\nm: {}\nradius: {}", s.lambda, s.delta, s.t, s.n, s.m, s.radius);
        match self.mode {
            ConjectureMode::ExactDiscrete { resolution } => {
                let _ = writeln!(out, "mode: exact-discrete\nresolution: {resolution}");
            }
            ConjectureMode::MonteCarlo { reps, seed } => {
                let _ = writeln!(out, "mode: monte-carlo\nreps: {reps}\nseed: {seed}");
            }
        }
        let _ = writeln!(out, "p_condition: {:.6}", self.p_condition);
        if let (Some(l), Some(r)) = (&self.lhs_exact, &self.rhs_exact) {
            let _ = writeln!(out, "lhs_exact: {l}\nrhs_exact: {r}");
        }
        let _ = writeln!(out, "lhs: {:.6}\nrhs: {:.6}", self.lhs, self.rhs);
        if let (Some(a), Some(b), Some(d)) = (self.se_lhs, self.se_rhs, self.se_diff) {
            let _ = writeln!(out, "se_lhs: {a:.6}\nse_rhs: {b:.6}\nse_diff: {d:.6}");
        }
        if let Some(c) = self.conditioned {
            let _ = writeln!(out, "conditioned_replicas: {c}");
        }
        let _ = writeln!(out, "verdict: {}", if self.pass { "pass" } else { "fail" });
        out
    }
}

/// Outcome code: bit 0 is `η(0)`, bit 1 the event `A`, bit 2 the event `B`.
fn code(eta: impl Fn(i64) -> bool, n: i64, m: i64) -> usize {
    let a = (-n..=-1).all(|x| !eta(x));
    let b = (1..=m).all(|x| !eta(x));
    usize::from(eta(0)) | usize::from(a) << 1 | usize::from(b) << 2
}

/// Checks `P(A ∩ B | C) ≤ P(A | C) P(B | C)`.
///
/// Exact mode compares exact rationals. Monte Carlo mode passes when
/// `lhs ≤ rhs + 3 se`, with `se` the delta-method standard error of
/// `lhs − rhs` given the number of replicas in `C`.
pub fn verify_conjecture1(setup: &ConjectureSetup, mode: ConjectureMode) -> Result<ConjectureReport, VerifyError> {
    let (n, m, radius) = (setup.n, setup.m, setup.radius);
    if n < 1 || m < 1 || n > radius || m > radius {
        return Err(VerifyError::Sites { n, m, radius });
    }
    let params = ContactParams::homogeneous(radius, setup.lambda.clone(), setup.delta.clone())?;
    let initial = SiteConfig::all_infected(radius);
    let mut report = ConjectureReport {
        setup: setup.clone(),
        mode,
        p_condition: 0.0,
        lhs: 0.0,
        rhs: 0.0,
        lhs_exact: None,
        rhs_exact: None,
        se_lhs: None,
        se_rhs: None,
        se_diff: None,
        conditioned: None,
        pass: false,
    };
    match mode {
        ConjectureMode::ExactDiscrete { resolution } => {
            let d = build_discrete(&params, radius, resolution, &setup.t, &initial)?;
            let law: Vec<BigRational> = d.exact_top_law()?;
            let mut cells = vec![BigRational::zero(); 8];
            for (mask, w) in law.into_iter().enumerate() {
                cells[code(|x| mask >> (x + radius) & 1 == 1, n, m)] += w;
            }
            let pc: BigRational = (0..8).filter(|c| c & 1 == 1).map(|c| cells[c].clone()).sum();
            if pc.is_zero() {
                return Err(VerifyError::ConditionNull);
            }
            let pab = &cells[0b111] / &pc;
            let pa = (&cells[0b011] + &cells[0b111]) / &pc;
            let pb = (&cells[0b101] + &cells[0b111]) / &pc;
            let rhs = &pa * &pb;
            report.p_condition = pc.to_f64();
            report.lhs = pab.to_f64();
            report.rhs = rhs.to_f64();
            report.pass = pab <= rhs;
            report.lhs_exact = Some(pab);
            report.rhs_exact = Some(rhs);
        }
        ConjectureMode::MonteCarlo { reps, seed } => {
            let t = setup.t.to_f64();
            let sampler = StateSampler::new(&params);
            let counts = seed::tally(seed, reps, 8, |r| {
                let mut flags = vec![true; params.site_count()];
                sampler.run(&mut flags, t, r);
                code(|x| flags[(x + radius) as usize], n, m)
            });
            let nc: u64 = (0..8).filter(|c| c & 1 == 1).map(|c| counts[c]).sum();
            if nc == 0 {
                return Err(VerifyError::NeverObserved { reps });
            }
            let f = nc as f64;
            let q11 = counts[0b111] as f64 / f;
            let q10 = counts[0b011] as f64 / f;
            let q01 = counts[0b101] as f64 / f;
            let (pa, pb) = (q11 + q10, q11 + q01);
            let var = |grad: [f64; 3]| {
                let cells = [q11, q10, q01];
                let mean: f64 = grad.iter().zip(cells).map(|(g, q)| g * q).sum();
                let sq: f64 = grad.iter().zip(cells).map(|(g, q)| g * g * q).sum();
                ((sq - mean * mean).max(0.0) / f).sqrt()
            };
            report.p_condition = f / reps as f64;
            report.lhs = q11;
            report.rhs = pa * pb;
            report.se_lhs = Some(var([1.0, 0.0, 0.0]));
            report.se_rhs = Some(var([pa + pb, pb, pa]));
            let se = var([1.0 - pa - pb, -pb, -pa]);
            report.se_diff = Some(se);
            report.conditioned = Some(nc);
            report.pass = report.lhs <= report.rhs + 3.0 * se;
        }
    }
    Ok(report)
}
