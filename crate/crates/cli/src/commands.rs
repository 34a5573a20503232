use std::fmt::{Display, Write};
use std::fs;
use std::path::Path;

use contact_assoc::contact::{build_discrete, estimate_joint, ContactParams, JointSource, SiteConfig};
use contact_assoc::dual::{
    build_dual, duality_suite, render_pinned, search_conventions, Verdict, PINNED_CONVENTION, PINNED_VERDICT,
};
use contact_assoc::graph::{build_graph, normalize, BoundaryCycle, GraphDescription, MixedPlanarGraph, Normalized, VertexIndex};
use contact_assoc::mcmc::{default_burn_in, init_chain, run_chain};
use contact_assoc::percolation::{reachable, Configuration, PathSpace};
use contact_assoc::scalar::{Exact, Scalar};
use contact_assoc::seed::replica_rng;
use contact_assoc::verify::{
    enumerate_measure, verify_conjecture1, verify_theorem3, verify_theorem4, ConjectureMode, ConjectureReport, ConjectureSetup,
    TheoremReport, ENUMERATION_LIMIT,
};

use crate::config::RunConfig;

/// Input or usage problem; reported on stderr with exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub type CmdResult = Result<bool, InputError>;

fn context<E: Display>(what: impl Display) -> impl FnOnce(E) -> InputError {
    move |e| InputError(format!("{what}: {e}"))
}

pub struct Spec {
    pub graph: MixedPlanarGraph,
    pub cycle: Option<BoundaryCycle>,
}

pub fn load_spec(path: &Path, planar: bool) -> Result<Spec, InputError> {
    let shown = path.display();
    let text = fs::read_to_string(path).map_err(context(format!("cannot read spec {shown}")))?;
    let desc = GraphDescription::parse(&text).map_err(context(&shown))?;
    let graph = build_graph(&desc, planar || desc.cycle.is_some()).map_err(context(&shown))?;
    let cycle = desc.build_cycle(&graph).map_err(context(&shown))?;
    Ok(Spec { graph, cycle })
}

fn require_cycle(spec: &Spec) -> Result<&BoundaryCycle, InputError> {
    spec.cycle.as_ref().ok_or_else(|| InputError("the graph spec has no [cycle] table".into()))
}

fn normalized(spec: &Spec) -> Result<Normalized, InputError> {
    Ok(normalize(&spec.graph, require_cycle(spec)?)?)
}

fn vertices_by_id(g: &MixedPlanarGraph, ids: &[i64]) -> Result<Vec<VertexIndex>, InputError> {
    ids.iter().map(|&i| g.index_of(i).ok_or_else(|| InputError(format!("unknown vertex id {i}")))).collect()
}

/// Writes `name` under the output directory.
pub fn emit(cfg: &RunConfig, name: &str, body: &str) -> Result<(), InputError> {
    fs::create_dir_all(&cfg.out).map_err(context(format!("cannot create {}", cfg.out.display())))?;
    let path = cfg.out.join(name);
    fs::write(&path, body).map_err(context(format!("cannot write {}", path.display())))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub fn enumerate(cfg: &RunConfig, sources: &[i64], targets: &[i64]) -> CmdResult {
    let spec = load_spec(cfg.spec.as_deref().expect("spec is required"), false)?;
    let g = &spec.graph;
    let (u, w) = match (&spec.cycle, sources.is_empty() && targets.is_empty()) {
        (_, false) => (vertices_by_id(g, sources)?, vertices_by_id(g, targets)?),
        (Some(c), true) => (c.sources().to_vec(), c.targets().to_vec()),
        (None, true) => return Err(InputError("give --sources and --targets or a spec with a [cycle] table".into())),
    };
    if u.is_empty() || w.is_empty() {
        return Err(InputError("source and target sets must be non-empty".into()));
    }
    let nv = g.vertex_count();
    if nv > 63 {
        return Err(InputError(format!("{nv} vertices exceed the per-vertex enumeration limit of 63")));
    }
    let labels = std::iter::once("U->W".to_string()).chain(g.vertices().iter().map(|v| format!("U->{}", v.id))).collect();
    let stats = |omega: &Configuration| {
        let r = reachable(g, omega, &u);
        let joined = w.iter().any(|&x| r.contains(x));
        r.ones().fold(u64::from(joined), |acc, v| acc | 1 << (v + 1))
    };
    let dist = enumerate_measure::<Exact, _, _>(g, |_: &Configuration| true, stats, labels)?;
    let p = dist.mean(0);
    let mut report = cfg.echo();
    let _ = writeln!(report, "[enumerate]\nvertices: {nv}\nedges: {}\nenumeration_limit: {ENUMERATION_LIMIT}", g.edge_count());
    let _ = writeln!(report, "P(U->W): {p}\nP(U->W)_f64: {:.12}", p.to_f64());
    let mut csv = cfg.csv_preamble();
    csv.push_str("vertex,probability_exact,probability\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let q = dist.mean(i + 1);
        let _ = writeln!(csv, "{},{q},{:.12}", v.id, q.to_f64());
    }
    emit(cfg, "enumerate.txt", &report)?;
    emit(cfg, "reach.csv", &csv)?;
    print!("{report}");
    Ok(true)
}

pub fn dual(cfg: &RunConfig) -> CmdResult {
    let spec = load_spec(cfg.spec.as_deref().expect("spec is required"), true)?;
    let n = normalized(&spec)?;
    let h = build_dual(&n.graph, &n.cycle, PINNED_CONVENTION.crossing)?;
    let toml = h.to_description(&n.graph).to_toml()?;
    let mut report = cfg.echo();
    let _ = writeln!(
        report,
        "[dual]\nconvention: {PINNED_CONVENTION}\nprimal_vertices: {}\nprimal_edges: {}\ndual_vertices: {}\ndual_edges: {}\nboundary_vertices: {}",
        n.graph.vertex_count(),
        n.graph.edge_count(),
        h.vertex_count(),
        h.edges().len(),
        h.boundary_vertices().count()
    );
    emit(cfg, "dual.txt", &report)?;
    emit(cfg, "dual.toml", &toml)?;
    print!("{report}");
    Ok(true)
}

pub fn sample_mcmc(cfg: &RunConfig) -> CmdResult {
    let spec = load_spec(cfg.spec.as_deref().expect("spec is required"), true)?;
    let n = normalized(&spec)?;
    let space = PathSpace::from_normalized(&n);
    let g = &n.graph;
    let support = Configuration::from_bits(g.edges().iter().map(|e| e.p.as_f64() > 0.0));
    if !space.in_gamma(&support) {
        return Err(InputError("U cannot reach W even with every possible edge open, so the conditioned law is empty".into()));
    }
    let steps = cfg.steps.expect("steps is required");
    let burn_in = cfg.burn_in.unwrap_or_else(|| default_burn_in(&space));
    let thin = cfg.thin.unwrap_or(1);
    let boundary = n.cycle.vertices();
    let mut state = init_chain(PathSpace::from_normalized(&n), support)?;
    let mut csv = cfg.csv_preamble();
    let ids: Vec<String> = boundary.iter().map(|&v| g.vertices()[v].id.to_string()).collect();
    let _ = writeln!(csv, "# eta over cycle vertices {}", ids.join(" "));
    csv.push_str("step,config,eta\n");
    let mut hits = vec![0u64; boundary.len()];
    let mut samples = 0u64;
    for s in run_chain(&mut state, steps, burn_in, thin, replica_rng(cfg.seed, 0))? {
        let eta: String = boundary.iter().map(|&v| if s.eta.contains(v) { '1' } else { '0' }).collect();
        for (h, &v) in hits.iter_mut().zip(boundary) {
            *h += u64::from(s.eta.contains(v));
        }
        samples += 1;
        let _ = writeln!(csv, "{},{},{eta}", s.step, s.config.to_hex());
    }
    let mut report = cfg.echo();
    let _ = writeln!(report, "[sample-mcmc]\nburn_in_used: {burn_in}\nsamples: {samples}");
    for ((&v, &h), role) in boundary.iter().zip(&hits).zip(n.cycle.roles()) {
        let freq = if samples == 0 { 0.0 } else { h as f64 / samples as f64 };
        let _ = writeln!(report, "eta[{}] ({role:?}): {freq:.6}", g.vertices()[v].id);
    }
    emit(cfg, "sample-mcmc.txt", &report)?;
    emit(cfg, "samples.csv", &csv)?;
    print!("{report}");
    Ok(true)
}

pub fn simulate_contact(cfg: &RunConfig, targets: &[i64]) -> CmdResult {
    let (lambda, delta, t) = (cfg.lambda.clone().unwrap(), cfg.delta.clone().unwrap(), cfg.t.clone().unwrap());
    let radius = cfg.radius.expect("radius has a default");
    let params = ContactParams::homogeneous(radius, lambda, delta)?;
    let initial = SiteConfig::all_infected(radius);
    let mut rng = replica_rng(cfg.seed, 0);
    let reps = cfg.reps.expect("reps has a default");
    let joint = match cfg.resolution {
        Some(res) => {
            let d = build_discrete(&params, cfg.n.unwrap_or(radius), res, &t, &initial)?;
            estimate_joint(JointSource::Discrete(&d), targets, reps, &mut rng)?
        }
        None => {
            if t <= Exact::from_count(0) {
                return Err(InputError(format!("time must be positive, got {t}")));
            }
            estimate_joint(JointSource::Continuous { params: &params, initial: &initial, t: t.to_f64() }, targets, reps, &mut rng)?
        }
    };
    let mut report = cfg.echo();
    let kind = if cfg.resolution.is_some() { "discrete" } else { "continuous" };
    let _ = writeln!(report, "[simulate-contact]\nprocess: {kind}\ninitial: all infected\nreplica_master_seed: {}", joint.master_seed);
    for (i, x) in targets.iter().enumerate() {
        let (p, se) = joint.marginal(i);
        let _ = writeln!(report, "P(eta({x})=1): {p:.6} (se {se:.6})");
    }
    emit(cfg, "simulate-contact.txt", &report)?;
    emit(cfg, "joint.csv", &(cfg.csv_preamble() + &joint.to_csv()))?;
    print!("{report}");
    Ok(true)
}

fn theorem_outcome(cfg: &RunConfig, name: &str, r: &TheoremReport<Exact>) -> CmdResult {
    let report = format!("{}[{name}]\n{}", cfg.echo(), r.to_text());
    emit(cfg, &format!("{name}.txt"), &report)?;
    print!("{report}");
    Ok(r.pass())
}

pub fn theorem3(cfg: &RunConfig, sources: &[i64], targets: &[i64]) -> CmdResult {
    let spec = load_spec(cfg.spec.as_deref().expect("spec is required"), false)?;
    let g = &spec.graph;
    let (s, t) = match (&spec.cycle, sources.is_empty() && targets.is_empty()) {
        (_, false) => (vertices_by_id(g, sources)?, vertices_by_id(g, targets)?),
        (Some(c), true) => (c.sources().to_vec(), c.targets().to_vec()),
        (None, true) => return Err(InputError("give --sources and --targets or a spec with a [cycle] table".into())),
    };
    let edges: Vec<usize> = (0..g.edge_count()).collect();
    let r = verify_theorem3::<Exact>(g, &s, &t, &edges, cfg.k_max.unwrap_or(3))?;
    theorem_outcome(cfg, "theorem3", &r)
}

pub fn theorem4(cfg: &RunConfig) -> CmdResult {
    let k = cfg.k_max.unwrap_or(3);
    let r = match &cfg.spec {
        Some(path) => {
            let spec = load_spec(path, true)?;
            verify_theorem4::<Exact>(&spec.graph, require_cycle(&spec)?, k)?
        }
        None => {
            let n = cfg.n.ok_or_else(|| InputError("give --spec or the diagram parameters --n and -N".into()))?;
            let res = cfg.resolution.ok_or_else(|| InputError("the diagram needs -N (resolution)".into()))?;
            let params = ContactParams::homogeneous(n, cfg.lambda.clone().unwrap(), cfg.delta.clone().unwrap())?;
            let d = build_discrete(&params, n, res, cfg.t.as_ref().unwrap(), &SiteConfig::all_infected(n))?;
            verify_theorem4::<Exact>(d.graph(), d.cycle(), k)?
        }
    };
    theorem_outcome(cfg, "theorem4", &r)
}

pub fn conjecture1(cfg: &RunConfig) -> CmdResult {
    let setup = ConjectureSetup {
        lambda: cfg.lambda.clone().unwrap(),
        delta: cfg.delta.clone().unwrap(),
        t: cfg.t.clone().unwrap(),
        n: cfg.n.expect("n is required"),
        m: cfg.m.expect("m is required"),
        radius: cfg.radius.expect("radius has a default"),
    };
    let mode = match cfg.resolution {
        Some(resolution) => ConjectureMode::ExactDiscrete { resolution },
        None => ConjectureMode::MonteCarlo { reps: cfg.reps.expect("reps has a default"), seed: cfg.seed },
    };
    let r = verify_conjecture1(&setup, mode)?;
    let report = format!("{}[conjecture1]\n{}", cfg.echo(), r.to_text());
    let csv = format!("{}{}\n{}\n", cfg.csv_preamble(), ConjectureReport::csv_header(), r.csv_row("1"));
    emit(cfg, "conjecture1.txt", &report)?;
    emit(cfg, "conjecture1.csv", &csv)?;
    print!("{report}");
    Ok(r.pass)
}

pub fn duality(cfg: &RunConfig, emit_constants: Option<&Path>) -> CmdResult {
    let suite = match &cfg.spec {
        Some(path) => {
            let n = normalized(&load_spec(path, true)?)?;
            let m = n.graph.edge_count();
            if m > ENUMERATION_LIMIT {
                return Err(InputError(format!("{m} normalized edges exceed the exhaustive census limit of {ENUMERATION_LIMIT}")));
            }
            vec![("spec", n)]
        }
        None => duality_suite(),
    };
    let (rows, found) = search_conventions(&suite)?;
    let mut report = cfg.echo();
    let names: Vec<&str> = suite.iter().map(|(name, _)| *name).collect();
    let _ = writeln!(report, "[duality]\ngraphs: {}\npinned_convention: {PINNED_CONVENTION}\npinned_verdict: {PINNED_VERDICT:?}", names.join(" "));
    let mut pinned_pass = false;
    for row in &rows {
        let (a, c) = row.per_graph.iter().fold((0, 0), |(a, c), (_, x)| (a + x.as_stated, c + x.complemented));
        let consistent = 100.0 * a.max(c) as f64 / (a + c).max(1) as f64;
        let _ = writeln!(report, "convention {}: as_stated {a} complemented {c} verdict {:?} consistency {consistent:.1}%", row.convention, row.overall);
        if row.convention == PINNED_CONVENTION {
            pinned_pass = row.overall == PINNED_VERDICT;
        }
    }
    let found_text = found.map_or("none".to_string(), |(c, v)| format!("{c} {v:?}"));
    let _ = writeln!(report, "search_result: {found_text}");
    let pass = match (&cfg.spec, found) {
        (Some(_), _) => pinned_pass,
        (None, Some(f)) => pinned_pass && f == (PINNED_CONVENTION, PINNED_VERDICT),
        (None, None) => false,
    };
    if let Some(path) = emit_constants {
        let Some((c, v)) = found.filter(|(_, v)| *v != Verdict::Fails) else {
            return Err(InputError("no convention is consistent on every graph, nothing to emit".into()));
        };
        fs::write(path, render_pinned(c, v)).map_err(context(format!("cannot write {}", path.display())))?;
        let _ = writeln!(report, "emitted_constants: {}", path.display());
    }
    let _ = writeln!(report, "verdict: {}", verdict(pass));
    emit(cfg, "duality.txt", &report)?;
    print!("{report}");
    Ok(pass)
}

