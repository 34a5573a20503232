use std::fmt::Write;
use std::path::PathBuf;

use contact_assoc::scalar::Exact;

/// Everything a run was invoked with; echoed at the top of every report.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub subcommand: String,
    pub spec: Option<PathBuf>,
    pub seed: u64,
    pub lambda: Option<Exact>,
    pub delta: Option<Exact>,
    pub t: Option<Exact>,
    pub n: Option<i64>,
    pub m: Option<i64>,
    pub resolution: Option<u64>,
    pub radius: Option<i64>,
    pub reps: Option<u64>,
    pub steps: Option<u64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub k_max: Option<usize>,
    pub out: PathBuf,
}

fn show<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

impl RunConfig {
    pub fn new(subcommand: &str, seed: u64, out: PathBuf) -> Self {
        Self { subcommand: subcommand.to_string(), seed, out, ..Default::default() }
    }

    /// `key: value` lines, unset parameters shown as `-`.
    pub fn echo(&self) -> String {
        let mut s = String::from("[run]\n");
        let spec = self.spec.as_ref().map(|p| p.display().to_string());
        let rows = [
            ("subcommand", self.subcommand.clone()),
            ("spec", show(&spec)),
            ("seed", self.seed.to_string()),
            ("lambda", show(&self.lambda)),
            ("delta", show(&self.delta)),
            ("t", show(&self.t)),
            ("n", show(&self.n)),
            ("m", show(&self.m)),
            ("N", show(&self.resolution)),
            ("radius", show(&self.radius)),
            ("reps", show(&self.reps)),
            ("steps", show(&self.steps)),
            ("burn_in", show(&self.burn_in)),
            ("thin", show(&self.thin)),
            ("k_max", show(&self.k_max)),
            ("out", self.out.display().to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k}: {v}");
        }
        s.push('\n');
        s
    }

    /// The echo as `#`-prefixed lines for the head of a CSV file.
    pub fn csv_preamble(&self) -> String {
        self.echo().lines().filter(|l| !l.is_empty()).map(|l| format!("# {l}\n")).collect()
    }
}
