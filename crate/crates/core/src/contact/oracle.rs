//! Direct search for allowable paths in a graphical representation. Slow;
//! kept as a cross-check for [`evolve_state`](super::evolve_state).

use rand::Rng;

use super::{GraphicalRep, SiteConfig};

/// `η_t(y) = 1` iff an allowable path runs from some `(x, 0)` with `x`
/// initially infected to `(y, t)`: upward along time lines without crossing
/// a `*`, and along arrows in their direction.
pub fn infected_by_paths(gr: &GraphicalRep, initial: &SiteConfig, t: f64) -> SiteConfig {
    let r = gr.radius();
    let mut out = SiteConfig::healthy(r);
    // An entry point `(x, s)`: the path is on `l_x` just after time `s`.
    let mut stack: Vec<(i64, f64)> = initial.infected().map(|x| (x, 0.0)).collect();
    let mut used: Vec<(i64, i64, u64)> = Vec::new();
    while let Some((x, s)) = stack.pop() {
        let blocked_at = gr.recoveries(x).iter().copied().find(|&m| m > s).unwrap_or(f64::INFINITY);
        if blocked_at > t {
            out.set(x, true);
        }
        let reach = blocked_at.min(t);
        for (to, times) in [(x + 1, gr.arrows_right(x)), (x - 1, gr.arrows_left(x))] {
            for &a in times {
                if a > s && a <= reach && a < blocked_at {
                    let key = (x, to, a.to_bits());
                    if !used.contains(&key) {
                        used.push(key);
                        stack.push((to, a));
                    }
                }
            }
        }
    }
    out
}

/// A random representation on 3 to 5 sites with at most 10 marks in
/// `(0, 1]`, a random initial state, and a few query times.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> (GraphicalRep, SiteConfig, Vec<f64>) {
    let sites = rng.random_range(3..=5usize);
    // Even site counts use the window -2..=2 with one edge site left bare.
    let radius = (sites / 2) as i64;
    let n = (2 * radius + 1) as usize;
    let active: Vec<usize> = (0..sites).collect();
    let mut lists = [vec![Vec::new(); n], vec![Vec::new(); n], vec![Vec::new(); n]];
    for _ in 0..rng.random_range(0..=10) {
        let kind = rng.random_range(0..3usize);
        let i = active[rng.random_range(0..active.len())];
        let ok = match kind {
            1 => i + 1 < sites,
            2 => i > 0,
            _ => true,
        };
        if ok {
            lists[kind][i].push(1.0 - rng.random::<f64>());
        }
    }
    for l in lists.iter_mut().flat_map(|k| k.iter_mut()) {
        l.sort_by(f64::total_cmp);
        l.dedup();
    }
    let [rec, right, left] = lists;
    let gr = GraphicalRep::from_events(radius, 1.0, rec, right, left).expect("valid random marks");
    let init = SiteConfig::from_sites(radius, (-radius..=radius).filter(|_| rng.random::<bool>())).expect("in window");
    let times = (0..4).map(|_| rng.random::<f64>()).chain([1.0]).collect();
    (gr, init, times)
}
