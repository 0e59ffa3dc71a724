//! Unguided target search on a periodic square lattice.

use rayon::prelude::*;
use serde::Serialize;

use crate::stats::median;
use crate::{Error, Result, RngStream};

/// Lattice cell `(x, y)` with `0 <= x, y < side`.
pub type Point = (usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchArena {
    pub side: usize,
    pub targets: Vec<Point>,
    /// Success once the torus distance to a target is at most this.
    pub capture_radius: f64,
    /// Maximum number of unit moves.
    pub step_budget: u64,
    /// Keep moving after the first capture until the budget is spent, so
    /// coverage reflects the full budget.
    pub exhaust_budget: bool,
}

impl SearchArena {
    pub fn new(side: usize, targets: Vec<Point>, capture_radius: f64, step_budget: u64) -> Result<Self> {
        let arena = Self { side, targets, capture_radius, step_budget, exhaust_budget: false };
        arena.validate()?;
        Ok(arena)
    }

    pub fn validate(&self) -> Result<()> {
        if self.side == 0 {
            return Err(Error::argument("side must be positive"));
        }
        if self.targets.is_empty() {
            return Err(Error::argument("need at least one target"));
        }
        if let Some(t) = self.targets.iter().find(|t| !self.contains(**t)) {
            return Err(Error::domain(format!("target {t:?} outside a {0}x{0} lattice", self.side)));
        }
        if !(self.capture_radius >= 0.0) || !self.capture_radius.is_finite() {
            return Err(Error::domain("capture radius must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.0 < self.side && p.1 < self.side
    }

    /// Cells within the capture radius of some target, row-major.
    fn capture_map(&self) -> Vec<bool> {
        let s = self.side as i64;
        let r = self.capture_radius.floor().min(s as f64) as i64;
        let r2 = self.capture_radius * self.capture_radius;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if ((dx * dx + dy * dy) as f64) <= r2 {
                    offsets.push((dx, dy));
                }
            }
        }
        let mut map = vec![false; self.side * self.side];
        for &(tx, ty) in &self.targets {
            for &(dx, dy) in &offsets {
                let x = (tx as i64 + dx).rem_euclid(s) as usize;
                let y = (ty as i64 + dy).rem_euclid(s) as usize;
                map[y * self.side + x] = true;
            }
        }
        map
    }
}

/// Euclidean distance on the torus (minimum image).
pub fn torus_distance(side: usize, a: Point, b: Point) -> f64 {
    let wrap = |u: usize, v: usize| {
        let d = u.abs_diff(v);
        d.min(side - d) as f64
    };
    wrap(a.0, b.0).hypot(wrap(a.1, b.1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub found: bool,
    /// Moves made before the first capture; `None` when the budget ran out.
    pub steps_to_find: Option<u64>,
    /// Fraction of cells visited, the start included.
    pub coverage: f64,
}

/// Shared bookkeeping for a walk that visits one cell per move.
struct Tracker {
    side: usize,
    capture: Vec<bool>,
    visited: Vec<bool>,
    distinct: usize,
    found: Option<u64>,
    exhaust: bool,
}

impl Tracker {
    fn new(arena: &SearchArena) -> Self {
        let n = arena.side * arena.side;
        Self {
            side: arena.side,
            capture: arena.capture_map(),
            visited: vec![false; n],
            distinct: 0,
            found: None,
            exhaust: arena.exhaust_budget,
        }
    }

    /// Records a visit; true when the walk should stop.
    fn visit(&mut self, p: Point, step: u64) -> bool {
        let i = p.1 * self.side + p.0;
        if !self.visited[i] {
            self.visited[i] = true;
            self.distinct += 1;
        }
        if self.found.is_none() && self.capture[i] {
            self.found = Some(step);
        }
        self.found.is_some() && !self.exhaust
    }

    fn outcome(&self) -> SearchOutcome {
        SearchOutcome {
            found: self.found.is_some(),
            steps_to_find: self.found,
            coverage: self.distinct as f64 / self.visited.len() as f64,
        }
    }
}

fn check_start(arena: &SearchArena, start: Point) -> Result<()> {
    arena.validate()?;
    if !arena.contains(start) {
        return Err(Error::domain(format!("start {start:?} outside the lattice")));
    }
    Ok(())
}

/// Uniform nearest-neighbour random walk.
pub fn random_walk_search(arena: &SearchArena, start: Point, rng: &mut RngStream) -> Result<SearchOutcome> {
    check_start(arena, start)?;
    let s = arena.side;
    let mut t = Tracker::new(arena);
    let mut p = start;
    if t.visit(p, 0) {
        return Ok(t.outcome());
    }
    for step in 1..=arena.step_budget {
        p = match rng.below(4) {
            0 => ((p.0 + 1) % s, p.1),
            1 => ((p.0 + s - 1) % s, p.1),
            2 => (p.0, (p.1 + 1) % s),
            _ => (p.0, (p.1 + s - 1) % s),
        };
        if t.visit(p, step) {
            break;
        }
    }
    Ok(t.outcome())
}

/// Serpentine sweep: along +x for a row, one step in +y, back along -x,
/// and so on, starting at `start`. Every cell is visited after
/// `side^2 - 1` moves; the sweep then repeats.
pub fn sweep_search(arena: &SearchArena, start: Point) -> Result<SearchOutcome> {
    check_start(arena, start)?;
    let s = arena.side;
    let mut t = Tracker::new(arena);
    let mut p = start;
    if t.visit(p, 0) {
        return Ok(t.outcome());
    }
    let mut forward = true;
    let mut along = 0;
    for step in 1..=arena.step_budget {
        if along + 1 == s {
            p = (p.0, (p.1 + 1) % s);
            along = 0;
            forward = !forward;
        } else {
            p = if forward { ((p.0 + 1) % s, p.1) } else { ((p.0 + s - 1) % s, p.1) };
            along += 1;
        }
        if t.visit(p, step) {
            break;
        }
    }
    Ok(t.outcome())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    RandomWalk,
    Sweep,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::RandomWalk, Strategy::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomWalk => "random_walk",
            Strategy::Sweep => "sweep",
        }
    }
}

/// Grid of arena families; every `(side, target_count, radius)` cell is
/// played with fresh random targets and start per replica.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentSpec {
    pub sides: Vec<usize>,
    pub target_counts: Vec<usize>,
    pub radii: Vec<f64>,
    /// Defaults to `10 * side^2`.
    pub step_budget: Option<u64>,
    pub replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentRow {
    pub side: usize,
    pub target_count: usize,
    pub radius: f64,
    pub strategy: Strategy,
    pub success_probability: f64,
    /// Over successful replicas; `None` without successes.
    pub mean_steps: Option<f64>,
    pub median_steps: Option<f64>,
    /// 1 is best within the cell.
    pub rank: usize,
}

fn random_arena(side: usize, count: usize, radius: f64, budget: u64, rng: &mut RngStream) -> Result<(SearchArena, Point)> {
    let cells = side * side;
    if count == 0 || count > cells {
        return Err(Error::argument(format!("target count {count} not in 1..={cells}")));
    }
    // Partial Fisher-Yates over cell indices.
    let mut idx: Vec<usize> = (0..cells).collect();
    for i in 0..count {
        let j = i + rng.index(cells - i);
        idx.swap(i, j);
    }
    let targets = idx[..count].iter().map(|&c| (c % side, c / side)).collect();
    let start = rng.index(cells);
    Ok((SearchArena::new(side, targets, radius, budget)?, (start % side, start / side)))
}

fn summarize(side: usize, count: usize, radius: f64, strategy: Strategy, outcomes: &[SearchOutcome]) -> TournamentRow {
    let steps: Vec<f64> = outcomes.iter().filter_map(|o| o.steps_to_find).map(|s| s as f64).collect();
    TournamentRow {
        side,
        target_count: count,
        radius,
        strategy,
        success_probability: steps.len() as f64 / outcomes.len() as f64,
        mean_steps: (!steps.is_empty()).then(|| steps.iter().sum::<f64>() / steps.len() as f64),
        median_steps: median(&steps),
        rank: 0,
    }
}

/// Ranks rows by median steps among successes, then by success probability.
fn rank(rows: &mut [TournamentRow]) {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |r: &TournamentRow| r.median_steps.unwrap_or(f64::INFINITY);
        key(&rows[a])
            .total_cmp(&key(&rows[b]))
            .then(rows[b].success_probability.total_cmp(&rows[a].success_probability))
    });
    for (place, i) in order.into_iter().enumerate() {
        rows[i].rank = place + 1;
    }
}

/// Plays both strategies on identical arenas. Replica `r` of cell `c`
/// (cells enumerated side-major, then target count, then radius) draws from
/// `rng.substream(c).substream(r)`.
pub fn strategy_tournament(spec: &TournamentSpec, rng: &RngStream) -> Result<Vec<TournamentRow>> {
    if spec.replicas < 100 {
        return Err(Error::argument("need at least 100 replicas"));
    }
    if spec.sides.is_empty() || spec.target_counts.is_empty() || spec.radii.is_empty() {
        return Err(Error::argument("tournament grid is empty"));
    }
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &side in &spec.sides {
        for &count in &spec.target_counts {
            for &radius in &spec.radii {
                let budget = spec.step_budget.unwrap_or(10 * (side * side) as u64);
                let cell_rng = rng.substream(cell);
                let results = (0..spec.replicas as u64)
                    .into_par_iter()
                    .map(|r| {
                        let mut rr = cell_rng.substream(r);
                        let (arena, start) = random_arena(side, count, radius, budget, &mut rr)?;
                        Ok((random_walk_search(&arena, start, &mut rr)?, sweep_search(&arena, start)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (walks, sweeps): (Vec<_>, Vec<_>) = results.into_iter().unzip();
                let mut cell_rows = vec![
                    summarize(side, count, radius, Strategy::RandomWalk, &walks),
                    summarize(side, count, radius, Strategy::Sweep, &sweeps),
                ];
                rank(&mut cell_rows);
                rows.extend(cell_rows);
                cell += 1;
            }
        }
    }
    Ok(rows)
}
