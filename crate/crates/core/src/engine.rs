//! Complete backtracking search for arrowing verdicts on `K_{j×s}`,
//! with forced-color propagation, root-level symmetry seeds, and the
//! `m_j` / classical `r` drivers built on top of it.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::mpgraph::{make_shape, Color, Coloring, EdgeId, GraphError, ShapeSpec, Vertex};
use crate::patterns::{self, completes, embedding_index, EmbeddingIndex, PatternName, MAX_EDGES};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance with {0} edges exceeds the {MAX_EDGES}-edge search limit")]
    TooLarge(usize),
    #[error("m_j is defined here for j >= 3, got {0}")]
    BadPartCount(u32),
    #[error("classical r needs n >= 2, got {0}")]
    BadOrder(u32),
}

/// Root symmetry reduction level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    /// Single empty seed.
    None,
    /// Seeds fix all edges at vertex 1.1; within each part the red
    /// edges form a prefix (within-part permutations).
    FirstVertex,
    /// Additionally the per-part red counts are non-increasing across
    /// parts (part permutations): the §2 split canonical form.
    #[default]
    Parts,
}

impl std::str::FromStr for Symmetry {
    type Err = String;

    fn from_str(s: &str) -> Result<Symmetry, String> {
        match s {
            "none" => Ok(Symmetry::None),
            "first-vertex" => Ok(Symmetry::FirstVertex),
            "parts" => Ok(Symmetry::Parts),
            _ => Err(format!("unknown symmetry mode {s:?}")),
        }
    }
}

/// Edge branching order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    /// Lowest canonical edge id first (vertex-major).
    Lexicographic,
    /// Edge under the most near-complete monochromatic threats first.
    #[default]
    MostConstrained,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Wall-clock budget; `None` means unbounded.
    pub budget: Option<Duration>,
    pub symmetry: Symmetry,
    pub threads: usize,
    pub order: BranchOrder,
    /// `compute_m` refuses to search instances above this edge count
    /// and reports `Unknown` bounds instead.
    pub max_edges: usize,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            budget: None,
            symmetry: Symmetry::Parts,
            threads: 1,
            order: BranchOrder::MostConstrained,
            max_edges: 64,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub seeds: usize,
    pub wall: Duration,
    pub budget_exhausted: bool,
}

/// Outcome of a single arrowing decision.
#[derive(Debug, Clone)]
pub enum ArrowVerdict {
    /// Every total coloring has a red copy of the red pattern or a
    /// blue copy of the blue pattern; the search space was exhausted.
    Arrows { stats: SearchStats },
    /// A verified good coloring exists.
    NotArrows {
        witness: Coloring,
        stats: SearchStats,
    },
    /// Budget exceeded before a decision.
    Unknown { stats: SearchStats },
}

impl ArrowVerdict {
    pub fn stats(&self) -> &SearchStats {
        match self {
            ArrowVerdict::Arrows { stats }
            | ArrowVerdict::NotArrows { stats, .. }
            | ArrowVerdict::Unknown { stats } => stats,
        }
    }

    pub fn is_arrows(&self) -> bool {
        matches!(self, ArrowVerdict::Arrows { .. })
    }

    pub fn is_not_arrows(&self) -> bool {
        matches!(self, ArrowVerdict::NotArrows { .. })
    }
}

/// A size multipartite Ramsey value, possibly only bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamseyValue {
    Finite(u32),
    /// `family` names the witness family certifying the claim.
    Infinite { family: String },
    /// Best proven bounds: `m >= lower`, and `m <= upper` when known.
    Unknown { lower: u32, upper: Option<u32> },
}

/// True iff there are no monochromatic copies of the respective target
/// patterns in a total coloring.
pub fn is_good_coloring(coloring: &Coloring, red: PatternName, blue: PatternName) -> bool {
    patterns::contains(coloring, Color::Red, red).is_none()
        && patterns::contains(coloring, Color::Blue, blue).is_none()
}

/// Result of propagating forced colors on a partial coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagation {
    /// Fixpoint reached; the listed assignments were forced (and are
    /// applied to the returned coloring).
    Forced {
        coloring: Coloring,
        forced: Vec<(EdgeId, Color)>,
    },
    /// Some edge is forced both ways: no extension avoids both targets.
    Conflict,
}

/// Reference propagation: iterate "this edge would complete a
/// monochromatic copy" to fixpoint. The search engine runs an
/// incremental equivalent; this one is the simple oracle form.
pub fn propagate(
    partial: &Coloring,
    red: PatternName,
    blue: PatternName,
) -> Result<Propagation, GraphError> {
    let mut coloring = partial.clone();
    let m = coloring.shape().edge_count();
    let mut forced = Vec::new();
    loop {
        let mut changed = false;
        for e in 0..m {
            if coloring.color(e)?.is_some() {
                continue;
            }
            let red_completes = completes(&coloring, e, Color::Red, red)?;
            let blue_completes = completes(&coloring, e, Color::Blue, blue)?;
            match (red_completes, blue_completes) {
                (true, true) => return Ok(Propagation::Conflict),
                (true, false) => {
                    coloring.set_color(e, Color::Blue)?;
                    forced.push((e, Color::Blue));
                    changed = true;
                }
                (false, true) => {
                    coloring.set_color(e, Color::Red)?;
                    forced.push((e, Color::Red));
                    changed = true;
                }
                (false, false) => {}
            }
        }
        if !changed {
            return Ok(Propagation::Forced { coloring, forced });
        }
    }
}

/// Seed partial assignments on the edges at vertex 1.1 covering every
/// coloring up to host symmetry. Each seed is a list of
/// `(edge, color)` pairs; `Symmetry::None` yields one empty seed.
pub fn symmetry_seeds(shape: ShapeSpec, symmetry: Symmetry) -> Vec<Vec<(EdgeId, Color)>> {
    if symmetry == Symmetry::None {
        return vec![Vec::new()];
    }
    let j = shape.parts();
    let s = shape.part_size();
    let v11 = Vertex::new(1, 1);
    // Red counts a_p per part p = 2..=j.
    let mut profiles: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 2..=j {
        let mut next = Vec::new();
        for prefix in &profiles {
            let cap = match symmetry {
                Symmetry::Parts => prefix.last().copied().unwrap_or(s),
                _ => s,
            };
            for a in 0..=cap {
                let mut p = prefix.clone();
                p.push(a);
                next.push(p);
            }
        }
        profiles = next;
    }
    profiles
        .into_iter()
        .map(|profile| {
            let mut seed = Vec::new();
            for (off, a) in profile.iter().enumerate() {
                let part = off as u32 + 2;
                for k in 1..=s {
                    let e = shape
                        .edge_between(v11, Vertex::new(part, k))
                        .unwrap()
                        .unwrap();
                    let c = if k <= *a { Color::Red } else { Color::Blue };
                    seed.push((e, c));
                }
            }
            seed
        })
        .collect()
}

/// Why a worker stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Witness,
    Timeout,
}

struct Shared {
    stop: AtomicBool,
    timeout: AtomicBool,
    witness: Mutex<Option<Coloring>>,
    next_seed: AtomicUsize,
    nodes: AtomicU64,
    propagations: AtomicU64,
}

/// Per-worker search state over one instance.
struct Searcher<'a> {
    shape: ShapeSpec,
    red_idx: &'static EmbeddingIndex,
    blue_idx: &'static EmbeddingIndex,
    color: Vec<Option<Color>>,
    unset: usize,
    // Per-embedding colored-edge counts, red pattern then blue pattern.
    red_emb_red: Vec<u32>,
    red_emb_blue: Vec<u32>,
    blue_emb_red: Vec<u32>,
    blue_emb_blue: Vec<u32>,
    trail: Vec<EdgeId>,
    order: BranchOrder,
    nodes: u64,
    propagations: u64,
    deadline: Option<Instant>,
    shared: &'a Shared,
    queue: Vec<(EdgeId, Color)>,
}

impl<'a> Searcher<'a> {
    fn new(
        shape: ShapeSpec,
        red_idx: &'static EmbeddingIndex,
        blue_idx: &'static EmbeddingIndex,
        order: BranchOrder,
        deadline: Option<Instant>,
        shared: &'a Shared,
    ) -> Searcher<'a> {
        let m = shape.edge_count();
        Searcher {
            shape,
            red_idx,
            blue_idx,
            color: vec![None; m],
            unset: m,
            red_emb_red: vec![0; red_idx.embeddings.len()],
            red_emb_blue: vec![0; red_idx.embeddings.len()],
            blue_emb_red: vec![0; blue_idx.embeddings.len()],
            blue_emb_blue: vec![0; blue_idx.embeddings.len()],
            trail: Vec::with_capacity(m),
            order,
            nodes: 0,
            propagations: 0,
            deadline,
            shared,
            queue: Vec::new(),
        }
    }

    fn place(&mut self, e: EdgeId, c: Color) {
        self.color[e] = Some(c);
        self.unset -= 1;
        self.trail.push(e);
        for &i in &self.red_idx.by_edge[e] {
            match c {
                Color::Red => self.red_emb_red[i as usize] += 1,
                Color::Blue => self.red_emb_blue[i as usize] += 1,
            }
        }
        for &i in &self.blue_idx.by_edge[e] {
            match c {
                Color::Red => self.blue_emb_red[i as usize] += 1,
                Color::Blue => self.blue_emb_blue[i as usize] += 1,
            }
        }
    }

    fn unplace(&mut self, e: EdgeId) {
        let c = self.color[e].expect("trail edge is set");
        self.color[e] = None;
        self.unset += 1;
        for &i in &self.red_idx.by_edge[e] {
            match c {
                Color::Red => self.red_emb_red[i as usize] -= 1,
                Color::Blue => self.red_emb_blue[i as usize] -= 1,
            }
        }
        for &i in &self.blue_idx.by_edge[e] {
            match c {
                Color::Red => self.blue_emb_red[i as usize] -= 1,
                Color::Blue => self.blue_emb_blue[i as usize] -= 1,
            }
        }
    }

    fn backtrack_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            self.unplace(e);
        }
    }

    fn unset_edge_of_red_emb(&self, i: usize) -> EdgeId {
        *self.red_idx.embeddings[i]
            .edges
            .iter()
            .find(|&&e| self.color[e].is_none())
            .expect("exactly one unset edge")
    }

    fn unset_edge_of_blue_emb(&self, i: usize) -> EdgeId {
        *self.blue_idx.embeddings[i]
            .edges
            .iter()
            .find(|&&e| self.color[e].is_none())
            .expect("exactly one unset edge")
    }

    /// Assigns `e := c` and propagates forced colors to fixpoint.
    /// Returns false on conflict (a monochromatic copy is unavoidable);
    /// the caller backtracks via the trail.
    fn assign(&mut self, e: EdgeId, c: Color) -> bool {
        self.queue.clear();
        self.queue.push((e, c));
        let mut qi = 0;
        while qi < self.queue.len() {
            let (e, c) = self.queue[qi];
            qi += 1;
            match self.color[e] {
                Some(x) if x == c => continue,
                Some(_) => return false,
                None => {}
            }
            self.place(e, c);
            self.propagations += 1;
            match c {
                Color::Red => {
                    for k in 0..self.red_idx.by_edge[e].len() {
                        let i = self.red_idx.by_edge[e][k] as usize;
                        if self.red_emb_blue[i] > 0 {
                            continue;
                        }
                        let size = self.red_idx.embeddings[i].edges.len() as u32;
                        let rem = size - self.red_emb_red[i];
                        if rem == 0 {
                            return false;
                        }
                        if rem == 1 {
                            let f = self.unset_edge_of_red_emb(i);
                            self.queue.push((f, Color::Blue));
                        }
                    }
                }
                Color::Blue => {
                    for k in 0..self.blue_idx.by_edge[e].len() {
                        let i = self.blue_idx.by_edge[e][k] as usize;
                        if self.blue_emb_red[i] > 0 {
                            continue;
                        }
                        let size = self.blue_idx.embeddings[i].edges.len() as u32;
                        let rem = size - self.blue_emb_blue[i];
                        if rem == 0 {
                            return false;
                        }
                        if rem == 1 {
                            let f = self.unset_edge_of_blue_emb(i);
                            self.queue.push((f, Color::Red));
                        }
                    }
                }
            }
        }
        true
    }

    /// One full scan catching units not reachable from any assignment
    /// (size-1 patterns at the root).
    fn root_propagate(&mut self) -> bool {
        loop {
            let mut forced: Vec<(EdgeId, Color)> = Vec::new();
            for i in 0..self.red_idx.embeddings.len() {
                let size = self.red_idx.embeddings[i].edges.len() as u32;
                if self.red_emb_blue[i] == 0 && size - self.red_emb_red[i] == 1 {
                    forced.push((self.unset_edge_of_red_emb(i), Color::Blue));
                }
                if self.red_emb_blue[i] == 0 && size == self.red_emb_red[i] {
                    return false;
                }
            }
            for i in 0..self.blue_idx.embeddings.len() {
                let size = self.blue_idx.embeddings[i].edges.len() as u32;
                if self.blue_emb_red[i] == 0 && size - self.blue_emb_blue[i] == 1 {
                    forced.push((self.unset_edge_of_blue_emb(i), Color::Red));
                }
                if self.blue_emb_red[i] == 0 && size == self.blue_emb_blue[i] {
                    return false;
                }
            }
            if forced.is_empty() {
                return true;
            }
            for (e, c) in forced {
                if self.color[e] == Some(c) {
                    continue;
                }
                if !self.assign(e, c) {
                    return false;
                }
            }
        }
    }

    fn pick_edge(&self) -> EdgeId {
        match self.order {
            BranchOrder::Lexicographic => {
                (0..self.color.len())
                    .find(|&e| self.color[e].is_none())
                    .expect("some edge unset")
            }
            BranchOrder::MostConstrained => {
                let m = self.color.len();
                let mut score = vec![0u32; m];
                for i in 0..self.red_idx.embeddings.len() {
                    let size = self.red_idx.embeddings[i].edges.len() as u32;
                    if self.red_emb_blue[i] == 0 && size - self.red_emb_red[i] == 2 {
                        for &e in &self.red_idx.embeddings[i].edges {
                            if self.color[e].is_none() {
                                score[e] += 1;
                            }
                        }
                    }
                }
                for i in 0..self.blue_idx.embeddings.len() {
                    let size = self.blue_idx.embeddings[i].edges.len() as u32;
                    if self.blue_emb_red[i] == 0 && size - self.blue_emb_blue[i] == 2 {
                        for &e in &self.blue_idx.embeddings[i].edges {
                            if self.color[e].is_none() {
                                score[e] += 1;
                            }
                        }
                    }
                }
                let mut best = usize::MAX;
                let mut best_score = 0;
                for e in 0..m {
                    if self.color[e].is_none() && (best == usize::MAX || score[e] > best_score) {
                        best = e;
                        best_score = score[e];
                    }
                }
                best
            }
        }
    }

    fn dfs(&mut self) -> Option<Stop> {
        self.nodes += 1;
        if self.nodes % 4096 == 0 {
            if self.shared.stop.load(Ordering::Relaxed) {
                return Some(Stop::Witness);
            }
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Some(Stop::Timeout);
                }
            }
        }
        if self.unset == 0 {
            return Some(Stop::Witness);
        }
        let e = self.pick_edge();
        for c in [Color::Red, Color::Blue] {
            let mark = self.trail.len();
            if self.assign(e, c) {
                if let Some(stop) = self.dfs() {
                    if stop == Stop::Witness && self.unset == 0 {
                        // Leave the witness in place.
                        return Some(stop);
                    }
                    self.backtrack_to(mark);
                    return Some(stop);
                }
            }
            self.backtrack_to(mark);
        }
        None
    }

    fn current_coloring(&self) -> Coloring {
        let mut coloring = Coloring::empty(self.shape);
        for (e, c) in self.color.iter().enumerate() {
            if let Some(c) = c {
                coloring.set_color(e, *c).unwrap();
            }
        }
        coloring
    }
}

/// Decides whether `K_{j×s} → (red, blue)` by complete search. The
/// verdict is deterministic for a given instance; only stats (and the
/// identity of a NotArrows witness) vary with options.
pub fn decide_arrowing(
    shape: ShapeSpec,
    red: PatternName,
    blue: PatternName,
    opts: &SearchOptions,
) -> Result<ArrowVerdict, EngineError> {
    let m = shape.edge_count();
    if m > MAX_EDGES {
        return Err(EngineError::TooLarge(m));
    }
    let start = Instant::now();
    let deadline = opts.budget.map(|b| start + b);
    // An already-exhausted budget is Unknown up front; the in-search
    // deadline is only polled every few thousand nodes.
    if deadline.is_some_and(|d| Instant::now() >= d) {
        return Ok(ArrowVerdict::Unknown {
            stats: SearchStats {
                budget_exhausted: true,
                wall: start.elapsed(),
                ..SearchStats::default()
            },
        });
    }
    let red_idx = embedding_index(shape, red);
    let blue_idx = embedding_index(shape, blue);
    let seeds = symmetry_seeds(shape, opts.symmetry);
    let shared = Shared {
        stop: AtomicBool::new(false),
        timeout: AtomicBool::new(false),
        witness: Mutex::new(None),
        next_seed: AtomicUsize::new(0),
        nodes: AtomicU64::new(0),
        propagations: AtomicU64::new(0),
    };

    let worker = |shared: &Shared| {
        while !shared.stop.load(Ordering::Relaxed) {
            let si = shared.next_seed.fetch_add(1, Ordering::Relaxed);
            if si >= seeds.len() {
                return;
            }
            let mut searcher = Searcher::new(shape, red_idx, blue_idx, opts.order, deadline, shared);
            let mut dead_seed = false;
            for &(e, c) in &seeds[si] {
                if !searcher.assign(e, c) {
                    dead_seed = true;
                    break;
                }
            }
            if !dead_seed && searcher.root_propagate() {
                match searcher.dfs() {
                    Some(Stop::Witness) => {
                        if searcher.unset == 0 {
                            let witness = searcher.current_coloring();
                            if is_good_coloring(&witness, red, blue) {
                                *shared.witness.lock().unwrap() = Some(witness);
                                shared.stop.store(true, Ordering::Relaxed);
                            }
                        }
                        // Otherwise another worker found it first.
                    }
                    Some(Stop::Timeout) => {
                        shared.timeout.store(true, Ordering::Relaxed);
                        shared.stop.store(true, Ordering::Relaxed);
                    }
                    None => {}
                }
            }
            shared.nodes.fetch_add(searcher.nodes, Ordering::Relaxed);
            shared
                .propagations
                .fetch_add(searcher.propagations, Ordering::Relaxed);
        }
    };

    let threads = opts.threads.max(1).min(seeds.len().max(1));
    if threads == 1 {
        worker(&shared);
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| worker(&shared));
            }
        });
    }

    let stats = SearchStats {
        nodes: shared.nodes.load(Ordering::Relaxed),
        propagations: shared.propagations.load(Ordering::Relaxed),
        seeds: seeds.len(),
        wall: start.elapsed(),
        budget_exhausted: shared.timeout.load(Ordering::Relaxed),
    };
    let witness = shared.witness.lock().unwrap().take();
    if let Some(witness) = witness {
        debug_assert!(is_good_coloring(&witness, red, blue));
        return Ok(ArrowVerdict::NotArrows { witness, stats });
    }
    if stats.budget_exhausted {
        return Ok(ArrowVerdict::Unknown { stats });
    }
    Ok(ArrowVerdict::Arrows { stats })
}

/// Targets whose `m_j(B, ·)` is infinite for `j ∈ {3,4,5}`: every
/// target containing a triangle, certified by the pentagon blow-up
/// family (`m_j(C3, C3) = ∞` there).
pub fn infinite_target(j: u32, g: PatternName) -> bool {
    (3..=5).contains(&j)
        && matches!(
            g,
            PatternName::C3 | PatternName::Paw | PatternName::B2 | PatternName::K4
        )
}

/// One step of a `compute_m` scan.
#[derive(Debug, Clone)]
pub struct MStep {
    pub s: u32,
    pub verdict: ArrowVerdict,
}

#[derive(Debug, Clone)]
pub struct MReport {
    pub value: RamseyValue,
    pub steps: Vec<MStep>,
    /// Good coloring at the largest non-arrowing size reached.
    pub witness: Option<Coloring>,
}

/// Computes `m_j(B-like red target, G)` by scanning part sizes,
/// stopping at the first arrowing size (monotone in `s`).
pub fn compute_m(
    j: u32,
    red: PatternName,
    blue: PatternName,
    s_cap: u32,
    opts: &SearchOptions,
) -> Result<MReport, EngineError> {
    if j < 3 {
        return Err(EngineError::BadPartCount(j));
    }
    if red == PatternName::B && infinite_target(j, blue) {
        return Ok(MReport {
            value: RamseyValue::Infinite {
                family: "pentagon-blowup".to_string(),
            },
            steps: Vec::new(),
            witness: None,
        });
    }
    let mut steps = Vec::new();
    let mut witness = None;
    let mut lower = 1;
    for s in 1..=s_cap {
        let shape = make_shape(j, s)?;
        if shape.edge_count() > opts.max_edges {
            return Ok(MReport {
                value: RamseyValue::Unknown {
                    lower,
                    upper: None,
                },
                steps,
                witness,
            });
        }
        let verdict = decide_arrowing(shape, red, blue, opts)?;
        match &verdict {
            ArrowVerdict::Arrows { .. } => {
                steps.push(MStep { s, verdict });
                return Ok(MReport {
                    value: RamseyValue::Finite(s),
                    steps,
                    witness,
                });
            }
            ArrowVerdict::NotArrows { witness: w, .. } => {
                witness = Some(w.clone());
                lower = s + 1;
                steps.push(MStep { s, verdict });
            }
            ArrowVerdict::Unknown { .. } => {
                steps.push(MStep { s, verdict });
                return Ok(MReport {
                    value: RamseyValue::Unknown {
                        lower,
                        upper: None,
                    },
                    steps,
                    witness,
                });
            }
        }
    }
    Ok(MReport {
        value: RamseyValue::Unknown {
            lower,
            upper: None,
        },
        steps,
        witness,
    })
}

/// Re-check of a cited classical Ramsey value `r(red, blue) = n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RVerdict {
    Confirmed,
    Refuted,
    Partial,
}

/// Confirms `r(red, blue) = n` via `K_{n−1}` non-arrowing and `K_n`
/// arrowing.
pub fn verify_r(
    n: u32,
    red: PatternName,
    blue: PatternName,
    opts: &SearchOptions,
) -> Result<RVerdict, EngineError> {
    if n < 2 {
        return Err(EngineError::BadOrder(n));
    }
    let below = decide_arrowing(make_shape(n - 1, 1)?, red, blue, opts)?;
    let at = decide_arrowing(make_shape(n, 1)?, red, blue, opts)?;
    Ok(match (&below, &at) {
        (ArrowVerdict::Unknown { .. }, _) | (_, ArrowVerdict::Unknown { .. }) => RVerdict::Partial,
        (ArrowVerdict::NotArrows { .. }, ArrowVerdict::Arrows { .. }) => RVerdict::Confirmed,
        _ => RVerdict::Refuted,
    })
}
