//! Randomized local search by swaps, with restarts.
//!
//! A run repeatedly seeds `B` with `⌈n/5⌉` random cells and `W = hat(B)`,
//! then climbs. Each step puts the larger color in `B` and evaluates two
//! guards against the same battle: a swap that grows `|W|`, then a swap that
//! grows `|B| + |W|`. Both guards assign the next battle, so when both have
//! a qualifying line the second one is what takes effect.
//!
//! The climb keeps going while some swap qualifies, even if
//! `min(|B|, |W|)` drops on the way, and the best battle seen is retained.
//! A climb is cut off after `n²` steps. When it stalls the search restarts,
//! until the target is met or the budget runs out.
//!
//! Lines are scanned in canonical order (rows, columns, diagonals, skews by
//! ascending index) and the first qualifying line of each guard is used, so
//! a run is a pure function of its configuration and seed.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::battle::{Battle, LineTally};
use crate::board::{Board, Cell, LineRef};
use crate::cellset::CellSet;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub board: Board,
    /// Stop as soon as `min(|B|, |W|)` reaches this.
    pub target: usize,
    pub seed: u64,
    /// Re-initializations allowed after the first one; `None` is unbounded.
    pub max_restarts: Option<u64>,
    pub time_budget: Option<Duration>,
}

impl SearchConfig {
    pub fn new(board: Board, target: usize, seed: u64) -> Self {
        SearchConfig {
            board,
            target,
            seed,
            max_restarts: None,
            time_budget: None,
        }
    }

    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_max_restarts(mut self, restarts: u64) -> Self {
        self.max_restarts = Some(restarts);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SearchEvent {
    Initialized { black: Vec<Cell> },
    SwappedForW { line: LineRef },
    SwappedForSum { line: LineRef },
    ColorsSwapped,
    Restarted { black: Vec<Cell> },
    TargetReached { min: usize },
}

/// Apply one logged event. Returns `None` for an invalid line or cell.
pub fn apply_event(battle: &Battle, ev: &SearchEvent) -> Option<Battle> {
    let board = *battle.board();
    Some(match ev {
        SearchEvent::Initialized { black } | SearchEvent::Restarted { black } => {
            let mut set = CellSet::new(board.cell_count());
            for &c in black {
                board.check_cell(c).ok()?;
                set.insert(board.cell_index(c));
            }
            Battle::with_hat(board, set)
        }
        SearchEvent::SwappedForW { line } | SearchEvent::SwappedForSum { line } => {
            crate::battle::swap_on(battle, *line).ok()?
        }
        SearchEvent::ColorsSwapped => battle.swap_colors(),
        SearchEvent::TargetReached { .. } => battle.clone(),
    })
}

/// Replay an event log from an empty board.
pub fn replay(board: Board, events: &[SearchEvent]) -> Option<Battle> {
    events
        .iter()
        .try_fold(Battle::empty(board), |b, ev| apply_event(&b, ev))
}

/// `⌈n/5⌉` distinct cells drawn by the generator, and their hat.
pub fn random_init(board: &Board, rng: &mut SplitMix64) -> Battle {
    let k = board.n().div_ceil(5);
    let picks = rng.sample_distinct(board.cell_count(), k);
    let black = CellSet::from_indices(board.cell_count(), picks);
    Battle::with_hat(*board, black)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// The swap grows `|W|`.
    GrowWhite,
    /// The swap grows `|B| + |W|`.
    GrowSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub line: LineRef,
    pub kind: MoveKind,
    pub black_after: usize,
    pub white_after: usize,
}

impl Move {
    pub fn event(&self) -> SearchEvent {
        match self.kind {
            MoveKind::GrowWhite => SearchEvent::SwappedForW { line: self.line },
            MoveKind::GrowSum => SearchEvent::SwappedForSum { line: self.line },
        }
    }
}

/// The swap chosen for `battle`: the first `|B|+|W|`-growing line if there
/// is one, otherwise the first `|W|`-growing line. Does not normalize
/// colors.
pub fn find_move(battle: &Battle) -> Option<Move> {
    let board = *battle.board();
    let counts = battle.counts();
    let mut tally = LineTally::of(&board, battle.black());
    let mut first_white: Option<Move> = None;

    for id in 0..board.line_count() {
        let on_line = tally.count(id) as usize;
        if on_line == 0 {
            // B \ e = B; nothing changes.
            continue;
        }
        let line = board.line_from_id(id);
        let removed: Vec<usize> = board
            .line_cell_indices(line)
            .into_iter()
            .filter(|&i| battle.black().contains(i))
            .collect();
        for &i in &removed {
            tally.remove(i);
        }
        let white_after = tally.free_count();
        for &i in &removed {
            tally.add(i);
        }
        let black_after = counts.black - on_line;
        if black_after + white_after > counts.black + counts.white {
            return Some(Move {
                line,
                kind: MoveKind::GrowSum,
                black_after,
                white_after,
            });
        }
        if first_white.is_none() && white_after > counts.white {
            first_white = Some(Move {
                line,
                kind: MoveKind::GrowWhite,
                black_after,
                white_after,
            });
        }
    }
    first_white
}

/// Result of one pass of the climbing step.
#[derive(Debug, Clone)]
pub struct Step {
    pub battle: Battle,
    pub colors_swapped: bool,
    pub applied: Option<SearchEvent>,
}

/// One pass of the loop body: put the larger color in `B`, then apply the
/// swap picked by [`find_move`]. `applied` is `None` when no line
/// qualifies.
pub fn improve_step(battle: &Battle) -> Step {
    let c = battle.counts();
    let colors_swapped = c.white > c.black;
    let normalized = if colors_swapped {
        battle.swap_colors()
    } else {
        battle.clone()
    };
    match find_move(&normalized) {
        None => Step {
            battle: normalized,
            colors_swapped,
            applied: None,
        },
        Some(mv) => Step {
            battle: crate::battle::swap_on(&normalized, mv.line).expect("line from board"),
            colors_swapped,
            applied: Some(mv.event()),
        },
    }
}

/// Loop variables of a run.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub current: Battle,
    pub best: Battle,
    pub rng: SplitMix64,
    pub restarts: u64,
    pub inner_iterations: u64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub battle: Battle,
    pub reached_target: bool,
    pub restarts: u64,
    pub inner_iterations: u64,
    pub elapsed: Duration,
}

/// Run the search to completion. Events go to `sink` in order.
pub fn run(config: &SearchConfig, sink: &mut dyn FnMut(&SearchEvent)) -> SearchOutcome {
    run_until(config, &|| false, sink)
}

/// Like [`run`], polling `stop` once per climbing step.
pub fn run_until(
    config: &SearchConfig,
    stop: &dyn Fn() -> bool,
    sink: &mut dyn FnMut(&SearchEvent),
) -> SearchOutcome {
    let start = Instant::now();
    let board = config.board;
    let mut rng = SplitMix64::new(config.seed);
    let first = random_init(&board, &mut rng);
    sink(&SearchEvent::Initialized {
        black: first.black_cells(),
    });
    let mut state = SearchState {
        best: first.clone(),
        current: first,
        rng,
        restarts: 0,
        inner_iterations: 0,
    };
    let out_of_budget = || stop() || config.time_budget.is_some_and(|b| start.elapsed() >= b);

    loop {
        climb(&mut state, config.target, &out_of_budget, sink);
        let reached = state.best.min_count() >= config.target;
        if reached {
            sink(&SearchEvent::TargetReached {
                min: state.best.min_count(),
            });
        }
        let exhausted = config.max_restarts.is_some_and(|m| state.restarts >= m);
        if reached || exhausted || out_of_budget() {
            return SearchOutcome {
                battle: state.best,
                reached_target: reached,
                restarts: state.restarts,
                inner_iterations: state.inner_iterations,
                elapsed: start.elapsed(),
            };
        }
        state.restarts += 1;
        state.current = random_init(&board, &mut state.rng);
        sink(&SearchEvent::Restarted {
            black: state.current.black_cells(),
        });
    }
}

/// Climb from a given battle with no target and return the best battle
/// seen. Events go to `sink`.
pub fn climb_from(start: &Battle, sink: &mut dyn FnMut(&SearchEvent)) -> Battle {
    let mut state = SearchState {
        current: start.clone(),
        best: start.clone(),
        rng: SplitMix64::new(0),
        restarts: 0,
        inner_iterations: 0,
    };
    climb(&mut state, usize::MAX, &|| false, sink);
    state.best
}

/// The inner loop. Returns when no swap qualifies, the target is met, the
/// step cap is hit or the budget runs out.
fn climb(
    state: &mut SearchState,
    target: usize,
    out_of_budget: &dyn Fn() -> bool,
    sink: &mut dyn FnMut(&SearchEvent),
) {
    let cap = state.current.board().cell_count();
    if state.current.min_count() > state.best.min_count() {
        state.best = state.current.clone();
    }
    for _ in 0..cap {
        if state.best.min_count() >= target || out_of_budget() {
            return;
        }
        state.inner_iterations += 1;
        let step = improve_step(&state.current);
        if step.colors_swapped {
            sink(&SearchEvent::ColorsSwapped);
        }
        state.current = step.battle;
        match step.applied {
            Some(ev) => sink(&ev),
            None => return,
        }
        if state.current.min_count() > state.best.min_count() {
            state.best = state.current.clone();
        }
    }
}
