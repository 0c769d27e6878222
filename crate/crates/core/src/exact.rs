//! Exact `a(n)` and `t(n)` for small boards by branch-and-bound.
//!
//! Only `B` is searched; `W` is taken to be `hat(B)`, which loses nothing
//! because any peaceful `(B, W)` has `W ⊆ hat(B)`. Since `hat` only shrinks
//! as `B` grows, the value is the largest `m` for which some `B` with
//! `|B| = m` has `|hat(B)| ≥ m`. Each `m` is decided separately, counting
//! up from 1, so the last (failing) round is the optimality proof.
//!
//! Within a round, a candidate cell is discarded as soon as adding it would
//! leave fewer than `m` cells in the hat, and the branch dies when `|B|`
//! plus the surviving candidates cannot reach `m`. Candidates that attack
//! nothing in the hat are taken for free. On the torus every `B` can be
//! translated to contain the first cell, so that cell is fixed.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::battle::{hat, Battle};
use crate::board::{Board, Topology};
use crate::cellset::CellSet;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

/// Boards up to this many cells fit the solver's 128-bit masks.
pub const MAX_CELLS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("board has {0} cells; the exact solver handles at most {MAX_CELLS}")]
    TooLarge(usize),
    #[error("cell order must be a permutation of 0..{0}")]
    BadOrder(usize),
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub board: Board,
    /// Proven optimum when `complete`, otherwise a verified lower bound.
    pub value: usize,
    /// Both colors trimmed to `value` queens.
    pub witness: Battle,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    pub node_budget: u64,
    /// Branching order over row-major cell indices; `None` is row-major.
    pub cell_order: Option<Vec<usize>>,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            node_budget: DEFAULT_NODE_BUDGET,
            cell_order: None,
        }
    }
}

pub fn exact_value(board: Board, node_budget: Option<u64>) -> Result<ExactResult, ExactError> {
    let config = ExactConfig {
        node_budget: node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
        cell_order: None,
    };
    exact_value_with(board, &config)
}

pub fn exact_value_with(board: Board, config: &ExactConfig) -> Result<ExactResult, ExactError> {
    let start = Instant::now();
    let cells = board.cell_count();
    if cells > MAX_CELLS {
        return Err(ExactError::TooLarge(cells));
    }
    let order: Vec<usize> = match &config.cell_order {
        Some(o) => {
            let mut seen = vec![false; cells];
            if o.len() != cells || o.iter().any(|&c| c >= cells || std::mem::replace(&mut seen[c], true)) {
                return Err(ExactError::BadOrder(cells));
            }
            o.clone()
        }
        None => (0..cells).collect(),
    };
    let solver = Solver::new(board, order, config.node_budget);

    let mut best = Battle::empty(board);
    let mut value = 0;
    let mut complete = true;
    for m in 1..=cells {
        match solver.feasible(m) {
            Round::Found(bits) => {
                value = m;
                best = solver.witness(bits, m);
            }
            Round::Infeasible => break,
            Round::OutOfBudget => {
                complete = false;
                break;
            }
        }
    }
    Ok(ExactResult {
        board,
        value,
        witness: best,
        nodes_explored: solver.nodes.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
        complete,
    })
}

enum Round {
    Found(u128),
    Infeasible,
    OutOfBudget,
}

/// Masks live in "rank space": bit `r` is the cell `order[r]`.
struct Solver {
    board: Board,
    order: Vec<usize>,
    attacks: Vec<u128>,
    all: u128,
    budget: u64,
    nodes: AtomicU64,
    exhausted: AtomicBool,
}

impl Solver {
    fn new(board: Board, order: Vec<usize>, budget: u64) -> Self {
        let cells = board.cell_count();
        let mut rank = vec![0; cells];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let mut attacks = vec![0u128; cells];
        for (r, &c) in order.iter().enumerate() {
            let lines = board.line_ids_through_index(c);
            for (r2, &c2) in order.iter().enumerate() {
                let other = board.line_ids_through_index(c2);
                if lines.iter().zip(&other).any(|(a, b)| a == b) {
                    attacks[r] |= 1u128 << r2;
                }
            }
        }
        let all = if cells == 128 { u128::MAX } else { (1u128 << cells) - 1 };
        Solver {
            board,
            order,
            attacks,
            all,
            budget,
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
        }
    }

    fn witness(&self, bits: u128, m: usize) -> Battle {
        let cells = self.board.cell_count();
        let black = CellSet::from_indices(cells, ranks(bits).map(|r| self.order[r]));
        let white = hat(&self.board, &black);
        let mut b = Battle::from_sets(self.board, black, white).expect("hat is disjoint");
        b.trim_to_balance();
        debug_assert_eq!(b.min_count(), m);
        b
    }

    /// Is there a `B` with `|B| = m` and `|hat(B)| ≥ m`?
    fn feasible(&self, m: usize) -> Round {
        // Fixing the first cell on the torus: translate any B so it
        // contains that cell. Row-major index 0 keeps this exact whatever
        // the branching order.
        let (fixed, hat0, cand0) = if self.board.topology() == Topology::Torus {
            let r0 = self.order.iter().position(|&c| c == 0).expect("permutation");
            let b = 1u128 << r0;
            (b, self.all & !self.attacks[r0], self.all & !b)
        } else {
            (0, self.all, self.all)
        };
        let placed = fixed.count_ones() as usize;
        if placed >= m {
            return if (hat0.count_ones() as usize) >= m {
                Round::Found(fixed)
            } else {
                Round::Infeasible
            };
        }
        let cand0 = self.filter(hat0, cand0, m);

        // Split on the lowest-ranked further B cell; the subtrees are
        // disjoint.
        let firsts: Vec<usize> = ranks(cand0).collect();
        let found = firsts.par_iter().find_map_first(|&r| {
            let bit = 1u128 << r;
            let below = bit - 1;
            let cand = cand0 & !below & !bit;
            self.dfs(fixed | bit, hat0 & !self.attacks[r], cand, m)
        });
        match found {
            Some(bits) => Round::Found(bits),
            None if self.exhausted.load(Ordering::Relaxed) => Round::OutOfBudget,
            None => Round::Infeasible,
        }
    }

    /// Candidates whose inclusion keeps at least `m` cells in the hat.
    fn filter(&self, hat: u128, cand: u128, m: usize) -> u128 {
        let mut keep = 0;
        for r in ranks(cand) {
            if (hat & !self.attacks[r]).count_ones() as usize >= m {
                keep |= 1u128 << r;
            }
        }
        keep
    }

    fn dfs(&self, b: u128, hat: u128, cand: u128, m: usize) -> Option<u128> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return None;
        }
        let have = b.count_ones() as usize;
        if (hat.count_ones() as usize) < m {
            return None;
        }
        if have >= m {
            return Some(b);
        }
        let mut cand = self.filter(hat, cand, m);
        if have + (cand.count_ones() as usize) < m {
            return None;
        }
        // Free cells cost nothing in the hat.
        let mut b = b;
        for r in ranks(cand) {
            if hat & self.attacks[r] == 0 {
                b |= 1u128 << r;
                cand &= !(1u128 << r);
                if b.count_ones() as usize >= m {
                    return Some(b);
                }
            }
        }
        while cand != 0 {
            if self.exhausted.load(Ordering::Relaxed) {
                return None;
            }
            let have = b.count_ones() as usize;
            if have + (cand.count_ones() as usize) < m {
                return None;
            }
            let r = cand.trailing_zeros() as usize;
            let bit = 1u128 << r;
            cand &= !bit;
            if let Some(found) = self.dfs(b | bit, hat & !self.attacks[r], cand, m) {
                return Some(found);
            }
        }
        None
    }
}

fn ranks(mut bits: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let r = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(r)
    })
}

#[derive(Debug, Clone)]
pub struct OrderingCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct OrderingReport {
    /// `a(n)` for `n = 1..=grid_max`.
    pub grid: Vec<ExactResult>,
    /// `t(n)` for `n = 1..=torus_max`.
    pub torus: Vec<ExactResult>,
    pub checks: Vec<OrderingCheck>,
}

impl OrderingReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Computes `a(n)` for `n ≤ grid_max` and `t(n)` for `n ≤ torus_max`, then
/// checks `a(n) ≥ t(n)`, that `a` is non-decreasing, and, when both are in
/// range, `t(8) > t(9)`. A check over an incomplete value fails.
pub fn verify_ordering_facts(
    grid_max: usize,
    torus_max: usize,
    node_budget: Option<u64>,
) -> Result<OrderingReport, ExactError> {
    let solve = |n: usize, t: Topology| exact_value(Board::new(n, t).expect("n >= 1"), node_budget);
    let grid = (1..=grid_max)
        .map(|n| solve(n, Topology::Grid))
        .collect::<Result<Vec<_>, _>>()?;
    let torus = (1..=torus_max)
        .map(|n| solve(n, Topology::Torus))
        .collect::<Result<Vec<_>, _>>()?;

    let mut checks = vec![];
    for (g, t) in grid.iter().zip(&torus) {
        let n = g.board.n();
        checks.push(OrderingCheck {
            name: format!("a({n}) >= t({n})"),
            passed: g.complete && t.complete && g.value >= t.value,
            detail: format!("{} vs {}", g.value, t.value),
        });
    }
    for w in grid.windows(2) {
        let n = w[1].board.n();
        checks.push(OrderingCheck {
            name: format!("a({n}) >= a({})", n - 1),
            passed: w[0].complete && w[1].complete && w[1].value >= w[0].value,
            detail: format!("{} vs {}", w[1].value, w[0].value),
        });
    }
    if torus.len() >= 9 {
        let (t8, t9) = (&torus[7], &torus[8]);
        checks.push(OrderingCheck {
            name: "t(8) > t(9)".into(),
            passed: t8.complete && t9.complete && t8.value > t9.value,
            detail: format!("{} vs {}", t8.value, t9.value),
        });
    }
    Ok(OrderingReport { grid, torus, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battle::is_peaceful;
    use crate::rng::SplitMix64;

    /// Every 3-coloring of the cells, checked pair by pair.
    fn brute_force(board: Board) -> usize {
        let cells: Vec<_> = board.cells().collect();
        let k = cells.len();
        let lines: Vec<[usize; 4]> = (0..k).map(|i| board.line_ids_through_index(i)).collect();
        let attack = |a: usize, b: usize| lines[a].iter().zip(&lines[b]).any(|(x, y)| x == y);
        let mut best = 0;
        let mut colors = vec![0u8; k];
        loop {
            let (mut nb, mut nw) = (0, 0);
            let mut ok = true;
            for a in 0..k {
                match colors[a] {
                    1 => nb += 1,
                    2 => nw += 1,
                    _ => continue,
                }
                for b in 0..a {
                    if colors[b] != 0 && colors[b] != colors[a] && attack(a, b) {
                        ok = false;
                    }
                }
            }
            if ok {
                best = best.max(nb.min(nw));
            }
            // Next coloring in base 3.
            let mut i = 0;
            while i < k && colors[i] == 2 {
                colors[i] = 0;
                i += 1;
            }
            if i == k {
                return best;
            }
            colors[i] += 1;
        }
    }

    #[test]
    fn agrees_with_exhaustive_enumeration() {
        for topology in [Topology::Grid, Topology::Torus] {
            for n in 1..=3 {
                let board = Board::new(n, topology).unwrap();
                let r = exact_value(board, None).unwrap();
                assert!(r.complete);
                assert_eq!(r.value, brute_force(board), "{board}");
            }
        }
    }

    #[test]
    fn small_values() {
        let v = |n, t| exact_value(Board::new(n, t).unwrap(), None).unwrap().value;
        assert_eq!(v(1, Topology::Grid), 0);
        assert_eq!(v(2, Topology::Grid), 0);
        assert_eq!(v(3, Topology::Torus), 0);
    }

    #[test]
    fn witnesses_are_peaceful_and_balanced() {
        for topology in [Topology::Grid, Topology::Torus] {
            for n in 1..=6 {
                let r = exact_value(Board::new(n, topology).unwrap(), None).unwrap();
                assert!(is_peaceful(&r.witness).peaceful);
                let c = r.witness.counts();
                assert_eq!((c.black, c.white), (r.value, r.value));
            }
        }
    }

    #[test]
    fn value_is_independent_of_cell_order() {
        let mut rng = SplitMix64::new(99);
        for topology in [Topology::Grid, Topology::Torus] {
            for n in 4..=5 {
                let board = Board::new(n, topology).unwrap();
                let base = exact_value(board, None).unwrap().value;
                for _ in 0..3 {
                    let order = rng.sample_distinct(n * n, n * n);
                    let cfg = ExactConfig {
                        cell_order: Some(order),
                        ..ExactConfig::default()
                    };
                    assert_eq!(exact_value_with(board, &cfg).unwrap().value, base);
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let r = exact_value(Board::grid(7).unwrap(), Some(50)).unwrap();
        assert!(!r.complete);
        assert!(is_peaceful(&r.witness).peaceful);
        assert_eq!(r.witness.min_count(), r.value);
    }

    #[test]
    fn rejects_oversized_boards_and_bad_orders() {
        assert_eq!(
            exact_value(Board::grid(12).unwrap(), None).unwrap_err(),
            ExactError::TooLarge(144)
        );
        let cfg = ExactConfig {
            cell_order: Some(vec![0, 0, 1, 2]),
            ..ExactConfig::default()
        };
        assert!(exact_value_with(Board::grid(2).unwrap(), &cfg).is_err());
    }

    #[test]
    fn small_ordering_facts() {
        let report = verify_ordering_facts(6, 6, None).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
    }
}
