//! Peaceful battles: two disjoint sets of queens, verification, the hat
//! operator and swap moves.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Board, BoardError, Cell, LineRef};
use crate::cellset::CellSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BattleError {
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error("cell {0} is both black and white")]
    Overlap(Cell),
    #[error("cell set has capacity {got}, board needs {want}")]
    CapacityMismatch { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub black: usize,
    pub white: usize,
    pub min: usize,
}

impl Counts {
    pub fn new(black: usize, white: usize) -> Self {
        Counts {
            black,
            white,
            min: black.min(white),
        }
    }
}

/// A line that meets both colors, with one queen of each color on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub line: LineRef,
    pub black: Cell,
    pub white: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub peaceful: bool,
    pub witness: Option<Witness>,
}

/// A pair `(B, W)` of disjoint cell sets on one board. Peacefulness is not
/// a type invariant: editors may stage attacking positions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Battle {
    board: Board,
    black: CellSet,
    white: CellSet,
}

impl Battle {
    pub fn empty(board: Board) -> Self {
        let cap = board.cell_count();
        Battle {
            board,
            black: CellSet::new(cap),
            white: CellSet::new(cap),
        }
    }

    pub fn new(
        board: Board,
        black: impl IntoIterator<Item = Cell>,
        white: impl IntoIterator<Item = Cell>,
    ) -> Result<Self, BattleError> {
        let mut battle = Battle::empty(board);
        for c in black {
            board.check_cell(c)?;
            battle.black.insert(board.cell_index(c));
        }
        for c in white {
            board.check_cell(c)?;
            let idx = board.cell_index(c);
            if battle.black.contains(idx) {
                return Err(BattleError::Overlap(c));
            }
            battle.white.insert(idx);
        }
        Ok(battle)
    }

    pub fn from_sets(board: Board, black: CellSet, white: CellSet) -> Result<Self, BattleError> {
        let want = board.cell_count();
        for s in [&black, &white] {
            if s.capacity() != want {
                return Err(BattleError::CapacityMismatch {
                    got: s.capacity(),
                    want,
                });
            }
        }
        if let Some(idx) = black.iter().find(|&i| white.contains(i)) {
            return Err(BattleError::Overlap(board.cell_at(idx)));
        }
        Ok(Battle {
            board,
            black,
            white,
        })
    }

    /// `(X, hat(X))`.
    pub fn with_hat(board: Board, black: CellSet) -> Self {
        let white = hat(&board, &black);
        Battle {
            board,
            black,
            white,
        }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn black(&self) -> &CellSet {
        &self.black
    }

    pub fn white(&self) -> &CellSet {
        &self.white
    }

    pub fn black_cells(&self) -> Vec<Cell> {
        self.black.iter().map(|i| self.board.cell_at(i)).collect()
    }

    pub fn white_cells(&self) -> Vec<Cell> {
        self.white.iter().map(|i| self.board.cell_at(i)).collect()
    }

    pub fn color_at(&self, c: Cell) -> Option<Color> {
        if !self.board.contains(c) {
            return None;
        }
        let idx = self.board.cell_index(c);
        if self.black.contains(idx) {
            Some(Color::Black)
        } else if self.white.contains(idx) {
            Some(Color::White)
        } else {
            None
        }
    }

    /// Set a cell to a color, or clear it with `None`.
    pub fn set(&mut self, c: Cell, color: Option<Color>) -> Result<(), BattleError> {
        self.board.check_cell(c)?;
        let idx = self.board.cell_index(c);
        self.black.remove(idx);
        self.white.remove(idx);
        match color {
            Some(Color::Black) => self.black.insert(idx),
            Some(Color::White) => self.white.insert(idx),
            None => false,
        };
        Ok(())
    }

    pub fn swap_colors(&self) -> Battle {
        Battle {
            board: self.board,
            black: self.white.clone(),
            white: self.black.clone(),
        }
    }

    pub fn counts(&self) -> Counts {
        Counts::new(self.black.len(), self.white.len())
    }

    pub fn min_count(&self) -> usize {
        self.counts().min
    }

    /// The image under the half-turn `(i, j) ↦ (n+1−i, n+1−j)`, which maps
    /// every line to a line on both topologies.
    pub fn half_turn(&self) -> Battle {
        let last = self.board.cell_count() - 1;
        let flip = |s: &CellSet| CellSet::from_indices(s.capacity(), s.iter().map(|i| last - i));
        Battle {
            board: self.board,
            black: flip(&self.black),
            white: flip(&self.white),
        }
    }

    /// Drop queens from the larger color (highest row-major index first)
    /// until both colors have the same size.
    pub fn trim_to_balance(&mut self) {
        let target = self.min_count();
        for set in [&mut self.black, &mut self.white] {
            let excess: Vec<usize> = set.iter().collect();
            for &idx in excess.iter().rev().take(excess.len() - target) {
                set.remove(idx);
            }
        }
    }
}

impl fmt::Debug for Battle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.counts();
        write!(f, "Battle({}, |B|={}, |W|={})", self.board, c.black, c.white)
    }
}

/// Per-line population counts of one cell set.
#[derive(Debug, Clone)]
pub(crate) struct LineTally {
    board: Board,
    counts: Vec<u32>,
}

impl LineTally {
    pub(crate) fn of(board: &Board, set: &CellSet) -> Self {
        let mut t = LineTally {
            board: *board,
            counts: vec![0; board.line_count()],
        };
        for idx in set.iter() {
            t.add(idx);
        }
        t
    }

    #[inline]
    pub(crate) fn add(&mut self, idx: usize) {
        for id in self.board.line_ids_through_index(idx) {
            self.counts[id] += 1;
        }
    }

    #[inline]
    pub(crate) fn remove(&mut self, idx: usize) {
        for id in self.board.line_ids_through_index(idx) {
            self.counts[id] -= 1;
        }
    }

    #[inline]
    pub(crate) fn count(&self, line_id: usize) -> u32 {
        self.counts[line_id]
    }

    /// Cells on no occupied line.
    pub(crate) fn free_cells(&self) -> CellSet {
        let mut out = CellSet::new(self.board.cell_count());
        self.for_each_free(|idx| {
            out.insert(idx);
        });
        out
    }

    pub(crate) fn free_count(&self) -> usize {
        let mut k = 0;
        self.for_each_free(|_| k += 1);
        k
    }

    fn for_each_free(&self, mut f: impl FnMut(usize)) {
        let n = self.board.n();
        let free_cols: Vec<usize> = (0..n).filter(|&j| self.counts[n + j] == 0).collect();
        for i in (0..n).filter(|&i| self.counts[i] == 0) {
            for &j in &free_cols {
                let idx = i * n + j;
                let ids = self.board.line_ids_through_index(idx);
                if self.counts[ids[2]] == 0 && self.counts[ids[3]] == 0 {
                    f(idx);
                }
            }
        }
    }
}

/// Check that no line meets both colors. Linear in cells plus lines; on
/// failure the witness is the least offending line in canonical order.
pub fn is_peaceful(battle: &Battle) -> Verdict {
    let board = battle.board;
    let tb = LineTally::of(&board, &battle.black);
    let tw = LineTally::of(&board, &battle.white);
    let offending = (0..board.line_count()).find(|&id| tb.count(id) > 0 && tw.count(id) > 0);
    match offending {
        None => Verdict {
            peaceful: true,
            witness: None,
        },
        Some(id) => {
            let line = board.line_from_id(id);
            let cells = board.line_cell_indices(line);
            let pick = |set: &CellSet| {
                let idx = *cells.iter().find(|&&i| set.contains(i)).expect("tally > 0");
                board.cell_at(idx)
            };
            Verdict {
                peaceful: false,
                witness: Some(Witness {
                    line,
                    black: pick(&battle.black),
                    white: pick(&battle.white),
                }),
            }
        }
    }
}

/// All cells lying on no line that meets `x`.
pub fn hat(board: &Board, x: &CellSet) -> CellSet {
    LineTally::of(board, x).free_cells()
}

/// Remove the black queens on `e` and recompute white as the hat of what
/// remains.
pub fn swap_on(battle: &Battle, e: LineRef) -> Result<Battle, BattleError> {
    let board = battle.board;
    board.check_line(e)?;
    let mut black = battle.black.clone();
    for idx in board.line_cell_indices(e) {
        black.remove(idx);
    }
    Ok(Battle::with_hat(board, black))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Topology;
    use crate::rng::SplitMix64;
    use std::collections::BTreeSet;

    fn cells(v: &[(usize, usize)]) -> Vec<Cell> {
        v.iter().map(|&(r, c)| Cell::new(r, c)).collect()
    }

    /// Every black/white pair compared directly.
    fn naive_peaceful(b: &Battle) -> bool {
        let board = b.board();
        for x in b.black_cells() {
            let lx = board.lines_through(x).unwrap();
            for y in b.white_cells() {
                if lx.iter().any(|&e| board.line_contains(e, y)) {
                    return false;
                }
            }
        }
        true
    }

    fn random_set(board: &Board, rng: &mut SplitMix64, p: f64) -> CellSet {
        CellSet::from_indices(
            board.cell_count(),
            (0..board.cell_count()).filter(|_| rng.next_f64() < p),
        )
    }

    #[test]
    fn shared_diagonal_is_reported() {
        let g2 = Board::grid(2).unwrap();
        let b = Battle::new(g2, cells(&[(1, 1)]), cells(&[(2, 2)])).unwrap();
        let v = is_peaceful(&b);
        assert!(!v.peaceful);
        let w = v.witness.unwrap();
        assert_eq!(w.line, LineRef::diag(0));
        assert_eq!((w.black, w.white), (Cell::new(1, 1), Cell::new(2, 2)));
    }

    #[test]
    fn no_white_is_peaceful() {
        let g5 = Board::grid(5).unwrap();
        let b = Battle::new(g5, g5.cells(), []).unwrap();
        assert!(is_peaceful(&b).peaceful);
    }

    #[test]
    fn overlap_rejected() {
        let g3 = Board::grid(3).unwrap();
        assert_eq!(
            Battle::new(g3, cells(&[(1, 1)]), cells(&[(1, 1)])),
            Err(BattleError::Overlap(Cell::new(1, 1)))
        );
        assert!(Battle::new(g3, cells(&[(4, 1)]), []).is_err());
    }

    #[test]
    fn hat_examples() {
        let g3 = Board::grid(3).unwrap();
        assert_eq!(hat(&g3, &CellSet::new(9)).len(), 9);

        let x = CellSet::from_indices(9, [g3.cell_index(Cell::new(1, 1))]);
        let got: BTreeSet<Cell> = hat(&g3, &x).iter().map(|i| g3.cell_at(i)).collect();
        assert_eq!(got, cells(&[(2, 3), (3, 2)]).into_iter().collect());

        let t3 = Board::torus(3).unwrap();
        let x = CellSet::from_indices(9, [0]);
        assert!(hat(&t3, &x).is_empty());
        // Exhaustive: every pair of distinct cells of the 3-torus shares a line.
        for a in t3.cells() {
            for b in t3.cells().filter(|&b| b != a) {
                let la = t3.lines_through(a).unwrap();
                assert!(la.iter().any(|&e| t3.line_contains(e, b)));
            }
        }
    }

    #[test]
    fn swap_examples() {
        let g4 = Board::grid(4).unwrap();
        let black = CellSet::from_indices(16, [g4.cell_index(Cell::new(1, 1))]);
        let b = Battle::with_hat(g4, black.clone());

        // Line disjoint from B: B unchanged, W = hat(B).
        let s = swap_on(&b, LineRef::row(3)).unwrap();
        assert_eq!(s.black(), &black);
        assert_eq!(s.white(), &hat(&g4, &black));

        // Removing the only black queen frees the whole board.
        let s = swap_on(&b, LineRef::row(1)).unwrap();
        assert!(s.black().is_empty());
        assert_eq!(s.white().len(), 16);

        assert!(swap_on(&b, LineRef::row(5)).is_err());
    }

    #[test]
    fn counts_example() {
        let g3 = Board::grid(3).unwrap();
        assert_eq!(Battle::empty(g3).counts(), Counts::new(0, 0));
        assert_eq!(Counts::new(84, 72).min, 72);
    }

    #[test]
    fn hat_is_peaceful_and_antitone() {
        let mut rng = SplitMix64::new(0xC0FFEE);
        for trial in 0..1000 {
            let n = 1 + (rng.below(20) as usize);
            let topology = if trial % 2 == 0 { Topology::Grid } else { Topology::Torus };
            let board = Board::new(n, topology).unwrap();
            let p = rng.next_f64() * 0.2;
            let x = random_set(&board, &mut rng, p);
            let hx = hat(&board, &x);
            let b = Battle::from_sets(board, x.clone(), hx.clone()).unwrap();
            assert!(is_peaceful(&b).peaceful);

            // hat(X) avoids every line through X, and takes every other cell.
            for c in board.cells() {
                let idx = board.cell_index(c);
                let attacked = x.iter().any(|xi| {
                    board
                        .lines_through(board.cell_at(xi))
                        .unwrap()
                        .iter()
                        .any(|&e| board.line_contains(e, c))
                });
                assert_eq!(hx.contains(idx), !attacked);
            }

            let mut y = x.clone();
            y.union_with(&random_set(&board, &mut rng, 0.05));
            assert!(hat(&board, &y).is_subset(&hx));
        }
    }

    #[test]
    fn verdict_matches_naive_check() {
        let mut rng = SplitMix64::new(7);
        for trial in 0..3000 {
            let n = 1 + (rng.below(8) as usize);
            let topology = if trial % 2 == 0 { Topology::Grid } else { Topology::Torus };
            let board = Board::new(n, topology).unwrap();
            let mut b = Battle::empty(board);
            for c in board.cells() {
                let r = rng.below(10);
                let color = match r {
                    0 => Some(Color::Black),
                    1 => Some(Color::White),
                    _ => None,
                };
                b.set(c, color).unwrap();
            }
            let v = is_peaceful(&b);
            assert_eq!(v.peaceful, naive_peaceful(&b), "{b:?}");
            assert_eq!(v.peaceful, v.witness.is_none());
            if let Some(w) = v.witness {
                assert!(board.line_contains(w.line, w.black));
                assert!(board.line_contains(w.line, w.white));
                assert_eq!(b.color_at(w.black), Some(Color::Black));
                assert_eq!(b.color_at(w.white), Some(Color::White));
            }
        }
    }

    #[test]
    fn swaps_preserve_peace_exhaustively_small() {
        let mut rng = SplitMix64::new(99);
        for topology in [Topology::Grid, Topology::Torus] {
            for n in 1..=8 {
                let board = Board::new(n, topology).unwrap();
                for _ in 0..30 {
                    let x = random_set(&board, &mut rng, 0.15);
                    // Any peaceful battle: a subset of hat(B) as white.
                    let hx = hat(&board, &x);
                    let w = CellSet::from_indices(
                        board.cell_count(),
                        hx.iter().filter(|_| rng.below(3) > 0),
                    );
                    let b = Battle::from_sets(board, x, w).unwrap();
                    assert!(is_peaceful(&b).peaceful);
                    for e in board.lines() {
                        let s = swap_on(&b, e).unwrap();
                        assert!(is_peaceful(&s).peaceful);
                        assert!(b.white().is_subset(s.white()));
                    }
                }
            }
        }
    }

    #[test]
    fn trim_balances() {
        let g5 = Board::grid(5).unwrap();
        let mut b = Battle::new(g5, cells(&[(1, 1), (1, 2), (2, 1)]), cells(&[(5, 4)])).unwrap();
        b.trim_to_balance();
        assert_eq!(b.counts(), Counts::new(1, 1));
        assert_eq!(b.black_cells(), cells(&[(1, 1)]));
    }
}
