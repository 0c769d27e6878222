//! Cells, lines and incidence for the n×n grid and the n×n torus.
//!
//! Both boards have the same vertex set, `[n] × [n]`, and four kinds of
//! lines: rows, columns, diagonals (`i − j` constant) and skew-diagonals
//! (`i + j` constant). On the torus the diagonal conditions are taken mod n,
//! so every line wraps around and holds exactly n cells.
//!
//! Cells are 1-based everywhere in the public API. Internally a cell is a
//! row-major index in `0..n²` and a line is a dense id in `0..line_count()`
//! whose order agrees with the `Ord` impl of [`LineRef`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board size must be at least 1")]
    EmptyBoard,
    #[error("cell ({row},{col}) is outside the {n}x{n} board")]
    CellOutOfRange { row: usize, col: usize, n: usize },
    #[error("{line} is not a line of the {topology} of size {n}")]
    InvalidLine {
        line: LineRef,
        topology: Topology,
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Grid,
    Torus,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Grid => "grid",
            Topology::Torus => "torus",
        })
    }
}

impl std::str::FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(Topology::Grid),
            "torus" => Ok(Topology::Torus),
            other => Err(format!("unknown topology `{other}` (expected grid or torus)")),
        }
    }
}

/// A square of the board, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// The four line types. Declaration order is the canonical scan order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Row,
    Col,
    Diag,
    Skew,
}

impl LineKind {
    pub const ALL: [LineKind; 4] = [LineKind::Row, LineKind::Col, LineKind::Diag, LineKind::Skew];
}

/// One hyperedge.
///
/// * `Row`/`Col`: index in `1..=n`.
/// * grid `Diag`: `i − j` in `-(n-1)..=n-1`; grid `Skew`: `i + j` in `2..=2n`.
/// * torus `Diag`/`Skew`: residue of `i − j` resp. `i + j` in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineRef {
    pub kind: LineKind,
    pub index: i64,
}

impl LineRef {
    pub const fn new(kind: LineKind, index: i64) -> Self {
        LineRef { kind, index }
    }
    pub const fn row(i: i64) -> Self {
        LineRef::new(LineKind::Row, i)
    }
    pub const fn col(j: i64) -> Self {
        LineRef::new(LineKind::Col, j)
    }
    pub const fn diag(k: i64) -> Self {
        LineRef::new(LineKind::Diag, k)
    }
    pub const fn skew(k: i64) -> Self {
        LineRef::new(LineKind::Skew, k)
    }
}

impl fmt::Display for LineRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            LineKind::Row => "row",
            LineKind::Col => "col",
            LineKind::Diag => "diag",
            LineKind::Skew => "skew",
        };
        write!(f, "{name} {}", self.index)
    }
}

impl std::str::FromStr for LineRef {
    type Err = String;

    /// Accepts `row 3`, `col:3`, `diag -2`, `skew 7`, and the short forms
    /// `r3`, `c22`, `d-2`, `s7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .find(|ch: char| ch == '-' || ch.is_ascii_digit())
            .ok_or_else(|| format!("line `{s}` has no index"))?;
        let (name, rest) = s.split_at(split);
        let name = name.trim().trim_end_matches(':').trim();
        let kind = match name {
            "row" | "r" => LineKind::Row,
            "col" | "c" => LineKind::Col,
            "diag" | "d" => LineKind::Diag,
            "skew" | "s" => LineKind::Skew,
            _ => return Err(format!("unknown line kind `{name}`")),
        };
        let index = rest
            .trim()
            .parse::<i64>()
            .map_err(|e| format!("bad line index in `{s}`: {e}"))?;
        Ok(LineRef { kind, index })
    }
}

/// Residue mod 2 of the defining difference (diagonals) or sum
/// (skew-diagonals) of a line on an even torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParityClass {
    Class0,
    Class1,
}

impl ParityClass {
    fn of(value: i64) -> Self {
        if value.rem_euclid(2) == 0 {
            ParityClass::Class0
        } else {
            ParityClass::Class1
        }
    }
}

/// Board size plus topology. A plain value; all derived structure is
/// computed on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Board {
    n: usize,
    topology: Topology,
}

impl Board {
    pub fn new(n: usize, topology: Topology) -> Result<Self, BoardError> {
        if n == 0 {
            return Err(BoardError::EmptyBoard);
        }
        Ok(Board { n, topology })
    }

    pub fn grid(n: usize) -> Result<Self, BoardError> {
        Board::new(n, Topology::Grid)
    }

    pub fn torus(n: usize) -> Result<Self, BoardError> {
        Board::new(n, Topology::Torus)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_torus(&self) -> bool {
        self.topology == Topology::Torus
    }

    pub fn cell_count(&self) -> usize {
        self.n * self.n
    }

    pub fn contains(&self, c: Cell) -> bool {
        (1..=self.n).contains(&c.row) && (1..=self.n).contains(&c.col)
    }

    pub fn check_cell(&self, c: Cell) -> Result<(), BoardError> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(BoardError::CellOutOfRange {
                row: c.row,
                col: c.col,
                n: self.n,
            })
        }
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let n = self.n;
        (1..=n).flat_map(move |r| (1..=n).map(move |c| Cell::new(r, c)))
    }

    /// Row-major index of an in-range cell.
    #[inline]
    pub fn cell_index(&self, c: Cell) -> usize {
        (c.row - 1) * self.n + (c.col - 1)
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index / self.n + 1, index % self.n + 1)
    }

    /// Number of lines: `6n − 2` on the grid, `4n` on the torus.
    pub fn line_count(&self) -> usize {
        match self.topology {
            Topology::Grid => 6 * self.n - 2,
            Topology::Torus => 4 * self.n,
        }
    }

    fn index_range(&self, kind: LineKind) -> (i64, i64) {
        let n = self.n as i64;
        match (kind, self.topology) {
            (LineKind::Row | LineKind::Col, _) => (1, n),
            (LineKind::Diag, Topology::Grid) => (-(n - 1), n - 1),
            (LineKind::Skew, Topology::Grid) => (2, 2 * n),
            (LineKind::Diag | LineKind::Skew, Topology::Torus) => (0, n - 1),
        }
    }

    fn kind_offset(&self, kind: LineKind) -> usize {
        let n = self.n;
        match (kind, self.topology) {
            (LineKind::Row, _) => 0,
            (LineKind::Col, _) => n,
            (LineKind::Diag, _) => 2 * n,
            (LineKind::Skew, Topology::Grid) => 2 * n + (2 * n - 1),
            (LineKind::Skew, Topology::Torus) => 3 * n,
        }
    }

    pub fn is_valid_line(&self, e: LineRef) -> bool {
        let (lo, hi) = self.index_range(e.kind);
        (lo..=hi).contains(&e.index)
    }

    pub fn check_line(&self, e: LineRef) -> Result<(), BoardError> {
        if self.is_valid_line(e) {
            Ok(())
        } else {
            Err(BoardError::InvalidLine {
                line: e,
                topology: self.topology,
                n: self.n,
            })
        }
    }

    /// Dense id of a valid line. Ids increase with the `LineRef` order.
    #[inline]
    pub fn line_id(&self, e: LineRef) -> usize {
        let (lo, _) = self.index_range(e.kind);
        self.kind_offset(e.kind) + (e.index - lo) as usize
    }

    pub fn line_from_id(&self, id: usize) -> LineRef {
        let kind = LineKind::ALL
            .into_iter()
            .rev()
            .find(|&k| self.kind_offset(k) <= id)
            .expect("offset of Row is 0");
        let (lo, _) = self.index_range(kind);
        LineRef::new(kind, lo + (id - self.kind_offset(kind)) as i64)
    }

    /// Every line in canonical order: rows, columns, diagonals, skews, each
    /// by ascending index.
    pub fn lines(&self) -> Vec<LineRef> {
        LineKind::ALL
            .into_iter()
            .flat_map(|kind| {
                let (lo, hi) = self.index_range(kind);
                (lo..=hi).map(move |k| LineRef::new(kind, k))
            })
            .collect()
    }

    /// Ids of the row, column, diagonal and skew through the cell with
    /// row-major index `idx`.
    #[inline]
    pub fn line_ids_through_index(&self, idx: usize) -> [usize; 4] {
        let n = self.n;
        let (i, j) = (idx / n, idx % n);
        match self.topology {
            Topology::Grid => [i, n + j, 2 * n + (i + n - 1 - j), 4 * n - 1 + i + j],
            Topology::Torus => [i, n + j, 2 * n + (i + n - j) % n, 3 * n + (i + j + 2) % n],
        }
    }

    pub fn lines_through(&self, c: Cell) -> Result<[LineRef; 4], BoardError> {
        self.check_cell(c)?;
        let (i, j) = (c.row as i64, c.col as i64);
        let n = self.n as i64;
        Ok(match self.topology {
            Topology::Grid => [
                LineRef::row(i),
                LineRef::col(j),
                LineRef::diag(i - j),
                LineRef::skew(i + j),
            ],
            Topology::Torus => [
                LineRef::row(i),
                LineRef::col(j),
                LineRef::diag((i - j).rem_euclid(n)),
                LineRef::skew((i + j).rem_euclid(n)),
            ],
        })
    }

    /// Whether the cell satisfies the defining equation of `e`.
    pub fn line_contains(&self, e: LineRef, c: Cell) -> bool {
        let (i, j) = (c.row as i64, c.col as i64);
        let n = self.n as i64;
        match (e.kind, self.topology) {
            (LineKind::Row, _) => i == e.index,
            (LineKind::Col, _) => j == e.index,
            (LineKind::Diag, Topology::Grid) => i - j == e.index,
            (LineKind::Skew, Topology::Grid) => i + j == e.index,
            (LineKind::Diag, Topology::Torus) => (i - j).rem_euclid(n) == e.index,
            (LineKind::Skew, Topology::Torus) => (i + j).rem_euclid(n) == e.index,
        }
    }

    /// The cells of a line, ordered by row and then column.
    pub fn cells_of_line(&self, e: LineRef) -> Result<Vec<Cell>, BoardError> {
        self.check_line(e)?;
        let n = self.n as i64;
        let k = e.index;
        let cells = match e.kind {
            LineKind::Row => (1..=n).map(|j| (k, j)).collect::<Vec<_>>(),
            LineKind::Col => (1..=n).map(|i| (i, k)).collect(),
            LineKind::Diag => (1..=n)
                .filter_map(|i| match self.topology {
                    Topology::Grid => Some((i, i - k)).filter(|&(_, j)| (1..=n).contains(&j)),
                    Topology::Torus => Some((i, (i - k - 1).rem_euclid(n) + 1)),
                })
                .collect(),
            LineKind::Skew => (1..=n)
                .filter_map(|i| match self.topology {
                    Topology::Grid => Some((i, k - i)).filter(|&(_, j)| (1..=n).contains(&j)),
                    Topology::Torus => Some((i, (k - i - 1).rem_euclid(n) + 1)),
                })
                .collect(),
        };
        Ok(cells
            .into_iter()
            .map(|(i, j)| Cell::new(i as usize, j as usize))
            .collect())
    }

    /// Row-major indices of the cells of a valid line.
    pub(crate) fn line_cell_indices(&self, e: LineRef) -> Vec<usize> {
        self.cells_of_line(e)
            .expect("caller passes a valid line")
            .into_iter()
            .map(|c| self.cell_index(c))
            .collect()
    }

    /// Parity class of a diagonal or skew-diagonal of an even torus; `None`
    /// for any other line or board.
    pub fn parity_class(&self, e: LineRef) -> Option<ParityClass> {
        let applies = self.is_torus()
            && self.n % 2 == 0
            && matches!(e.kind, LineKind::Diag | LineKind::Skew)
            && self.is_valid_line(e);
        applies.then(|| ParityClass::of(e.index))
    }

    /// `|e ∩ f|`. Closed form on the torus; explicit intersection on the
    /// grid. Invalid lines are treated as empty.
    pub fn line_intersection_size(&self, e: LineRef, f: LineRef) -> usize {
        if !self.is_valid_line(e) || !self.is_valid_line(f) {
            return 0;
        }
        match self.topology {
            Topology::Torus => self.torus_intersection(e, f),
            Topology::Grid => {
                let a = self.cells_of_line(e).expect("validated");
                a.into_iter().filter(|&c| self.line_contains(f, c)).count()
            }
        }
    }

    fn torus_intersection(&self, e: LineRef, f: LineRef) -> usize {
        use LineKind::*;
        if e.kind == f.kind {
            return if e.index == f.index { self.n } else { 0 };
        }
        match (e.kind, f.kind) {
            (Diag, Skew) | (Skew, Diag) => {
                if self.n % 2 == 1 {
                    1
                } else if (e.index - f.index).rem_euclid(2) == 0 {
                    2
                } else {
                    0
                }
            }
            _ => 1,
        }
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.topology, self.n)
    }
}
