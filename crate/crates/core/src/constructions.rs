//! Explicit lower-bound families: the plaid on the even torus, the argyle
//! on the odd torus and the Ainley layout on the grid.
//!
//! Coordinates are 1-based `(i, j) = (row, col)` throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battle::{hat, Battle};
use crate::board::Board;
use crate::cellset::CellSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("plaid needs an even board size, got {0}")]
    OddSize(usize),
    #[error("argyle needs an odd board size, got {0}")]
    EvenSize(usize),
    #[error("plaid parameters a={a}, b={b} must lie in 1..={half} for m={m}")]
    PlaidOutOfRange { m: usize, a: usize, b: usize, half: usize },
    #[error("ainley needs n >= {min}, got {n}")]
    TooSmall { n: usize, min: usize },
}

/// `2 - √3`, the plaid's optimal corner fraction.
pub const PLAID_C: f64 = 0.267_949_192_431_122_7;

/// Slack in `best_plaid(m).min ≥ (c/2)·m² − K·m`, measured over even
/// `m ≤ 2000` and rounded up.
pub const PLAID_SLACK: f64 = 0.3;

/// Slack in `argyle(n).min ≥ n²/12 − K′·n`, measured over odd `n ≤ 2001`
/// and rounded up.
pub const ARGYLE_SLACK: f64 = 0.3;

/// Slack in `ainley(n).min ≥ ⌊7n²/48⌋ − K″·n`, measured over
/// `5 ≤ n ≤ 100` and rounded up.
pub const AINLEY_SLACK: f64 = 0.3;

pub const AINLEY_MIN_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaidParams {
    /// Board size; must be even.
    pub m: usize,
    pub a: usize,
    pub b: usize,
}

impl PlaidParams {
    pub fn new(m: usize, a: usize, b: usize) -> Result<Self, ConstructionError> {
        if m == 0 || m % 2 == 1 {
            return Err(ConstructionError::OddSize(m));
        }
        let half = m / 2;
        if !(1..=half).contains(&a) || !(1..=half).contains(&b) {
            return Err(ConstructionError::PlaidOutOfRange { m, a, b, half });
        }
        Ok(PlaidParams { m, a, b })
    }

    /// `(|B|, |W|)` in closed form, without building the board.
    pub fn counts(&self) -> (usize, usize) {
        let (m, a, b) = (self.m, self.a, self.b);
        let half = m / 2;
        let b1 = a * b / 2;
        let b2 = (a / 2) * (half - b.div_ceil(2));
        let b3 = (half - a.div_ceil(2)) * (b / 2);
        let w = (half - a / 2) * (half - b / 2);
        (b1 + b2 + b3, w)
    }

    pub fn min_count(&self) -> usize {
        let (b, w) = self.counts();
        b.min(w)
    }

    /// Membership of `(i, j)` in `(B, W)`.
    pub fn color(&self, i: usize, j: usize) -> (bool, bool) {
        let (a, b) = (self.a, self.b);
        let (i_even, j_even) = (i % 2 == 0, j % 2 == 0);
        let black = match (i <= a, j <= b) {
            (true, true) => i_even != j_even,
            (true, false) => i_even && !j_even,
            (false, true) => !i_even && j_even,
            (false, false) => false,
        };
        let white = i > a && j > b && i_even && j_even;
        (black, white)
    }
}

fn build(board: Board, member: impl Fn(usize, usize) -> (bool, bool)) -> Battle {
    let cap = board.cell_count();
    let mut black = CellSet::new(cap);
    let mut white = CellSet::new(cap);
    let n = board.n();
    for i in 1..=n {
        for j in 1..=n {
            let (b, w) = member(i, j);
            let idx = (i - 1) * n + (j - 1);
            if b {
                black.insert(idx);
            }
            if w {
                white.insert(idx);
            }
        }
    }
    Battle::from_sets(board, black, white).expect("construction regions are disjoint")
}

/// The `(a, b)`-plaid on the torus of size `m`.
pub fn plaid(params: PlaidParams) -> Result<Battle, ConstructionError> {
    let p = PlaidParams::new(params.m, params.a, params.b)?;
    let board = Board::torus(p.m).expect("m > 0");
    Ok(build(board, |i, j| p.color(i, j)))
}

/// The `(a, b)` window searched by [`best_plaid`]: two either side of
/// `⌊c·m⌋` and `⌈c·m⌉`, clipped to the valid range.
pub fn plaid_window(m: usize) -> Vec<(usize, usize)> {
    let cm = PLAID_C * m as f64;
    let lo = (cm.floor() as usize).saturating_sub(2).max(1);
    let hi = (cm.ceil() as usize + 2).min(m / 2);
    (lo..=hi)
        .flat_map(|a| (lo..=hi).map(move |b| (a, b)))
        .collect()
}

/// The plaid maximizing `min(|B|, |W|)` over [`plaid_window`]. Ties go to
/// the lexicographically smallest `(a, b)`.
pub fn best_plaid(m: usize) -> Result<(PlaidParams, Battle), ConstructionError> {
    if m == 0 || m % 2 == 1 {
        return Err(ConstructionError::OddSize(m));
    }
    let mut best: Option<PlaidParams> = None;
    for (a, b) in plaid_window(m) {
        let p = PlaidParams::new(m, a, b)?;
        if best.is_none_or(|q| p.min_count() > q.min_count()) {
            best = Some(p);
        }
    }
    let p = best.expect("window is never empty for even m");
    Ok((p, plaid(p)?))
}

/// Membership of `(i, j)` in the `n`-argyle.
///
/// `W` takes odd-odd cells in the central diagonal band whose skew index
/// is in one of the two outer bands. `B` takes even-even cells in the
/// central skew band whose difference `i − j` lies outside `W`'s band.
///
/// Both colors have even `i − j` and even `i + j`. On an odd torus each
/// line residue holds exactly one even integer difference (and one even
/// integer sum in `2..=2n`), so comparing the integer values is enough to
/// keep the colors apart.
pub fn argyle_color(n: usize, i: usize, j: usize) -> (bool, bool) {
    let (n_, i_, j_) = (n as i64, i as i64, j as i64);
    let third = n_ / 3;
    let diff = i_ - j_;
    let sum = i_ + j_;
    let lo_skew = (2 * n_) / 3;
    let hi_skew = (4 * n_ + 2) / 3; // ⌈4n/3⌉
    let white = i % 2 == 1
        && j % 2 == 1
        && (-third..third).contains(&diff)
        && (sum <= lo_skew || sum > hi_skew);
    let black = i % 2 == 0
        && j % 2 == 0
        && sum > (2 * n_ + 2) / 3 // ⌈2n/3⌉ + 1 ≤ i + j
        && sum <= hi_skew
        && !(-third..third).contains(&diff);
    (black, white)
}

pub fn argyle(n: usize) -> Result<Battle, ConstructionError> {
    if n % 2 == 0 {
        return Err(ConstructionError::EvenSize(n));
    }
    let board = Board::torus(n).expect("n odd, so n > 0");
    Ok(build(board, |i, j| argyle_color(n, i, j)))
}

/// Threshold adjustments for the Ainley layout, indexed by `n mod 12`,
/// in the order of [`AinleyLayout`]'s fields. Chosen by exhaustive search
/// over ±1 around the scaled thresholds; frozen.
const AINLEY_OFFSETS: [[i64; 7]; 12] = [
    [0, 0, 0, 0, 0, 0, 0],
    [0, 1, -1, -1, -1, 0, 0],
    [0, 0, 0, 0, -1, 1, -1],
    [-1, 1, -1, 0, -1, 0, 0],
    [-1, 0, 0, 0, -1, 0, 1],
    [0, 1, 0, -1, -1, 1, 0],
    [0, 0, 0, 0, -1, 0, 1],
    [-1, 1, -1, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [0, 1, -1, -1, -1, 0, 0],
    [0, 0, 0, 0, -1, 0, 1],
    [-1, 1, 0, 0, -1, 1, 0],
];

/// Black regions of the Ainley layout. White is the hat of black, which
/// lands on the half-turn image of these regions.
///
/// In unit coordinates `(x, y) = (j/n, i/n)` the regions tend to
/// `{x ≥ 3/4, y ≥ 1/2, 0 ≤ x − y ≤ 1/3}` and
/// `{1/4 ≤ x ≤ 1/2, y − x ≥ 1/3, x + y ≥ 1}`, of total area 7/48.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AinleyLayout {
    /// First region: `j ≥ col_min`, `i ≥ row_min`, `0 ≤ j − i ≤ band`.
    pub col_min: i64,
    pub row_min: i64,
    pub band: i64,
    /// Second region: `col_lo ≤ j ≤ col_hi`, `i − j ≥ diag_min`,
    /// `i + j ≥ skew_min`.
    pub col_lo: i64,
    pub col_hi: i64,
    pub diag_min: i64,
    pub skew_min: i64,
}

impl AinleyLayout {
    pub fn for_size(n: usize) -> Self {
        let n_ = n as i64;
        let base = [
            3 * n_ / 4 + 1,
            n_ / 2 + 1,
            n_ / 3 - 1,
            n_ / 4 + 1,
            n_ / 2,
            n_ / 3 + 1,
            n_ + 1,
        ];
        let off = AINLEY_OFFSETS[n % 12];
        let t: Vec<i64> = base.iter().zip(off).map(|(b, o)| b + o).collect();
        AinleyLayout {
            col_min: t[0],
            row_min: t[1],
            band: t[2],
            col_lo: t[3],
            col_hi: t[4],
            diag_min: t[5],
            skew_min: t[6],
        }
    }

    pub fn is_black(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i as i64, j as i64);
        let first = j >= self.col_min && i >= self.row_min && (0..=self.band).contains(&(j - i));
        let second = (self.col_lo..=self.col_hi).contains(&j)
            && i - j >= self.diag_min
            && i + j >= self.skew_min;
        first || second
    }
}

/// `⌊7n²/48⌋`.
pub fn ainley_bound(n: usize) -> usize {
    7 * n * n / 48
}

/// The Ainley layout on the grid of size `n`, trimmed so both colors have
/// `min(|B|, |W|)` queens.
pub fn ainley(n: usize) -> Result<Battle, ConstructionError> {
    if n < AINLEY_MIN_N {
        return Err(ConstructionError::TooSmall {
            n,
            min: AINLEY_MIN_N,
        });
    }
    let board = Board::grid(n).expect("n >= 5");
    let layout = AinleyLayout::for_size(n);
    let black = CellSet::from_indices(
        board.cell_count(),
        (0..board.cell_count()).filter(|&idx| layout.is_black(idx / n + 1, idx % n + 1)),
    );
    let white = hat(&board, &black);
    let mut battle = Battle::from_sets(board, black, white).expect("hat is disjoint from its set");
    battle.trim_to_balance();
    Ok(battle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battle::{is_peaceful, swap_on};
    use crate::board::LineRef;

    fn enumerate_counts(p: PlaidParams) -> (usize, usize) {
        let mut b = 0;
        let mut w = 0;
        for i in 1..=p.m {
            for j in 1..=p.m {
                let in_a = i <= p.a;
                let in_b = j <= p.b;
                if in_a && in_b && (i + j) % 2 == 1
                    || in_a && !in_b && i % 2 == 0 && j % 2 == 1
                    || !in_a && in_b && i % 2 == 1 && j % 2 == 0
                {
                    b += 1;
                }
                if !in_a && !in_b && i % 2 == 0 && j % 2 == 0 {
                    w += 1;
                }
            }
        }
        (b, w)
    }

    #[test]
    fn plaid_examples() {
        let p = PlaidParams::new(24, 6, 8).unwrap();
        assert_eq!(p.counts(), (84, 72));
        assert_eq!(plaid(p).unwrap().counts().black, 84);

        let p = PlaidParams::new(32, 8, 10).unwrap();
        assert_eq!(p.counts(), (144, 132));

        // The four cells of the 2-torus: only (2,2) qualifies, for W.
        let t2 = plaid(PlaidParams::new(2, 1, 1).unwrap()).unwrap();
        assert_eq!((t2.black().len(), t2.white_cells()), (0, vec![crate::board::Cell::new(2, 2)]));
    }

    #[test]
    fn closed_form_counts_match_enumeration() {
        for m in (2..=40).step_by(2) {
            for a in 1..=m / 2 {
                for b in 1..=m / 2 {
                    let p = PlaidParams::new(m, a, b).unwrap();
                    assert_eq!(p.counts(), enumerate_counts(p), "{p:?}");
                }
            }
        }
        let p = PlaidParams::new(30, 7, 9).unwrap();
        let c = plaid(p).unwrap().counts();
        assert_eq!((c.black, c.white), enumerate_counts(p));
    }

    #[test]
    fn plaid_parity_split() {
        let battle = plaid(PlaidParams::new(20, 5, 6).unwrap()).unwrap();
        assert!(battle.black_cells().iter().all(|c| (c.row + c.col) % 2 == 1));
        assert!(battle.white_cells().iter().all(|c| (c.row + c.col) % 2 == 0));
    }

    #[test]
    fn plaid_rejects_bad_params() {
        assert_eq!(PlaidParams::new(7, 1, 1), Err(ConstructionError::OddSize(7)));
        assert!(matches!(
            PlaidParams::new(8, 5, 1),
            Err(ConstructionError::PlaidOutOfRange { .. })
        ));
        assert!(matches!(
            PlaidParams::new(8, 0, 1),
            Err(ConstructionError::PlaidOutOfRange { .. })
        ));
        assert!(best_plaid(9).is_err());
    }

    #[test]
    fn best_plaid_small() {
        // Exhaustive max-of-min over (a, b) in 5..=8.
        let mut want = 0;
        for a in 5..=8 {
            for b in 5..=8 {
                want = want.max(enumerate_counts(PlaidParams { m: 24, a, b }).0.min(
                    enumerate_counts(PlaidParams { m: 24, a, b }).1,
                ));
            }
        }
        assert_eq!(want, 72);
        assert_eq!(best_plaid(24).unwrap().1.min_count(), 72);
        assert_eq!(best_plaid(2).unwrap().1.min_count(), 0);
    }

    #[test]
    fn swapping_improves_plaid() {
        // Drawn with the plaid's corner block at the bottom right, i.e. the
        // half-turn of our orientation.
        let mut b = plaid(PlaidParams::new(24, 6, 8).unwrap()).unwrap().half_turn();
        for e in [LineRef::col(22), LineRef::col(24), LineRef::row(24)] {
            b = swap_on(&b, e).unwrap();
            assert!(is_peaceful(&b).peaceful);
        }
        let c = b.counts();
        assert_eq!((c.black, c.white), (74, 74));
    }

    #[test]
    fn argyle_small_matches_predicates() {
        // n = 5: ⌊n/3⌋ = 1, so W needs i − j ∈ {−1, 0} with i, j odd,
        // i.e. the odd diagonal cells, and i + j ≤ 3 or i + j ≥ 9.
        let a5 = argyle(5).unwrap();
        let white: Vec<(usize, usize)> = a5.white_cells().iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(white, vec![(1, 1), (5, 5)]);
        // B: even-even, 5 ≤ i + j ≤ 7, i − j ∉ {−1, 0}.
        let black: Vec<(usize, usize)> = a5.black_cells().iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(black, vec![(2, 4), (4, 2)]);
        assert!(is_peaceful(&a5).peaceful);
        assert!(argyle(4).is_err());
    }

    #[test]
    fn argyle_peaceful_small() {
        for n in (1..=61).step_by(2) {
            assert!(is_peaceful(&argyle(n).unwrap()).peaceful, "n={n}");
        }
    }

    #[test]
    fn ainley_counts() {
        let a33 = ainley(33).unwrap();
        assert_eq!((a33.black().len(), a33.white().len()), (158, 158));
        assert!(is_peaceful(&a33).peaceful);
        assert_eq!(ainley(48).unwrap().min_count(), 336);
        assert!(matches!(ainley(4), Err(ConstructionError::TooSmall { .. })));
    }

    #[test]
    fn ainley_even_sizes_meet_bound() {
        for n in (6..=60).step_by(2) {
            assert_eq!(ainley(n).unwrap().min_count(), ainley_bound(n), "n={n}");
        }
    }
}
