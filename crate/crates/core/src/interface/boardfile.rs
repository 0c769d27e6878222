//! Text board files.
//!
//! ```text
//! torus 5
//! B....
//! ..W..
//! .....
//! .....
//! .....
//! ```
//!
//! The header names the topology and size. Each following line is one row,
//! top to bottom starting at row 1, with one character per column: `.`
//! empty, `B` black, `W` white.

use thiserror::Error;

use crate::battle::{Battle, BattleError, Color};
use crate::board::{Board, BoardError, Cell, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardFileError {
    #[error("missing header line `<grid|torus> <n>`")]
    MissingHeader,
    #[error("bad header {0:?}: expected `<grid|torus> <n>`")]
    BadHeader(String),
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("line {line}: expected {expected} characters, found {found}")]
    RowLength { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {col}: unexpected character {ch:?}")]
    BadChar { line: usize, col: usize, ch: char },
    #[error(transparent)]
    Board(#[from] BoardError),
    #[error(transparent)]
    Battle(#[from] BattleError),
}

pub fn parse(text: &str) -> Result<Battle, BoardFileError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(BoardFileError::MissingHeader)?;
    let mut parts = header.split_whitespace();
    let (topology, n) = match (parts.next(), parts.next(), parts.next()) {
        (Some(t), Some(n), None) => {
            let t: Topology = t.parse().map_err(|_| BoardFileError::BadHeader(header.into()))?;
            let n: usize = n.parse().map_err(|_| BoardFileError::BadHeader(header.into()))?;
            (t, n)
        }
        _ => return Err(BoardFileError::BadHeader(header.into())),
    };
    let board = Board::new(n, topology)?;
    let mut battle = Battle::empty(board);
    let mut rows = 0;
    for (ln, raw) in lines {
        let row = raw.trim_end();
        rows += 1;
        if rows > n {
            continue;
        }
        let found = row.chars().count();
        if found != n {
            return Err(BoardFileError::RowLength {
                line: ln + 1,
                expected: n,
                found,
            });
        }
        for (j, ch) in row.chars().enumerate() {
            let color = match ch {
                '.' => continue,
                'B' => Color::Black,
                'W' => Color::White,
                _ => {
                    return Err(BoardFileError::BadChar {
                        line: ln + 1,
                        col: j + 1,
                        ch,
                    })
                }
            };
            battle.set(Cell::new(rows, j + 1), Some(color))?;
        }
    }
    if rows != n {
        return Err(BoardFileError::RowCount { expected: n, found: rows });
    }
    Ok(battle)
}

pub fn serialize(battle: &Battle) -> String {
    let board = battle.board();
    let n = board.n();
    let mut out = format!("{} {}\n", board.topology(), n);
    out.reserve(n * (n + 1));
    for i in 1..=n {
        for j in 1..=n {
            out.push(match battle.color_at(Cell::new(i, j)) {
                None => '.',
                Some(Color::Black) => 'B',
                Some(Color::White) => 'W',
            });
        }
        out.push('\n');
    }
    out
}
