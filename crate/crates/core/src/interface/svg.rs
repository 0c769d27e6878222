//! Deterministic SVG rendering of a battle.
//!
//! Every square is one `rect` in row-major order with class `e`, `b` or `w`;
//! fills come from a fixed stylesheet. The output depends only on the
//! battle, so equal battles give byte-identical documents.

use std::fmt::Write as _;

use crate::battle::{Battle, Color};
use crate::board::Cell;

pub const BLACK_FILL: &str = "#1b1b1b";
pub const WHITE_FILL: &str = "#f2c14e";
const EMPTY_FILL: &str = "#f7f5ef";
const GRID_STROKE: &str = "#9a968a";

/// Side of one square in pixels.
pub fn cell_size(n: usize) -> usize {
    (720 / n.max(1)).clamp(4, 24)
}

pub fn render(battle: &Battle) -> String {
    let board = battle.board();
    let n = board.n();
    let s = cell_size(n);
    let side = s * n;
    let c = battle.counts();
    let mut out = String::with_capacity(64 * n * n + 512);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
    );
    let _ = writeln!(
        out,
        "<title>{} {n}: {} black, {} white</title>",
        board.topology(),
        c.black,
        c.white
    );
    let _ = writeln!(
        out,
        "<style>rect{{stroke:{GRID_STROKE};stroke-width:{}}}.e{{fill:{EMPTY_FILL}}}.b{{fill:{BLACK_FILL}}}.w{{fill:{WHITE_FILL}}}</style>",
        if s >= 8 { "0.5" } else { "0.1" }
    );
    for i in 1..=n {
        for j in 1..=n {
            let class = match battle.color_at(Cell::new(i, j)) {
                None => 'e',
                Some(Color::Black) => 'b',
                Some(Color::White) => 'w',
            };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{s}" height="{s}" class="{class}"/>"#,
                (j - 1) * s,
                (i - 1) * s
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Read the square colors back out of a rendered document, row-major.
/// `None` for anything that is not a rendered board.
pub fn extract_colors(svg: &str, n: usize) -> Option<Vec<Option<Color>>> {
    let s = cell_size(n);
    let mut colors = vec![None; n * n];
    let mut seen = 0;
    for line in svg.lines().filter(|l| l.starts_with("<rect ")) {
        let attr = |name: &str| {
            let key = format!(" {name}=\"");
            let start = line.find(&key)? + key.len();
            let len = line[start..].find('"')?;
            Some(&line[start..start + len])
        };
        let x: usize = attr("x")?.parse().ok()?;
        let y: usize = attr("y")?.parse().ok()?;
        let color = match attr("class")? {
            "e" => None,
            "b" => Some(Color::Black),
            "w" => Some(Color::White),
            _ => return None,
        };
        let (i, j) = (y / s, x / s);
        if i >= n || j >= n {
            return None;
        }
        colors[i * n + j] = color;
        seen += 1;
    }
    (seen == n * n).then_some(colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::Board;

    #[test]
    fn empty_three_by_three() {
        let svg = render(&Battle::empty(Board::grid(3).unwrap()));
        assert_eq!(svg.matches("class=\"e\"").count(), 9);
        assert_eq!(svg.matches("<rect ").count(), 9);
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn colors_round_trip_through_the_document() {
        let board = Board::torus(4).unwrap();
        let b = Battle::new(board, [Cell::new(1, 2)], [Cell::new(3, 4), Cell::new(4, 4)]).unwrap();
        let svg = render(&b);
        let colors = extract_colors(&svg, 4).unwrap();
        assert_eq!(colors[1], Some(Color::Black));
        assert_eq!(colors[11], Some(Color::White));
        assert_eq!(colors[15], Some(Color::White));
        assert_eq!(colors.iter().filter(|c| c.is_none()).count(), 13);
        assert_eq!(render(&b), svg);
    }

    #[test]
    fn cell_size_scales() {
        assert_eq!(cell_size(3), 24);
        assert_eq!(cell_size(72), 10);
        assert_eq!(cell_size(2001), 4);
    }
}
