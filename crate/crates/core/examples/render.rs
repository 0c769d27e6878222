//! Render a board file, or a fresh plaid, as SVG on standard output.
//!
//! cargo run --example render -- [board-file] > board.svg

use peaceable::constructions::best_plaid;
use peaceable::interface::{boardfile, svg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let battle = match std::env::args().nth(1) {
        Some(path) => boardfile::parse(&std::fs::read_to_string(path)?)?,
        None => best_plaid(32)?.1,
    };
    print!("{}", svg::render(&battle));
    Ok(())
}
