//! Exact values for small boards by branch and bound.
//!
//! cargo run --release --example exact -- [max_grid_n] [max_torus_n]

use peaceable::board::Board;
use peaceable::exact::exact_value;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_grid: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let max_torus: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);

    for (label, max, make) in [
        ("grid", max_grid, Board::grid as fn(usize) -> _),
        ("torus", max_torus, Board::torus as fn(usize) -> _),
    ] {
        for n in 1..=max {
            let r = exact_value(make(n)?, None)?;
            println!(
                "{label:<5} n={n}  value={}{}  nodes={}  {:.2?}",
                r.value,
                if r.complete { "" } else { " (lower bound)" },
                r.nodes_explored,
                r.elapsed
            );
        }
    }
    Ok(())
}
