//! Run the swap local search and print its event stream.
//!
//! cargo run --release --example search -- [grid|torus] [n] [target] [seed]

use std::time::Duration;

use peaceable::board::{Board, Topology};
use peaceable::interface::boardfile;
use peaceable::swap_search::{run, SearchConfig, SearchEvent};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let topology = match args.next().as_deref().unwrap_or("torus") {
        "grid" => Topology::Grid,
        "torus" => Topology::Torus,
        other => return Err(format!("unknown topology {other}").into()),
    };
    let n = args.next().map(|s| s.parse()).transpose()?.unwrap_or(13);
    let target = args.next().map(|s| s.parse()).transpose()?.unwrap_or(16);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let config = SearchConfig::new(Board::new(n, topology)?, target, seed).with_time_budget(Duration::from_secs(60));
    let mut shown = 0;
    let outcome = run(&config, &mut |ev| {
        // Restarts dominate long runs; print the first few and the finish.
        if shown < 40 || matches!(ev, SearchEvent::TargetReached { .. }) {
            println!("{}", serde_json::to_string(ev).unwrap());
        }
        shown += 1;
    });
    println!(
        "{} after {} restarts, {} events, {:.2?}",
        if outcome.reached_target { "reached" } else { "missed" },
        outcome.restarts,
        shown,
        outcome.elapsed
    );
    print!("{}", boardfile::serialize(&outcome.battle));
    Ok(())
}
