//! Solve one of the density-bound programs from many starts.
//!
//! cargo run --release --example bounds -- [odd-torus|even-torus|regular] [starts] [seed]

use peaceable::bounds_nlp::{build_model, solve, ModelKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind: ModelKind = args.next().as_deref().unwrap_or("odd-torus").parse()?;
    let starts = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let model = build_model(kind);
    let report = solve(&model, &SolverConfig { starts, seed, ..SolverConfig::default() })?;
    println!("model       {kind}");
    println!("objective   {:.12}", report.best_objective);
    println!("violation   {:.2e}", report.constraint_violation);
    println!("feasible    {}/{} starts", report.converged_starts, report.starts);
    println!("best start  {}", report.best_start);
    println!("elapsed     {:.2?}", report.elapsed);
    for agg in &model.aggregates {
        let v = agg.lin.eval(&report.best_point);
        if v > 1e-9 {
            println!("  {:<10} {v:.6}", agg.name);
        }
    }
    Ok(())
}
