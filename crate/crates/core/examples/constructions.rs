//! Build the known families and report their sizes.
//!
//! cargo run --release --example constructions -- [n]

use peaceable::battle::is_peaceful;
use peaceable::constructions::{ainley, argyle, best_plaid, AINLEY_MIN_N};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(48);

    if n % 2 == 0 {
        let (p, b) = best_plaid(n)?;
        let density = b.min_count() as f64 / (n * n) as f64;
        println!("plaid   m={n} a={} b={}  min={}  density={density:.5}", p.a, p.b, b.min_count());
    } else {
        let b = argyle(n)?;
        let density = b.min_count() as f64 / (n * n) as f64;
        println!("argyle  n={n}  min={}  density={density:.5}", b.min_count());
    }
    if n >= AINLEY_MIN_N {
        let b = ainley(n)?;
        println!("ainley  n={n}  min={}  peaceful={}", b.min_count(), is_peaceful(&b).peaceful);
    }
    Ok(())
}
