//! Superstable and period-doubling parameters of the logistic map and the
//! Feigenbaum ratio estimates.
//!
//! cargo run --release --example cascade -- [n_max]

use qpcascade::unimodal::cascade;
use qpcascade::universality::accumulation_point;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_max: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(9);
    let table = cascade::<f64>(n_max)?;
    println!("{:>3} {:>20} {:>20} {:>12} {:>12}", "n", "s_n", "d_n", "ratio_s", "ratio_d");
    for e in &table.entries {
        let i = e.n as usize;
        let fmt = |r: &[f64]| i.checked_sub(1).and_then(|j| r.get(j)).map_or("---".to_string(), |v| format!("{v:.8}"));
        println!("{:>3} {:>20.16} {:>20.16} {:>12} {:>12}", e.n, e.s, e.d, fmt(&table.ratio_s), fmt(&table.ratio_d));
    }
    println!("s* ~ {:.12}", accumulation_point(&table.superstable())?);
    Ok(())
}
