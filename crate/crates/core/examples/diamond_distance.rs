//! Diamond distance between measuring channels, with the solver's certified
//! bracket and a seesaw lower bound for comparison.

use oentropy::distance::{diamond_distance, diamond_distance_with, seesaw_lower_bound, SolverOptions};
use oentropy::experiments::mixing_family;
use oentropy::qmat::random::{random_povm, rng_from_seed};

fn main() -> oentropy::Result<()> {
    for d in [2, 4, 6] {
        for lambda in [0.1, 0.3, 0.5] {
            let (_, m, ml) = mixing_family(d, lambda)?;
            let s = diamond_distance(&m, &ml, 1e-8)?;
            println!("d = {d}, lambda = {lambda}: distance {:.9} (<= lambda)", s.value);
        }
    }

    let mut rng = rng_from_seed(19);
    let m = random_povm(2, 3, &mut rng)?;
    let n = random_povm(2, 3, &mut rng)?;
    let opts = SolverOptions { record_history: true, ..SolverOptions::with_tol(1e-9) };
    let s = diamond_distance_with(&m, &n, &opts)?;
    let seesaw = seesaw_lower_bound(&m, &n, 8, 1)?;
    println!("random pair: [{:.10}, {:.10}] after {} iterations; seesaw {:.10}", s.lower, s.upper, s.iterations, seesaw);
    for g in s.history.iter().step_by(s.history.len().div_ceil(5).max(1)) {
        println!("  it {:>5}: lower {:.10} upper {:.10}", g.iteration, g.lower, g.upper);
    }
    Ok(())
}
