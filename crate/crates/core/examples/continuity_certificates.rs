//! Continuity certificates for observational entropy: the dimension-only
//! bound against the naive one, and the bounded-concavity sandwich.

use oentropy::bounds::{certify_naive, certify_oe_continuity, concavity_gap, omega_delta};
use oentropy::povm::refine_split;
use oentropy::qmat::random::{random_density, random_povm, random_probability, rng_from_seed};
use oentropy::qmat::trace_distance;

fn main() -> oentropy::Result<()> {
    let mut rng = rng_from_seed(11);
    let rho = random_density(4, 4, &mut rng)?;
    let sigma = random_density(4, 4, &mut rng)?;
    let od = omega_delta(&rho, &sigma)?;
    println!("trace distance {:.6} (decomposition eps {:.6})", trace_distance(&rho, &sigma)?, od.epsilon);

    // Refining a measurement leaves S_M unchanged but loosens the naive bound.
    let mut m = random_povm(4, 3, &mut rng)?;
    for round in 0..4 {
        let afw = certify_oe_continuity(&m, &rho, &sigma)?;
        let naive = certify_naive(&m, &rho, &sigma)?;
        println!(
            "round {round}: |dS| = {:.6}  afw rhs {:.6}  naive rhs {:.6}  ({} outcomes)",
            afw.quantity_lhs,
            afw.bound_rhs,
            naive.bound_rhs,
            m.len()
        );
        m = refine_split(&m);
    }

    let states = vec![rho, sigma, random_density(4, 1, &mut rng)?];
    let weights = random_probability(3, &mut rng);
    let gap = concavity_gap(&m, &states, &weights)?;
    println!(
        "concavity gap {:.6} within [0, H(lambda) = {:.6}]: {:?}",
        gap.quantity_lhs, gap.bound_rhs, gap.status
    );
    Ok(())
}
