//! Observational entropy of a random qutrit under a coarse measurement, and
//! its relation to the measured relative entropy against the maximally mixed state.

use oentropy::entropy::{measured_relative_entropy, observational_entropy, von_neumann, LogBase};
use oentropy::qmat::random::{random_density, random_povm, rng_from_seed};
use oentropy::qmat::{DensityMatrix, Povm};

fn main() -> oentropy::Result<()> {
    let mut rng = rng_from_seed(7);
    let rho = random_density(3, 2, &mut rng)?;

    for (name, m) in [("computational", Povm::computational(3)), ("random", random_povm(3, 2, &mut rng)?), ("trivial", Povm::trivial(3))] {
        let oe = observational_entropy(&m, &rho)?;
        let bits = oe.converted(LogBase::Bits);
        println!(
            "{name:>13}: S_M = {:.6} nats ({:.6} bits), shannon {:.6}, boltzmann {:.6}",
            oe.total, bits.total, oe.shannon_term, oe.boltzmann_term
        );
        let d = measured_relative_entropy(&m, &rho, &DensityMatrix::maximally_mixed(3))?.to_f64();
        println!("{:>13}  log d - S_M = {:.12}, D_M(rho || 1/d) = {:.12}", "", 3f64.ln() - oe.total, d);
    }
    println!("von Neumann entropy, a lower bound for every S_M: {:.6}", von_neumann(&rho)?);
    Ok(())
}
