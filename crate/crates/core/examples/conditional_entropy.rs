//! Conditional observational entropy of a two-qubit state: closed form,
//! divergence form, the variational characterization and its continuity bound.

use oentropy::bounds::{certify_conditional_continuity, conditional_oe, conditional_oe_by_definition, conditional_oe_variational_check};
use oentropy::qmat::random::{random_density, rng_from_seed};
use oentropy::qmat::Povm;

fn main() -> oentropy::Result<()> {
    let mut rng = rng_from_seed(3);
    let (d_a, d_b) = (2, 2);
    let m_a = Povm::computational(d_a);
    let rho = random_density(d_a * d_b, 2, &mut rng)?;

    let closed = conditional_oe(&m_a, &rho, d_a, d_b)?;
    let defined = conditional_oe_by_definition(&m_a, &rho, d_a, d_b)?.to_f64();
    println!("S(A|B) closed form {closed:.12}, by definition {defined:.12}");

    let trials = (0..50).map(|_| random_density(d_b, d_b, &mut rng)).collect::<oentropy::Result<Vec<_>>>()?;
    let v = conditional_oe_variational_check(&m_a, &rho, d_a, d_b, &trials)?;
    println!("variational: saturated at rho_B {:.12}, best of {} trials {:?}, ok = {}", v.saturated, v.trials, v.best_trial, v.passed);

    let sigma = random_density(d_a * d_b, 4, &mut rng)?;
    let r = certify_conditional_continuity(&m_a, &rho, &sigma, d_a, d_b)?;
    println!("continuity: lhs {:.6} <= rhs {:.6} (eps {:.4}, kappa = log d_A)", r.quantity_lhs, r.bound_rhs, r.epsilon);
    Ok(())
}
