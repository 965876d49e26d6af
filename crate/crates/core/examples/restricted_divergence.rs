//! Relative-entropy distance to a convex set of states, for one measurement
//! and for a small measurement class.

use oentropy::bounds::{certify_restricted_continuity, min_rel_entropy_to_set, restricted_divergence, ConvexStateSet};
use oentropy::qmat::random::{random_density, random_projective, rng_from_seed};
use oentropy::qmat::{DensityMatrix, Povm};

fn main() -> oentropy::Result<()> {
    let mut rng = rng_from_seed(5);
    let d = 3;
    let rho = random_density(d, 1, &mut rng)?;
    let chi = ConvexStateSet::hull(vec![
        DensityMatrix::maximally_mixed(d),
        DensityMatrix::diagonal(&[0.8, 0.1, 0.1])?,
        DensityMatrix::diagonal(&[0.1, 0.1, 0.8])?,
    ])?;

    let ms = vec![Povm::computational(d), random_projective(d, &mut rng)?, random_projective(d, &mut rng)?];
    for (k, m) in ms.iter().enumerate() {
        let v = min_rel_entropy_to_set(m, &rho, &chi, 1e-11)?;
        println!("measurement {k}: inf over hull = {:.8}", v.to_f64());
    }

    let r = restricted_divergence(&rho, &chi, &ms, 1e-9)?;
    println!(
        "class: value {:.8} (bracket gap {:.1e}), best single measurement {:.8}, mixing {:?}",
        r.value.to_f64(),
        r.gap,
        r.generator_max.to_f64(),
        r.mixing
    );

    let sigma = random_density(d, d, &mut rng)?;
    let cert = certify_restricted_continuity(&rho, &sigma, &chi, &ms, (d as f64).ln())?;
    println!("continuity: lhs {:.6} <= rhs {:.6}: {:?}", cert.quantity_lhs, cert.bound_rhs, cert.status);
    Ok(())
}
