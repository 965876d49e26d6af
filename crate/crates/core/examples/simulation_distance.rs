//! Simulation distance between POVMs: how far classical postprocessing of one
//! measurement gets from the other.

use oentropy::distance::{one_way_sim_distance, sim_distance};
use oentropy::povm::{postprocess, refine_split, StochasticMap};
use oentropy::qmat::random::{random_povm, rng_from_seed};
use oentropy::qmat::Povm;

fn main() -> oentropy::Result<()> {
    let trivial = Povm::trivial(2);
    let proj = Povm::computational(2);
    let fwd = one_way_sim_distance(&trivial, &proj, 1e-7)?;
    let back = one_way_sim_distance(&proj, &trivial, 1e-7)?;
    println!("trivial -> projective {:.8}, projective -> trivial {:.8}", fwd.value, back.value);
    println!("symmetrized {:.8}", sim_distance(&trivial, &proj, 1e-7)?.value);

    let mut rng = rng_from_seed(23);
    let m = random_povm(2, 3, &mut rng)?;
    let coarse = postprocess(&StochasticMap::merge(3), &m)?;
    println!("refinement {:.2e}", sim_distance(&m, &refine_split(&m), 1e-7)?.value);
    let down = one_way_sim_distance(&m, &coarse, 1e-7)?;
    let up = one_way_sim_distance(&coarse, &m, 1e-7)?;
    println!("to coarse-graining {:.2e}, back {:.6}", down.value, up.value);
    println!("best map from M to its coarse-graining: {:?}", down.best_map.entries());
    Ok(())
}
