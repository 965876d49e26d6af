//! The mixing family: a projective qudit measurement blended with its
//! relabeling. Observational entropy jumps far above the concavity budget.

use oentropy::experiments::{concavity_violation_demo, decade_dims, example1_sweep, no_go_scan};

fn main() -> oentropy::Result<()> {
    let lambdas: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    println!("{:>3} {:>6} {:>12} {:>12} {:>10}", "d", "lambda", "S_lambda", "afw rhs", "S/log d");
    for r in example1_sweep(&[2, 6], &lambdas)? {
        println!("{:>3} {:>6.2} {:>12.9} {:>12.9} {:>10.6}", r.d, r.lambda, r.s_numeric, r.afw_rhs, r.ratio_to_logd);
    }

    let scan = no_go_scan(0.05, &decade_dims(1e15), 0.9)?;
    for r in &scan.rows {
        println!("d = {:.0e}: S/log d = {:.6}", r.d, r.ratio);
    }
    println!("first d above 0.9: {:?}", scan.first_above);

    let demo = concavity_violation_demo(1024, 0.5)?;
    println!("d = 1024: gap {:.6} vs h(1/2) = {:.6}, status {:?}", demo.quantity_lhs, demo.bound_rhs, demo.status);
    Ok(())
}
