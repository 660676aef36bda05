// Tabulate the phase function and locate its negative minimum.

use common_witness::witness::{build_plan, find_negative_phase, psi};
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<f64> {
    let group = GroupSpec::cyclic(7)?;
    let eq: Equation = "1,1,1,1".parse()?;
    let plan = build_plan(&eq, &group)?;
    println!("period {}, |X| = {}, threshold {:.6}", plan.period, plan.x_size(), plan.threshold);
    let steps = 16;
    for k in 0..=steps {
        let phi = plan.period * k as f64 / steps as f64;
        println!("{phi:8.3}  {:+.6}", psi(&plan, phi));
    }
    let best = find_negative_phase(&plan)?;
    println!("minimum {:+.6} at phi = {:.6}", best.psi, best.phi);
    Ok(best.psi)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
