// Build a function with fewer solutions than a random coloring, odd arity.

use common_witness::witness::build_uncommon_witness;
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<f64> {
    let group = GroupSpec::cyclic(5)?;
    let eq: Equation = "1,1,1".parse()?;
    let w = build_uncommon_witness(&eq, &group)?;
    let c = &w.certificate;
    println!("f = {:?}", w.function.real_values());
    println!("t(f) = {:.9} vs (1/2)^3 = 0.125", c.multiplicity);
    println!("deviation {:.9}, guaranteed at most {:.9}", c.deviation, -c.delta_tight);
    println!("verified: {}", c.verified);
    Ok(c.multiplicity)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
