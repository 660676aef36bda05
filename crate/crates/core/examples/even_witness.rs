// Even arity: the witness lowers t(f) + t(1 - f) below 2^(1-d).

use common_witness::witness::build_uncommon_witness;
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<f64> {
    let group = GroupSpec::cyclic(7)?;
    let eq: Equation = "1,1,1,1".parse()?;
    let w = build_uncommon_witness(&eq, &group)?;
    let c = &w.certificate;
    let sum = c.common_sum.expect("even arity reports the common sum");
    println!("t(f) + t(1-f) = {sum:.9} vs 2^-3 = 0.125");
    println!("|X| = {}, r = {}, phase {:?}", c.x_size, c.r, c.phi_star);
    Ok(sum)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
