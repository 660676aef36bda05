// Turn a function witness into a set witness.

use common_witness::rounding::corollary_sets;
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<f64> {
    let group = GroupSpec::cyclic(11)?;
    let eq: Equation = "1,1,1".parse()?;
    let sets = corollary_sets(&eq, &group)?;
    println!("A = {:?}", sets.rounding.members);
    println!("t(A) = {:.6}, (|A|/|G|)^3 = {:.6}", sets.achieved, sets.reference);
    println!("margin {:+.6}; size threshold {:.3e}", sets.margin, sets.corollary_constant);
    Ok(sets.margin)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
