// Groups where every element has order two use a single character.

use common_witness::fourier::deviation;
use common_witness::witness::witness_exponent2;
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<Vec<f64>> {
    let eq: Equation = "1,1,1".parse()?;
    let mut devs = Vec::new();
    for factors in [vec![2], vec![2, 2], vec![2, 2, 2]] {
        let group = GroupSpec::new(&factors)?;
        let f = witness_exponent2(&eq, &group)?;
        let dev = deviation(&f, &eq, &group)?;
        println!("{group:<10} deviation {dev:+.6} (expected {:+.6})", -1.0 / 64.0);
        devs.push(dev);
    }
    Ok(devs)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
