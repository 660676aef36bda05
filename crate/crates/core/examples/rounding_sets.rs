// Round a fractional function to a set without increasing the solution count.

use common_witness::rounding::{round_to_set, Mode};
use common_witness::{DenseFunction, Equation, GroupSpec, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<bool> {
    let group = GroupSpec::cyclic(8)?;
    let eq: Equation = "1,1,1".parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = DenseFunction::from_real((0..8).map(|_| rng.gen::<f64>()).collect());
    let mut ok = true;
    for mode in [Mode::Sidorenko, Mode::Common] {
        let r = round_to_set(&f, &eq, &group, mode)?;
        println!("{mode:?}: A = {:?}", r.members);
        println!("  lhs {:.6} <= rhs {:.6}  ({} moves)", r.lhs(), r.rhs(), r.iterations);
        ok &= r.verified;
    }
    Ok(ok)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
