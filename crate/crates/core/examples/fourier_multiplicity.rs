// Count solutions two ways: directly over the kernel and through the spectrum.

use common_witness::config::multiplicity_bruteforce;
use common_witness::fourier::{deviation, dft, multiplicity_fourier};
use common_witness::{DenseFunction, Equation, GroupSpec, LinearSystem, Result};

pub fn run_example() -> Result<f64> {
    let group: GroupSpec = "Z3xZ4".parse()?;
    let eq: Equation = "1,1,-2".parse()?;
    let f = DenseFunction::from_real((0..group.size()).map(|r| ((r * 7) % 5) as f64 / 4.0).collect());

    let direct = multiplicity_bruteforce(&f, &LinearSystem::from(&eq), &group)?;
    let spectral = multiplicity_fourier(&f, &eq, &group)?;
    let spectrum = dft(&group, &f)?;
    println!("group {group}, equation [{eq}]");
    println!("mean            {:.12}", spectrum.coeffs()[0].re);
    println!("brute force     {:.12}", direct.re);
    println!("Fourier         {:.12}", spectral.re);
    println!("deviation       {:.12}", deviation(&f, &eq, &group)?);
    Ok((direct - spectral).norm())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
