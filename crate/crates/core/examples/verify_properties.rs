// Run the randomized property suite that backs `verify`.

use common_witness::cli::verify_suite;
use common_witness::{Equation, GroupSpec, Result, TOL};

pub fn run_example() -> Result<bool> {
    let group: GroupSpec = "Z3xZ5".parse()?;
    let eq: Equation = "1,-1,2,-2".parse()?;
    let report = verify_suite(&group, &eq, 10, 42, TOL)?;
    for p in &report.properties {
        println!("{:?}: max error {:.2e}", p.property, p.max_error);
    }
    Ok(report.passed)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
