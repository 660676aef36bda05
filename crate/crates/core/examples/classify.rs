// Classify a handful of equations over a few groups.

use common_witness::rounding::{classify, Classification};
use common_witness::{Equation, GroupSpec, Result};

pub fn run_example() -> Result<Vec<Classification>> {
    let cases = [
        ("Z5", "1,1,1"),
        ("Z7", "1,1,1,1"),
        ("Z5", "1,-1,1,-1"),
        ("Z3xZ3", "1,1,-2"),
        ("Z6", "1,2,3"),
        ("Z2xZ2", "1,1,1"),
    ];
    let mut out = Vec::new();
    for (g, l) in cases {
        let group: GroupSpec = g.parse()?;
        let eq: Equation = l.parse()?;
        let verdict = classify(&eq, &group)?;
        println!("{group:<8} L = [{eq}]  {:?}", verdict.classification);
        if let Some(gap) = verdict.margins.gap {
            println!("         gap below random coloring: {gap:.6}");
        }
        out.push(verdict.classification);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
