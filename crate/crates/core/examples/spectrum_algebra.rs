// Free-spectrum sets: intersection along a path, first-fit allocation and
// the allocate/release ledger.

use eon_dpp::spectrum::{Cu, SpectrumSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a: SpectrumSet = "0-5,9-15".parse()?;
    let b: SpectrumSet = "3-11".parse()?;
    let common = a.intersect(&b);
    println!("{a} & {b} = {common}");
    assert_eq!(common.to_string(), "3-5,9-11");

    let cu = common.first_fit(3).ok_or("no room for three units")?;
    println!("first fit of 3 units: {cu}");
    assert_eq!(cu, Cu::new(3, 5));
    assert_eq!(common.first_fit(4), None);

    let mut edge = SpectrumSet::full(16);
    edge.remove(&Cu::new(4, 7))?;
    println!("after allocating 4-7: {edge}");
    assert!(edge.remove(&Cu::new(6, 8)).is_err(), "units 6-7 are already taken");
    edge.insert(&Cu::new(4, 7))?;
    assert_eq!(edge, SpectrumSet::full(16));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
