// How path length turns into spectrum: units per modulation reach, the
// bitrate conversion and the arrival rate behind an offered load.

use eon_dpp::costmodel::{path_cost, units_from_bitrate, units_needed, ModulationModel};
use eon_dpp::sim::arrival_rate;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = ModulationModel::new(4, 1600.0)?;
    println!("reach {} km down to {} km", m.reach_r1_km(), m.reach_rm_km());
    for d in [100.0, 200.0, 400.0, 800.0, 1600.0, 1700.0] {
        match units_needed(10, d, &m) {
            Some(u) => println!("{d:>6} km: {u:>2} units, cost {}", path_cost(d, 10, &m)),
            None => println!("{d:>6} km: out of reach"),
        }
    }
    assert_eq!(units_needed(10, 2.0 * m.reach_rm_km(), &m), Some(20));

    println!("100 Gb/s at 2.5 Gb/s per unit, 4 levels, 1 guard: {} units", units_from_bitrate(100.0, 2.5, 4, 1));
    println!("arrival rate for a = 1: {} per day", arrival_rate(1.0, 10, 160, 10.0, 10.0, 2.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
