// The exact search against the edge-exclusion heuristic on the trap
// topology, where removing the shortest path disconnects the endpoints.

use eon_dpp::baselines::{brute_force_pair, edge_exclusion_pair, BruteForceBudget};
use eon_dpp::costmodel::{ModulationModel, Rmsa};
use eon_dpp::{dpp_search, Network};

/// s=0, a=1, b=2, t=3.
pub fn trap() -> Network {
    let mut net = Network::new(4, 8);
    for (u, v, len) in [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 2, 3.0), (1, 3, 3.0)] {
        net.add_edge(u, v, len).expect("valid edge");
    }
    net
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let net = trap();
    // Reach long enough that every path runs at the most efficient modulation.
    let model = Rmsa::new(ModulationModel::new(4, 800.0)?, 1);

    let pair = dpp_search(&net, 0, 3, &model)?.ok_or("exact search found nothing")?;
    println!(
        "exact: cost {} working {:?} in {} protecting {:?} in {}",
        pair.cost, pair.working.edges, pair.working.cu, pair.protecting.edges, pair.protecting.cu
    );
    assert_eq!(pair.cost, 8.0);

    let heuristic = edge_exclusion_pair(&net, 0, 3, &model)?;
    println!("edge exclusion: {:?}", heuristic.as_ref().map(|p| p.cost));
    assert!(heuristic.is_none());

    let reference = brute_force_pair(&net, 0, 3, &model, BruteForceBudget::default())?;
    assert_eq!(reference.map(|p| p.cost), Some(8.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
