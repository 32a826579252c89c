// Random Gabriel graph generation, the canonical JSON file and the
// shortest-path metrics the simulator derives from a network.

use eon_dpp::graph::{gabriel_generate, shortest_path_metrics, Network, DEFAULT_DENSITY_KM2};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let net = gabriel_generate(25, DEFAULT_DENSITY_KM2, 160, 7)?;
    println!("{} vertices, {} edges, connected: {}", net.vertex_count(), net.edge_count(), net.is_connected());

    let text = net.to_json();
    let back = Network::from_json(&text)?;
    assert_eq!(back, net);
    assert_eq!(back.to_json(), text);

    let m = shortest_path_metrics(&net)?;
    println!("mean hops {:.3}, longest shortest path {:.1} km", m.alpha, m.diameter_len_km);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
