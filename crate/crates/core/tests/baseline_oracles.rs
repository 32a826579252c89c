mod support;

use std::collections::HashSet;

use eon_dpp::baselines::{edge_exclusion_pair, generic_dijkstra_excluding, generic_dijkstra_single};
use eon_dpp::costmodel::{ModulationModel, PathModel, Rmsa};
use eon_dpp::dpp::SearchStats;
use eon_dpp::graph::{gabriel_generate, shortest_path_metrics, DEFAULT_DENSITY_KM2};
use eon_dpp::spectrum::SpectrumSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{close, single_path_oracle};

fn loaded(seed: u64, n: u32, omega: u32, keep: f64) -> eon_dpp::Network {
    let mut net = gabriel_generate(n, DEFAULT_DENSITY_KM2, omega, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for e in 0..net.edge_count() as u32 {
        let units: Vec<u32> = (0..omega).filter(|_| rng.random_bool(keep)).collect();
        net.set_available(e, SpectrumSet::from_units(units)).unwrap();
    }
    net
}

#[test]
fn single_path_matches_cu_scan() {
    let mut found = 0;
    for seed in 0..300 {
        let net = loaded(seed, 10, 8, 0.75);
        let d = shortest_path_metrics(&net).unwrap().diameter_len_km;
        let g = 1 + (seed % 3) as u32;
        let model = Rmsa::new(ModulationModel::from_diameter(d, 4).unwrap(), g);
        let (s, t) = ((seed % 10) as u32, ((seed / 10 + 1 + seed) % 10) as u32);
        if s == t {
            continue;
        }
        let got = generic_dijkstra_single(&net, s, t, &model).unwrap();
        let want = single_path_oracle(&net, s, t, &model);
        match (&got, want) {
            (None, None) => {}
            (Some(p), Some(c)) => {
                found += 1;
                assert!(close(p.cost, c), "seed {seed}: {} vs {c}", p.cost);
                let len = net.path_length(&p.edges);
                assert!(model.decide(len, p.maximal_cu.size()));
                assert!(p.edges.iter().all(|&e| net.available(e).contains_cu(&p.maximal_cu)));
            }
            _ => panic!("seed {seed}: search {:?} oracle {want:?}", got.map(|p| p.cost)),
        }
    }
    assert!(found > 50, "only {found} feasible cases");
}

#[test]
fn excluded_edges_are_never_used() {
    for seed in 0..100 {
        let net = loaded(seed, 9, 8, 0.9);
        let model = Rmsa::new(support::flat_modulation(1e6), 1);
        let excluded: HashSet<u32> = (0..net.edge_count() as u32).filter(|e| e % 3 == (seed % 3) as u32).collect();
        let mut stats = SearchStats::default();
        if let Some(p) = generic_dijkstra_excluding(&net, 0, 8, &model, &excluded, &mut stats).unwrap() {
            assert!(p.edges.iter().all(|e| !excluded.contains(e)));
            assert!(stats.pops > 0);
        }
    }
}

#[test]
fn edge_exclusion_pairs_are_disjoint() {
    for seed in 0..200 {
        let net = loaded(seed, 10, 8, 0.8);
        let d = shortest_path_metrics(&net).unwrap().diameter_len_km;
        let model = Rmsa::new(ModulationModel::from_diameter(d, 4).unwrap(), 1);
        if let Some(pair) = edge_exclusion_pair(&net, 0, 9, &model).unwrap() {
            let a: HashSet<_> = pair.working.edges.iter().collect();
            assert!(pair.protecting.edges.iter().all(|e| !a.contains(e)));
            assert!(pair.working.cost <= pair.protecting.cost);
            assert!(close(pair.cost, pair.working.cost + pair.protecting.cost));
        }
    }
}

#[test]
fn trap_defeats_edge_exclusion() {
    let net = support::trap(4);
    let model = Rmsa::new(support::flat_modulation(10.0), 1);
    assert!(edge_exclusion_pair(&net, 0, 3, &model).unwrap().is_none());
    let first = generic_dijkstra_single(&net, 0, 3, &model).unwrap().unwrap();
    assert_eq!(first.edges, vec![0, 1, 2]);
    assert_eq!(first.cost, 3.0);
}
