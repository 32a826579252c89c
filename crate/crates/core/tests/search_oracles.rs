mod support;

use eon_dpp::baselines::{brute_force_pair, BruteForceBudget};
use eon_dpp::corroborate::{corroborate, exact_search, generate_case, validate_pair, CorroborationSpec, Verdict};
use eon_dpp::costmodel::Rmsa;
use eon_dpp::dpp::{dpp_search, incomparable_label_bound, search_vertex_bound, DppSearch};
use eon_dpp::Network;

#[test]
fn trap_pair_costs_eight() {
    let net = support::trap(4);
    let model = Rmsa::new(support::flat_modulation(10.0), 1);
    let pair = dpp_search(&net, 0, 3, &model).unwrap().unwrap();
    assert_eq!(pair.cost, 8.0);
    assert_eq!(pair.working.edges, vec![0, 4]);
    assert_eq!(pair.protecting.edges, vec![3, 2]);
    assert_eq!(pair.working.cu, eon_dpp::Cu::new(0, 0));
    let reference = brute_force_pair(&net, 0, 3, &model, BruteForceBudget::default()).unwrap().unwrap();
    assert_eq!(reference.cost, 8.0);
}

#[test]
fn trap_with_fragmented_spectrum() {
    // Both detours only share units 2-3, and the demand needs two units.
    let mut net = support::trap(4);
    net.set_available(3, "2-3".parse().unwrap()).unwrap();
    net.set_available(4, "0-1".parse().unwrap()).unwrap();
    let model = Rmsa::new(support::flat_modulation(10.0), 2);
    let pair = dpp_search(&net, 0, 3, &model).unwrap().unwrap();
    validate_pair(&net, &eon_dpp::Demand::new(0, 3, 2).unwrap(), &model, &pair).unwrap();
    assert_eq!(pair.cost, 16.0);
    net.set_available(4, "1-1".parse().unwrap()).unwrap();
    assert!(dpp_search(&net, 0, 3, &model).unwrap().is_none());
    assert!(brute_force_pair(&net, 0, 3, &model, BruteForceBudget::default()).unwrap().is_none());
}

#[test]
fn feasibility_rich_corpus_agrees() {
    // A long reach keeps most demands feasible, so the comparison covers
    // many found pairs rather than many empty answers.
    let spec = CorroborationSpec { searches: 3000, seed: 99, reach_scale: 20.0, ..CorroborationSpec::default() };
    let report = corroborate(&spec, &exact_search).unwrap();
    let bad: Vec<_> = report.cases.iter().filter(|c| c.verdict == Verdict::Mismatch).take(3).collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert_eq!(report.budget_exceeded, 0);
    assert!(report.exact_found > 1500, "only {} found", report.exact_found);
    assert!(report.is_clean());
}

#[test]
fn wider_spectrum_corpus_agrees() {
    let spec = CorroborationSpec {
        searches: 1000,
        seed: 5,
        omegas: vec![12, 16],
        gammas: vec![1, 4],
        min_vertices: 5,
        max_vertices: 8,
        reach_scale: 3.0,
        ..CorroborationSpec::default()
    };
    let report = corroborate(&spec, &exact_search).unwrap();
    assert_eq!(report.mismatches, 0);
    assert!(report.is_clean());
}

#[test]
fn audit_finds_no_broken_label_sets() {
    let spec = CorroborationSpec { searches: 300, seed: 17, reach_scale: 10.0, ..CorroborationSpec::default() };
    for i in 0..spec.searches {
        let case = generate_case(&spec, i).unwrap();
        let model = Rmsa::new(case.modulation, case.demand.units_g);
        let mut search = DppSearch::new(&case.network, &model).with_audit();
        let out = search.run(case.demand.src, case.demand.dst).unwrap();
        assert!(search.audit_failures().is_empty(), "case {i}: {:?}", search.audit_failures());
        let n = u64::from(case.network.vertex_count());
        assert!(out.stats.touched_vertices <= search_vertex_bound(n));
        assert!(out.stats.max_labels_per_vertex <= incomparable_label_bound(u64::from(case.network.omega())));
        if let Some(pair) = out.pair {
            validate_pair(&case.network, &case.demand, &model, &pair).unwrap();
            assert!(pair.working.cost <= pair.protecting.cost);
        }
    }
}

#[test]
fn parallel_edges_form_a_pair() {
    let mut net = Network::new(2, 4);
    net.add_edge(0, 1, 2.0).unwrap();
    net.add_edge(0, 1, 1.0).unwrap();
    net.add_edge(0, 1, 5.0).unwrap();
    let model = Rmsa::new(support::flat_modulation(10.0), 1);
    let pair = dpp_search(&net, 1, 0, &model).unwrap().unwrap();
    assert_eq!(pair.cost, 3.0);
    assert_eq!(pair.working.edges, vec![1]);
    assert_eq!(pair.protecting.edges, vec![0]);
}
