// Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use eon_dpp::costmodel::{ModulationModel, PathModel, Rmsa};
use eon_dpp::dpp::{label_leq, trait_leq, PathTrait, SolutionLabel};
use eon_dpp::graph::Network;
use eon_dpp::spectrum::{Cu, SpectrumSet};

pub const OMEGA: u32 = 24;

/// Spectrum as a plain set of unit indices.
pub type Units = BTreeSet<u32>;

pub fn units_of(set: &SpectrumSet) -> Units {
    set.units().collect()
}

pub fn cu_units(cu: &Cu) -> Units {
    (cu.lo()..=cu.hi()).collect()
}

/// Maximal runs of consecutive units.
pub fn runs_of(units: &Units) -> Vec<(u32, u32)> {
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &u in units {
        match runs.last_mut() {
            Some(r) if r.1 + 1 == u => r.1 = u,
            _ => runs.push((u, u)),
        }
    }
    runs
}

pub fn first_fit_oracle(units: &Units, k: u32) -> Option<(u32, u32)> {
    (0..OMEGA).find(|&lo| (lo..lo + k).all(|u| units.contains(&u))).map(|lo| (lo, lo + k - 1))
}

pub fn cu_strategy() -> impl Strategy<Value = Cu> {
    (0..OMEGA, 1..=OMEGA).prop_map(|(lo, size)| Cu::new(lo, (lo + size - 1).min(OMEGA - 1)))
}

pub fn units_strategy() -> impl Strategy<Value = Units> {
    prop_oneof![
        proptest::collection::btree_set(0..OMEGA, 0..OMEGA as usize),
        proptest::collection::vec(cu_strategy(), 0..4).prop_map(|cus| cus.iter().flat_map(cu_units).collect()),
    ]
}

fn check_spectrum(a: Units, b: Units, cu: Cu, k: u32) -> Result<(), TestCaseError> {
    let sa = SpectrumSet::from_units(a.iter().copied());
    let sb = SpectrumSet::from_units(b.iter().copied());
    prop_assert!(sa.is_well_formed());
    prop_assert_eq!(&units_of(&sa), &a);
    let runs: Vec<(u32, u32)> = sa.runs().iter().map(|c| (c.lo(), c.hi())).collect();
    prop_assert_eq!(&runs, &runs_of(&a));

    let both = sa.intersect(&sb);
    prop_assert!(both.is_well_formed());
    prop_assert_eq!(units_of(&both), a.intersection(&b).copied().collect::<Units>());
    prop_assert_eq!(&both, &sb.intersect(&sa));
    prop_assert_eq!(&sa.intersect(&sa), &sa);

    let merged = SpectrumSet::from_cus(sa.runs().iter().chain(sb.runs()).copied());
    prop_assert_eq!(units_of(&merged), a.union(&b).copied().collect::<Units>());

    let ff = sa.first_fit(k).map(|c| (c.lo(), c.hi()));
    prop_assert_eq!(ff, first_fit_oracle(&a, k));
    let widest = runs_of(&a).iter().map(|r| r.1 - r.0 + 1).max().unwrap_or(0);
    prop_assert_eq!(sa.largest_run(), widest);

    let inside = cu_units(&cu);
    let clipped: Vec<(u32, u32)> = sa.clip(&cu).map(|c| (c.lo(), c.hi())).collect();
    prop_assert_eq!(&clipped, &runs_of(&a.intersection(&inside).copied().collect()));
    prop_assert_eq!(sa.contains_cu(&cu), inside.is_subset(&a));
    prop_assert_eq!(sa.is_disjoint_from_cu(&cu), inside.is_disjoint(&a));

    match sa.subtract(&cu) {
        Ok(rest) => {
            prop_assert!(inside.is_subset(&a));
            prop_assert_eq!(units_of(&rest), a.difference(&inside).copied().collect::<Units>());
            prop_assert_eq!(&rest.add(&cu).unwrap(), &sa);
        }
        Err(_) => prop_assert!(!inside.is_subset(&a)),
    }
    match sa.add(&cu) {
        Ok(more) => {
            prop_assert!(inside.is_disjoint(&a));
            prop_assert_eq!(units_of(&more), a.union(&inside).copied().collect::<Units>());
        }
        Err(_) => prop_assert!(!inside.is_disjoint(&a)),
    }

    let text = sa.to_string();
    prop_assert_eq!(&text.parse::<SpectrumSet>().unwrap(), &sa);
    Ok(())
}

fn check_cu(a: Cu, b: Cu) -> Result<(), TestCaseError> {
    let (ua, ub) = (cu_units(&a), cu_units(&b));
    prop_assert_eq!(a.includes(&b), ub.is_subset(&ua));
    prop_assert_eq!(a.incomparable(&b), !ub.is_subset(&ua) && !ua.is_subset(&ub));
    let meet = a.intersect(&b).map(|c| cu_units(&c)).unwrap_or_default();
    prop_assert_eq!(meet, ua.intersection(&ub).copied().collect::<Units>());
    Ok(())
}

/// Spectrum algebra against the per-unit membership oracle.
pub fn spectrum_laws(cases: u32) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&(units_strategy(), units_strategy(), cu_strategy(), 1..=OMEGA), |(a, b, cu, k)| check_spectrum(a, b, cu, k))
        .map_err(|e| e.to_string())?;
    runner.run(&(cu_strategy(), cu_strategy()), |(a, b)| check_cu(a, b)).map_err(|e| e.to_string())
}

pub fn trait_strategy(omega: u32) -> impl Strategy<Value = PathTrait> {
    (0u32..6, 0..omega, 1..=omega).prop_map(move |(c, lo, size)| {
        PathTrait::new(f64::from(c), Cu::new(lo, (lo + size - 1).min(omega - 1)))
    })
}

fn label_strategy() -> impl Strategy<Value = SolutionLabel> {
    (trait_strategy(6), trait_strategy(6)).prop_map(|(first, second)| SolutionLabel { first, second })
}

fn trait_oracle(a: &PathTrait, b: &PathTrait) -> bool {
    a.cost <= b.cost && cu_units(&b.cu).is_subset(&cu_units(&a.cu))
}

fn check_labels(a: SolutionLabel, b: SolutionLabel, c: SolutionLabel) -> Result<(), TestCaseError> {
    for (x, y) in [(&a.first, &b.first), (&a.second, &c.second), (&b.first, &c.second)] {
        prop_assert_eq!(trait_leq(x, y), trait_oracle(x, y));
    }
    prop_assert!(label_leq(&a, &a));
    if label_leq(&a, &b) && label_leq(&b, &a) {
        prop_assert_eq!(a.first.cost, b.first.cost);
        prop_assert_eq!(a.first.cu, b.first.cu);
        prop_assert_eq!(a.second.cost, b.second.cost);
        prop_assert_eq!(a.second.cu, b.second.cu);
    }
    if label_leq(&a, &b) && label_leq(&b, &c) {
        prop_assert!(label_leq(&a, &c));
    }
    prop_assert_eq!(
        label_leq(&a, &b),
        trait_oracle(&a.first, &b.first) && trait_oracle(&a.second, &b.second)
    );
    Ok(())
}

/// A set of pairwise incomparable traits holds at most one trait per CU.
fn check_trait_antichain(traits: Vec<PathTrait>, omega: u32) -> Result<(), TestCaseError> {
    let mut chain: Vec<PathTrait> = Vec::new();
    for t in traits {
        if chain.iter().any(|c| trait_leq(c, &t)) {
            continue;
        }
        chain.retain(|c| !trait_leq(&t, c));
        chain.push(t);
    }
    let cus: BTreeSet<Cu> = chain.iter().map(|t| t.cu).collect();
    prop_assert_eq!(cus.len(), chain.len());
    prop_assert!(chain.len() as u64 <= u64::from(omega * (omega + 1) / 2));
    Ok(())
}

/// Partial-order laws for traits and labels.
pub fn label_laws(cases: u32) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&(label_strategy(), label_strategy(), label_strategy()), |(a, b, c)| check_labels(a, b, c))
        .map_err(|e| e.to_string())?;
    runner
        .run(&proptest::collection::vec(trait_strategy(4), 0..40), |ts| check_trait_antichain(ts, 4))
        .map_err(|e| e.to_string())
}

/// Gabriel edges by the angle test: the pair is blocked when some third point
/// sees it at an obtuse angle.
pub fn gabriel_edges_oracle(points: &[(f64, f64)]) -> BTreeSet<(u32, u32)> {
    let n = points.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let blocked = (0..n).filter(|&k| k != i && k != j).any(|k| {
                let (p, a, b) = (points[k], points[i], points[j]);
                (a.0 - p.0) * (b.0 - p.0) + (a.1 - p.1) * (b.1 - p.1) < 0.0
            });
            if !blocked {
                edges.insert((i as u32, j as u32));
            }
        }
    }
    edges
}

pub fn edge_set(net: &Network) -> BTreeSet<(u32, u32)> {
    net.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect()
}

/// All-pairs `(length, hops)` by Floyd-Warshall.
pub fn floyd_warshall(net: &Network) -> Vec<Vec<(f64, u32)>> {
    let n = net.vertex_count() as usize;
    let mut d = vec![vec![(f64::INFINITY, 0u32); n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = (0.0, 0);
    }
    for e in net.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        if e.length_km < d[u][v].0 {
            d[u][v] = (e.length_km, 1);
            d[v][u] = (e.length_km, 1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].0 + d[k][j].0;
                if via < d[i][j].0 {
                    d[i][j] = (via, d[i][k].1 + d[k][j].1);
                }
            }
        }
    }
    d
}

/// Shortest length between `s` and `t` using only edges where `cu` is free.
pub fn filtered_shortest(net: &Network, s: u32, t: u32, cu: &Cu) -> Option<f64> {
    let n = net.vertex_count() as usize;
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0.0;
    heap.push(Reverse((OrdF64(0.0), s)));
    while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for arc in net.out_arcs(v) {
            if !net.available(arc.edge).contains_cu(cu) {
                continue;
            }
            let nd = d + arc.length_km;
            if nd < dist[arc.target as usize] {
                dist[arc.target as usize] = nd;
                heap.push(Reverse((OrdF64(nd), arc.target)));
            }
        }
    }
    dist[t as usize].is_finite().then_some(dist[t as usize])
}

#[derive(Clone, Copy, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Cheapest single-path cost by scanning every CU over the filtered graph.
pub fn single_path_oracle(net: &Network, s: u32, t: u32, model: &Rmsa) -> Option<f64> {
    let omega = net.omega();
    let mut best: Option<f64> = None;
    for lo in 0..omega {
        for hi in lo..omega {
            let cu = Cu::new(lo, hi);
            if let Some(len) = filtered_shortest(net, s, t, &cu) {
                if model.decide(len, cu.size()) {
                    let c = model.path_cost(len);
                    best = Some(best.map_or(c, |b: f64| b.min(c)));
                }
            }
        }
    }
    best
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Modulation where every path shorter than `max_km` needs exactly `g` units.
pub fn flat_modulation(max_km: f64) -> ModulationModel {
    ModulationModel::new(4, 8.0 * max_km).expect("valid reach")
}

/// The trap topology: s=0, a=1, b=2, t=3.
pub fn trap(omega: u32) -> Network {
    let mut net = Network::new(4, omega);
    for (u, v, len) in [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 2, 3.0), (1, 3, 3.0)] {
        net.add_edge(u, v, len).expect("valid edge");
    }
    net
}
