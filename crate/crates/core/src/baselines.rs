//! Comparison algorithms: spectrum-aware single-path search, the
//! route-then-remove heuristic built on it, and an exhaustive path-pair
//! enumerator used as an optimality oracle.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::costmodel::{Cost, PathModel};
use crate::dpp::{routed_path, PathTrait, ProtectedPair, RoutedPath, SearchStats};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Network, VertexId};
use crate::spectrum::{Cu, SpectrumSet};

#[derive(Clone, Debug, PartialEq)]
pub struct SinglePathResult {
    pub edges: Vec<EdgeId>,
    pub length_km: f64,
    pub maximal_cu: Cu,
    pub cost: Cost,
}

impl SinglePathResult {
    fn into_routed<M: PathModel>(self, model: &M) -> RoutedPath {
        routed_path(model, self.edges, self.length_km, self.maximal_cu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Tentative,
    Permanent,
    Discarded,
}

struct Node {
    vertex: VertexId,
    path: PathTrait,
    edge: Option<EdgeId>,
    parent: Option<usize>,
    state: State,
}

#[derive(PartialEq)]
struct Entry {
    cost: Cost,
    lo: u32,
    seq: u64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.lo.cmp(&self.lo))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct SingleSearch<'s> {
    nodes: Vec<Node>,
    permanent: Vec<Vec<usize>>,
    tentative: Vec<Vec<usize>>,
    queue: BinaryHeap<Entry>,
    seq: u64,
    live_tentative: u64,
    touched: Vec<bool>,
    stats: &'s mut SearchStats,
}

impl SingleSearch<'_> {
    fn push(&mut self, node: Node) {
        let h = self.nodes.len();
        let v = node.vertex as usize;
        let (cost, lo) = (node.path.cost, node.path.cu.lo());
        self.nodes.push(node);
        self.tentative[v].push(h);
        self.touched[v] = true;
        self.seq += 1;
        self.queue.push(Entry { cost, lo, seq: self.seq, node: h });
        self.live_tentative += 1;
        let st = &mut *self.stats;
        st.nodes_created += 1;
        st.queue_peak = st.queue_peak.max(self.queue.len() as u64);
        st.tentative_peak = st.tentative_peak.max(self.live_tentative);
        st.live_nodes_peak = st.live_nodes_peak.max(st.permanent + self.live_tentative);
        let stored = (self.permanent[v].len() + self.tentative[v].len()) as u64;
        st.max_labels_per_vertex = st.max_labels_per_vertex.max(stored);
    }

    /// Skips `cand` if dominated at `w`, otherwise drops what it dominates.
    fn admit(&mut self, w: usize, cand: &PathTrait) -> bool {
        let nodes = &mut self.nodes;
        let dominated = |m: &usize| nodes[*m].path.leq(cand);
        if self.permanent[w].iter().any(dominated) || self.tentative[w].iter().any(dominated) {
            return false;
        }
        let mut dropped = 0;
        self.tentative[w].retain(|&m| {
            if cand.leq(&nodes[m].path) {
                nodes[m].state = State::Discarded;
                dropped += 1;
                false
            } else {
                true
            }
        });
        self.live_tentative -= dropped;
        true
    }

    fn path_to(&self, h: usize) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        let mut cur = h;
        while let (Some(e), Some(p)) = (self.nodes[cur].edge, self.nodes[cur].parent) {
            edges.push(e);
            cur = p;
        }
        edges.reverse();
        edges
    }
}

/// Cheapest feasible single path, keeping per vertex a set of incomparable
/// (cost, CU) traits. Edges in `excluded` are never used.
pub fn generic_dijkstra_excluding<M: PathModel>(
    net: &Network,
    s: VertexId,
    t: VertexId,
    model: &M,
    excluded: &HashSet<EdgeId>,
    stats: &mut SearchStats,
) -> Result<Option<SinglePathResult>> {
    net.check_vertex(s)?;
    net.check_vertex(t)?;
    if s == t {
        return Err(Error::SameEndpoints(s));
    }
    let omega = net.omega();
    if omega == 0 {
        return Ok(None);
    }
    let n = net.vertex_count() as usize;
    let mut search = SingleSearch {
        nodes: Vec::new(),
        permanent: vec![Vec::new(); n],
        tentative: vec![Vec::new(); n],
        queue: BinaryHeap::new(),
        seq: 0,
        live_tentative: 0,
        touched: vec![false; n],
        stats,
    };
    search.push(Node {
        vertex: s,
        path: PathTrait::new(0.0, Cu::new(0, omega - 1)),
        edge: None,
        parent: None,
        state: State::Tentative,
    });

    let mut found = None;
    while let Some(entry) = search.queue.pop() {
        search.stats.pops += 1;
        let h = entry.node;
        if search.nodes[h].state == State::Discarded {
            search.stats.stale_pops += 1;
            continue;
        }
        let v = search.nodes[h].vertex;
        search.nodes[h].state = State::Permanent;
        search.tentative[v as usize].retain(|&m| m != h);
        search.permanent[v as usize].push(h);
        search.live_tentative -= 1;
        search.stats.permanent += 1;
        if v == t {
            let path = search.nodes[h].path;
            found = Some(SinglePathResult {
                edges: search.path_to(h),
                length_km: path.length_km,
                maximal_cu: path.cu,
                cost: path.cost,
            });
            break;
        }
        let here = search.nodes[h].path;
        for arc in net.out_arcs(v) {
            if excluded.contains(&arc.edge) {
                continue;
            }
            search.stats.relaxations += 1;
            let length_km = here.length_km + arc.length_km;
            let cost = model.path_cost(length_km);
            for cu in net.available(arc.edge).clip(&here.cu) {
                if !model.decide(length_km, cu.size()) {
                    continue;
                }
                let cand = PathTrait { cost, cu, length_km };
                if search.admit(arc.target as usize, &cand) {
                    search.push(Node {
                        vertex: arc.target,
                        path: cand,
                        edge: Some(arc.edge),
                        parent: Some(h),
                        state: State::Tentative,
                    });
                }
            }
        }
    }
    let touched = search.touched.iter().filter(|&&b| b).count() as u64;
    search.stats.touched_vertices = search.stats.touched_vertices.max(touched);
    Ok(found)
}

/// Cheapest feasible single path from `s` to `t`.
pub fn generic_dijkstra_single<M: PathModel>(
    net: &Network,
    s: VertexId,
    t: VertexId,
    model: &M,
) -> Result<Option<SinglePathResult>> {
    generic_dijkstra_excluding(net, s, t, model, &HashSet::new(), &mut SearchStats::default())
}

/// Route once, drop the edges used, route again.
pub fn edge_exclusion_pair<M: PathModel>(
    net: &Network,
    s: VertexId,
    t: VertexId,
    model: &M,
) -> Result<Option<ProtectedPair>> {
    Ok(edge_exclusion_with_stats(net, s, t, model)?.0)
}

pub fn edge_exclusion_with_stats<M: PathModel>(
    net: &Network,
    s: VertexId,
    t: VertexId,
    model: &M,
) -> Result<(Option<ProtectedPair>, SearchStats)> {
    let mut stats = SearchStats::default();
    let mut excluded = HashSet::new();
    let Some(first) = generic_dijkstra_excluding(net, s, t, model, &excluded, &mut stats)? else {
        return Ok((None, stats));
    };
    excluded.extend(first.edges.iter().copied());
    let mut second_stats = SearchStats::default();
    let second = generic_dijkstra_excluding(net, s, t, model, &excluded, &mut second_stats)?;
    stats.merge(&second_stats);
    let pair = second.map(|second| {
        ProtectedPair::from_paths(model, first.into_routed(model), second.into_routed(model))
    });
    Ok((pair, stats))
}

/// Caps for [`brute_force_pair`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceBudget {
    pub max_pops: u64,
    pub max_queue: usize,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget { max_pops: 20_000_000, max_queue: 20_000_000 }
    }
}

#[derive(Clone, Debug)]
struct Partial {
    edges: Vec<EdgeId>,
    visited: Vec<VertexId>,
    at: VertexId,
    length_km: f64,
    cost: Cost,
    /// Units free on every edge of the path.
    free: SpectrumSet,
}

struct PairEntry {
    cost: Cost,
    seq: u64,
    paths: [Partial; 2],
}

impl PartialEq for PairEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PairEntry {}

impl Ord for PairEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for PairEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exhaustive enumeration of path pairs in increasing pair-cost order.
///
/// Each popped pair is extended by one unused edge on either path, skipping
/// loops and any extension whose free spectrum can no longer satisfy the
/// model. The first pair with both paths at `t` is optimal. Intended for tiny
/// networks only.
pub fn brute_force_pair<M: PathModel>(
    net: &Network,
    s: VertexId,
    t: VertexId,
    model: &M,
    budget: BruteForceBudget,
) -> Result<Option<ProtectedPair>> {
    net.check_vertex(s)?;
    net.check_vertex(t)?;
    if s == t {
        return Err(Error::SameEndpoints(s));
    }
    let empty = Partial {
        edges: Vec::new(),
        visited: vec![s],
        at: s,
        length_km: 0.0,
        cost: 0.0,
        free: SpectrumSet::full(net.omega()),
    };
    if empty.free.is_empty() {
        return Ok(None);
    }
    let mut seen: HashSet<(Vec<EdgeId>, Vec<EdgeId>)> = HashSet::new();
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    queue.push(PairEntry { cost: 0.0, seq, paths: [empty.clone(), empty] });
    let mut pops = 0u64;
    while let Some(PairEntry { paths, .. }) = queue.pop() {
        pops += 1;
        if pops > budget.max_pops || queue.len() > budget.max_queue {
            return Err(Error::BudgetExceeded { pops });
        }
        if paths[0].at == t && paths[1].at == t {
            let [a, b] = paths;
            return Ok(Some(ProtectedPair::from_paths(model, finish(model, a), finish(model, b))));
        }
        for side in 0..2 {
            let this = &paths[side];
            let other = &paths[1 - side];
            if this.at == t {
                continue;
            }
            for arc in net.out_arcs(this.at) {
                if this.edges.contains(&arc.edge) || other.edges.contains(&arc.edge) {
                    continue;
                }
                if this.visited.contains(&arc.target) {
                    continue;
                }
                let free = this.free.intersect(net.available(arc.edge));
                let length_km = this.length_km + arc.length_km;
                if !model.decide(length_km, free.largest_run()) {
                    continue;
                }
                let mut grown = this.clone();
                grown.edges.push(arc.edge);
                grown.visited.push(arc.target);
                grown.at = arc.target;
                grown.length_km = length_km;
                grown.cost = model.path_cost(length_km);
                grown.free = free;

                let key = if grown.edges <= other.edges {
                    (grown.edges.clone(), other.edges.clone())
                } else {
                    (other.edges.clone(), grown.edges.clone())
                };
                if !seen.insert(key) {
                    continue;
                }
                let cost = model.pair_cost(grown.cost, other.cost);
                let pair = if side == 0 { [grown, other.clone()] } else { [other.clone(), grown] };
                seq += 1;
                queue.push(PairEntry { cost, seq, paths: pair });
            }
        }
    }
    Ok(None)
}

fn finish<M: PathModel>(model: &M, p: Partial) -> RoutedPath {
    let units = model.units_required(p.length_km).expect("accepted path has a finite requirement");
    let cu = p.free.first_fit(units).expect("accepted path has room for its units");
    let maximal_cu = p
        .free
        .runs()
        .iter()
        .copied()
        .find(|r| r.includes(&cu))
        .expect("first fit lies in a run");
    RoutedPath { edges: p.edges, length_km: p.length_km, cost: p.cost, maximal_cu, cu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::{ModulationModel, Rmsa};

    fn unit_model(g: u32) -> Rmsa {
        Rmsa::new(ModulationModel::new(1, 1e6).unwrap(), g)
    }

    #[test]
    fn single_edge_single_path() {
        let mut net = Network::new(2, 4);
        net.add_edge(0, 1, 3.0).unwrap();
        let r = generic_dijkstra_single(&net, 0, 1, &unit_model(1)).unwrap().unwrap();
        assert_eq!(r.edges, vec![0]);
        assert_eq!(r.cost, 3.0);
        assert_eq!(r.maximal_cu, Cu::new(0, 3));
    }

    #[test]
    fn blocked_short_route_falls_back_to_long_one() {
        let mut net = Network::new(3, 4);
        net.add_edge_with(0, 2, 1.0, "0".parse().unwrap()).unwrap();
        net.add_edge(0, 1, 1.0).unwrap();
        net.add_edge(1, 2, 1.0).unwrap();
        let r = generic_dijkstra_single(&net, 0, 2, &unit_model(2)).unwrap().unwrap();
        assert_eq!(r.edges, vec![1, 2]);
        assert_eq!(r.cost, 4.0);
        let r1 = generic_dijkstra_single(&net, 0, 2, &unit_model(1)).unwrap().unwrap();
        assert_eq!(r1.edges, vec![0]);
    }

    #[test]
    fn unreachable_target() {
        let mut net = Network::new(3, 4);
        net.add_edge(0, 1, 1.0).unwrap();
        assert!(generic_dijkstra_single(&net, 0, 2, &unit_model(1)).unwrap().is_none());
        assert!(generic_dijkstra_single(&net, 0, 0, &unit_model(1)).is_err());
    }

    #[test]
    fn single_edge_pair_is_absent() {
        let mut net = Network::new(2, 4);
        net.add_edge(0, 1, 1.0).unwrap();
        assert!(edge_exclusion_pair(&net, 0, 1, &unit_model(1)).unwrap().is_none());
        let bf = brute_force_pair(&net, 0, 1, &unit_model(1), BruteForceBudget::default()).unwrap();
        assert!(bf.is_none());
    }

    #[test]
    fn parallel_edges_give_a_pair() {
        let mut net = Network::new(2, 4);
        net.add_edge(0, 1, 1.0).unwrap();
        net.add_edge(0, 1, 2.0).unwrap();
        let ee = edge_exclusion_pair(&net, 0, 1, &unit_model(1)).unwrap().unwrap();
        assert_eq!((ee.working.edges.clone(), ee.protecting.edges.clone()), (vec![0], vec![1]));
        let bf = brute_force_pair(&net, 0, 1, &unit_model(1), BruteForceBudget::default()).unwrap().unwrap();
        assert_eq!(bf.cost, 3.0);
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let mut net = Network::new(3, 4);
        net.add_edge(0, 1, 1.0).unwrap();
        net.add_edge(1, 2, 1.0).unwrap();
        net.add_edge(0, 2, 1.0).unwrap();
        let tiny = BruteForceBudget { max_pops: 1, max_queue: 100 };
        assert!(matches!(
            brute_force_pair(&net, 0, 2, &unit_model(1), tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
