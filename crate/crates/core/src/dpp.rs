//! Exact search for a cheapest pair of edge-disjoint, spectrum-feasible paths.
//!
//! The search runs a label-setting Dijkstra over a graph whose vertices are
//! unordered pairs of network vertices `(v1, v2)`, `v1 <= v2`. A label at a
//! pair holds one [`PathTrait`] per path: the cost of the path and the widest
//! contiguous block of units still free along it. Labels are only partially
//! ordered, so every pair keeps a set of mutually incomparable permanent and
//! tentative labels. A step extends one of the two paths by a single edge; an
//! edge already taken by an ancestor in the search tree is never taken again,
//! which keeps the two paths edge-disjoint.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::costmodel::{Cost, PathModel};
use crate::error::{Error, Result};
use crate::graph::{Arc, EdgeId, Network, VertexId};
use crate::spectrum::Cu;

/// Cost and maximal CU of a partial path.
///
/// `length_km` rides along so that extensions can be costed; it takes no part
/// in comparisons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathTrait {
    pub cost: Cost,
    pub cu: Cu,
    pub length_km: f64,
}

impl PathTrait {
    pub fn new(cost: Cost, cu: Cu) -> Self {
        PathTrait { cost, cu, length_km: 0.0 }
    }

    /// Better than or equal to: no more expensive and at least as wide.
    pub fn leq(&self, other: &PathTrait) -> bool {
        self.cost <= other.cost && self.cu.includes(&other.cu)
    }
}

pub fn trait_leq(a: &PathTrait, b: &PathTrait) -> bool {
    a.leq(b)
}

/// A vertex of the search graph. Always `v1 <= v2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SearchVertex {
    pub v1: VertexId,
    pub v2: VertexId,
}

impl SearchVertex {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        SearchVertex { v1: a.min(b), v2: a.max(b) }
    }

    pub fn is_diagonal(&self) -> bool {
        self.v1 == self.v2
    }
}

/// Traits of the path ending at `v1` (`first`) and at `v2` (`second`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionLabel {
    pub first: PathTrait,
    pub second: PathTrait,
}

impl SolutionLabel {
    pub fn leq(&self, other: &SolutionLabel) -> bool {
        self.first.leq(&other.first) && self.second.leq(&other.second)
    }

    pub fn trait_at(&self, side: Side) -> &PathTrait {
        match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        }
    }
}

pub fn label_leq(a: &SolutionLabel, b: &SolutionLabel) -> bool {
    a.leq(b)
}

/// Position of a trait inside a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::First => 0,
            Side::Second => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeState {
    Tentative,
    Permanent,
    Discarded,
}

/// Index of a node in the search tree arena.
pub type NodeHandle = usize;

#[derive(Clone, Debug)]
pub struct SearchTreeNode {
    pub vertex: SearchVertex,
    pub label: SolutionLabel,
    /// Edge taken to reach this node; `None` at the root.
    pub taken_edge: Option<EdgeId>,
    /// Trait of the parent label that the taken edge extended.
    pub extended_from: Side,
    /// Where the extended trait sits in this node's label.
    pub extended_to: Side,
    pub parent: Option<NodeHandle>,
    pub state: NodeState,
}

#[derive(Clone, Debug, Default)]
pub struct LabelSet {
    pub permanent: Vec<NodeHandle>,
    pub tentative: Vec<NodeHandle>,
}

/// Counters gathered during one search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Queue pops, stale entries included.
    pub pops: u64,
    pub stale_pops: u64,
    pub relaxations: u64,
    pub nodes_created: u64,
    pub permanent: u64,
    pub tentative_peak: u64,
    pub queue_peak: u64,
    /// Peak of permanent plus live tentative nodes.
    pub live_nodes_peak: u64,
    /// Search vertices that received at least one label.
    pub touched_vertices: u64,
    /// Peak of |P_x| + |T_x| over all search vertices.
    pub max_labels_per_vertex: u64,
}

/// Words taken by one stored label.
pub const WORDS_PER_LABEL: u64 = 15;
/// Words taken by one queue element.
pub const WORDS_PER_QUEUE_ENTRY: u64 = 2;

impl SearchStats {
    /// Memory estimate in 64-bit words.
    pub fn memory_words(&self) -> u64 {
        WORDS_PER_LABEL * self.live_nodes_peak + WORDS_PER_QUEUE_ENTRY * self.queue_peak
    }

    /// Component-wise sum for the counters and max for the peaks.
    pub fn merge(&mut self, other: &SearchStats) {
        self.pops += other.pops;
        self.stale_pops += other.stale_pops;
        self.relaxations += other.relaxations;
        self.nodes_created += other.nodes_created;
        self.permanent += other.permanent;
        self.tentative_peak = self.tentative_peak.max(other.tentative_peak);
        self.queue_peak = self.queue_peak.max(other.queue_peak);
        self.live_nodes_peak = self.live_nodes_peak.max(other.live_nodes_peak);
        self.touched_vertices = self.touched_vertices.max(other.touched_vertices);
        self.max_labels_per_vertex = self.max_labels_per_vertex.max(other.max_labels_per_vertex);
    }
}

/// Number of search-graph vertices for `n` network vertices.
pub fn search_vertex_bound(n: u64) -> u64 {
    n * (n + 1) / 2
}

/// Largest set of mutually incomparable labels one search vertex can hold.
pub fn incomparable_label_bound(omega: u64) -> u64 {
    let traits = (omega + 1) * omega / 2;
    traits * traits
}

/// One routed path with its allocated spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoutedPath {
    pub edges: Vec<EdgeId>,
    pub length_km: f64,
    pub cost: Cost,
    /// Widest CU free along the whole path when it was found.
    pub maximal_cu: Cu,
    /// Lowest-indexed CU of the required size inside `maximal_cu`.
    pub cu: Cu,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtectedPair {
    pub working: RoutedPath,
    pub protecting: RoutedPath,
    pub cost: Cost,
}

impl ProtectedPair {
    /// Orders two paths into working (cheaper) and protecting. Equal costs go
    /// to the lower first-edge id.
    pub fn from_paths<M: PathModel>(model: &M, a: RoutedPath, b: RoutedPath) -> Self {
        let cost = model.pair_cost(a.cost, b.cost);
        let a_first = match a.cost.total_cmp(&b.cost) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.edges.first() <= b.edges.first(),
        };
        let (working, protecting) = if a_first { (a, b) } else { (b, a) };
        ProtectedPair { working, protecting, cost }
    }
}

/// Builds a [`RoutedPath`] with the first-fit CU of the size the model needs.
pub(crate) fn routed_path<M: PathModel>(model: &M, edges: Vec<EdgeId>, length_km: f64, maximal_cu: Cu) -> RoutedPath {
    let units = model
        .units_required(length_km)
        .expect("an accepted path has a finite unit requirement");
    debug_assert!(units <= maximal_cu.size());
    RoutedPath {
        edges,
        length_km,
        cost: model.path_cost(length_km),
        maximal_cu,
        cu: Cu::with_size(maximal_cu.lo(), units),
    }
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    cost: Cost,
    working_lo: u32,
    protecting_lo: u32,
    seq: u64,
    node: NodeHandle,
}

impl QueueEntry {
    fn key(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.working_lo.cmp(&other.working_lo))
            .then(self.protecting_lo.cmp(&other.protecting_lo))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key(self)
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of [`DppSearch::run`].
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub pair: Option<ProtectedPair>,
    pub stats: SearchStats,
}

/// One search over a network snapshot. The network is never modified.
pub struct DppSearch<'a, M: PathModel> {
    net: &'a Network,
    model: &'a M,
    nodes: Vec<SearchTreeNode>,
    sets: HashMap<SearchVertex, LabelSet>,
    queue: BinaryHeap<QueueEntry>,
    seq: u64,
    live_tentative: u64,
    stats: SearchStats,
    audit: Option<Vec<String>>,
    last_pop_cost: Cost,
}

impl<'a, M: PathModel> DppSearch<'a, M> {
    pub fn new(net: &'a Network, model: &'a M) -> Self {
        DppSearch {
            net,
            model,
            nodes: Vec::new(),
            sets: HashMap::new(),
            queue: BinaryHeap::new(),
            seq: 0,
            live_tentative: 0,
            stats: SearchStats::default(),
            audit: None,
            last_pop_cost: 0.0,
        }
    }

    /// Checks label-set invariants on every pop and records violations; see
    /// [`DppSearch::audit_failures`].
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn audit_failures(&self) -> &[String] {
        self.audit.as_deref().unwrap_or(&[])
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn nodes(&self) -> &[SearchTreeNode] {
        &self.nodes
    }

    pub fn label_set(&self, x: SearchVertex) -> Option<&LabelSet> {
        self.sets.get(&x)
    }

    pub fn run(&mut self, s: VertexId, t: VertexId) -> Result<SearchOutcome> {
        self.net.check_vertex(s)?;
        self.net.check_vertex(t)?;
        if s == t {
            return Err(Error::SameEndpoints(s));
        }
        let pair = self.search(s, t);
        if self.audit.is_some() {
            self.audit_all_sets();
        }
        Ok(SearchOutcome { pair, stats: self.stats.clone() })
    }

    fn search(&mut self, s: VertexId, t: VertexId) -> Option<ProtectedPair> {
        let omega = self.net.omega();
        if omega == 0 {
            return None;
        }
        let whole = PathTrait::new(0.0, Cu::new(0, omega - 1));
        let root = SearchTreeNode {
            vertex: SearchVertex::new(s, s),
            label: SolutionLabel { first: whole, second: whole },
            taken_edge: None,
            extended_from: Side::First,
            extended_to: Side::First,
            parent: None,
            state: NodeState::Tentative,
        };
        self.insert_tentative(root, 0.0);

        let target = SearchVertex::new(t, t);
        let net = self.net;
        while let Some(entry) = self.queue.pop() {
            self.stats.pops += 1;
            let n = entry.node;
            if self.nodes[n].state == NodeState::Discarded {
                self.stats.stale_pops += 1;
                continue;
            }
            let x = self.nodes[n].vertex;
            self.make_permanent(n, entry.cost);
            if x == target {
                return Some(self.trace(n));
            }
            let label = self.nodes[n].label;
            for arc in net.out_arcs(x.v1) {
                self.relax(arc, x.v2, label.second, label.first, Side::First, n);
            }
            for arc in net.out_arcs(x.v2) {
                self.relax(arc, x.v1, label.first, label.second, Side::Second, n);
            }
        }
        None
    }

    fn make_permanent(&mut self, n: NodeHandle, cost: Cost) {
        let x = self.nodes[n].vertex;
        if self.audit.is_some() {
            self.audit_pop(n, cost);
        }
        let set = self.sets.get_mut(&x).expect("a queued node has a label set");
        set.tentative.retain(|&m| m != n);
        set.permanent.push(n);
        self.nodes[n].state = NodeState::Permanent;
        self.live_tentative -= 1;
        self.stats.permanent += 1;
        self.last_pop_cost = cost;
    }

    /// Extends the path with trait `extended` by `arc`, keeping the path at
    /// `fixed_vertex` with trait `fixed` as is. `from` says where `extended`
    /// sits in the parent's label.
    fn relax(
        &mut self,
        arc: Arc,
        fixed_vertex: VertexId,
        fixed: PathTrait,
        extended: PathTrait,
        from: Side,
        parent: NodeHandle,
    ) {
        self.stats.relaxations += 1;
        let net = self.net;
        let reached = arc.target;
        let length_km = extended.length_km + arc.length_km;
        let cost = self.model.path_cost(length_km);
        for cu in net.available(arc.edge).clip(&extended.cu) {
            if !self.model.decide(length_km, cu.size()) {
                continue;
            }
            let grown = PathTrait { cost, cu, length_km };
            let (vertex, label, to) = if reached < fixed_vertex {
                (
                    SearchVertex { v1: reached, v2: fixed_vertex },
                    SolutionLabel { first: grown, second: fixed },
                    Side::First,
                )
            } else if reached == fixed_vertex && !fixed.leq(&grown) {
                (
                    SearchVertex { v1: reached, v2: reached },
                    SolutionLabel { first: grown, second: fixed },
                    Side::First,
                )
            } else {
                (
                    SearchVertex { v1: fixed_vertex, v2: reached },
                    SolutionLabel { first: fixed, second: grown },
                    Side::Second,
                )
            };
            if let Some(set) = self.sets.get(&vertex) {
                let nodes = &self.nodes;
                let dominated = |h: &NodeHandle| nodes[*h].label.leq(&label);
                if set.permanent.iter().any(dominated) || set.tentative.iter().any(dominated) {
                    continue;
                }
            }
            if self.used_by_ancestors(parent, arc.edge) {
                continue;
            }
            if let Some(set) = self.sets.get_mut(&vertex) {
                let nodes = &mut self.nodes;
                let mut dropped = 0;
                set.tentative.retain(|&h| {
                    if label.leq(&nodes[h].label) {
                        nodes[h].state = NodeState::Discarded;
                        dropped += 1;
                        false
                    } else {
                        true
                    }
                });
                self.live_tentative -= dropped;
            }
            let node = SearchTreeNode {
                vertex,
                label,
                taken_edge: Some(arc.edge),
                extended_from: from,
                extended_to: to,
                parent: Some(parent),
                state: NodeState::Tentative,
            };
            let pair_cost = self.model.pair_cost(label.first.cost, label.second.cost);
            self.insert_tentative(node, pair_cost);
        }
    }

    fn used_by_ancestors(&self, from: NodeHandle, edge: EdgeId) -> bool {
        let mut cur = Some(from);
        while let Some(h) = cur {
            let node = &self.nodes[h];
            if node.taken_edge == Some(edge) {
                return true;
            }
            cur = node.parent;
        }
        false
    }

    fn insert_tentative(&mut self, node: SearchTreeNode, pair_cost: Cost) {
        let handle = self.nodes.len();
        let (work, prot) = if node.label.second.cost < node.label.first.cost {
            (node.label.second, node.label.first)
        } else {
            (node.label.first, node.label.second)
        };
        let set = self.sets.entry(node.vertex).or_default();
        set.tentative.push(handle);
        let stored = (set.permanent.len() + set.tentative.len()) as u64;
        self.nodes.push(node);
        self.seq += 1;
        self.queue.push(QueueEntry {
            cost: pair_cost,
            working_lo: work.cu.lo(),
            protecting_lo: prot.cu.lo(),
            seq: self.seq,
            node: handle,
        });
        self.live_tentative += 1;

        let st = &mut self.stats;
        st.nodes_created += 1;
        st.touched_vertices = self.sets.len() as u64;
        st.max_labels_per_vertex = st.max_labels_per_vertex.max(stored);
        st.tentative_peak = st.tentative_peak.max(self.live_tentative);
        st.queue_peak = st.queue_peak.max(self.queue.len() as u64);
        st.live_nodes_peak = st.live_nodes_peak.max(st.permanent + self.live_tentative);
    }

    /// Rebuilds the two paths ending at node `end` by walking parent links.
    pub fn trace(&self, end: NodeHandle) -> ProtectedPair {
        let label = self.nodes[end].label;
        // paths[k] is the path whose trait sits at index k of the end label;
        // slot[k] is where that trait sits in the label of the current node.
        let mut paths: [Vec<EdgeId>; 2] = [Vec::new(), Vec::new()];
        let mut slot = [0usize, 1usize];
        let mut cur = end;
        while let Some(edge) = self.nodes[cur].taken_edge {
            let node = &self.nodes[cur];
            let which = if slot[0] == node.extended_to.index() { 0 } else { 1 };
            paths[which].push(edge);
            slot[which] = node.extended_from.index();
            slot[1 - which] = 1 - node.extended_from.index();
            cur = node.parent.expect("only the root lacks a taken edge");
        }
        let [mut a, mut b] = paths;
        a.reverse();
        b.reverse();
        let first = routed_path(self.model, a, label.first.length_km, label.first.cu);
        let second = routed_path(self.model, b, label.second.length_km, label.second.cu);
        ProtectedPair::from_paths(self.model, first, second)
    }

    fn audit_pop(&mut self, n: NodeHandle, cost: Cost) {
        let mut found = Vec::new();
        let node = &self.nodes[n];
        let set = &self.sets[&node.vertex];
        if cost < self.last_pop_cost {
            found.push(format!("pop cost {cost} below previous pop {}", self.last_pop_cost));
        }
        for &p in &set.permanent {
            let other = &self.nodes[p].label;
            if other.leq(&node.label) || node.label.leq(other) {
                found.push(format!("node {n} at {:?} is comparable with permanent node {p}", node.vertex));
            }
        }
        for &m in &set.tentative {
            let other = &self.nodes[m].label;
            let c = self.model.pair_cost(other.first.cost, other.second.cost);
            if m != n && c < cost {
                found.push(format!("node {n} popped at {cost} while tentative node {m} costs {c}"));
            }
        }
        if node.vertex.is_diagonal() && node.label.second.leq(&node.label.first) && !node.label.first.leq(&node.label.second) {
            found.push(format!("diagonal node {n} has its traits out of order"));
        }
        self.audit.as_mut().expect("audit enabled").extend(found);
    }

    fn audit_all_sets(&mut self) {
        let mut found = Vec::new();
        for (x, set) in &self.sets {
            let all: Vec<NodeHandle> = set.permanent.iter().chain(&set.tentative).copied().collect();
            for &t in &set.tentative {
                for &o in &all {
                    if o != t && self.nodes[o].label.leq(&self.nodes[t].label) {
                        found.push(format!("tentative node {t} at {x:?} is dominated by node {o}"));
                    }
                }
            }
            for (i, &p) in set.permanent.iter().enumerate() {
                for &q in &set.permanent[i + 1..] {
                    let (lp, lq) = (&self.nodes[p].label, &self.nodes[q].label);
                    if lp.leq(lq) || lq.leq(lp) {
                        found.push(format!("permanent nodes {p} and {q} at {x:?} are comparable"));
                    }
                }
            }
        }
        self.audit.as_mut().expect("audit enabled").extend(found);
    }
}

/// Cheapest pair of edge-disjoint paths from `s` to `t` that both satisfy the
/// model's decision function, or `None` when no such pair exists.
pub fn dpp_search<M: PathModel>(net: &Network, s: VertexId, t: VertexId, model: &M) -> Result<Option<ProtectedPair>> {
    Ok(DppSearch::new(net, model).run(s, t)?.pair)
}
