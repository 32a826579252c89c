//! Network model.
//!
//! The topology is undirected: every [`EdgeRecord`] is visible as one arc from
//! each of its endpoints, and both directions share one available-units set.
//! Parallel edges are allowed and are told apart by id.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectrum::{Cu, SpectrumSet};

pub type VertexId = u32;
pub type EdgeId = u32;

/// Vertex density used for generated topologies: one vertex per 10 000 km².
pub const DEFAULT_DENSITY_KM2: f64 = 10_000.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length_km: f64,
    pub available: SpectrumSet,
}

impl EdgeRecord {
    /// The endpoint opposite `from`.
    pub fn other(&self, from: VertexId) -> VertexId {
        if from == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// One direction of an edge, as seen from its tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub edge: EdgeId,
    pub target: VertexId,
    pub length_km: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    omega: u32,
    vertex_count: u32,
    coordinates: Option<Vec<(f64, f64)>>,
    edges: Vec<EdgeRecord>,
    // (edge id, neighbour) per vertex, ascending edge id
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
}

impl Network {
    pub fn new(vertex_count: u32, omega: u32) -> Self {
        Network {
            omega,
            vertex_count,
            coordinates: None,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); vertex_count as usize],
        }
    }

    /// Adds an undirected edge with the full spectrum available.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, length_km: f64) -> Result<EdgeId> {
        let available = SpectrumSet::full(self.omega);
        self.add_edge_with(u, v, length_km, available)
    }

    pub fn add_edge_with(
        &mut self,
        u: VertexId,
        v: VertexId,
        length_km: f64,
        available: SpectrumSet,
    ) -> Result<EdgeId> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidNetwork(format!("self-loop at vertex {u}")));
        }
        if !(length_km > 0.0 && length_km.is_finite()) {
            return Err(Error::InvalidNetwork(format!("edge {u}-{v} has length {length_km}")));
        }
        if available.runs().last().is_some_and(|r| r.hi() >= self.omega) {
            return Err(Error::InvalidNetwork(format!(
                "edge {u}-{v} lists units beyond omega = {}",
                self.omega
            )));
        }
        let id = self.edges.len() as EdgeId;
        self.edges.push(EdgeRecord { id, u, v, length_km, available });
        self.adjacency[u as usize].push((id, v));
        self.adjacency[v as usize].push((id, u));
        Ok(id)
    }

    pub fn set_coordinates(&mut self, coords: Vec<(f64, f64)>) -> Result<()> {
        if coords.len() != self.vertex_count as usize {
            return Err(Error::InvalidNetwork(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.vertex_count
            )));
        }
        self.coordinates = Some(coords);
        Ok(())
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeRecord {
        &self.edges[id as usize]
    }

    pub fn coordinates(&self) -> Option<&[(f64, f64)]> {
        self.coordinates.as_deref()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Arcs leaving `v`, one per incident edge, in ascending edge id.
    ///
    /// Panics if `v` is not a vertex of the network.
    pub fn out_arcs(&self, v: VertexId) -> impl Iterator<Item = Arc> + '_ {
        assert!(v < self.vertex_count, "vertex {v} does not exist");
        self.adjacency[v as usize].iter().map(move |&(edge, target)| Arc {
            edge,
            target,
            length_km: self.edges[edge as usize].length_km,
        })
    }

    pub fn available(&self, edge: EdgeId) -> &SpectrumSet {
        &self.edges[edge as usize].available
    }

    /// Replaces the available set of one edge.
    pub fn set_available(&mut self, edge: EdgeId, available: SpectrumSet) -> Result<()> {
        if available.runs().last().is_some_and(|r| r.hi() >= self.omega) {
            return Err(Error::InvalidNetwork(format!("units beyond omega on edge {edge}")));
        }
        self.edges[edge as usize].available = available;
        Ok(())
    }

    /// Takes `cu` off every edge of `path`. Nothing changes on error.
    pub fn allocate(&mut self, path: &[EdgeId], cu: &Cu) -> Result<()> {
        if let Some(&e) = path.iter().find(|&&e| !self.available(e).contains_cu(cu)) {
            return Err(Error::Spectrum(format!("{cu} is not free on edge {e}")));
        }
        for &e in path {
            self.edges[e as usize].available.remove(cu)?;
        }
        Ok(())
    }

    /// Returns `cu` to every edge of `path`. Nothing changes on error.
    pub fn release(&mut self, path: &[EdgeId], cu: &Cu) -> Result<()> {
        if let Some(&e) = path.iter().find(|&&e| !self.available(e).is_disjoint_from_cu(cu)) {
            return Err(Error::Spectrum(format!("{cu} is not allocated on edge {e}")));
        }
        for &e in path {
            self.edges[e as usize].available.insert(cu)?;
        }
        Ok(())
    }

    /// Units in use over all units on all edges.
    pub fn utilization(&self) -> f64 {
        let total = self.edges.len() as f64 * f64::from(self.omega);
        if total == 0.0 {
            return 0.0;
        }
        self.units_in_use() as f64 / total
    }

    pub fn units_in_use(&self) -> u64 {
        self.edges
            .iter()
            .map(|e| u64::from(self.omega) - e.available.unit_count())
            .sum()
    }

    pub fn path_length(&self, path: &[EdgeId]) -> f64 {
        path.iter().fold(0.0, |acc, &e| acc + self.edge(e).length_km)
    }

    /// Vertex sequence of `path` walked from `from`, or `None` if the edges
    /// do not chain.
    pub fn path_vertices(&self, from: VertexId, path: &[EdgeId]) -> Option<Vec<VertexId>> {
        let mut out = vec![from];
        let mut at = from;
        for &e in path {
            let rec = self.edges.get(e as usize)?;
            if rec.u != at && rec.v != at {
                return None;
            }
            at = rec.other(at);
            out.push(at);
        }
        Some(out)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count as usize];
        let mut stack = vec![0u32];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(_, w) in &self.adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Copy of the network with every edge's spectrum fully available.
    pub fn with_full_spectrum(&self) -> Network {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.available = SpectrumSet::full(self.omega);
        }
        out
    }

    /// Canonical JSON text: fixed key order, six decimals for lengths and
    /// coordinates, one vertex or edge per line.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"omega\": {},", self.omega);
        let _ = writeln!(s, "  \"vertices\": [");
        for v in 0..self.vertex_count {
            let (x, y) = match &self.coordinates {
                Some(c) => (fixed6(c[v as usize].0), fixed6(c[v as usize].1)),
                None => ("null".to_string(), "null".to_string()),
            };
            let comma = if v + 1 < self.vertex_count { "," } else { "" };
            let _ = writeln!(s, "    {{\"id\": {v}, \"x_km\": {x}, \"y_km\": {y}}}{comma}");
        }
        let _ = writeln!(s, "  ],");
        let _ = writeln!(s, "  \"edges\": [");
        for (i, e) in self.edges.iter().enumerate() {
            let comma = if i + 1 < self.edges.len() { "," } else { "" };
            let _ = writeln!(
                s,
                "    {{\"id\": {}, \"u\": {}, \"v\": {}, \"length_km\": {}, \"available\": \"{}\"}}{comma}",
                e.id,
                e.u,
                e.v,
                fixed6(e.length_km),
                e.available
            );
        }
        let _ = writeln!(s, "  ]");
        let _ = writeln!(s, "}}");
        s
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let file: GraphFile = serde_json::from_str(text)?;
        let n = file.vertices.len() as u32;
        for (i, v) in file.vertices.iter().enumerate() {
            if v.id as usize != i {
                return Err(Error::InvalidNetwork(format!("vertex ids must be 0..{n} in order")));
            }
        }
        let mut net = Network::new(n, file.omega);
        let coords: Option<Vec<(f64, f64)>> =
            file.vertices.iter().map(|v| Some((v.x_km?, v.y_km?))).collect();
        if let Some(c) = coords {
            if n > 0 {
                net.set_coordinates(c)?;
            }
        }
        for (i, e) in file.edges.iter().enumerate() {
            if e.id as usize != i {
                return Err(Error::InvalidNetwork(format!(
                    "edge ids must be 0..{} in order",
                    file.edges.len()
                )));
            }
            let available: SpectrumSet = e.available.parse()?;
            net.add_edge_with(e.u, e.v, e.length_km, available)?;
        }
        Ok(net)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Network> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Network::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

fn quantize6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    omega: u32,
    vertices: Vec<VertexEntry>,
    edges: Vec<EdgeEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    id: u32,
    x_km: Option<f64>,
    y_km: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    id: u32,
    u: u32,
    v: u32,
    length_km: f64,
    available: String,
}

/// Random Gabriel graph: `n` points uniform in a square of area
/// `n * density_km2_per_vertex`, joined when no third point lies strictly
/// inside the circle whose diameter is the pair.
///
/// Coordinates and lengths are rounded to 1e-6 km so that the canonical JSON
/// form reloads to an identical network.
pub fn gabriel_generate(n: u32, density_km2_per_vertex: f64, omega: u32, rng_seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("a Gabriel graph needs at least 2 vertices, got {n}")));
    }
    if density_km2_per_vertex.is_nan() || density_km2_per_vertex <= 0.0 {
        return Err(Error::InvalidConfig(format!("density must be positive, got {density_km2_per_vertex}")));
    }
    let side = (f64::from(n) * density_km2_per_vertex).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (quantize6(rng.random::<f64>() * side), quantize6(rng.random::<f64>() * side)))
        .collect();
    gabriel_from_points(&points, omega)
}

/// Gabriel graph over the given points.
pub fn gabriel_from_points(points: &[(f64, f64)], omega: u32) -> Result<Network> {
    let n = points.len();
    let mut net = Network::new(n as u32, omega);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let r2 = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)) / 4.0;
            let blocked = (0..n).any(|k| {
                k != i && k != j && {
                    let p = points[k];
                    (p.0 - mid.0).powi(2) + (p.1 - mid.1).powi(2) < r2
                }
            });
            if !blocked {
                let len = quantize6((4.0 * r2).sqrt());
                if len > 0.0 {
                    net.add_edge(i as u32, j as u32, len)?;
                }
            }
        }
    }
    net.set_coordinates(points.to_vec())?;
    Ok(net)
}

/// Path statistics over all unordered vertex pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathMetrics {
    /// Mean hop count of the length-shortest paths.
    pub alpha: f64,
    /// Longest shortest-path length, km.
    pub diameter_len_km: f64,
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: VertexId,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Length-shortest paths from `source`: `(distance, hop count)` per vertex.
/// Equal-length alternatives resolve to the lexicographically smallest vertex
/// sequence.
pub fn shortest_paths_from(net: &Network, source: VertexId) -> Vec<Option<(f64, u32)>> {
    let n = net.vertex_count() as usize;
    let mut best: Vec<Option<(f64, Vec<VertexId>)>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    best[source as usize] = Some((0.0, vec![source]));
    heap.push(HeapItem { dist: 0.0, vertex: source });
    while let Some(HeapItem { dist, vertex }) = heap.pop() {
        if settled[vertex as usize] {
            continue;
        }
        settled[vertex as usize] = true;
        let seq = best[vertex as usize].as_ref().map(|b| b.1.clone()).unwrap_or_default();
        for arc in net.out_arcs(vertex) {
            let t = arc.target as usize;
            if settled[t] {
                continue;
            }
            let nd = dist + arc.length_km;
            let better = match &best[t] {
                None => true,
                Some((d, s)) => nd < *d || (nd == *d && seq.iter().chain([&arc.target]).lt(s.iter())),
            };
            if better {
                let mut ns = seq.clone();
                ns.push(arc.target);
                best[t] = Some((nd, ns));
                heap.push(HeapItem { dist: nd, vertex: arc.target });
            }
        }
    }
    best.into_iter()
        .map(|b| b.map(|(d, s)| (d, s.len() as u32 - 1)))
        .collect()
}

pub fn shortest_path_metrics(net: &Network) -> Result<PathMetrics> {
    let n = net.vertex_count();
    if n < 2 {
        return Err(Error::InvalidNetwork("metrics need at least two vertices".into()));
    }
    let mut hops = 0u64;
    let mut pairs = 0u64;
    let mut diameter: f64 = 0.0;
    for s in 0..n {
        let row = shortest_paths_from(net, s);
        for t in s + 1..n {
            let (d, h) = row[t as usize].ok_or(Error::Disconnected)?;
            hops += u64::from(h);
            pairs += 1;
            diameter = diameter.max(d);
        }
    }
    Ok(PathMetrics { alpha: hops as f64 / pairs as f64, diameter_len_km: diameter })
}
