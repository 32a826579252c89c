//! Dynamic traffic simulation.
//!
//! Demands arrive as a Poisson process, hold their two paths for an
//! exponentially distributed time, and are torn down. The arrival rate is
//! derived from the offered load. Statistics are collected only after the
//! warm-up period, although connections set up during warm-up keep their
//! spectrum.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::baselines::{brute_force_pair, edge_exclusion_with_stats, BruteForceBudget};
use crate::costmodel::{Demand, ModulationModel, Rmsa, DEFAULT_LEVELS};
use crate::dpp::{DppSearch, ProtectedPair, SearchStats};
use crate::error::{Error, Result};
use crate::graph::{gabriel_generate, shortest_path_metrics, EdgeId, Network, VertexId, DEFAULT_DENSITY_KM2};
use crate::spectrum::{Cu, SpectrumSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Exact,
    EdgeExclusion,
    BruteForce,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::EdgeExclusion => "edge-exclusion",
            Algorithm::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "edge-exclusion" => Ok(Algorithm::EdgeExclusion),
            "brute-force" => Ok(Algorithm::BruteForce),
            _ => Err(Error::Parse(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Runs one protected-pair search with the chosen algorithm.
pub fn route(
    algorithm: Algorithm,
    net: &Network,
    demand: &Demand,
    modulation: &ModulationModel,
) -> Result<(Option<ProtectedPair>, SearchStats)> {
    let model = Rmsa::new(*modulation, demand.units_g);
    match algorithm {
        Algorithm::Exact => {
            let out = DppSearch::new(net, &model).run(demand.src, demand.dst)?;
            Ok((out.pair, out.stats))
        }
        Algorithm::EdgeExclusion => edge_exclusion_with_stats(net, demand.src, demand.dst, &model),
        Algorithm::BruteForce => {
            let pair = brute_force_pair(net, demand.src, demand.dst, &model, BruteForceBudget::default())?;
            Ok((pair, SearchStats::default()))
        }
    }
}

/// Arrivals per day that make the offered load `a`.
pub fn arrival_rate(a: f64, edges: usize, omega: u32, tau_days: f64, gamma: f64, alpha: f64) -> f64 {
    a * edges as f64 * f64::from(omega) / (2.0 * tau_days * gamma * alpha)
}

/// Mean demand size, either absolute or as a share of `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GammaMode {
    Units(u32),
    PercentOfOmega(f64),
}

impl GammaMode {
    pub fn resolve(&self, omega: u32) -> u32 {
        match *self {
            GammaMode::Units(g) => g,
            GammaMode::PercentOfOmega(p) => ((p / 100.0 * f64::from(omega)).round() as u32).max(1),
        }
    }
}

/// Distinct uniformly chosen endpoints.
pub fn draw_endpoints<R: Rng>(rng: &mut R, vertex_count: u32) -> (VertexId, VertexId) {
    assert!(vertex_count >= 2);
    let src = rng.random_range(0..vertex_count);
    let mut dst = rng.random_range(0..vertex_count - 1);
    if dst >= src {
        dst += 1;
    }
    (src, dst)
}

/// Shifted Poisson demand size with mean `gamma` and minimum 1.
pub fn draw_units<R: Rng>(rng: &mut R, gamma: u32) -> u32 {
    assert!(gamma >= 1);
    if gamma == 1 {
        return 1;
    }
    let poisson = Poisson::new(f64::from(gamma - 1)).expect("positive Poisson mean");
    poisson.sample(rng) as u32 + 1
}

pub fn draw_demand<R: Rng>(rng: &mut R, net: &Network, gamma: u32) -> Demand {
    let (src, dst) = draw_endpoints(rng, net.vertex_count());
    let units_g = draw_units(rng, gamma);
    Demand { src, dst, units_g }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkSource {
    Gabriel { vertices: u32, density_km2: f64, seed: u64 },
    File(PathBuf),
    Given(Network),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReachPolicy {
    /// 1.5 times the longest shortest path.
    DiameterScaled,
    ExplicitKm(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub network: NetworkSource,
    pub omega: u32,
    pub gamma: GammaMode,
    pub offered_load: f64,
    pub tau_days: f64,
    pub horizon_days: f64,
    pub warmup_days: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub levels: u32,
    pub reach: ReachPolicy,
    /// Measure wall-clock search time; when off, times are reported as zero
    /// and runs are fully reproducible.
    pub record_timing: bool,
}

impl SimConfig {
    pub fn new(network: NetworkSource, omega: u32) -> Self {
        SimConfig {
            network,
            omega,
            gamma: GammaMode::Units(10),
            offered_load: 0.5,
            tau_days: 10.0,
            horizon_days: 150.0,
            warmup_days: 50.0,
            seed: 0,
            algorithm: Algorithm::Exact,
            levels: DEFAULT_LEVELS,
            reach: ReachPolicy::DiameterScaled,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.warmup_days >= 0.0 && self.warmup_days < self.horizon_days) {
            return bad(format!("warm-up {} must lie in [0, horizon {})", self.warmup_days, self.horizon_days));
        }
        if !(self.offered_load >= 0.0 && self.offered_load.is_finite()) {
            return bad(format!("offered load must be non-negative, got {}", self.offered_load));
        }
        if self.tau_days.is_nan() || self.tau_days <= 0.0 {
            return bad(format!("holding time must be positive, got {}", self.tau_days));
        }
        if self.gamma.resolve(self.omega) < 1 {
            return bad("gamma must be at least 1".into());
        }
        if self.omega == 0 {
            return bad("omega must be positive".into());
        }
        Ok(())
    }
}

/// Builds the network a config asks for. Disconnected generated graphs are
/// replaced by the graph of the next seed; the seed used is returned.
pub fn resolve_network(source: &NetworkSource, omega: u32) -> Result<(Network, Option<u64>)> {
    match source {
        NetworkSource::Gabriel { vertices, density_km2, seed } => {
            let mut s = *seed;
            loop {
                let net = gabriel_generate(*vertices, *density_km2, omega, s)?;
                if net.is_connected() {
                    return Ok((net, Some(s)));
                }
                warn!("graph for seed {s} is disconnected, regenerating with seed {}", s + 1);
                s += 1;
            }
        }
        NetworkSource::File(path) => Ok((check_omega(Network::load(path)?, omega)?, None)),
        NetworkSource::Given(net) => Ok((check_omega(net.clone(), omega)?, None)),
    }
}

fn check_omega(net: Network, omega: u32) -> Result<Network> {
    if net.omega() != omega {
        return Err(Error::InvalidConfig(format!(
            "network has omega {} but the run asks for {omega}",
            net.omega()
        )));
    }
    Ok(net)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub mean_utilization: f64,
    /// Blocked requested units over all requested units.
    pub bbp: f64,
    /// Blocked demands over all demands.
    pub demand_blocking: f64,
    pub arrivals: u64,
    pub accepted: u64,
    pub blocked: u64,
    pub requested_units: u64,
    pub blocked_units: u64,
    pub searches: u64,
    pub time_mean_s: f64,
    pub time_max_s: f64,
    pub words_mean: f64,
    pub words_max: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub demand: Demand,
    pub working: Vec<EdgeId>,
    pub protecting: Vec<EdgeId>,
    pub cu_working: Cu,
    pub cu_protecting: Cu,
    pub teardown_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EventKind {
    Teardown(u64),
    Arrival { demand: Demand, holding_days: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Event {
    fn rank(&self) -> u8 {
        match self.kind {
            EventKind::Teardown(_) => 0,
            EventKind::Arrival { .. } => 1,
        }
    }
}

impl Eq for Event {}

impl Ord for Event {
    // Earliest first; teardowns before arrivals at equal times.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.rank().cmp(&self.rank()))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// What one call to [`Simulation::step`] did.
#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Arrival { demand: Demand, accepted: bool },
    Teardown { connection: u64 },
}

struct Streams {
    arrivals: ChaCha8Rng,
    endpoints: ChaCha8Rng,
    sizes: ChaCha8Rng,
    holding: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        Streams { arrivals: stream(1), endpoints: stream(2), sizes: stream(3), holding: stream(4) }
    }
}

#[derive(Default)]
struct Tally {
    util_integral: f64,
    arrivals: u64,
    accepted: u64,
    blocked: u64,
    requested_units: u64,
    blocked_units: u64,
    searches: u64,
    time_sum: f64,
    time_max: f64,
    words_sum: f64,
    words_max: u64,
}

pub struct Simulation {
    config: SimConfig,
    net: Network,
    modulation: ModulationModel,
    gamma: u32,
    alpha: f64,
    lambda: f64,
    inter_arrival: Option<Exp<f64>>,
    holding: Exp<f64>,
    streams: Streams,
    events: BinaryHeap<Event>,
    seq: u64,
    active: BTreeMap<u64, Connection>,
    next_connection: u64,
    units_in_use: u64,
    now: f64,
    tally: Tally,
}

impl Simulation {
    pub fn new(config: SimConfig, net: Network) -> Result<Self> {
        config.validate()?;
        if net.vertex_count() < 2 {
            return Err(Error::InvalidConfig("simulation needs at least two vertices".into()));
        }
        let metrics = shortest_path_metrics(&net)?;
        let modulation = match config.reach {
            ReachPolicy::DiameterScaled => ModulationModel::from_diameter(metrics.diameter_len_km, config.levels)?,
            ReachPolicy::ExplicitKm(km) => ModulationModel::new(config.levels, km)?,
        };
        let gamma = config.gamma.resolve(config.omega);
        let lambda = arrival_rate(
            config.offered_load,
            net.edge_count(),
            config.omega,
            config.tau_days,
            f64::from(gamma),
            metrics.alpha,
        );
        let inter_arrival = (lambda > 0.0).then(|| Exp::new(lambda).expect("positive rate"));
        let holding = Exp::new(1.0 / config.tau_days).expect("positive holding rate");
        let units_in_use = net.units_in_use();
        let mut sim = Simulation {
            streams: Streams::new(config.seed),
            config,
            net,
            modulation,
            gamma,
            alpha: metrics.alpha,
            lambda,
            inter_arrival,
            holding,
            events: BinaryHeap::new(),
            seq: 0,
            active: BTreeMap::new(),
            next_connection: 0,
            units_in_use,
            now: 0.0,
            tally: Tally::default(),
        };
        sim.schedule_arrival(0.0);
        Ok(sim)
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn modulation(&self) -> &ModulationModel {
        &self.modulation
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn active_connections(&self) -> &BTreeMap<u64, Connection> {
        &self.active
    }

    /// The next event if it falls inside the horizon.
    pub fn peek(&self) -> Option<&Event> {
        self.events.peek().filter(|e| e.time <= self.config.horizon_days)
    }

    fn push_event(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.events.push(Event { time, seq: self.seq, kind });
    }

    fn schedule_arrival(&mut self, after: f64) {
        let Some(exp) = self.inter_arrival else { return };
        let time = after + exp.sample(&mut self.streams.arrivals);
        let (src, dst) = draw_endpoints(&mut self.streams.endpoints, self.net.vertex_count());
        let units_g = draw_units(&mut self.streams.sizes, self.gamma);
        let holding_days = self.holding.sample(&mut self.streams.holding);
        self.push_event(time, EventKind::Arrival { demand: Demand { src, dst, units_g }, holding_days });
    }

    fn advance_clock(&mut self, to: f64) {
        let warm = self.config.warmup_days;
        let lo = self.now.max(warm);
        let hi = to.min(self.config.horizon_days);
        if hi > lo {
            let total = self.net.edge_count() as f64 * f64::from(self.config.omega);
            if total > 0.0 {
                self.tally.util_integral += (hi - lo) * self.units_in_use as f64 / total;
            }
        }
        self.now = to;
    }

    /// Processes the next event inside the horizon.
    pub fn step(&mut self) -> Result<Option<StepOutcome>> {
        if self.peek().is_none() {
            return Ok(None);
        }
        let event = self.events.pop().expect("peeked");
        self.advance_clock(event.time);
        match event.kind {
            EventKind::Teardown(id) => {
                self.teardown(id)?;
                Ok(Some(StepOutcome::Teardown { connection: id }))
            }
            EventKind::Arrival { demand, holding_days } => {
                self.schedule_arrival(event.time);
                let accepted = self.arrive(demand, holding_days)?;
                Ok(Some(StepOutcome::Arrival { demand, accepted }))
            }
        }
    }

    fn arrive(&mut self, demand: Demand, holding_days: f64) -> Result<bool> {
        let counted = self.now >= self.config.warmup_days;
        let started = self.config.record_timing.then(Instant::now);
        let (pair, stats) = route(self.config.algorithm, &self.net, &demand, &self.modulation)?;
        let elapsed = started.map_or(0.0, |t| t.elapsed().as_secs_f64());
        if counted {
            let t = &mut self.tally;
            t.arrivals += 1;
            t.searches += 1;
            t.requested_units += u64::from(demand.units_g);
            t.time_sum += elapsed;
            t.time_max = t.time_max.max(elapsed);
            let words = stats.memory_words();
            t.words_sum += words as f64;
            t.words_max = t.words_max.max(words);
        }
        let Some(pair) = pair else {
            if counted {
                self.tally.blocked += 1;
                self.tally.blocked_units += u64::from(demand.units_g);
            }
            return Ok(false);
        };
        self.net.allocate(&pair.working.edges, &pair.working.cu)?;
        self.net.allocate(&pair.protecting.edges, &pair.protecting.cu)?;
        self.units_in_use += u64::from(pair.working.cu.size()) * pair.working.edges.len() as u64
            + u64::from(pair.protecting.cu.size()) * pair.protecting.edges.len() as u64;
        let id = self.next_connection;
        self.next_connection += 1;
        let teardown_time = self.now + holding_days;
        self.active.insert(
            id,
            Connection {
                demand,
                working: pair.working.edges,
                protecting: pair.protecting.edges,
                cu_working: pair.working.cu,
                cu_protecting: pair.protecting.cu,
                teardown_time,
            },
        );
        self.push_event(teardown_time, EventKind::Teardown(id));
        if counted {
            self.tally.accepted += 1;
        }
        Ok(true)
    }

    fn teardown(&mut self, id: u64) -> Result<()> {
        let conn = self
            .active
            .remove(&id)
            .ok_or_else(|| Error::Spectrum(format!("teardown of unknown connection {id}")))?;
        self.net.release(&conn.working, &conn.cu_working)?;
        self.net.release(&conn.protecting, &conn.cu_protecting)?;
        self.units_in_use -= u64::from(conn.cu_working.size()) * conn.working.len() as u64
            + u64::from(conn.cu_protecting.size()) * conn.protecting.len() as u64;
        Ok(())
    }

    /// Runs to the horizon and returns the post-warm-up statistics.
    pub fn run_to_end(&mut self) -> Result<RunStats> {
        while self.step()?.is_some() {}
        self.advance_clock(self.config.horizon_days.max(self.now));
        Ok(self.stats())
    }

    /// Tears down every active connection, ignoring the horizon.
    pub fn drain(&mut self) -> Result<()> {
        let ids: Vec<u64> = self.active.keys().copied().collect();
        for id in ids {
            self.teardown(id)?;
        }
        self.events.retain(|e| !matches!(e.kind, EventKind::Teardown(_)));
        Ok(())
    }

    pub fn stats(&self) -> RunStats {
        let t = &self.tally;
        let span = (self.now.min(self.config.horizon_days) - self.config.warmup_days).max(0.0);
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let mean = |sum: f64| if t.searches == 0 { 0.0 } else { sum / t.searches as f64 };
        RunStats {
            mean_utilization: if span > 0.0 { t.util_integral / span } else { 0.0 },
            bbp: ratio(t.blocked_units, t.requested_units),
            demand_blocking: ratio(t.blocked, t.arrivals),
            arrivals: t.arrivals,
            accepted: t.accepted,
            blocked: t.blocked,
            requested_units: t.requested_units,
            blocked_units: t.blocked_units,
            searches: t.searches,
            time_mean_s: mean(t.time_sum),
            time_max_s: t.time_max,
            words_mean: mean(t.words_sum),
            words_max: t.words_max,
        }
    }

    /// Checks that on every edge the active connections' CUs are pairwise
    /// disjoint and, together with the free units, cover the whole spectrum.
    pub fn check_conservation(&self) -> std::result::Result<(), String> {
        let omega = self.config.omega;
        let mut used: Vec<Vec<Cu>> = vec![Vec::new(); self.net.edge_count()];
        for conn in self.active.values() {
            for (path, cu) in [(&conn.working, conn.cu_working), (&conn.protecting, conn.cu_protecting)] {
                for &e in path {
                    used[e as usize].push(cu);
                }
            }
        }
        for (e, cus) in used.iter().enumerate() {
            let mut sorted = cus.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0].intersect(&w[1]).is_some()) {
                return Err(format!("edge {e} carries overlapping CUs {sorted:?}"));
            }
            let free = self.net.available(e as EdgeId);
            if cus.iter().any(|cu| !free.is_disjoint_from_cu(cu)) {
                return Err(format!("edge {e} lists an allocated CU as free"));
            }
            let covered = SpectrumSet::from_cus(free.runs().iter().copied().chain(cus.iter().copied()));
            if covered != SpectrumSet::full(omega) {
                return Err(format!("edge {e}: free plus allocated is {covered}, not the full spectrum"));
            }
        }
        Ok(())
    }
}

/// Resolves the network and runs one simulation to its horizon.
pub fn run(config: &SimConfig) -> Result<RunStats> {
    config.validate()?;
    let (net, _) = resolve_network(&config.network, config.omega)?;
    Simulation::new(config.clone(), net)?.run_to_end()
}

/// Default network source for a campaign cell.
pub fn gabriel_source(vertices: u32, seed: u64) -> NetworkSource {
    NetworkSource::Gabriel { vertices, density_km2: DEFAULT_DENSITY_KM2, seed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrival_rate_examples() {
        assert_eq!(arrival_rate(1.0, 10, 160, 10.0, 10.0, 2.0), 4.0);
        assert_eq!(arrival_rate(0.0, 10, 160, 10.0, 10.0, 2.0), 0.0);
        assert_eq!(arrival_rate(2.0, 10, 160, 10.0, 10.0, 2.0), 8.0);
    }

    #[test]
    fn gamma_modes() {
        assert_eq!(GammaMode::Units(7).resolve(160), 7);
        assert_eq!(GammaMode::PercentOfOmega(10.0).resolve(160), 16);
        assert_eq!(GammaMode::PercentOfOmega(10.0).resolve(640), 64);
        assert_eq!(GammaMode::PercentOfOmega(1.0).resolve(8), 1);
    }

    #[test]
    fn unit_gamma_always_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| draw_units(&mut rng, 1) == 1));
    }

    #[test]
    fn two_vertex_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (s, t) = draw_endpoints(&mut rng, 2);
            assert_ne!(s, t);
            assert!(s < 2 && t < 2);
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Exact, Algorithm::EdgeExclusion, Algorithm::BruteForce] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("dijkstra".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::new(gabriel_source(5, 0), 8);
        assert!(c.validate().is_ok());
        c.warmup_days = c.horizon_days;
        assert!(c.validate().is_err());
        let mut c = SimConfig::new(gabriel_source(5, 0), 8);
        c.tau_days = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn event_order_puts_teardowns_first() {
        let d = Demand { src: 0, dst: 1, units_g: 1 };
        let mut heap = BinaryHeap::new();
        heap.push(Event { time: 1.0, seq: 1, kind: EventKind::Arrival { demand: d, holding_days: 1.0 } });
        heap.push(Event { time: 1.0, seq: 2, kind: EventKind::Teardown(0) });
        heap.push(Event { time: 0.5, seq: 3, kind: EventKind::Arrival { demand: d, holding_days: 1.0 } });
        assert_eq!(heap.pop().unwrap().seq, 3);
        assert_eq!(heap.pop().unwrap().seq, 2);
        assert_eq!(heap.pop().unwrap().seq, 1);
    }

    fn small_config(load: f64, algorithm: Algorithm) -> SimConfig {
        let mut c = SimConfig::new(gabriel_source(8, 3), 16);
        c.gamma = GammaMode::Units(2);
        c.offered_load = load;
        c.tau_days = 5.0;
        c.horizon_days = 40.0;
        c.warmup_days = 10.0;
        c.seed = 11;
        c.algorithm = algorithm;
        c.record_timing = false;
        c
    }

    #[test]
    fn zero_load_blocks_nothing() {
        let stats = run(&small_config(0.0, Algorithm::Exact)).unwrap();
        assert_eq!(stats.arrivals, 0);
        assert_eq!(stats.bbp, 0.0);
        assert_eq!(stats.mean_utilization, 0.0);
    }

    #[test]
    fn runs_are_reproducible() {
        let c = small_config(1.0, Algorithm::Exact);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.arrivals > 0);
        assert!(a.mean_utilization > 0.0 && a.mean_utilization <= 1.0);
    }

    #[test]
    fn spectrum_is_conserved_and_drains() {
        let c = small_config(1.5, Algorithm::Exact);
        let (net, _) = resolve_network(&c.network, c.omega).unwrap();
        let full = net.with_full_spectrum();
        let mut sim = Simulation::new(c, net).unwrap();
        let mut steps = 0;
        while sim.step().unwrap().is_some() {
            sim.check_conservation().unwrap();
            steps += 1;
        }
        assert!(steps > 10);
        sim.drain().unwrap();
        assert!(sim.active_connections().is_empty());
        assert_eq!(sim.network(), &full);
    }

    #[test]
    fn sample_mean_of_demand_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let sum: u64 = (0..n).map(|_| u64::from(draw_units(&mut rng, 10))).sum();
        let mean = sum as f64 / n as f64;
        assert!((mean - 10.0).abs() <= 0.1, "mean {mean}");
    }

    #[test]
    fn bbp_counts_units() {
        let stats = run(&small_config(3.0, Algorithm::EdgeExclusion)).unwrap();
        assert!(stats.blocked_units <= stats.requested_units);
        assert_eq!(stats.arrivals, stats.accepted + stats.blocked);
        if stats.requested_units > 0 {
            let expect = stats.blocked_units as f64 / stats.requested_units as f64;
            assert_eq!(stats.bbp, expect);
        }
    }

    #[test]
    fn omega_mismatch_rejected() {
        let net = gabriel_generate(5, DEFAULT_DENSITY_KM2, 8, 0).unwrap();
        let c = SimConfig::new(NetworkSource::Given(net), 16);
        assert!(run(&c).is_err());
    }
}
