//! Modulation-aware cost and feasibility functions.
//!
//! A demand asks for `g` units at the most spectrally efficient modulation.
//! Longer paths need less efficient modulations and therefore more units, up
//! to the reach of the least efficient one, beyond which the path is
//! infeasible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Path or pair cost in km·units. `f64::INFINITY` marks an infeasible path.
pub type Cost = f64;

/// Relative slack applied before rounding up, so that values which are
/// mathematically integral do not pick up an extra unit from rounding noise.
const CEIL_REL_EPS: f64 = 1e-9;

fn ceil_tolerant(x: f64) -> f64 {
    (x - x.abs() * CEIL_REL_EPS).ceil()
}

pub const DEFAULT_LEVELS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulationModel {
    levels: u32,
    reach_r1_km: f64,
    reach_rm_km: f64,
}

impl ModulationModel {
    pub fn new(levels: u32, reach_r1_km: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidConfig("modulation needs at least one level".into()));
        }
        if !(reach_r1_km > 0.0 && reach_r1_km.is_finite()) {
            return Err(Error::InvalidConfig(format!("reach must be positive, got {reach_r1_km}")));
        }
        let reach_rm_km = reach_r1_km / f64::from(2u32.pow(levels - 1));
        Ok(ModulationModel { levels, reach_r1_km, reach_rm_km })
    }

    /// Reach of the least efficient modulation set to 1.5 times the longest
    /// shortest path of the network.
    pub fn from_diameter(diameter_len_km: f64, levels: u32) -> Result<Self> {
        ModulationModel::new(levels, 1.5 * diameter_len_km)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Reach of the least spectrally efficient modulation.
    pub fn reach_r1_km(&self) -> f64 {
        self.reach_r1_km
    }

    /// Reach of the most spectrally efficient modulation.
    pub fn reach_rm_km(&self) -> f64 {
        self.reach_rm_km
    }
}

/// Units needed to carry a `g`-unit demand over `d` km; `None` past the
/// longest reach.
pub fn units_needed(g: u32, d: f64, model: &ModulationModel) -> Option<u32> {
    if d <= model.reach_rm_km {
        Some(g)
    } else if d > model.reach_r1_km {
        None
    } else {
        let x = f64::from(g) * (2.0 * d / model.reach_rm_km).log2();
        Some(ceil_tolerant(x) as u32)
    }
}

/// Units for a bitrate `b` given the per-unit bitrate `r` and `levels`
/// modulations, plus guard-band units.
pub fn units_from_bitrate(b_gbps: f64, r_gbps: f64, levels: u32, guard_units: u32) -> u32 {
    assert!(b_gbps > 0.0 && r_gbps > 0.0 && levels >= 1);
    ceil_tolerant(b_gbps / (r_gbps * f64::from(levels))) as u32 + guard_units
}

/// Path length times the units it needs.
pub fn path_cost(length_km: f64, g: u32, model: &ModulationModel) -> Cost {
    match units_needed(g, length_km, model) {
        Some(u) => length_km * f64::from(u),
        None => f64::INFINITY,
    }
}

/// A path is acceptable when its CU can hold the units it needs.
pub fn decide(cu_size: u32, length_km: f64, g: u32, model: &ModulationModel) -> bool {
    units_needed(g, length_km, model).is_some_and(|u| u <= cu_size)
}

pub fn pair_cost(c1: Cost, c2: Cost) -> Cost {
    c1 + c2
}

/// The per-path cost, pair cost and decision hooks a search is run with.
///
/// Implementations must keep the pair cost strictly increasing when an edge
/// of positive length is appended to either path, and `decide` must never
/// accept a path after rejecting one of its prefixes.
pub trait PathModel {
    fn path_cost(&self, length_km: f64) -> Cost;

    fn decide(&self, length_km: f64, cu_size: u32) -> bool;

    /// Units a path of this length reserves once selected.
    fn units_required(&self, length_km: f64) -> Option<u32>;

    fn pair_cost(&self, a: Cost, b: Cost) -> Cost {
        pair_cost(a, b)
    }
}

/// Routing, modulation and spectrum assignment for one demand size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rmsa {
    pub modulation: ModulationModel,
    pub units_g: u32,
}

impl Rmsa {
    pub fn new(modulation: ModulationModel, units_g: u32) -> Self {
        assert!(units_g >= 1, "a demand requests at least one unit");
        Rmsa { modulation, units_g }
    }
}

impl PathModel for Rmsa {
    fn path_cost(&self, length_km: f64) -> Cost {
        path_cost(length_km, self.units_g, &self.modulation)
    }

    fn decide(&self, length_km: f64, cu_size: u32) -> bool {
        decide(cu_size, length_km, self.units_g, &self.modulation)
    }

    fn units_required(&self, length_km: f64) -> Option<u32> {
        units_needed(self.units_g, length_km, &self.modulation)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub src: VertexId,
    pub dst: VertexId,
    pub units_g: u32,
}

impl Demand {
    pub fn new(src: VertexId, dst: VertexId, units_g: u32) -> Result<Self> {
        if src == dst {
            return Err(Error::SameEndpoints(src));
        }
        if units_g == 0 {
            return Err(Error::InvalidConfig("a demand requests at least one unit".into()));
        }
        Ok(Demand { src, dst, units_g })
    }
}
