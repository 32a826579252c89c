//! Dedicated path protection routing for elastic optical networks.
//!
//! The centrepiece is [`dpp::dpp_search`], an exact search for the cheapest
//! pair of edge-disjoint paths, each with its own contiguous and continuous
//! spectrum. Around it sit the spectrum algebra, the network model, the
//! modulation-aware cost model, baseline algorithms, and a dynamic traffic
//! simulator.

pub mod baselines;
pub mod campaign;
pub mod corroborate;
pub mod costmodel;
pub mod dpp;
pub mod error;
pub mod graph;
pub mod sim;
pub mod spectrum;

pub use costmodel::{Demand, ModulationModel, PathModel, Rmsa};
pub use dpp::{dpp_search, DppSearch, ProtectedPair, RoutedPath, SearchStats};
pub use error::{Error, Result};
pub use graph::{gabriel_generate, Network};
pub use spectrum::{Cu, SpectrumSet};
