//! Proximity networks from vehicle telematics and deterministic threshold
//! cascades of electric-vehicle adoption over them.
//!
//! The pipeline runs: event records → stops and trips → homes and
//! suitability → proximity graph → pruning → cascade experiments.

pub mod cascade;
pub mod experiments;
pub mod geodata;
pub mod graph;
pub mod mobility;
pub mod proximity_net;
pub mod rng;

pub use cascade::{CascadeError, CascadeState, CohesiveResult, Thresholds};
pub use geodata::{centroid, geodesic_km, GeoError, GeoPoint};
pub use graph::{Graph, GraphError};
