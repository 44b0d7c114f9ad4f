//! Telematic event records, stop/trip segmentation, home inference and
//! EV-suitability classification.

mod generator;
mod home;
pub mod io;
mod segment;
mod suitability;

use chrono::{DateTime, FixedOffset, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodata::GeoPoint;

pub use generator::{generate_synthetic_fleet, ClusterShape, GeneratorConfig, HomeCluster, PlantedVehicle, SyntheticFleet};
pub use home::{detect_overnight_stops, infer_home};
pub use segment::{segment_events, Segmentation, SegmentWarning, VehicleSegments};
pub use suitability::{classify_suitability, SuitabilityProfile};

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("record parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Ignition,
    Shutdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub vehicle_id: String,
    pub event: EventKind,
    pub timestamp: DateTime<Utc>,
    pub location: GeoPoint,
    /// Ground-truth distance of the trip ending at this shutdown, when the
    /// source knows it.
    pub trip_km: Option<f64>,
}

/// Vehicle parked from a shutdown to the next ignition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub vehicle_id: String,
    pub location: GeoPoint,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Stop {
    pub fn duration_hours(&self) -> f64 {
        (self.end - self.start).num_seconds() as f64 / 3600.0
    }
}

/// Vehicle moving from an ignition to the next shutdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    pub vehicle_id: String,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub distance_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suitability {
    PerfectlySuitable,
    NotImmediatelySuitable,
}

impl Suitability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suitability::PerfectlySuitable => "perfectly_suitable",
            Suitability::NotImmediatelySuitable => "not_immediately_suitable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "perfectly_suitable" => Some(Suitability::PerfectlySuitable),
            "not_immediately_suitable" => Some(Suitability::NotImmediatelySuitable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub vehicle_id: String,
    pub home: GeoPoint,
    pub suitability: Suitability,
    pub max_daily_km: f64,
}

/// Night hours in local time, `[start_hour, end_hour)`; wraps past
/// midnight when `start_hour > end_hour`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NightWindow {
    pub start_hour: u32,
    pub end_hour: u32,
}

impl Default for NightWindow {
    fn default() -> Self {
        NightWindow { start_hour: 22, end_hour: 6 }
    }
}

/// Parameters of stop analysis and classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    pub night: NightWindow,
    /// Fixed offset of local time from UTC, in minutes.
    pub utc_offset_minutes: i32,
    pub overnight_min_hours: f64,
    pub cluster_radius_km: f64,
    pub home_min_share: f64,
    pub ev_range_km: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            night: NightWindow::default(),
            utc_offset_minutes: 60,
            overnight_min_hours: 7.0,
            cluster_radius_km: 0.5,
            home_min_share: 0.5,
            ev_range_km: 200.0,
        }
    }
}

impl MobilityConfig {
    pub fn offset(&self) -> FixedOffset {
        FixedOffset::east_opt(self.utc_offset_minutes * 60).expect("utc offset within a day")
    }
}

/// Why a vehicle has no profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    NoOvernightStops,
    NoMajorityCluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileBuild {
    /// Sorted by vehicle id.
    pub profiles: Vec<AgentProfile>,
    pub excluded: Vec<(String, ExclusionReason)>,
    pub warnings: Vec<SegmentWarning>,
}

/// Segments the records, infers homes and classifies every vehicle.
/// Vehicles without a home are listed in `excluded`.
pub fn build_profiles(records: &[EventRecord], config: &MobilityConfig) -> ProfileBuild {
    use rayon::prelude::*;

    let seg = segment_events(records);
    let per_vehicle: Vec<_> = seg.vehicles.into_iter().collect();
    let outcomes: Vec<Result<AgentProfile, (String, ExclusionReason)>> = per_vehicle
        .into_par_iter()
        .map(|(id, segs)| {
            let overnight = detect_overnight_stops(&segs.stops, config);
            if overnight.is_empty() {
                return Err((id, ExclusionReason::NoOvernightStops));
            }
            let Some(home) = infer_home(&segs.stops, config) else {
                return Err((id, ExclusionReason::NoMajorityCluster));
            };
            let class = classify_suitability(&segs.trips, config);
            Ok(AgentProfile {
                vehicle_id: id,
                home,
                suitability: class.suitability,
                max_daily_km: class.max_daily_km,
            })
        })
        .collect();
    let mut profiles = Vec::new();
    let mut excluded = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => profiles.push(p),
            Err(e) => excluded.push(e),
        }
    }
    ProfileBuild { profiles, excluded, warnings: seg.warnings }
}
