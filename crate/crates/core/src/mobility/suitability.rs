use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MobilityConfig, Suitability, Trip};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityProfile {
    pub suitability: Suitability,
    pub max_daily_km: f64,
}

/// Sums trip distances per local calendar day (by trip start) and labels
/// the vehicle perfectly suitable iff no day exceeds the EV range.
pub fn classify_suitability(trips: &[Trip], config: &MobilityConfig) -> SuitabilityProfile {
    let offset = config.offset();
    let mut daily: BTreeMap<chrono::NaiveDate, f64> = BTreeMap::new();
    for t in trips {
        *daily.entry(t.start.with_timezone(&offset).date_naive()).or_insert(0.0) += t.distance_km;
    }
    let max_daily_km = daily.values().copied().fold(0.0, f64::max);
    let suitability = if max_daily_km <= config.ev_range_km {
        Suitability::PerfectlySuitable
    } else {
        Suitability::NotImmediatelySuitable
    };
    SuitabilityProfile { suitability, max_daily_km }
}
