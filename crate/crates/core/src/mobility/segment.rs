use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{EventKind, EventRecord, Stop, Trip};
use crate::geodata::geodesic_km;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VehicleSegments {
    pub stops: Vec<Stop>,
    pub trips: Vec<Trip>,
}

/// A record dropped because the event stream did not alternate, or a
/// pair that spanned no time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentWarning {
    pub vehicle_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub vehicles: BTreeMap<String, VehicleSegments>,
    pub warnings: Vec<SegmentWarning>,
}

/// Splits each vehicle's chronological events into trips
/// (ignition → shutdown) and stops (shutdown → ignition).
///
/// Of two consecutive events of the same kind the earlier one is dropped.
/// Trip distance is the shutdown row's `trip_km` when present, otherwise
/// the straight-line distance between the two event locations.
pub fn segment_events(records: &[EventRecord]) -> Segmentation {
    let mut by_vehicle: BTreeMap<&str, Vec<&EventRecord>> = BTreeMap::new();
    for r in records {
        by_vehicle.entry(r.vehicle_id.as_str()).or_default().push(r);
    }

    let mut out = Segmentation::default();
    for (id, mut events) in by_vehicle {
        events.sort_by_key(|r| r.timestamp);
        let mut segs = VehicleSegments::default();
        let mut pending: Option<&EventRecord> = None;
        let mut report = |message: String| {
            warn!("vehicle {id}: {message}");
            out.warnings.push(SegmentWarning { vehicle_id: id.to_string(), message });
        };
        for ev in events {
            let Some(prev) = pending else {
                pending = Some(ev);
                continue;
            };
            if prev.event == ev.event {
                report(format!(
                    "consecutive {:?} events at {} and {}; dropping the first",
                    ev.event, prev.timestamp, ev.timestamp
                ));
                pending = Some(ev);
                continue;
            }
            if ev.timestamp <= prev.timestamp {
                report(format!("zero-length segment at {}; skipped", ev.timestamp));
                pending = Some(ev);
                continue;
            }
            match prev.event {
                EventKind::Ignition => segs.trips.push(Trip {
                    vehicle_id: id.to_string(),
                    start: prev.timestamp,
                    end: ev.timestamp,
                    distance_km: ev.trip_km.unwrap_or_else(|| geodesic_km(prev.location, ev.location)),
                }),
                EventKind::Shutdown => segs.stops.push(Stop {
                    vehicle_id: id.to_string(),
                    location: prev.location,
                    start: prev.timestamp,
                    end: ev.timestamp,
                }),
            }
            pending = Some(ev);
        }
        out.vehicles.insert(id.to_string(), segs);
    }
    out
}
