//! CSV formats for event records and agent profiles.
//!
//! Records: `vehicle_id,event,timestamp,lat,lon[,trip_km]`, timestamps in
//! ISO-8601 UTC. Profiles: `vehicle_id,home_lat,home_lon,suitability,max_daily_km`.

use std::io::{Read, Write};

use chrono::{DateTime, Utc};

use super::{AgentProfile, EventKind, EventRecord, MobilityError, PlantedVehicle, Suitability};
use crate::geodata::GeoPoint;

const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.format(TIME_FORMAT).to_string()
}

fn parse_err(line: u64, msg: impl Into<String>) -> MobilityError {
    MobilityError::Parse { line, msg: msg.into() }
}

fn parse_f64(field: &str, line: u64, what: &str) -> Result<f64, MobilityError> {
    field.trim().parse().map_err(|_| parse_err(line, format!("bad {what}: {field:?}")))
}

pub fn write_records<W: Write>(out: W, records: &[EventRecord]) -> Result<(), MobilityError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vehicle_id", "event", "timestamp", "lat", "lon", "trip_km"])?;
    for r in records {
        let event = match r.event {
            EventKind::Ignition => "ignition",
            EventKind::Shutdown => "shutdown",
        };
        w.write_record([
            r.vehicle_id.as_str(),
            event,
            &format_timestamp(&r.timestamp),
            &format!("{:.6}", r.location.lat()),
            &format!("{:.6}", r.location.lon()),
            &r.trip_km.map(|k| format!("{k:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<EventRecord>, MobilityError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| col(name).ok_or_else(|| parse_err(1, format!("missing column {name}")));
    let (id_c, ev_c, ts_c, lat_c, lon_c) =
        (need("vehicle_id")?, need("event")?, need("timestamp")?, need("lat")?, need("lon")?);
    let km_c = col("trip_km");

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |c: usize| row.get(c).ok_or_else(|| parse_err(line, "short row"));
        let event = match field(ev_c)?.trim() {
            "ignition" => EventKind::Ignition,
            "shutdown" => EventKind::Shutdown,
            other => return Err(parse_err(line, format!("unknown event {other:?}"))),
        };
        let timestamp = DateTime::parse_from_rfc3339(field(ts_c)?.trim())
            .map_err(|e| parse_err(line, format!("bad timestamp: {e}")))?
            .with_timezone(&Utc);
        let lat = parse_f64(field(lat_c)?, line, "lat")?;
        let lon = parse_f64(field(lon_c)?, line, "lon")?;
        let location = GeoPoint::new(lat, lon).map_err(|e| parse_err(line, e.to_string()))?;
        let trip_km = match km_c.and_then(|c| row.get(c)).map(str::trim) {
            None | Some("") => None,
            Some(s) => Some(parse_f64(s, line, "trip_km")?),
        };
        out.push(EventRecord { vehicle_id: field(id_c)?.trim().to_string(), event, timestamp, location, trip_km });
    }
    Ok(out)
}

pub fn write_profiles<W: Write>(out: W, profiles: &[AgentProfile]) -> Result<(), MobilityError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vehicle_id", "home_lat", "home_lon", "suitability", "max_daily_km"])?;
    for p in profiles {
        w.write_record([
            p.vehicle_id.as_str(),
            &format!("{:.6}", p.home.lat()),
            &format!("{:.6}", p.home.lon()),
            p.suitability.as_str(),
            &format!("{:.3}", p.max_daily_km),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ground truth: `vehicle_id,home_lat,home_lon,suitability`.
pub fn write_planted<W: Write>(out: W, planted: &[PlantedVehicle]) -> Result<(), MobilityError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vehicle_id", "home_lat", "home_lon", "suitability"])?;
    for p in planted {
        w.write_record([
            p.vehicle_id.as_str(),
            &format!("{:.6}", p.home.lat()),
            &format!("{:.6}", p.home.lon()),
            p.suitability.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profiles<R: Read>(input: R) -> Result<Vec<AgentProfile>, MobilityError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 5 {
            return Err(parse_err(line, format!("expected 5 fields, got {}", row.len())));
        }
        let lat = parse_f64(&row[1], line, "home_lat")?;
        let lon = parse_f64(&row[2], line, "home_lon")?;
        out.push(AgentProfile {
            vehicle_id: row[0].to_string(),
            home: GeoPoint::new(lat, lon).map_err(|e| parse_err(line, e.to_string()))?,
            suitability: Suitability::parse(&row[3])
                .ok_or_else(|| parse_err(line, format!("unknown suitability {:?}", &row[3])))?,
            max_daily_km: parse_f64(&row[4], line, "max_daily_km")?,
        });
    }
    Ok(out)
}
