//! Geodesic primitives on the WGS-84 coordinate range.
//!
//! Distances use the haversine great-circle formula on a sphere of mean
//! Earth radius. Centroids are flat arithmetic means of degrees, which is
//! adequate at province scale away from the antimeridian.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius in kilometres (IUGG).
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("invalid coordinate: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("empty point set")]
    EmptyPointSet,
}

/// A latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        if lat.is_finite() && lon.is_finite() && (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) {
            Ok(GeoPoint { lat, lon })
        } else {
            Err(GeoError::InvalidCoordinate { lat, lon })
        }
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    /// Point reached by moving `north_km` and `east_km` on a local tangent
    /// plane. Only meant for small offsets (tens of kilometres).
    pub fn offset_km(&self, north_km: f64, east_km: f64) -> Result<GeoPoint, GeoError> {
        let dlat = (north_km / EARTH_RADIUS_KM).to_degrees();
        let dlon = (east_km / (EARTH_RADIUS_KM * self.lat.to_radians().cos())).to_degrees();
        GeoPoint::new(self.lat + dlat, self.lon + dlon)
    }
}

/// Great-circle distance in kilometres.
///
/// The arguments are put in a canonical order first so the result is
/// bitwise symmetric.
pub fn geodesic_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (p, q) = if (a.lat, a.lon) <= (b.lat, b.lon) { (a, b) } else { (b, a) };
    if p == q {
        return 0.0;
    }
    let phi1 = p.lat.to_radians();
    let phi2 = q.lat.to_radians();
    let dphi = (q.lat - p.lat).to_radians();
    let dlambda = (q.lon - p.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Component-wise arithmetic mean of the points.
pub fn centroid(points: &[GeoPoint]) -> Result<GeoPoint, GeoError> {
    if points.is_empty() {
        return Err(GeoError::EmptyPointSet);
    }
    let n = points.len() as f64;
    let (slat, slon) = points
        .iter()
        .fold((0.0, 0.0), |(la, lo), p| (la + p.lat, lo + p.lon));
    let (lat, lon) = (slat / n, slon / n);
    // a mean of identical values can drift by an ulp; keep those exact
    let first = points[0];
    if points.iter().all(|p| *p == first) {
        return Ok(first);
    }
    GeoPoint::new(lat.clamp(-90.0, 90.0), lon.clamp(-180.0, 180.0))
}
