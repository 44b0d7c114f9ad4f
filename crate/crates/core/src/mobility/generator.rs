//! Synthetic telematics fleets with planted homes and suitability labels.
//!
//! Homes are drawn from a mixture of town clusters, small rural hamlets
//! scattered over an annulus, and a handful of remote vehicles far from
//! everyone else. Each
//! vehicle then drives a plausible daily schedule: overnight parking at
//! home (occasionally elsewhere), daytime round trips, and for vehicles
//! planted as not immediately suitable, a few days beyond the EV range.
//! Shutdown rows carry the exact trip distance.

use chrono::{DateTime, Duration, NaiveDate, NaiveTime, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EventKind, EventRecord, MobilityError, Suitability};
use crate::geodata::GeoPoint;
use crate::rng::{stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterShape {
    /// Isotropic normal with standard deviation `spread_km` per axis.
    Gaussian,
    /// Uniform over a disk of radius `spread_km`.
    Disk,
}

/// A cluster of homes centred `north_km`/`east_km` from the region centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomeCluster {
    pub north_km: f64,
    pub east_km: f64,
    pub spread_km: f64,
    pub shape: ClusterShape,
    /// Relative share of the non-remote, non-rural fleet.
    pub weight: f64,
    /// Relative propensity of residents to be planted perfectly suitable.
    pub suitable_weight: f64,
}

impl HomeCluster {
    pub fn gaussian(north_km: f64, east_km: f64, sigma_km: f64, weight: f64, suitable_weight: f64) -> Self {
        HomeCluster { north_km, east_km, spread_km: sigma_km, shape: ClusterShape::Gaussian, weight, suitable_weight }
    }

    pub fn disk(north_km: f64, east_km: f64, radius_km: f64, weight: f64, suitable_weight: f64) -> Self {
        HomeCluster { north_km, east_km, spread_km: radius_km, shape: ClusterShape::Disk, weight, suitable_weight }
    }

    fn draw(&self, rng: &mut StreamRng) -> (f64, f64) {
        let (dn, de) = match self.shape {
            ClusterShape::Gaussian => (self.spread_km * gaussian(rng), self.spread_km * gaussian(rng)),
            ClusterShape::Disk => {
                let r = self.spread_km * rng.gen::<f64>().sqrt();
                let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                (r * theta.cos(), r * theta.sin())
            }
        };
        (self.north_km + dn, self.east_km + de)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_vehicles: usize,
    pub center: GeoPoint,
    pub clusters: Vec<HomeCluster>,
    /// Share of vehicles living in rural hamlets.
    pub rural_share: f64,
    /// Hamlet centres are uniform over this annulus.
    pub rural_inner_km: f64,
    pub rural_outer_km: f64,
    pub hamlet_size: usize,
    pub hamlet_sigma_km: f64,
    pub rural_suitable_weight: f64,
    /// Share of vehicles placed far from every other home.
    pub remote_share: f64,
    pub remote_distance_km: f64,
    pub suitable_fraction: f64,
    pub days: u32,
    pub start_date: NaiveDate,
    pub utc_offset_minutes: i32,
    pub away_night_prob: f64,
    pub idle_day_prob: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_vehicles: 1000,
            center: GeoPoint::new(44.80, 10.33).expect("valid centre"),
            clusters: default_clusters(),
            rural_share: 0.108,
            rural_inner_km: 34.6,
            rural_outer_km: 56.0,
            hamlet_size: 4,
            hamlet_sigma_km: 0.5,
            rural_suitable_weight: 1.8,
            remote_share: 0.006,
            remote_distance_km: 110.0,
            suitable_fraction: 0.295,
            days: 28,
            start_date: NaiveDate::from_ymd_opt(2017, 9, 1).expect("valid date"),
            utc_offset_minutes: 60,
            away_night_prob: 0.08,
            idle_day_prob: 0.15,
        }
    }
}

/// A compact town centre, four satellite towns (one of them home to
/// mostly long-range drivers) and two wide, sparse suburban disks.
fn default_clusters() -> Vec<HomeCluster> {
    vec![
        HomeCluster::gaussian(0.0, 0.0, 0.39, 0.414, 5.5),
        HomeCluster::gaussian(-3.5, 4.4, 1.43, 0.1, 7.5),
        HomeCluster::gaussian(-9.0, -1.9, 0.88, 0.216, 13.0),
        HomeCluster::gaussian(-1.1, -7.3, 0.53, 0.339, 0.3),
        HomeCluster::gaussian(7.2, -3.6, 0.83, 0.117, 8.1),
        HomeCluster::disk(-0.3, 6.2, 6.47, 0.148, 1.2),
        HomeCluster::disk(3.0, 3.9, 8.58, 0.082, 0.062),
    ]
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), MobilityError> {
        let err = |m: &str| Err(MobilityError::Config(m.to_string()));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n_vehicles == 0 {
            return err("n_vehicles must be positive");
        }
        if self.days == 0 {
            return err("days must be positive");
        }
        if !unit(self.suitable_fraction) {
            return err("suitable_fraction must lie in [0, 1]");
        }
        if !unit(self.rural_share) || !unit(self.remote_share) || self.rural_share + self.remote_share > 1.0 {
            return err("rural_share and remote_share must lie in [0, 1] and sum to at most 1");
        }
        if !unit(self.away_night_prob) || !unit(self.idle_day_prob) {
            return err("probabilities must lie in [0, 1]");
        }
        if self.clusters.is_empty() && self.rural_share + self.remote_share < 1.0 {
            return err("at least one home cluster is required");
        }
        if self.clusters.iter().any(|c| !(c.weight >= 0.0 && c.spread_km >= 0.0 && c.suitable_weight > 0.0)) {
            return err("cluster weights and spreads must be nonnegative, suitable weights positive");
        }
        if !self.clusters.is_empty() && self.clusters.iter().map(|c| c.weight).sum::<f64>() <= 0.0 {
            return err("cluster weights must not all be zero");
        }
        if !(self.rural_inner_km >= 0.0 && self.rural_outer_km >= self.rural_inner_km) {
            return err("rural annulus must satisfy 0 <= inner <= outer");
        }
        if self.hamlet_size == 0 || self.hamlet_sigma_km < 0.0 {
            return err("hamlets need at least one home and a nonnegative spread");
        }
        if self.rural_suitable_weight <= 0.0 {
            return err("rural_suitable_weight must be positive");
        }
        if self.remote_distance_km <= 0.0 {
            return err("remote_distance_km must be positive");
        }
        if self.utc_offset_minutes.abs() >= 24 * 60 {
            return err("utc offset must be less than a day");
        }
        Ok(())
    }
}

/// Ground truth planted for one vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedVehicle {
    pub vehicle_id: String,
    pub home: GeoPoint,
    pub suitability: Suitability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFleet {
    /// Sorted by vehicle id, then timestamp.
    pub records: Vec<EventRecord>,
    pub planted: Vec<PlantedVehicle>,
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}

/// Splits `total` into integer parts proportional to `weights` (largest
/// remainder, ties to the lower index).
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    let mut left = total - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

fn gaussian(rng: &mut StreamRng) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn quantize(p: GeoPoint) -> GeoPoint {
    let q = |x: f64| (x * 1e6).round() / 1e6;
    GeoPoint::new(q(p.lat()), q(p.lon())).expect("rounding keeps a valid point")
}

fn round_km(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Where each vehicle lives and how suitable it is planted to be.
fn plant_homes(config: &GeneratorConfig, seed: u64) -> Result<Vec<(GeoPoint, f64)>, MobilityError> {
    let n = config.n_vehicles;
    let n_remote = round_half_up(config.remote_share * n as f64).min(n);
    let n_rural = round_half_up(config.rural_share * n as f64).min(n - n_remote);
    let weights: Vec<f64> = config.clusters.iter().map(|c| c.weight).collect();
    let per_cluster = apportion(n - n_remote - n_rural, &weights);

    let mut rng = stream(seed, "homes", 0);
    let centre = config.center;
    let mut out = Vec::with_capacity(n);
    let place = |north: f64, east: f64| {
        centre
            .offset_km(north, east)
            .map_err(|e| MobilityError::Config(format!("home outside coordinate range: {e}")))
    };
    for (cluster, &count) in config.clusters.iter().zip(&per_cluster) {
        for _ in 0..count {
            let (north, east) = cluster.draw(&mut rng);
            out.push((place(north, east)?, cluster.suitable_weight));
        }
    }
    let mut hamlet = HomeCluster::gaussian(0.0, 0.0, config.hamlet_sigma_km, 1.0, config.rural_suitable_weight);
    for i in 0..n_rural {
        if i % config.hamlet_size == 0 {
            // uniform over the annulus area
            let (r0, r1) = (config.rural_inner_km, config.rural_outer_km);
            let r = (r0 * r0 + rng.gen::<f64>() * (r1 * r1 - r0 * r0)).sqrt();
            let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            hamlet.north_km = r * theta.cos();
            hamlet.east_km = r * theta.sin();
        }
        let (north, east) = hamlet.draw(&mut rng);
        out.push((place(north, east)?, hamlet.suitable_weight));
    }
    let phase = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    for k in 0..n_remote {
        let theta = phase + 2.0 * std::f64::consts::PI * k as f64 / n_remote as f64;
        let r = config.remote_distance_km;
        out.push((place(r * theta.cos(), r * theta.sin())?, 1.0));
    }
    // vehicle ids must not reveal the placement component
    out.shuffle(&mut rng);
    Ok(out)
}

/// Exactly `round(f * n)` perfectly suitable vehicles, drawn without
/// replacement with probability proportional to the residents' weights.
fn plant_labels(weights: &[f64], fraction: f64, seed: u64) -> Vec<Suitability> {
    let k = round_half_up(fraction * weights.len() as f64).min(weights.len());
    let mut rng = stream(seed, "labels", 0);
    // Efraimidis–Spirakis keys u^(1/w)
    let mut keyed: Vec<(f64, usize)> =
        weights.iter().enumerate().map(|(i, &w)| (rng.gen::<f64>().powf(1.0 / w), i)).collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut labels = vec![Suitability::NotImmediatelySuitable; weights.len()];
    for &(_, i) in keyed.iter().take(k) {
        labels[i] = Suitability::PerfectlySuitable;
    }
    labels
}

struct Itinerary<'a> {
    id: &'a str,
    records: Vec<EventRecord>,
    position: GeoPoint,
    clock: DateTime<Utc>,
}

impl Itinerary<'_> {
    fn ignition(&mut self, at: DateTime<Utc>) {
        self.clock = at;
        self.records.push(EventRecord {
            vehicle_id: self.id.to_string(),
            event: EventKind::Ignition,
            timestamp: at,
            location: self.position,
            trip_km: None,
        });
    }

    /// Drives `km` of road to `dest`, departing now.
    fn drive(&mut self, dest: GeoPoint, km: f64, speed_kmh: f64) {
        let minutes = ((km / speed_kmh) * 60.0).ceil().max(2.0) as i64;
        self.clock += Duration::minutes(minutes);
        self.position = quantize(dest);
        self.records.push(EventRecord {
            vehicle_id: self.id.to_string(),
            event: EventKind::Shutdown,
            timestamp: self.clock,
            location: self.position,
            trip_km: Some(km),
        });
    }
}

/// Straight-line offset corresponding to `road_km` of driving.
fn destination(from: GeoPoint, road_km: f64, rng: &mut StreamRng) -> GeoPoint {
    let straight = road_km / rng.gen_range(1.2..1.45);
    let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    from.offset_km(straight * theta.cos(), straight * theta.sin()).unwrap_or(from)
}

fn jitter(p: GeoPoint, rng: &mut StreamRng) -> GeoPoint {
    let sigma_km = 0.008;
    p.offset_km(sigma_km * gaussian(rng), sigma_km * gaussian(rng)).unwrap_or(p)
}

fn vehicle_events(
    id: &str,
    home: GeoPoint,
    label: Suitability,
    config: &GeneratorConfig,
    rng: &mut StreamRng,
) -> Vec<EventRecord> {
    let offset = chrono::FixedOffset::east_opt(config.utc_offset_minutes * 60).expect("validated offset");
    let local = |date: NaiveDate, minutes: i64| -> DateTime<Utc> {
        let midnight = offset
            .from_local_datetime(&date.and_time(NaiveTime::MIN))
            .single()
            .expect("fixed offsets are unambiguous");
        (midnight + Duration::minutes(minutes)).with_timezone(&Utc)
    };
    let days = config.days as usize;

    // daily driving targets
    let mut target: Vec<Option<f64>> = (0..days)
        .map(|_| {
            let used = rng.gen::<f64>() >= config.idle_day_prob;
            let km = (4.0 + 35.0 * -(1.0 - rng.gen::<f64>()).ln()).min(110.0);
            used.then_some(km)
        })
        .collect();
    if label == Suitability::NotImmediatelySuitable {
        let n_long = 1 + rng.gen_range(0..3).min(days - 1);
        let mut idx: Vec<usize> = (0..days).collect();
        idx.shuffle(rng);
        for &d in idx.iter().take(n_long) {
            target[d] = Some(rng.gen_range(215.0..420.0));
        }
    }
    // nights spent away; the next day always drives back
    let max_away = days / 4;
    let mut away = vec![false; days];
    let mut n_away = 0;
    for d in 0..days.saturating_sub(1) {
        let prev_away = d > 0 && away[d - 1];
        if target[d].is_some() && !prev_away && n_away < max_away && rng.gen::<f64>() < config.away_night_prob {
            away[d] = true;
            n_away += 1;
            if target[d + 1].is_none() {
                target[d + 1] = Some(0.0);
            }
        }
    }

    let parked_home = quantize(jitter(home, rng));
    let mut it = Itinerary { id, records: Vec::new(), position: parked_home, clock: local(config.start_date, 0) };
    let mut away_leg_km = 0.0;
    for d in 0..days {
        let date = config.start_date + Duration::days(d as i64);
        let Some(total) = target[d] else { continue };
        let speed = rng.gen_range(45.0..85.0);
        it.ignition(local(date, 405 + rng.gen_range(0..120)));
        let mut remaining = total;
        let starts_away = d > 0 && away[d - 1];
        if starts_away {
            it.drive(quantize(jitter(home, rng)), away_leg_km, speed);
            remaining = (total - away_leg_km).max(0.0);
            if remaining > 1.0 {
                it.ignition(it.clock + Duration::minutes(rng.gen_range(10..60)));
            }
        }
        if remaining > 1.0 {
            let out_km = round_km(remaining / 2.0);
            let back_km = round_km(remaining - out_km);
            let dest = destination(home, out_km, rng);
            it.drive(dest, out_km, speed);
            // daytime dwell, back home before 20:30 local
            let travel_back = ((back_km / speed) * 60.0).ceil() as i64 + 1;
            let latest = local(date, 20 * 60 + 30) - Duration::minutes(travel_back);
            let earliest = it.clock + Duration::minutes(20);
            let wanted = it.clock + Duration::minutes(rng.gen_range(60..540));
            let leave = wanted.min(latest).max(earliest);
            it.ignition(leave);
            it.drive(quantize(jitter(home, rng)), back_km, speed);
        }
        if away[d] {
            away_leg_km = round_km(rng.gen_range(12.0..45.0));
            let spot = destination(home, away_leg_km, rng);
            it.ignition(it.clock + Duration::minutes(rng.gen_range(15..50)));
            it.drive(spot, away_leg_km, speed);
        }
    }
    // close the last night with a morning ignition
    let end_date = config.start_date + Duration::days(days as i64);
    it.ignition(local(end_date, 420));
    it.records
}

/// Deterministic synthetic fleet for `(config, seed)`.
pub fn generate_synthetic_fleet(config: &GeneratorConfig, seed: u64) -> Result<SyntheticFleet, MobilityError> {
    use rayon::prelude::*;

    config.validate()?;
    let homes = plant_homes(config, seed)?;
    let weights: Vec<f64> = homes.iter().map(|&(_, w)| w).collect();
    let labels = plant_labels(&weights, config.suitable_fraction, seed);
    let width = config.n_vehicles.to_string().len().max(4);

    let per_vehicle: Vec<(PlantedVehicle, Vec<EventRecord>)> = homes
        .par_iter()
        .zip(labels.par_iter())
        .enumerate()
        .map(|(i, (&(home, _), &label))| {
            let id = format!("V{:0width$}", i + 1);
            let mut rng = stream(seed, "vehicle", i as u64);
            let records = vehicle_events(&id, home, label, config, &mut rng);
            (PlantedVehicle { vehicle_id: id, home, suitability: label }, records)
        })
        .collect();

    let mut planted = Vec::with_capacity(per_vehicle.len());
    let mut records = Vec::new();
    for (p, r) in per_vehicle {
        planted.push(p);
        records.extend(r);
    }
    Ok(SyntheticFleet { records, planted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodata::geodesic_km;
    use crate::mobility::{build_profiles, segment_events, MobilityConfig};

    fn small(n: usize) -> GeneratorConfig {
        GeneratorConfig { n_vehicles: n, days: 14, ..GeneratorConfig::default() }
    }

    #[test]
    fn apportion_is_exact() {
        assert_eq!(apportion(10, &[1.0, 1.0, 1.0]), vec![4, 3, 3]);
        assert_eq!(apportion(7, &[0.0, 2.0]), vec![0, 7]);
        assert_eq!(apportion(0, &[1.0]), vec![0]);
    }

    #[test]
    fn single_vehicle_stream_alternates() {
        let fleet = generate_synthetic_fleet(&small(1), 3).unwrap();
        assert_eq!(fleet.planted.len(), 1);
        let kinds: Vec<_> = fleet.records.iter().map(|r| r.event).collect();
        assert!(kinds.windows(2).all(|w| w[0] != w[1]));
        assert!(fleet.records.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        assert!(segment_events(&fleet.records).warnings.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_synthetic_fleet(&small(40), 11).unwrap();
        let b = generate_synthetic_fleet(&small(40), 11).unwrap();
        let c = generate_synthetic_fleet(&small(40), 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = GeneratorConfig { suitable_fraction: 1.5, ..small(5) };
        assert!(matches!(generate_synthetic_fleet(&bad, 0), Err(MobilityError::Config(_))));
        let zero = GeneratorConfig { n_vehicles: 0, ..small(5) };
        assert!(generate_synthetic_fleet(&zero, 0).is_err());
        let neg = GeneratorConfig { clusters: vec![HomeCluster::gaussian(0.0, 0.0, -1.0, 1.0, 1.0)], ..small(5) };
        assert!(generate_synthetic_fleet(&neg, 0).is_err());
    }

    #[test]
    fn disk_cluster_stays_inside_radius() {
        let cfg = GeneratorConfig {
            clusters: vec![HomeCluster::disk(2.0, -3.0, 1.5, 1.0, 1.0)],
            rural_share: 0.0,
            remote_share: 0.0,
            ..small(300)
        };
        let homes = plant_homes(&cfg, 4).unwrap();
        let centre = cfg.center.offset_km(2.0, -3.0).unwrap();
        let d: Vec<f64> = homes.iter().map(|&(h, _)| geodesic_km(h, centre)).collect();
        assert!(d.iter().all(|&x| x <= 1.5 + 1e-3));
        // uniform over the area: about a quarter fall inside half the radius
        let inner = d.iter().filter(|&&x| x < 0.75).count();
        assert!((50..100).contains(&inner), "{inner}");
    }

    #[test]
    fn hamlets_and_remote_homes_are_placed_apart() {
        let cfg = GeneratorConfig {
            clusters: vec![],
            rural_share: 0.9,
            remote_share: 0.1,
            rural_inner_km: 16.0,
            rural_outer_km: 40.0,
            hamlet_size: 3,
            hamlet_sigma_km: 0.0,
            ..small(30)
        };
        let homes = plant_homes(&cfg, 8).unwrap();
        let centre = cfg.center;
        let remote = homes.iter().filter(|&&(h, _)| geodesic_km(h, centre) > 100.0).count();
        assert_eq!(remote, 3);
        let mut rural: Vec<GeoPoint> =
            homes.iter().map(|&(h, _)| h).filter(|&h| geodesic_km(h, centre) < 100.0).collect();
        assert_eq!(rural.len(), 27);
        rural.sort_by(|a, b| a.lat().total_cmp(&b.lat()));
        // zero spread: every hamlet is three homes on one spot
        let mut spots = rural.clone();
        spots.dedup_by(|a, b| geodesic_km(*a, *b) < 1e-6);
        assert_eq!(spots.len(), 9);
        assert!(rural.iter().all(|&h| (16.0 - 1e-6..=40.0 + 1e-6).contains(&geodesic_km(h, centre))));
    }

    #[test]
    fn round_trip_on_small_fleet() {
        let fleet = generate_synthetic_fleet(&small(120), 5).unwrap();
        let cfg = MobilityConfig::default();
        let built = build_profiles(&fleet.records, &cfg);
        assert!(built.warnings.is_empty());
        assert!(built.excluded.is_empty());
        assert_eq!(built.profiles.len(), fleet.planted.len());
        for (p, truth) in built.profiles.iter().zip(&fleet.planted) {
            assert_eq!(p.vehicle_id, truth.vehicle_id);
            assert!(geodesic_km(p.home, truth.home) < 0.1);
            assert_eq!(p.suitability, truth.suitability);
        }
        let suitable = fleet.planted.iter().filter(|p| p.suitability == Suitability::PerfectlySuitable).count();
        assert_eq!(suitable, round_half_up(0.295 * 120.0));
    }
}
