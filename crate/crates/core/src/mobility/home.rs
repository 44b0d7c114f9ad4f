use chrono::{Duration, NaiveDateTime, NaiveTime};

use super::{MobilityConfig, Stop};
use crate::geodata::{centroid, geodesic_km, GeoPoint};

fn overlaps_night(stop: &Stop, config: &MobilityConfig) -> bool {
    let offset = config.offset();
    let start = stop.start.with_timezone(&offset).naive_local();
    let end = stop.end.with_timezone(&offset).naive_local();
    let night = config.night;
    let at = |date: chrono::NaiveDate, hour: u32| -> NaiveDateTime {
        date.and_time(NaiveTime::from_hms_opt(hour % 24, 0, 0).expect("hour < 24"))
    };
    let mut day = start.date() - Duration::days(1);
    while day <= end.date() {
        let window_start = at(day, night.start_hour);
        let window_end = if night.start_hour > night.end_hour {
            at(day + Duration::days(1), night.end_hour)
        } else {
            at(day, night.end_hour)
        };
        if start < window_end && end > window_start {
            return true;
        }
        day += Duration::days(1);
    }
    false
}

/// Stops longer than `overnight_min_hours` that intersect the night
/// window at least partially.
pub fn detect_overnight_stops(stops: &[Stop], config: &MobilityConfig) -> Vec<Stop> {
    stops
        .iter()
        .filter(|s| s.duration_hours() > config.overnight_min_hours && overlaps_night(s, config))
        .cloned()
        .collect()
}

struct Cluster {
    members: Vec<GeoPoint>,
    centre: GeoPoint,
}

/// Home location: the centroid of the first cluster of overnight stops
/// holding at least `home_min_share` of them.
///
/// Overnight stops are clustered greedily in chronological order; a stop
/// joins the nearest cluster whose running centroid lies within
/// `cluster_radius_km`, otherwise it opens a new cluster.
pub fn infer_home(stops: &[Stop], config: &MobilityConfig) -> Option<GeoPoint> {
    let mut overnight = detect_overnight_stops(stops, config);
    if overnight.is_empty() {
        return None;
    }
    overnight.sort_by_key(|s| s.start);

    let mut clusters: Vec<Cluster> = Vec::new();
    for stop in &overnight {
        let nearest = clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (i, geodesic_km(c.centre, stop.location)))
            .filter(|&(_, d)| d <= config.cluster_radius_km)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, _)) => {
                let c = &mut clusters[i];
                c.members.push(stop.location);
                c.centre = centroid(&c.members).expect("nonempty cluster");
            }
            None => clusters.push(Cluster { members: vec![stop.location], centre: stop.location }),
        }
    }

    let total = overnight.len() as f64;
    clusters
        .iter()
        .find(|c| c.members.len() as f64 >= config.home_min_share * total)
        .map(|c| c.centre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn utc_config() -> MobilityConfig {
        MobilityConfig { utc_offset_minutes: 0, ..MobilityConfig::default() }
    }

    fn stop_at(loc: GeoPoint, day: u32, start_h: u32, hours: i64) -> Stop {
        let start = Utc.with_ymd_and_hms(2017, 9, day, start_h, 0, 0).unwrap();
        Stop { vehicle_id: "v".into(), location: loc, start, end: start + Duration::hours(hours) }
    }

    fn home() -> GeoPoint {
        GeoPoint::new(44.80, 10.33).unwrap()
    }

    #[test]
    fn overnight_examples() {
        let cfg = utc_config();
        let short = stop_at(home(), 1, 9, 6);
        let night = stop_at(home(), 1, 21, 10);
        let day_long = stop_at(home(), 1, 8, 8);
        let kept = detect_overnight_stops(&[short, night.clone(), day_long], &cfg);
        assert_eq!(kept, vec![night]);
    }

    #[test]
    fn exactly_seven_hours_is_not_long() {
        let cfg = utc_config();
        assert!(detect_overnight_stops(&[stop_at(home(), 1, 23, 7)], &cfg).is_empty());
    }

    #[test]
    fn local_offset_shifts_night() {
        // 13:00–21:30 UTC is 22:00–06:30 local at +9h
        let cfg = MobilityConfig { utc_offset_minutes: 9 * 60, ..MobilityConfig::default() };
        let start = Utc.with_ymd_and_hms(2017, 9, 1, 13, 0, 0).unwrap();
        let s = Stop { vehicle_id: "v".into(), location: home(), start, end: start + Duration::minutes(510) };
        assert_eq!(detect_overnight_stops(&[s.clone()], &cfg).len(), 1);
        assert!(detect_overnight_stops(&[s], &utc_config()).is_empty());
    }

    #[test]
    fn single_location_home() {
        let stops: Vec<_> = (1..=10).map(|d| stop_at(home(), d, 20, 11)).collect();
        assert_eq!(infer_home(&stops, &utc_config()), Some(home()));
    }

    #[test]
    fn majority_cluster_centroid() {
        let near: Vec<GeoPoint> = (0..6).map(|i| home().offset_km(0.01 * i as f64, 0.0).unwrap()).collect();
        let far = home().offset_km(10.0, 0.0).unwrap();
        let mut stops: Vec<_> = near.iter().enumerate().map(|(i, &p)| stop_at(p, i as u32 + 1, 20, 11)).collect();
        stops.extend((0..4).map(|i| stop_at(far, i + 10, 20, 11)));
        let got = infer_home(&stops, &utc_config()).unwrap();
        assert_eq!(got, centroid(&near).unwrap());
    }

    #[test]
    fn no_majority_no_home() {
        let stops: Vec<_> = (0..10)
            .map(|i| {
                let p = home().offset_km(2.0 * (i / 2) as f64, 0.0).unwrap();
                stop_at(p, i + 1, 20, 11)
            })
            .collect();
        assert_eq!(infer_home(&stops, &utc_config()), None);
    }

    #[test]
    fn half_share_is_enough() {
        let far = home().offset_km(10.0, 0.0).unwrap();
        let mut stops: Vec<_> = (0..5).map(|i| stop_at(home(), i + 1, 20, 11)).collect();
        stops.extend((0..5).map(|i| stop_at(far, i + 10, 20, 11)));
        assert_eq!(infer_home(&stops, &utc_config()), Some(home()));
    }

    #[test]
    fn no_overnight_no_home() {
        assert_eq!(infer_home(&[stop_at(home(), 1, 9, 3)], &utc_config()), None);
        assert_eq!(infer_home(&[], &utc_config()), None);
    }
}
