//! Proximity graph over agent homes and its pruning to a connected core.
//!
//! Two agents are adjacent when their homes are at most `edge_rule_km`
//! apart. Pruning then drops, in order: agents with no neighbour,
//! outliers farther from the mean home than one standard deviation of
//! the home–mean distances, and (to a fixpoint) agents with fewer than
//! `min_degree` neighbours. Whatever remains disconnected is cut down to
//! its largest component.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodata::{centroid, geodesic_km, GeoPoint};
use crate::graph::{Graph, GraphError};
use crate::mobility::{AgentProfile, Suitability};

pub const DEFAULT_EDGE_RULE_KM: f64 = 5.0;
pub const DEFAULT_ISOLATION_KM: f64 = 60.0;
pub const DEFAULT_MIN_DEGREE: usize = 8;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("degenerate fleet: {0} profiles, need at least 2")]
    DegenerateFleet(usize),
    #[error("network vanished under pruning")]
    Vanished,
    #[error("duplicate agent id {0}")]
    DuplicateId(String),
    #[error("unknown agent id {0} in edge list")]
    UnknownId(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed network file: {0}")]
    Format(#[from] serde_json::Error),
}

/// Population or sample standard deviation for the outlier rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SigmaKind {
    #[default]
    Population,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub isolation_km: f64,
    pub edge_rule_km: f64,
    pub min_degree: usize,
    pub sigma: SigmaKind,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            isolation_km: DEFAULT_ISOLATION_KM,
            edge_rule_km: DEFAULT_EDGE_RULE_KM,
            min_degree: DEFAULT_MIN_DEGREE,
            sigma: SigmaKind::Population,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    pub suitability: Suitability,
}

impl NetworkNode {
    pub fn home(&self) -> GeoPoint {
        GeoPoint::new(self.lat, self.lon).expect("node homes are validated on construction")
    }
}

impl From<&AgentProfile> for NetworkNode {
    fn from(p: &AgentProfile) -> Self {
        NetworkNode { id: p.vehicle_id.clone(), lat: p.home.lat(), lon: p.home.lon(), suitability: p.suitability }
    }
}

/// Outlier statistics fixed when a graph was first pruned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierStats {
    pub mu_h: GeoPoint,
    pub sigma_h: f64,
}

/// Undirected proximity graph. Nodes are kept sorted by agent id, so
/// node index order is id order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityGraph {
    nodes: Vec<NetworkNode>,
    graph: Graph,
    pub edge_rule_km: f64,
    /// Set once the graph has been through [`prune`].
    pub outlier_stats: Option<OutlierStats>,
}

impl ProximityGraph {
    pub fn nodes(&self) -> &[NetworkNode] {
        &self.nodes
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.id.as_str().cmp(id)).ok()
    }

    /// Nodes labelled perfectly suitable (the class `C_1`), ascending.
    pub fn suitable_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.nodes[v].suitability == Suitability::PerfectlySuitable).collect()
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        self.graph.degree_histogram()
    }

    /// Components as id lists, ordered by smallest member id.
    pub fn connected_components(&self) -> Vec<Vec<String>> {
        self.graph
            .connected_components()
            .into_iter()
            .map(|c| c.into_iter().map(|v| self.nodes[v].id.clone()).collect())
            .collect()
    }

    /// Builds a graph from nodes and id pairs.
    pub fn from_parts(
        mut nodes: Vec<NetworkNode>,
        edges: &[(String, String)],
        edge_rule_km: f64,
        outlier_stats: Option<OutlierStats>,
    ) -> Result<Self, NetError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(NetError::DuplicateId(w[0].id.clone()));
        }
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let lookup = |id: &String| index.get(id.as_str()).copied().ok_or_else(|| NetError::UnknownId(id.clone()));
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, NetError>>()?;
        let graph = Graph::from_edges(nodes.len(), &pairs)?;
        Ok(ProximityGraph { nodes, graph, edge_rule_km, outlier_stats })
    }

    fn restrict(&self, keep: &[bool]) -> ProximityGraph {
        let (graph, old) = self.graph.induced(keep);
        ProximityGraph {
            nodes: old.iter().map(|&i| self.nodes[i].clone()).collect(),
            graph,
            edge_rule_km: self.edge_rule_km,
            outlier_stats: self.outlier_stats,
        }
    }
}

/// Result of the isolation filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub kept: Vec<AgentProfile>,
    pub removed: Vec<String>,
}

/// Drops agents whose home is farther than `cutoff_km` from every other
/// home.
pub fn preprocess_isolated(profiles: &[AgentProfile], cutoff_km: f64) -> Result<Preprocessed, NetError> {
    if profiles.len() < 2 {
        return Err(NetError::DegenerateFleet(profiles.len()));
    }
    let isolated: Vec<bool> = profiles
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            profiles
                .iter()
                .enumerate()
                .all(|(j, q)| i == j || geodesic_km(p.home, q.home) > cutoff_km)
        })
        .collect();
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for (p, iso) in profiles.iter().zip(isolated) {
        if iso {
            removed.push(p.vehicle_id.clone());
        } else {
            kept.push(p.clone());
        }
    }
    removed.sort();
    Ok(Preprocessed { kept, removed })
}

/// Threshold graph: an edge wherever two homes are at most
/// `edge_rule_km` apart (inclusive).
pub fn build_edges(profiles: &[AgentProfile], edge_rule_km: f64) -> Result<ProximityGraph, NetError> {
    let mut nodes: Vec<NetworkNode> = profiles.iter().map(NetworkNode::from).collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(NetError::DuplicateId(w[0].id.clone()));
    }
    let homes: Vec<GeoPoint> = nodes.iter().map(NetworkNode::home).collect();
    let adj: Vec<Vec<usize>> = homes
        .par_iter()
        .enumerate()
        .map(|(i, &h)| {
            (0..homes.len())
                .filter(|&j| j != i && geodesic_km(h, homes[j]) <= edge_rule_km)
                .collect()
        })
        .collect();
    let graph = Graph::from_adjacency(adj)?;
    Ok(ProximityGraph { nodes, graph, edge_rule_km, outlier_stats: None })
}

/// Which agents were removed at each stage, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub removed_preprocessing: Vec<String>,
    pub removed_remote: Vec<String>,
    pub removed_outliers: Vec<String>,
    pub removed_low_degree: Vec<String>,
    pub removed_disconnected: Vec<String>,
    pub mu_h: GeoPoint,
    pub sigma_h: f64,
    /// Passes of the low-degree rule, including the final one that
    /// removed nothing.
    pub passes: usize,
    pub survivors: usize,
}

impl fmt::Display for PruneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let before = self.survivors
            + self.removed_remote.len()
            + self.removed_outliers.len()
            + self.removed_low_degree.len()
            + self.removed_disconnected.len();
        writeln!(f, "removed by 60 km isolation rule: {}", self.removed_preprocessing.len())?;
        writeln!(f, "agents after preprocessing:      {before}")?;
        writeln!(f, "removed remote (no neighbour):   {}", self.removed_remote.len())?;
        writeln!(
            f,
            "removed outliers:                {} (mu_h = {:.6}, {:.6}; sigma_h = {:.3} km)",
            self.removed_outliers.len(),
            self.mu_h.lat(),
            self.mu_h.lon(),
            self.sigma_h
        )?;
        writeln!(f, "removed almost isolated:         {} ({} passes)", self.removed_low_degree.len(), self.passes)?;
        writeln!(f, "removed outside main component:  {}", self.removed_disconnected.len())?;
        write!(f, "agents in pruned network:        {}", self.survivors)
    }
}

fn outlier_stats(g: &ProximityGraph, alive: &[bool], sigma: SigmaKind) -> Option<OutlierStats> {
    let homes: Vec<GeoPoint> = (0..g.len()).filter(|&v| alive[v]).map(|v| g.nodes[v].home()).collect();
    let mu_h = centroid(&homes).ok()?;
    let dists: Vec<f64> = homes.iter().map(|&h| geodesic_km(h, mu_h)).collect();
    let n = dists.len() as f64;
    let mean = dists.iter().sum::<f64>() / n;
    let ss: f64 = dists.iter().map(|d| (d - mean).powi(2)).sum();
    let denom = match sigma {
        SigmaKind::Population => n,
        SigmaKind::Sample => (n - 1.0).max(1.0),
    };
    Some(OutlierStats { mu_h, sigma_h: (ss / denom).sqrt() })
}

/// Removes nodes of degree below `min_degree` until none remain; returns
/// the number of passes.
fn low_degree_fixpoint(graph: &Graph, alive: &mut [bool], min_degree: usize, removed: &mut Vec<usize>) -> usize {
    let mut deg: Vec<usize> = (0..graph.len())
        .map(|v| graph.neighbors(v).iter().filter(|&&w| alive[w]).count())
        .collect();
    let mut passes = 0;
    loop {
        passes += 1;
        let victims: Vec<usize> = (0..graph.len()).filter(|&v| alive[v] && deg[v] < min_degree).collect();
        if victims.is_empty() {
            return passes;
        }
        for &v in &victims {
            alive[v] = false;
        }
        for &v in &victims {
            for &w in graph.neighbors(v) {
                deg[w] -= 1;
            }
        }
        removed.extend(victims);
    }
}

/// Prunes `graph` to a connected network of minimum degree
/// `config.min_degree`.
///
/// A graph that has already been pruned reuses its recorded outlier
/// statistics, which makes pruning idempotent.
pub fn prune(graph: &ProximityGraph, config: &NetworkConfig) -> Result<(ProximityGraph, PruneReport), NetError> {
    let g = graph.graph();
    let n = graph.len();
    let mut alive = vec![true; n];
    let ids = |vs: &[usize]| -> Vec<String> { vs.iter().map(|&v| graph.nodes[v].id.clone()).collect() };

    let remote: Vec<usize> = (0..n).filter(|&v| g.degree(v) == 0).collect();
    for &v in &remote {
        alive[v] = false;
    }

    let stats = match graph.outlier_stats {
        Some(s) => s,
        None => outlier_stats(graph, &alive, config.sigma).ok_or(NetError::Vanished)?,
    };
    let outliers: Vec<usize> = (0..n)
        .filter(|&v| alive[v] && geodesic_km(graph.nodes[v].home(), stats.mu_h) > stats.sigma_h)
        .collect();
    for &v in &outliers {
        alive[v] = false;
    }

    let mut low = Vec::new();
    let passes = low_degree_fixpoint(g, &mut alive, config.min_degree, &mut low);

    let mut disconnected = Vec::new();
    let (core, old) = g.induced(&alive);
    let comps = core.connected_components();
    if comps.is_empty() {
        return Err(NetError::Vanished);
    }
    if comps.len() > 1 {
        // largest first; equal sizes keep the component with the smallest id
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
            .map(|(i, _)| i)
            .expect("nonempty");
        for (i, comp) in comps.iter().enumerate() {
            if i != best {
                for &v in comp {
                    alive[old[v]] = false;
                    disconnected.push(old[v]);
                }
            }
        }
        disconnected.sort_unstable();
    }

    let mut pruned = graph.restrict(&alive);
    pruned.outlier_stats = Some(stats);
    let mut sorted_low = low;
    sorted_low.sort_unstable();
    let report = PruneReport {
        removed_preprocessing: Vec::new(),
        removed_remote: ids(&remote),
        removed_outliers: ids(&outliers),
        removed_low_degree: ids(&sorted_low),
        removed_disconnected: ids(&disconnected),
        mu_h: stats.mu_h,
        sigma_h: stats.sigma_h,
        passes,
        survivors: pruned.len(),
    };
    Ok((pruned, report))
}

/// Output of the full extraction: isolation filter, edge rule, pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkBuild {
    pub network: ProximityGraph,
    pub report: PruneReport,
    pub preprocessed_count: usize,
}

pub fn extract_network(profiles: &[AgentProfile], config: &NetworkConfig) -> Result<NetworkBuild, NetError> {
    let pre = preprocess_isolated(profiles, config.isolation_km)?;
    let raw = build_edges(&pre.kept, config.edge_rule_km)?;
    let (network, mut report) = prune(&raw, config)?;
    report.removed_preprocessing = pre.removed;
    Ok(NetworkBuild { network, report, preprocessed_count: pre.kept.len() })
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    edge_rule_km: f64,
    nodes: Vec<NetworkNode>,
    edges: Vec<(String, String)>,
    prune_report: Option<PruneReport>,
}

/// Serialises the network as pretty JSON with a fixed key order.
pub fn network_to_json(network: &ProximityGraph, report: Option<&PruneReport>) -> String {
    let file = NetworkFile {
        edge_rule_km: network.edge_rule_km,
        nodes: network.nodes.clone(),
        edges: network
            .graph
            .edges()
            .into_iter()
            .map(|(u, v)| (network.nodes[u].id.clone(), network.nodes[v].id.clone()))
            .collect(),
        prune_report: report.cloned(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("network serialises");
    s.push('\n');
    s
}

pub fn network_from_json(text: &str) -> Result<(ProximityGraph, Option<PruneReport>), NetError> {
    let file: NetworkFile = serde_json::from_str(text)?;
    for n in &file.nodes {
        if GeoPoint::new(n.lat, n.lon).is_err() {
            return Err(NetError::Format(serde::de::Error::custom(format!("invalid home for {}", n.id))));
        }
    }
    let stats = file.prune_report.as_ref().map(|r| OutlierStats { mu_h: r.mu_h, sigma_h: r.sigma_h });
    let g = ProximityGraph::from_parts(file.nodes, &file.edges, file.edge_rule_km, stats)?;
    Ok((g, file.prune_report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn origin() -> GeoPoint {
        GeoPoint::new(44.8, 10.33).unwrap()
    }

    fn agent(id: &str, north: f64, east: f64) -> AgentProfile {
        AgentProfile {
            vehicle_id: id.to_string(),
            home: origin().offset_km(north, east).unwrap(),
            suitability: Suitability::PerfectlySuitable,
            max_daily_km: 10.0,
        }
    }

    /// Agents along a north–south line at the given distances from origin.
    fn line(kms: &[f64]) -> Vec<AgentProfile> {
        kms.iter().enumerate().map(|(i, &k)| agent(&format!("A{i:03}"), k, 0.0)).collect()
    }

    #[test]
    fn preprocessing_examples() {
        let close = line(&[0.0, 1.0]);
        let pre = preprocess_isolated(&close, 60.0).unwrap();
        assert_eq!(pre.kept.len(), 2);
        assert!(pre.removed.is_empty());

        let mut fleet = line(&[0.0, 1.0, 2.0]);
        fleet.push(agent("FAR", 100.0, 0.0));
        let pre = preprocess_isolated(&fleet, 60.0).unwrap();
        assert_eq!(pre.removed, vec!["FAR".to_string()]);
        assert_eq!(pre.kept.len(), 3);

        assert!(matches!(preprocess_isolated(&line(&[0.0]), 60.0), Err(NetError::DegenerateFleet(1))));
    }

    #[test]
    fn edge_rule_examples() {
        let g = build_edges(&line(&[0.0, 4.9]), 5.0).unwrap();
        assert_eq!(g.graph().edge_count(), 1);
        let g = build_edges(&line(&[0.0, 5.1]), 5.0).unwrap();
        assert_eq!(g.graph().edge_count(), 0);
        let g = build_edges(&line(&[0.0, 4.0, 8.0]), 5.0).unwrap();
        assert_eq!(g.graph().edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn boundary_distance_is_inclusive() {
        let a = agent("A", 0.0, 0.0);
        let b = agent("B", 4.0, 0.0);
        let d = geodesic_km(a.home, b.home);
        let g = build_edges(&[a.clone(), b.clone()], d).unwrap();
        assert_eq!(g.graph().edge_count(), 1);
        let g = build_edges(&[a, b], d - 1e-9).unwrap();
        assert_eq!(g.graph().edge_count(), 0);
    }

    /// `n` agents spread on a tight ring: a complete proximity graph.
    fn clique(prefix: &str, n: usize, north: f64, east: f64) -> Vec<AgentProfile> {
        (0..n)
            .map(|i| {
                let a = i as f64 / n as f64 * std::f64::consts::TAU;
                agent(&format!("{prefix}{i:03}"), north + 0.2 * a.cos(), east + 0.2 * a.sin())
            })
            .collect()
    }

    #[test]
    fn fixpoint_graph_is_unchanged() {
        // the farthest home always exceeds sigma unless all homes coincide
        let fleet: Vec<_> = (0..12).map(|i| agent(&format!("C{i:02}"), 1.0, 1.0)).collect();
        let g = build_edges(&fleet, 5.0).unwrap();
        let (p, report) = prune(&g, &NetworkConfig::default()).unwrap();
        assert_eq!(report.sigma_h, 0.0);
        assert_eq!(p.graph(), g.graph());
        assert_eq!(report.passes, 1);
        assert_eq!(report.survivors, 12);
    }

    #[test]
    fn already_pruned_graph_is_a_fixpoint() {
        let mut fleet = clique("C", 30, 0.0, 0.0);
        fleet.extend((0..30).map(|i| agent(&format!("S{i:03}"), 0.05 * i as f64, 0.3)));
        let g = build_edges(&fleet, 5.0).unwrap();
        let (p, _) = prune(&g, &NetworkConfig::default()).unwrap();
        let (again, report) = prune(&p, &NetworkConfig::default()).unwrap();
        assert_eq!(again, p);
        assert_eq!(report.passes, 1);
        assert!(report.removed_outliers.is_empty());
    }

    #[test]
    fn star_collapses_under_degree_rule() {
        let edges: Vec<(usize, usize)> = (1..=20).map(|leaf| (0, leaf)).collect();
        let star = Graph::from_edges(21, &edges).unwrap();
        let mut alive = vec![true; 21];
        let mut removed = Vec::new();
        let passes = low_degree_fixpoint(&star, &mut alive, 8, &mut removed);
        assert!(alive.iter().all(|a| !a));
        assert_eq!(removed.len(), 21);
        assert_eq!(*removed.last().unwrap(), 0);
        assert_eq!(passes, 3);
    }

    #[test]
    fn star_network_vanishes() {
        // leaves see the centre and a few ring neighbours only
        let mut fleet = vec![agent("C", 0.0, 0.0)];
        for i in 0..12 {
            let a = i as f64 / 12.0 * std::f64::consts::TAU;
            fleet.push(agent(&format!("L{i:02}"), 4.5 * a.cos(), 4.5 * a.sin()));
        }
        let g = build_edges(&fleet, 5.0).unwrap();
        assert_eq!(g.graph().max_degree(), Some(12));
        assert!(matches!(prune(&g, &NetworkConfig::default()), Err(NetError::Vanished)));
    }

    #[test]
    fn largest_component_kept() {
        let mut fleet = clique("A", 12, 0.0, 0.0);
        fleet.extend(clique("B", 10, 0.0, 0.0 + 6.0));
        let g = build_edges(&fleet, 5.0).unwrap();
        // outlier stats fixed so only the component rule acts
        let mut g = g;
        g.outlier_stats = Some(OutlierStats { mu_h: origin(), sigma_h: 100.0 });
        let (p, report) = prune(&g, &NetworkConfig::default()).unwrap();
        assert_eq!(p.len(), 12);
        assert_eq!(report.removed_disconnected.len(), 10);
        assert!(p.graph().is_connected());
    }

    #[test]
    fn equal_components_keep_smallest_id() {
        let mut fleet = clique("B", 10, 0.0, 0.0);
        fleet.extend(clique("A", 10, 0.0, 6.0));
        let mut g = build_edges(&fleet, 5.0).unwrap();
        g.outlier_stats = Some(OutlierStats { mu_h: origin(), sigma_h: 100.0 });
        let (p, _) = prune(&g, &NetworkConfig::default()).unwrap();
        assert!(p.nodes().iter().all(|n| n.id.starts_with('A')));
    }

    #[test]
    fn outlier_boundary_is_strict() {
        let g = build_edges(&clique("C", 10, 0.0, 0.0), 5.0).unwrap();
        let mu = centroid(&g.nodes().iter().map(NetworkNode::home).collect::<Vec<_>>()).unwrap();
        let far = g.nodes().iter().map(|n| geodesic_km(n.home(), mu)).fold(0.0, f64::max);
        let mut fixed = g.clone();
        fixed.outlier_stats = Some(OutlierStats { mu_h: mu, sigma_h: far });
        let (p, report) = prune(&fixed, &NetworkConfig::default()).unwrap();
        assert!(report.removed_outliers.is_empty());
        assert_eq!(p.len(), 10);
    }

    #[test]
    fn report_partitions_input() {
        let mut fleet: Vec<_> = (0..15).map(|i| agent(&format!("A{i:02}"), 0.0, 0.0)).collect();
        fleet.extend([(3.0, 0.0), (-3.0, 0.0), (0.0, 3.0), (0.0, -3.0)].iter().enumerate().map(|(i, &(n, e))| agent(&format!("B{i}"), n, e)));
        fleet.push(agent("R", 30.0, 0.0));
        fleet.push(agent("Q", 0.0, 12.0));
        let g = build_edges(&fleet, 5.0).unwrap();
        let (p, r) = prune(&g, &NetworkConfig::default()).unwrap();
        let mut all: Vec<String> = r
            .removed_remote
            .iter()
            .chain(&r.removed_outliers)
            .chain(&r.removed_low_degree)
            .chain(&r.removed_disconnected)
            .cloned()
            .chain(p.nodes().iter().map(|n| n.id.clone()))
            .collect();
        let before = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), before);
        assert_eq!(all.len(), fleet.len());
        assert_eq!(r.removed_remote, vec!["Q".to_string(), "R".to_string()]);
        assert_eq!(r.removed_outliers.len(), 4);
        assert_eq!(p.len(), 15);
    }

    #[test]
    fn json_round_trip() {
        let mut fleet = clique("A", 12, 0.0, 0.0);
        fleet[3].suitability = Suitability::NotImmediatelySuitable;
        let mut g = build_edges(&fleet, 5.0).unwrap();
        g.outlier_stats = Some(OutlierStats { mu_h: origin(), sigma_h: 1.0 });
        let (p, r) = prune(&g, &NetworkConfig::default()).unwrap();
        let text = network_to_json(&p, Some(&r));
        let (back, r2) = network_from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(r2.as_ref(), Some(&r));
        assert_eq!(network_to_json(&back, r2.as_ref()), text);
        let first_edge = text.find("\"edges\"").unwrap();
        assert!(text[..first_edge].find("\"nodes\"").is_some());
    }

    #[test]
    fn json_rejects_unknown_ids() {
        let text = r#"{"edge_rule_km":5.0,"nodes":[{"id":"a","lat":1.0,"lon":1.0,"suitability":"perfectly_suitable"}],"edges":[["a","b"]],"prune_report":null}"#;
        assert!(matches!(network_from_json(text), Err(NetError::UnknownId(_))));
    }

    fn random_fleet() -> impl Strategy<Value = Vec<AgentProfile>> {
        proptest::collection::vec((-8.0f64..8.0, -8.0f64..8.0), 10..80).prop_map(|pts| {
            pts.into_iter().enumerate().map(|(i, (n, e))| agent(&format!("P{i:03}"), n, e)).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pruned_graph_invariants(fleet in random_fleet()) {
            let g = build_edges(&fleet, 5.0).unwrap();
            if let Ok((p, _)) = prune(&g, &NetworkConfig::default()) {
                prop_assert!(p.graph().is_connected());
                prop_assert!(p.graph().min_degree().unwrap() >= 8);
                for v in 0..p.len() {
                    for &w in p.graph().neighbors(v) {
                        prop_assert!(p.graph().has_edge(w, v));
                    }
                }
                let (again, _) = prune(&p, &NetworkConfig::default()).unwrap();
                prop_assert_eq!(again, p);
            }
        }

        #[test]
        fn degree_fixpoint_is_monotone(fleet in random_fleet(), drop in 0usize..80) {
            let g = build_edges(&fleet, 5.0).unwrap();
            let n = g.len();
            let mut alive = vec![true; n];
            low_degree_fixpoint(g.graph(), &mut alive, 8, &mut Vec::new());
            let mut alive2 = vec![true; n];
            alive2[drop % n] = false;
            low_degree_fixpoint(g.graph(), &mut alive2, 8, &mut Vec::new());
            for v in 0..n {
                prop_assert!(!alive2[v] || alive[v]);
            }
        }
    }
}
