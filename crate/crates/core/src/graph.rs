//! Simple undirected graphs stored as sorted adjacency lists.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge endpoint {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("adjacency is not symmetric between {0} and {1}")]
    Asymmetric(usize, usize),
}

/// Undirected simple graph over nodes `0..n`.
///
/// Neighbour lists are sorted and free of duplicates; `v ∈ adj(w)` iff
/// `w ∈ adj(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::NodeOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::NodeOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    /// Wraps pre-built adjacency lists after checking they describe a
    /// simple undirected graph.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let n = adj.len();
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &w in list.iter() {
                if w >= n {
                    return Err(GraphError::NodeOutOfRange(w, n));
                }
                if w == v {
                    return Err(GraphError::SelfLoop(v));
                }
            }
        }
        let g = Graph { adj };
        for v in 0..n {
            for &w in g.neighbors(v) {
                if g.adj[w].binary_search(&v).is_err() {
                    return Err(GraphError::Asymmetric(v, w));
                }
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each edge once as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).max()
    }

    /// Induced subgraph on the nodes with `keep[v] == true`. Returns the
    /// subgraph and the original index of each retained node.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let old_of_new: Vec<usize> = (0..self.len()).filter(|&v| keep[v]).collect();
        let mut new_of_old = vec![usize::MAX; self.len()];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let adj = old_of_new
            .iter()
            .map(|&old| {
                self.adj[old]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| new_of_old[w])
                    .collect()
            })
            .collect();
        (Graph { adj }, old_of_new)
    }

    /// Connected components, each sorted ascending, ordered by their
    /// smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Map from degree to the number of nodes having it.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for list in &self.adj {
            *hist.entry(list.len()).or_insert(0) += 1;
        }
        hist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(triangle().degree_histogram(), BTreeMap::from([(2, 3)]));
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree_histogram(), BTreeMap::from([(1, 2), (2, 1)]));
    }

    #[test]
    fn component_examples() {
        assert_eq!(triangle().connected_components(), vec![vec![0, 1, 2]]);
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let comps = two.connected_components();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert!(Graph::empty(0).connected_components().is_empty());
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Graph::from_edges(2, &[(0, 2)]), Err(GraphError::NodeOutOfRange(2, 2)));
        assert_eq!(
            Graph::from_adjacency(vec![vec![1], vec![]]),
            Err(GraphError::Asymmetric(0, 1))
        );
    }

    #[test]
    fn induced_reindexes() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (sub, map) = g.induced(&[false, true, true, true]);
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.edges(), vec![(0, 1), (1, 2)]);
    }

    proptest! {
        #[test]
        fn edges_round_trip(n in 1usize..15, raw in proptest::collection::vec((0usize..15, 0usize..15), 0..40)) {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v)| u < &n && v < &n && u != v).collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            let again = Graph::from_edges(n, &g.edges()).unwrap();
            prop_assert_eq!(&g, &again);
            prop_assert_eq!(g.degree_histogram().values().sum::<usize>(), n);
            prop_assert_eq!(g.connected_components().iter().map(Vec::len).sum::<usize>(), n);
            for v in 0..n {
                for &w in g.neighbors(v) {
                    prop_assert!(g.has_edge(w, v));
                }
            }
        }
    }
}
