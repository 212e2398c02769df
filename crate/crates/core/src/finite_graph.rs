//! Plain finite simple graphs, used for kernels, class templates and
//! materialized truncations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// A finite simple graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraph {
    #[serde(rename = "n")]
    pub vertex_count: u32,
    #[serde(default)]
    pub edges: BTreeSet<(u32, u32)>,
}

impl FiniteGraph {
    pub fn new(vertex_count: u32) -> Self {
        FiniteGraph { vertex_count, edges: BTreeSet::new() }
    }

    pub fn with_edges(vertex_count: u32, edges: &[(u32, u32)]) -> Self {
        let mut g = FiniteGraph::new(vertex_count);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Inserts an undirected edge, normalizing endpoint order. Loops are
    /// ignored; validation reports them separately.
    pub fn add_edge(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.insert((a, b));
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.contains(&(a, b))
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Checks that all edge endpoints are in range and no loops slipped in
    /// through deserialization.
    pub fn is_well_formed(&self) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| a < b && b < self.vertex_count)
    }

    /// Connected in the ordinary sense; the empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let n = self.vertex_count as usize;
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected components as sorted vertex lists, sorted by least vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count as usize;
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<u32>> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start as u32];
            comp[start] = id;
            let mut stack = vec![start as u32];
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Shortest path between two vertices by BFS, ties resolved toward
    /// smaller vertex indices so the result is canonical.
    pub fn shortest_path(&self, from: u32, to: u32) -> Option<Vec<u32>> {
        let n = self.vertex_count as usize;
        if from as usize >= n || to as usize >= n {
            return None;
        }
        let mut pred = vec![u32::MAX; n];
        let mut dist = vec![u32::MAX; n];
        dist[from as usize] = 0;
        let mut frontier = vec![from];
        while !frontier.is_empty() && dist[to as usize] == u32::MAX {
            let mut next = Vec::new();
            for &v in &frontier {
                let mut ws: Vec<u32> = self.neighbors(v).collect();
                ws.sort_unstable();
                for w in ws {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v as usize] + 1;
                        pred[w as usize] = v;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        if dist[to as usize] == u32::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = pred[cur as usize];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_components() {
        let g = FiniteGraph::with_edges(5, &[(0, 1), (1, 2), (3, 4)]);
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_connected());
    }

    #[test]
    fn shortest_path_prefers_small_indices() {
        // Two length-2 routes from 0 to 3: via 1 or via 2.
        let g = FiniteGraph::with_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(g.shortest_path(0, 3), Some(vec![0, 1, 3]));
    }

    #[test]
    fn loops_dropped() {
        let mut g = FiniteGraph::new(2);
        g.add_edge(1, 1);
        assert!(g.edges.is_empty());
    }
}
