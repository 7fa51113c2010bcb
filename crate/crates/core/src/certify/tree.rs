use crate::metric::{DisjointSets, Edge};

use super::cluster::{Cluster, Space};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    /// The MST piece of `S'` joining the two clusters.
    pub piece: usize,
}

/// Clusters of one level joined by MST pieces. Pieces are taken in
/// `(weight, u, v)` order and one that would close a cycle is left out of
/// the tree, which happens once a Phase-2 cluster has two MST components.
#[derive(Clone, Debug)]
pub struct ClusterTree {
    /// Node weights: the cluster diameters.
    pub weight: Vec<f64>,
    pub edges: Vec<TreeEdge>,
    /// Per node: `(neighbor, tree edge index)` sorted by neighbor.
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl ClusterTree {
    pub fn new(space: &Space, clusters: &[Cluster], owner: &[usize]) -> ClusterTree {
        let k = clusters.len();
        let g = space.sp.graph();
        let mut free: Vec<(Edge, usize)> = space
            .sp
            .mst_pieces()
            .filter(|&i| {
                let e = g.edges()[i];
                owner[e.u] != owner[e.v]
            })
            .map(|i| (g.edges()[i], i))
            .collect();
        free.sort_by(|a, b| a.0.order(&b.0));
        let mut sets = DisjointSets::new(k);
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); k];
        for (e, piece) in free {
            let (a, b) = (owner[e.u], owner[e.v]);
            if sets.union(a, b) {
                adj[a].push((b, edges.len()));
                adj[b].push((a, edges.len()));
                edges.push(TreeEdge { a, b, piece });
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        ClusterTree {
            weight: clusters.iter().map(|c| c.diameter).collect(),
            edges,
            adj,
        }
    }

    /// A tree built from explicit node weights and edges, for fixtures.
    pub fn from_parts(weight: Vec<f64>, edges: Vec<TreeEdge>) -> ClusterTree {
        let mut adj = vec![Vec::new(); weight.len()];
        for (i, e) in edges.iter().enumerate() {
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        ClusterTree { weight, edges, adj }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// Neighbors of `x` for which `alive` holds.
    pub fn live_neighbors<'a>(&'a self, x: usize, alive: &'a [bool]) -> impl Iterator<Item = usize> + 'a {
        self.adj[x].iter().map(|&(y, _)| y).filter(move |&y| alive[y])
    }

    pub fn live_degree(&self, x: usize, alive: &[bool]) -> usize {
        self.live_neighbors(x, alive).count()
    }

    /// Connected components of the live nodes, each sorted, listed by
    /// smallest node.
    pub fn components(&self, alive: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if !alive[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for y in self.live_neighbors(x, alive) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Sum of node weights along a path.
    pub fn path_ediam(&self, path: &[usize]) -> f64 {
        path.iter().map(|&x| self.weight[x]).sum()
    }

    /// Effective diameter of the subtree induced by `nodes`: the largest
    /// node-weight sum over its paths.
    pub fn subtree_ediam(&self, nodes: &[usize]) -> f64 {
        if nodes.is_empty() {
            return 0.0;
        }
        let mut inside = vec![false; self.len()];
        for &x in nodes {
            inside[x] = true;
        }
        let root = nodes[0];
        let mut order = vec![root];
        let mut parent = vec![usize::MAX; self.len()];
        parent[root] = root;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for y in self.live_neighbors(x, &inside) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
        }
        let mut down = vec![0.0f64; self.len()];
        let mut best = 0.0f64;
        for &x in order.iter().rev() {
            let (mut first, mut second) = (0.0f64, 0.0f64);
            for y in self.live_neighbors(x, &inside) {
                if parent[y] == x && y != root {
                    let d = down[y];
                    if d > first {
                        second = first;
                        first = d;
                    } else if d > second {
                        second = d;
                    }
                }
            }
            down[x] = self.weight[x] + first;
            best = best.max(self.weight[x] + first + second);
        }
        best
    }

    /// `true` when the nodes form a path in the live forest.
    pub fn is_path(&self, nodes: &[usize], alive: &[bool]) -> bool {
        nodes.iter().all(|&x| self.live_degree(x, alive) <= 2)
    }

    /// Orders a path component from its endpoint with the smaller id.
    pub fn path_order(&self, nodes: &[usize], alive: &[bool]) -> Vec<usize> {
        if nodes.len() == 1 {
            return nodes.to_vec();
        }
        let start = *nodes
            .iter()
            .filter(|&&x| self.live_degree(x, alive) <= 1)
            .min()
            .expect("a path has two ends");
        let mut out = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = self.live_neighbors(cur, alive).find(|&y| y != prev);
            match next {
                Some(y) => {
                    out.push(y);
                    prev = cur;
                    cur = y;
                }
                None => break,
            }
        }
        out
    }

    /// Lightest tree edge from `nodes` to a node accepted by `target`,
    /// returned as `(tree edge index, node outside)`.
    pub fn lightest_edge_to<F>(&self, nodes: &[usize], target: F) -> Option<(usize, usize)>
    where
        F: Fn(usize) -> bool,
    {
        let mut best: Option<(usize, usize)> = None;
        for &x in nodes {
            for &(y, t) in &self.adj[x] {
                if target(y) && best.map_or(true, |b| t < b.0) {
                    best = Some((t, y));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(weights: &[f64], edges: &[(usize, usize)]) -> ClusterTree {
        ClusterTree::from_parts(
            weights.to_vec(),
            edges.iter().enumerate().map(|(i, &(a, b))| TreeEdge { a, b, piece: i }).collect(),
        )
    }

    #[test]
    fn ediam_sums_node_weights() {
        let t = tree(&[1.0, 2.0, 3.0, 10.0], &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(t.path_ediam(&[0, 1, 2]), 6.0);
        assert_eq!(t.subtree_ediam(&[0, 1, 2, 3]), 15.0);
        assert_eq!(t.subtree_ediam(&[2]), 3.0);
    }

    #[test]
    fn components_and_paths() {
        let t = tree(&[1.0; 5], &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let alive = vec![true, true, false, true, true];
        assert_eq!(t.components(&alive), vec![vec![0, 1], vec![3, 4]]);
        let all = vec![true; 5];
        assert_eq!(t.path_order(&[0, 1, 2, 3, 4], &all), vec![0, 1, 2, 3, 4]);
        let t2 = tree(&[1.0; 3], &[(2, 0), (0, 1)]);
        assert_eq!(t2.path_order(&[0, 1, 2], &[true; 3]), vec![1, 0, 2]);
    }
}
