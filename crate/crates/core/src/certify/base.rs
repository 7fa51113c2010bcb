use crate::metric::Edge;

use super::cluster::{cluster_diameter, Cluster, Origin, Space};

/// Level-0 clusters: cut the MST of `S'` bottom-up into connected pieces of
/// diameter at least `ell0`. The tree is rooted at its highest vertex and a
/// vertex closes its pending subtree as a cluster as soon as that subtree
/// reaches `ell0`. Whatever is left at the root joins the neighbouring
/// cluster across the lightest piece; if nothing was ever cut the whole
/// tree is a single undersized cluster.
pub fn base_clusters(space: &Space, ell0: f64) -> Vec<Cluster> {
    let n = space.n();
    // Tree children over MST pieces, in id order.
    let root = n - 1;
    let mut parent = vec![usize::MAX; n];
    let mut parent_w = vec![0.0; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(u, idx) in space.adj[v].iter().rev() {
            if space.is_piece[idx] && !seen[u] {
                seen[u] = true;
                parent[u] = v;
                parent_w[u] = space.weight(idx);
                parent_edge[u] = idx;
                stack.push(u);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "MST pieces must span S'");

    let mut height = vec![0.0f64; n];
    let mut diam = vec![0.0f64; n];
    let mut cut = vec![false; n];
    for &v in order.iter().rev() {
        let mut h = 0.0f64;
        let mut d = 0.0f64;
        for &(c, idx) in &space.adj[v] {
            if !space.is_piece[idx] || parent[c] != v || cut[c] {
                continue;
            }
            let reach = height[c] + parent_w[c];
            d = d.max(diam[c]).max(h + reach);
            h = h.max(reach);
        }
        height[v] = h;
        diam[v] = d;
        cut[v] = d >= ell0;
    }

    // Pre-order assignment: a vertex joins the nearest cut vertex above it.
    const RESIDUAL: usize = usize::MAX;
    let mut label = vec![RESIDUAL; n];
    let mut tops = Vec::new();
    for &v in &order {
        label[v] = if cut[v] {
            tops.push(v);
            v
        } else if v == root {
            RESIDUAL
        } else {
            label[parent[v]]
        };
    }

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let undersized = tops.is_empty();
    if undersized {
        groups.push((RESIDUAL, (0..n).collect()));
    } else {
        let mut index = std::collections::HashMap::new();
        for &t in &tops {
            index.insert(t, groups.len());
            groups.push((t, Vec::new()));
        }
        // Lightest piece from the residual into a cut subtree.
        let host = tops
            .iter()
            .filter(|&&t| t != root && label[parent[t]] == RESIDUAL)
            .map(|&t| (space.sp.graph().edges()[parent_edge[t]], t))
            .min_by(|a, b| Edge::order(&a.0, &b.0))
            .map(|(_, t)| t);
        for v in 0..n {
            let l = if label[v] == RESIDUAL {
                host.expect("residual borders a cluster")
            } else {
                label[v]
            };
            groups[index[&l]].1.push(v);
        }
    }
    groups.sort_by_key(|(_, vs)| vs[0]);

    groups
        .into_iter()
        .enumerate()
        .map(|(id, (_, vertices))| {
            let d = cluster_diameter(space, &vertices, &[]);
            let pieces = internal_pieces(space, &vertices);
            Cluster {
                id,
                level: 0,
                center: space.center_of(&vertices),
                members: Vec::new(),
                struct_edges: Vec::new(),
                diameter: d.diameter,
                origin: Origin::Base,
                augmented_phase3: false,
                augmented_phase4: false,
                phase4: None,
                undersized,
                credit_units: pieces as f64 * space.sp.w0(),
                vertices,
            }
        })
        .collect()
}

/// Number of MST pieces with both ends in the sorted vertex set.
pub(crate) fn internal_pieces(space: &Space, vertices: &[usize]) -> usize {
    let mut count = 0;
    for &v in vertices {
        for &(u, idx) in &space.adj[v] {
            if u > v && space.is_piece[idx] && vertices.binary_search(&u).is_ok() {
                count += 1;
            }
        }
    }
    count
}
