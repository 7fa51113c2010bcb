use super::{DisjointSets, GraphError, WeightedGraph};

/// Kruskal's algorithm over the `(weight, u, v)` edge order.
pub fn mst(g: &WeightedGraph) -> Result<WeightedGraph, GraphError> {
    let n = g.n();
    let mut sets = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in g.sorted_edges() {
        if sets.union(e.u, e.v) {
            tree.push(e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    if n > 0 && tree.len() + 1 != n {
        return Err(GraphError::DisconnectedGraph);
    }
    Ok(WeightedGraph::from_trusted(n, tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{metric_graph, Edge, MetricSpace, Norm, PointSet};

    #[test]
    fn tree_input_is_its_own_mst() {
        let g = WeightedGraph::new(4, vec![Edge::new(0, 1, 2.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 3.0)])
            .unwrap();
        let t = mst(&g).unwrap();
        assert_eq!(t.total_weight(), 6.0);
        assert_eq!(t.m(), 3);
    }

    #[test]
    fn unit_square_weight_three() {
        let pts = PointSet::new(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let g = metric_graph(&MetricSpace::from_points(pts, Norm::L2)).unwrap();
        assert_eq!(mst(&g).unwrap().total_weight(), 3.0);
    }

    #[test]
    fn k3_tie_break() {
        let g = WeightedGraph::new(3, vec![Edge::new(1, 2, 1.0), Edge::new(0, 2, 1.0), Edge::new(0, 1, 1.0)])
            .unwrap();
        let t = mst(&g).unwrap();
        let keys: Vec<_> = t.edges().iter().map(Edge::key).collect();
        assert_eq!(keys, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn disconnected_rejected() {
        let g = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        assert!(matches!(mst(&g), Err(GraphError::DisconnectedGraph)));
    }
}
