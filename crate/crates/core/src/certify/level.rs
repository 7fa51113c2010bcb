use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::metric::Edge;

use super::base::internal_pieces;
use super::cluster::{cluster_diameter, Cluster, Origin, Phase4Shape, Space};
use super::tree::ClusterTree;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase2Case {
    /// The edge joins two different cluster paths.
    DistinctPaths,
    /// Same path, the two inner subpaths are disjoint.
    SamePathDisjoint,
    /// Same path, inner subpaths overlap and are replaced by the stretch
    /// between the endpoints.
    SamePathOverlap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase2Info {
    pub case: Phase2Case,
    pub edge: Edge,
    pub cx: usize,
    pub cy: usize,
    /// Minimal subpaths at `cx` and `cy`. On a shared path the inner ones
    /// face each other; on distinct paths inner is the side nearer the
    /// path's first node.
    pub p_inner: Vec<usize>,
    pub p_outer: Vec<usize>,
    pub q_inner: Vec<usize>,
    pub q_outer: Vec<usize>,
    /// The subpath from `cx` to `cy`, overlap case only.
    pub pxy: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sibling {
    /// Draft that absorbed the sibling affix.
    pub host: usize,
    pub nodes: Vec<usize>,
}

/// A level cluster under construction, as a set of lower-level clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Draft {
    pub origin: Origin,
    /// In construction order; Phase-4 drafts list their path in order.
    pub members: Vec<usize>,
    /// Members once Phases 1 and 2 are over.
    pub core: Vec<usize>,
    /// Non-MST edges added by this level.
    pub own_edges: Vec<usize>,
    pub augmented_phase3: bool,
    pub augmented_phase4: bool,
    pub phase4: Option<Phase4Shape>,
    /// The branching cluster a Phase-1 draft was grown around.
    pub branching: Option<usize>,
    pub phase2: Option<Phase2Info>,
    /// For a Phase-4 affix: where the other affix of its path went.
    pub sibling: Option<Sibling>,
    pub undersized: bool,
}

impl Draft {
    fn new(origin: Origin, members: Vec<usize>) -> Draft {
        Draft {
            origin,
            core: members.clone(),
            members,
            own_edges: Vec::new(),
            augmented_phase3: false,
            augmented_phase4: false,
            phase4: None,
            branching: None,
            phase2: None,
            sibling: None,
            undersized: false,
        }
    }

    pub fn from_phase12(&self) -> bool {
        matches!(self.origin, Origin::Phase1 | Origin::Phase2)
    }
}

/// Inputs for building one level from the clusters of the level below.
pub struct LevelInput<'a> {
    pub space: &'a Space<'a>,
    pub prev: &'a [Cluster],
    /// Vertex to lower-level cluster.
    pub owner: &'a [usize],
    pub tree: &'a ClusterTree,
    pub level: usize,
    pub ell: f64,
    pub eps: f64,
    pub g: f64,
}

/// Runs the four phases for one level. Each phase is a method so fixtures
/// can stop between them and inspect the drafts.
pub struct LevelBuilder<'a> {
    pub input: LevelInput<'a>,
    /// Lower-level cluster to draft index.
    pub assign: Vec<usize>,
    pub drafts: Vec<Draft>,
    pub anomalies: Vec<String>,
}

impl<'a> LevelBuilder<'a> {
    pub fn new(input: LevelInput<'a>) -> LevelBuilder<'a> {
        let k = input.tree.len();
        LevelBuilder {
            input,
            assign: vec![NONE; k],
            drafts: Vec::new(),
            anomalies: Vec::new(),
        }
    }

    fn alive(&self) -> Vec<bool> {
        self.assign.iter().map(|&a| a == NONE).collect()
    }

    fn open(&mut self, draft: Draft) -> usize {
        let id = self.drafts.len();
        for &x in &draft.members {
            debug_assert_eq!(self.assign[x], NONE);
            self.assign[x] = id;
        }
        self.drafts.push(draft);
        id
    }

    fn absorb(&mut self, id: usize, nodes: &[usize]) {
        for &x in nodes {
            debug_assert_eq!(self.assign[x], NONE);
            self.assign[x] = id;
            self.drafts[id].members.push(x);
        }
    }

    fn component_of(&self, x: usize, alive: &[bool]) -> Vec<usize> {
        let t = self.input.tree;
        let mut seen = vec![false; t.len()];
        let mut comp = vec![x];
        seen[x] = true;
        let mut i = 0;
        while i < comp.len() {
            let y = comp[i];
            i += 1;
            for z in t.live_neighbors(y, alive) {
                if !seen[z] {
                    seen[z] = true;
                    comp.push(z);
                }
            }
        }
        comp.sort_unstable();
        comp
    }

    fn is_long(&self, nodes: &[usize]) -> bool {
        self.input.tree.subtree_ediam(nodes) >= self.input.ell
    }

    /// Phase 1: grow clusters around branching clusters of long components,
    /// then hand internal path clusters that touch them over (Step 2).
    pub fn phase1(&mut self) {
        let t = self.input.tree;
        let ell = self.input.ell;
        loop {
            let alive = self.alive();
            let mut pick = None;
            for comp in t.components(&alive) {
                if !self.is_long(&comp) {
                    continue;
                }
                if let Some(&x) = comp.iter().find(|&&x| t.live_degree(x, &alive) >= 3) {
                    pick = Some(pick.map_or(x, |p: usize| p.min(x)));
                }
            }
            let Some(x) = pick else { break };
            let mut inside = vec![false; t.len()];
            let mut nodes = vec![x];
            inside[x] = true;
            for y in t.live_neighbors(x, &alive) {
                nodes.push(y);
                inside[y] = true;
            }
            let mut queued = inside.clone();
            let mut queue = VecDeque::new();
            for i in 1..nodes.len() {
                for z in t.live_neighbors(nodes[i], &alive) {
                    if !queued[z] {
                        queued[z] = true;
                        queue.push_back(z);
                    }
                }
            }
            while t.subtree_ediam(&nodes) < ell {
                let Some(z) = queue.pop_front() else { break };
                nodes.push(z);
                inside[z] = true;
                for w in t.live_neighbors(z, &alive) {
                    if !queued[w] {
                        queued[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            let mut d = Draft::new(Origin::Phase1, nodes);
            d.branching = Some(x);
            self.open(d);
        }
        // Step 2.
        loop {
            let alive = self.alive();
            let mut moved = false;
            for comp in t.components(&alive) {
                if !self.is_long(&comp) || !t.is_path(&comp, &alive) {
                    continue;
                }
                let path = t.path_order(&comp, &alive);
                if path.len() < 3 {
                    continue;
                }
                for &x in &path[1..path.len() - 1] {
                    let target = t.lightest_edge_to(&[x], |y| {
                        self.assign[y] != NONE && self.drafts[self.assign[y]].origin == Origin::Phase1
                    });
                    if let Some((_, y)) = target {
                        let id = self.assign[y];
                        self.absorb(id, &[x]);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    break;
                }
            }
            if !moved {
                break;
            }
        }
        for d in &mut self.drafts {
            d.core = d.members.clone();
        }
    }

    /// Long path containing `x` in the current forest, ordered from its
    /// smaller end, with the position of `x`.
    fn long_path(&self, x: usize, alive: &[bool]) -> Option<(Vec<usize>, usize)> {
        let comp = self.component_of(x, alive);
        let t = self.input.tree;
        if !t.is_path(&comp, alive) || !self.is_long(&comp) {
            return None;
        }
        let path = t.path_order(&comp, alive);
        let k = path.iter().position(|&y| y == x)?;
        Some((path, k))
    }

    /// Minimal subpaths of `path` ending at position `k` with effective
    /// diameter at least `ell`, as index ranges `(a..=k, k..=b)`.
    fn arms(&self, path: &[usize], k: usize) -> Option<(usize, usize)> {
        let w = &self.input.tree.weight;
        let ell = self.input.ell;
        let mut a = k;
        let mut left = w[path[k]];
        while left < ell && a > 0 {
            a -= 1;
            left += w[path[a]];
        }
        let mut b = k;
        let mut right = w[path[k]];
        while right < ell && b + 1 < path.len() {
            b += 1;
            right += w[path[b]];
        }
        (left >= ell && right >= ell).then_some((a, b))
    }

    /// Phase 2: level edges between clusters deep inside long paths.
    pub fn phase2(&mut self, level_edges: &[Edge]) {
        let mut edges = level_edges.to_vec();
        crate::metric::sort_edges(&mut edges);
        for e in edges {
            let (cx, cy) = (self.input.owner[e.u], self.input.owner[e.v]);
            if cx == cy || self.assign[cx] != NONE || self.assign[cy] != NONE {
                continue;
            }
            let alive = self.alive();
            let Some((px, kx)) = self.long_path(cx, &alive) else { continue };
            let Some((py, ky)) = self.long_path(cy, &alive) else { continue };
            let Some((ax, bx)) = self.arms(&px, kx) else { continue };
            let Some((ay, by)) = self.arms(&py, ky) else { continue };
            let same = px[0] == py[0];
            let info = if !same {
                Phase2Info {
                    case: Phase2Case::DistinctPaths,
                    edge: e,
                    cx,
                    cy,
                    p_inner: px[ax..=kx].to_vec(),
                    p_outer: px[kx..=bx].to_vec(),
                    q_inner: py[ay..=ky].to_vec(),
                    q_outer: py[ky..=by].to_vec(),
                    pxy: Vec::new(),
                }
            } else {
                // Put x on the left; the inner arms face each other.
                let (lc, rc, kl, kr, al, bl, ar, br) = if kx < ky {
                    (cx, cy, kx, ky, ax, bx, ay, by)
                } else {
                    (cy, cx, ky, kx, ay, by, ax, bx)
                };
                let p = &px;
                let mut info = Phase2Info {
                    case: Phase2Case::SamePathDisjoint,
                    edge: e,
                    cx: lc,
                    cy: rc,
                    p_inner: p[kl..=bl].to_vec(),
                    p_outer: p[al..=kl].to_vec(),
                    q_inner: p[ar..=kr].to_vec(),
                    q_outer: p[kr..=br].to_vec(),
                    pxy: Vec::new(),
                };
                if bl >= ar {
                    info.case = Phase2Case::SamePathOverlap;
                    info.pxy = p[kl..=kr].to_vec();
                    info.p_inner = info.pxy.clone();
                    info.q_inner = info.pxy.clone();
                }
                info
            };
            let mut members = Vec::new();
            for part in [&info.p_outer, &info.p_inner, &info.q_inner, &info.q_outer] {
                for &x in part.iter() {
                    if !members.contains(&x) {
                        members.push(x);
                    }
                }
            }
            let mut d = Draft::new(Origin::Phase2, members);
            if let Some(&idx) = self.input.space.edge_index.get(&e.key()) {
                d.own_edges.push(idx);
            }
            d.phase2 = Some(info);
            self.open(d);
        }
    }

    /// Phase 3: hang every low component on a neighbouring cluster by its
    /// lightest tree edge.
    pub fn phase3(&mut self) {
        let t = self.input.tree;
        let alive = self.alive();
        let first_phases = self.drafts.len();
        for comp in t.components(&alive) {
            if self.is_long(&comp) {
                continue;
            }
            let host = t.lightest_edge_to(&comp, |y| self.assign[y] != NONE).map(|(_, y)| self.assign[y]);
            match host {
                Some(id) => {
                    self.absorb(id, &comp);
                    self.drafts[id].augmented_phase3 = true;
                }
                None => {
                    if first_phases > 0 || comp.len() != t.len() {
                        self.anomalies.push(format!(
                            "orphan component of {} clusters at level {} with no neighbouring cluster",
                            comp.len(),
                            self.input.level
                        ));
                    }
                    let mut d = Draft::new(Origin::Orphan, comp);
                    d.undersized = true;
                    self.open(d);
                }
            }
        }
    }

    /// Phase 4: cut the remaining long paths into pieces of effective
    /// diameter at least `ell`; affixes touching earlier clusters join them.
    pub fn phase4(&mut self) {
        let t = self.input.tree;
        let ell = self.input.ell;
        let prior = self.drafts.len();
        let alive = self.alive();
        let long_bar = 2.0 * self.input.g / self.input.eps + 1.0;
        for comp in t.components(&alive) {
            if !t.is_path(&comp, &alive) {
                self.anomalies.push(format!(
                    "long component of {} clusters at level {} is not a path after Phase 1",
                    comp.len(),
                    self.input.level
                ));
                let mut d = Draft::new(Origin::Phase4, comp);
                d.phase4 = Some(Phase4Shape { long: false, affix: false });
                self.open(d);
                continue;
            }
            let path = t.path_order(&comp, &alive);
            let mut segments: Vec<Vec<usize>> = Vec::new();
            let mut cur = Vec::new();
            let mut sum = 0.0;
            for &x in &path {
                cur.push(x);
                sum += t.weight[x];
                if sum >= ell {
                    segments.push(std::mem::take(&mut cur));
                    sum = 0.0;
                }
            }
            let prior_host = |nodes: &[usize], assign: &[usize]| {
                t.lightest_edge_to(nodes, |y| assign[y] != NONE && assign[y] < prior)
                    .map(|(_, y)| assign[y])
            };
            let mut tail_host = None;
            if !cur.is_empty() {
                match prior_host(&cur, &self.assign) {
                    Some(h) => {
                        tail_host = Some(h);
                        segments.push(cur);
                    }
                    None => match segments.last_mut() {
                        Some(last) => last.extend(cur),
                        None => segments.push(cur),
                    },
                }
            }
            let count = segments.len();
            let head_host = prior_host(&segments[0], &self.assign);
            let tail_host = if count == 1 {
                head_host
            } else {
                tail_host.or_else(|| prior_host(&segments[count - 1], &self.assign))
            };
            let mut hosts = vec![None; count];
            hosts[0] = head_host;
            hosts[count - 1] = tail_host;
            for (s, seg) in segments.iter().enumerate() {
                if let Some(h) = hosts[s] {
                    self.absorb(h, seg);
                    self.drafts[h].augmented_phase4 = true;
                }
            }
            for (s, seg) in segments.iter().enumerate() {
                if hosts[s].is_some() {
                    continue;
                }
                let affix = s == 0 || s == count - 1;
                let mut d = Draft::new(Origin::Phase4, seg.clone());
                d.phase4 = Some(Phase4Shape {
                    long: seg.len() as f64 >= long_bar,
                    affix,
                });
                if affix && count > 1 {
                    let other = if s == 0 { count - 1 } else { 0 };
                    if let Some(h) = hosts[other] {
                        d.sibling = Some(Sibling {
                            host: h,
                            nodes: segments[other].clone(),
                        });
                    }
                }
                self.open(d);
            }
        }
    }

    pub fn run(mut self, level_edges: &[Edge]) -> BuiltLevel {
        self.phase1();
        self.phase2(level_edges);
        self.phase3();
        self.phase4();
        self.finish()
    }

    /// Turns drafts into clusters with exact diameters.
    pub fn finish(self) -> BuiltLevel {
        let LevelBuilder {
            input,
            assign,
            drafts,
            mut anomalies,
        } = self;
        if let Some(x) = assign.iter().position(|&a| a == NONE) {
            anomalies.push(format!("cluster {x} of level {} left unassigned", input.level - 1));
        }
        let space = input.space;
        let mut clusters = Vec::with_capacity(drafts.len());
        let mut paths = Vec::with_capacity(drafts.len());
        for (id, d) in drafts.iter().enumerate() {
            let mut vertices: Vec<usize> = d
                .members
                .iter()
                .flat_map(|&m| input.prev[m].vertices.iter().copied())
                .collect();
            vertices.sort_unstable();
            let mut struct_edges: Vec<usize> = d
                .members
                .iter()
                .flat_map(|&m| input.prev[m].struct_edges.iter().copied())
                .chain(d.own_edges.iter().copied())
                .collect();
            struct_edges.sort_unstable();
            struct_edges.dedup();
            let reuse = d.members.len() == 1 && d.own_edges.is_empty();
            let (diameter, path) = if reuse && !d.from_phase12() {
                (input.prev[d.members[0]].diameter, None)
            } else {
                let dp = cluster_diameter(space, &vertices, &struct_edges);
                if !dp.connected {
                    anomalies.push(format!("level {} cluster {id} is disconnected", input.level));
                }
                (dp.diameter, Some(dp.path))
            };
            paths.push(if d.from_phase12() { path } else { None });
            clusters.push(Cluster {
                id,
                level: input.level,
                center: space.center_of(&vertices),
                members: d.members.clone(),
                struct_edges,
                diameter,
                origin: d.origin,
                augmented_phase3: d.augmented_phase3,
                augmented_phase4: d.augmented_phase4,
                phase4: d.phase4,
                undersized: d.undersized,
                credit_units: 0.0,
                vertices,
            });
        }
        let connecting: Vec<usize> = clusters
            .iter()
            .zip(&drafts)
            .map(|(c, d)| {
                let inner: usize = d.members.iter().map(|&m| internal_pieces(space, &input.prev[m].vertices)).sum();
                internal_pieces(space, &c.vertices) - inner
            })
            .collect();
        BuiltLevel {
            clusters,
            drafts,
            diameter_paths: paths,
            connecting_pieces: connecting,
            assign,
            anomalies,
        }
    }
}

/// Result of the four phases on one level.
#[derive(Clone, Debug)]
pub struct BuiltLevel {
    pub clusters: Vec<Cluster>,
    pub drafts: Vec<Draft>,
    /// Diameter paths of clusters formed in Phases 1 and 2.
    pub diameter_paths: Vec<Option<Vec<usize>>>,
    /// MST pieces joining different members, per cluster.
    pub connecting_pieces: Vec<usize>,
    /// Lower-level cluster to new cluster.
    pub assign: Vec<usize>,
    pub anomalies: Vec<String>,
}

impl BuiltLevel {
    pub fn count(&self, origin: Origin) -> usize {
        self.drafts.iter().filter(|d| d.origin == origin).count()
    }

    /// No cluster formed in Phases 1 and 2.
    pub fn exceptional(&self) -> bool {
        !self.drafts.iter().any(Draft::from_phase12)
    }
}
