//! Skeleton graph and the depth-one skeleton tree of root-to-endpoint paths.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{BinaryShape, Pixel, Skeleton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Endpoint,
    Junction,
    Connection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointClass {
    pub kind: PointKind,
    pub is_root: bool,
}

/// Index of the root: the junction with the largest radius, or the thickest
/// point when there are no junctions. Ties go to the first point in
/// row-major order.
pub fn root_index(skel: &Skeleton) -> usize {
    let junctions: Vec<usize> = (0..skel.len()).filter(|&i| skel.degree(i) >= 3).collect();
    let pool: Vec<usize> = if junctions.is_empty() { (0..skel.len()).collect() } else { junctions };
    let mut best = pool[0];
    for &i in &pool[1..] {
        if skel.radius(i) > skel.radius(best) {
            best = i;
        }
    }
    best
}

/// Degree-based classification of every skeleton point.
pub fn classify_points(skel: &Skeleton) -> Vec<PointClass> {
    let root = root_index(skel);
    (0..skel.len())
        .map(|i| {
            let kind = match skel.degree(i) {
                1 => PointKind::Endpoint,
                2 => PointKind::Connection,
                0 => PointKind::Connection,
                _ => PointKind::Junction,
            };
            PointClass { kind, is_root: i == root }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Jp2jp,
    Jp2ep,
}

/// An endpoint, or a cluster of adjacent junction pixels collapsed to its
/// thickest pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: PointKind,
    /// Representative skeleton index.
    pub point: usize,
    /// Every skeleton index owned by the node, in row-major order.
    pub members: Vec<usize>,
}

/// Points between two nodes. `points` starts and ends with the node pixels
/// the branch attaches to; everything in between is owned by the branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub kind: BranchKind,
    pub points: Vec<usize>,
    pub length: f64,
}

impl Branch {
    pub fn interior(&self) -> &[usize] {
        if self.points.len() <= 2 {
            &[]
        } else {
            &self.points[1..self.points.len() - 1]
        }
    }

    pub fn other(&self, node: usize) -> usize {
        if self.from == node {
            self.to
        } else {
            self.from
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonGraph {
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    /// Skeleton index of the root point.
    pub root: usize,
    node_of: Vec<Option<usize>>,
}

impl SkeletonGraph {
    /// Node owning the given skeleton index, if any.
    pub fn node_of(&self, point: usize) -> Option<usize> {
        self.node_of[point]
    }

    pub fn root_node(&self) -> Option<usize> {
        self.node_of[self.root]
    }

    /// Sum of all branch lengths.
    pub fn total_length(&self) -> f64 {
        self.branches.iter().map(|b| b.length).sum()
    }

    /// Branch masses that partition the skeleton mass: interior radii, plus
    /// the full radius at an endpoint, plus an equal share of each junction
    /// cluster's mass per incident branch end.
    pub fn branch_masses(&self, skel: &Skeleton) -> Vec<f64> {
        let mut ends = vec![0usize; self.nodes.len()];
        for b in &self.branches {
            ends[b.from] += 1;
            ends[b.to] += 1;
        }
        let node_mass: Vec<f64> = self.nodes.iter().map(|n| n.members.iter().map(|&i| skel.radius(i)).sum()).collect();
        self.branches
            .iter()
            .map(|b| {
                let inner: f64 = b.interior().iter().map(|&i| skel.radius(i)).sum();
                inner + node_mass[b.from] / ends[b.from] as f64 + node_mass[b.to] / ends[b.to] as f64
            })
            .collect()
    }
}

fn step_length(a: Pixel, b: Pixel) -> f64 {
    if a.x != b.x && a.y != b.y {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

fn arc_length(skel: &Skeleton, points: &[usize]) -> f64 {
    points.windows(2).map(|w| step_length(skel.point(w[0]), skel.point(w[1]))).sum()
}

/// Nodes are endpoints and junction clusters; branches are traced between
/// them along degree-two points.
pub fn build_skeleton_graph(skel: &Skeleton) -> SkeletonGraph {
    let n = skel.len();
    let degree: Vec<usize> = (0..n).map(|i| skel.degree(i)).collect();
    let mut node_of: Vec<Option<usize>> = vec![None; n];
    let mut nodes = Vec::new();
    for s in 0..n {
        if node_of[s].is_some() || !(degree[s] == 1 || degree[s] >= 3) {
            continue;
        }
        let id = nodes.len();
        let mut members = vec![s];
        node_of[s] = Some(id);
        if degree[s] >= 3 {
            let mut stack = vec![s];
            while let Some(i) = stack.pop() {
                for j in skel.neighbors(i) {
                    if degree[j] >= 3 && node_of[j].is_none() {
                        node_of[j] = Some(id);
                        members.push(j);
                        stack.push(j);
                    }
                }
            }
        }
        members.sort_unstable();
        let mut point = members[0];
        for &m in &members {
            if skel.radius(m) > skel.radius(point) {
                point = m;
            }
        }
        let kind = if degree[s] == 1 { PointKind::Endpoint } else { PointKind::Junction };
        nodes.push(Node { kind, point, members });
    }

    let mut visited = vec![false; n];
    let mut direct = HashSet::new();
    let mut branches = Vec::new();
    for (id, node) in nodes.iter().enumerate() {
        for &m in &node.members {
            for q in skel.neighbors(m) {
                if node_of[q] == Some(id) {
                    continue;
                }
                let points = if node_of[q].is_some() {
                    if !direct.insert((m.min(q), m.max(q))) {
                        continue;
                    }
                    vec![m, q]
                } else {
                    if visited[q] {
                        continue;
                    }
                    let mut points = vec![m, q];
                    visited[q] = true;
                    let (mut prev, mut cur) = (m, q);
                    loop {
                        let Some(next) = skel.neighbors(cur).find(|&x| x != prev) else { break };
                        if node_of[next].is_some() {
                            points.push(next);
                            break;
                        }
                        if visited[next] {
                            break;
                        }
                        visited[next] = true;
                        points.push(next);
                        prev = cur;
                        cur = next;
                    }
                    points
                };
                let last = *points.last().unwrap();
                let Some(to) = node_of[last] else { continue };
                let kind = if node.kind == PointKind::Junction && nodes[to].kind == PointKind::Junction {
                    BranchKind::Jp2jp
                } else {
                    BranchKind::Jp2ep
                };
                let length = arc_length(skel, &points);
                branches.push(Branch { from: id, to, kind, points, length });
            }
        }
    }
    SkeletonGraph { nodes, branches, root: root_index(skel), node_of }
}

/// A root-to-endpoint path over skeleton indices.
#[derive(Clone, Debug, PartialEq)]
pub struct EndPath {
    pub points: Vec<usize>,
    /// Arc length in pixels.
    pub length: f64,
    /// Sum of radii along the path.
    pub mass: f64,
}

impl EndPath {
    pub fn endpoint(&self) -> usize {
        *self.points.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonTree {
    pub root: usize,
    /// Ordered counterclockwise by where each endpoint meets the contour.
    pub end_paths: Vec<EndPath>,
    /// Contour index attached to each end path.
    pub contour_positions: Vec<usize>,
}

/// Shortest pixel paths from the root, as predecessor links.
fn shortest_paths(skel: &Skeleton, root: usize) -> Vec<usize> {
    let n = skel.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(Reverse((Ordered(0.0), root)));
    while let Some(Reverse((Ordered(d), i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for j in skel.neighbors(i) {
            let nd = d + step_length(skel.point(i), skel.point(j));
            if nd < dist[j] {
                dist[j] = nd;
                pred[j] = i;
                heap.push(Reverse((Ordered(nd), j)));
            }
        }
    }
    pred
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Where an end path meets the contour: march outwards along the end
/// direction until leaving the shape, then take the nearest contour pixel.
fn contour_position(skel: &Skeleton, shape: &BinaryShape, path: &[usize]) -> usize {
    let end = skel.point(*path.last().unwrap()).xy();
    let back = skel.point(path[path.len().saturating_sub(7)]).xy();
    let (dx, dy) = (end[0] - back[0], end[1] - back[1]);
    let norm = dx.hypot(dy);
    let mut exit = end;
    if norm > 0.0 {
        let (ux, uy) = (dx / norm, dy / norm);
        let limit = (shape.width() + shape.height()) * 2;
        for k in 1..limit {
            let t = k as f64 * 0.5;
            let p = [end[0] + ux * t, end[1] + uy * t];
            if !shape.get(p[0].round() as i64, p[1].round() as i64) {
                break;
            }
            exit = p;
        }
    }
    let contour = shape.contour();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in contour.iter().enumerate() {
        let d = (c.x as f64 - exit[0]).powi(2) + (c.y as f64 - exit[1]).powi(2);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// One end path per endpoint, each the shortest skeleton path from the
/// root, ordered counterclockwise along the contour of `shape`.
pub fn build_skeleton_tree(skel: &Skeleton, graph: &SkeletonGraph, shape: &BinaryShape) -> Result<SkeletonTree> {
    let root = graph.root;
    let pred = shortest_paths(skel, root);
    let mut paths = Vec::new();
    for node in &graph.nodes {
        if node.kind != PointKind::Endpoint || node.point == root {
            continue;
        }
        let mut points = vec![node.point];
        let mut cur = node.point;
        while cur != root {
            cur = pred[cur];
            if cur == usize::MAX {
                break;
            }
            points.push(cur);
        }
        if cur != root {
            continue;
        }
        points.reverse();
        let length = arc_length(skel, &points);
        let mass = points.iter().map(|&i| skel.radius(i)).sum();
        let pos = contour_position(skel, shape, &points);
        paths.push((pos, EndPath { points, length, mass }));
    }
    if paths.is_empty() {
        return Err(Error::DegenerateSkeleton("skeleton has no endpoints"));
    }
    paths.sort_by_key(|(pos, p)| (*pos, p.endpoint()));
    Ok(SkeletonTree {
        root,
        contour_positions: paths.iter().map(|p| p.0).collect(),
        end_paths: paths.into_iter().map(|p| p.1).collect(),
    })
}

#[derive(Serialize)]
struct NodeDump {
    id: usize,
    kind: PointKind,
    point: [f64; 2],
    members: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct BranchDump {
    from: usize,
    to: usize,
    kind: BranchKind,
    length: f64,
    mass: f64,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct PathDump {
    endpoint: [f64; 2],
    length: f64,
    mass: f64,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct GraphDump {
    root: [f64; 2],
    nodes: Vec<NodeDump>,
    branches: Vec<BranchDump>,
    end_paths: Vec<PathDump>,
}

/// JSON dump of the graph and tree for visualization.
/// `map` converts skeleton pixels to output coordinates.
pub fn debug_json(
    skel: &Skeleton,
    graph: &SkeletonGraph,
    tree: Option<&SkeletonTree>,
    map: &dyn Fn(Pixel) -> [f64; 2],
) -> serde_json::Value {
    let xy = |i: usize| map(skel.point(i));
    let masses = graph.branch_masses(skel);
    let dump = GraphDump {
        root: xy(graph.root),
        nodes: graph
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeDump {
                id,
                kind: n.kind,
                point: xy(n.point),
                members: n.members.iter().map(|&i| xy(i)).collect(),
            })
            .collect(),
        branches: graph
            .branches
            .iter()
            .zip(&masses)
            .map(|(b, &mass)| BranchDump {
                from: b.from,
                to: b.to,
                kind: b.kind,
                length: b.length,
                mass,
                points: b.points.iter().map(|&i| xy(i)).collect(),
            })
            .collect(),
        end_paths: tree
            .map(|t| {
                t.end_paths
                    .iter()
                    .map(|p| PathDump {
                        endpoint: xy(p.endpoint()),
                        length: p.length,
                        mass: p.mass,
                        points: p.points.iter().map(|&i| xy(i)).collect(),
                    })
                    .collect()
            })
            .unwrap_or_default(),
    };
    serde_json::to_value(dump).expect("graph dump is plain data")
}
