//! Fixed-length per-endpoint features, the spine-like axis, and the
//! assembled shape representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{
    distance_transform, extract_skeleton, prune_skeleton, BinaryShape, Pixel, Skeleton, DEFAULT_PRUNE_SIGNIFICANCE,
};
use crate::skeltree::{build_skeleton_graph, build_skeleton_tree, BranchKind, PointKind, SkeletonGraph, SkeletonTree};

/// Samples per quantized end path.
pub const SAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineParams {
    pub alpha: f64,
    pub beta: f64,
    pub threshold: f64,
}

impl Default for SpineParams {
    fn default() -> Self {
        SpineParams { alpha: 0.65, beta: 0.3, threshold: 0.224 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantization {
    Uniform,
    #[default]
    Uneven,
}

/// Arc-length fractions of the samples. Uneven sampling puts 25 samples on
/// the first 80% of the path (starting at the root) and 25 on the last 20%
/// (ending at the endpoint).
pub fn sample_fractions(q: Quantization) -> [f64; SAMPLES] {
    let mut t = [0.0; SAMPLES];
    for (k, v) in t.iter_mut().enumerate() {
        *v = match q {
            Quantization::Uniform => k as f64 / (SAMPLES - 1) as f64,
            Quantization::Uneven if k < 25 => 0.8 * k as f64 / 24.0,
            Quantization::Uneven => 0.8 + 0.2 * (k - 24) as f64 / 25.0,
        };
    }
    t
}

fn cumulative_arc(xy: &[[f64; 2]]) -> Vec<f64> {
    let mut arc = Vec::with_capacity(xy.len());
    let mut s = 0.0;
    for (i, p) in xy.iter().enumerate() {
        if i > 0 {
            s += (p[0] - xy[i - 1][0]).hypot(p[1] - xy[i - 1][1]);
        }
        arc.push(s);
    }
    arc
}

/// Resample radii and coordinates at the given arc fractions with linear
/// interpolation between consecutive path points.
pub fn resample(xy: &[[f64; 2]], radii: &[f64], fractions: &[f64]) -> (Vec<f64>, Vec<[f64; 2]>) {
    assert_eq!(xy.len(), radii.len());
    assert!(!xy.is_empty());
    let arc = cumulative_arc(xy);
    let total = *arc.last().unwrap();
    let mut r = Vec::with_capacity(fractions.len());
    let mut p = Vec::with_capacity(fractions.len());
    let mut seg = 0;
    for &f in fractions {
        let s = f * total;
        while seg + 2 < arc.len() && arc[seg + 1] < s {
            seg += 1;
        }
        if arc.len() == 1 || total == 0.0 {
            r.push(radii[0]);
            p.push(xy[0]);
            continue;
        }
        let span = arc[seg + 1] - arc[seg];
        let w = if span > 0.0 { ((s - arc[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
        r.push(radii[seg] * (1.0 - w) + radii[seg + 1] * w);
        p.push([xy[seg][0] * (1.0 - w) + xy[seg + 1][0] * w, xy[seg][1] * (1.0 - w) + xy[seg + 1][1] * w]);
    }
    (r, p)
}

pub fn quantize_uniform(xy: &[[f64; 2]], radii: &[f64]) -> Vec<f64> {
    resample(xy, radii, &sample_fractions(Quantization::Uniform)).0
}

pub fn quantize_uneven(xy: &[[f64; 2]], radii: &[f64]) -> Vec<f64> {
    resample(xy, radii, &sample_fractions(Quantization::Uneven)).0
}

pub fn path_mass(radii: &[f64]) -> f64 {
    radii.iter().sum()
}

/// Features of one end path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndFeature {
    /// Radius profile normalized by the maximal radius.
    pub lhat: Vec<f64>,
    /// Normalized mass.
    pub mhat: f64,
    /// Normalized length.
    pub lhat_len: f64,
    /// Alignment with the spine-like axis.
    pub v: f64,
    pub endpoint: [f64; 2],
    /// Path coordinates at the same arc positions as `lhat`.
    pub path: Vec<[f64; 2]>,
}

/// Axis from the root (`x1, y1`) to a node directly linked to it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineAxis {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl SpineAxis {
    pub fn vector(&self) -> [f64; 2] {
        [self.x2 - self.x1, self.y2 - self.y1]
    }
}

/// Absolute cosine between the axis and the root-to-endpoint vector.
pub fn spatial_value(root: [f64; 2], endpoint: [f64; 2], axis: [f64; 2]) -> Result<f64> {
    let v = [endpoint[0] - root[0], endpoint[1] - root[1]];
    let (na, nv) = (axis[0].hypot(axis[1]), v[0].hypot(v[1]));
    if na == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok(((axis[0] * v[0] + axis[1] * v[1]) / (na * nv)).abs().min(1.0))
}

/// Scores of one branch incident to the root.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchScore {
    pub kind: BranchKind,
    /// Skeleton index of the node at the far end from the root.
    pub node_point: usize,
    pub node_is_junction: bool,
    pub mhat: f64,
    pub lhat: f64,
    pub ml: f64,
    pub dense: f64,
    pub smooth: f64,
    pub combined: f64,
}

fn population_std(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

struct RawBranch {
    kind: BranchKind,
    points: Vec<usize>,
    mass: f64,
    length: f64,
    /// Far node point and whether it is a junction, for branches at the root.
    at_root: Option<(usize, bool)>,
}

fn raw_branches(skel: &Skeleton, graph: &SkeletonGraph) -> Vec<RawBranch> {
    let masses = graph.branch_masses(skel);
    let root_node = graph.root_node();
    let mut out = Vec::new();
    for (b, &mass) in graph.branches.iter().zip(&masses) {
        let at_root = match root_node {
            Some(r) if (b.from == r) != (b.to == r) => {
                let other = &graph.nodes[b.other(r)];
                Some((other.point, other.kind == PointKind::Junction))
            }
            _ => None,
        };
        if root_node.is_none() {
            if let Some(k) = b.points.iter().position(|&i| i == graph.root) {
                // The root sits inside a junction-free path: score the two
                // halves as separate end branches.
                for half in [b.points[..=k].iter().rev().copied().collect::<Vec<_>>(), b.points[k..].to_vec()] {
                    let radius_sum: f64 = half.iter().map(|&i| skel.radius(i)).sum();
                    let length = half.windows(2).map(|w| skel.point(w[0]).dist(skel.point(w[1]))).sum();
                    let far = *half.last().unwrap();
                    out.push(RawBranch {
                        kind: BranchKind::Jp2ep,
                        mass: radius_sum - skel.radius(graph.root) / 2.0,
                        length,
                        at_root: (far != graph.root).then_some((far, false)),
                        points: half,
                    });
                }
                continue;
            }
        }
        out.push(RawBranch { kind: b.kind, points: b.points.clone(), mass, length: b.length, at_root });
    }
    out
}

/// Score every branch and choose the second crossing point of the spine
/// among the nodes directly linked to the root.
pub fn find_spine_axis(
    skel: &Skeleton,
    graph: &SkeletonGraph,
    params: &SpineParams,
) -> Result<(SpineAxis, Vec<BranchScore>)> {
    let total_mass = skel.total_mass();
    let total_length = graph.total_length();
    let r_star = skel.max_radius();
    let branches = raw_branches(skel, graph);
    let norm = |b: &RawBranch| {
        let mhat = b.mass / total_mass;
        let lhat = if total_length > 0.0 { b.length / total_length } else { 0.0 };
        (mhat, lhat)
    };
    let dense_of = |mhat: f64, lhat: f64| if lhat > 0.0 { mhat / lhat } else { 0.0 };
    let jp2jp_dense: Vec<f64> = branches
        .iter()
        .filter(|b| b.kind == BranchKind::Jp2jp)
        .map(|b| {
            let (m, l) = norm(b);
            dense_of(m, l)
        })
        .collect();
    let jp2ep_cost = if jp2jp_dense.is_empty() {
        0.0
    } else {
        jp2jp_dense.iter().copied().fold(f64::INFINITY, f64::min) + population_std(&jp2jp_dense)
    };
    let mut scores = Vec::new();
    for b in &branches {
        let Some((node_point, node_is_junction)) = b.at_root else { continue };
        let (mhat, lhat) = norm(b);
        let ml = params.alpha * mhat + (1.0 - params.alpha) * lhat;
        let (dense, smooth, combined) = match b.kind {
            BranchKind::Jp2jp => {
                let dense = dense_of(mhat, lhat);
                let rhat: Vec<f64> = b.points.iter().map(|&i| skel.radius(i) / r_star).collect();
                (dense, population_std(&rhat), params.beta * dense + (1.0 - params.beta) * 10.0 * ml)
            }
            BranchKind::Jp2ep => (0.0, 0.0, params.beta * jp2ep_cost + (1.0 - params.beta) * 10.0 * ml),
        };
        scores.push(BranchScore {
            kind: b.kind,
            node_point,
            node_is_junction,
            mhat,
            lhat,
            ml,
            dense,
            smooth,
            combined,
        });
    }
    if scores.is_empty() {
        return Err(Error::NoCandidate);
    }
    let best = |alive: &[bool]| {
        (0..scores.len()).filter(|&k| alive[k]).fold(None, |acc: Option<usize>, k| match acc {
            Some(a) if scores[a].combined >= scores[k].combined => Some(a),
            _ => Some(k),
        })
    };
    let mut alive = vec![true; scores.len()];
    let mut pick = best(&alive);
    while let Some(k) = pick {
        let s = &scores[k];
        if !(s.node_is_junction && s.smooth > params.threshold) {
            break;
        }
        alive[k] = false;
        pick = best(&alive);
    }
    let k = match pick {
        Some(k) => k,
        None => {
            log::warn!("every spine candidate exceeds the smoothness threshold; using the best one");
            best(&vec![true; scores.len()]).unwrap()
        }
    };
    let (r, p) = (skel.point(graph.root), skel.point(scores[k].node_point));
    let axis = SpineAxis { x1: r.x as f64, y1: r.y as f64, x2: p.x as f64, y2: p.y as f64 };
    Ok((axis, scores))
}

/// The representation of one shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rts {
    pub n: usize,
    pub spine: SpineAxis,
    pub features: Vec<EndFeature>,
    /// Maximal skeleton radius in pixels.
    #[serde(default)]
    pub r_star: f64,
    /// Total skeleton mass.
    #[serde(default)]
    pub mass: f64,
    /// Total branch length.
    #[serde(default)]
    pub length: f64,
    #[serde(default)]
    pub source_id: String,
}

impl Rts {
    /// Check the invariants a deserialized representation must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() || self.n != self.features.len() {
            return Err(Error::Invalid(format!("n = {} but {} features", self.n, self.features.len())));
        }
        for (i, f) in self.features.iter().enumerate() {
            if f.lhat.len() != SAMPLES || f.path.len() != SAMPLES {
                return Err(Error::Invalid(format!("feature {i}: expected {SAMPLES} samples")));
            }
            let finite = f.lhat.iter().chain([&f.mhat, &f.lhat_len, &f.v]).all(|x| x.is_finite());
            if !finite || !(0.0..=1.0).contains(&f.v) {
                return Err(Error::Invalid(format!("feature {i}: non-finite or out-of-range value")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Rts> {
        let rts: Rts = serde_json::from_str(text)?;
        rts.validate()?;
        Ok(rts)
    }

    pub fn root(&self) -> [f64; 2] {
        [self.spine.x1, self.spine.y1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RtsConfig {
    pub prune_significance: f64,
    pub quantization: Quantization,
    pub spine: SpineParams,
    /// Analyze the shape in a canonical quarter-turn orientation so that
    /// grid rotations give identical features.
    pub canonical_frame: bool,
}

impl Default for RtsConfig {
    fn default() -> Self {
        RtsConfig {
            prune_significance: DEFAULT_PRUNE_SIGNIFICANCE,
            quantization: Quantization::Uneven,
            spine: SpineParams::default(),
            canonical_frame: true,
        }
    }
}

/// Mapping from the analysis canvas back to the input canvas.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    offset: (i64, i64),
    /// Height of each canvas before a quarter turn, innermost last.
    heights: Vec<usize>,
}

impl Frame {
    pub fn identity() -> Self {
        Frame { offset: (0, 0), heights: Vec::new() }
    }

    pub fn to_input(&self, p: [f64; 2]) -> [f64; 2] {
        let mut q = p;
        for &h in self.heights.iter().rev() {
            q = [q[1], h as f64 - 1.0 - q[0]];
        }
        [q[0] + self.offset.0 as f64, q[1] + self.offset.1 as f64]
    }
}

/// Crop to the bounding box and pick the quarter turn with the smallest
/// (width, height, mask) key.
fn canonical(shape: &BinaryShape) -> (BinaryShape, Frame) {
    let (mut cur, offset) = shape.crop(1);
    let key = |s: &BinaryShape| (s.width(), s.height(), s.mask().to_vec());
    let mut best = (key(&cur), cur.clone(), Vec::new());
    let mut heights = Vec::new();
    for _ in 0..3 {
        heights.push(cur.height());
        cur = cur.rotate90();
        let k = key(&cur);
        if k < best.0 {
            best = (k, cur.clone(), heights.clone());
        }
    }
    (best.1, Frame { offset, heights: best.2 })
}

/// Every intermediate product of the pipeline, in the analysis frame.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub shape: BinaryShape,
    pub frame: Frame,
    pub raw_skeleton: Skeleton,
    pub skeleton: Skeleton,
    pub graph: SkeletonGraph,
    pub tree: SkeletonTree,
    pub scores: Vec<BranchScore>,
    pub rts: Rts,
}

pub fn analyze(shape: &BinaryShape, config: &RtsConfig) -> Result<Analysis> {
    let (work, frame) = if config.canonical_frame { canonical(shape) } else { (shape.clone(), Frame::identity()) };
    let field = distance_transform(&work);
    let raw_skeleton = extract_skeleton(&field)?;
    let skeleton = prune_skeleton(&raw_skeleton, config.prune_significance)?;
    let graph = build_skeleton_graph(&skeleton);
    let tree = build_skeleton_tree(&skeleton, &graph, &work)?;
    let (axis, scores) = find_spine_axis(&skeleton, &graph, &config.spine)?;

    let r_star = skeleton.max_radius();
    let mass = skeleton.total_mass();
    let length = graph.total_length();
    let fractions = sample_fractions(config.quantization);
    let root = skeleton.point(tree.root).xy();
    let mut features = Vec::with_capacity(tree.end_paths.len());
    for p in &tree.end_paths {
        let xy: Vec<[f64; 2]> = p.points.iter().map(|&i| skeleton.point(i).xy()).collect();
        let radii: Vec<f64> = p.points.iter().map(|&i| skeleton.radius(i) / r_star).collect();
        let (lhat, path) = resample(&xy, &radii, &fractions);
        let end = skeleton.point(p.endpoint()).xy();
        features.push(EndFeature {
            lhat,
            mhat: p.mass / mass,
            lhat_len: if length > 0.0 { p.length / length } else { 0.0 },
            v: spatial_value(root, end, axis.vector())?,
            endpoint: frame.to_input(end),
            path: path.into_iter().map(|q| frame.to_input(q)).collect(),
        });
    }
    let mut anchor = 0;
    for (k, f) in features.iter().enumerate() {
        if f.v > features[anchor].v {
            anchor = k;
        }
    }
    features.rotate_left(anchor);
    let a = frame.to_input([axis.x1, axis.y1]);
    let b = frame.to_input([axis.x2, axis.y2]);
    let rts = Rts {
        n: features.len(),
        spine: SpineAxis { x1: a[0], y1: a[1], x2: b[0], y2: b[1] },
        features,
        r_star,
        mass,
        length,
        source_id: shape.source_id().to_string(),
    };
    Ok(Analysis { shape: work, frame, raw_skeleton, skeleton, graph, tree, scores, rts })
}

/// Full pipeline from silhouette to representation.
pub fn build_rts(shape: &BinaryShape, config: &RtsConfig) -> Result<Rts> {
    analyze(shape, config).map(|a| a.rts)
}

/// Skeleton graph and tree as JSON, in input coordinates.
pub fn graph_json(a: &Analysis) -> serde_json::Value {
    let map = |p: Pixel| a.frame.to_input(p.xy());
    crate::skeltree::debug_json(&a.skeleton, &a.graph, Some(&a.tree), &map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn line(n: usize) -> Vec<[f64; 2]> {
        (0..n).map(|i| [i as f64, 0.0]).collect()
    }

    #[test]
    fn constant_path_quantizes_flat() {
        let xy = line(17);
        let r = vec![0.4; 17];
        for q in [quantize_uniform(&xy, &r), quantize_uneven(&xy, &r)] {
            assert_eq!(q.len(), SAMPLES);
            assert!(q.iter().all(|&v| (v - 0.4).abs() < 1e-15));
        }
    }

    #[test]
    fn two_point_ramp() {
        let q = quantize_uniform(&[[0.0, 0.0], [1.0, 1.0]], &[1.0, 3.0]);
        for (k, v) in q.iter().enumerate() {
            assert_abs_diff_eq!(*v, 1.0 + 2.0 * k as f64 / 49.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn uneven_ramp_split() {
        // Radius equal to arc fraction along a straight path.
        let xy = line(101);
        let r: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let q = quantize_uneven(&xy, &r);
        assert!(q[..25].iter().all(|&v| (0.0..=0.8 + 1e-12).contains(&v)));
        assert!(q[25..].iter().all(|&v| (0.8..=1.0 + 1e-12).contains(&v)));
        assert_abs_diff_eq!(q[0], 0.0);
        assert_abs_diff_eq!(q[24], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(q[49], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tail_detail_gets_half_the_samples() {
        let t = sample_fractions(Quantization::Uneven);
        assert!(t.iter().filter(|&&f| f > 0.8).count() >= 25);
    }

    #[test]
    fn mass_is_a_sum() {
        assert_eq!(path_mass(&[1.0, 2.0, 3.0]), 6.0);
        assert_eq!(path_mass(&[2.5]), 2.5);
    }

    proptest! {
        #[test]
        fn samples_sit_at_arc_fractions(steps in prop::collection::vec((0usize..8, 0.1f64..2.0), 1..30)) {
            // Polyline with random headings; radius = arc length so far, which
            // makes every sample's value equal its own arc position.
            let mut xy = vec![[0.0, 0.0]];
            let mut r = vec![0.0];
            let mut s = 0.0;
            for (dir, len) in steps {
                let a = dir as f64 * std::f64::consts::FRAC_PI_4;
                let last = *xy.last().unwrap();
                xy.push([last[0] + len * a.cos(), last[1] + len * a.sin()]);
                s += len;
                r.push(s);
            }
            let q = quantize_uniform(&xy, &r);
            for (k, v) in q.iter().enumerate() {
                prop_assert!((v - s * k as f64 / 49.0).abs() < 1e-9);
            }
            let m: f64 = r.iter().sum();
            prop_assert!((path_mass(&r) - m).abs() < 1e-9);
        }
    }

    #[test]
    fn spatial_value_cases() {
        let o = [0.0, 0.0];
        assert_abs_diff_eq!(spatial_value(o, [3.0, 0.0], [1.0, 0.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(spatial_value(o, [-3.0, 0.0], [1.0, 0.0]).unwrap(), 1.0);
        assert_abs_diff_eq!(spatial_value(o, [0.0, 2.0], [1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            spatial_value(o, [2.0, 2.0], [5.0, 0.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        assert!(matches!(spatial_value(o, o, [1.0, 0.0]), Err(Error::DegenerateVector)));
    }

    fn skel(pts: &[(u32, u32, f64)], w: usize, h: usize) -> Skeleton {
        Skeleton::from_points(w, h, pts.iter().map(|&(x, y, r)| (Pixel::new(x, y), r)).collect()).unwrap()
    }

    #[test]
    fn heavy_arm_wins_the_spine() {
        // Junction at (10,10); arm A goes right 12 px at radius 3, arms B and
        // C go diagonally left 4 steps at radius 1.
        let mut pts = vec![(10, 10, 4.0)];
        for k in 1..=12 {
            pts.push((10 + k, 10, 3.0));
        }
        for k in 1..=4 {
            pts.push((10 - k, 10 - k, 1.0));
            pts.push((10 - k, 10 + k, 1.0));
        }
        let s = skel(&pts, 30, 20);
        let g = build_skeleton_graph(&s);
        let (axis, scores) = find_spine_axis(&s, &g, &SpineParams::default()).unwrap();
        assert_eq!((axis.x2, axis.y2), (22.0, 10.0));
        // Hand evaluation: no jp2jp branches, so every score is
        // 0.7 * 10 * (0.65 M + 0.35 L) with the junction mass split in three.
        let total_m = 4.0 + 36.0 + 8.0;
        let total_l = 12.0 + 8.0 * std::f64::consts::SQRT_2;
        let ma = (36.0 + 4.0 / 3.0) / total_m;
        let la = 12.0 / total_l;
        let heavy = scores.iter().find(|s| s.node_point == s_index(&s_points(&pts), 22, 10)).unwrap();
        assert_abs_diff_eq!(heavy.combined, 7.0 * (0.65 * ma + 0.35 * la), epsilon = 1e-12);
    }

    fn s_points(pts: &[(u32, u32, f64)]) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = pts.iter().map(|p| (p.1, p.0)).collect();
        v.sort();
        v
    }

    fn s_index(sorted_yx: &[(u32, u32)], x: u32, y: u32) -> usize {
        sorted_yx.iter().position(|&p| p == (y, x)).unwrap()
    }

    #[test]
    fn rough_junction_branches_fall_through_to_end_branch() {
        // Root junction J1 (10,10) links to junction J2 (20,10) over a
        // branch whose radius oscillates, and to a short end arm.
        let mut pts = vec![(10, 10, 10.0)];
        for k in 1..10u32 {
            pts.push((10 + k, 10, if k % 2 == 0 { 9.0 } else { 2.0 }));
        }
        pts.push((20, 10, 8.0));
        for k in 1..=6u32 {
            pts.push((20 + k, 10 - k, 2.0));
            pts.push((20 + k, 10 + k, 2.0));
        }
        for k in 1..=3u32 {
            pts.push((10 - k, 10 - k, 1.0));
            pts.push((10 - k, 10 + k, 1.0));
        }
        let s = skel(&pts, 40, 20);
        let g = build_skeleton_graph(&s);
        let (axis, scores) = find_spine_axis(&s, &g, &SpineParams::default()).unwrap();
        let jj = scores.iter().find(|s| s.kind == BranchKind::Jp2jp).unwrap();
        assert!(jj.smooth > 0.224);
        assert!(
            jj.combined > scores.iter().filter(|s| s.kind == BranchKind::Jp2ep).map(|s| s.combined).fold(0.0, f64::max)
        );
        assert_ne!((axis.x2, axis.y2), (20.0, 10.0));
    }

    #[test]
    fn disk_is_degenerate() {
        let shape = BinaryShape::from_fn(41, 41, "disk", |x, y| {
            let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
            dx * dx + dy * dy <= 17.0 * 17.0
        })
        .unwrap();
        assert!(matches!(build_rts(&shape, &RtsConfig::default()), Err(Error::DegenerateSkeleton(_))));
    }

    fn cross_shape() -> BinaryShape {
        // Body with three uneven limbs.
        BinaryShape::from_fn(90, 70, "cross", |x, y| {
            let (fx, fy) = (x as f64, y as f64);
            let body = (fx - 40.0).powi(2) / 300.0 + (fy - 35.0).powi(2) / 120.0 <= 1.0;
            let arm1 = (58.0..84.0).contains(&fx) && (fy - 30.0 - (fx - 58.0) * 0.3).abs() < 3.0;
            let arm2 = (10.0..45.0).contains(&fy) && (fx - 30.0).abs() < 2.5 && fy < 30.0;
            let arm3 = (40.0..66.0).contains(&fy) && (fx - 35.0 + (fy - 40.0) * 0.2).abs() < 4.0;
            body || arm1 || arm2 || arm3
        })
        .unwrap()
    }

    #[test]
    fn limbs_become_features() {
        let a = analyze(&cross_shape(), &RtsConfig::default()).unwrap();
        let endpoints =
            a.graph.nodes.iter().filter(|n| n.kind == PointKind::Endpoint && n.point != a.graph.root).count();
        assert_eq!(a.rts.n, endpoints);
        assert!(a.rts.n >= 3, "{}", a.rts.n);
        a.rts.validate().unwrap();
        let max_v = a.rts.features.iter().map(|f| f.v).fold(0.0, f64::max);
        assert_eq!(a.rts.features[0].v, max_v);
    }

    #[test]
    fn quarter_turns_are_exact() {
        let shape = cross_shape();
        let base = build_rts(&shape, &RtsConfig::default()).unwrap();
        let mut rotated = shape.clone();
        for _ in 0..3 {
            rotated = rotated.rotate90();
            let r = build_rts(&rotated, &RtsConfig::default()).unwrap();
            assert_eq!(r.n, base.n);
            for (a, b) in base.features.iter().zip(&r.features) {
                assert_eq!(a.lhat, b.lhat);
                assert_eq!((a.mhat, a.lhat_len, a.v), (b.mhat, b.lhat_len, b.v));
            }
        }
    }

    #[test]
    fn frame_maps_back_to_input() {
        let shape = cross_shape();
        let a = analyze(&shape, &RtsConfig::default()).unwrap();
        for f in &a.rts.features {
            let [x, y] = f.endpoint;
            assert!(shape.get(x as i64, y as i64));
        }
    }

    #[test]
    fn json_round_trip() {
        let r = build_rts(&cross_shape(), &RtsConfig::default()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["n", "spine", "features"] {
            assert!(v.get(key).is_some());
        }
        assert_eq!(v["features"][0]["lhat"].as_array().unwrap().len(), 50);
        assert!(v["spine"]["x1"].is_number());
        assert_eq!(Rts::from_json(&text).unwrap(), r);
        let mut broken = r.clone();
        broken.features[0].lhat.pop();
        assert!(Rts::from_json(&serde_json::to_string(&broken).unwrap()).is_err());
    }
}
