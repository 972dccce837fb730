//! Folding a set of same-class shapes into one generalized representation
//! by repeatedly merging the closest pair, with each side weighted by the
//! number of shapes it already stands for.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MatchParams;
use crate::osb::{match_features, MatchResult};
use crate::par;
use crate::rts::{EndFeature, Rts};

/// One leaf feature that contributed to a generalized feature.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartSource {
    pub leaf: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MergeTree {
    Leaf {
        id: String,
    },
    Merge {
        /// Matching cost between the two children, when known.
        cost: Option<f64>,
        /// Number of matched features that survived the merge.
        matched: usize,
        /// Features of the left and right child left without a partner.
        dropped: [usize; 2],
        left: Box<MergeTree>,
        right: Box<MergeTree>,
    },
}

impl MergeTree {
    pub fn leaves(&self) -> Vec<&str> {
        match self {
            MergeTree::Leaf { id } => vec![id.as_str()],
            MergeTree::Merge { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            MergeTree::Leaf { .. } => 0,
            MergeTree::Merge { left, right, .. } => 1 + left.internal_nodes() + right.internal_nodes(),
        }
    }
}

/// A generalized representation: the same features as an [`Rts`] plus the
/// number of shapes merged into it and how they were merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grts {
    #[serde(flatten)]
    pub rts: Rts,
    pub count: usize,
    /// Leaf whose geometry (paths, endpoints, spine) backs the features.
    pub exemplar_id: String,
    pub merge_tree: MergeTree,
    /// Contributing leaf features, per feature, sorted by leaf id.
    #[serde(default)]
    pub lineage: Vec<Vec<PartSource>>,
}

impl Grts {
    pub fn leaf(id: impl Into<String>, rts: Rts) -> Grts {
        let id = id.into();
        let lineage = (0..rts.features.len()).map(|index| vec![PartSource { leaf: id.clone(), index }]).collect();
        Grts { rts, count: 1, exemplar_id: id.clone(), merge_tree: MergeTree::Leaf { id }, lineage }
    }

    pub fn features(&self) -> &[EndFeature] {
        &self.rts.features
    }

    pub fn from_json(text: &str) -> Result<Grts> {
        let g: Grts = serde_json::from_str(text)?;
        g.rts.validate()?;
        if g.count == 0 {
            return Err(Error::Invalid("count must be at least 1".into()));
        }
        Ok(g)
    }

    /// Copies paths, endpoints and frame data from `leaf`, which must be
    /// one of the merged shapes.
    fn adopt_geometry(&mut self, leaf_id: &str, leaf: &Rts) {
        for (f, sources) in self.rts.features.iter_mut().zip(&self.lineage) {
            if let Some(s) = sources.iter().find(|s| s.leaf == leaf_id) {
                let src = &leaf.features[s.index];
                f.endpoint = src.endpoint;
                f.path = src.path.clone();
            }
        }
        self.rts.spine = leaf.spine;
        self.rts.r_star = leaf.r_star;
        self.rts.mass = leaf.mass;
        self.rts.length = leaf.length;
        self.rts.source_id = leaf_id.to_string();
        self.exemplar_id = leaf_id.to_string();
    }
}

/// Matching between two generalized representations.
pub fn grts_distance(x: &Grts, y: &Grts, params: &MatchParams) -> Result<MatchResult> {
    match_features(x.features(), y.features(), params)
}

fn blend(a: f64, b: f64, wa: f64, wb: f64) -> f64 {
    wa * a + wb * b
}

/// Weighted merge of two representations along the correspondence `f`.
/// Features without a partner are dropped. Geometry comes from the side
/// standing for more shapes, ties going to the smaller exemplar id.
pub fn merge_grts(x: &Grts, y: &Grts, f: &[(usize, usize)]) -> Result<Grts> {
    merge_with_cost(x, y, f, None)
}

fn merge_with_cost(x: &Grts, y: &Grts, f: &[(usize, usize)], cost: Option<f64>) -> Result<Grts> {
    if f.is_empty() {
        return Err(Error::EmptyCorrespondence);
    }
    let (nx, ny) = (x.features().len(), y.features().len());
    if let Some(&(i, j)) = f.iter().find(|&&(i, j)| i >= nx || j >= ny) {
        return Err(Error::Invalid(format!("pair ({i}, {j}) outside {nx}x{ny}")));
    }
    let total = (x.count + y.count) as f64;
    let (wx, wy) = (x.count as f64 / total, y.count as f64 / total);
    let x_geometry = x.count > y.count || (x.count == y.count && x.exemplar_id <= y.exemplar_id);
    let mut features = Vec::with_capacity(f.len());
    let mut lineage = Vec::with_capacity(f.len());
    for &(i, j) in f {
        let (p, q) = (&x.features()[i], &y.features()[j]);
        let geo = if x_geometry { p } else { q };
        features.push(EndFeature {
            lhat: p.lhat.iter().zip(&q.lhat).map(|(&a, &b)| blend(a, b, wx, wy)).collect(),
            mhat: blend(p.mhat, q.mhat, wx, wy),
            lhat_len: blend(p.lhat_len, q.lhat_len, wx, wy),
            v: blend(p.v, q.v, wx, wy),
            endpoint: geo.endpoint,
            path: geo.path.clone(),
        });
        let mut src: Vec<PartSource> =
            x.lineage.get(i).into_iter().chain(y.lineage.get(j)).flatten().cloned().collect();
        src.sort();
        lineage.push(src);
    }
    let dropped = [nx - f.len(), ny - f.len()];
    if dropped != [0, 0] {
        log::info!(
            "merge of {} and {} keeps {} parts, drops {} and {}",
            x.exemplar_id,
            y.exemplar_id,
            f.len(),
            dropped[0],
            dropped[1]
        );
    }
    let base = if x_geometry { x } else { y };
    let rts = Rts { n: features.len(), features, ..base.rts.clone() };
    Ok(Grts {
        rts,
        count: x.count + y.count,
        exemplar_id: base.exemplar_id.clone(),
        merge_tree: MergeTree::Merge {
            cost,
            matched: f.len(),
            dropped,
            left: Box::new(x.merge_tree.clone()),
            right: Box::new(y.merge_tree.clone()),
        },
        lineage,
    })
}

/// Greedy agglomeration of `shapes` into a single representation. Each
/// step merges the pair with the lowest matching cost; ties go to the pair
/// created first. After every merge the geometry is taken from the medoid
/// leaf, the merged shape with the smallest summed cost to the others.
pub fn generalize_set(shapes: &[(String, Rts)], params: &MatchParams) -> Result<Grts> {
    if shapes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = HashSet::new();
    for (id, rts) in shapes {
        if !seen.insert(id.as_str()) {
            return Err(Error::Invalid(format!("duplicate shape id {id}")));
        }
        rts.validate()?;
    }
    let n = shapes.len();
    // Node ids grow with creation order: leaves first, then merges.
    let mut alive: BTreeMap<usize, Grts> =
        shapes.iter().enumerate().map(|(k, (id, r))| (k, Grts::leaf(id, r.clone()))).collect();
    let mut costs: BTreeMap<(usize, usize), MatchResult> = BTreeMap::new();
    let leaf_pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    for (pair, r) in
        leaf_pairs.iter().zip(par::map(&leaf_pairs, |&(a, b)| grts_distance(&alive[&a], &alive[&b], params)))
    {
        costs.insert(*pair, r?);
    }
    let leaf_cost = |a: usize, b: usize| -> f64 {
        if a == b {
            0.0
        } else {
            costs_get(&costs, a.min(b), a.max(b))
        }
    };
    let leaf_costs: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| leaf_cost(a, b)).collect()).collect();
    let leaf_index: BTreeMap<&str, usize> = shapes.iter().enumerate().map(|(k, (id, _))| (id.as_str(), k)).collect();

    let mut next = n;
    while alive.len() > 1 {
        let (&(a, b), best) = costs
            .iter()
            .min_by(|(ka, ra), (kb, rb)| ra.global_cost.total_cmp(&rb.global_cost).then(ka.cmp(kb)))
            .expect("two live nodes have a cost");
        let best = best.clone();
        let x = alive.remove(&a).expect("live");
        let y = alive.remove(&b).expect("live");
        costs.retain(|&(p, q), _| p != a && p != b && q != a && q != b);
        let mut merged = merge_with_cost(&x, &y, &best.correspondence, Some(best.global_cost))?;

        let members: Vec<usize> = merged.merge_tree.leaves().iter().map(|id| leaf_index[id]).collect();
        let medoid = members
            .iter()
            .copied()
            .min_by(|&p, &q| {
                let sp: f64 = members.iter().map(|&o| leaf_costs[p][o]).sum();
                let sq: f64 = members.iter().map(|&o| leaf_costs[q][o]).sum();
                sp.total_cmp(&sq).then(p.cmp(&q))
            })
            .expect("merge has leaves");
        merged.adopt_geometry(&shapes[medoid].0, &shapes[medoid].1);

        let others: Vec<usize> = alive.keys().copied().collect();
        let fresh = par::map(&others, |o| grts_distance(&alive[o], &merged, params));
        for (o, r) in others.into_iter().zip(fresh) {
            costs.insert((o, next), r?);
        }
        alive.insert(next, merged);
        next += 1;
    }
    Ok(alive.into_values().next().expect("one node remains"))
}

fn costs_get(costs: &BTreeMap<(usize, usize), MatchResult>, a: usize, b: usize) -> f64 {
    costs[&(a, b)].global_cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::feature;
    use crate::rts::{SpineAxis, SAMPLES};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rts(features: Vec<EndFeature>) -> Rts {
        Rts {
            n: features.len(),
            spine: SpineAxis { x1: 0.0, y1: 0.0, x2: 1.0, y2: 0.0 },
            features,
            r_star: 1.0,
            mass: 1.0,
            length: 1.0,
            source_id: String::new(),
        }
    }

    fn random_rts(rng: &mut ChaCha8Rng, n: usize) -> Rts {
        rts((0..n)
            .map(|_| {
                let lhat = (0..SAMPLES).map(|_| rng.random_range(0.0..1.0)).collect();
                feature(lhat, rng.random_range(0.05..0.5), rng.random_range(0.05..0.5), rng.random_range(0.0..1.0))
            })
            .collect())
    }

    fn identity(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, i)).collect()
    }

    #[test]
    fn self_merge_keeps_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Grts::leaf("a", random_rts(&mut rng, 4));
        let m = merge_grts(&x, &x, &identity(4)).unwrap();
        assert_eq!(m.count, 2);
        for (a, b) in m.features().iter().zip(x.features()) {
            assert_eq!(a.mhat, b.mhat);
            assert_eq!(a.v, b.v);
            assert_eq!(a.lhat, b.lhat);
        }
    }

    #[test]
    fn weights_follow_counts() {
        let f = |v: f64| feature(vec![v; SAMPLES], 0.1 + v, 0.1, v / 4.0);
        let x = Grts::leaf("a", rts(vec![f(0.0)]));
        let mut y = Grts::leaf("b", rts(vec![f(4.0)]));
        y.count = 3;
        let m = merge_grts(&x, &y, &[(0, 0)]).unwrap();
        assert_eq!(m.features()[0].lhat, vec![3.0; SAMPLES]);
        assert_eq!(m.features()[0].v, 0.75);
        assert_eq!(m.count, 4);
        assert_eq!(m.exemplar_id, "b");
        assert!(matches!(merge_grts(&x, &y, &[]), Err(Error::EmptyCorrespondence)));
    }

    #[test]
    fn unmatched_parts_are_dropped() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Grts::leaf("a", random_rts(&mut rng, 5));
        let y = Grts::leaf("b", random_rts(&mut rng, 3));
        let m = merge_grts(&x, &y, &[(0, 0), (2, 1), (4, 2)]).unwrap();
        assert_eq!(m.rts.n, 3);
        assert!(matches!(m.merge_tree, MergeTree::Merge { matched: 3, dropped: [2, 0], .. }));
        assert_eq!(
            m.lineage[1],
            vec![PartSource { leaf: "a".into(), index: 2 }, PartSource { leaf: "b".into(), index: 1 }]
        );
    }

    /// Merges `leaves` along a random binary topology.
    fn random_topology(rng: &mut ChaCha8Rng, mut nodes: Vec<Grts>) -> Grts {
        while nodes.len() > 1 {
            let a = rng.random_range(0..nodes.len());
            let x = nodes.swap_remove(a);
            let b = rng.random_range(0..nodes.len());
            let y = nodes.swap_remove(b);
            let n = x.features().len();
            nodes.push(merge_grts(&x, &y, &identity(n)).unwrap());
        }
        nodes.pop().unwrap()
    }

    #[test]
    fn voting_is_fair_for_any_topology() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let k = rng.random_range(2..9);
            let leaves: Vec<Rts> = (0..k).map(|_| random_rts(&mut rng, 3)).collect();
            let grts: Vec<Grts> =
                leaves.iter().enumerate().map(|(i, r)| Grts::leaf(format!("s{i}"), r.clone())).collect();
            let root = random_topology(&mut rng, grts);
            assert_eq!(root.count, k);
            assert_eq!(root.merge_tree.internal_nodes(), k - 1);
            for p in 0..3 {
                let mean =
                    |g: &dyn Fn(&EndFeature) -> f64| leaves.iter().map(|r| g(&r.features[p])).sum::<f64>() / k as f64;
                let got = &root.features()[p];
                assert!((got.mhat - mean(&|f| f.mhat)).abs() < 1e-9);
                assert!((got.lhat_len - mean(&|f| f.lhat_len)).abs() < 1e-9);
                assert!((got.v - mean(&|f| f.v)).abs() < 1e-9);
                for s in 0..SAMPLES {
                    assert!((got.lhat[s] - mean(&|f| f.lhat[s])).abs() < 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn merge_commutes(seed in any::<u64>(), cx in 1usize..5, cy in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = Grts::leaf("a", random_rts(&mut rng, 4));
            let mut y = Grts::leaf("b", random_rts(&mut rng, 5));
            x.count = cx;
            y.count = cy;
            let f = vec![(0, 1), (1, 2), (3, 4)];
            let inv: Vec<_> = f.iter().map(|&(i, j)| (j, i)).collect();
            let xy = merge_grts(&x, &y, &f).unwrap();
            let yx = merge_grts(&y, &x, &inv).unwrap();
            prop_assert_eq!(&xy.rts.features, &yx.rts.features);
            prop_assert_eq!(&xy.lineage, &yx.lineage);
            prop_assert_eq!(xy.count, yx.count);
        }
    }

    #[test]
    fn single_shape_is_its_own_generalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_rts(&mut rng, 4);
        let g = generalize_set(&[("only".into(), r.clone())], &MatchParams::default()).unwrap();
        assert_eq!(g.rts, r);
        assert_eq!(g.count, 1);
        assert!(generalize_set(&[], &MatchParams::default()).is_err());
    }

    #[test]
    fn two_leaves_match_like_plain_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, b) = (random_rts(&mut rng, 4), random_rts(&mut rng, 5));
        let params = MatchParams::default();
        let direct = crate::osb::match_shapes(&a, &b, &params).unwrap();
        let via = grts_distance(&Grts::leaf("a", a.clone()), &Grts::leaf("b", b), &params).unwrap();
        assert_eq!(direct, via);
        let leaf = Grts::leaf("a", a);
        assert_eq!(grts_distance(&leaf, &leaf, &params).unwrap().global_cost, 0.0);
    }

    #[test]
    fn greedy_merges_closest_first_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = random_rts(&mut rng, 4);
        let other = random_rts(&mut rng, 4);
        let jitter = |r: &Rts, rng: &mut ChaCha8Rng, amount: f64| {
            let mut r = r.clone();
            for f in &mut r.features {
                f.lhat.iter_mut().for_each(|v| *v += rng.random_range(-amount..amount));
            }
            r
        };
        let shapes = vec![
            ("a0".to_string(), jitter(&base, &mut rng, 0.01)),
            ("b0".to_string(), jitter(&other, &mut rng, 0.01)),
            ("a1".to_string(), jitter(&base, &mut rng, 0.01)),
            ("b1".to_string(), jitter(&other, &mut rng, 0.01)),
        ];
        let params = MatchParams::default();
        let g = generalize_set(&shapes, &params).unwrap();
        assert_eq!(g.count, 4);
        assert_eq!(g.merge_tree.internal_nodes(), 3);
        let MergeTree::Merge { left, right, .. } = &g.merge_tree else { panic!("root is a merge") };
        let mut groups = vec![left.leaves(), right.leaves()];
        groups.iter_mut().for_each(|g| g.sort());
        groups.sort();
        assert_eq!(groups, vec![vec!["a0", "a1"], vec!["b0", "b1"]]);
        assert_eq!(g, generalize_set(&shapes, &params).unwrap());
        assert!(["a0", "a1", "b0", "b1"].contains(&g.exemplar_id.as_str()));
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(Grts::from_json(&text).unwrap(), g);
    }
}
