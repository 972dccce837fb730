use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generalize::{grts_distance, Grts};
use crate::metric::MatchParams;
use crate::osb::match_shapes;
use crate::par;
use crate::rts::{build_rts, Rts, RtsConfig};

use super::dataset::Dataset;

/// A gallery shape with its representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub label: String,
    pub rts: Rts,
}

/// Builds representations for every sample. Shapes whose skeleton
/// degenerates are reported and left out.
pub fn build_gallery(ds: &Dataset, config: &RtsConfig) -> (Vec<Entry>, Vec<(String, String)>) {
    let built = par::map(&ds.samples, |s| build_rts(&s.shape, config));
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (s, r) in ds.samples.iter().zip(built) {
        match r {
            Ok(rts) => entries.push(Entry { id: s.id.clone(), label: s.label.clone(), rts }),
            Err(e) => {
                log::warn!("{}: {e}", s.id);
                errors.push((s.id.clone(), e.to_string()));
            }
        }
    }
    (entries, errors)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub id: String,
    pub label: String,
    pub cost: f64,
}

/// Gallery sorted by ascending matching cost; ties go by id.
pub fn retrieve(query: &Rts, gallery: &[Entry], params: &MatchParams) -> Result<Vec<Ranked>> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let costs = par::map(gallery, |e| match_shapes(query, &e.rts, params).map(|m| m.global_cost));
    let mut ranked = gallery
        .iter()
        .zip(costs)
        .map(|(e, c)| Ok(Ranked { id: e.id.clone(), label: e.label.clone(), cost: c? }))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.id.cmp(&b.id)));
    Ok(ranked)
}

/// A same-class slot filled by a shape of another class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankError {
    pub query: String,
    pub rank: usize,
    pub found: String,
    pub found_label: String,
}

/// Scores under one convention for the query itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    /// Queries whose k-th result shares their class, k = 1, 2, ...
    pub rank_hits: Vec<usize>,
    /// Same-class hits within the first (class size) results over all
    /// possible hits.
    pub accuracy: f64,
    /// Same-class hits within the first 2 x (class size) results.
    pub bulls_eye: f64,
    pub errors: Vec<RankError>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub id: String,
    pub label: String,
    pub ranked: Vec<Ranked>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub queries: Vec<QueryResult>,
    /// The query counts as its own first result.
    pub with_self: Scores,
    /// The query is removed from its own list.
    pub without_self: Scores,
}

impl RetrievalReport {
    /// One line in the layout of a retrieval results table.
    pub fn table_row(&self, name: &str) -> String {
        let hits: Vec<String> = self.with_self.rank_hits.iter().map(|h| h.to_string()).collect();
        format!(
            "{name} & {} & {:.1}% (bulls-eye {:.1}%; without self {:.1}% / {:.1}%)",
            hits.join(" & "),
            100.0 * self.with_self.accuracy,
            100.0 * self.with_self.bulls_eye,
            100.0 * self.without_self.accuracy,
            100.0 * self.without_self.bulls_eye
        )
    }
}

/// Pairwise global costs, `costs[q][g]`.
pub fn cost_matrix(gallery: &[Entry], params: &MatchParams) -> Result<Vec<Vec<f64>>> {
    let n = gallery.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let costs =
        par::map(&pairs, |&(a, b)| match_shapes(&gallery[a].rts, &gallery[b].rts, params).map(|m| m.global_cost));
    let mut m = vec![vec![0.0; n]; n];
    for (&(a, b), c) in pairs.iter().zip(costs) {
        let c = c?;
        m[a][b] = c;
        m[b][a] = c;
    }
    Ok(m)
}

fn score(lists: &[(usize, Vec<usize>)], gallery: &[Entry], include_self: bool) -> Scores {
    let class_size = |l: &str| gallery.iter().filter(|e| e.label == l).count();
    let max_c = gallery.iter().map(|e| class_size(&e.label)).max().unwrap_or(0);
    let mut rank_hits = vec![0; max_c];
    let (mut hits, mut possible, mut be_hits, mut be_possible) = (0, 0, 0, 0);
    let mut errors = Vec::new();
    for (q, list) in lists {
        let label = &gallery[*q].label;
        let list: Vec<usize> = list.iter().copied().filter(|&g| include_self || g != *q).collect();
        let relevant = class_size(label) - usize::from(!include_self);
        for (rank, &g) in list.iter().take(relevant).enumerate() {
            if gallery[g].label == *label {
                rank_hits[rank] += 1;
                hits += 1;
            } else {
                errors.push(RankError {
                    query: gallery[*q].id.clone(),
                    rank: rank + 1,
                    found: gallery[g].id.clone(),
                    found_label: gallery[g].label.clone(),
                });
            }
        }
        possible += relevant;
        be_hits += list.iter().take(2 * class_size(label)).filter(|&&g| gallery[g].label == *label).count();
        be_possible += relevant;
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Scores { rank_hits, accuracy: ratio(hits, possible), bulls_eye: ratio(be_hits, be_possible), errors }
}

/// Leave-in retrieval of every gallery shape against the whole gallery.
pub fn evaluate(gallery: &[Entry], params: &MatchParams) -> Result<RetrievalReport> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let costs = cost_matrix(gallery, params)?;
    Ok(report_from_costs(gallery, &costs))
}

/// Ranks from a precomputed cost matrix. The query wins ties against
/// other shapes; other ties go by id.
pub fn report_from_costs(gallery: &[Entry], costs: &[Vec<f64>]) -> RetrievalReport {
    let n = gallery.len();
    let lists: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|q| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                costs[q][a]
                    .total_cmp(&costs[q][b])
                    .then((a != q).cmp(&(b != q)))
                    .then_with(|| gallery[a].id.cmp(&gallery[b].id))
            });
            (q, order)
        })
        .collect();
    let queries = lists
        .iter()
        .map(|(q, list)| QueryResult {
            id: gallery[*q].id.clone(),
            label: gallery[*q].label.clone(),
            ranked: list
                .iter()
                .map(|&g| Ranked { id: gallery[g].id.clone(), label: gallery[g].label.clone(), cost: costs[*q][g] })
                .collect(),
        })
        .collect();
    RetrievalReport { queries, with_self: score(&lists, gallery, true), without_self: score(&lists, gallery, false) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub id: String,
    pub label: String,
    pub predicted: String,
    pub cost: f64,
    /// Cost against every prototype, in prototype order.
    pub costs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    pub prototypes: Vec<String>,
    pub assignments: Vec<Assignment>,
}

impl CrossReport {
    /// Fraction of queries with `label` whose prediction satisfies `ok`.
    pub fn rate(&self, label: &str, ok: impl Fn(&str) -> bool) -> Option<f64> {
        let rows: Vec<&Assignment> = self.assignments.iter().filter(|a| a.label == label).collect();
        if rows.is_empty() {
            return None;
        }
        Some(rows.iter().filter(|a| ok(&a.predicted)).count() as f64 / rows.len() as f64)
    }
}

/// Labels each query with its cheapest prototype; ties go to the earlier
/// prototype.
pub fn cross_classify(queries: &[Entry], prototypes: &[(String, Grts)], params: &MatchParams) -> Result<CrossReport> {
    if prototypes.is_empty() {
        return Err(Error::NoPrototypes);
    }
    let rows = par::map(queries, |q| {
        let leaf = Grts::leaf(q.id.clone(), q.rts.clone());
        prototypes
            .iter()
            .map(|(_, g)| grts_distance(&leaf, g, params).map(|m| m.global_cost))
            .collect::<Result<Vec<f64>>>()
    });
    let mut assignments = Vec::with_capacity(queries.len());
    for (q, costs) in queries.iter().zip(rows) {
        let costs = costs?;
        let mut best = 0;
        for (k, c) in costs.iter().enumerate() {
            if *c < costs[best] {
                best = k;
            }
        }
        assignments.push(Assignment {
            id: q.id.clone(),
            label: q.label.clone(),
            predicted: prototypes[best].0.clone(),
            cost: costs[best],
            costs,
        });
    }
    Ok(CrossReport { prototypes: prototypes.iter().map(|p| p.0.clone()).collect(), assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::feature;
    use crate::rts::{SpineAxis, SAMPLES};

    fn entry(id: &str, label: &str, level: f64) -> Entry {
        let f = |v: f64| feature(vec![v; SAMPLES], 0.25, 0.25, 0.5);
        let rts = Rts {
            n: 2,
            spine: SpineAxis { x1: 0.0, y1: 0.0, x2: 1.0, y2: 0.0 },
            features: vec![f(level), f(level * 0.5)],
            r_star: 1.0,
            mass: 1.0,
            length: 1.0,
            source_id: id.into(),
        };
        Entry { id: id.into(), label: label.into(), rts }
    }

    #[test]
    fn query_comes_first() {
        let g = vec![entry("a", "x", 0.1), entry("b", "x", 0.5), entry("c", "y", 0.9)];
        let r = retrieve(&g[1].rts, &g, &MatchParams::default()).unwrap();
        assert_eq!(r[0].id, "b");
        assert_eq!(r[0].cost, 0.0);
        assert!(r.windows(2).all(|w| w[0].cost <= w[1].cost));
        assert!(matches!(retrieve(&g[0].rts, &[], &MatchParams::default()), Err(Error::EmptyGallery)));
    }

    #[test]
    fn identical_classes_score_perfectly() {
        let g: Vec<Entry> = (0..3)
            .flat_map(|c| (0..3).map(move |k| entry(&format!("{c}-{k}"), &format!("c{c}"), 0.2 + 0.3 * c as f64)))
            .collect();
        let r = evaluate(&g, &MatchParams::default()).unwrap();
        assert_eq!(r.with_self.accuracy, 1.0);
        assert_eq!(r.with_self.bulls_eye, 1.0);
        assert_eq!(r.without_self.accuracy, 1.0);
        assert_eq!(r.with_self.rank_hits, vec![9, 9, 9]);
        assert!(r.with_self.errors.is_empty());
    }

    #[test]
    fn hand_counted_rates() {
        // Two classes of two. Costs make b1 rank a0's second result.
        let g = vec![entry("a0", "a", 0.0), entry("a1", "a", 0.0), entry("b0", "b", 0.0), entry("b1", "b", 0.0)];
        let costs = vec![
            vec![0.0, 3.0, 5.0, 1.0],
            vec![3.0, 0.0, 4.0, 6.0],
            vec![5.0, 4.0, 0.0, 2.0],
            vec![1.0, 6.0, 2.0, 0.0],
        ];
        let r = report_from_costs(&g, &costs);
        // Self-included: rank 1 always right; rank 2 right for a1 (a0 at 3
        // beats b0 at 4) and b0 (b1), wrong for a0 (b1) and b1 (a0).
        assert_eq!(r.with_self.rank_hits, vec![4, 2]);
        assert_eq!(r.with_self.accuracy, 6.0 / 8.0);
        // Within the top 4 everything is found.
        assert_eq!(r.with_self.bulls_eye, 1.0);
        assert_eq!(r.without_self.rank_hits[0], 2);
        assert_eq!(r.without_self.accuracy, 0.5);
        assert_eq!(r.with_self.errors.len(), 2);
        assert_eq!(
            r.with_self.errors[0],
            RankError { query: "a0".into(), rank: 2, found: "b1".into(), found_label: "b".into() }
        );
    }

    #[test]
    fn rates_ignore_gallery_order() {
        let mut g = vec![entry("a0", "a", 0.1), entry("a1", "a", 0.15), entry("b0", "b", 0.6), entry("b1", "b", 0.35)];
        let p = MatchParams::default();
        let r1 = evaluate(&g, &p).unwrap();
        g.reverse();
        let r2 = evaluate(&g, &p).unwrap();
        assert_eq!(r1.with_self.accuracy, r2.with_self.accuracy);
        assert_eq!(r1.with_self.bulls_eye, r2.with_self.bulls_eye);
        assert_eq!(r1.without_self.accuracy, r2.without_self.accuracy);
    }

    #[test]
    fn cross_classification_picks_nearest_prototype() {
        let protos = vec![
            ("low".to_string(), Grts::leaf("p0", entry("p0", "low", 0.1).rts)),
            ("high".to_string(), Grts::leaf("p1", entry("p1", "high", 0.9).rts)),
        ];
        let q = vec![entry("q0", "low", 0.1), entry("q1", "high", 0.8)];
        let r = cross_classify(&q, &protos, &MatchParams::default()).unwrap();
        assert_eq!(r.assignments[0].predicted, "low");
        assert_eq!(r.assignments[0].cost, 0.0);
        assert_eq!(r.assignments[1].predicted, "high");
        assert_eq!(r.rate("low", |p| p == "low"), Some(1.0));
        assert!(matches!(cross_classify(&q, &[], &MatchParams::default()), Err(Error::NoPrototypes)));
    }
}
