//! Elastic matching of two endpoint sequences: optimal subsequence
//! bijection as a shortest path over index pairs, plus the penalty for
//! differing endpoint counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{endpoint_distance, MatchParams};
use crate::rts::EndFeature;

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DistanceMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        DistanceMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        DistanceMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Mean plus population standard deviation of the row minima.
pub fn jump_cost(d: &DistanceMatrix) -> f64 {
    let mins: Vec<f64> =
        (0..d.rows()).map(|i| (0..d.cols()).map(|j| d.get(i, j)).fold(f64::INFINITY, f64::min)).collect();
    let n = mins.len() as f64;
    let mean = mins.iter().sum::<f64>() / n;
    let var = mins.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n;
    mean + var.sqrt()
}

/// Weight of the step `(i, j) -> (k, l)`, or `None` where no edge exists.
pub(crate) fn step_weight(d: &DistanceMatrix, jc: f64, (i, j): (usize, usize), (k, l): (usize, usize)) -> Option<f64> {
    if k <= i || l <= j {
        return None;
    }
    let (dk, dl) = (k - i, l - j);
    if dk == 1 && dl == 1 {
        Some(d.get(k, l))
    } else if dk > 1 && dl > 1 {
        Some(d.get(k, l) + (dk - 1) as f64 * jc)
    } else {
        None
    }
}

/// Cost of entering the graph at `(k, l)`: leading rows are skipped.
pub(crate) fn source_weight(d: &DistanceMatrix, jc: f64, (k, l): (usize, usize)) -> f64 {
    k as f64 * jc + d.get(k, l)
}

/// Cost of leaving the graph from row `i`: trailing rows are skipped.
pub(crate) fn sink_weight(d: &DistanceMatrix, jc: f64, i: usize) -> f64 {
    (d.rows() - 1 - i) as f64 * jc
}

/// Shortest path through the pair graph. Rows must be the shorter side;
/// a taller matrix is transposed and the pairs swapped back.
pub fn osb_match(d: &DistanceMatrix, jc: f64) -> (f64, Vec<(usize, usize)>) {
    if d.rows() > d.cols() {
        let (cost, pairs) = osb_match(&d.transpose(), jc);
        return (cost, pairs.into_iter().map(|(i, j)| (j, i)).collect());
    }
    let (m, n) = (d.rows(), d.cols());
    // Equal costs prefer the longer correspondence.
    let better = |c: f64, len: usize, bc: f64, blen: usize| c < bc || (c == bc && len > blen);
    let mut dist = vec![f64::INFINITY; m * n];
    let mut len = vec![0usize; m * n];
    let mut prev: Vec<Option<usize>> = vec![None; m * n];
    for k in 0..m {
        for l in 0..n {
            let mut best = source_weight(d, jc, (k, l));
            let mut best_len = 1;
            let mut from = None;
            for i in 0..k {
                for j in 0..l {
                    if let Some(w) = step_weight(d, jc, (i, j), (k, l)) {
                        let c = dist[i * n + j] + w;
                        if better(c, len[i * n + j] + 1, best, best_len) {
                            best = c;
                            best_len = len[i * n + j] + 1;
                            from = Some(i * n + j);
                        }
                    }
                }
            }
            dist[k * n + l] = best;
            len[k * n + l] = best_len;
            prev[k * n + l] = from;
        }
    }
    let mut end = 0;
    let mut best = f64::INFINITY;
    for idx in 0..m * n {
        let c = dist[idx] + sink_weight(d, jc, idx / n);
        if better(c, len[idx], best, len[end]) {
            best = c;
            end = idx;
        }
    }
    let mut pairs = vec![(end / n, end % n)];
    let mut at = end;
    while let Some(p) = prev[at] {
        pairs.push((p / n, p % n));
        at = p;
    }
    pairs.reverse();
    (best, pairs)
}

/// Adds `raw / min(M, N)` for every endpoint the larger shape has in excess.
pub fn global_cost(raw: f64, m: usize, n: usize) -> f64 {
    let c = raw / m.min(n) as f64;
    raw + c * m.abs_diff(n) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub raw_cost: f64,
    #[serde(rename = "cost")]
    pub global_cost: f64,
    pub jumpcost: f64,
    /// Pairs of feature indices `(i in x, j in y)`, increasing in both.
    pub correspondence: Vec<(usize, usize)>,
    /// Cyclic shift applied to the longer sequence before matching.
    pub shift: usize,
}

pub fn distance_matrix(x: &[EndFeature], y: &[EndFeature], params: &MatchParams) -> Result<DistanceMatrix> {
    let mut data = Vec::with_capacity(x.len() * y.len());
    for p in x {
        for q in y {
            data.push(endpoint_distance(p, q, params)?);
        }
    }
    Ok(DistanceMatrix { rows: x.len(), cols: y.len(), data })
}

/// Matches two feature sequences, optionally over every cyclic shift of
/// the longer one. With equal lengths both sides take turns as the
/// shifted one and as the row sequence.
pub fn match_features(x: &[EndFeature], y: &[EndFeature], params: &MatchParams) -> Result<MatchResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let full = distance_matrix(x, y, params)?;
    let (m, n) = (x.len(), y.len());
    let mut best: Option<MatchResult> = None;
    let mut consider = |shift_rows: bool, s: usize, flip: bool| {
        let d = if shift_rows {
            DistanceMatrix::from_fn(m, n, |i, j| full.get((i + s) % m, j))
        } else {
            DistanceMatrix::from_fn(m, n, |i, j| full.get(i, (j + s) % n))
        };
        // The shorter sequence indexes the rows.
        let (raw, jc, pairs) = if m > n || flip {
            let t = d.transpose();
            let jc = jump_cost(&t);
            let (raw, pairs) = osb_match(&t, jc);
            (raw, jc, pairs.into_iter().map(|(i, j)| (j, i)).collect())
        } else {
            let jc = jump_cost(&d);
            let (raw, pairs) = osb_match(&d, jc);
            (raw, jc, pairs)
        };
        if best.as_ref().is_none_or(|b| raw < b.raw_cost || (raw == b.raw_cost && pairs.len() > b.correspondence.len()))
        {
            let correspondence = pairs
                .into_iter()
                .map(|(i, j): (usize, usize)| if shift_rows { ((i + s) % m, j) } else { (i, (j + s) % n) })
                .collect();
            best = Some(MatchResult {
                raw_cost: raw,
                global_cost: global_cost(raw, m, n),
                jumpcost: jc,
                correspondence,
                shift: s,
            });
        }
    };
    if !params.rotation_search {
        consider(false, 0, false);
        if m == n {
            consider(false, 0, true);
        }
    } else if m == n {
        // Either side may play rows; trying all four keeps the result
        // independent of argument order.
        for flip in [false, true] {
            (0..n).for_each(|s| consider(false, s, flip));
            (0..m).for_each(|s| consider(true, s, flip));
        }
    } else if m < n {
        (0..n).for_each(|s| consider(false, s, false));
    } else {
        (0..m).for_each(|s| consider(true, s, false));
    }
    Ok(best.expect("at least one shift evaluated"))
}

pub fn match_shapes(x: &crate::rts::Rts, y: &crate::rts::Rts, params: &MatchParams) -> Result<MatchResult> {
    match_features(&x.features, &y.features, params)
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Enumerates every strictly increasing pair list and prices it with
    /// the same source, step and sink weights.
    pub fn exhaustive(d: &DistanceMatrix, jc: f64) -> (f64, Vec<(usize, usize)>) {
        let (d, swapped) = if d.rows() > d.cols() { (d.transpose(), true) } else { (d.clone(), false) };
        let mut best = (f64::INFINITY, Vec::new());
        let mut path = Vec::new();
        extend(&d, jc, &mut path, &mut best);
        if swapped {
            best.1 = best.1.into_iter().map(|(i, j)| (j, i)).collect();
        }
        best
    }

    fn extend(d: &DistanceMatrix, jc: f64, path: &mut Vec<(usize, usize)>, best: &mut (f64, Vec<(usize, usize)>)) {
        if let Some(&last) = path.last() {
            let mut cost = source_weight(d, jc, path[0]);
            let mut ok = true;
            for w in path.windows(2) {
                match step_weight(d, jc, w[0], w[1]) {
                    Some(c) => cost += c,
                    None => ok = false,
                }
            }
            if !ok {
                return;
            }
            let total = cost + sink_weight(d, jc, last.0);
            if total < best.0 || (total == best.0 && path.len() > best.1.len()) {
                *best = (total, path.clone());
            }
        }
        let (i0, j0) = path.last().map_or((0, 0), |&(i, j)| (i + 1, j + 1));
        for i in i0..d.rows() {
            for j in j0..d.cols() {
                path.push((i, j));
                extend(d, jc, path, best);
                path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::feature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jump_cost_examples() {
        let d = DistanceMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(jump_cost(&d), 3.0);
        let d = DistanceMatrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 1.0]]);
        assert_eq!(jump_cost(&d), 1.0);
        let d = DistanceMatrix::from_rows(&[vec![4.0, 0.5, 2.0]]);
        assert_eq!(jump_cost(&d), 0.5);
    }

    #[test]
    fn global_cost_examples() {
        assert_eq!(global_cost(6.0, 3, 5), 10.0);
        assert_eq!(global_cost(6.0, 4, 4), 6.0);
        assert_eq!(global_cost(0.0, 2, 9), 0.0);
    }

    #[test]
    fn zero_diagonal_gives_identity() {
        let d = DistanceMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 1.0 + (i + j) as f64 });
        let (cost, pairs) = osb_match(&d, jump_cost(&d));
        assert_eq!(cost, 0.0);
        assert_eq!(pairs, (0..5).map(|i| (i, i)).collect::<Vec<_>>());
    }

    #[test]
    fn outlier_column_is_skipped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut cols = vals.clone();
        cols.insert(3, 50.0);
        let d = DistanceMatrix::from_fn(6, 7, |i, j| (vals[i] - cols[j]).abs() + 0.01);
        let jc = jump_cost(&d);
        let (cost, pairs) = osb_match(&d, jc);
        assert!(pairs.iter().all(|&(_, j)| j != 3));
        let through: f64 = (0..6).map(|i| d.get(i, i)).sum();
        assert!(cost < through);
        assert_eq!((cost, pairs), oracle::exhaustive(&d, jc));
    }

    #[test]
    fn agrees_with_exhaustive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=6);
            let d = DistanceMatrix::from_fn(m, n, |_, _| rng.random_range(0.0..2.0));
            let jc = jump_cost(&d);
            let got = osb_match(&d, jc);
            let want = oracle::exhaustive(&d, jc);
            assert_eq!(got, want, "{m}x{n}");
            assert!(got.1.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        }
    }

    fn random_features(rng: &mut ChaCha8Rng, n: usize) -> Vec<EndFeature> {
        (0..n)
            .map(|_| {
                let lhat = (0..50).map(|_| rng.random_range(0.0..1.0)).collect();
                feature(lhat, rng.random_range(0.05..0.5), rng.random_range(0.05..0.5), rng.random_range(0.0..1.0))
            })
            .collect()
    }

    #[test]
    fn self_match_is_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_features(&mut rng, 5);
        let r = match_features(&x, &x, &MatchParams::default()).unwrap();
        assert_eq!(r.global_cost, 0.0);
        assert_eq!(r.correspondence, (0..5).map(|i| (i, i)).collect::<Vec<_>>());
    }

    #[test]
    fn rotation_search_recovers_cyclic_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_features(&mut rng, 6);
        let mut y = x.clone();
        y.rotate_left(2);
        let r = match_features(&x, &y, &MatchParams::default()).unwrap();
        assert_eq!(r.global_cost, 0.0);
        assert!(r.correspondence.iter().all(|&(i, j)| (j + 2) % 6 == i));
        assert_eq!(r.correspondence.len(), 6);
    }

    #[test]
    fn cost_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let params = MatchParams::default();
        for _ in 0..50 {
            let m = rng.random_range(1..8);
            let n = rng.random_range(1..8);
            let x = random_features(&mut rng, m);
            let y = random_features(&mut rng, n);
            let xy = match_features(&x, &y, &params).unwrap();
            let yx = match_features(&y, &x, &params).unwrap();
            assert!((xy.global_cost - yx.global_cost).abs() <= 1e-9, "{m}x{n}");
            assert!(xy.global_cost >= xy.raw_cost);
            assert_eq!(xy.global_cost == xy.raw_cost, m == n || xy.raw_cost == 0.0);
        }
    }

    #[test]
    fn empty_sequences_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_features(&mut rng, 2);
        assert!(match_features(&x, &[], &MatchParams::default()).is_err());
    }
}
