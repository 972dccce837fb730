//! Distance between two end features: discrete Fréchet distance on the
//! radius profiles plus mass/length and spine-alignment terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rts::EndFeature;

/// Ground distance used inside the Fréchet computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrechetGround {
    /// Absolute difference of normalized radii.
    #[default]
    Radius,
    /// Euclidean distance between `(index / 50, radius)` points.
    IndexRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchParams {
    pub beta1: f64,
    pub beta2: f64,
    pub alpha: f64,
    pub frechet_ground: FrechetGround,
    /// Try every cyclic shift of the longer endpoint sequence.
    pub rotation_search: bool,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams {
            beta1: 30.0,
            beta2: 0.6,
            alpha: 0.65,
            frechet_ground: FrechetGround::Radius,
            rotation_search: true,
        }
    }
}

/// Discrete Fréchet distance between two equal-length scalar sequences
/// with absolute difference as ground distance.
pub fn discrete_frechet(p: &[f64], q: &[f64]) -> Result<f64> {
    discrete_frechet_with(p, q, FrechetGround::Radius)
}

pub fn discrete_frechet_with(p: &[f64], q: &[f64], ground: FrechetGround) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = p.len();
    let d = |a: usize, b: usize| match ground {
        FrechetGround::Radius => (p[a] - q[b]).abs(),
        FrechetGround::IndexRadius => {
            let di = (a as f64 - b as f64) / n as f64;
            di.hypot(p[a] - q[b])
        }
    };
    let mut prev = vec![0.0f64; n];
    let mut cur = vec![0.0f64; n];
    for a in 0..n {
        for b in 0..n {
            let reach = match (a, b) {
                (0, 0) => 0.0,
                (0, _) => cur[b - 1],
                (_, 0) => prev[0],
                _ => prev[b].min(prev[b - 1]).min(cur[b - 1]),
            };
            cur[b] = d(a, b).max(reach);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[n - 1])
}

fn squared_ratio(a: f64, b: f64, what: &'static str) -> Result<f64> {
    if a + b == 0.0 {
        return Err(Error::ZeroDenominator(what));
    }
    Ok((a - b).powi(2) / (a + b))
}

/// `alpha * d_l + (1 - alpha) * d_m` with `d = (a - b)^2 / (a + b)`.
pub fn mass_length_distance(p: &EndFeature, q: &EndFeature, alpha: f64) -> Result<f64> {
    let dm = squared_ratio(p.mhat, q.mhat, "mass")?;
    let dl = squared_ratio(p.lhat_len, q.lhat_len, "length")?;
    Ok(alpha * dl + (1.0 - alpha) * dm)
}

/// `(V_p - V_q)^2 / (V_p + V_q)`, and 0 when both values are 0.
pub fn spatial_distance(p: &EndFeature, q: &EndFeature) -> f64 {
    squared_ratio(p.v, q.v, "spatial").unwrap_or(0.0)
}

pub fn endpoint_distance(p: &EndFeature, q: &EndFeature, params: &MatchParams) -> Result<f64> {
    let df = discrete_frechet_with(&p.lhat, &q.lhat, params.frechet_ground)?;
    let dml = mass_length_distance(p, q, params.alpha)?;
    Ok(df + params.beta1 * dml + params.beta2 * spatial_distance(p, q))
}

#[cfg(test)]
pub(crate) fn feature(lhat: Vec<f64>, mhat: f64, lhat_len: f64, v: f64) -> EndFeature {
    let n = lhat.len();
    EndFeature { lhat, mhat, lhat_len, v, endpoint: [0.0, 0.0], path: vec![[0.0, 0.0]; n] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::collections::HashMap;

    /// Top-down recursion straight from the coupling definition.
    fn frechet_oracle(p: &[f64], q: &[f64]) -> f64 {
        fn rec(p: &[f64], q: &[f64], a: usize, b: usize, memo: &mut HashMap<(usize, usize), f64>) -> f64 {
            if let Some(&v) = memo.get(&(a, b)) {
                return v;
            }
            let d = (p[a] - q[b]).abs();
            let v = if a == 0 && b == 0 {
                d
            } else if a == 0 {
                d.max(rec(p, q, 0, b - 1, memo))
            } else if b == 0 {
                d.max(rec(p, q, a - 1, 0, memo))
            } else {
                let best = rec(p, q, a - 1, b, memo).min(rec(p, q, a - 1, b - 1, memo)).min(rec(p, q, a, b - 1, memo));
                d.max(best)
            };
            memo.insert((a, b), v);
            v
        }
        rec(p, q, p.len() - 1, q.len() - 1, &mut HashMap::new())
    }

    #[test]
    fn frechet_basics() {
        let p: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        assert_eq!(discrete_frechet(&p, &p).unwrap(), 0.0);
        assert_eq!(discrete_frechet(&[0.0; 50], &[1.0; 50]).unwrap(), 1.0);
        assert!(matches!(discrete_frechet(&[0.0; 3], &[0.0; 4]), Err(Error::LengthMismatch(3, 4))));
    }

    proptest! {
        #[test]
        fn frechet_matches_oracle(p in prop::collection::vec(0.0f64..1.0, 50), q in prop::collection::vec(0.0f64..1.0, 50)) {
            prop_assert_eq!(discrete_frechet(&p, &q).unwrap(), frechet_oracle(&p, &q));
        }

        #[test]
        fn frechet_is_a_pseudometric(
            p in prop::collection::vec(0.0f64..1.0, 50),
            q in prop::collection::vec(0.0f64..1.0, 50),
            r in prop::collection::vec(0.0f64..1.0, 50),
        ) {
            let pq = discrete_frechet(&p, &q).unwrap();
            prop_assert_eq!(pq, discrete_frechet(&q, &p).unwrap());
            prop_assert!(pq <= discrete_frechet(&p, &r).unwrap() + discrete_frechet(&r, &q).unwrap() + 1e-12);
            prop_assert!(pq >= (p[0] - q[0]).abs().max((p[49] - q[49]).abs()));
        }

        #[test]
        fn endpoint_distance_is_symmetric(
            p in prop::collection::vec(0.0f64..1.0, 50),
            q in prop::collection::vec(0.0f64..1.0, 50),
            m in (0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0),
            v in (0.0f64..1.0, 0.0f64..1.0),
        ) {
            let a = feature(p, m.0, m.1, v.0);
            let b = feature(q, m.2, m.3, v.1);
            let params = MatchParams::default();
            let ab = endpoint_distance(&a, &b, &params).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, endpoint_distance(&b, &a, &params).unwrap());
        }
    }

    #[test]
    fn mass_length_example() {
        let p = feature(vec![0.0; 50], 0.2, 0.3, 0.5);
        let q = feature(vec![0.0; 50], 0.6, 0.3, 0.5);
        assert_abs_diff_eq!(mass_length_distance(&p, &q, 0.65).unwrap(), 0.07, epsilon = 1e-12);
        assert_eq!(mass_length_distance(&p, &p, 0.65).unwrap(), 0.0);
        assert_eq!(mass_length_distance(&p, &q, 0.65).unwrap(), mass_length_distance(&q, &p, 0.65).unwrap());
        let z = feature(vec![0.0; 50], 0.0, 0.3, 0.5);
        assert!(matches!(mass_length_distance(&z, &z, 0.65), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn spatial_examples() {
        let f = |v| feature(vec![0.0; 50], 0.1, 0.1, v);
        assert_eq!(spatial_distance(&f(0.4), &f(0.4)), 0.0);
        assert_eq!(spatial_distance(&f(1.0), &f(0.0)), 1.0);
        assert_abs_diff_eq!(spatial_distance(&f(0.8), &f(0.2)), 0.36, epsilon = 1e-12);
        assert_eq!(spatial_distance(&f(0.0), &f(0.0)), 0.0);
    }

    #[test]
    fn combined_distance() {
        // d_F = 0.1 from a constant offset, d_ML = 0.02 and d_V = 0.3 by
        // construction.
        let p = feature(vec![0.5; 50], 0.2, 0.2, 0.9);
        let mut q = feature(vec![0.6; 50], 0.2, 0.2, 0.9);
        // d_m = 0 and d_l = (a-b)^2/(a+b) = 0.02 / 0.65 needs a-b, a+b with
        // alpha * d_l = 0.02.
        let dl: f64 = 0.02 / 0.65;
        // (a - b)^2 = dl * (a + b); fix a + b = 1.
        let diff = dl.sqrt();
        q.lhat_len = (1.0 + diff) / 2.0;
        let p = EndFeature { lhat_len: (1.0 - diff) / 2.0, ..p };
        // (V_p - V_q)^2 / (V_p + V_q) = 0.3 with V_p + V_q = 1.2.
        let dv = (0.3f64 * 1.2).sqrt();
        let p = EndFeature { v: (1.2 + dv) / 2.0, ..p };
        q.v = (1.2 - dv) / 2.0;
        let params = MatchParams::default();
        assert_abs_diff_eq!(discrete_frechet(&p.lhat, &q.lhat).unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(mass_length_distance(&p, &q, 0.65).unwrap(), 0.02, epsilon = 1e-12);
        assert_abs_diff_eq!(spatial_distance(&p, &q), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(endpoint_distance(&p, &q, &params).unwrap(), 0.88, epsilon = 1e-9);
        let bare = MatchParams { beta1: 0.0, beta2: 0.0, ..params };
        assert_eq!(endpoint_distance(&p, &q, &bare).unwrap(), discrete_frechet(&p.lhat, &q.lhat).unwrap());
        assert_eq!(endpoint_distance(&p, &p, &params).unwrap(), 0.0);
    }

    #[test]
    fn index_ground_is_at_least_radius_ground() {
        let p: Vec<f64> = (0..50).map(|i| (i as f64 / 7.0).cos().abs()).collect();
        let q: Vec<f64> = (0..50).map(|i| (i as f64 / 5.0).sin().abs()).collect();
        let a = discrete_frechet_with(&p, &q, FrechetGround::Radius).unwrap();
        let b = discrete_frechet_with(&p, &q, FrechetGround::IndexRadius).unwrap();
        assert!(b >= a);
    }
}
