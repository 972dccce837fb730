//! Projecting a generalized representation onto an instance: an
//! explanatory mask with per-part differences, and completion of shapes
//! with missing parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generalize::Grts;
use crate::metric::{endpoint_distance, MatchParams};
use crate::osb::{match_features, MatchResult};
use crate::raster::BinaryShape;
use crate::rts::Rts;

/// Row-major boolean raster.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Mask {
        Mask { width, height, data: vec![false; width * height] }
    }

    pub fn from_shape(shape: &BinaryShape) -> Mask {
        Mask { width: shape.width(), height: shape.height(), data: shape.mask().to_vec() }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Sets every pixel centre within `r` of `(cx, cy)`, clipped to the canvas.
    pub fn paint_disk(&mut self, [cx, cy]: [f64; 2], r: f64) {
        if !(cx.is_finite() && cy.is_finite() && r.is_finite()) || self.width == 0 || self.height == 0 {
            return;
        }
        let r = r.max(0.5);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let y0 = (cy - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil().max(0.0) as usize).min(self.width - 1);
        let y1 = ((cy + r).ceil().max(0.0) as usize).min(self.height - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    self.data[y * self.width + x] = true;
                }
            }
        }
    }
}

/// `p -> s * R(theta) * p + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub theta: f64,
    pub tx: f64,
    pub ty: f64,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        SimilarityTransform { scale: 1.0, theta: 0.0, tx: 0.0, ty: 0.0 }
    }

    pub fn apply(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [self.scale * (c * x - s * y) + self.tx, self.scale * (s * x + c * y) + self.ty]
    }
}

/// Least-squares similarity mapping `src[k]` onto `dst[k]`, exact for two
/// pairs.
pub fn estimate_similarity_transform(pairs: &[([f64; 2], [f64; 2])]) -> Result<SimilarityTransform> {
    if pairs.len() < 2 {
        return Err(Error::DegeneratePairs("need at least two pairs"));
    }
    let n = pairs.len() as f64;
    let mean = |f: &dyn Fn(&([f64; 2], [f64; 2])) -> f64| pairs.iter().map(f).sum::<f64>() / n;
    let (sx, sy) = (mean(&|p| p.0[0]), mean(&|p| p.0[1]));
    let (dx, dy) = (mean(&|p| p.1[0]), mean(&|p| p.1[1]));
    // Complex least squares: a = sum(d * conj(s)) / sum(|s|^2) on centred points.
    let (mut re, mut im, mut norm) = (0.0, 0.0, 0.0);
    for (s, d) in pairs {
        let (ax, ay) = (s[0] - sx, s[1] - sy);
        let (bx, by) = (d[0] - dx, d[1] - dy);
        re += bx * ax + by * ay;
        im += by * ax - bx * ay;
        norm += ax * ax + ay * ay;
    }
    if norm <= 1e-12 {
        return Err(Error::DegeneratePairs("source points coincide"));
    }
    let (re, im) = (re / norm, im / norm);
    let scale = re.hypot(im);
    if !(scale.is_finite() && scale > 1e-12) {
        return Err(Error::DegeneratePairs("target points coincide"));
    }
    let theta = im.atan2(re);
    let tx = dx - (re * sx - im * sy);
    let ty = dy - (im * sx + re * sy);
    Ok(SimilarityTransform { scale, theta, tx, ty })
}

fn arc_length(path: &[[f64; 2]]) -> f64 {
    path.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum()
}

/// Root plus matched endpoint pairs, from generalized geometry to instance.
fn anchor_pairs(g: &Rts, x: &Rts, pairs: &[(usize, usize)]) -> Vec<([f64; 2], [f64; 2])> {
    std::iter::once((g.root(), x.root()))
        .chain(pairs.iter().map(|&(k, j)| (g.features[k].endpoint, x.features[j].endpoint)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartRecord {
    pub grts_index: usize,
    pub instance_index: Option<usize>,
    pub distance: Option<f64>,
    /// Drawn further along the mapped prototype path because the
    /// instance part is shorter.
    pub extended: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterMask {
    #[serde(skip)]
    pub mask: Mask,
    pub width: usize,
    pub height: usize,
    pub parts: Vec<PartRecord>,
    pub unmatched_instance: Vec<usize>,
    pub unmatched_grts: Vec<usize>,
    pub cost: f64,
    pub correspondence: Vec<(usize, usize)>,
    /// Prototype-to-instance mapping fitted on root and matched endpoints.
    pub transform: Option<SimilarityTransform>,
}

/// Ratio above which a mapped prototype part counts as longer than its
/// instance part.
const EXTENSION_RATIO: f64 = 1.1;

/// Draws the prototype's radii along the instance's matched paths on a
/// `width` x `height` canvas.
pub fn apply_character(g: &Grts, x: &Rts, width: usize, height: usize, params: &MatchParams) -> Result<CharacterMask> {
    let m = match_features(g.features(), &x.features, params)?;
    let transform = estimate_similarity_transform(&anchor_pairs(&g.rts, x, &m.correspondence)).ok();
    let mut mask = Mask::new(width, height);
    let mut parts = Vec::with_capacity(g.features().len());
    for (k, gf) in g.features().iter().enumerate() {
        let Some(&(_, j)) = m.correspondence.iter().find(|&&(a, _)| a == k) else {
            parts.push(PartRecord { grts_index: k, instance_index: None, distance: None, extended: false });
            continue;
        };
        let xf = &x.features[j];
        for (p, r) in xf.path.iter().zip(&gf.lhat) {
            mask.paint_disk(*p, r * x.r_star);
        }
        let mut extended = false;
        if let Some(t) = transform {
            let mapped: Vec<[f64; 2]> = gf.path.iter().map(|&p| t.apply(p)).collect();
            if arc_length(&mapped) > EXTENSION_RATIO * arc_length(&xf.path) {
                extended = true;
                for (p, r) in mapped.iter().zip(&gf.lhat) {
                    mask.paint_disk(*p, r * x.r_star);
                }
            }
        }
        parts.push(PartRecord {
            grts_index: k,
            instance_index: Some(j),
            distance: Some(endpoint_distance(gf, xf, params)?),
            extended,
        });
    }
    let unmatched_instance = (0..x.features.len()).filter(|j| !m.correspondence.iter().any(|p| p.1 == *j)).collect();
    let unmatched_grts = parts.iter().filter(|p| p.instance_index.is_none()).map(|p| p.grts_index).collect();
    Ok(CharacterMask {
        mask,
        width,
        height,
        parts,
        unmatched_instance,
        unmatched_grts,
        cost: m.global_cost,
        correspondence: m.correspondence,
        transform,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    /// Input foreground united with the rendered missing parts.
    #[serde(skip)]
    pub mask: Mask,
    pub transform: SimilarityTransform,
    #[serde(rename = "match")]
    pub matching: MatchResult,
    /// Prototype parts with no instance counterpart, now drawn in.
    pub added_parts: Vec<usize>,
    pub added_pixels: usize,
    /// Every prototype path mapped into the instance frame.
    pub mapped_paths: Vec<Vec<[f64; 2]>>,
}

/// Renders the prototype parts missing from `partial` onto its image.
pub fn complete_shape(g: &Grts, partial: &Rts, image: &BinaryShape, params: &MatchParams) -> Result<Completion> {
    let m = match_features(g.features(), &partial.features, params)?;
    if m.correspondence.len() < 2 {
        return Err(Error::InsufficientCorrespondence(m.correspondence.len()));
    }
    let transform = estimate_similarity_transform(&anchor_pairs(&g.rts, partial, &m.correspondence))?;
    let mapped_paths: Vec<Vec<[f64; 2]>> =
        g.features().iter().map(|f| f.path.iter().map(|&p| transform.apply(p)).collect()).collect();
    let added_parts: Vec<usize> =
        (0..g.features().len()).filter(|k| !m.correspondence.iter().any(|p| p.0 == *k)).collect();
    let mut mask = Mask::from_shape(image);
    let before = mask.count();
    let r_star = g.rts.r_star * transform.scale;
    for &k in &added_parts {
        for (p, r) in mapped_paths[k].iter().zip(&g.features()[k].lhat) {
            mask.paint_disk(*p, r * r_star);
        }
    }
    let added_pixels = mask.count() - before;
    Ok(Completion { mask, transform, matching: m, added_parts, added_pixels, mapped_paths })
}
