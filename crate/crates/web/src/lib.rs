//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Shapes arrive as RGBA canvas pixels; dark pixels are foreground. Every
//! call returns a JSON string so the page needs no generated typings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use skelshape::generalize::{generalize_set, Grts};
use skelshape::metric::MatchParams;
use skelshape::osb::match_shapes;
use skelshape::raster::BinaryShape;
use skelshape::render;
use skelshape::rts::{build_rts, Rts, RtsConfig};
use skelshape::{Error, Result};

fn to_js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

fn shape_from_rgba(rgba: &[u8], width: usize, height: usize) -> Result<BinaryShape> {
    if rgba.len() != width * height * 4 {
        return Err(Error::Invalid(format!("expected {}x{} RGBA pixels, got {} bytes", width, height, rgba.len())));
    }
    // Transparent pixels count as background.
    let mask = rgba
        .chunks_exact(4)
        .map(|p| {
            let luma = (299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32) / 1000;
            p[3] >= 128 && luma < 128
        })
        .collect();
    BinaryShape::from_mask(width, height, mask, "canvas")
}

fn config(prune_significance: f64) -> RtsConfig {
    RtsConfig { prune_significance, ..RtsConfig::default() }
}

fn skeletonize_impl(rgba: &[u8], width: usize, height: usize, prune_significance: f64) -> Result<String> {
    let shape = shape_from_rgba(rgba, width, height)?;
    let rts = build_rts(&shape, &config(prune_significance))?;
    Ok(json!({ "svg": render::rts_svg(&shape, &rts), "rts": rts }).to_string())
}

fn match_impl(a: &[u8], b: &[u8], width: usize, height: usize, prune_significance: f64) -> Result<String> {
    let cfg = config(prune_significance);
    let (sa, sb) = (shape_from_rgba(a, width, height)?, shape_from_rgba(b, width, height)?);
    let (ra, rb) = (build_rts(&sa, &cfg)?, build_rts(&sb, &cfg)?);
    let m = match_shapes(&ra, &rb, &MatchParams::default())?;
    Ok(json!({
        "cost": m.global_cost,
        "jumpcost": m.jumpcost,
        "correspondence": m.correspondence,
        "svg_a": render::rts_svg(&sa, &ra),
        "svg_b": render::rts_svg(&sb, &rb),
    })
    .to_string())
}

/// Shapes collected on the page, folded into a prototype on demand.
#[wasm_bindgen]
#[derive(Default)]
pub struct Prototype {
    prune_significance: f64,
    examples: Vec<(String, Rts)>,
    grts: Option<Grts>,
}

#[wasm_bindgen]
impl Prototype {
    #[wasm_bindgen(constructor)]
    pub fn new(prune_significance: f64) -> Prototype {
        Prototype { prune_significance, ..Prototype::default() }
    }

    /// Adds a drawn shape and returns the number of examples.
    pub fn add(&mut self, rgba: &[u8], width: usize, height: usize) -> std::result::Result<usize, JsError> {
        self.add_impl(rgba, width, height).map_err(|e| JsError::new(&e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn clear(&mut self) {
        self.examples.clear();
        self.grts = None;
    }

    /// Merges every example; returns the merge tree figure and the GRTS.
    pub fn generalize(&mut self) -> std::result::Result<String, JsError> {
        to_js(self.generalize_impl())
    }

    /// Projects the prototype onto a drawn shape.
    pub fn apply(&self, rgba: &[u8], width: usize, height: usize) -> std::result::Result<String, JsError> {
        to_js(self.apply_impl(rgba, width, height))
    }
}

impl Prototype {
    fn add_impl(&mut self, rgba: &[u8], width: usize, height: usize) -> Result<usize> {
        let shape = shape_from_rgba(rgba, width, height)?;
        let rts = build_rts(&shape, &config(self.prune_significance))?;
        self.examples.push((format!("example-{:02}", self.examples.len() + 1), rts));
        self.grts = None;
        Ok(self.examples.len())
    }

    fn generalize_impl(&mut self) -> Result<String> {
        let g = generalize_set(&self.examples, &MatchParams::default())?;
        let out = json!({ "svg": render::merge_tree_svg(&g.merge_tree), "parts": g.features().len(), "grts": g });
        self.grts = Some(g);
        Ok(out.to_string())
    }

    fn apply_impl(&self, rgba: &[u8], width: usize, height: usize) -> Result<String> {
        let g = self.grts.as_ref().ok_or_else(|| Error::Invalid("generalize the examples first".into()))?;
        let shape = shape_from_rgba(rgba, width, height)?;
        let x = build_rts(&shape, &config(self.prune_significance))?;
        let cm = skelshape::apply::apply_character(g, &x, width, height, &MatchParams::default())?;
        Ok(json!({ "svg": render::apply_svg(&shape, g, &x, &cm), "report": cm }).to_string())
    }
}

/// Skeleton, end paths and spine of a drawn shape.
#[wasm_bindgen]
pub fn skeletonize(
    rgba: &[u8],
    width: usize,
    height: usize,
    prune_significance: f64,
) -> std::result::Result<String, JsError> {
    to_js(skeletonize_impl(rgba, width, height, prune_significance))
}

/// Matching cost and endpoint correspondence between two drawn shapes.
#[wasm_bindgen(js_name = matchShapes)]
pub fn match_two(
    a: &[u8],
    b: &[u8],
    width: usize,
    height: usize,
    prune_significance: f64,
) -> std::result::Result<String, JsError> {
    to_js(match_impl(a, b, width, height, prune_significance))
}
