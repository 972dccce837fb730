use super::shape::BinaryShape;

/// Chamfer 3-4 weight for an axial step, in thirds of a pixel.
pub const AXIAL: u32 = 3;
/// Chamfer 3-4 weight for a diagonal step.
pub const DIAGONAL: u32 = 4;

/// Per-pixel chamfer distance to the nearest background pixel.
///
/// Values are stored as integer chamfer units (3 per axial step) so the
/// transform is exact; [`DistanceField::value`] divides by 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    raw: Vec<u32>,
}

impl DistanceField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Raw chamfer units; 0 outside the canvas and on background.
    pub fn raw(&self, x: i64, y: i64) -> u32 {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            0
        } else {
            self.raw[y as usize * self.width + x as usize]
        }
    }

    pub fn raw_slice(&self) -> &[u32] {
        &self.raw
    }

    /// Distance in pixels.
    pub fn value(&self, x: i64, y: i64) -> f64 {
        self.raw(x, y) as f64 / AXIAL as f64
    }

    pub fn is_foreground(&self, x: i64, y: i64) -> bool {
        self.raw(x, y) > 0
    }

    pub(crate) fn from_raw(width: usize, height: usize, raw: Vec<u32>) -> Self {
        DistanceField { width, height, raw }
    }
}

/// Two-pass chamfer 3-4 distance transform; the canvas border counts as
/// background.
pub fn distance_transform(shape: &BinaryShape) -> DistanceField {
    let (w, h) = (shape.width(), shape.height());
    let mut d: Vec<u32> = shape.mask().iter().map(|&f| if f { u32::MAX / 2 } else { 0 }).collect();
    let at = |d: &[u32], x: i64, y: i64| -> u32 {
        if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
            0
        } else {
            d[y as usize * w + x as usize]
        }
    };
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let v = d[i]
                .min(at(&d, x - 1, y) + AXIAL)
                .min(at(&d, x, y - 1) + AXIAL)
                .min(at(&d, x - 1, y - 1) + DIAGONAL)
                .min(at(&d, x + 1, y - 1) + DIAGONAL);
            d[i] = v;
        }
    }
    for y in (0..h as i64).rev() {
        for x in (0..w as i64).rev() {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let v = d[i]
                .min(at(&d, x + 1, y) + AXIAL)
                .min(at(&d, x, y + 1) + AXIAL)
                .min(at(&d, x + 1, y + 1) + DIAGONAL)
                .min(at(&d, x - 1, y + 1) + DIAGONAL);
            d[i] = v;
        }
    }
    DistanceField::from_raw(w, h, d)
}
