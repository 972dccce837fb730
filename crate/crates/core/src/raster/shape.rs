use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer pixel coordinate. Field order gives row-major `Ord`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub y: u32,
    pub x: u32,
}

impl Pixel {
    pub const fn new(x: u32, y: u32) -> Self {
        Pixel { y, x }
    }

    pub fn xy(self) -> [f64; 2] {
        [self.x as f64, self.y as f64]
    }

    pub fn dist(self, other: Pixel) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_adjacent8(self, other: Pixel) -> bool {
        self != other && self.x.abs_diff(other.x) <= 1 && self.y.abs_diff(other.y) <= 1
    }
}

/// 8-neighbourhood offsets in counterclockwise order (image y grows down),
/// starting East: E, NE, N, NW, W, SW, S, SE.
pub(crate) const RING8: [(i64, i64); 8] = [(1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1)];

/// Options for turning a raster into a silhouette.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    /// Gray level at or above which a pixel is foreground.
    pub threshold: u8,
    /// Treat dark pixels as foreground instead.
    pub invert: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { threshold: 128, invert: false }
    }
}

/// A single-component binary silhouette together with its outer contour.
#[derive(Clone, Debug)]
pub struct BinaryShape {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    contour: Vec<Pixel>,
    source_id: String,
}

impl BinaryShape {
    /// Build a shape from a row-major mask. Only the largest 8-connected
    /// foreground component is kept.
    pub fn from_mask(width: usize, height: usize, mask: Vec<bool>, source_id: impl Into<String>) -> Result<Self> {
        if mask.len() != width * height {
            return Err(Error::Invalid(format!("mask has {} pixels, expected {}x{}", mask.len(), width, height)));
        }
        let mask = largest_component(width, height, &mask).ok_or(Error::EmptyShape)?;
        let contour = trace_contour(width, height, &mask);
        Ok(BinaryShape { width, height, mask, contour, source_id: source_id.into() })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        source_id: impl Into<String>,
        f: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut mask = vec![false; width * height];
        for y in 0..height {
            for x in 0..width {
                mask[y * width + x] = f(x, y);
            }
        }
        Self::from_mask(width, height, mask, source_id)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contour(&self) -> &[Pixel] {
        &self.contour
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn set_source_id(&mut self, id: impl Into<String>) {
        self.source_id = id.into();
    }

    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Foreground test; anything outside the canvas is background.
    pub fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.mask[y as usize * self.width + x as usize]
    }

    /// Rotate the canvas a quarter turn: `(x, y) -> (h - 1 - y, x)`.
    pub fn rotate90(&self) -> BinaryShape {
        let (w, h) = (self.width, self.height);
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                if self.mask[y * w + x] {
                    let nx = h - 1 - y;
                    let ny = x;
                    out[ny * h + nx] = true;
                }
            }
        }
        BinaryShape::from_mask(h, w, out, self.source_id.clone()).expect("rotation preserves a nonempty component")
    }

    /// Pixel replication by an integer factor.
    pub fn upscale(&self, factor: usize) -> BinaryShape {
        let factor = factor.max(1);
        let (w, h) = (self.width * factor, self.height * factor);
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                out[y * w + x] = self.mask[(y / factor) * self.width + x / factor];
            }
        }
        BinaryShape::from_mask(w, h, out, self.source_id.clone()).expect("upscaling preserves a nonempty component")
    }

    /// Tight bounding box `(x0, y0, x1, y1)`, inclusive.
    pub fn bounding_box(&self) -> (usize, usize, usize, usize) {
        let mut b = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.mask[y * self.width + x] {
                    b.0 = b.0.min(x);
                    b.1 = b.1.min(y);
                    b.2 = b.2.max(x);
                    b.3 = b.3.max(y);
                }
            }
        }
        b
    }

    /// Copy of the bounding box grown by `margin` background pixels on every
    /// side, with the offset of the new canvas in the old one.
    pub fn crop(&self, margin: usize) -> (BinaryShape, (i64, i64)) {
        let (x0, y0, x1, y1) = self.bounding_box();
        let (ox, oy) = (x0 as i64 - margin as i64, y0 as i64 - margin as i64);
        let (w, h) = (x1 - x0 + 1 + 2 * margin, y1 - y0 + 1 + 2 * margin);
        let mask = (0..w * h).map(|i| self.get(ox + (i % w) as i64, oy + (i / w) as i64)).collect();
        let shape = BinaryShape::from_mask(w, h, mask, self.source_id.clone())
            .expect("cropping preserves a nonempty component");
        (shape, (ox, oy))
    }

    /// 8-bit rendering, foreground white.
    pub fn to_gray(&self) -> image::GrayImage {
        image::GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            image::Luma([if self.mask[y as usize * self.width + x as usize] { 255 } else { 0 }])
        })
    }
}

/// Decode a PGM/PNG/BMP silhouette.
pub fn load_silhouette(bytes: &[u8], opts: &LoadOptions) -> Result<BinaryShape> {
    let img = image::load_from_memory(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    let gray = img.to_luma8();
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let mask = gray.pixels().map(|p| (p.0[0] >= opts.threshold) != opts.invert).collect();
    BinaryShape::from_mask(w, h, mask, "")
}

fn largest_component(width: usize, height: usize, mask: &[bool]) -> Option<Vec<bool>> {
    let mut label = vec![0u32; mask.len()];
    let mut best = (0usize, 0u32);
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = ((i % width) as i64, (i / width) as i64);
            for (dx, dy) in RING8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if mask[j] && label[j] == 0 {
                    label[j] = next;
                    queue.push_back(j);
                }
            }
        }
        if size > best.0 {
            best = (size, next);
        }
    }
    (best.0 > 0).then(|| label.iter().map(|&l| l == best.1).collect())
}

/// Moore-neighbour trace of the outer boundary, returned counterclockwise
/// as seen on screen.
fn trace_contour(width: usize, height: usize, mask: &[bool]) -> Vec<Pixel> {
    let fg = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height && mask[y as usize * width + x as usize]
    };
    let start = match mask.iter().position(|&b| b) {
        Some(i) => ((i % width) as i64, (i / width) as i64),
        None => return Vec::new(),
    };
    // Clockwise scan order on screen: W, NW, N, NE, E, SE, S, SW.
    const CW: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];
    let dir_of = |dx: i64, dy: i64| CW.iter().position(|&d| d == (dx, dy)).unwrap();

    let mut contour = vec![Pixel::new(start.0 as u32, start.1 as u32)];
    let mut cur = start;
    // The raster-first pixel always has background to its west.
    let mut back = 0usize;
    let initial = (cur, back);
    let limit = 4 * mask.len() + 16;
    for _ in 0..limit {
        let mut found = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let n = (cur.0 + CW[d].0, cur.1 + CW[d].1);
            if fg(n.0, n.1) {
                found = Some((n, (back + k - 1) % 8));
                break;
            }
        }
        let Some((next, prev_dir)) = found else {
            break; // isolated pixel
        };
        let b = (cur.0 + CW[prev_dir].0, cur.1 + CW[prev_dir].1);
        cur = next;
        back = dir_of(b.0 - cur.0, b.1 - cur.1);
        if (cur, back) == initial {
            break;
        }
        if cur == start {
            // Jacob's criterion: stop once the start is re-entered the same way.
            let mut probe = None;
            for k in 1..=8 {
                let d = (back + k) % 8;
                let n = (cur.0 + CW[d].0, cur.1 + CW[d].1);
                if fg(n.0, n.1) {
                    probe = Some(n);
                    break;
                }
            }
            if contour.len() > 1 && probe == Some((contour[1].x as i64, contour[1].y as i64)) {
                break;
            }
        }
        contour.push(Pixel::new(cur.0 as u32, cur.1 as u32));
    }
    // Screen-clockwise shoelace area is positive with y pointing down.
    let n = contour.len();
    let mut area2 = 0i64;
    for i in 0..n {
        let a = contour[i];
        let b = contour[(i + 1) % n];
        area2 += a.x as i64 * b.y as i64 - b.x as i64 * a.y as i64;
    }
    if area2 > 0 {
        contour[1..].reverse();
    }
    contour
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_bytes(img: &image::GrayImage) -> Vec<u8> {
        let mut out = std::io::Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png).unwrap();
        out.into_inner()
    }

    #[test]
    fn single_white_pixel() {
        let img = image::GrayImage::from_pixel(1, 1, image::Luma([255]));
        let s = load_silhouette(&png_bytes(&img), &LoadOptions::default()).unwrap();
        assert_eq!(s.foreground_count(), 1);
        assert_eq!(s.contour(), &[Pixel::new(0, 0)]);
    }

    #[test]
    fn all_black_is_empty() {
        let img = image::GrayImage::from_pixel(7, 5, image::Luma([0]));
        let err = load_silhouette(&png_bytes(&img), &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyShape));
    }

    #[test]
    fn garbage_bytes_fail_to_decode() {
        let err = load_silhouette(b"not an image", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Decode(_)));
    }

    #[test]
    fn pgm_is_accepted() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 200, 0, 0, 255, 0]);
        let s = load_silhouette(&bytes, &LoadOptions::default()).unwrap();
        assert_eq!(s.foreground_count(), 2);
    }

    #[test]
    fn keeps_largest_component() {
        let s = BinaryShape::from_fn(10, 10, "t", |x, y| (x < 2 && y < 2) || (x > 4 && y > 4)).unwrap();
        assert_eq!(s.foreground_count(), 25);
    }

    #[test]
    fn invert_option() {
        let img = image::GrayImage::from_fn(4, 4, |x, _| image::Luma([if x < 2 { 0 } else { 255 }]));
        let opts = LoadOptions { threshold: 128, invert: true };
        let s = load_silhouette(&png_bytes(&img), &opts).unwrap();
        assert_eq!(s.foreground_count(), 8);
        assert!(s.get(0, 0) && !s.get(3, 0));
    }

    fn check_contour(s: &BinaryShape) {
        let c = s.contour();
        assert!(!c.is_empty());
        if c.len() > 1 {
            assert!(c[0].is_adjacent8(*c.last().unwrap()));
        }
        for w in c.windows(2) {
            assert!(w[0].is_adjacent8(w[1]), "{:?}", w);
        }
        for p in c {
            let (x, y) = (p.x as i64, p.y as i64);
            assert!(s.get(x, y));
            let bg4 = [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(dx, dy)| !s.get(x + dx, y + dy));
            assert!(bg4, "contour pixel {:?} has no background 4-neighbour", p);
        }
    }

    #[test]
    fn contour_is_closed_and_counterclockwise() {
        let s = BinaryShape::from_fn(12, 9, "r", |x, y| (2..10).contains(&x) && (2..7).contains(&y)).unwrap();
        check_contour(&s);
        // Screen counterclockwise: from the top-left corner the walk heads down the left side.
        let c = s.contour();
        assert_eq!(c[0], Pixel::new(2, 2));
        assert_eq!(c[1], Pixel::new(2, 3));
        assert_eq!(c.len(), 2 * (8 + 5) - 4);
    }

    #[test]
    fn contour_of_irregular_shape() {
        let s = BinaryShape::from_fn(20, 20, "l", |x, y| {
            let (dx, dy) = (x as f64 - 9.5, y as f64 - 9.5);
            (dx * dx + dy * dy < 60.0) || (x > 9 && y > 8 && y < 12) || (x == 3 && y < 6)
        })
        .unwrap();
        check_contour(&s);
    }

    #[test]
    fn rotate_four_times_is_identity() {
        let s = BinaryShape::from_fn(7, 4, "a", |x, y| x + y < 6).unwrap();
        let r = s.rotate90().rotate90().rotate90().rotate90();
        assert_eq!(r.mask(), s.mask());
        assert_eq!(s.rotate90().width(), 4);
    }

    #[test]
    fn upscale_counts() {
        let s = BinaryShape::from_fn(3, 3, "a", |x, y| x == 1 || y == 1).unwrap();
        assert_eq!(s.upscale(3).foreground_count(), 5 * 9);
    }

    #[test]
    fn crop_keeps_margin() {
        let s = BinaryShape::from_fn(20, 10, "a", |x, y| (5..9).contains(&x) && (2..4).contains(&y)).unwrap();
        let (c, off) = s.crop(2);
        assert_eq!((c.width(), c.height()), (8, 6));
        assert_eq!(off, (3, 0));
        assert_eq!(c.foreground_count(), 8);
        assert!(c.get(2, 2) && !c.get(1, 2));
    }
}
