use std::collections::VecDeque;

use super::distance::{DistanceField, AXIAL, DIAGONAL};
use super::shape::{Pixel, RING8};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Default spur significance, as a fraction of the maximal radius.
pub const DEFAULT_PRUNE_SIGNIFICANCE: f64 = 0.08;

/// Spurs shallower than this many pixels are boundary digitization noise
/// whatever the shape's size.
pub const MIN_SPUR_DEPTH: f64 = 2.0;

/// Medial-axis points with their maximal inscribed disk radii.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    width: usize,
    height: usize,
    points: Vec<Pixel>,
    radius: Vec<f64>,
    index: Vec<u32>,
}

impl Skeleton {
    /// Assemble a skeleton from explicit points. Points are stored in
    /// row-major order; duplicates and out-of-canvas points are rejected.
    pub fn from_points(width: usize, height: usize, mut pts: Vec<(Pixel, f64)>) -> Result<Self> {
        pts.sort_by_key(|a| a.0);
        pts.dedup_by(|a, b| a.0 == b.0);
        if pts.is_empty() {
            return Err(Error::DegenerateSkeleton("no skeleton points"));
        }
        let mut index = vec![NONE; width * height];
        for (i, (p, r)) in pts.iter().enumerate() {
            if p.x as usize >= width || p.y as usize >= height || !(r.is_finite() && *r > 0.0) {
                return Err(Error::Invalid(format!("bad skeleton point {:?} r={}", p, r)));
            }
            index[p.y as usize * width + p.x as usize] = i as u32;
        }
        Ok(Skeleton {
            width,
            height,
            points: pts.iter().map(|p| p.0).collect(),
            radius: pts.iter().map(|p| p.1).collect(),
            index,
        })
    }

    fn from_grid(on: &[bool], field: &DistanceField) -> Result<Self> {
        let (w, h) = (field.width(), field.height());
        let pts = (0..w * h)
            .filter(|&i| on[i])
            .map(|i| {
                let (x, y) = (i % w, i / w);
                (Pixel::new(x as u32, y as u32), field.value(x as i64, y as i64))
            })
            .collect();
        Self::from_points(w, h, pts)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Pixel] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Pixel {
        self.points[i]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radius[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radius
    }

    pub fn index_of(&self, x: i64, y: i64) -> Option<usize> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return None;
        }
        match self.index[y as usize * self.width + x as usize] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.index_of(p.x as i64, p.y as i64).is_some()
    }

    /// Skeleton neighbours of point `i` in counterclockwise ring order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.points[i];
        RING8.iter().filter_map(move |&(dx, dy)| self.index_of(p.x as i64 + dx, p.y as i64 + dy))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    /// Maximal radius r*.
    pub fn max_radius(&self) -> f64 {
        self.radius.iter().copied().fold(0.0, f64::max)
    }

    /// Total mass: the sum of all radii.
    pub fn total_mass(&self) -> f64 {
        self.radius.iter().sum()
    }

    /// One pixel wide: every point is an end, needed for connectivity, or a
    /// local radius peak.
    pub fn is_thin(&self) -> bool {
        let on = self.to_grid();
        let g = Grid { w: self.width, h: self.height, on: &on };
        let radius = |i: usize| self.radius[self.index[i] as usize];
        self.points.iter().all(|p| {
            let i = p.y as usize * self.width + p.x as usize;
            g.count(i) < 2 || !g.is_simple(i) || g.is_peak(i, radius)
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 0;
        while let Some(i) = queue.pop_front() {
            count += 1;
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        count == self.len()
    }

    fn to_grid(&self) -> Vec<bool> {
        self.index.iter().map(|&i| i != NONE).collect()
    }
}

struct Grid<'a> {
    w: usize,
    h: usize,
    on: &'a [bool],
}

impl Grid<'_> {
    fn at(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h && self.on[y as usize * self.w + x as usize]
    }

    fn ring(&self, i: usize) -> [bool; 8] {
        let (x, y) = ((i % self.w) as i64, (i / self.w) as i64);
        RING8.map(|(dx, dy)| self.at(x + dx, y + dy))
    }

    fn count(&self, i: usize) -> usize {
        self.ring(i).iter().filter(|&&b| b).count()
    }

    /// Yokoi connectivity number for 8-connected foreground; a border pixel
    /// is simple (deletable without changing topology) iff this equals 1.
    fn yokoi8(&self, i: usize) -> u8 {
        let n = self.ring(i).map(|b| !b as u8);
        let mut c = 0;
        for k in [0, 2, 4, 6] {
            c += n[k] - n[k] * n[(k + 1) % 8] * n[(k + 2) % 8];
        }
        c
    }

    fn is_simple(&self, i: usize) -> bool {
        self.yokoi8(i) == 1
    }

    /// Strictly thicker than every neighbouring skeleton pixel.
    fn is_peak(&self, i: usize, radius: impl Fn(usize) -> f64) -> bool {
        let (x, y) = ((i % self.w) as i64, (i / self.w) as i64);
        RING8.iter().all(|&(dx, dy)| {
            !self.at(x + dx, y + dy) || radius((y + dy) as usize * self.w + (x + dx) as usize) < radius(i)
        })
    }
}

/// Centres of maximal chamfer disks: no neighbour's disk swallows this one.
fn maximal_disk_centres(field: &DistanceField) -> Vec<bool> {
    let (w, h) = (field.width(), field.height());
    let mut out = vec![false; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let d = field.raw(x, y);
            if d == 0 {
                continue;
            }
            out[y as usize * w + x as usize] = RING8.iter().all(|&(dx, dy)| {
                let step = if dx != 0 && dy != 0 { DIAGONAL } else { AXIAL };
                field.raw(x + dx, y + dy) < d + step
            });
        }
    }
    out
}

/// Remove simple non-end pixels, thinnest first, until every remaining
/// pixel is an end, needed for connectivity, or thicker than all of its
/// neighbours.
fn thin_lines(w: usize, h: usize, on: &mut [bool], radius: impl Fn(usize) -> f64) {
    let mut order: Vec<usize> = (0..w * h).filter(|&i| on[i]).collect();
    order.sort_by(|&a, &b| radius(a).total_cmp(&radius(b)).then(a.cmp(&b)));
    loop {
        let mut changed = false;
        for &i in &order {
            if !on[i] {
                continue;
            }
            let g = Grid { w, h, on };
            if g.count(i) >= 2 && g.is_simple(i) && !g.is_peak(i, &radius) {
                on[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Ridge extraction followed by distance-ordered homotopic thinning.
///
/// Maximal-disk centres are anchors that survive the first, distance-ordered
/// sweep; a second sweep thins remaining two-pixel-thick runs to lines.
pub fn extract_skeleton(field: &DistanceField) -> Result<Skeleton> {
    let (w, h) = (field.width(), field.height());
    let anchors = maximal_disk_centres(field);
    let mut on: Vec<bool> = field.raw_slice().iter().map(|&d| d > 0).collect();
    let mut order: Vec<usize> = (0..w * h).filter(|&i| on[i]).collect();
    if order.is_empty() {
        return Err(Error::DegenerateSkeleton("empty distance field"));
    }
    order.sort_by_key(|&i| (field.raw_slice()[i], i));
    loop {
        let mut changed = false;
        for &i in &order {
            if on[i] && !anchors[i] && (Grid { w, h, on: &on }).is_simple(i) {
                on[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let raw = field.raw_slice();
    thin_lines(w, h, &mut on, |i| raw[i] as f64);
    Skeleton::from_grid(&on, field)
}

/// An end branch: an endpoint walked back to (but excluding) the nearest
/// junction, or to the thickest point of a junction-free path.
struct Spur {
    pixels: Vec<usize>,
    endpoint: usize,
}

fn find_spurs(w: usize, h: usize, on: &[bool], radius: &[f64]) -> Vec<Spur> {
    let g = Grid { w, h, on };
    let neighbours = |i: usize| {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        RING8.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && on[ny as usize * w + nx as usize])
                .then_some(ny as usize * w + nx as usize)
        })
    };
    let mut spurs = Vec::new();
    for e in 0..w * h {
        if !on[e] || g.count(e) != 1 {
            continue;
        }
        let mut walk = vec![e];
        let mut prev = usize::MAX;
        let mut cur = e;
        let reached_junction = loop {
            let next = neighbours(cur).find(|&n| n != prev && !walk.contains(&n));
            let Some(n) = next else { break false };
            if g.count(n) >= 3 {
                break true;
            }
            walk.push(n);
            prev = cur;
            cur = n;
            if g.count(n) == 1 {
                break false;
            }
        };
        if !reached_junction {
            let m =
                (0..walk.len()).max_by(|&a, &b| radius[walk[a]].total_cmp(&radius[walk[b]]).then(b.cmp(&a))).unwrap();
            walk.truncate(m);
        }
        if !walk.is_empty() {
            spurs.push(Spur { pixels: walk, endpoint: e });
        }
    }
    spurs
}

/// Number of skeleton disks covering every pixel, kept in sync with the
/// skeleton as points are removed.
struct Coverage {
    w: usize,
    h: usize,
    count: Vec<u32>,
}

impl Coverage {
    fn disk(w: usize, h: usize, i: usize, r: f64, mut f: impl FnMut(usize)) {
        let (cx, cy) = ((i % w) as i64, (i / w) as i64);
        let k = r.ceil() as i64;
        for y in (cy - k).max(0)..=(cy + k).min(h as i64 - 1) {
            for x in (cx - k).max(0)..=(cx + k).min(w as i64 - 1) {
                let (dx, dy) = ((x - cx) as f64, (y - cy) as f64);
                if dx * dx + dy * dy < r * r {
                    f(y as usize * w + x as usize);
                }
            }
        }
    }

    fn add(&mut self, i: usize, r: f64, delta: i32) {
        let count = &mut self.count;
        Self::disk(self.w, self.h, i, r, |j| count[j] = (count[j] as i32 + delta) as u32);
    }

    /// How far the part of the reconstruction owned only by `spur` reaches
    /// beyond the disks of the rest of the skeleton, in pixels.
    fn depth(&self, spur: &[usize], radius: &[f64], scratch: &mut [u32]) -> f64 {
        let (w, h) = (self.w, self.h);
        let mut domain = Vec::new();
        for &i in spur {
            Self::disk(w, h, i, radius[i], |j| {
                if scratch[j] == 0 {
                    domain.push(j);
                }
                scratch[j] += 1;
            });
        }
        // Multi-source chamfer propagation from the rest of the
        // reconstruction into the pixels only the spur covers.
        let mut dist = std::collections::HashMap::new();
        let mut heap = std::collections::BinaryHeap::new();
        for &j in &domain {
            if self.count[j] == scratch[j] {
                dist.insert(j, u32::MAX);
            }
        }
        let owned = |j: usize| dist_owned(&dist, j);
        let mut seeds = Vec::new();
        for &j in &domain {
            if !owned(j) {
                continue;
            }
            let (x, y) = ((j % w) as i64, (j / w) as i64);
            for (dx, dy) in RING8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let n = ny as usize * w + nx as usize;
                if self.count[n] > scratch[n] {
                    let step = if dx != 0 && dy != 0 { DIAGONAL } else { AXIAL };
                    seeds.push((step, j));
                }
            }
        }
        for (d, j) in seeds {
            if d < dist[&j] {
                dist.insert(j, d);
                heap.push(std::cmp::Reverse((d, j)));
            }
        }
        while let Some(std::cmp::Reverse((d, j))) = heap.pop() {
            if d > dist[&j] {
                continue;
            }
            let (x, y) = ((j % w) as i64, (j / w) as i64);
            for (dx, dy) in RING8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let n = ny as usize * w + nx as usize;
                let step = if dx != 0 && dy != 0 { DIAGONAL } else { AXIAL };
                if let Some(&dn) = dist.get(&n) {
                    if d + step < dn {
                        dist.insert(n, d + step);
                        heap.push(std::cmp::Reverse((d + step, n)));
                    }
                }
            }
        }
        for &j in &domain {
            scratch[j] = 0;
        }
        let deepest = dist.values().filter(|&&d| d != u32::MAX).max().copied().unwrap_or(0);
        deepest as f64 / AXIAL as f64
    }
}

fn dist_owned(dist: &std::collections::HashMap<usize, u32>, j: usize) -> bool {
    dist.contains_key(&j)
}

/// Iteratively remove the least significant end spur while its depth is
/// below `significance * r*`, or below [`MIN_SPUR_DEPTH`] pixels. A spur's depth is how far the shape region
/// reconstructed only by its disks extends beyond the disks of the rest of
/// the skeleton. The result is a fixed point, so pruning is idempotent.
pub fn prune_skeleton(skel: &Skeleton, significance: f64) -> Result<Skeleton> {
    let (w, h) = (skel.width, skel.height);
    let threshold = (significance * skel.max_radius()).max(MIN_SPUR_DEPTH);
    let mut on = skel.to_grid();
    let mut radius = vec![0.0; w * h];
    for (p, r) in skel.points.iter().zip(&skel.radius) {
        radius[p.y as usize * w + p.x as usize] = *r;
    }
    let mut cover = Coverage { w, h, count: vec![0; w * h] };
    for i in (0..w * h).filter(|&i| on[i]) {
        cover.add(i, radius[i], 1);
    }
    let mut scratch = vec![0u32; w * h];
    loop {
        let before = on.clone();
        thin_lines(w, h, &mut on, |i| radius[i]);
        for i in (0..w * h).filter(|&i| before[i] && !on[i]) {
            cover.add(i, radius[i], -1);
        }
        let worst = find_spurs(w, h, &on, &radius)
            .into_iter()
            .map(|s| (cover.depth(&s.pixels, &radius, &mut scratch), s))
            .filter(|(d, _)| *d < threshold)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.endpoint.cmp(&b.1.endpoint)));
        match worst {
            Some((_, s)) => {
                for i in s.pixels {
                    on[i] = false;
                    cover.add(i, radius[i], -1);
                }
            }
            None => break,
        }
    }
    let pts: Vec<(Pixel, f64)> =
        (0..w * h).filter(|&i| on[i]).map(|i| (Pixel::new((i % w) as u32, (i / w) as u32), radius[i])).collect();
    if pts.is_empty() {
        return Err(Error::DegenerateSkeleton("pruning removed every point"));
    }
    Skeleton::from_points(w, h, pts)
}
