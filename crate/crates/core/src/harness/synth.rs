//! Procedural articulated silhouettes laid out like the two standard
//! retrieval sets: 14 classes of 4 and 9 classes of 11.
//!
//! Every class is a template of ellipses and tapered capsules. Instances
//! perturb joint angles, part lengths and widths, then apply a random
//! rotation and scale before rasterizing.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::BinaryShape;

use super::dataset::{Dataset, Sample};

pub const TARI_CLASSES: [&str; 14] = [
    "hand", "man", "horse", "cattle", "cat", "dog", "bird", "fish", "airplane", "star", "octopus", "beetle", "lizard",
    "tree",
];

pub const KIMIA_CLASSES: [&str; 9] =
    ["rabbit", "quadruped", "man", "airplane", "fish", "hand", "ray", "tool", "greeble"];

/// Quadruped kinds in the 11-shape quadruped class, in instance order.
pub const KIMIA_QUADRUPEDS: [&str; 11] =
    ["cattle", "cattle", "cattle", "sheep", "sheep", "cat", "cat", "fox", "fox", "dog", "dog"];

#[derive(Clone, Copy, Debug)]
enum Prim {
    Ellipse { c: [f64; 2], rx: f64, ry: f64, angle: f64 },
    Capsule { a: [f64; 2], b: [f64; 2], ra: f64, rb: f64 },
}

impl Prim {
    fn contains(&self, [x, y]: [f64; 2]) -> bool {
        match *self {
            Prim::Ellipse { c, rx, ry, angle } => {
                let (s, co) = angle.to_radians().sin_cos();
                let (dx, dy) = (x - c[0], y - c[1]);
                let u = co * dx + s * dy;
                let v = -s * dx + co * dy;
                (u / rx).powi(2) + (v / ry).powi(2) <= 1.0
            }
            Prim::Capsule { a, b, ra, rb } => {
                let (vx, vy) = (b[0] - a[0], b[1] - a[1]);
                let len2 = vx * vx + vy * vy;
                let t = if len2 == 0.0 { 0.0 } else { (((x - a[0]) * vx + (y - a[1]) * vy) / len2).clamp(0.0, 1.0) };
                let (px, py) = (a[0] + t * vx, a[1] + t * vy);
                (x - px).hypot(y - py) <= ra + t * (rb - ra)
            }
        }
    }

    fn extent(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Prim::Ellipse { c, rx, ry, .. } => {
                let r = rx.max(ry);
                ([c[0] - r, c[1] - r], [c[0] + r, c[1] + r])
            }
            Prim::Capsule { a, b, ra, rb } => {
                let r = ra.max(rb);
                ([a[0].min(b[0]) - r, a[1].min(b[1]) - r], [a[0].max(b[0]) + r, a[1].max(b[1]) + r])
            }
        }
    }
}

/// Model-space drawing with y pointing down and angles in degrees from +x.
struct Figure<'a> {
    prims: Vec<Prim>,
    rng: RefCell<&'a mut ChaCha8Rng>,
}

impl<'a> Figure<'a> {
    fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Figure { prims: Vec::new(), rng: RefCell::new(rng) }
    }

    /// Uniform perturbation in `[-s, s]`.
    fn j(&self, s: f64) -> f64 {
        if s == 0.0 {
            0.0
        } else {
            self.rng.borrow_mut().random_range(-s..=s)
        }
    }

    /// Multiplicative perturbation by up to `s` relative.
    fn k(&self, v: f64, s: f64) -> f64 {
        v * (1.0 + self.j(s))
    }

    fn ellipse(&mut self, c: [f64; 2], rx: f64, ry: f64, angle: f64) {
        self.prims.push(Prim::Ellipse { c, rx, ry, angle });
    }

    fn circle(&mut self, c: [f64; 2], r: f64) {
        self.ellipse(c, r, r, 0.0);
    }

    /// Chain of tapered segments; each entry is `(angle, length, end radius)`.
    /// Returns the tip.
    fn limb(&mut self, start: [f64; 2], r0: f64, segs: &[(f64, f64, f64)]) -> [f64; 2] {
        let (mut p, mut r) = (start, r0);
        for &(angle, len, r1) in segs {
            let (s, c) = angle.to_radians().sin_cos();
            let q = [p[0] + len * c, p[1] + len * s];
            self.prims.push(Prim::Capsule { a: p, b: q, ra: r, rb: r1 });
            p = q;
            r = r1;
        }
        p
    }

    /// Single jittered segment: angle jitter `da` degrees, length jitter 10%.
    fn spike(&mut self, start: [f64; 2], angle: f64, da: f64, len: f64, r0: f64, r1: f64) -> [f64; 2] {
        let a = angle + self.j(da);
        let l = self.k(len, 0.1);
        self.limb(start, r0, &[(a, l, r1)])
    }

    /// Two-segment jointed limb.
    #[allow(clippy::too_many_arguments)]
    fn jointed(
        &mut self,
        start: [f64; 2],
        angle: f64,
        da: f64,
        bend: f64,
        db: f64,
        lens: [f64; 2],
        radii: [f64; 3],
    ) -> [f64; 2] {
        let a1 = angle + self.j(da);
        let a2 = a1 + bend + self.j(db);
        let (l1, l2) = (self.k(lens[0], 0.1), self.k(lens[1], 0.1));
        self.limb(start, radii[0], &[(a1, l1, radii[1]), (a2, l2, radii[2])])
    }
}

fn hand(f: &mut Figure, thick: f64) {
    let pw = f.k(22.0, 0.08);
    let ph = f.k(26.0, 0.08);
    f.ellipse([0.0, 0.0], pw, ph, 0.0);
    let spread = f.j(6.0);
    for (i, (x, len)) in [(-15.0, 36.0), (-5.0, 43.0), (5.0, 41.0), (15.0, 33.0)].into_iter().enumerate() {
        let a = -90.0 + (i as f64 - 1.5) * (9.0 + spread);
        f.jointed([x, -ph + 6.0], a, 6.0, 0.0, 12.0, [len * 0.55, len * 0.45], [6.0 * thick, 5.5 * thick, 4.5 * thick]);
    }
    f.jointed([-pw + 4.0, 6.0], -150.0, 12.0, 20.0, 15.0, [18.0, 16.0], [7.5 * thick, 6.5 * thick, 5.5 * thick]);
}

fn man(f: &mut Figure, arms_down: bool) {
    let th = f.k(30.0, 0.08);
    f.ellipse([0.0, 0.0], f.k(14.0, 0.08), th, 0.0);
    f.limb([0.0, -th + 4.0], 6.0, &[(-90.0, 8.0, 6.0)]);
    let hr = f.k(10.5, 0.08);
    f.circle([f.j(2.0), -th - 12.0], hr);
    for side in [-1.0, 1.0] {
        let (base, db) = if arms_down { (90.0 - side * 15.0, 25.0) } else { (90.0 - side * 60.0, 50.0) };
        f.jointed([side * 11.0, -th + 9.0], base, 25.0, side * -10.0, db, [25.0, 23.0], [5.5, 4.5, 4.0]);
        f.jointed([side * 7.0, th - 6.0], 90.0 - side * 12.0, 14.0, side * 8.0, 22.0, [32.0, 30.0], [7.0, 6.0, 5.0]);
    }
}

#[derive(Clone, Copy)]
struct Quad {
    body: [f64; 2],
    leg: [f64; 2],
    leg_r: f64,
    neck_angle: f64,
    neck_len: f64,
    head: [f64; 2],
    tail_angle: f64,
    tail_len: f64,
    tail_bend: f64,
}

/// Side-view four-legged body; returns the head centre.
fn quadruped(f: &mut Figure, q: Quad) -> [f64; 2] {
    let (bw, bh) = (f.k(q.body[0], 0.06), f.k(q.body[1], 0.08));
    f.ellipse([0.0, 0.0], bw, bh, f.j(4.0));
    for (x, spread) in [(0.72, -1.0), (0.55, 1.0), (-0.62, -1.0), (-0.78, 1.0)] {
        let a = 90.0 + spread * 6.0;
        f.jointed([x * bw, bh * 0.5], a, 12.0, 0.0, 18.0, q.leg, [q.leg_r, q.leg_r * 0.85, q.leg_r * 0.7]);
    }
    let neck_base = [bw * 0.75, -bh * 0.45];
    let na = q.neck_angle + f.j(10.0);
    let nl = f.k(q.neck_len, 0.1);
    let nr = bh * 0.55;
    let top = f.limb(neck_base, nr, &[(na, nl, nr * 0.75)]);
    let ha = f.j(15.0);
    let head = [top[0] + 4.0, top[1]];
    f.ellipse(head, f.k(q.head[0], 0.08), f.k(q.head[1], 0.08), 25.0 + ha);
    let tail_base = [-bw * 0.92, -bh * 0.3];
    f.jointed(tail_base, q.tail_angle, 15.0, q.tail_bend, 20.0, [q.tail_len * 0.5, q.tail_len * 0.5], [4.0, 3.5, 3.0]);
    head
}

fn horse(f: &mut Figure) {
    let q = Quad {
        body: [42.0, 17.0],
        leg: [30.0, 26.0],
        leg_r: 6.0,
        neck_angle: -55.0,
        neck_len: 34.0,
        head: [14.0, 7.0],
        tail_angle: 150.0,
        tail_len: 34.0,
        tail_bend: 25.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] - 4.0, h[1] - 5.0], -100.0, 10.0, 10.0, 3.5, 2.5);
}

fn cattle(f: &mut Figure, kimia: bool) {
    let q = Quad {
        body: [40.0, 21.0],
        leg: [20.0, 17.0],
        leg_r: 7.5,
        neck_angle: -20.0,
        neck_len: 16.0,
        head: [13.0, 9.0],
        tail_angle: 100.0,
        tail_len: 32.0,
        tail_bend: -5.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] - 3.0, h[1] - 6.0], -110.0, 10.0, 13.0, 3.5, 2.5);
    if !kimia {
        f.spike([h[0] + 3.0, h[1] - 6.0], -65.0, 10.0, 12.0, 3.5, 2.5);
    }
}

fn sheep(f: &mut Figure) {
    let q = Quad {
        body: [36.0, 22.0],
        leg: [18.0, 15.0],
        leg_r: 6.0,
        neck_angle: -30.0,
        neck_len: 14.0,
        head: [12.0, 8.0],
        tail_angle: 120.0,
        tail_len: 18.0,
        tail_bend: 0.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] - 4.0, h[1] - 3.0], 200.0, 12.0, 11.0, 4.0, 3.0);
}

fn cat(f: &mut Figure) {
    let q = Quad {
        body: [34.0, 13.0],
        leg: [20.0, 16.0],
        leg_r: 5.5,
        neck_angle: -40.0,
        neck_len: 12.0,
        head: [10.0, 9.0],
        tail_angle: -140.0,
        tail_len: 44.0,
        tail_bend: 35.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] - 5.0, h[1] - 6.0], -105.0, 8.0, 9.0, 4.0, 1.8);
    f.spike([h[0] + 4.0, h[1] - 7.0], -70.0, 8.0, 9.0, 4.0, 1.8);
}

fn dog(f: &mut Figure) {
    let q = Quad {
        body: [36.0, 15.0],
        leg: [24.0, 19.0],
        leg_r: 6.0,
        neck_angle: -45.0,
        neck_len: 16.0,
        head: [11.0, 10.0],
        tail_angle: -145.0,
        tail_len: 26.0,
        tail_bend: -10.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] + 6.0, h[1] + 2.0], 10.0, 8.0, 14.0, 6.0, 4.5);
    f.spike([h[0] - 6.0, h[1] - 2.0], 120.0, 12.0, 14.0, 4.5, 3.5);
}

fn fox(f: &mut Figure) {
    let q = Quad {
        body: [36.0, 13.0],
        leg: [20.0, 16.0],
        leg_r: 5.0,
        neck_angle: -35.0,
        neck_len: 14.0,
        head: [12.0, 8.0],
        tail_angle: 165.0,
        tail_len: 38.0,
        tail_bend: 15.0,
    };
    let h = quadruped(f, q);
    f.spike([h[0] + 7.0, h[1] + 2.0], 15.0, 8.0, 12.0, 4.5, 2.0);
    f.spike([h[0] - 3.0, h[1] - 7.0], -95.0, 8.0, 10.0, 4.0, 1.8);
}

fn bird(f: &mut Figure) {
    f.ellipse([0.0, 0.0], f.k(24.0, 0.08), f.k(13.0, 0.08), f.j(6.0));
    let head = [f.k(27.0, 0.05), -10.0 + f.j(3.0)];
    f.circle(head, f.k(9.0, 0.08));
    f.spike([head[0] + 6.0, head[1]], 0.0, 12.0, 13.0, 3.5, 1.5);
    let flap = f.j(20.0);
    f.jointed([-2.0, -8.0], -125.0 + flap, 10.0, 20.0, 15.0, [28.0, 28.0], [9.0, 7.0, 3.5]);
    f.jointed([4.0, -8.0], -55.0 + flap, 10.0, -20.0, 15.0, [28.0, 28.0], [9.0, 7.0, 3.5]);
    f.spike([-21.0, 2.0], 165.0, 8.0, 24.0, 6.0, 3.5);
    f.spike([-21.0, 5.0], 195.0, 8.0, 24.0, 6.0, 3.5);
}

fn fish(f: &mut Figure, kimia: bool) {
    let (bw, bh) = (f.k(40.0, 0.06), f.k(if kimia { 20.0 } else { 15.0 }, 0.1));
    f.ellipse([0.0, 0.0], bw, bh, 0.0);
    let flex = f.j(12.0);
    f.spike([-bw + 4.0, 0.0], 145.0 + flex, 8.0, 24.0, 7.0, 3.0);
    f.spike([-bw + 4.0, 0.0], 215.0 + flex, 8.0, 24.0, 7.0, 3.0);
    f.spike([-2.0, -bh + 3.0], -115.0, 10.0, 16.0, 6.0, 2.0);
    f.spike([10.0, bh - 4.0], 120.0, 10.0, 13.0, 4.5, 2.0);
    if kimia {
        f.spike([-10.0, bh - 3.0], 100.0, 10.0, 12.0, 5.0, 2.0);
    }
}

fn airplane(f: &mut Figure, kimia: bool) {
    let half = f.k(52.0, 0.06);
    f.limb([-half, 0.0], 5.5, &[(0.0, 2.0 * half, 7.0)]);
    f.circle([half, 0.0], 7.0);
    let sweep = f.j(8.0) + if kimia { 12.0 } else { 4.0 };
    let span = f.k(if kimia { 48.0 } else { 58.0 }, 0.08);
    for side in [-1.0, 1.0] {
        f.spike([6.0, 0.0], side * (90.0 + sweep), 4.0, span, 9.0, 3.0);
        f.spike([-half + 8.0, 0.0], side * (115.0 + sweep), 6.0, 20.0, 5.5, 2.5);
    }
}

fn star(f: &mut Figure) {
    f.circle([0.0, 0.0], f.k(15.0, 0.08));
    let rot = f.j(36.0);
    for k in 0..5 {
        let a = rot + k as f64 * 72.0;
        f.spike([0.0, 0.0], a, 7.0, 48.0, 11.0, 1.8);
    }
}

fn octopus(f: &mut Figure) {
    f.ellipse([0.0, -22.0], f.k(21.0, 0.08), f.k(26.0, 0.08), 0.0);
    for k in 0..8 {
        let t = k as f64 / 7.0;
        let x = -16.0 + 32.0 * t;
        let a = 150.0 - 120.0 * t;
        let wave = if k % 2 == 0 { 25.0 } else { -25.0 };
        let a1 = a + f.j(10.0);
        let a2 = a1 + wave + f.j(15.0);
        let a3 = a2 - wave + f.j(15.0);
        let l = f.k(20.0, 0.1);
        f.limb([x, -2.0], 5.5, &[(a1, l, 4.5), (a2, l, 3.5), (a3, l * 0.8, 2.5)]);
    }
}

fn beetle(f: &mut Figure) {
    let (bw, bh) = (f.k(16.0, 0.06), f.k(27.0, 0.06));
    f.ellipse([0.0, 0.0], bw, bh, 0.0);
    let head = [0.0, -bh - 6.0];
    f.circle(head, f.k(9.0, 0.08));
    for side in [-1.0, 1.0] {
        for (y, a, bend) in [(-12.0, -30.0, -30.0), (0.0, 0.0, 25.0), (12.0, 30.0, 30.0)] {
            let base = if side > 0.0 { a } else { 180.0 - a };
            f.jointed([side * (bw - 3.0), y], base, 10.0, side * bend, 12.0, [16.0, 16.0], [3.5, 3.0, 2.5]);
        }
        let aa = if side > 0.0 { -60.0 } else { -120.0 };
        f.jointed([side * 4.0, head[1] - 5.0], aa, 10.0, -side * 20.0, 12.0, [11.0, 11.0], [2.8, 2.4, 2.0]);
    }
}

fn lizard(f: &mut Figure) {
    let curl = f.j(18.0);
    f.ellipse([0.0, 0.0], f.k(30.0, 0.06), f.k(9.0, 0.08), curl * 0.3);
    f.ellipse([37.0, curl * 0.2], f.k(11.0, 0.08), f.k(7.0, 0.08), curl * 0.5);
    f.jointed([-26.0, 0.0], 180.0 - curl, 10.0, -curl, 20.0, [26.0, 26.0], [7.0, 4.5, 2.2]);
    for (x, side) in [(17.0, -1.0), (17.0, 1.0), (-17.0, -1.0), (-17.0, 1.0)] {
        let a = 90.0 * side + if x > 0.0 { -side * 25.0 } else { side * 25.0 };
        let bend = if x > 0.0 { -side * 50.0 } else { side * 50.0 };
        f.jointed([x, side * 5.0], a, 12.0, bend, 20.0, [12.0, 11.0], [4.0, 3.5, 2.8]);
    }
}

fn tree(f: &mut Figure) {
    let lean = f.j(6.0);
    let top = f.limb([0.0, 55.0], 10.0, &[(-90.0 + lean, f.k(55.0, 0.08), 7.5)]);
    for (a, len) in [(-90.0, 34.0), (-140.0, 38.0), (-40.0, 38.0)] {
        let tip = f.spike(top, a + lean, 10.0, len, 6.0, 4.0);
        f.circle(tip, f.k(10.0, 0.12));
    }
    f.spike([0.0, 50.0], 150.0, 10.0, 18.0, 6.5, 3.0);
    f.spike([0.0, 50.0], 30.0, 10.0, 18.0, 6.5, 3.0);
}

fn rabbit(f: &mut Figure) {
    f.ellipse([0.0, 0.0], f.k(26.0, 0.06), f.k(19.0, 0.08), f.j(8.0));
    let head = [24.0 + f.j(2.0), -20.0 + f.j(3.0)];
    f.ellipse(head, f.k(11.0, 0.08), f.k(9.0, 0.08), 10.0);
    f.spike([head[0] - 4.0, head[1] - 6.0], -105.0, 10.0, 30.0, 5.0, 3.5);
    f.spike([head[0] + 2.0, head[1] - 6.0], -80.0, 10.0, 28.0, 5.0, 3.5);
    f.jointed([-12.0, 12.0], 60.0, 10.0, 60.0, 15.0, [14.0, 18.0], [9.0, 6.0, 5.0]);
    f.spike([16.0, 14.0], 95.0, 10.0, 14.0, 5.0, 4.0);
    f.circle([-26.0, -6.0], f.k(6.0, 0.1));
}

fn ray(f: &mut Figure) {
    let w = f.k(40.0, 0.08);
    f.ellipse([0.0, 0.0], w, f.k(24.0, 0.08), 0.0);
    f.spike([-w * 0.5, 0.0], 200.0, 8.0, 22.0, 10.0, 3.0);
    f.spike([w * 0.5, 0.0], -20.0, 8.0, 22.0, 10.0, 3.0);
    f.jointed([0.0, 20.0], 90.0, 8.0, 0.0, 25.0, [28.0, 30.0], [4.0, 3.0, 2.2]);
}

fn tool(f: &mut Figure) {
    let len = f.k(60.0, 0.08);
    let tip = f.limb([0.0, 0.0], 6.0, &[(0.0, len, 7.5)]);
    let open = f.j(8.0);
    f.spike(tip, -40.0 - open, 6.0, 18.0, 7.0, 5.0);
    f.spike(tip, 40.0 + open, 6.0, 18.0, 7.0, 5.0);
    f.circle([0.0, 0.0], f.k(7.5, 0.1));
}

fn greeble(f: &mut Figure) {
    f.ellipse([0.0, 0.0], f.k(18.0, 0.06), f.k(30.0, 0.06), 0.0);
    f.circle([0.0, -33.0], f.k(12.0, 0.08));
    f.spike([0.0, -40.0], -90.0, 12.0, 14.0, 5.0, 4.0);
    f.spike([-14.0, 16.0], 120.0, 10.0, 18.0, 7.0, 6.0);
    f.spike([14.0, 16.0], 60.0, 10.0, 18.0, 7.0, 6.0);
}

/// Rasterizes `prims` rotated by `angle` degrees and scaled to
/// `px_per_unit`, with a blank margin.
fn rasterize(prims: &[Prim], angle: f64, px_per_unit: f64, id: &str) -> BinaryShape {
    let (s, c) = angle.to_radians().sin_cos();
    let fwd = |[x, y]: [f64; 2]| [px_per_unit * (c * x - s * y), px_per_unit * (s * x + c * y)];
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in prims {
        let (a, b) = p.extent();
        for q in [[a[0], a[1]], [a[0], b[1]], [b[0], a[1]], [b[0], b[1]]] {
            let t = fwd(q);
            for k in 0..2 {
                lo[k] = lo[k].min(t[k]);
                hi[k] = hi[k].max(t[k]);
            }
        }
    }
    let margin = 4.0;
    let w = (hi[0] - lo[0] + 2.0 * margin).ceil() as usize;
    let h = (hi[1] - lo[1] + 2.0 * margin).ceil() as usize;
    let inv = |px: f64, py: f64| {
        let (u, v) = ((px + lo[0] - margin) / px_per_unit, (py + lo[1] - margin) / px_per_unit);
        [c * u + s * v, -s * u + c * v]
    };
    BinaryShape::from_fn(w, h, id, |x, y| {
        let p = inv(x as f64 + 0.5, y as f64 + 0.5);
        prims.iter().any(|q| q.contains(p))
    })
    .expect("synthetic figure is nonempty")
}

/// How strongly instances vary.
#[derive(Clone, Copy, Debug)]
pub struct SynthStyle {
    /// Pixels per model unit before the scale jitter.
    pub px_per_unit: f64,
    /// Relative scale jitter.
    pub scale_jitter: f64,
    /// Maximal absolute rotation in degrees.
    pub max_rotation: f64,
}

impl SynthStyle {
    pub fn tari() -> Self {
        SynthStyle { px_per_unit: 1.2, scale_jitter: 0.15, max_rotation: 30.0 }
    }

    pub fn kimia() -> Self {
        SynthStyle { px_per_unit: 0.9, scale_jitter: 0.15, max_rotation: 25.0 }
    }
}

fn draw(label: &str, kind: &str, rng: &mut ChaCha8Rng, kimia: bool) -> Vec<Prim> {
    let mut f = Figure::new(rng);
    match (label, kind) {
        ("hand", _) => hand(&mut f, if kimia { 1.2 } else { 1.0 }),
        ("man", _) => man(&mut f, kimia),
        ("horse", _) => horse(&mut f),
        ("cattle", _) | ("quadruped", "cattle") => cattle(&mut f, kimia),
        ("quadruped", "sheep") => sheep(&mut f),
        ("cat", _) | ("quadruped", "cat") => cat(&mut f),
        ("dog", _) | ("quadruped", "dog") => dog(&mut f),
        ("quadruped", "fox") => fox(&mut f),
        ("bird", _) => bird(&mut f),
        ("fish", _) => fish(&mut f, kimia),
        ("airplane", _) => airplane(&mut f, kimia),
        ("star", _) => star(&mut f),
        ("octopus", _) => octopus(&mut f),
        ("beetle", _) => beetle(&mut f),
        ("lizard", _) => lizard(&mut f),
        ("tree", _) => tree(&mut f),
        ("rabbit", _) => rabbit(&mut f),
        ("ray", _) => ray(&mut f),
        ("tool", _) => tool(&mut f),
        ("greeble", _) => greeble(&mut f),
        _ => panic!("no template for {label}/{kind}"),
    }
    f.prims
}

/// One silhouette of `label` (with quadruped `kind` where relevant).
pub fn render(label: &str, kind: &str, style: SynthStyle, kimia: bool, rng: &mut ChaCha8Rng, id: &str) -> BinaryShape {
    let prims = draw(label, kind, rng, kimia);
    let angle = rng.random_range(-style.max_rotation..=style.max_rotation);
    let scale = style.px_per_unit * (1.0 + rng.random_range(-style.scale_jitter..=style.scale_jitter));
    rasterize(&prims, angle, scale, id)
}

/// 14 classes of 4 articulated shapes.
pub fn tari_like(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for label in TARI_CLASSES {
        for k in 1..=4 {
            let id = format!("{label}-{k:02}");
            let shape = render(label, "", SynthStyle::tari(), false, &mut rng, &id);
            samples.push(Sample { id, label: label.to_string(), shape });
        }
    }
    Dataset { name: "tari-like".into(), samples, errors: Vec::new() }
}

/// 9 classes of 11 shapes; quadruped ids carry their kind, e.g.
/// `quadruped/sheep-04`.
pub fn kimia_like(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for label in KIMIA_CLASSES {
        for k in 0..11 {
            let kind = if label == "quadruped" { KIMIA_QUADRUPEDS[k] } else { "" };
            let id = if kind.is_empty() {
                format!("{label}/{label}-{:02}", k + 1)
            } else {
                format!("{label}/{kind}-{:02}", k + 1)
            };
            let shape = render(label, kind, SynthStyle::kimia(), true, &mut rng, &id);
            samples.push(Sample { id, label: label.to_string(), shape });
        }
    }
    Dataset { name: "kimia-like".into(), samples, errors: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_have_expected_sizes() {
        let t = tari_like(1);
        assert_eq!(t.samples.len(), 56);
        assert_eq!(t.labels().len(), 14);
        let k = kimia_like(1);
        assert_eq!(k.samples.len(), 99);
        assert_eq!(k.labels().len(), 9);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = tari_like(9);
        let b = tari_like(9);
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.shape.mask(), y.shape.mask());
        }
    }

    #[test]
    fn capsule_contains_its_axis() {
        let c = Prim::Capsule { a: [0.0, 0.0], b: [10.0, 0.0], ra: 3.0, rb: 1.0 };
        assert!(c.contains([5.0, 0.0]));
        assert!(c.contains([0.0, 2.9]));
        assert!(!c.contains([10.0, 1.5]));
        assert!(!c.contains([-4.0, 0.0]));
    }
}
