//! Analytic ray/primitive intersection.
//!
//! World coordinates are right-handed: x to the viewer's right, y into the
//! scene, z up. All distances are meters. Intersection routines return the
//! nearest hit with `t` in `(t_min, t_max)` and an outward unit normal.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn from_array(a: [f64; 3]) -> Vec3 {
        vec3(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    /// Rotation about the z axis by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        vec3(self.x * c - self.y * s, self.x * s + self.y * c, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        vec3(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

/// A ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Ray {
        debug_assert!((dir.length() - 1.0).abs() < 1e-9, "ray direction must be unit");
        Ray { origin, dir }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Geometric intersection result, before material/instance attribution.
#[derive(Debug, Clone, Copy)]
pub struct RawHit {
    pub t: f64,
    pub normal: Vec3,
}

/// The analytic primitives the renderer knows how to intersect.
#[derive(Debug, Clone, Copy)]
pub enum Shape3d {
    Sphere { center: Vec3, radius: f64 },
    /// Box with half extents, optionally yawed about the world z axis.
    Cuboid { center: Vec3, half: Vec3, yaw: f64 },
    /// Finite cone: base disc of `radius` at `base`, apex `height` above it.
    Cone { base: Vec3, radius: f64, height: f64 },
    /// Finite cylinder with caps, axis along world z.
    Cylinder { base: Vec3, radius: f64, height: f64 },
}

impl Shape3d {
    /// Nearest intersection with `t` in `(t_min, t_max)`, if any.
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<RawHit> {
        match *self {
            Shape3d::Sphere { center, radius } => sphere_hit(ray, center, radius, t_min, t_max),
            Shape3d::Cuboid { center, half, yaw } => cuboid_hit(ray, center, half, yaw, t_min, t_max),
            Shape3d::Cone { base, radius, height } => cone_hit(ray, base, radius, height, t_min, t_max),
            Shape3d::Cylinder { base, radius, height } => {
                cylinder_hit(ray, base, radius, height, t_min, t_max)
            }
        }
    }
}

fn sphere_hit(ray: &Ray, center: Vec3, radius: f64, t_min: f64, t_max: f64) -> Option<RawHit> {
    let oc = ray.origin - center;
    let half_b = oc.dot(ray.dir);
    let c = oc.dot(oc) - radius * radius;
    let disc = half_b * half_b - c;
    if disc < 0.0 {
        return None;
    }
    let sqrt_d = disc.sqrt();
    for t in [-half_b - sqrt_d, -half_b + sqrt_d] {
        if t > t_min && t < t_max {
            let normal = (ray.at(t) - center) / radius;
            return Some(RawHit { t, normal });
        }
    }
    None
}

fn cuboid_hit(ray: &Ray, center: Vec3, half: Vec3, yaw: f64, t_min: f64, t_max: f64) -> Option<RawHit> {
    // Work in the box frame: translate to the center, undo the yaw.
    let origin = (ray.origin - center).rotate_z(-yaw);
    let dir = ray.dir.rotate_z(-yaw);

    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    let mut enter_axis = 0usize;
    let mut exit_axis = 0usize;
    let o = origin.to_array();
    let d = dir.to_array();
    let h = half.to_array();
    for axis in 0..3 {
        if d[axis].abs() < EPS {
            if o[axis].abs() > h[axis] {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d[axis];
        let mut t0 = (-h[axis] - o[axis]) * inv;
        let mut t1 = (h[axis] - o[axis]) * inv;
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_enter {
            t_enter = t0;
            enter_axis = axis;
        }
        if t1 < t_exit {
            t_exit = t1;
            exit_axis = axis;
        }
        if t_enter > t_exit {
            return None;
        }
    }

    let (t, axis) = if t_enter > t_min {
        (t_enter, enter_axis)
    } else if t_exit > t_min {
        (t_exit, exit_axis)
    } else {
        return None;
    };
    if t >= t_max {
        return None;
    }
    let p = origin + dir * t;
    let mut n = [0.0; 3];
    n[axis] = if p.to_array()[axis] > 0.0 { 1.0 } else { -1.0 };
    let normal = Vec3::from_array(n).rotate_z(yaw);
    Some(RawHit { t, normal })
}

fn cone_hit(ray: &Ray, base: Vec3, radius: f64, height: f64, t_min: f64, t_max: f64) -> Option<RawHit> {
    let o = ray.origin - base;
    let d = ray.dir;
    let k = radius / height;
    let k2 = k * k;

    let mut best: Option<RawHit> = None;
    let mut consider = |cand: Option<RawHit>| {
        if let Some(hit) = cand {
            if best.map_or(true, |b| hit.t < b.t) {
                best = Some(hit);
            }
        }
    };

    // Lateral surface: x^2 + y^2 = k^2 (height - z)^2 for z in [0, height].
    let a = d.x * d.x + d.y * d.y - k2 * d.z * d.z;
    let half_b = o.x * d.x + o.y * d.y + k2 * d.z * (height - o.z);
    let c = o.x * o.x + o.y * o.y - k2 * (height - o.z) * (height - o.z);
    let lateral = |t: f64| -> Option<RawHit> {
        if t <= t_min || t >= t_max {
            return None;
        }
        let p = o + d * t;
        if p.z < 0.0 || p.z > height {
            return None;
        }
        let normal = vec3(p.x, p.y, k2 * (height - p.z)).normalized();
        Some(RawHit { t, normal })
    };
    if a.abs() > EPS {
        let disc = half_b * half_b - a * c;
        if disc >= 0.0 {
            let sqrt_d = disc.sqrt();
            consider(lateral((-half_b - sqrt_d) / a));
            consider(lateral((-half_b + sqrt_d) / a));
        }
    } else if half_b.abs() > EPS {
        consider(lateral(-c / (2.0 * half_b)));
    }

    // Base disc at z = 0.
    if d.z.abs() > EPS {
        let t = -o.z / d.z;
        if t > t_min && t < t_max {
            let p = o + d * t;
            if p.x * p.x + p.y * p.y <= radius * radius {
                consider(Some(RawHit { t, normal: vec3(0.0, 0.0, -1.0) }));
            }
        }
    }

    best
}

fn cylinder_hit(ray: &Ray, base: Vec3, radius: f64, height: f64, t_min: f64, t_max: f64) -> Option<RawHit> {
    let o = ray.origin - base;
    let d = ray.dir;

    let mut best: Option<RawHit> = None;
    let mut consider = |cand: Option<RawHit>| {
        if let Some(hit) = cand {
            if best.map_or(true, |b| hit.t < b.t) {
                best = Some(hit);
            }
        }
    };

    // Lateral surface.
    let a = d.x * d.x + d.y * d.y;
    if a > EPS {
        let half_b = o.x * d.x + o.y * d.y;
        let c = o.x * o.x + o.y * o.y - radius * radius;
        let disc = half_b * half_b - a * c;
        if disc >= 0.0 {
            let sqrt_d = disc.sqrt();
            for t in [(-half_b - sqrt_d) / a, (-half_b + sqrt_d) / a] {
                if t > t_min && t < t_max {
                    let p = o + d * t;
                    if p.z >= 0.0 && p.z <= height {
                        let normal = vec3(p.x / radius, p.y / radius, 0.0);
                        consider(Some(RawHit { t, normal }));
                    }
                }
            }
        }
    }

    // Caps.
    if d.z.abs() > EPS {
        for (plane_z, nz) in [(0.0, -1.0), (height, 1.0)] {
            let t = (plane_z - o.z) / d.z;
            if t > t_min && t < t_max {
                let p = o + d * t;
                if p.x * p.x + p.y * p.y <= radius * radius {
                    consider(Some(RawHit { t, normal: vec3(0.0, 0.0, nz) }));
                }
            }
        }
    }

    best
}

/// Which inner face of the room shell a ray hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomFace {
    Floor,
    Ceiling,
    Wall,
}

/// The room as seen from inside: an axis-aligned shell returning the nearest
/// boundary crossing with an inward-facing normal.
#[derive(Debug, Clone, Copy)]
pub struct RoomShell {
    pub min: Vec3,
    pub max: Vec3,
}

impl RoomShell {
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<(RawHit, RoomFace)> {
        let o = ray.origin.to_array();
        let d = ray.dir.to_array();
        let lo = self.min.to_array();
        let hi = self.max.to_array();
        let mut best_t = f64::INFINITY;
        let mut best_axis = 0usize;
        let mut best_sign = 1.0f64;
        for axis in 0..3 {
            if d[axis].abs() < EPS {
                continue;
            }
            // The face the ray is moving toward along this axis.
            let (bound, sign) = if d[axis] > 0.0 { (hi[axis], 1.0) } else { (lo[axis], -1.0) };
            let t = (bound - o[axis]) / d[axis];
            if t > t_min && t < best_t {
                best_t = t;
                best_axis = axis;
                best_sign = sign;
            }
        }
        if !best_t.is_finite() || best_t >= t_max {
            return None;
        }
        let mut n = [0.0; 3];
        n[best_axis] = -best_sign; // inward
        let face = match (best_axis, best_sign > 0.0) {
            (2, false) => RoomFace::Floor,
            (2, true) => RoomFace::Ceiling,
            _ => RoomFace::Wall,
        };
        Some((RawHit { t: best_t, normal: Vec3::from_array(n) }, face))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn sphere_head_on() {
        let shape = Shape3d::Sphere { center: vec3(0.0, 0.0, -5.0), radius: 1.0 };
        let ray = Ray::new(Vec3::ZERO, vec3(0.0, 0.0, -1.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 4.0, 1e-6);
        assert_close(hit.normal.z, 1.0, 1e-9);
    }

    #[test]
    fn cuboid_face_hit() {
        let shape = Shape3d::Cuboid {
            center: Vec3::ZERO,
            half: vec3(1.0, 1.0, 1.0),
            yaw: 0.0,
        };
        let ray = Ray::new(vec3(5.0, 0.0, 0.0), vec3(-1.0, 0.0, 0.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 4.0, 1e-6);
        assert_close(hit.normal.x, 1.0, 1e-9);
        assert_close(hit.normal.y, 0.0, 1e-9);
        assert_close(hit.normal.z, 0.0, 1e-9);
    }

    #[test]
    fn yawed_cuboid_matches_rotated_frame() {
        // Rotating the box by 45 degrees puts a corner toward +x, so the first
        // hit along -x is the corner edge at distance half*sqrt(2) from center.
        let shape = Shape3d::Cuboid {
            center: Vec3::ZERO,
            half: vec3(0.5, 0.5, 0.5),
            yaw: std::f64::consts::FRAC_PI_4,
        };
        let ray = Ray::new(vec3(5.0, 0.0, 0.0), vec3(-1.0, 0.0, 0.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 5.0 - 0.5 * std::f64::consts::SQRT_2, 1e-9);
    }

    #[test]
    fn cone_side_hit() {
        // Cone radius 1, height 2: at z = 1 the lateral radius is 0.5, so a
        // horizontal ray from x = 5 at that height hits at t = 4.5.
        let shape = Shape3d::Cone { base: Vec3::ZERO, radius: 1.0, height: 2.0 };
        let ray = Ray::new(vec3(5.0, 0.0, 1.0), vec3(-1.0, 0.0, 0.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 4.5, 1e-6);
        // Outward normal (0.5, 0, 0.25) normalized.
        let expect = vec3(0.5, 0.0, 0.25).normalized();
        assert_close(hit.normal.x, expect.x, 1e-9);
        assert_close(hit.normal.z, expect.z, 1e-9);
    }

    #[test]
    fn cone_base_hit_from_below() {
        let shape = Shape3d::Cone { base: Vec3::ZERO, radius: 1.0, height: 2.0 };
        let ray = Ray::new(vec3(0.2, 0.0, -3.0), vec3(0.0, 0.0, 1.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 3.0, 1e-6);
        assert_close(hit.normal.z, -1.0, 1e-9);
    }

    #[test]
    fn cylinder_side_hit() {
        let shape = Shape3d::Cylinder { base: Vec3::ZERO, radius: 1.0, height: 2.0 };
        let ray = Ray::new(vec3(5.0, 0.0, 1.0), vec3(-1.0, 0.0, 0.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 4.0, 1e-6);
        assert_close(hit.normal.x, 1.0, 1e-9);
    }

    #[test]
    fn cylinder_cap_hit() {
        let shape = Shape3d::Cylinder { base: Vec3::ZERO, radius: 1.0, height: 2.0 };
        let ray = Ray::new(vec3(0.3, 0.2, 5.0), vec3(0.0, 0.0, -1.0));
        let hit = shape.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 3.0, 1e-6);
        assert_close(hit.normal.z, 1.0, 1e-9);
    }

    #[test]
    fn cylinder_parallel_miss() {
        let shape = Shape3d::Cylinder { base: Vec3::ZERO, radius: 1.0, height: 2.0 };
        let ray = Ray::new(vec3(2.0, 0.0, -5.0), vec3(0.0, 0.0, 1.0));
        assert!(shape.intersect(&ray, 1e-9, f64::INFINITY).is_none());
    }

    #[test]
    fn room_shell_floor_hit() {
        let room = RoomShell { min: vec3(-3.0, -3.0, 0.0), max: vec3(3.0, 3.0, 3.0) };
        let ray = Ray::new(vec3(0.0, 0.0, 2.0), vec3(0.0, 0.0, -1.0));
        let (hit, face) = room.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 2.0, 1e-9);
        assert_eq!(face, RoomFace::Floor);
        assert_close(hit.normal.z, 1.0, 1e-9);
    }

    #[test]
    fn room_shell_wall_hit() {
        let room = RoomShell { min: vec3(-3.0, -3.0, 0.0), max: vec3(3.0, 3.0, 3.0) };
        let ray = Ray::new(vec3(1.0, 0.0, 1.5), vec3(1.0, 0.0, 0.0));
        let (hit, face) = room.intersect(&ray, 1e-9, f64::INFINITY).unwrap();
        assert_close(hit.t, 2.0, 1e-9);
        assert_eq!(face, RoomFace::Wall);
        assert_close(hit.normal.x, -1.0, 1e-9);
    }
}
