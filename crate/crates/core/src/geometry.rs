//! Arena geometry and constant-velocity interception.
//!
//! Coordinates are pixels with the arena centre at the origin and the y-axis
//! pointing up. Everything here is a pure function over `f64`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Absolute tolerance (pixels) used for geometric comparisons.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counter-clockwise by `theta` radians.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// The circular playing field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub radius: f64,
}

impl Arena {
    pub const DEFAULT_RADIUS: f64 = 400.0;

    pub fn new(radius: f64) -> Result<Self, GeometryError> {
        if radius.is_finite() && radius > 0.0 {
            Ok(Self { radius })
        } else {
            Err(GeometryError::InvalidArena(radius))
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.norm() <= self.radius + EPS
    }
}

impl Default for Arena {
    fn default() -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptSolution {
    /// Seconds from now until the pursuer meets the target.
    pub time: f64,
    pub point: Vec2,
    /// Whether `point` lies inside the arena.
    pub reachable: bool,
}

/// Earliest time at which a pursuer moving in a straight line at
/// `pursuer_speed` meets a target moving with constant velocity.
///
/// Solves `|d + u t| = s t` for the non-negative root, where `d` is the
/// target's offset from the pursuer. The pursuer must be strictly faster than
/// the target, which makes the root unique.
pub fn solve_interception(
    pursuer_pos: Vec2,
    pursuer_speed: f64,
    target_pos: Vec2,
    target_vel: Vec2,
    arena: Arena,
) -> Result<InterceptSolution, GeometryError> {
    let d = target_pos - pursuer_pos;
    let a = pursuer_speed * pursuer_speed - target_vel.norm_sq();
    if !(a > 0.0) || !pursuer_speed.is_finite() {
        return Err(GeometryError::UnsolvablePursuit {
            pursuer_speed,
            target_speed: target_vel.norm(),
        });
    }
    let dd = d.norm_sq();
    let time = if dd == 0.0 {
        0.0
    } else {
        let du = d.dot(target_vel);
        let root = (du * du + a * dd).sqrt();
        // Two algebraically equal forms; pick the one without cancellation.
        if du >= 0.0 {
            (du + root) / a
        } else {
            dd / (root - du)
        }
    };
    let point = target_pos + target_vel * time;
    Ok(InterceptSolution {
        time,
        point,
        reachable: arena.contains(point),
    })
}

/// Projects `point` radially onto the arena disc.
pub fn clamp_to_arena(point: Vec2, arena: Arena) -> Vec2 {
    let r = point.norm();
    if r <= arena.radius + EPS {
        point
    } else {
        point * (arena.radius / r)
    }
}

fn orientation(a: Vec2, b: Vec2, c: Vec2) -> i8 {
    let v = (b - a).cross(c - a);
    if v.abs() <= EPS {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn within_box(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) - EPS
        && p.x <= a.x.max(b.x) + EPS
        && p.y >= a.y.min(b.y) - EPS
        && p.y <= a.y.max(b.y) + EPS
}

/// True iff the closed segments `a1a2` and `b1b2` share at least one point.
/// Collinear overlap counts as an intersection.
pub fn segments_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let o1 = orientation(a1, a2, b1);
    let o2 = orientation(a1, a2, b2);
    let o3 = orientation(b1, b2, a1);
    let o4 = orientation(b1, b2, a2);

    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(a1, a2, b1))
        || (o2 == 0 && within_box(a1, a2, b2))
        || (o3 == 0 && within_box(b1, b2, a1))
        || (o4 == 0 && within_box(b1, b2, a2))
}

/// Smallest distance between two points moving with constant velocities over
/// `[0, horizon]`, returned with the time at which it occurs.
pub fn closest_approach(p: Vec2, pv: Vec2, q: Vec2, qv: Vec2, horizon: f64) -> (f64, f64) {
    let r = q - p;
    let w = qv - pv;
    let ww = w.norm_sq();
    let t = if ww <= 0.0 {
        0.0
    } else {
        (-r.dot(w) / ww).clamp(0.0, horizon.max(0.0))
    };
    ((r + w * t).norm(), t)
}
