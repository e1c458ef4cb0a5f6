//! Minimal fixed-dimension vector arithmetic. Planar (2-d) geometry uses the
//! same type with `z = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn planar(x: f64, y: f64) -> Self {
        Vec3 { x, y, z: 0.0 }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }

    pub fn dist(self, other: Vec3) -> f64 {
        self.sub(other).norm()
    }

    /// Lexicographic comparison used to pick canonical pair representatives.
    pub fn lex_cmp(self, other: Vec3) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then(self.y.total_cmp(&other.y))
            .then(self.z.total_cmp(&other.z))
    }
}

/// A direction vector validated to have unit Euclidean norm (within 1e-12).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitVec(Vec3);

impl UnitVec {
    pub fn new(v: Vec3) -> Result<Self> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::validation(format!(
                "direction ({}, {}, {}) is not a unit vector (|v| = {:.16})",
                v.x,
                v.y,
                v.z,
                v.norm()
            )));
        }
        Ok(UnitVec(v))
    }

    /// Rescales an arbitrary nonzero vector to unit length.
    pub fn normalized(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(CoreError::validation("cannot normalize the zero vector"));
        }
        Ok(UnitVec(v.scale(1.0 / n)))
    }

    pub fn from_angle(theta: f64) -> Self {
        UnitVec(Vec3::planar(theta.cos(), theta.sin()))
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn dot(self, p: Vec3) -> f64 {
        self.0.dot(p)
    }

    pub fn flip(self) -> UnitVec {
        UnitVec(self.0.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vec_rejects_non_unit() {
        assert!(UnitVec::new(Vec3::new(1.0, 1.0, 0.0)).is_err());
        assert!(UnitVec::new(Vec3::new(1.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn normalized_recovers_unit_norm() {
        let u = UnitVec::normalized(Vec3::new(3.0, 4.0, 0.0)).unwrap();
        assert!((u.vec().norm() - 1.0).abs() < 1e-15);
        assert!((u.vec().x - 0.6).abs() < 1e-15);
    }

    #[test]
    fn flip_is_exact() {
        let u = UnitVec::from_angle(0.3);
        let f = u.flip();
        assert_eq!(u.vec().x, -f.vec().x);
        assert_eq!(u.vec().y, -f.vec().y);
    }
}
