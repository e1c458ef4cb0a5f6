//! Parametric source supports: the 2-d boundary catalog (peanut, rounded
//! square, kite, ellipse), balls and cubes in 2-d/3-d, and unions of two
//! disjoint components.
//!
//! Directional extents `(inf x̂·D, sup x̂·D)` and radial extents
//! `(inf |x-z|, sup |x-z|)` are computed by dense boundary sampling followed
//! by golden-section refinement; the catalog contains non-convex curves, so
//! no closed forms are assumed beyond the ball and the cube.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::vec3::{UnitVec, Vec3};

/// Boundary sample count used before local refinement.
pub const EXTENT_SAMPLES: usize = 4096;
/// Vertex count of the polygon used for 2-d containment tests.
pub const CONTAINMENT_VERTICES: usize = 4096;
/// Parameter-interval tolerance of the golden-section refinement.
const REFINE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub lo: f64,
    pub hi: f64,
}

impl Extent {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn dilated(&self, margin: f64) -> Extent {
        Extent {
            lo: self.lo - margin,
            hi: self.hi + margin,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// Outcome of the planar separation test for a two-component union.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Separation {
    /// `inf(x̂·D₂) − sup(x̂·D₁) > T`.
    HoldsA,
    /// `inf(x̂·D₁) − sup(x̂·D₂) > T`.
    HoldsB,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `x(t) = c + a·r·sqrt(b·cos²t + 1)·(cos t, sin t)`
    Peanut { center: Vec3, a: f64, b: f64, r: f64 },
    /// `x(t) = c + r·(cos³t + cos t, sin³t + sin t)`
    RoundSquare { center: Vec3, r: f64 },
    /// `x(t) = c + (r·cos t + a·r·(cos 2t − 1), b·r·sin t)`
    Kite { center: Vec3, a: f64, b: f64, r: f64 },
    /// `x(t) = c + (a·cos t, b·sin t)`
    Ellipse { center: Vec3, a: f64, b: f64 },
    Ball { center: Vec3, r: f64, dim: usize },
    Cube { center: Vec3, half_width: f64, dim: usize },
    Union { first: Box<Shape>, second: Box<Shape> },
}

impl Shape {
    /// Union of two disjoint components; disjointness is checked on the
    /// axis-aligned bounding boxes.
    pub fn union(first: Shape, second: Shape) -> Result<Shape> {
        let (alo, ahi) = first.bounding_box();
        let (blo, bhi) = second.bounding_box();
        let overlap = alo.x <= bhi.x
            && blo.x <= ahi.x
            && alo.y <= bhi.y
            && blo.y <= ahi.y
            && alo.z <= bhi.z
            && blo.z <= ahi.z;
        if overlap {
            return Err(CoreError::validation(
                "union components have overlapping bounding boxes",
            ));
        }
        Ok(Shape::Union {
            first: Box::new(first),
            second: Box::new(second),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Peanut { .. }
            | Shape::RoundSquare { .. }
            | Shape::Kite { .. }
            | Shape::Ellipse { .. } => 2,
            Shape::Ball { dim, .. } | Shape::Cube { dim, .. } => *dim,
            Shape::Union { first, .. } => first.dim(),
        }
    }

    /// Evaluates the catalog boundary formula. 2-d shapes take one angle,
    /// 3-d shapes take `(theta, phi)` with `phi` the polar angle.
    pub fn boundary_point(&self, param: &[f64]) -> Result<Vec3> {
        let expect = if self.dim() == 2 { 1 } else { 2 };
        if param.len() != expect {
            return Err(CoreError::validation(format!(
                "boundary parameter needs {expect} angle(s), got {}",
                param.len()
            )));
        }
        match self {
            Shape::Peanut { center, a, b, r } => {
                let t = param[0];
                let rho = a * r * (b * t.cos().powi(2) + 1.0).sqrt();
                Ok(center.add(Vec3::planar(rho * t.cos(), rho * t.sin())))
            }
            Shape::RoundSquare { center, r } => {
                let t = param[0];
                Ok(center.add(Vec3::planar(
                    r * (t.cos().powi(3) + t.cos()),
                    r * (t.sin().powi(3) + t.sin()),
                )))
            }
            Shape::Kite { center, a, b, r } => {
                let t = param[0];
                Ok(center.add(Vec3::planar(
                    r * t.cos() + a * r * ((2.0 * t).cos() - 1.0),
                    b * r * t.sin(),
                )))
            }
            Shape::Ellipse { center, a, b } => {
                let t = param[0];
                Ok(center.add(Vec3::planar(a * t.cos(), b * t.sin())))
            }
            Shape::Ball { center, r, dim } => {
                if *dim == 2 {
                    let t = param[0];
                    Ok(center.add(Vec3::planar(r * t.cos(), r * t.sin())))
                } else {
                    let (theta, phi) = (param[0], param[1]);
                    Ok(center.add(Vec3::new(
                        r * phi.sin() * theta.cos(),
                        r * phi.sin() * theta.sin(),
                        r * phi.cos(),
                    )))
                }
            }
            Shape::Cube {
                center,
                half_width,
                dim,
            } => {
                // Radial projection of the direction onto the cube surface.
                let u = if *dim == 2 {
                    Vec3::planar(param[0].cos(), param[0].sin())
                } else {
                    let (theta, phi) = (param[0], param[1]);
                    Vec3::new(
                        phi.sin() * theta.cos(),
                        phi.sin() * theta.sin(),
                        phi.cos(),
                    )
                };
                let m = u.x.abs().max(u.y.abs()).max(if *dim == 3 { u.z.abs() } else { 0.0 });
                Ok(center.add(u.scale(half_width / m)))
            }
            Shape::Union { .. } => Err(CoreError::UnsupportedShape(
                "a union has no single boundary parameterization".into(),
            )),
        }
    }

    /// Point-in-region test. 2-d catalog curves use even-odd ray crossing on
    /// the polygonal boundary approximation; prefer [`Shape::mask`] when
    /// testing many points against the same shape.
    pub fn contains(&self, p: Vec3) -> bool {
        self.mask().contains(p)
    }

    /// Precomputes whatever the containment test needs (boundary polygons for
    /// the 2-d catalog curves) so that bulk queries are cheap.
    pub fn mask(&self) -> ContainmentMask {
        ContainmentMask::new(self)
    }

    /// Axis-aligned bounding box. For catalog curves this is taken from the
    /// boundary samples used elsewhere for extents.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match self {
            Shape::Ball { center, r, dim } => {
                let e = if *dim == 3 { *r } else { 0.0 };
                (
                    center.sub(Vec3::new(*r, *r, e)),
                    center.add(Vec3::new(*r, *r, e)),
                )
            }
            Shape::Cube {
                center,
                half_width,
                dim,
            } => {
                let e = if *dim == 3 { *half_width } else { 0.0 };
                (
                    center.sub(Vec3::new(*half_width, *half_width, e)),
                    center.add(Vec3::new(*half_width, *half_width, e)),
                )
            }
            Shape::Union { first, second } => {
                let (alo, ahi) = first.bounding_box();
                let (blo, bhi) = second.bounding_box();
                (
                    Vec3::new(alo.x.min(blo.x), alo.y.min(blo.y), alo.z.min(blo.z)),
                    Vec3::new(ahi.x.max(bhi.x), ahi.y.max(bhi.y), ahi.z.max(bhi.z)),
                )
            }
            _ => {
                let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, 0.0);
                let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
                for i in 0..EXTENT_SAMPLES {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / EXTENT_SAMPLES as f64;
                    let p = self.boundary_point(&[t]).expect("2-d curve");
                    lo.x = lo.x.min(p.x);
                    lo.y = lo.y.min(p.y);
                    hi.x = hi.x.max(p.x);
                    hi.y = hi.y.max(p.y);
                }
                (lo, hi)
            }
        }
    }

    /// `(inf x̂·D, sup x̂·D)` with the default boundary sample count.
    pub fn support_extent(&self, dir: UnitVec) -> Extent {
        self.support_extent_with(dir, EXTENT_SAMPLES)
    }

    /// Extent from `samples` boundary points plus golden-section refinement.
    /// The lower bound is obtained as `-sup((-x̂)·D)`, so the antisymmetry
    /// `lo(x̂) = -hi(-x̂)` holds exactly.
    pub fn support_extent_with(&self, dir: UnitVec, samples: usize) -> Extent {
        Extent {
            lo: -self.support_hi(dir.flip(), samples),
            hi: self.support_hi(dir, samples),
        }
    }

    fn support_hi(&self, dir: UnitVec, samples: usize) -> f64 {
        match self {
            Shape::Ball { center, r, .. } => dir.dot(*center) + r,
            Shape::Cube {
                center,
                half_width,
                dim,
            } => {
                let d = dir.vec();
                let spread = d.x.abs()
                    + d.y.abs()
                    + if *dim == 3 { d.z.abs() } else { 0.0 };
                dir.dot(*center) + half_width * spread
            }
            Shape::Union { first, second } => first
                .support_hi(dir, samples)
                .max(second.support_hi(dir, samples)),
            _ => self.refine_boundary_max(samples, |p| dir.dot(p)),
        }
    }

    /// `(inf_{z∈D} |x−z|, sup_{z∈D} |x−z|)` for a receiver outside the support.
    pub fn distance_extent(&self, receiver: Vec3) -> Result<Extent> {
        if self.contains(receiver) {
            return Err(CoreError::validation(format!(
                "receiver ({}, {}, {}) lies inside the support",
                receiver.x, receiver.y, receiver.z
            )));
        }
        Ok(self.distance_extent_unchecked(receiver, EXTENT_SAMPLES))
    }

    fn distance_extent_unchecked(&self, x: Vec3, samples: usize) -> Extent {
        match self {
            Shape::Ball { center, r, .. } => {
                let d = x.dist(*center);
                Extent {
                    lo: d - r,
                    hi: d + r,
                }
            }
            Shape::Cube {
                center,
                half_width,
                dim,
            } => {
                let clamp = |v: f64, c: f64| (v - c).clamp(-half_width, *half_width) + c;
                let nearest = Vec3::new(
                    clamp(x.x, center.x),
                    clamp(x.y, center.y),
                    if *dim == 3 { clamp(x.z, center.z) } else { center.z },
                );
                let mut hi: f64 = 0.0;
                let zs: &[f64] = if *dim == 3 { &[-1.0, 1.0] } else { &[0.0] };
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        for &sz in zs {
                            let corner = center.add(
                                Vec3::new(sx, sy, sz).scale(*half_width),
                            );
                            hi = hi.max(x.dist(corner));
                        }
                    }
                }
                Extent {
                    lo: x.dist(nearest),
                    hi,
                }
            }
            Shape::Union { first, second } => {
                let a = first.distance_extent_unchecked(x, samples);
                let b = second.distance_extent_unchecked(x, samples);
                Extent {
                    lo: a.lo.min(b.lo),
                    hi: a.hi.max(b.hi),
                }
            }
            _ => Extent {
                lo: -self.refine_boundary_max(samples, |p| -x.dist(p)),
                hi: self.refine_boundary_max(samples, |p| x.dist(p)),
            },
        }
    }

    /// Separation test from the two-component analysis: reports which (if
    /// either) projected component clears the other by more than the
    /// radiating duration `t_span`.
    pub fn separation_condition(&self, dir: UnitVec, t_span: f64) -> Result<Separation> {
        let Shape::Union { first, second } = self else {
            return Err(CoreError::validation(
                "separation condition is defined for two-component unions only",
            ));
        };
        if t_span <= 0.0 {
            return Err(CoreError::validation("radiating duration must be positive"));
        }
        let e1 = first.support_extent(dir);
        let e2 = second.support_extent(dir);
        if e2.lo - e1.hi > t_span {
            Ok(Separation::HoldsA)
        } else if e1.lo - e2.hi > t_span {
            Ok(Separation::HoldsB)
        } else {
            Ok(Separation::Fails)
        }
    }

    /// Dense boundary maximum of `f`, refined by golden-section search in the
    /// winning sample's neighborhood. 2-d curves only.
    fn refine_boundary_max(&self, samples: usize, f: impl Fn(Vec3) -> f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let g = |t: f64| f(self.boundary_point(&[t]).expect("2-d curve"));
        let mut best_t = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..samples {
            let t = tau * i as f64 / samples as f64;
            let v = g(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        let h = tau / samples as f64;
        golden_max(&g, best_t - h, best_t + h, REFINE_TOL).max(best)
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    fa.max(fb)
}

/// Reusable containment tester; 2-d catalog curves are frozen into polygons
/// once so that bulk mask queries stay cheap.
pub enum ContainmentMask {
    Ball {
        center: Vec3,
        r: f64,
        dim: usize,
    },
    Cube {
        center: Vec3,
        half_width: f64,
        dim: usize,
    },
    Polygon {
        vertices: Vec<Vec3>,
    },
    Union(Box<ContainmentMask>, Box<ContainmentMask>),
}

impl ContainmentMask {
    fn new(shape: &Shape) -> Self {
        match shape {
            Shape::Ball { center, r, dim } => ContainmentMask::Ball {
                center: *center,
                r: *r,
                dim: *dim,
            },
            Shape::Cube {
                center,
                half_width,
                dim,
            } => ContainmentMask::Cube {
                center: *center,
                half_width: *half_width,
                dim: *dim,
            },
            Shape::Union { first, second } => ContainmentMask::Union(
                Box::new(ContainmentMask::new(first)),
                Box::new(ContainmentMask::new(second)),
            ),
            _ => {
                let tau = 2.0 * std::f64::consts::PI;
                let vertices = (0..CONTAINMENT_VERTICES)
                    .map(|i| {
                        let t = tau * i as f64 / CONTAINMENT_VERTICES as f64;
                        shape.boundary_point(&[t]).expect("2-d curve")
                    })
                    .collect();
                ContainmentMask::Polygon { vertices }
            }
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            ContainmentMask::Ball { center, r, dim } => {
                let d = p.sub(*center);
                let d2 = if *dim == 2 {
                    d.x * d.x + d.y * d.y
                } else {
                    d.norm_sq()
                };
                d2 <= r * r
            }
            ContainmentMask::Cube {
                center,
                half_width,
                dim,
            } => {
                let d = p.sub(*center);
                d.x.abs() <= *half_width
                    && d.y.abs() <= *half_width
                    && (*dim == 2 || d.z.abs() <= *half_width)
            }
            ContainmentMask::Polygon { vertices } => {
                // Even-odd crossing count against a horizontal ray.
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let p1 = vertices[i];
                    let p2 = vertices[(i + 1) % n];
                    if (p1.y > p.y) != (p2.y > p.y) {
                        let x_cross = p1.x + (p.y - p1.y) * (p2.x - p1.x) / (p2.y - p1.y);
                        if p.x < x_cross {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            ContainmentMask::Union(a, b) => a.contains(p) || b.contains(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn xhat() -> UnitVec {
        UnitVec::new(Vec3::new(1.0, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn ellipse_boundary_at_zero() {
        let s = Shape::Ellipse {
            center: Vec3::ZERO,
            a: 1.0,
            b: 1.0,
        };
        let p = s.boundary_point(&[0.0]).unwrap();
        assert_relative_eq!(p.x, 1.0);
        assert_relative_eq!(p.y, 0.0);
    }

    #[test]
    fn round_square_boundary_at_zero() {
        let s = Shape::RoundSquare {
            center: Vec3::ZERO,
            r: 0.8,
        };
        let p = s.boundary_point(&[0.0]).unwrap();
        assert_relative_eq!(p.x, 1.6);
        assert_relative_eq!(p.y, 0.0);
    }

    #[test]
    fn kite_boundary_at_pi() {
        let s = Shape::Kite {
            center: Vec3::ZERO,
            a: 0.65,
            b: 1.5,
            r: 1.0,
        };
        let p = s.boundary_point(&[std::f64::consts::PI]).unwrap();
        assert_relative_eq!(p.x, -1.0, epsilon = 1e-14);
        assert_relative_eq!(p.y, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ball_and_cube_containment() {
        let ball = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 3,
        };
        assert!(ball.contains(Vec3::ZERO));
        let cube = Shape::Cube {
            center: Vec3::ZERO,
            half_width: 1.0,
            dim: 3,
        };
        assert!(!cube.contains(Vec3::new(1.5, 0.0, 0.0)));
    }

    #[test]
    fn union_contains_component_center() {
        let peanut = Shape::Peanut {
            center: Vec3::planar(3.0, 3.0),
            a: 1.0,
            b: 1.0,
            r: 1.0,
        };
        let kite = Shape::Kite {
            center: Vec3::planar(-3.0, -3.0),
            a: 0.65,
            b: 1.5,
            r: 1.0,
        };
        let u = Shape::union(peanut, kite).unwrap();
        assert!(u.contains(Vec3::planar(3.0, 3.0)));
        assert!(!u.contains(Vec3::planar(0.0, 0.0)));
    }

    #[test]
    fn union_rejects_overlap() {
        let a = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 2,
        };
        let b = Shape::Ball {
            center: Vec3::planar(1.0, 0.0),
            r: 1.0,
            dim: 2,
        };
        assert!(Shape::union(a, b).is_err());
    }

    #[test]
    fn ball_cube_support_extents() {
        let ball = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 3,
        };
        let e = ball.support_extent(xhat());
        assert_relative_eq!(e.lo, -1.0);
        assert_relative_eq!(e.hi, 1.0);

        let cube = Shape::Cube {
            center: Vec3::ZERO,
            half_width: 1.0,
            dim: 3,
        };
        let e = cube.support_extent(xhat());
        assert_relative_eq!(e.lo, -1.0);
        assert_relative_eq!(e.hi, 1.0);
    }

    #[test]
    fn round_square_support_extent() {
        let s = Shape::RoundSquare {
            center: Vec3::ZERO,
            r: 0.8,
        };
        let e = s.support_extent(xhat());
        assert_relative_eq!(e.hi, 1.6, epsilon = 1e-9);
        assert_relative_eq!(e.lo, -1.6, epsilon = 1e-9);
    }

    #[test]
    fn peanut_support_extent_is_sqrt_two() {
        // max over t of sqrt(cos²t+1)·cos t = sqrt(2) at t = 0.
        let s = Shape::Peanut {
            center: Vec3::ZERO,
            a: 1.0,
            b: 1.0,
            r: 1.0,
        };
        let e = s.support_extent(xhat());
        assert_relative_eq!(e.hi, std::f64::consts::SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn extent_antisymmetry_is_exact() {
        let s = Shape::Kite {
            center: Vec3::planar(0.4, -0.2),
            a: 0.65,
            b: 1.5,
            r: 1.0,
        };
        for theta in [0.0, 0.3, 1.1, 2.7] {
            let d = UnitVec::from_angle(theta);
            let e = s.support_extent(d);
            let f = s.support_extent(d.flip());
            assert_eq!(e.lo, -f.hi);
            assert_eq!(e.hi, -f.lo);
        }
    }

    #[test]
    fn union_extent_is_componentwise() {
        let a = Shape::Ball {
            center: Vec3::planar(-3.0, 0.0),
            r: 1.0,
            dim: 2,
        };
        let b = Shape::Ball {
            center: Vec3::planar(3.0, 0.0),
            r: 1.0,
            dim: 2,
        };
        let u = Shape::union(a.clone(), b.clone()).unwrap();
        let d = xhat();
        let (ea, eb, eu) = (a.support_extent(d), b.support_extent(d), u.support_extent(d));
        assert_relative_eq!(eu.lo, ea.lo.min(eb.lo));
        assert_relative_eq!(eu.hi, ea.hi.max(eb.hi));
    }

    #[test]
    fn ball_distance_extents() {
        let ball = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 3,
        };
        let e = ball.distance_extent(Vec3::new(3.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(e.lo, 2.0);
        assert_relative_eq!(e.hi, 4.0);
        let e = ball.distance_extent(Vec3::new(0.0, 3.0, 0.0)).unwrap();
        assert_relative_eq!(e.lo, 2.0);
        assert_relative_eq!(e.hi, 4.0);
    }

    #[test]
    fn cube_distance_extent() {
        let cube = Shape::Cube {
            center: Vec3::ZERO,
            half_width: 1.0,
            dim: 3,
        };
        let e = cube.distance_extent(Vec3::new(3.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(e.lo, 2.0);
        assert_relative_eq!(e.hi, 18.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn distance_extent_rejects_interior_receiver() {
        let ball = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 3,
        };
        assert!(ball.distance_extent(Vec3::new(0.5, 0.0, 0.0)).is_err());
    }

    #[test]
    fn separation_two_disks() {
        let a = Shape::Ball {
            center: Vec3::planar(-3.0, 0.0),
            r: 1.0,
            dim: 2,
        };
        let b = Shape::Ball {
            center: Vec3::planar(3.0, 0.0),
            r: 1.0,
            dim: 2,
        };
        let u = Shape::union(a, b).unwrap();
        assert_eq!(u.separation_condition(xhat(), 1.0).unwrap(), Separation::HoldsA);
        assert_eq!(u.separation_condition(xhat(), 5.0).unwrap(), Separation::Fails);
        let yhat = UnitVec::new(Vec3::new(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(u.separation_condition(yhat, 0.5).unwrap(), Separation::Fails);
    }

    #[test]
    fn separation_requires_union() {
        let ball = Shape::Ball {
            center: Vec3::ZERO,
            r: 1.0,
            dim: 2,
        };
        assert!(ball.separation_condition(xhat(), 1.0).is_err());
    }

    #[test]
    fn doubling_samples_never_worsens_convex_extent() {
        let s = Shape::Ellipse {
            center: Vec3::ZERO,
            a: 1.3,
            b: 0.7,
        };
        let d = UnitVec::from_angle(0.83);
        let exact = (1.3f64 * 0.83f64.cos()).hypot(0.7 * 0.83f64.sin());
        let mut prev = f64::INFINITY;
        for m in [64, 128, 256, 512, 1024] {
            let err = (s.support_extent_with(d, m).hi - exact).abs();
            assert!(err <= prev + 1e-15, "err {err} grew past {prev} at m={m}");
            prev = err;
        }
    }

    #[test]
    fn boundary_shrink_grow_containment() {
        let shapes = vec![
            Shape::Peanut {
                center: Vec3::ZERO,
                a: 1.0,
                b: 1.0,
                r: 1.0,
            },
            Shape::RoundSquare {
                center: Vec3::ZERO,
                r: 0.8,
            },
            Shape::Kite {
                center: Vec3::ZERO,
                a: 0.65,
                b: 1.5,
                r: 1.0,
            },
            Shape::Ellipse {
                center: Vec3::ZERO,
                a: 1.2,
                b: 0.6,
            },
        ];
        for shape in &shapes {
            let mask = shape.mask();
            let center = match shape {
                Shape::Peanut { center, .. }
                | Shape::RoundSquare { center, .. }
                | Shape::Kite { center, .. }
                | Shape::Ellipse { center, .. } => *center,
                _ => unreachable!(),
            };
            for i in 0..100 {
                let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.37) / 100.0;
                let p = shape.boundary_point(&[t]).unwrap();
                let towards = center.add(p.sub(center).scale(0.99));
                let away = center.add(p.sub(center).scale(1.01));
                assert!(mask.contains(towards), "{shape:?} t={t}");
                assert!(!mask.contains(away), "{shape:?} t={t}");
            }
        }
    }
}
