//! Planar convex hulls and signed distances for support polygons.

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Point2 = Vector2<f64>;

fn cross(o: &Point2, a: &Point2, b: &Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise hull without collinear vertices (Andrew's monotone chain).
/// A single distinct point yields one vertex and collinear input yields its two endpoints.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<Point2>> {
    if points.is_empty() {
        return Err(Error::Structural("convex hull of an empty point set".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    Ok(hull)
}

/// Support polygon: hull of the stance feet's ground projections.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPolygon {
    pub vertices: Vec<Point2>,
}

impl SupportPolygon {
    pub fn from_feet(feet: &[Point2]) -> Result<Self> {
        Ok(SupportPolygon {
            vertices: convex_hull(feet)?,
        })
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn signed_distance(&self, p: &Point2) -> f64 {
        signed_distance_to_hull(p, &self.vertices)
    }
}

pub fn polygon_area(v: &[Point2]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        twice += a.x * b.y - a.y * b.x;
    }
    0.5 * twice
}

pub fn distance_to_segment(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + t * ab - p).norm()
}

/// Positive inside the hull (distance to the nearest edge), negative outside. Point and
/// segment hulls have no interior, so every query is outside or on them.
pub fn signed_distance_to_hull(p: &Point2, hull: &[Point2]) -> f64 {
    match hull.len() {
        0 => f64::NEG_INFINITY,
        1 => -(p - hull[0]).norm(),
        2 => -distance_to_segment(p, &hull[0], &hull[1]),
        n => {
            let mut inside = true;
            let mut nearest = f64::INFINITY;
            for i in 0..n {
                let (a, b) = (&hull[i], &hull[(i + 1) % n]);
                if cross(a, b, p) < 0.0 {
                    inside = false;
                }
                nearest = nearest.min(distance_to_segment(p, a, b));
            }
            if inside {
                nearest
            } else {
                -nearest
            }
        }
    }
}
