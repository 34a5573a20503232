use serde::{Deserialize, Serialize};

/// A point of the straight-line drawing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Angle of `self - origin` in `[0, 2π)`, measured counterclockwise from +x.
    pub fn angle_from(self, origin: Point) -> f64 {
        let d = self.sub(origin);
        let a = d.y.atan2(d.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    /// Unit vector rotated a quarter turn counterclockwise.
    pub fn left_normal(self) -> Point {
        let n = self.norm();
        Point::new(-self.y / n, self.x / n)
    }
}

const EPS: f64 = 1e-12;

/// Sign of the turn `a -> b -> c`: positive for counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> i8 {
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let scale = 1.0 + (b.x - a.x).abs().max((b.y - a.y).abs()) * (c.x - a.x).abs().max((c.y - a.y).abs());
    if cross.abs() <= EPS * scale {
        0
    } else if cross > 0.0 {
        1
    } else {
        -1
    }
}

/// `p` lies on the closed segment `[a, b]` (assuming collinearity has been checked).
fn within_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) - EPS
        && p.x <= a.x.max(b.x) + EPS
        && p.y >= a.y.min(b.y) - EPS
        && p.y <= a.y.max(b.y) + EPS
}

/// `p` lies strictly inside the segment `[a, b]`, excluding its endpoints.
pub fn on_segment_interior(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0 && within_box(a, b, p) && p != a && p != b
}

/// Whether two closed segments meet anywhere.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    (o1 == 0 && within_box(a, b, c))
        || (o2 == 0 && within_box(a, b, d))
        || (o3 == 0 && within_box(c, d, a))
        || (o4 == 0 && within_box(c, d, b))
}

/// Two segments that share exactly the endpoint `shared` overlap beyond it
/// only when they leave `shared` in the same direction.
pub fn overlap_at_shared_end(shared: Point, p: Point, q: Point) -> bool {
    if orient(shared, p, q) != 0 {
        return false;
    }
    let u = p.sub(shared);
    let v = q.sub(shared);
    u.x * v.x + u.y * v.y > 0.0
}

/// Twice the signed area (shoelace); positive for counterclockwise polygons.
pub fn signed_area2(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum()
}

/// Even-odd ray casting. Points on the boundary give an unspecified answer.
pub fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let n = polygon.len();
    let mut inside = false;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}
