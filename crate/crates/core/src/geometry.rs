//! Points, the rectangular domain, and analytic interface curves.
//!
//! Every curve carries a level-set function whose sign decides the region:
//! positive values belong to [`RegionId::Region1`], non-positive values to
//! [`RegionId::Region2`].

use std::f64::consts::PI;

pub type Point2 = nalgebra::Point2<f64>;
pub type Vector2 = nalgebra::Vector2<f64>;

/// Which side of the interface a triangle (or point) belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionId {
    Region1,
    Region2,
}

impl RegionId {
    pub fn index(self) -> usize {
        match self {
            RegionId::Region1 => 0,
            RegionId::Region2 => 1,
        }
    }

    pub fn other(self) -> RegionId {
        match self {
            RegionId::Region1 => RegionId::Region2,
            RegionId::Region2 => RegionId::Region1,
        }
    }

    pub fn from_level_set(value: f64) -> RegionId {
        if value > 0.0 {
            RegionId::Region1
        } else {
            RegionId::Region2
        }
    }
}

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        assert!(x_max > x_min && y_max > y_min, "degenerate rectangle");
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: &Point2, tol: f64) -> bool {
        p.x >= self.x_min - tol
            && p.x <= self.x_max + tol
            && p.y >= self.y_min - tol
            && p.y <= self.y_max + tol
    }

    pub fn on_boundary(&self, p: &Point2, tol: f64) -> bool {
        self.contains(p, tol)
            && ((p.x - self.x_min).abs() <= tol
                || (p.x - self.x_max).abs() <= tol
                || (p.y - self.y_min).abs() <= tol
                || (p.y - self.y_max).abs() <= tol)
    }

    /// Moves `p` exactly onto any boundary line it is within `tol` of.
    pub fn snap(&self, p: &Point2, tol: f64) -> Point2 {
        let snap1 = |v: f64, lo: f64, hi: f64| {
            if (v - lo).abs() <= tol {
                lo
            } else if (v - hi).abs() <= tol {
                hi
            } else {
                v
            }
        };
        Point2::new(
            snap1(p.x, self.x_min, self.x_max),
            snap1(p.y, self.y_min, self.y_max),
        )
    }

    /// Points along the boundary, counterclockwise from the lower-left
    /// corner, with no spacing larger than `max_spacing`.
    pub fn boundary_points(&self, max_spacing: f64) -> Vec<Point2> {
        let nx = (self.width() / max_spacing).ceil().max(1.0) as usize;
        let ny = (self.height() / max_spacing).ceil().max(1.0) as usize;
        let mut pts = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            pts.push(Point2::new(
                self.x_min + self.width() * i as f64 / nx as f64,
                self.y_min,
            ));
        }
        for j in 0..ny {
            pts.push(Point2::new(
                self.x_max,
                self.y_min + self.height() * j as f64 / ny as f64,
            ));
        }
        for i in 0..nx {
            pts.push(Point2::new(
                self.x_max - self.width() * i as f64 / nx as f64,
                self.y_max,
            ));
        }
        for j in 0..ny {
            pts.push(Point2::new(
                self.x_min,
                self.y_max - self.height() * j as f64 / ny as f64,
            ));
        }
        pts
    }
}

/// Signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn signed_area(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

pub fn distance_to_segment(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Piecewise quadratic graph `y = g(x)`; the `left` coefficients apply for
/// `x <= split_x`, `right` otherwise. Coefficients are `[c0, c1, c2]` for
/// `c0 + c1 x + c2 x^2`. Points above the graph are in Region1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphCurve {
    pub split_x: f64,
    pub left: [f64; 3],
    pub right: [f64; 3],
}

impl GraphCurve {
    pub fn line(slope: f64, intercept: f64) -> Self {
        GraphCurve {
            split_x: 0.0,
            left: [intercept, slope, 0.0],
            right: [intercept, slope, 0.0],
        }
    }

    fn coeffs(&self, x: f64) -> &[f64; 3] {
        if x <= self.split_x {
            &self.left
        } else {
            &self.right
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let c = self.coeffs(x);
        c[0] + x * (c[1] + x * c[2])
    }

    pub fn slope(&self, x: f64) -> f64 {
        let c = self.coeffs(x);
        c[1] + 2.0 * c[2] * x
    }
}

/// An open or closed polyline approximating an interface.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point2>,
    pub closed: bool,
}

impl Polyline {
    pub fn open(points: Vec<Point2>) -> Self {
        Polyline {
            points,
            closed: false,
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.points.len();
        let count = match (self.closed, n) {
            (_, 0) | (_, 1) => 0,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (i, (i + 1) % n))
    }

    pub fn max_segment_length(&self) -> f64 {
        self.segments()
            .map(|(a, b)| (self.points[b] - self.points[a]).norm())
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, p: &Point2) -> f64 {
        self.segments()
            .map(|(a, b)| distance_to_segment(p, &self.points[a], &self.points[b]))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when no two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        let segs: Vec<_> = self.segments().collect();
        for (i, &(a, b)) in segs.iter().enumerate() {
            for &(c, d) in segs.iter().skip(i + 1) {
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                if segments_intersect(
                    &self.points[a],
                    &self.points[b],
                    &self.points[c],
                    &self.points[d],
                ) {
                    return false;
                }
            }
        }
        true
    }

    /// Winding number of a closed polyline around `p`.
    pub fn winding_number(&self, p: &Point2) -> i32 {
        let mut winding = 0;
        for (i, j) in self.segments() {
            let a = self.points[i];
            let b = self.points[j];
            if a.y <= p.y {
                if b.y > p.y && signed_area(&a, &b, p) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && signed_area(&a, &b, p) < 0.0 {
                winding -= 1;
            }
        }
        winding
    }
}

fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let d1 = signed_area(c, d, a);
    let d2 = signed_area(c, d, b);
    let d3 = signed_area(a, b, c);
    let d4 = signed_area(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Analytic interface curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    Circle {
        center: Point2,
        radius: f64,
    },
    Ellipse {
        center: Point2,
        semi_x: f64,
        semi_y: f64,
    },
    /// `r(theta) = base + amplitude * sin(petals * theta)` in polar form.
    PolarFlower {
        center: Point2,
        base: f64,
        amplitude: f64,
        petals: f64,
    },
    Graph(GraphCurve),
    /// Region1 is `x < x0`.
    VerticalLine {
        x0: f64,
    },
}

impl Curve {
    pub fn is_closed(&self) -> bool {
        matches!(
            self,
            Curve::Circle { .. } | Curve::Ellipse { .. } | Curve::PolarFlower { .. }
        )
    }

    pub fn level_set(&self, p: &Point2) -> f64 {
        match *self {
            Curve::Circle { center, radius } => (p - center).norm() - radius,
            Curve::Ellipse {
                center,
                semi_x,
                semi_y,
            } => {
                let d = p - center;
                (d.x / semi_x).powi(2) + (d.y / semi_y).powi(2) - 1.0
            }
            Curve::PolarFlower {
                center,
                base,
                amplitude,
                petals,
            } => {
                let d = p - center;
                let r = d.norm();
                let theta = d.y.atan2(d.x);
                r - base - amplitude * (petals * theta).sin()
            }
            Curve::Graph(g) => p.y - g.value(p.x),
            Curve::VerticalLine { x0 } => x0 - p.x,
        }
    }

    pub fn level_set_gradient(&self, p: &Point2) -> Vector2 {
        match *self {
            Curve::Circle { center, .. } => {
                let d = p - center;
                let r = d.norm();
                if r == 0.0 {
                    Vector2::new(1.0, 0.0)
                } else {
                    d / r
                }
            }
            Curve::Ellipse {
                center,
                semi_x,
                semi_y,
            } => {
                let d = p - center;
                Vector2::new(2.0 * d.x / (semi_x * semi_x), 2.0 * d.y / (semi_y * semi_y))
            }
            Curve::PolarFlower {
                center,
                amplitude,
                petals,
                ..
            } => {
                let d = p - center;
                let r2 = d.norm_squared();
                let r = r2.sqrt();
                let theta = d.y.atan2(d.x);
                let dtheta = Vector2::new(-d.y / r2, d.x / r2);
                d / r - dtheta * (amplitude * petals * (petals * theta).cos())
            }
            Curve::Graph(g) => Vector2::new(-g.slope(p.x), 1.0),
            Curve::VerticalLine { .. } => Vector2::new(-1.0, 0.0),
        }
    }

    /// First-order distance estimate `|phi| / |grad phi|`.
    pub fn distance_estimate(&self, p: &Point2) -> f64 {
        let g = self.level_set_gradient(p).norm();
        self.level_set(p).abs() / g
    }

    pub fn region_of(&self, p: &Point2) -> RegionId {
        RegionId::from_level_set(self.level_set(p))
    }

    /// Moves `p` onto the curve: radially for circles, along x for vertical
    /// lines, along y for graphs, and by Newton iteration along the
    /// level-set gradient otherwise.
    pub fn project(&self, p: &Point2) -> Point2 {
        match *self {
            Curve::Circle { center, radius } => {
                let d = p - center;
                center + d * (radius / d.norm())
            }
            Curve::VerticalLine { x0 } => Point2::new(x0, p.y),
            Curve::Graph(ref g) => Point2::new(p.x, g.value(p.x)),
            _ => {
                let mut q = *p;
                for _ in 0..60 {
                    let phi = self.level_set(&q);
                    if phi == 0.0 {
                        break;
                    }
                    let g = self.level_set_gradient(&q);
                    let step = g * (phi / g.norm_squared());
                    q -= step;
                    if step.norm() <= 1e-17 * (1.0 + q.coords.norm()) {
                        break;
                    }
                }
                q
            }
        }
    }

    /// Point at parameter `t in [0, 2 pi)` on a closed curve.
    pub fn closed_point(&self, t: f64) -> Option<Point2> {
        match *self {
            Curve::Circle { center, radius } => {
                Some(center + Vector2::new(t.cos(), t.sin()) * radius)
            }
            Curve::Ellipse {
                center,
                semi_x,
                semi_y,
            } => Some(center + Vector2::new(semi_x * t.cos(), semi_y * t.sin())),
            Curve::PolarFlower {
                center,
                base,
                amplitude,
                petals,
            } => {
                let r = base + amplitude * (petals * t).sin();
                Some(center + Vector2::new(t.cos(), t.sin()) * r)
            }
            _ => None,
        }
    }

    /// `[x_start, x_end]` where the graph lies inside `domain`.
    fn graph_span(g: &GraphCurve, domain: &Rect) -> Option<(f64, f64)> {
        let inside = |x: f64| {
            let y = g.value(x);
            y >= domain.y_min - 1e-14 && y <= domain.y_max + 1e-14
        };
        let n = 4000;
        let xs: Vec<f64> = (0..=n)
            .map(|i| domain.x_min + domain.width() * i as f64 / n as f64)
            .collect();
        let first = xs.iter().position(|&x| inside(x))?;
        let last = xs.iter().rposition(|&x| inside(x))?;
        let bisect = |mut lo: f64, mut hi: f64, lo_inside: bool| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == lo_inside {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo_inside {
                lo
            } else {
                hi
            }
        };
        let start = if first == 0 {
            xs[0]
        } else {
            bisect(xs[first - 1], xs[first], false)
        };
        let end = if last == n {
            xs[n]
        } else {
            bisect(xs[last], xs[last + 1], true)
        };
        Some((start, end))
    }

    /// Samples the curve inside `domain`. Closed curves get `count` points
    /// uniformly in their parameter; open curves get at least `count`
    /// segments with the graph's split point kept as a vertex.
    pub fn sample(&self, domain: &Rect, count: usize) -> Polyline {
        let count = count.max(3);
        match *self {
            Curve::Circle { .. } | Curve::Ellipse { .. } | Curve::PolarFlower { .. } => {
                let points = (0..count)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / count as f64;
                        let p = self.closed_point(t).expect("closed curve");
                        self.project(&p)
                    })
                    .collect();
                Polyline {
                    points,
                    closed: true,
                }
            }
            Curve::VerticalLine { x0 } => {
                let points = (0..=count)
                    .map(|k| {
                        Point2::new(x0, domain.y_min + domain.height() * k as f64 / count as f64)
                    })
                    .collect();
                Polyline::open(points)
            }
            Curve::Graph(g) => {
                let Some((xa, xb)) = Self::graph_span(&g, domain) else {
                    return Polyline::open(Vec::new());
                };
                let arc = |a: f64, b: f64| {
                    let m = 256;
                    (0..m)
                        .map(|i| {
                            let x0 = a + (b - a) * i as f64 / m as f64;
                            let x1 = a + (b - a) * (i + 1) as f64 / m as f64;
                            (x1 - x0).hypot(g.value(x1) - g.value(x0))
                        })
                        .sum::<f64>()
                };
                let mut breaks = vec![xa];
                if g.split_x > xa && g.split_x < xb {
                    breaks.push(g.split_x);
                }
                breaks.push(xb);
                let total = arc(xa, xb);
                let mut points = vec![Point2::new(xa, g.value(xa))];
                for w in breaks.windows(2) {
                    let share = arc(w[0], w[1]) / total;
                    let n = ((count as f64 * share).ceil() as usize).max(1);
                    for i in 1..=n {
                        let x = if i == n {
                            w[1]
                        } else {
                            w[0] + (w[1] - w[0]) * i as f64 / n as f64
                        };
                        points.push(Point2::new(x, g.value(x)));
                    }
                }
                let tol = 1e-9 * domain.diameter();
                Polyline::open(points.iter().map(|p| domain.snap(p, tol)).collect())
            }
        }
    }

    /// Samples with at least `min_count` points, adding more until no chord
    /// exceeds `max_chord`.
    pub fn sample_max_chord(&self, domain: &Rect, min_count: usize, max_chord: f64) -> Polyline {
        let mut count = min_count
            .max((self.length(domain) / max_chord).ceil() as usize)
            .max(3);
        loop {
            let poly = self.sample(domain, count);
            if poly.max_segment_length() <= max_chord || count > 1 << 22 {
                return poly;
            }
            count = (count as f64 * 1.25).ceil() as usize;
        }
    }

    /// Arc length inside `domain` (numerical for non-circles).
    pub fn length(&self, domain: &Rect) -> f64 {
        match *self {
            Curve::Circle { radius, .. } => 2.0 * PI * radius,
            _ => {
                let poly = self.sample(domain, 8192);
                poly.segments()
                    .map(|(a, b)| (poly.points[b] - poly.points[a]).norm())
                    .sum()
            }
        }
    }
}
