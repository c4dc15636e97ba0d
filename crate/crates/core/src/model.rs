//! Trigonometry of the simply connected constant-curvature model surfaces.
//!
//! All formulas are implemented once against the unit-curvature models
//! (plane, unit sphere, unit hyperboloid); a curvature `kappa != 0` is
//! handled by rescaling lengths by `sqrt(|kappa|)` on the way in and
//! back on the way out. Chart coordinates follow the same convention:
//! the plane is embedded as `(x, y, 0)`, positive curvature uses unit
//! vectors on the sphere, negative curvature uses the upper sheet of
//! the unit hyperboloid with the Minkowski form `x^2 + y^2 - z^2`.

use thiserror::Error;

use crate::tol::SMALL_SIDE_THRESHOLD;

/// Errors from model-space constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("curvature must be finite, got {0}")]
    NonFiniteCurvature(f64),
    #[error("side length must be positive and finite, got {0}")]
    DegenerateSide(f64),
    #[error("sides ({a}, {b}, {c}) violate the strict triangle inequality")]
    TriangleInequality { a: f64, b: f64, c: f64 },
    #[error(
        "sides ({a}, {b}, {c}) too large for curvature {kappa}: \
         each side must be < pi/sqrt(kappa) and the perimeter < 2 pi/sqrt(kappa)"
    )]
    SphericalSizeBound { a: f64, b: f64, c: f64, kappa: f64 },
    #[error("angle {0} outside the open interval (0, pi)")]
    AngleOutOfRange(f64),
    #[error("parameter {0} outside [0, 1]")]
    ParamOutOfRange(f64),
}

/// Curvature of a model surface. Any finite value, any sign.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Curvature(f64);

impl Curvature {
    /// The flat model (Euclidean plane).
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(kappa: f64) -> Result<Self, GeometryError> {
        if !kappa.is_finite() {
            return Err(GeometryError::NonFiniteCurvature(kappa));
        }
        Ok(Curvature(kappa))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `sqrt(|kappa|)`, the length scale between surface units and the
    /// unit-curvature model.
    pub fn scale(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Curvature after a global homothety of factor `s`: lengths map to
    /// `s * length`, curvature to `kappa / s^2`.
    pub fn rescaled(self, s: f64) -> Curvature {
        Curvature(self.0 / (s * s))
    }
}

/// A geodesic triangle in the curvature-`kappa` model, given by its
/// three side lengths. Side `a` is opposite vertex `A`, and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTriangle {
    kappa: Curvature,
    sides: [f64; 3],
}

/// Validates that three lengths bound a nondegenerate geodesic triangle
/// in the curvature-`kappa` model.
pub fn validate_sides(kappa: Curvature, a: f64, b: f64, c: f64) -> Result<(), GeometryError> {
    for &s in &[a, b, c] {
        if !(s.is_finite() && s > 0.0) {
            return Err(GeometryError::DegenerateSide(s));
        }
    }
    if a >= b + c || b >= a + c || c >= a + b {
        return Err(GeometryError::TriangleInequality { a, b, c });
    }
    let k = kappa.get();
    if k > 0.0 {
        let bound = std::f64::consts::PI / k.sqrt();
        if a >= bound || b >= bound || c >= bound || a + b + c >= 2.0 * bound {
            return Err(GeometryError::SphericalSizeBound { a, b, c, kappa: k });
        }
    }
    Ok(())
}

impl ModelTriangle {
    pub fn new(kappa: Curvature, a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        validate_sides(kappa, a, b, c)?;
        Ok(ModelTriangle {
            kappa,
            sides: [a, b, c],
        })
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn sides(&self) -> [f64; 3] {
        self.sides
    }

    pub fn a(&self) -> f64 {
        self.sides[0]
    }

    pub fn b(&self) -> f64 {
        self.sides[1]
    }

    pub fn c(&self) -> f64 {
        self.sides[2]
    }

    /// Interior angles `[at A, at B, at C]`.
    pub fn angles(&self) -> [f64; 3] {
        let [a, b, c] = self.sides;
        [
            angle_unchecked(self.kappa, a, b, c),
            angle_unchecked(self.kappa, b, c, a),
            angle_unchecked(self.kappa, c, a, b),
        ]
    }

    /// Area of the triangle: Heron's formula for the flat model, the
    /// angle excess divided by the curvature otherwise.
    pub fn area(&self) -> f64 {
        let k = self.kappa.get();
        if k == 0.0 {
            stable_heron(self.sides)
        } else {
            let [alpha, beta, gamma] = self.angles();
            (alpha + beta + gamma - std::f64::consts::PI) / k
        }
    }

    /// Embeds the triangle in the standard chart of its model surface.
    pub fn chart(&self) -> ChartTriangle {
        let [a, b, c] = self.sides;
        let alpha = angle_unchecked(self.kappa, a, b, c);
        let va = chart_origin(self.kappa);
        let vb = polar_chart_point(self.kappa, c, 0.0);
        let vc = polar_chart_point(self.kappa, b, alpha);
        ChartTriangle {
            kappa: self.kappa,
            vertices: [va, vb, vc],
        }
    }
}

/// Interior angle between the two adjacent sides, from the law of
/// cosines of the matching model. The result lies in `(0, pi)`.
///
/// `opposite` is the side facing the requested angle; `adj1`, `adj2`
/// are the sides meeting at it.
pub fn angle_from_sides(
    kappa: Curvature,
    opposite: f64,
    adj1: f64,
    adj2: f64,
) -> Result<f64, GeometryError> {
    validate_sides(kappa, opposite, adj1, adj2)?;
    Ok(angle_unchecked(kappa, opposite, adj1, adj2))
}

/// Comparison angle at the middle point `b`: the angle at the vertex
/// corresponding to `b` in the model triangle with the same three
/// pairwise distances.
pub fn comparison_angle(
    kappa: Curvature,
    d_ab: f64,
    d_bc: f64,
    d_ac: f64,
) -> Result<f64, GeometryError> {
    angle_from_sides(kappa, d_ac, d_ab, d_bc)
}

/// Area of `t`; see [`ModelTriangle::area`].
pub fn triangle_area(t: &ModelTriangle) -> f64 {
    t.area()
}

/// Heron area of the Euclidean triangle with the given side lengths.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    validate_sides(Curvature::FLAT, a, b, c)?;
    Ok(stable_heron([a, b, c]))
}

/// Sum of the three angles minus pi. Negative for hyperbolic triangles.
pub fn angle_excess(alpha: f64, beta: f64, gamma: f64) -> Result<f64, GeometryError> {
    for &x in &[alpha, beta, gamma] {
        if !(x.is_finite() && x > 0.0 && x < std::f64::consts::PI) {
            return Err(GeometryError::AngleOutOfRange(x));
        }
    }
    Ok(alpha + beta + gamma - std::f64::consts::PI)
}

fn angle_unchecked(kappa: Curvature, opposite: f64, adj1: f64, adj2: f64) -> f64 {
    let k = kappa.get();
    if k == 0.0 {
        let cos = (adj1 * adj1 + adj2 * adj2 - opposite * opposite) / (2.0 * adj1 * adj2);
        return cos.clamp(-1.0, 1.0).acos();
    }
    let scale = kappa.scale();
    let (a, b, c) = (opposite * scale, adj1 * scale, adj2 * scale);
    let small = a.max(b).max(c) < SMALL_SIDE_THRESHOLD;
    if k > 0.0 {
        if small {
            // Half-angle form: immune to the cancellation in
            // cos a - cos b cos c when all sides are tiny.
            let s = 0.5 * (a + b + c);
            let num = (s - b).sin() * (s - c).sin();
            let den = s.sin() * (s - a).sin();
            2.0 * num.max(0.0).sqrt().atan2(den.max(0.0).sqrt())
        } else {
            let cos = (a.cos() - b.cos() * c.cos()) / (b.sin() * c.sin());
            cos.clamp(-1.0, 1.0).acos()
        }
    } else if small {
        let s = 0.5 * (a + b + c);
        let num = (s - b).sinh() * (s - c).sinh();
        let den = s.sinh() * (s - a).sinh();
        2.0 * num.max(0.0).sqrt().atan2(den.max(0.0).sqrt())
    } else {
        let cos = (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh());
        cos.clamp(-1.0, 1.0).acos()
    }
}

// Kahan's numerically stable variant of Heron's formula.
fn stable_heron(sides: [f64; 3]) -> f64 {
    let mut s = sides;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [a, b, c] = s;
    let t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * t.max(0.0).sqrt()
}

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

/// A point in the standard chart of the model surface.
pub type ChartPoint = [f64; 3];

/// A triangle embedded in its model chart: vertex `A` at the chart
/// origin, `B` along the reference direction at distance `c`, `C`
/// placed with positive orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartTriangle {
    pub kappa: Curvature,
    pub vertices: [ChartPoint; 3],
}

impl ChartTriangle {
    /// Pairwise chart distances, in the `[a, b, c]` side order.
    pub fn side_lengths(&self) -> [f64; 3] {
        let [va, vb, vc] = self.vertices;
        [
            chart_distance(self.kappa, vb, vc),
            chart_distance(self.kappa, vc, va),
            chart_distance(self.kappa, va, vb),
        ]
    }

    /// Whether `p` lies inside (or on the boundary of) the triangle.
    pub fn contains(&self, p: ChartPoint) -> bool {
        let [va, vb, vc] = self.vertices;
        if self.kappa.get() == 0.0 {
            let s0 = cross2(sub(vb, va), sub(p, va));
            let s1 = cross2(sub(vc, vb), sub(p, vb));
            let s2 = cross2(sub(va, vc), sub(p, vc));
            let scale = 1.0 + norm(p);
            s0 >= -1e-12 * scale && s1 >= -1e-12 * scale && s2 >= -1e-12 * scale
        } else {
            // Geodesics are central-plane sections in both curved
            // models, so half-space tests reduce to determinant signs.
            det3(va, vb, p) >= -1e-12 && det3(vb, vc, p) >= -1e-12 && det3(vc, va, p) >= -1e-12
        }
    }
}

/// Embeds a triangle in its model chart; see [`ModelTriangle::chart`].
pub fn chart_embed(t: &ModelTriangle) -> ChartTriangle {
    t.chart()
}

pub(crate) fn chart_origin(kappa: Curvature) -> ChartPoint {
    if kappa.get() == 0.0 {
        [0.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    }
}

/// Chart point at distance `r` from the origin, at angle `psi` from the
/// reference direction.
pub(crate) fn polar_chart_point(kappa: Curvature, r: f64, psi: f64) -> ChartPoint {
    let k = kappa.get();
    if k == 0.0 {
        [r * psi.cos(), r * psi.sin(), 0.0]
    } else {
        let rr = r * kappa.scale();
        if k > 0.0 {
            [rr.sin() * psi.cos(), rr.sin() * psi.sin(), rr.cos()]
        } else {
            [rr.sinh() * psi.cos(), rr.sinh() * psi.sin(), rr.cosh()]
        }
    }
}

/// Distance between two chart points, in surface units.
pub fn chart_distance(kappa: Curvature, p: ChartPoint, q: ChartPoint) -> f64 {
    let k = kappa.get();
    if k == 0.0 {
        norm(sub(p, q))
    } else if k > 0.0 {
        // 2 atan2(|p-q|, |p+q|) is accurate at both ends of [0, pi].
        2.0 * norm(sub(p, q)).atan2(norm(add(p, q))) / kappa.scale()
    } else {
        let d = sub(p, q);
        let m = (mdot(d, d)).max(0.0);
        2.0 * (0.5 * m.sqrt()).asinh() / kappa.scale()
    }
}

/// Unit tangent vector at `p` pointing along the geodesic toward `q`.
pub(crate) fn tangent_toward(kappa: Curvature, p: ChartPoint, q: ChartPoint) -> ChartPoint {
    let k = kappa.get();
    if k == 0.0 {
        let d = sub(q, p);
        scale_vec(d, 1.0 / norm(d))
    } else if k > 0.0 {
        let theta = chart_distance(kappa, p, q) * kappa.scale();
        let u = sub(q, scale_vec(p, theta.cos()));
        scale_vec(u, 1.0 / theta.sin())
    } else {
        let theta = chart_distance(kappa, p, q) * kappa.scale();
        let u = sub(q, scale_vec(p, theta.cosh()));
        scale_vec(u, 1.0 / theta.sinh())
    }
}

/// Chart point at arclength `r` from `p` along the unit tangent `u`.
pub(crate) fn point_at(kappa: Curvature, p: ChartPoint, u: ChartPoint, r: f64) -> ChartPoint {
    let k = kappa.get();
    if k == 0.0 {
        add(p, scale_vec(u, r))
    } else {
        let rr = r * kappa.scale();
        if k > 0.0 {
            add(scale_vec(p, rr.cos()), scale_vec(u, rr.sin()))
        } else {
            add(scale_vec(p, rr.cosh()), scale_vec(u, rr.sinh()))
        }
    }
}

/// Point at arclength `s` from `p` along the geodesic from `p` to `q`,
/// in chart coordinates.
pub fn geodesic_point(kappa: Curvature, p: ChartPoint, q: ChartPoint, s: f64) -> ChartPoint {
    if s == 0.0 {
        return p;
    }
    point_at(kappa, p, tangent_toward(kappa, p, q), s)
}

/// Inner product of tangent vectors at a common base point.
pub(crate) fn tangent_dot(kappa: Curvature, u: ChartPoint, v: ChartPoint) -> f64 {
    if kappa.get() < 0.0 {
        mdot(u, v)
    } else {
        dot(u, v)
    }
}

/// Third side of a model triangle from two sides and the included angle.
pub fn side_from_angle(kappa: Curvature, r1: f64, r2: f64, gamma: f64) -> f64 {
    let k = kappa.get();
    if k == 0.0 {
        let d2 = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * gamma.cos();
        d2.max(0.0).sqrt()
    } else {
        let s = kappa.scale();
        let (a, b) = (r1 * s, r2 * s);
        if k > 0.0 {
            let cos = a.cos() * b.cos() + a.sin() * b.sin() * gamma.cos();
            cos.clamp(-1.0, 1.0).acos() / s
        } else {
            let cosh = a.cosh() * b.cosh() - a.sinh() * b.sinh() * gamma.cos();
            cosh.max(1.0).acosh() / s
        }
    }
}

// ---------------------------------------------------------------------------
// Distance between points interpolated along two sides of a triangle
// ---------------------------------------------------------------------------

/// Distance between two points placed along the sides emanating from a
/// common vertex `a` of a model triangle.
///
/// The triangle has `d(a, b) = ab`, `d(a, c) = ac` and `d(b, c) =
/// opposite`; the first point sits on the side `ab` at arclength
/// `s * ab` from `a`, the second on `ac` at `t * ac`.
pub fn side_point_distance(
    kappa: Curvature,
    opposite: f64,
    ab: f64,
    ac: f64,
    s: f64,
    t: f64,
) -> Result<f64, GeometryError> {
    for &x in &[s, t] {
        if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
            return Err(GeometryError::ParamOutOfRange(x));
        }
    }
    // Standard side order: side c = d(A, B), side b = d(A, C).
    let tri = ModelTriangle::new(kappa, opposite, ac, ab)?;
    let chart = tri.chart();
    let [va, vb, vc] = chart.vertices;
    let p = geodesic_point(kappa, va, vb, s * ab);
    let q = geodesic_point(kappa, va, vc, t * ac);
    Ok(chart_distance(kappa, p, q))
}

/// Ratios of the curved to the flat interpolated distance on scaled
/// copies of a triangle, one entry per scale factor in `deltas`.
pub fn side_point_ratios(
    kappa: Curvature,
    opposite: f64,
    ab: f64,
    ac: f64,
    s: f64,
    t: f64,
    deltas: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    let mut out = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let curved = side_point_distance(kappa, d * opposite, d * ab, d * ac, s, t)?;
        let flat = side_point_distance(Curvature::FLAT, d * opposite, d * ab, d * ac, s, t)?;
        out.push(curved / flat);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Small vector helpers
// ---------------------------------------------------------------------------

pub(crate) fn add(p: ChartPoint, q: ChartPoint) -> ChartPoint {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

pub(crate) fn sub(p: ChartPoint, q: ChartPoint) -> ChartPoint {
    [p[0] - q[0], p[1] - q[1], p[2] - q[2]]
}

pub(crate) fn scale_vec(p: ChartPoint, s: f64) -> ChartPoint {
    [p[0] * s, p[1] * s, p[2] * s]
}

pub(crate) fn dot(p: ChartPoint, q: ChartPoint) -> f64 {
    p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
}

pub(crate) fn mdot(p: ChartPoint, q: ChartPoint) -> f64 {
    p[0] * q[0] + p[1] * q[1] - p[2] * q[2]
}

pub(crate) fn norm(p: ChartPoint) -> f64 {
    dot(p, p).sqrt()
}

fn cross2(u: ChartPoint, v: ChartPoint) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

pub(crate) fn det3(a: ChartPoint, b: ChartPoint, c: ChartPoint) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}
