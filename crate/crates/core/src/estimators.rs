//! Triangle-excess curvature estimators on polyhedral surfaces.
//!
//! A geodesic triangle's excess (angle sum minus pi) divided by the
//! area of the flat triangle with the same side lengths estimates the
//! curvature near a point. Around a chosen base point, triangles are
//! sampled with vertices at controlled distances in spread directions,
//! side lengths are measured through the Steiner-graph metric, and
//! vertex angles are measured by comparison angles at shrinking probe
//! distances with one Richardson extrapolation step.
//!
//! The base point's neighborhood is charted explicitly: a vertex anchor
//! gets a cone chart over its full corner fan, an interior or edge
//! anchor gets its host triangle with the three neighbors unfolded
//! across the shared edges. Samples whose sides would run through a
//! cone point, or that fail the diameter, angle-floor or interior
//! conditions, are rejected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    angle_excess, angle_from_sides, chart_distance, chart_origin, geodesic_point, heron_area,
    point_at, polar_chart_point, tangent_dot, tangent_toward, ChartPoint, Curvature, GeometryError,
    ModelTriangle,
};
use crate::polyhedron::KPolyhedron;
use crate::surface::{build_metric_graph, MetricGraph, SurfaceError, SurfacePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("scale {delta} exceeds the injectivity heuristic {bound} (min edge / 4)")]
    ScaleTooLarge { delta: f64, bound: f64 },
    #[error("sampling produced {accepted} of {requested} triangles in {attempts} attempts")]
    InsufficientSamples {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },
    #[error("scale sequence must be nonempty and strictly decreasing")]
    BadScaleSequence,
    #[error("angle floor {0} must lie in [0, pi/3)")]
    BadAngleFloor(f64),
}

/// A measured geodesic triangle around a base point.
#[derive(Debug, Clone)]
pub struct TriangleSample {
    pub vertices: [SurfacePoint; 3],
    /// Measured side lengths, `sides[i]` opposite `vertices[i]`.
    pub sides: [f64; 3],
    /// Measured interior angles, `angles[i]` at `vertices[i]`.
    pub angles: [f64; 3],
    pub contains_x: bool,
    pub min_angle: f64,
    pub diam: f64,
}

/// Excess over flat-comparison area: `e0 / sigma0` of a sample.
pub fn excess_ratio(sample: &TriangleSample) -> Result<f64, EstimatorError> {
    let [alpha, beta, gamma] = sample.angles;
    let excess = angle_excess(alpha, beta, gamma)?;
    let sigma = heron_area(sample.sides[0], sample.sides[1], sample.sides[2])?;
    Ok(excess / sigma)
}

/// Exact model-space ratio: excess over the true model area of the
/// triangle with the given sides. Identically `kappa` when `kappa != 0`.
pub fn model_ratio(kappa: Curvature, a: f64, b: f64, c: f64) -> Result<f64, EstimatorError> {
    let tri = ModelTriangle::new(kappa, a, b, c)?;
    let [alpha, beta, gamma] = tri.angles();
    Ok(angle_excess(alpha, beta, gamma)? / tri.area())
}

// ---------------------------------------------------------------------------
// Local charts around the base point
// ---------------------------------------------------------------------------

// Model isometry between chart placements, built from orthonormal
// frames (point, tangent, normal tangent).
#[derive(Debug, Clone)]
enum Isometry {
    Planar { lin: [[f64; 2]; 2], trans: [f64; 2] },
    Linear { m: [[f64; 3]; 3] },
}

impl Isometry {
    fn apply(&self, p: ChartPoint) -> ChartPoint {
        match self {
            Isometry::Planar { lin, trans } => [
                lin[0][0] * p[0] + lin[0][1] * p[1] + trans[0],
                lin[1][0] * p[0] + lin[1][1] * p[1] + trans[1],
                0.0,
            ],
            Isometry::Linear { m } => [
                m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
                m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
                m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
            ],
        }
    }
}

type Frame = (ChartPoint, ChartPoint, ChartPoint);

fn isometry_from_frames(kappa: Curvature, from: Frame, to: Frame) -> Isometry {
    let k = kappa.get();
    if k == 0.0 {
        let (p, u, w) = from;
        let (p2, u2, w2) = to;
        // lin = [u2 w2] [u w]^T  (2x2 orthogonal), trans = p2 - lin p
        let lin = [
            [u2[0] * u[0] + w2[0] * w[0], u2[0] * u[1] + w2[0] * w[1]],
            [u2[1] * u[0] + w2[1] * w[0], u2[1] * u[1] + w2[1] * w[1]],
        ];
        let trans = [
            p2[0] - (lin[0][0] * p[0] + lin[0][1] * p[1]),
            p2[1] - (lin[1][0] * p[0] + lin[1][1] * p[1]),
        ];
        Isometry::Planar { lin, trans }
    } else if k > 0.0 {
        // rotation/reflection sending the orthonormal triple across
        let (p, u, w) = from;
        let (p2, u2, w2) = to;
        let mut m = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = p2[r] * p[c] + u2[r] * u[c] + w2[r] * w[c];
            }
        }
        Isometry::Linear { m }
    } else {
        // Lorentz map: F2 G F1^T G with columns (u, w, p)
        let (p, u, w) = from;
        let (p2, u2, w2) = to;
        let g = [1.0, 1.0, -1.0];
        let mut m = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = (u2[r] * u[c] + w2[r] * w[c] - p2[r] * p[c]) * g[c];
            }
        }
        Isometry::Linear { m }
    }
}

// Unit tangent at `p` orthogonal to `u`, pointing to the side of `hint`.
fn ortho_tangent(kappa: Curvature, p: ChartPoint, u: ChartPoint, hint: ChartPoint) -> ChartPoint {
    let toward = tangent_toward(kappa, p, hint);
    let proj = tangent_dot(kappa, u, toward);
    let raw = [
        toward[0] - proj * u[0],
        toward[1] - proj * u[1],
        toward[2] - proj * u[2],
    ];
    let n = tangent_dot(kappa, raw, raw).sqrt();
    [raw[0] / n, raw[1] / n, raw[2] / n]
}

// Whether `p` lies inside the model triangle `tri` (any orientation).
fn point_in_model_triangle(kappa: Curvature, tri: [ChartPoint; 3], p: ChartPoint) -> bool {
    let mut signs = [0.0; 3];
    for i in 0..3 {
        let (a, b) = (tri[i], tri[(i + 1) % 3]);
        signs[i] = if kappa.get() == 0.0 {
            (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        } else {
            crate::model::det3(a, b, p)
        };
    }
    let tol = 1e-14;
    signs.iter().all(|&s| s >= -tol) || signs.iter().all(|&s| s <= tol)
}

/// A polar chart around a vertex class: the corner fan laid out by
/// accumulated angle. Total angle `2 pi - omega`.
struct ConeChart {
    kappa: Curvature,
    total_angle: f64,
    sectors: Vec<Sector>,
    /// Radius of a metric ball around the apex that stays inside the
    /// corner fan; chart distances are exact within it.
    star_radius: f64,
}

struct Sector {
    tri: usize,
    corner: usize,
    psi_start: f64,
    angle: f64,
    corner_pos: ChartPoint,
    enter_dir: ChartPoint,
    ortho_dir: ChartPoint,
}

impl ConeChart {
    fn new(poly: &KPolyhedron, class: usize) -> Self {
        let kappa = poly.kappa();
        let slots = &poly.vertex_classes()[class];
        let start = slots[0];
        let mut sectors = Vec::with_capacity(slots.len());
        let mut psi = 0.0;
        // Walk the corner fan, crossing alternate flanks; the sector
        // entered through a flank spans that corner's angle from the
        // entering edge direction.
        let (mut tri, mut corner) = start;
        let mut cross_out = true;
        loop {
            let chart = poly.chart(tri);
            let pos = chart.vertices[corner];
            let angle = poly.corner_angle(tri, corner);
            // entering flank: the one we are NOT about to cross
            let enter_edge_target = if cross_out {
                (corner + 2) % 3 // entered via the incoming flank
            } else {
                (corner + 1) % 3 // entered via the outgoing flank
            };
            let other_target = if cross_out {
                (corner + 1) % 3
            } else {
                (corner + 2) % 3
            };
            let enter_dir = tangent_toward(kappa, pos, chart.vertices[enter_edge_target]);
            let ortho_dir = ortho_tangent(kappa, pos, enter_dir, chart.vertices[other_target]);
            sectors.push(Sector {
                tri,
                corner,
                psi_start: psi,
                angle,
                corner_pos: pos,
                enter_dir,
                ortho_dir,
            });
            psi += angle;

            let (edge, at_start) = if cross_out {
                (corner, true)
            } else {
                ((corner + 2) % 3, false)
            };
            let ((t2, e2), reversed) = poly.partner(tri, edge);
            let landing = if at_start == reversed {
                (e2 + 1) % 3
            } else {
                e2
            };
            cross_out = landing != e2;
            tri = t2;
            corner = landing;
            if (tri, corner) == start || sectors.len() >= slots.len() {
                break;
            }
        }
        debug_assert!((psi - poly.total_angle(class)).abs() < 1e-9);

        // smallest distance from the apex to an opposite edge of the fan
        let mut star_radius = f64::INFINITY;
        for s in &sectors {
            let chart = poly.chart(s.tri);
            let (p, q) = (
                chart.vertices[(s.corner + 1) % 3],
                chart.vertices[(s.corner + 2) % 3],
            );
            let len = chart_distance(kappa, p, q);
            for step in 0..=10 {
                let u = geodesic_point(kappa, p, q, len * step as f64 / 10.0);
                star_radius = star_radius.min(chart_distance(kappa, s.corner_pos, u));
            }
        }
        ConeChart {
            kappa,
            total_angle: psi,
            sectors,
            star_radius,
        }
    }

    fn wrap(&self, psi: f64) -> f64 {
        let t = self.total_angle;
        let mut p = psi % t;
        if p < 0.0 {
            p += t;
        }
        p
    }

    /// Chart position of the polar point `(r, psi)`, with its sector's
    /// triangle id.
    fn place(&self, r: f64, psi: f64) -> (usize, ChartPoint) {
        let psi = self.wrap(psi);
        let ix = self
            .sectors
            .iter()
            .rposition(|s| s.psi_start <= psi + 1e-15)
            .unwrap_or(0);
        let s = &self.sectors[ix];
        let beta = (psi - s.psi_start).clamp(0.0, s.angle);
        let dir = [
            s.enter_dir[0] * beta.cos() + s.ortho_dir[0] * beta.sin(),
            s.enter_dir[1] * beta.cos() + s.ortho_dir[1] * beta.sin(),
            s.enter_dir[2] * beta.cos() + s.ortho_dir[2] * beta.sin(),
        ];
        (s.tri, point_at(self.kappa, s.corner_pos, dir, r))
    }

    /// Angular separation along the cone, folded to the short way.
    fn separation(&self, psi1: f64, psi2: f64) -> f64 {
        let raw = (self.wrap(psi1) - self.wrap(psi2)).abs();
        raw.min(self.total_angle - raw)
    }

    /// Exact cone distance between two polar points whose radii stay
    /// inside the star; `None` when the geodesic would cross the apex
    /// or leave the fan.
    fn distance(&self, p1: (f64, f64), p2: (f64, f64)) -> Option<f64> {
        let (r1, psi1) = p1;
        let (r2, psi2) = p2;
        if r1.max(r2) > 0.95 * self.star_radius {
            return None;
        }
        let sep = self.separation(psi1, psi2);
        if sep >= std::f64::consts::PI {
            return None;
        }
        Some(crate::model::side_from_angle(self.kappa, r1, r2, sep))
    }

    /// Polar coordinates of the point at arclength `arc` from `p1`
    /// along the cone geodesic toward `p2` (which must subtend less
    /// than pi).
    fn side_point(&self, p1: (f64, f64), p2: (f64, f64), arc: f64) -> (f64, f64) {
        let (r1, psi1) = p1;
        let (r2, psi2) = p2;
        let mut diff = self.wrap(psi2) - self.wrap(psi1);
        if diff > self.total_angle / 2.0 {
            diff -= self.total_angle;
        } else if diff < -self.total_angle / 2.0 {
            diff += self.total_angle;
        }
        let u1 = polar_chart_point(self.kappa, r1, 0.0);
        let u2 = polar_chart_point(self.kappa, r2, diff.abs());
        let u = geodesic_point(self.kappa, u1, u2, arc);
        let r = chart_distance(self.kappa, chart_origin(self.kappa), u);
        let rel = u[1].atan2(u[0]).max(0.0);
        (r, self.wrap(psi1 + diff.signum() * rel))
    }
}

/// The host triangle of an interior anchor with its three neighbors
/// unfolded into the host's chart coordinates.
struct PatchChart<'a> {
    poly: &'a KPolyhedron,
    entries: Vec<PatchEntry>,
}

struct PatchEntry {
    tri: usize,
    vertices_host: [ChartPoint; 3],
    // maps host-chart coordinates into this triangle's own chart;
    // None for the host itself
    to_canonical: Option<Isometry>,
}

impl<'a> PatchChart<'a> {
    fn new(poly: &'a KPolyhedron, host: usize) -> Self {
        let kappa = poly.kappa();
        let host_chart = poly.chart(host);
        let mut entries = vec![PatchEntry {
            tri: host,
            vertices_host: host_chart.vertices,
            to_canonical: None,
        }];
        for edge in 0..3 {
            let ((t2, e2), reversed) = poly.partner(host, edge);
            // frame on the host edge, normal pointing away from the host
            let s1 = host_chart.vertices[edge];
            let e1 = host_chart.vertices[(edge + 1) % 3];
            let far1 = host_chart.vertices[(edge + 2) % 3];
            // frame on the partner edge in its own chart, normal into it
            let chart2 = poly.chart(t2);
            let s2 = chart2.vertices[e2];
            let e2p = chart2.vertices[(e2 + 1) % 3];
            let far2 = chart2.vertices[(e2 + 2) % 3];
            let u2 = tangent_toward(kappa, s2, e2p);
            let w2 = ortho_tangent(kappa, s2, u2, far2);
            let (p1, u1) = if reversed {
                (e1, tangent_toward(kappa, e1, s1))
            } else {
                (s1, tangent_toward(kappa, s1, e1))
            };
            let w_in = ortho_tangent(kappa, p1, u1, far1);
            let w1 = [-w_in[0], -w_in[1], -w_in[2]];
            // host -> canonical: frames swap roles
            let to_canonical = isometry_from_frames(kappa, (p1, u1, w1), (s2, u2, w2));
            let from_canonical = isometry_from_frames(kappa, (s2, u2, w2), (p1, u1, w1));
            let vertices_host = [
                from_canonical.apply(chart2.vertices[0]),
                from_canonical.apply(chart2.vertices[1]),
                from_canonical.apply(chart2.vertices[2]),
            ];
            entries.push(PatchEntry {
                tri: t2,
                vertices_host,
                to_canonical: Some(to_canonical),
            });
        }
        PatchChart { poly, entries }
    }

    /// Resolves a host-chart position to the triangle that contains it.
    fn locate(&self, pos: ChartPoint) -> Option<(usize, ChartPoint)> {
        for entry in &self.entries {
            let canonical = match &entry.to_canonical {
                None => pos,
                Some(iso) => iso.apply(pos),
            };
            if self.poly.chart(entry.tri).contains(canonical) {
                return Some((entry.tri, canonical));
            }
        }
        None
    }

    /// Corner positions of all patch triangles in host coordinates.
    fn corners(&self) -> Vec<ChartPoint> {
        self.entries.iter().flat_map(|e| e.vertices_host).collect()
    }

    /// Exact patch distance between two host-chart positions, provided
    /// the connecting segment stays inside the unfolded patch.
    fn distance(&self, p: ChartPoint, q: ChartPoint) -> Option<f64> {
        let kappa = self.poly.kappa();
        let d = chart_distance(kappa, p, q);
        for step in 1..5 {
            let u = geodesic_point(kappa, p, q, d * step as f64 / 5.0);
            self.locate(u)?;
        }
        Some(d)
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

enum AnchorChart<'a> {
    Cone(ConeChart),
    Patch {
        chart: PatchChart<'a>,
        pos: ChartPoint,
        u0: ChartPoint,
        w0: ChartPoint,
    },
}

fn anchor_chart<'a>(
    poly: &'a KPolyhedron,
    x: &SurfacePoint,
) -> Result<AnchorChart<'a>, EstimatorError> {
    let kappa = poly.kappa();
    match *x {
        SurfacePoint::Vertex(class) => {
            if class >= poly.num_vertices() {
                return Err(SurfaceError::UnknownVertex(class).into());
            }
            Ok(AnchorChart::Cone(ConeChart::new(poly, class)))
        }
        SurfacePoint::Interior { tri, chart } => {
            if tri >= poly.num_triangles() {
                return Err(SurfaceError::TriangleOutOfRange(tri).into());
            }
            if !poly.chart(tri).contains(chart) {
                return Err(SurfaceError::PointOutsideTriangle(chart, tri).into());
            }
            let u0 = tangent_toward(kappa, chart, poly.chart(tri).vertices[0]);
            let w0 = ortho_tangent(kappa, chart, u0, poly.chart(tri).vertices[1]);
            Ok(AnchorChart::Patch {
                chart: PatchChart::new(poly, tri),
                pos: chart,
                u0,
                w0,
            })
        }
        SurfacePoint::Edge { tri, edge, param } => {
            if tri >= poly.num_triangles() || edge >= 3 {
                return Err(SurfaceError::TriangleOutOfRange(tri).into());
            }
            if !(param > 0.0 && param < 1.0) {
                return Err(SurfaceError::EdgeParamOutOfRange(param).into());
            }
            let chart = poly.chart(tri);
            let pos = geodesic_point(
                kappa,
                chart.vertices[edge],
                chart.vertices[(edge + 1) % 3],
                param * poly.edge_length(tri, edge),
            );
            let u0 = tangent_toward(kappa, pos, chart.vertices[(edge + 1) % 3]);
            let w0 = ortho_tangent(kappa, pos, u0, chart.vertices[(edge + 2) % 3]);
            Ok(AnchorChart::Patch {
                chart: PatchChart::new(poly, tri),
                pos,
                u0,
                w0,
            })
        }
    }
}

/// Samples up to `n` geodesic triangles around `x`: vertices at
/// distance in `[delta/4, delta/2]` from `x` in spread directions,
/// kept only when the diameter stays below `delta`, every measured
/// angle reaches the floor `a`, `x` is interior, and no side runs
/// through a cone point. Side lengths come from the resolution-`m`
/// graph metric; angles from model comparison angles at probe
/// distances `delta/8` and `delta/16` with one Richardson step.
///
/// The random stream is keyed by `(seed, attempt index)`, so results
/// are independent of evaluation order.
pub fn sample_triangles(
    poly: &KPolyhedron,
    x: &SurfacePoint,
    delta: f64,
    a: f64,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<TriangleSample>, EstimatorError> {
    let bound = injectivity_bound(poly);
    if !(delta > 0.0 && delta <= bound) {
        return Err(EstimatorError::ScaleTooLarge { delta, bound });
    }
    if !(0.0..std::f64::consts::FRAC_PI_3).contains(&a) {
        return Err(EstimatorError::BadAngleFloor(a));
    }
    assert!(n >= 1);
    let chart = anchor_chart(poly, x)?;
    let graph = build_metric_graph(poly, m);

    let attempts = 8 * n;
    let mut out = Vec::with_capacity(n);
    for attempt in 0..attempts {
        if out.len() == n {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        if let Some(sample) = try_sample(poly, &chart, &graph, delta, a, &mut rng)? {
            out.push(sample);
        }
    }
    if out.is_empty() {
        return Err(EstimatorError::InsufficientSamples {
            requested: n,
            accepted: 0,
            attempts,
        });
    }
    Ok(out)
}

fn injectivity_bound(poly: &KPolyhedron) -> f64 {
    let mut min_edge = f64::INFINITY;
    for t in 0..poly.num_triangles() {
        for e in 0..3 {
            min_edge = min_edge.min(poly.edge_length(t, e));
        }
    }
    min_edge / 4.0
}

fn try_sample(
    poly: &KPolyhedron,
    chart: &AnchorChart,
    graph: &MetricGraph,
    delta: f64,
    floor: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<TriangleSample>, EstimatorError> {
    let kappa = poly.kappa();
    let span = match chart {
        AnchorChart::Cone(c) => c.total_angle,
        AnchorChart::Patch { .. } => 2.0 * std::f64::consts::PI,
    };
    let base: f64 = rng.gen_range(0.0..span);
    let mut psis = [0.0; 3];
    let mut radii = [0.0; 3];
    for i in 0..3 {
        let jitter: f64 = rng.gen_range(-1.0..1.0);
        psis[i] = base + (i as f64 + jitter / 6.0) * span / 3.0;
        radii[i] = rng.gen_range(delta / 4.0..delta / 2.0);
    }

    // place the vertices, keeping both the surface anchor and the
    // local coordinates (for exact short-range distances)
    let mut verts: Vec<(SurfacePoint, LocalCoord)> = Vec::with_capacity(3);
    match chart {
        AnchorChart::Cone(cone) => {
            // interior condition at the apex: the three directions
            // split the full cone angle into gaps below pi, which also
            // keeps every side clear of the apex
            let mut ps: Vec<f64> = psis.iter().map(|&p| cone.wrap(p)).collect();
            ps.sort_by(f64::total_cmp);
            let gaps = [
                ps[1] - ps[0],
                ps[2] - ps[1],
                cone.total_angle - (ps[2] - ps[0]),
            ];
            if gaps.iter().any(|&g| g >= std::f64::consts::PI - 1e-9) {
                return Ok(None);
            }
            for i in 0..3 {
                let (tri, pos) = cone.place(radii[i], psis[i]);
                verts.push((
                    SurfacePoint::Interior { tri, chart: pos },
                    LocalCoord::Cone(radii[i], psis[i]),
                ));
            }
        }
        AnchorChart::Patch {
            chart: patch,
            pos,
            u0,
            w0,
        } => {
            let mut positions = [[0.0; 3]; 3];
            for i in 0..3 {
                let dir = [
                    u0[0] * psis[i].cos() + w0[0] * psis[i].sin(),
                    u0[1] * psis[i].cos() + w0[1] * psis[i].sin(),
                    u0[2] * psis[i].cos() + w0[2] * psis[i].sin(),
                ];
                positions[i] = point_at(kappa, *pos, dir, radii[i]);
            }
            // base point strictly interior to the sampled triangle
            if !point_in_model_triangle(kappa, positions, *pos) {
                return Ok(None);
            }
            // reject sides that graze a cone point of the patch
            for corner in patch.corners() {
                if point_in_model_triangle(kappa, positions, corner) {
                    return Ok(None);
                }
                for i in 0..3 {
                    let (p, q) = (positions[i], positions[(i + 1) % 3]);
                    let side = chart_distance(kappa, p, q);
                    let via = chart_distance(kappa, p, corner) + chart_distance(kappa, corner, q);
                    if via <= side + 1e-9 * side.max(1e-12) {
                        return Ok(None);
                    }
                }
            }
            for i in 0..3 {
                match patch.locate(positions[i]) {
                    Some((tri, canonical)) => verts.push((
                        SurfacePoint::Interior {
                            tri,
                            chart: canonical,
                        },
                        LocalCoord::Patch(positions[i]),
                    )),
                    None => return Ok(None),
                }
            }
        }
    }

    // Graph distances are upper bounds with Steiner-resolution error;
    // within the charted star the local segment is also a genuine
    // surface path and exact, so measurements take the smaller.
    let measure = |a: &(SurfacePoint, LocalCoord),
                   b: &(SurfacePoint, LocalCoord)|
     -> Result<f64, EstimatorError> {
        let through_graph = graph.distance(&a.0, &b.0)?;
        let exact = match (chart, &a.1, &b.1) {
            (AnchorChart::Cone(c), &LocalCoord::Cone(r1, p1), &LocalCoord::Cone(r2, p2)) => {
                c.distance((r1, p1), (r2, p2))
            }
            (
                AnchorChart::Patch { chart: patch, .. },
                &LocalCoord::Patch(p),
                &LocalCoord::Patch(q),
            ) => patch.distance(p, q),
            _ => None,
        };
        Ok(exact.map_or(through_graph, |e| through_graph.min(e)))
    };

    // measured side lengths: sides[i] opposite vertices[i]
    let mut sides = [0.0; 3];
    for i in 0..3 {
        sides[i] = measure(&verts[(i + 1) % 3], &verts[(i + 2) % 3])?;
    }
    let diam = sides.iter().copied().fold(0.0, f64::max);
    if diam >= delta {
        return Ok(None);
    }
    if heron_area(sides[0], sides[1], sides[2]).is_err() {
        return Ok(None);
    }

    // probe points along each side, mapped back to surface points
    let probe = |from: usize, toward: usize, arc: f64| -> Option<(SurfacePoint, LocalCoord)> {
        match chart {
            AnchorChart::Cone(cone) => {
                let p1 = (radii[from], psis[from]);
                let p2 = (radii[toward], psis[toward]);
                let (r, psi) = cone.side_point(p1, p2, arc);
                let (tri, pos) = cone.place(r, psi);
                Some((
                    SurfacePoint::Interior { tri, chart: pos },
                    LocalCoord::Cone(r, psi),
                ))
            }
            AnchorChart::Patch { chart: patch, .. } => {
                let (from_pos, toward_pos) = match (&verts[from].1, &verts[toward].1) {
                    (&LocalCoord::Patch(p), &LocalCoord::Patch(q)) => (p, q),
                    _ => unreachable!("patch samples carry patch coordinates"),
                };
                let u = geodesic_point(kappa, from_pos, toward_pos, arc);
                patch.locate(u).map(|(tri, canonical)| {
                    (
                        SurfacePoint::Interior {
                            tri,
                            chart: canonical,
                        },
                        LocalCoord::Patch(u),
                    )
                })
            }
        }
    };

    let mut angles = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let side_ij = sides[k]; // between vertices i and j
        let side_ik = sides[j];
        let t = (delta / 8.0).min(0.45 * side_ij.min(side_ik));
        let mut measured = [0.0; 2];
        for (step, &scale) in [t, 0.5 * t].iter().enumerate() {
            let (pj, pk) = match (probe(i, j, scale), probe(i, k, scale)) {
                (Some(pj), Some(pk)) => (pj, pk),
                _ => return Ok(None),
            };
            let dij = measure(&verts[i], &pj)?;
            let dik = measure(&verts[i], &pk)?;
            let djk = measure(&pj, &pk)?;
            measured[step] = match angle_from_sides(kappa, djk, dij, dik) {
                Ok(angle) => angle,
                Err(_) => return Ok(None),
            };
        }
        // one Richardson step against the probe scale
        let extrapolated = 2.0 * measured[1] - measured[0];
        if !(extrapolated > 0.0 && extrapolated < std::f64::consts::PI) {
            return Ok(None);
        }
        angles[i] = extrapolated;
    }
    let min_angle = angles.iter().copied().fold(f64::INFINITY, f64::min);
    if min_angle < floor {
        return Ok(None);
    }

    Ok(Some(TriangleSample {
        vertices: [verts[0].0.clone(), verts[1].0.clone(), verts[2].0.clone()],
        sides,
        angles,
        contains_x: true,
        min_angle,
        diam,
    }))
}

// Local coordinates of a sampled point in the anchor's chart.
#[derive(Clone)]
enum LocalCoord {
    Cone(f64, f64),
    Patch(ChartPoint),
}

/// One row of the estimator table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub delta: f64,
    pub inf_ratio: f64,
    pub sup_ratio: f64,
    pub n_accepted: usize,
}

/// Empirical excess-ratio range per scale: for each `delta` in the
/// strictly decreasing `deltas`, samples triangles around `x` and
/// records the smallest and largest `e0 / sigma0`. The table reports
/// trends; it never claims a limit.
pub fn estimate_curvature_bounds(
    poly: &KPolyhedron,
    x: &SurfacePoint,
    deltas: &[f64],
    a: f64,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<BoundsRow>, EstimatorError> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(EstimatorError::BadScaleSequence);
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for (ix, &delta) in deltas.iter().enumerate() {
        let row_seed = seed ^ (ix as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let samples = sample_triangles(poly, x, delta, a, n, m, row_seed)?;
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        for s in &samples {
            let r = excess_ratio(s)?;
            inf = inf.min(r);
            sup = sup.max(r);
        }
        rows.push(BoundsRow {
            delta,
            inf_ratio: inf,
            sup_ratio: sup,
            n_accepted: samples.len(),
        });
    }
    Ok(rows)
}
