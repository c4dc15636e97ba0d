//! Surfaces glued from constant-curvature geodesic triangles.
//!
//! A polyhedron is a finite collection of model triangles together with
//! a pairing of their edges. Gluing whole edges of equal length, each
//! edge slot used exactly once, always produces a closed surface; the
//! derived data (vertex classes, total angles, singular curvatures,
//! Euler characteristic) is computed once at build time.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{ChartTriangle, Curvature, GeometryError, ModelTriangle};
use crate::tol::{ALEXANDROV_SLACK, EDGE_MATCH_REL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("triangle {index}: {source}")]
    InvalidTriangle { index: usize, source: GeometryError },
    #[error("edge slot (triangle {tri}, edge {edge}) is out of range")]
    SlotOutOfRange { tri: usize, edge: usize },
    #[error("edge slot (triangle {tri}, edge {edge}) is glued more than once")]
    NonManifoldEdge { tri: usize, edge: usize },
    #[error("edge slot (triangle {tri}, edge {edge}) is not glued (surface has boundary)")]
    OpenEdge { tri: usize, edge: usize },
    #[error("glued edges (t{t1}, e{e1}) and (t{t2}, e{e2}) have mismatched lengths {l1} vs {l2}")]
    LengthMismatch {
        t1: usize,
        e1: usize,
        t2: usize,
        e2: usize,
        l1: f64,
        l2: f64,
    },
    #[error("gluing does not produce a connected surface")]
    Disconnected,
    #[error("vertex class {0} does not exist")]
    UnknownVertex(usize),
    #[error("rescaling by {scale} overflows the spherical size bound: {source}")]
    SphericalSizeOverflow { scale: f64, source: GeometryError },
}

/// One glued edge pair. `reversed` tells how the arclength parameters
/// match up: `true` identifies the start of the first edge with the end
/// of the second (the orientation produced by consistently wound
/// triangles), `false` identifies start with start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluingPair {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub reversed: bool,
}

impl GluingPair {
    pub fn new(first: (usize, usize), second: (usize, usize)) -> Self {
        GluingPair {
            first,
            second,
            reversed: true,
        }
    }

    pub fn oriented(first: (usize, usize), second: (usize, usize), reversed: bool) -> Self {
        GluingPair {
            first,
            second,
            reversed,
        }
    }
}

/// The full edge pairing of a polyhedron.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GluingMap {
    pub pairs: Vec<GluingPair>,
}

impl GluingMap {
    pub fn new(pairs: Vec<GluingPair>) -> Self {
        GluingMap { pairs }
    }
}

/// A closed surface built from model triangles, with its derived data.
#[derive(Debug, Clone)]
pub struct KPolyhedron {
    kappa: Curvature,
    triangles: Vec<ModelTriangle>,
    gluing: GluingMap,
    charts: Vec<ChartTriangle>,
    corner_angles: Vec<[f64; 3]>,
    // partner_of[t][e] = (partner slot, reversed)
    partner_of: Vec<[((usize, usize), bool); 3]>,
    vertex_classes: Vec<Vec<(usize, usize)>>,
    class_of_corner: Vec<[usize; 3]>,
    total_angles: Vec<f64>,
    omegas: Vec<f64>,
    euler_char: i64,
    total_area: f64,
}

/// Result of the vertex-angle upper-bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct AlexandrovReport {
    pub pass: bool,
    /// Vertex classes whose total angle exceeds `2 pi`, with the angle.
    pub offenders: Vec<(usize, f64)>,
}

/// Length of edge `e` of a triangle with sides `[a, b, c]`. Edge `e`
/// joins corners `e` and `e + 1`; its length is the side opposite the
/// remaining corner.
pub fn edge_side_index(edge: usize) -> usize {
    (edge + 2) % 3
}

impl KPolyhedron {
    /// Validates the gluing and computes all derived fields.
    pub fn build(
        kappa: Curvature,
        sides: &[[f64; 3]],
        gluing: GluingMap,
    ) -> Result<Self, BuildError> {
        let mut triangles = Vec::with_capacity(sides.len());
        for (i, &[a, b, c]) in sides.iter().enumerate() {
            let t = ModelTriangle::new(kappa, a, b, c)
                .map_err(|source| BuildError::InvalidTriangle { index: i, source })?;
            triangles.push(t);
        }
        let n = triangles.len();

        // Every edge slot glued exactly once.
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for pair in &gluing.pairs {
            for &(t, e) in &[pair.first, pair.second] {
                if t >= n || e >= 3 {
                    return Err(BuildError::SlotOutOfRange { tri: t, edge: e });
                }
                *seen.entry((t, e)).or_insert(0) += 1;
            }
        }
        for t in 0..n {
            for e in 0..3 {
                match seen.get(&(t, e)) {
                    None => return Err(BuildError::OpenEdge { tri: t, edge: e }),
                    Some(&1) => {}
                    Some(_) => return Err(BuildError::NonManifoldEdge { tri: t, edge: e }),
                }
            }
        }

        // Glued edges must have (nearly) equal lengths.
        for pair in &gluing.pairs {
            let (t1, e1) = pair.first;
            let (t2, e2) = pair.second;
            let l1 = triangles[t1].sides()[edge_side_index(e1)];
            let l2 = triangles[t2].sides()[edge_side_index(e2)];
            if (l1 - l2).abs() > EDGE_MATCH_REL * l1.max(l2) {
                return Err(BuildError::LengthMismatch {
                    t1,
                    e1,
                    t2,
                    e2,
                    l1,
                    l2,
                });
            }
        }

        let mut partner_of = vec![[((usize::MAX, usize::MAX), false); 3]; n];
        for pair in &gluing.pairs {
            let (t1, e1) = pair.first;
            let (t2, e2) = pair.second;
            partner_of[t1][e1] = ((t2, e2), pair.reversed);
            partner_of[t2][e2] = ((t1, e1), pair.reversed);
        }

        // Connectivity over the triangle adjacency graph.
        if n > 0 {
            let mut visited = vec![false; n];
            let mut stack = vec![0usize];
            visited[0] = true;
            while let Some(t) = stack.pop() {
                for e in 0..3 {
                    let (t2, _) = partner_of[t][e].0;
                    if !visited[t2] {
                        visited[t2] = true;
                        stack.push(t2);
                    }
                }
            }
            if visited.iter().any(|v| !v) {
                return Err(BuildError::Disconnected);
            }
        }

        // Vertex classes: union-find over corner slots, merged across
        // each glued edge at both endpoints.
        let mut uf = UnionFind::new(3 * n);
        let slot = |t: usize, c: usize| 3 * t + c;
        for pair in &gluing.pairs {
            let (t1, e1) = pair.first;
            let (t2, e2) = pair.second;
            let (s1, n1) = (e1, (e1 + 1) % 3); // start/end corners of e1
            let (s2, n2) = (e2, (e2 + 1) % 3);
            if pair.reversed {
                uf.union(slot(t1, s1), slot(t2, n2));
                uf.union(slot(t1, n1), slot(t2, s2));
            } else {
                uf.union(slot(t1, s1), slot(t2, s2));
                uf.union(slot(t1, n1), slot(t2, n2));
            }
        }

        // Deterministic class layout: classes ordered by their minimal
        // (triangle, corner) slot, slots sorted within a class.
        let mut groups: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for t in 0..n {
            for c in 0..3 {
                groups.entry(uf.find(slot(t, c))).or_default().push((t, c));
            }
        }
        let mut vertex_classes: Vec<Vec<(usize, usize)>> = groups.into_values().collect();
        for class in &mut vertex_classes {
            class.sort_unstable();
        }
        vertex_classes.sort_unstable_by_key(|class| class[0]);

        let mut class_of_corner = vec![[usize::MAX; 3]; n];
        for (id, class) in vertex_classes.iter().enumerate() {
            for &(t, c) in class {
                class_of_corner[t][c] = id;
            }
        }

        let corner_angles: Vec<[f64; 3]> = triangles.iter().map(|t| t.angles()).collect();
        let total_angles: Vec<f64> = vertex_classes
            .iter()
            .map(|class| class.iter().map(|&(t, c)| corner_angles[t][c]).sum())
            .collect();
        let omegas: Vec<f64> = total_angles
            .iter()
            .map(|&a| 2.0 * std::f64::consts::PI - a)
            .collect();

        let euler_char = vertex_classes.len() as i64 - gluing.pairs.len() as i64 + n as i64;
        let total_area = triangles.iter().map(|t| t.area()).sum();
        let charts = triangles.iter().map(|t| t.chart()).collect();

        Ok(KPolyhedron {
            kappa,
            triangles,
            gluing,
            charts,
            corner_angles,
            partner_of,
            vertex_classes,
            class_of_corner,
            total_angles,
            omegas,
            euler_char,
            total_area,
        })
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, id: usize) -> &ModelTriangle {
        &self.triangles[id]
    }

    pub fn triangles(&self) -> &[ModelTriangle] {
        &self.triangles
    }

    pub fn gluing(&self) -> &GluingMap {
        &self.gluing
    }

    pub fn chart(&self, id: usize) -> &ChartTriangle {
        &self.charts[id]
    }

    pub fn corner_angle(&self, tri: usize, corner: usize) -> f64 {
        self.corner_angles[tri][corner]
    }

    pub fn edge_length(&self, tri: usize, edge: usize) -> f64 {
        self.triangles[tri].sides()[edge_side_index(edge)]
    }

    /// Glued partner of an edge slot, with the orientation flag.
    pub fn partner(&self, tri: usize, edge: usize) -> ((usize, usize), bool) {
        self.partner_of[tri][edge]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_classes.len()
    }

    pub fn vertex_classes(&self) -> &[Vec<(usize, usize)>] {
        &self.vertex_classes
    }

    pub fn class_of_corner(&self, tri: usize, corner: usize) -> usize {
        self.class_of_corner[tri][corner]
    }

    pub fn total_angle(&self, class: usize) -> f64 {
        self.total_angles[class]
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.euler_char
    }

    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// Singular curvature `2 pi - total angle` at a vertex class.
    pub fn singular_curvature(&self, class: usize) -> Result<f64, BuildError> {
        self.omegas
            .get(class)
            .copied()
            .ok_or(BuildError::UnknownVertex(class))
    }

    /// Checks the vertex condition: total angle at most `2 pi` at every
    /// vertex (within [`ALEXANDROV_SLACK`]).
    pub fn check_alexandrov(&self) -> AlexandrovReport {
        let bound = 2.0 * std::f64::consts::PI + ALEXANDROV_SLACK;
        let offenders: Vec<(usize, f64)> = self
            .total_angles
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a > bound)
            .map(|(i, &a)| (i, a))
            .collect();
        AlexandrovReport {
            pass: offenders.is_empty(),
            offenders,
        }
    }

    /// `sum omega + kappa * area - 2 pi chi`; vanishes on exactly
    /// constructed inputs up to roundoff.
    pub fn gauss_bonnet_residual(&self) -> f64 {
        let omega_sum: f64 = self.omegas.iter().sum();
        omega_sum + self.kappa.get() * self.total_area
            - 2.0 * std::f64::consts::PI * self.euler_char as f64
    }

    /// Vertices with singular curvature above `threshold`, sorted by
    /// curvature descending (ties by class id).
    pub fn conical_points(&self, threshold: f64) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self
            .omegas
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w > threshold)
            .map(|(i, &w)| (i, w))
            .collect();
        out.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
        out
    }

    /// Global homothety: side lengths scale by `s`, curvature by
    /// `1/s^2`. Singular curvatures are invariant.
    pub fn rescale(&self, s: f64) -> Result<KPolyhedron, BuildError> {
        assert!(s > 0.0 && s.is_finite(), "scale factor must be positive");
        let sides: Vec<[f64; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.sides();
                [a * s, b * s, c * s]
            })
            .collect();
        KPolyhedron::build(self.kappa.rescaled(s), &sides, self.gluing.clone()).map_err(|e| match e
        {
            BuildError::InvalidTriangle {
                source: source @ GeometryError::SphericalSizeBound { .. },
                ..
            } => BuildError::SphericalSizeOverflow { scale: s, source },
            other => other,
        })
    }

    /// Corners around a vertex class in cyclic order, following the
    /// link of the vertex across glued edges.
    ///
    /// Each corner `c` of a triangle has two edge flanks at the vertex:
    /// the outgoing edge `c` (which starts there) and the incoming edge
    /// `(c + 2) % 3` (which ends there). The walk enters every corner
    /// through one flank and leaves through the other, so it traverses
    /// the whole class exactly once.
    pub fn vertex_link(&self, class: usize) -> Result<Vec<(usize, usize)>, BuildError> {
        let slots = self
            .vertex_classes
            .get(class)
            .ok_or(BuildError::UnknownVertex(class))?;
        let start = slots[0];
        let mut out = Vec::with_capacity(slots.len());
        let (mut tri, mut corner) = start;
        let mut cross_out = true;
        loop {
            out.push((tri, corner));
            let (edge, at_start) = if cross_out {
                (corner, true)
            } else {
                ((corner + 2) % 3, false)
            };
            let ((t2, e2), reversed) = self.partner_of[tri][edge];
            let landing = if at_start == reversed {
                (e2 + 1) % 3
            } else {
                e2
            };
            // Entered through e2; next time cross the other flank.
            cross_out = landing != e2;
            tri = t2;
            corner = landing;
            if (tri, corner) == start || out.len() >= slots.len() {
                break;
            }
        }
        debug_assert_eq!(out.len(), slots.len(), "vertex link must close up");
        Ok(out)
    }
}

/// Derives the edge pairing of a face list over shared vertex ids:
/// faces sharing an undirected vertex pair are glued along it, with the
/// orientation flag read off the two windings.
pub fn gluing_from_faces(faces: &[[usize; 3]]) -> Result<GluingMap, BuildError> {
    let mut by_pair: HashMap<(usize, usize), Vec<(usize, usize, bool)>> = HashMap::new();
    for (t, f) in faces.iter().enumerate() {
        for e in 0..3 {
            let (u, v) = (f[e], f[(e + 1) % 3]);
            let key = (u.min(v), u.max(v));
            by_pair.entry(key).or_default().push((t, e, u < v));
        }
    }
    let mut pairs = Vec::with_capacity(by_pair.len());
    let mut keys: Vec<_> = by_pair.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let slots = &by_pair[&key];
        match slots.len() {
            2 => {
                let (t1, e1, fwd1) = slots[0];
                let (t2, e2, fwd2) = slots[1];
                // same traversal direction glues start to start
                pairs.push(GluingPair::oriented((t1, e1), (t2, e2), fwd1 != fwd2));
            }
            1 => {
                let (t, e, _) = slots[0];
                return Err(BuildError::OpenEdge { tri: t, edge: e });
            }
            _ => {
                let (t, e, _) = slots[0];
                return Err(BuildError::NonManifoldEdge { tri: t, edge: e });
            }
        }
    }
    pairs.sort_unstable_by_key(|p| (p.first, p.second));
    Ok(GluingMap::new(pairs))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins: keeps class representatives stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
