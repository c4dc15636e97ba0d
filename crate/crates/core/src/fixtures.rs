//! Standard surfaces used in tests, experiments and documentation.

use crate::model::Curvature;
use crate::polyhedron::{BuildError, GluingMap, GluingPair, KPolyhedron};

/// Builds a polyhedron from a face list over shared vertex ids.
///
/// `side(u, v)` must return the geodesic separation of vertices `u` and
/// `v` on the target surface; it is only called on pairs that share a
/// face. Faces sharing an undirected edge are glued along it, with the
/// orientation flag derived from the winding of the two faces. Returns
/// the polyhedron and the vertex class of each original vertex id.
pub fn polyhedron_from_faces(
    kappa: Curvature,
    faces: &[[usize; 3]],
    mut side: impl FnMut(usize, usize) -> f64,
) -> Result<(KPolyhedron, Vec<usize>), BuildError> {
    let mut sides = Vec::with_capacity(faces.len());
    for f in faces {
        let [v0, v1, v2] = *f;
        sides.push([side(v1, v2), side(v2, v0), side(v0, v1)]);
    }
    let gluing = crate::polyhedron::gluing_from_faces(faces)?;
    let poly = KPolyhedron::build(kappa, &sides, gluing)?;
    let num_ids = faces.iter().flatten().max().map_or(0, |&m| m + 1);
    let mut class_of_vertex = vec![usize::MAX; num_ids];
    for (t, f) in faces.iter().enumerate() {
        for c in 0..3 {
            class_of_vertex[f[c]] = poly.class_of_corner(t, c);
        }
    }
    Ok((poly, class_of_vertex))
}

/// Regular tetrahedron with unit sides: four flat equilateral faces.
pub fn tetrahedron() -> KPolyhedron {
    let faces = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
    polyhedron_from_faces(Curvature::FLAT, &faces, |_, _| 1.0)
        .expect("tetrahedron is a valid gluing")
        .0
}

const CUBE_SQUARES: [[usize; 4]; 6] = [
    [0, 2, 3, 1], // z = 0, outward -z
    [4, 5, 7, 6], // z = 1, outward +z
    [0, 1, 5, 4], // y = 0, outward -y
    [2, 6, 7, 3], // y = 1, outward +y
    [0, 4, 6, 2], // x = 0, outward -x
    [1, 3, 7, 5], // x = 1, outward +x
];

fn cube_vertex(id: usize) -> [f64; 3] {
    [
        (id & 1) as f64,
        ((id >> 1) & 1) as f64,
        ((id >> 2) & 1) as f64,
    ]
}

/// Unit cube surface, each square face split along a diagonal.
pub fn cube() -> KPolyhedron {
    let mut faces = Vec::with_capacity(12);
    for sq in CUBE_SQUARES {
        faces.push([sq[0], sq[1], sq[2]]);
        faces.push([sq[0], sq[2], sq[3]]);
    }
    let dist = |u: usize, v: usize| {
        let (p, q) = (cube_vertex(u), cube_vertex(v));
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    };
    polyhedron_from_faces(Curvature::FLAT, &faces, dist)
        .expect("cube is a valid gluing")
        .0
}

/// Flat torus from an `n x n` grid on the unit square, opposite sides
/// identified; `n = 1` is the classic two-triangle torus.
pub fn flat_torus(n: usize) -> KPolyhedron {
    // n = 2 would glue two distinct torus edges between the same vertex
    // pair, which the face-list builder cannot express
    assert!(n == 1 || n >= 3);
    if n == 1 {
        let s = [[1.0, 2.0_f64.sqrt(), 1.0], [1.0, 1.0, 2.0_f64.sqrt()]];
        let pairs = vec![
            GluingPair::new((0, 2), (1, 0)), // diagonal
            GluingPair::new((0, 0), (1, 1)), // bottom ~ top
            GluingPair::new((0, 1), (1, 2)), // right ~ left
        ];
        return KPolyhedron::build(Curvature::FLAT, &s, GluingMap::new(pairs))
            .expect("two-triangle torus is a valid gluing");
    }
    let id = |i: usize, j: usize| (i % n) + n * (j % n);
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10) = (id(i, j), id(i + 1, j));
            let (v01, v11) = (id(i, j + 1), id(i + 1, j + 1));
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    let h = 1.0 / n as f64;
    let dist = move |u: usize, v: usize| {
        let (ux, uy) = ((u % n) as f64 * h, (u / n) as f64 * h);
        let (vx, vy) = ((v % n) as f64 * h, (v / n) as f64 * h);
        let dx = (ux - vx).abs().min(1.0 - (ux - vx).abs());
        let dy = (uy - vy).abs().min(1.0 - (uy - vy).abs());
        (dx * dx + dy * dy).sqrt()
    };
    polyhedron_from_faces(Curvature::FLAT, &faces, dist)
        .expect("grid torus is a valid gluing")
        .0
}

/// Two unit squares glued along their whole boundary, each split into
/// two triangles (along different diagonals so the gluing is whole-edge).
pub fn doubled_square() -> KPolyhedron {
    let faces = [[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
    let coords: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let dist = move |u: usize, v: usize| {
        let (p, q) = (coords[u], coords[v]);
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    };
    polyhedron_from_faces(Curvature::FLAT, &faces, dist)
        .expect("doubled square is a valid gluing")
        .0
}

/// Doubled fan of `n` unit equilateral triangles around a central
/// vertex. For `n >= 7` the centers carry total angle above `2 pi`.
pub fn saddle_fan(n: usize) -> KPolyhedron {
    assert!(n >= 3);
    let rim = |i: usize| 1 + (i % n);
    let back_center = n + 1;
    let mut faces = Vec::with_capacity(2 * n);
    for i in 0..n {
        faces.push([0, rim(i), rim(i + 1)]);
    }
    for i in 0..n {
        faces.push([back_center, rim(i + 1), rim(i)]);
    }
    polyhedron_from_faces(Curvature::FLAT, &faces, |_, _| 1.0)
        .expect("doubled fan is a valid gluing")
        .0
}

const OCTAHEDRON_FACES: [[usize; 3]; 8] = [
    [0, 2, 4],
    [2, 1, 4],
    [1, 3, 4],
    [3, 0, 4],
    [2, 0, 5],
    [1, 2, 5],
    [3, 1, 5],
    [0, 3, 5],
];

/// Decomposition of the unit round sphere into eight octants, realized
/// with the given model curvature. All sides are `pi / 2`; with
/// `kappa = 1` this is an exact decomposition of the sphere.
pub fn octant_sphere(kappa: Curvature) -> KPolyhedron {
    polyhedron_from_faces(kappa, &OCTAHEDRON_FACES, |_, _| std::f64::consts::FRAC_PI_2)
        .expect("octant decomposition is a valid gluing")
        .0
}

/// Face table of the regular icosahedron, consistently wound.
pub const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// The twelve icosahedron vertices, normalized to the unit sphere.
pub fn icosahedron_vertices() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let norm = (1.0 + phi * phi).sqrt();
    raw.iter()
        .map(|v| [v[0] / norm, v[1] / norm, v[2] / norm])
        .collect()
}

/// Regular icosahedron with unit sides: twenty flat equilateral faces.
pub fn icosahedron() -> KPolyhedron {
    polyhedron_from_faces(Curvature::FLAT, &ICOSAHEDRON_FACES, |_, _| 1.0)
        .expect("icosahedron is a valid gluing")
        .0
}
