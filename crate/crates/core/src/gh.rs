//! Gromov-Hausdorff distance machinery on finite metric spaces.
//!
//! A correspondence relates every point of one space to at least one
//! point of the other; its distortion is the largest discrepancy
//! between the distances of related pairs, and half the infimum of the
//! distortion over all correspondences is the Gromov-Hausdorff
//! distance. On small instances the infimum is computed exactly by
//! backtracking; otherwise certified lower and upper bounds bracket it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::polyhedron::KPolyhedron;
use crate::surface::{build_metric_graph, SurfaceError, SurfacePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GhError {
    #[error("distance matrix must have n*n entries, got {got} for n = {n}")]
    BadMatrixLength { n: usize, got: usize },
    #[error("distance matrix not symmetric at ({i}, {j}): {dij} vs {dji}")]
    NotSymmetric {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },
    #[error("diagonal entry {i} must be zero, got {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("distance ({i}, {j}) must be positive and finite, got {value}")]
    NonPositiveDistance { i: usize, j: usize, value: f64 },
    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("relation shape ({rows}, {cols}) does not match spaces ({n}, {m})")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        n: usize,
        m: usize,
    },
    #[error("row {0} of the relation covers no point")]
    UncoveredRow(usize),
    #[error("column {0} of the relation covers no point")]
    UncoveredColumn(usize),
    #[error("instance size ({n}, {m}) exceeds the exact-solver limit {limit}")]
    SizeLimitExceeded { n: usize, m: usize, limit: usize },
    #[error("sample size {0} must be at least 2")]
    SampleTooSmall(usize),
    #[error("sample size {k} exceeds the {available} available sample sites")]
    SampleTooLarge { k: usize, available: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Default instance-size cap for the exact solver.
pub const GH_EXACT_DEFAULT_LIMIT: usize = 6;

/// A finite metric space given by its full distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal
    /// and the triangle inequality (with `1e-9` slack).
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self, GhError> {
        if d.len() != n * n {
            return Err(GhError::BadMatrixLength { n, got: d.len() });
        }
        for i in 0..n {
            let v = d[i * n + i];
            if v != 0.0 {
                return Err(GhError::NonzeroDiagonal { i, value: v });
            }
            for j in (i + 1)..n {
                let (dij, dji) = (d[i * n + j], d[j * n + i]);
                if !(dij.is_finite() && dij > 0.0) {
                    return Err(GhError::NonPositiveDistance { i, j, value: dij });
                }
                if (dij - dji).abs() > 1e-12 * dij.abs().max(1.0) {
                    return Err(GhError::NotSymmetric { i, j, dij, dji });
                }
            }
        }
        let space = FiniteMetricSpace { n, d };
        let slack = 1e-9 * (1.0 + space.diameter());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if space.dist(i, k) > space.dist(i, j) + space.dist(j, k) + slack {
                        return Err(GhError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.d
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance from point `i` to any other point.
    pub fn eccentricity(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.dist(i, j)).fold(0.0, f64::max)
    }

    /// The same space with all distances multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> FiniteMetricSpace {
        assert!(s > 0.0 && s.is_finite());
        FiniteMetricSpace {
            n: self.n,
            d: self.d.iter().map(|&x| x * s).collect(),
        }
    }

    /// Sorted multiset of the off-diagonal distances (each pair once).
    pub fn distance_spectrum(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.dist(i, j));
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// A covering relation between two finite metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    rows: usize,
    cols: usize,
    relation: Vec<bool>,
}

impl Correspondence {
    /// Validates that every row and every column is covered.
    pub fn new(rows: usize, cols: usize, relation: Vec<bool>) -> Result<Self, GhError> {
        if relation.len() != rows * cols {
            return Err(GhError::BadMatrixLength {
                n: rows,
                got: relation.len(),
            });
        }
        for i in 0..rows {
            if !(0..cols).any(|j| relation[i * cols + j]) {
                return Err(GhError::UncoveredRow(i));
            }
        }
        for j in 0..cols {
            if !(0..rows).any(|i| relation[i * cols + j]) {
                return Err(GhError::UncoveredColumn(j));
            }
        }
        Ok(Correspondence {
            rows,
            cols,
            relation,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut relation = vec![false; n * n];
        for i in 0..n {
            relation[i * n + i] = true;
        }
        Correspondence {
            rows: n,
            cols: n,
            relation,
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Correspondence {
            rows,
            cols,
            relation: vec![true; rows * cols],
        }
    }

    /// Builds the relation `{(i, f(i))} union {(g(j), j)}`.
    pub fn from_maps(f: &[usize], g: &[usize]) -> Self {
        let (rows, cols) = (f.len(), g.len());
        let mut relation = vec![false; rows * cols];
        for (i, &y) in f.iter().enumerate() {
            relation[i * cols + y] = true;
        }
        for (j, &x) in g.iter().enumerate() {
            relation[x * cols + j] = true;
        }
        Correspondence {
            rows,
            cols,
            relation,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.relation[i * self.cols + j]
    }

    /// All related pairs, row-major.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.relation[i * self.cols + j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Distortion of a correspondence: the largest discrepancy between the
/// distances of related pairs.
pub fn distortion(
    r: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<f64, GhError> {
    let (rows, cols) = r.shape();
    if rows != x.len() || cols != y.len() {
        return Err(GhError::ShapeMismatch {
            rows,
            cols,
            n: x.len(),
            m: y.len(),
        });
    }
    Ok(pair_distortion(&r.pairs(), x, y))
}

fn pair_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut dis: f64 = 0.0;
    for (a, &(x1, y1)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[a..] {
            dis = dis.max((x.dist(x1, x2) - y.dist(y1, y2)).abs());
        }
    }
    dis
}

// ---------------------------------------------------------------------------
// Exact solver
// ---------------------------------------------------------------------------

/// Exact Gromov-Hausdorff distance by backtracking over correspondences.
///
/// Distortion is monotone under adding related pairs, so the infimum is
/// attained on minimal covering relations; these decompose into stars
/// (every related pair has an endpoint of degree one), which is what
/// the backtracking enumerates, pruning any branch whose partial
/// distortion already reaches the incumbent.
pub fn gh_exact(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    size_limit: usize,
) -> Result<f64, GhError> {
    let (n, m) = (x.len(), y.len());
    if n.max(m) > size_limit {
        return Err(GhError::SizeLimitExceeded {
            n,
            m,
            limit: size_limit,
        });
    }
    // Seed the incumbent with the greedy eccentricity matching.
    let (f, g) = greedy_maps(x, y);
    let seed = Correspondence::from_maps(&f, &g);
    let mut best = pair_distortion(&seed.pairs(), x, y);

    let mut solver = ExactSolver {
        x,
        y,
        state: vec![YState::Free; m],
        pairs: Vec::with_capacity(n + m),
        best: &mut best,
    };
    solver.search(0, 0.0);
    Ok(best / 2.0)
}

#[derive(Clone, Copy, PartialEq)]
enum YState {
    Free,
    Shared,
    Closed,
}

struct ExactSolver<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    state: Vec<YState>,
    pairs: Vec<(usize, usize)>,
    best: &'a mut f64,
}

impl ExactSolver<'_> {
    fn added_distortion(&self, xi: usize, yj: usize) -> f64 {
        let mut dis: f64 = 0.0;
        for &(x2, y2) in &self.pairs {
            dis = dis.max((self.x.dist(xi, x2) - self.y.dist(yj, y2)).abs());
        }
        dis
    }

    fn search(&mut self, i: usize, current: f64) {
        let (n, m) = (self.x.len(), self.y.len());
        if current >= *self.best {
            return;
        }
        if i == n {
            if self.state.iter().all(|&s| s != YState::Free) && current < *self.best {
                *self.best = current;
            }
            return;
        }
        let free: Vec<usize> = (0..m).filter(|&j| self.state[j] == YState::Free).collect();
        // Branch (a): a single partner; the y may be shared later.
        for j in 0..m {
            if self.state[j] == YState::Closed {
                continue;
            }
            let cur = current.max(self.added_distortion(i, j));
            if cur >= *self.best {
                continue;
            }
            let saved = self.state[j];
            self.state[j] = YState::Shared;
            self.pairs.push((i, j));
            self.search(i + 1, cur);
            self.pairs.pop();
            self.state[j] = saved;
        }
        // Branch (b): an exclusive set of >= 2 free ys; those ys take
        // no other partner, making this x the center of a star.
        if free.len() >= 2 {
            let count = free.len();
            for mask in 1u32..(1 << count) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let mut cur = current;
                let mut taken = 0;
                let mut pruned = false;
                for (b, &j) in free.iter().enumerate() {
                    if mask & (1 << b) == 0 {
                        continue;
                    }
                    cur = cur.max(self.added_distortion(i, j));
                    if cur >= *self.best {
                        pruned = true;
                        break;
                    }
                    self.pairs.push((i, j));
                    self.state[j] = YState::Closed;
                    taken += 1;
                }
                if !pruned {
                    self.search(i + 1, cur);
                }
                for _ in 0..taken {
                    let (_, j) = self.pairs.pop().unwrap();
                    self.state[j] = YState::Free;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Certified lower bound: the larger of half the diameter gap and half
/// the Hausdorff distance between the two distance spectra (with zero
/// adjoined, to account for related pairs that collapse).
///
/// Both follow directly from the distortion definition: any
/// correspondence maps a realized distance of one space to within its
/// distortion of some realized distance (possibly zero) of the other.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let diam_gap = (x.diameter() - y.diameter()).abs();
    let sx = x.distance_spectrum();
    let sy = y.distance_spectrum();
    let gap = spectrum_gap(&sx, &sy).max(spectrum_gap(&sy, &sx));
    0.5 * diam_gap.max(gap)
}

// sup over a in `from` of the distance to the nearest value in
// `to` union {0}; both inputs sorted ascending.
fn spectrum_gap(from: &[f64], to: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &a in from {
        let mut nearest = a; // distance to the adjoined zero
        let ix = to.partition_point(|&b| b < a);
        if ix < to.len() {
            nearest = nearest.min((to[ix] - a).abs());
        }
        if ix > 0 {
            nearest = nearest.min((a - to[ix - 1]).abs());
        }
        worst = worst.max(nearest);
    }
    worst
}

fn greedy_maps(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> (Vec<usize>, Vec<usize>) {
    let (n, m) = (x.len(), y.len());
    let mut xs: Vec<usize> = (0..n).collect();
    let mut ys: Vec<usize> = (0..m).collect();
    xs.sort_by(|&a, &b| {
        x.eccentricity(b)
            .total_cmp(&x.eccentricity(a))
            .then(a.cmp(&b))
    });
    ys.sort_by(|&a, &b| {
        y.eccentricity(b)
            .total_cmp(&y.eccentricity(a))
            .then(a.cmp(&b))
    });
    let mut f = vec![0usize; n];
    for (rank, &i) in xs.iter().enumerate() {
        f[i] = ys[rank * m / n];
    }
    let mut g = vec![0usize; m];
    for (rank, &j) in ys.iter().enumerate() {
        g[j] = xs[rank * n / m];
    }
    (f, g)
}

fn maps_distortion(f: &[usize], g: &[usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    pair_distortion(&Correspondence::from_maps(f, g).pairs(), x, y)
}

/// Upper bound with a certificate: the best correspondence found by
/// greedy eccentricity seeding plus reassignment local search over the
/// pair of maps `X -> Y` and `Y -> X`. Extra `restarts` repeat the
/// search from random seeds. The certificate's distortion is exactly
/// twice the returned value.
pub fn gh_upper_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    restarts: usize,
) -> (f64, Correspondence) {
    gh_upper_bound_seeded(x, y, restarts, 0x006b_706f_6c79)
}

/// [`gh_upper_bound`] with an explicit random seed for the restarts.
pub fn gh_upper_bound_seeded(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    restarts: usize,
    seed: u64,
) -> (f64, Correspondence) {
    let (n, m) = (x.len(), y.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut best_f, mut best_g) = greedy_maps(x, y);
    local_search(&mut best_f, &mut best_g, x, y);
    let mut best = maps_distortion(&best_f, &best_g, x, y);
    kick_and_descend(&mut best_f, &mut best_g, &mut best, x, y, &mut rng);

    for _ in 0..restarts {
        let mut f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let mut g: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        // keep the relation surjective-ish from the start
        let mut ys: Vec<usize> = (0..m).collect();
        ys.shuffle(&mut rng);
        for (i, &j) in ys.iter().take(n.min(m)).enumerate() {
            f[i] = j;
        }
        local_search(&mut f, &mut g, x, y);
        let mut dis = maps_distortion(&f, &g, x, y);
        kick_and_descend(&mut f, &mut g, &mut dis, x, y, &mut rng);
        if dis < best {
            best = dis;
            best_f = f;
            best_g = g;
        }
    }
    let cert = Correspondence::from_maps(&best_f, &best_g);
    (0.5 * maps_distortion(&best_f, &best_g, x, y), cert)
}

// Iterated local search: random single-coordinate kicks from the best
// state, each followed by a full descent; escapes the plateaus of the
// max objective that block pure improvement moves.
fn kick_and_descend(
    f: &mut [usize],
    g: &mut [usize],
    best: &mut f64,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rng: &mut ChaCha8Rng,
) {
    let (n, m) = (x.len(), y.len());
    for _ in 0..12 {
        let mut f2 = f.to_vec();
        let mut g2 = g.to_vec();
        for _ in 0..2 {
            f2[rng.gen_range(0..n)] = rng.gen_range(0..m);
            g2[rng.gen_range(0..m)] = rng.gen_range(0..n);
        }
        local_search(&mut f2, &mut g2, x, y);
        let dis = maps_distortion(&f2, &g2, x, y);
        if dis < *best {
            *best = dis;
            f.copy_from_slice(&f2);
            g.copy_from_slice(&g2);
        }
    }
}

fn local_search(f: &mut [usize], g: &mut [usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace) {
    let (n, m) = (x.len(), y.len());
    let mut current = maps_distortion(f, g, x, y);
    for _round in 0..200 {
        let mut improved = false;
        // single reassignments
        for i in 0..n {
            for j in 0..m {
                if f[i] == j {
                    continue;
                }
                let old = f[i];
                f[i] = j;
                let dis = maps_distortion(f, g, x, y);
                if dis < current {
                    current = dis;
                    improved = true;
                } else {
                    f[i] = old;
                }
            }
        }
        for j in 0..m {
            for i in 0..n {
                if g[j] == i {
                    continue;
                }
                let old = g[j];
                g[j] = i;
                let dis = maps_distortion(f, g, x, y);
                if dis < current {
                    current = dis;
                    improved = true;
                } else {
                    g[j] = old;
                }
            }
        }
        // matched reassignment of both directions at once
        for i in 0..n {
            for j in 0..m {
                if f[i] == j && g[j] == i {
                    continue;
                }
                let (of, og) = (f[i], g[j]);
                f[i] = j;
                g[j] = i;
                let dis = maps_distortion(f, g, x, y);
                if dis < current {
                    current = dis;
                    improved = true;
                } else {
                    f[i] = of;
                    g[j] = og;
                }
            }
        }
        // transpositions inside f
        for i1 in 0..n {
            for i2 in (i1 + 1)..n {
                if f[i1] == f[i2] {
                    continue;
                }
                f.swap(i1, i2);
                let dis = maps_distortion(f, g, x, y);
                if dis < current {
                    current = dis;
                    improved = true;
                } else {
                    f.swap(i1, i2);
                }
            }
        }
        if !improved {
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Sampling a polyhedron into a finite metric space
// ---------------------------------------------------------------------------

/// A finite metric space sampled from a polyhedral surface.
#[derive(Debug, Clone)]
pub struct SampledSpace {
    pub space: FiniteMetricSpace,
    pub points: Vec<SurfacePoint>,
    pub node_ids: Vec<usize>,
}

/// Farthest-point sampling of `k` points, seeded at vertex class 0,
/// with pairwise distances from the Steiner graph at resolution `m`.
///
/// Sample sites are the graph nodes; vertex classes are preferred and
/// Steiner nodes only join the candidate pool once every vertex class
/// has been chosen.
pub fn sample_polyhedron(poly: &KPolyhedron, k: usize, m: usize) -> Result<SampledSpace, GhError> {
    sample_polyhedron_from(poly, k, m, 0)
}

/// [`sample_polyhedron`] seeded at an arbitrary graph node.
pub fn sample_polyhedron_from(
    poly: &KPolyhedron,
    k: usize,
    m: usize,
    start_node: usize,
) -> Result<SampledSpace, GhError> {
    if k < 2 {
        return Err(GhError::SampleTooSmall(k));
    }
    let graph = build_metric_graph(poly, m);
    let total = graph.num_nodes();
    if k > total {
        return Err(GhError::SampleTooLarge {
            k,
            available: total,
        });
    }
    if start_node >= total {
        return Err(GhError::Surface(SurfaceError::UnknownVertex(start_node)));
    }
    let num_classes = poly.num_vertices();

    let mut chosen = vec![start_node];
    let mut rows = vec![graph.node_distances(start_node)];
    let mut min_dist = rows[0].clone();
    while chosen.len() < k {
        // vertex classes first, Steiner nodes once classes are exhausted
        let classes_chosen = chosen.iter().filter(|&&n| n < num_classes).count();
        let pool_end = if classes_chosen < num_classes {
            num_classes
        } else {
            total
        };
        let mut next = usize::MAX;
        let mut far = -1.0;
        for node in 0..pool_end {
            if chosen.contains(&node) {
                continue;
            }
            if min_dist[node] > far {
                far = min_dist[node];
                next = node;
            }
        }
        if next == usize::MAX {
            // all preferred candidates taken; fall back to the full pool
            for node in 0..total {
                if chosen.contains(&node) {
                    continue;
                }
                if min_dist[node] > far {
                    far = min_dist[node];
                    next = node;
                }
            }
        }
        let row = graph.node_distances(next);
        for (md, &d) in min_dist.iter_mut().zip(&row) {
            if d < *md {
                *md = d;
            }
        }
        chosen.push(next);
        rows.push(row);
    }

    let mut d = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = rows[i][chosen[j]];
            d[i * k + j] = v;
            d[j * k + i] = v;
        }
    }
    let space = FiniteMetricSpace::new(k, d)?;
    let points = chosen.iter().map(|&n| graph.node_point(n)).collect();
    Ok(SampledSpace {
        space,
        points,
        node_ids: chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn line_space(points: &[f64]) -> FiniteMetricSpace {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (points[i] - points[j]).abs();
            }
        }
        FiniteMetricSpace::new(n, d).unwrap()
    }

    fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                let dz = pts[i][2] - pts[j][2];
                d[i * n + j] = (dx * dx + dy * dy + dz * dz).sqrt();
            }
        }
        FiniteMetricSpace::new(n, d).unwrap()
    }

    /// Brute force over every covering boolean matrix; exponential, so
    /// only usable for the tiniest instances. Independent of the
    /// backtracking path in `gh_exact`.
    fn gh_brute(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
        let (n, m) = (x.len(), y.len());
        let cells = n * m;
        assert!(cells <= 12);
        let mut best = f64::INFINITY;
        'outer: for mask in 1u32..(1 << cells) {
            for i in 0..n {
                if (0..m).all(|j| mask & (1 << (i * m + j)) == 0) {
                    continue 'outer;
                }
            }
            for j in 0..m {
                if (0..n).all(|i| mask & (1 << (i * m + j)) == 0) {
                    continue 'outer;
                }
            }
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| {
                    (0..m)
                        .filter(move |j| mask & (1 << (i * m + j)) != 0)
                        .map(move |j| (i, j))
                })
                .collect();
            best = best.min(pair_distortion(&pairs, x, y));
        }
        best / 2.0
    }

    #[test]
    fn metric_validation() {
        assert!(FiniteMetricSpace::new(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(matches!(
            FiniteMetricSpace::new(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(GhError::NotSymmetric { .. })
        ));
        assert!(matches!(
            FiniteMetricSpace::new(2, vec![0.5, 1.0, 1.0, 0.0]),
            Err(GhError::NonzeroDiagonal { .. })
        ));
        let bad = vec![0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0];
        assert!(matches!(
            FiniteMetricSpace::new(3, bad),
            Err(GhError::TriangleViolation { .. })
        ));
    }

    #[test]
    fn distortion_examples() {
        let x = line_space(&[0.0, 1.0, 3.0]);
        assert_eq!(
            distortion(&Correspondence::identity(3), &x, &x).unwrap(),
            0.0
        );

        let two = line_space(&[0.0, 1.0]);
        let one = FiniteMetricSpace::new(1, vec![0.0]).unwrap();
        assert_eq!(
            distortion(&Correspondence::full(2, 1), &two, &one).unwrap(),
            1.0
        );

        let y = line_space(&[0.0, 1.0, 2.0]);
        let diag = Correspondence::identity(3);
        assert_eq!(distortion(&diag, &x, &y).unwrap(), 1.0);
    }

    #[test]
    fn correspondence_validation() {
        assert!(Correspondence::new(2, 2, vec![true, false, false, true]).is_ok());
        assert!(matches!(
            Correspondence::new(2, 2, vec![true, true, false, false]),
            Err(GhError::UncoveredRow(1))
        ));
        assert!(matches!(
            Correspondence::new(2, 2, vec![true, false, true, false]),
            Err(GhError::UncoveredColumn(1))
        ));
        let x = line_space(&[0.0, 1.0]);
        let y = line_space(&[0.0, 1.0, 2.0]);
        let r = Correspondence::identity(2);
        assert!(matches!(
            distortion(&r, &x, &y),
            Err(GhError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn exact_self_distance_is_zero() {
        let x = line_space(&[0.0, 1.0, 3.0, 7.0]);
        assert_eq!(gh_exact(&x, &x, GH_EXACT_DEFAULT_LIMIT).unwrap(), 0.0);
    }

    #[test]
    fn exact_two_point_examples() {
        let two = line_space(&[0.0, 2.0]);
        let one = FiniteMetricSpace::new(1, vec![0.0]).unwrap();
        assert_eq!(gh_exact(&two, &one, 6).unwrap(), 1.0);

        let x = line_space(&[0.0, 1.0]);
        let y = line_space(&[0.0, 3.0]);
        assert_eq!(gh_exact(&x, &y, 6).unwrap(), 1.0);
    }

    #[test]
    fn exact_size_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_space(&mut rng, 7);
        let y = random_space(&mut rng, 3);
        assert!(matches!(
            gh_exact(&x, &y, 6),
            Err(GhError::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            let x = random_space(&mut rng, n);
            let y = random_space(&mut rng, m);
            let exact = gh_exact(&x, &y, 6).unwrap();
            let brute = gh_brute(&x, &y);
            assert!(
                (exact - brute).abs() <= 1e-12,
                "exact {exact} vs brute {brute} on sizes ({n}, {m})"
            );
        }
    }

    #[test]
    fn seven_correspondences_between_two_point_sets() {
        // sanity for the brute-force oracle itself
        let mut count = 0;
        for mask in 1u32..16 {
            let covers = |bit: u32| mask & bit != 0;
            let rows = (covers(1) || covers(2)) && (covers(4) || covers(8));
            let cols = (covers(1) || covers(4)) && (covers(2) || covers(8));
            if rows && cols {
                count += 1;
            }
        }
        assert_eq!(count, 7);
    }

    #[test]
    fn lower_bound_examples() {
        let x = line_space(&[0.0, 1.0, 3.0]);
        assert_eq!(gh_lower_bound(&x, &x), 0.0);

        let wide = line_space(&[0.0, 4.0]);
        let narrow = line_space(&[0.0, 1.0]);
        assert!(gh_lower_bound(&wide, &narrow) >= 1.5);
    }

    #[test]
    fn lower_bound_matches_exact_on_some_instances() {
        // Equilateral triple against a single point: every
        // correspondence forces two far points together.
        let mut d = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    d[i * 3 + j] = 2.0;
                }
            }
        }
        let x = FiniteMetricSpace::new(3, d).unwrap();
        let one = FiniteMetricSpace::new(1, vec![0.0]).unwrap();
        let lower = gh_lower_bound(&x, &one);
        let exact = gh_exact(&x, &one, 6).unwrap();
        assert_eq!(lower, exact);
        assert_eq!(exact, 1.0);
    }

    #[test]
    fn bounds_bracket_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=4);
            let x = random_space(&mut rng, n);
            let y = random_space(&mut rng, m);
            let exact = gh_exact(&x, &y, 6).unwrap();
            let lower = gh_lower_bound(&x, &y);
            let (upper, cert) = gh_upper_bound(&x, &y, 2);
            assert!(lower <= exact + 1e-12, "lower {lower} > exact {exact}");
            assert!(upper >= exact - 1e-12, "upper {upper} < exact {exact}");
            let dis = distortion(&cert, &x, &y).unwrap();
            assert_eq!(dis, 2.0 * upper);
        }
    }

    #[test]
    fn upper_bound_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = random_space(&mut rng, 5);
        let (upper, _) = gh_upper_bound(&x, &x, 0);
        assert!(upper <= 1e-12, "self upper bound {upper}");
    }

    #[test]
    fn upper_usually_equals_exact_on_four_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut hits = 0;
        for _ in 0..100 {
            let x = random_space(&mut rng, 4);
            let y = random_space(&mut rng, 4);
            let exact = gh_exact(&x, &y, 6).unwrap();
            let (upper, _) = gh_upper_bound(&x, &y, 10);
            assert!(upper >= exact - 1e-12);
            if upper <= exact + 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "only {hits}/100 matched the exact value");
    }

    #[test]
    fn exact_scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let x = random_space(&mut rng, 4);
        let y = random_space(&mut rng, 3);
        let base = gh_exact(&x, &y, 6).unwrap();
        for &s in &[2.0, 0.125, 7.5] {
            let scaled = gh_exact(&x.scaled(s), &y.scaled(s), 6).unwrap();
            assert!((scaled - s * base).abs() <= 1e-12 * (1.0 + s * base));
        }
    }

    #[test]
    fn sample_cube_two_points_realize_max_vertex_distance() {
        let p = fixtures::cube();
        let sample = sample_polyhedron(&p, 2, 8).unwrap();
        let d01 = sample.space.dist(0, 1);
        let g = build_metric_graph(&p, 8);
        // exactly the farthest point from the seed ...
        let row0 = g.node_distances(sample.node_ids[0]);
        for j in 0..8 {
            assert!(d01 >= row0[j] - 1e-12);
        }
        // ... and within discretization slack of the best vertex pair
        // (the four opposite-corner pairs tie on the exact surface but
        // the Steiner graph breaks the tie by a small amount).
        let mut global: f64 = 0.0;
        for i in 0..8 {
            let row = g.node_distances(i);
            for j in 0..8 {
                global = global.max(row[j]);
            }
        }
        assert!(d01 >= global - 0.02, "{d01} vs global max {global}");
    }

    #[test]
    fn sample_cube_recovers_vertices() {
        let p = fixtures::cube();
        let sample = sample_polyhedron(&p, 8, 16).unwrap();
        let mut ids = sample.node_ids.clone();
        ids.sort_unstable();
        assert_eq!(ids, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn sample_size_errors() {
        let p = fixtures::tetrahedron();
        assert!(matches!(
            sample_polyhedron(&p, 1, 0),
            Err(GhError::SampleTooSmall(1))
        ));
        assert!(matches!(
            sample_polyhedron(&p, 5, 0),
            Err(GhError::SampleTooLarge { .. })
        ));
    }
}
