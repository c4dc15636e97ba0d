//! Approximate intrinsic metric on a polyhedron.
//!
//! The distance between two surface points is computed as a shortest
//! path in a graph whose nodes are the vertex classes plus `m` evenly
//! spaced Steiner points on every glued edge, with an arc between any
//! two nodes on the boundary of a common triangle weighted by the
//! within-triangle chart distance. Model triangles are convex, so the
//! chart segment between two boundary points stays inside the triangle
//! and each arc weight is an exact path length; the only error is the
//! forced crossing of edges at Steiner points, which shrinks as `m`
//! grows. The result is always an upper bound on the intrinsic
//! distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::model::{chart_distance, geodesic_point, ChartPoint, Curvature};
use crate::polyhedron::KPolyhedron;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("triangle {0} out of range")]
    TriangleOutOfRange(usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("edge parameter {0} must lie strictly inside (0, 1)")]
    EdgeParamOutOfRange(f64),
    #[error("vertex class {0} out of range")]
    UnknownVertex(usize),
    #[error("chart point {0:?} lies outside triangle {1}")]
    PointOutsideTriangle(ChartPoint, usize),
    #[error("chart point {0:?} does not lie on the model surface")]
    PointOffModel(ChartPoint),
}

/// A point on a polyhedral surface, anchored to the combinatorial data.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfacePoint {
    /// A vertex class.
    Vertex(usize),
    /// A point strictly inside edge `edge` of triangle `tri`, at
    /// arclength fraction `param` from the edge's start corner.
    Edge { tri: usize, edge: usize, param: f64 },
    /// A point inside triangle `tri`, in that triangle's chart.
    Interior { tri: usize, chart: ChartPoint },
}

/// Shortest-path graph over a polyhedron at a fixed edge resolution.
pub struct MetricGraph<'a> {
    poly: &'a KPolyhedron,
    resolution: usize,
    num_nodes: usize,
    adjacency: Vec<Vec<(u32, f64)>>,
    // All nodes on the boundary of each triangle, with their positions
    // in that triangle's chart.
    tri_boundary: Vec<Vec<(u32, ChartPoint)>>,
}

/// Builds the Steiner graph with `m` interior points per glued edge.
pub fn build_metric_graph(poly: &KPolyhedron, m: usize) -> MetricGraph<'_> {
    let kappa = poly.kappa();
    let num_classes = poly.num_vertices();
    let pairs = &poly.gluing().pairs;
    let num_nodes = num_classes + pairs.len() * m;

    let mut tri_boundary: Vec<Vec<(u32, ChartPoint)>> =
        vec![Vec::with_capacity(3 + 3 * m); poly.num_triangles()];
    for (t, boundary) in tri_boundary.iter_mut().enumerate() {
        let chart = poly.chart(t);
        for c in 0..3 {
            boundary.push((poly.class_of_corner(t, c) as u32, chart.vertices[c]));
        }
    }
    for (p, pair) in pairs.iter().enumerate() {
        for j in 1..=m {
            let node = (num_classes + p * m + (j - 1)) as u32;
            let s = j as f64 / (m + 1) as f64;
            for (slot, flip) in [(pair.first, false), (pair.second, pair.reversed)] {
                let (t, e) = slot;
                let chart = poly.chart(t);
                let len = poly.edge_length(t, e);
                let param = if flip { 1.0 - s } else { s };
                let pos = geodesic_point(
                    kappa,
                    chart.vertices[e],
                    chart.vertices[(e + 1) % 3],
                    param * len,
                );
                tri_boundary[t].push((node, pos));
            }
        }
    }

    let mut adjacency: Vec<Vec<(u32, f64)>> = vec![Vec::new(); num_nodes];
    for boundary in &tri_boundary {
        for (i, &(ni, pi)) in boundary.iter().enumerate() {
            for &(nj, pj) in boundary.iter().skip(i + 1) {
                if ni == nj {
                    continue;
                }
                let w = chart_distance(kappa, pi, pj);
                adjacency[ni as usize].push((nj, w));
                adjacency[nj as usize].push((ni, w));
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }

    MetricGraph {
        poly,
        resolution: m,
        num_nodes,
        adjacency,
        tri_boundary,
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want the minimum;
        // node id breaks ties for reproducible exploration order
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> MetricGraph<'a> {
    pub fn polyhedron(&self) -> &'a KPolyhedron {
        self.poly
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// The surface point a graph node stands for.
    pub fn node_point(&self, node: usize) -> SurfacePoint {
        let num_classes = self.poly.num_vertices();
        if node < num_classes {
            SurfacePoint::Vertex(node)
        } else {
            let m = self.resolution;
            let pair_ix = (node - num_classes) / m;
            let j = (node - num_classes) % m + 1;
            let (tri, edge) = self.poly.gluing().pairs[pair_ix].first;
            SurfacePoint::Edge {
                tri,
                edge,
                param: j as f64 / (m + 1) as f64,
            }
        }
    }

    /// Shortest-path distances from a node to every node.
    pub fn node_distances(&self, node: usize) -> Vec<f64> {
        self.dijkstra(&[(node as u32, 0.0)])
    }

    /// Upper bound on the intrinsic distance between two anchored
    /// points. Exact whenever a single triangle hosts both points.
    pub fn distance(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<f64, SurfaceError> {
        if x == y {
            return Ok(0.0);
        }
        let xl = self.anchor_links(x)?;
        let yl = self.anchor_links(y)?;
        let mut best = f64::INFINITY;
        // Direct within-triangle segment when a common chart hosts both.
        for &(tx, px) in &xl.hosts {
            for &(ty, py) in &yl.hosts {
                if tx == ty {
                    best = best.min(chart_distance(self.poly.kappa(), px, py));
                }
            }
        }
        let dist = self.dijkstra(&xl.links);
        for &(n, w) in &yl.links {
            let d = dist[n as usize] + w;
            if d < best {
                best = d;
            }
        }
        Ok(best)
    }

    /// Distances from an anchored point to every graph node.
    pub fn distances_to_nodes(&self, x: &SurfacePoint) -> Result<Vec<f64>, SurfaceError> {
        let xl = self.anchor_links(x)?;
        Ok(self.dijkstra(&xl.links))
    }

    fn dijkstra(&self, sources: &[(u32, f64)]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.num_nodes];
        let mut heap = BinaryHeap::with_capacity(self.num_nodes);
        for &(n, w) in sources {
            if w < dist[n as usize] {
                dist[n as usize] = w;
                heap.push(HeapEntry { dist: w, node: n });
            }
        }
        while let Some(HeapEntry { dist: d, node }) = heap.pop() {
            if d > dist[node as usize] {
                continue;
            }
            for &(next, w) in &self.adjacency[node as usize] {
                let nd = d + w;
                if nd < dist[next as usize] {
                    dist[next as usize] = nd;
                    heap.push(HeapEntry {
                        dist: nd,
                        node: next,
                    });
                }
            }
        }
        dist
    }

    fn anchor_links(&self, x: &SurfacePoint) -> Result<AnchorLinks, SurfaceError> {
        let kappa = self.poly.kappa();
        let mut hosts: Vec<(usize, ChartPoint)> = Vec::new();
        match *x {
            SurfacePoint::Vertex(v) => {
                if v >= self.poly.num_vertices() {
                    return Err(SurfaceError::UnknownVertex(v));
                }
                return Ok(AnchorLinks {
                    links: vec![(v as u32, 0.0)],
                    hosts,
                });
            }
            SurfacePoint::Edge { tri, edge, param } => {
                if tri >= self.poly.num_triangles() {
                    return Err(SurfaceError::TriangleOutOfRange(tri));
                }
                if edge >= 3 {
                    return Err(SurfaceError::EdgeOutOfRange(edge));
                }
                if !(param > 0.0 && param < 1.0) {
                    return Err(SurfaceError::EdgeParamOutOfRange(param));
                }
                let ((t2, e2), reversed) = self.poly.partner(tri, edge);
                for (t, e, p) in [
                    (tri, edge, param),
                    (t2, e2, if reversed { 1.0 - param } else { param }),
                ] {
                    let chart = self.poly.chart(t);
                    let len = self.poly.edge_length(t, e);
                    let pos = geodesic_point(
                        kappa,
                        chart.vertices[e],
                        chart.vertices[(e + 1) % 3],
                        p * len,
                    );
                    hosts.push((t, pos));
                }
            }
            SurfacePoint::Interior { tri, chart } => {
                if tri >= self.poly.num_triangles() {
                    return Err(SurfaceError::TriangleOutOfRange(tri));
                }
                if !on_model(kappa, chart) {
                    return Err(SurfaceError::PointOffModel(chart));
                }
                if !self.poly.chart(tri).contains(chart) {
                    return Err(SurfaceError::PointOutsideTriangle(chart, tri));
                }
                hosts.push((tri, chart));
            }
        }
        let mut links = Vec::new();
        for &(t, pos) in &hosts {
            for &(node, npos) in &self.tri_boundary[t] {
                links.push((node, chart_distance(kappa, pos, npos)));
            }
        }
        Ok(AnchorLinks { links, hosts })
    }
}

struct AnchorLinks {
    links: Vec<(u32, f64)>,
    hosts: Vec<(usize, ChartPoint)>,
}

fn on_model(kappa: Curvature, p: ChartPoint) -> bool {
    let k = kappa.get();
    if k == 0.0 {
        p[2].abs() < 1e-9
    } else if k > 0.0 {
        (crate::model::dot(p, p) - 1.0).abs() < 1e-6
    } else {
        (crate::model::mdot(p, p) + 1.0).abs() < 1e-6 && p[2] > 0.0
    }
}

/// Convenience wrapper that builds the graph and queries one distance.
pub fn distance(
    poly: &KPolyhedron,
    x: &SurfacePoint,
    y: &SurfacePoint,
    m: usize,
) -> Result<f64, SurfaceError> {
    build_metric_graph(poly, m).distance(x, y)
}
