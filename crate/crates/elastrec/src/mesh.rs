//! Structured conforming triangulations of the unit square.
//!
//! An n-by-n grid of cells, each split along the lower-left to upper-right
//! diagonal, gives (n+1)^2 vertices and 2n^2 positively oriented triangles.
//! Boundary edges carry tags matching the experiment geometry: Dirichlet on
//! the bottom and top edges, traction on the left and right edges.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    DirichletBottom,
    DirichletTop,
    TractionLeft,
    TractionRight,
}

impl BoundaryTag {
    pub fn is_dirichlet(self) -> bool {
        matches!(self, BoundaryTag::DirichletBottom | BoundaryTag::DirichletTop)
    }
}

/// Axis-aligned rectangle, used for subdomain masks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Box2 {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Box2 { x0, x1, y0, y1 }
    }

    /// Strict interior test.
    pub fn contains_open(&self, p: [f64; 2]) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }

    /// Shrink the rectangle by `margin` on every side.
    pub fn shrunk(&self, margin: f64) -> Box2 {
        Box2::new(
            self.x0 + margin,
            self.x1 - margin,
            self.y0 + margin,
            self.y1 - margin,
        )
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    /// Subdivisions per side of the structured grid.
    pub n: usize,
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<([usize; 2], BoundaryTag)>,
}

impl TriMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Twice the signed area of triangle `t`.
    pub fn double_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1])
    }

    pub fn area(&self, t: usize) -> f64 {
        0.5 * self.double_area(t)
    }

    /// Gradients of the three P1 basis functions on triangle `t`.
    ///
    /// Constant per triangle; returned as three [d/dx, d/dy] rows.
    pub fn p1_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        let d = self.double_area(t);
        [
            [(pb[1] - pc[1]) / d, (pc[0] - pb[0]) / d],
            [(pc[1] - pa[1]) / d, (pa[0] - pc[0]) / d],
            [(pa[1] - pb[1]) / d, (pb[0] - pa[0]) / d],
        ]
    }

    /// Vertex indices on Dirichlet-tagged boundary edges.
    ///
    /// Corner vertices lie on both a Dirichlet and a traction edge; the
    /// Dirichlet tag wins for constraint purposes.
    pub fn dirichlet_vertices(&self) -> Vec<usize> {
        let mut mask = vec![false; self.num_vertices()];
        for &(edge, tag) in &self.boundary_edges {
            if tag.is_dirichlet() {
                mask[edge[0]] = true;
                mask[edge[1]] = true;
            }
        }
        mask.iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }

    /// All boundary vertices, irrespective of tag.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut mask = vec![false; self.num_vertices()];
        for &(edge, _) in &self.boundary_edges {
            mask[edge[0]] = true;
            mask[edge[1]] = true;
        }
        mask.iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }
}

/// Structured right-triangle mesh of (0,1)^2 with `n` subdivisions per side.
pub fn build_unit_square_mesh(n: usize) -> Result<TriMesh> {
    if n == 0 {
        return Err(Error::EmptyMesh);
    }
    let np = n + 1;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let idx = |i: usize, j: usize| j * np + i;

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            // diagonal a-c, both triangles counter-clockwise
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    let mut boundary_edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary_edges.push(([idx(i, 0), idx(i + 1, 0)], BoundaryTag::DirichletBottom));
        boundary_edges.push(([idx(i, n), idx(i + 1, n)], BoundaryTag::DirichletTop));
    }
    for j in 0..n {
        boundary_edges.push(([idx(0, j), idx(0, j + 1)], BoundaryTag::TractionLeft));
        boundary_edges.push(([idx(n, j), idx(n, j + 1)], BoundaryTag::TractionRight));
    }

    Ok(TriMesh {
        n,
        vertices,
        triangles,
        boundary_edges,
    })
}

/// Indices of vertices strictly inside `rect`. An empty result is permitted.
pub fn locate_subdomain_vertices(mesh: &TriMesh, rect: &Box2) -> Vec<usize> {
    mesh.vertices
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| rect.contains_open(p).then_some(i))
        .collect()
}
