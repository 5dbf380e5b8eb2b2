//! Lagrange shape functions on affine triangles.
//!
//! Quadratic local node order: the three vertices, then the midpoints of the
//! local edges (0,1), (1,2), (2,0).

/// Vertex pairs spanned by local quadratic nodes 3, 4, 5.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Affine map data of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(vertices: [[f64; 2]; 3]) -> Self {
        let [a, b, c] = vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let inv = 1.0 / det;
        // grad lambda_i is the rotated opposite edge divided by twice the area.
        let grad = |p: [f64; 2], q: [f64; 2]| [(p[1] - q[1]) * inv, (q[0] - p[0]) * inv];
        Self {
            vertices,
            area: 0.5 * det,
            grad_lambda: [grad(b, c), grad(c, a), grad(a, b)],
        }
    }

    pub fn point(&self, lam: &[f64; 3]) -> [f64; 2] {
        let mut x = [0.0; 2];
        for (l, v) in lam.iter().zip(&self.vertices) {
            x[0] += l * v[0];
            x[1] += l * v[1];
        }
        x
    }
}

pub fn p1_values(lam: &[f64; 3]) -> [f64; 3] {
    *lam
}

pub fn p2_values(lam: &[f64; 3]) -> [f64; 6] {
    let mut v = [0.0; 6];
    for k in 0..3 {
        v[k] = lam[k] * (2.0 * lam[k] - 1.0);
    }
    for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
        v[3 + k] = 4.0 * lam[*a] * lam[*b];
    }
    v
}

pub fn p2_gradients(lam: &[f64; 3], geo: &ElementGeometry) -> [[f64; 2]; 6] {
    let g = &geo.grad_lambda;
    let mut out = [[0.0; 2]; 6];
    for k in 0..3 {
        let s = 4.0 * lam[k] - 1.0;
        out[k] = [s * g[k][0], s * g[k][1]];
    }
    for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
        out[3 + k] = [
            4.0 * (lam[*a] * g[*b][0] + lam[*b] * g[*a][0]),
            4.0 * (lam[*a] * g[*b][1] + lam[*b] * g[*a][1]),
        ];
    }
    out
}

/// Quadratic shape functions on an edge parametrized by `s` in [0, 1]:
/// start vertex, end vertex, midpoint.
pub fn p2_edge_values(s: f64) -> [f64; 3] {
    [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)]
}
