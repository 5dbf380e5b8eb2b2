//! Pieces shared by the Stokes and Darcy step assemblies.

use crate::fe::basis::p2_edge_values;
use crate::fe::fields::{BoundaryCondition, ScalarField, Walls};
use crate::fe::quadrature::gauss_legendre;
use crate::fe::space::{TaylorHoodSpace, LOCAL_DOFS};
use crate::fe::sparse::CsrMatrix;
use crate::mesh::Side;

/// Dense element matrix in local dof order.
pub type LocalMatrix = [[f64; LOCAL_DOFS]; LOCAL_DOFS];

pub fn scatter(space: &TaylorHoodSpace, t: usize, local: &LocalMatrix, matrix: &mut CsrMatrix) {
    let slots = &space.element_slots[t];
    for a in 0..LOCAL_DOFS {
        for b in 0..LOCAL_DOFS {
            let v = local[a][b];
            if v != 0.0 {
                matrix.values[slots[a * LOCAL_DOFS + b] as usize] += v;
            }
        }
    }
}

/// `out[dofs] += local * x[dofs]`.
pub fn local_apply_add(space: &TaylorHoodSpace, t: usize, local: &LocalMatrix, x: &[f64], out: &mut [f64]) {
    let dofs = &space.element_dofs[t];
    for a in 0..LOCAL_DOFS {
        let s: f64 = (0..LOCAL_DOFS).map(|b| local[a][b] * x[dofs[b]]).sum();
        out[dofs[a]] += s;
    }
}

/// Boundary value imposed on every essential dof at time `t`.
pub fn essential_values(space: &TaylorHoodSpace, walls: &Walls, t: f64) -> Vec<(usize, f64)> {
    space
        .essential
        .iter()
        .map(|e| {
            let x = space.node_coords(e.node);
            let value = match walls.get(e.side) {
                Some(BoundaryCondition::Velocity(g)) | Some(BoundaryCondition::NormalVelocity(g)) => {
                    g(x, t)[e.component]
                }
                _ => 0.0,
            };
            (e.dof, value)
        })
        .collect()
}

/// Turns essential rows of a system into identity rows with the boundary value
/// as right-hand side.
pub fn apply_essential(matrix: &mut CsrMatrix, rhs: Option<&mut [f64]>, values: &[(usize, f64)]) {
    for &(dof, _) in values {
        matrix.set_identity_row(dof);
    }
    if let Some(rhs) = rhs {
        for &(dof, v) in values {
            rhs[dof] = v;
        }
    }
}

/// `out += scale * ∫_e f (v · n)` over the given edges, for every quadratic
/// velocity test function `v`.
pub fn add_normal_edge_load(
    space: &TaylorHoodSpace,
    edges: &[usize],
    normal: [f64; 2],
    f: &ScalarField,
    t: f64,
    scale: f64,
    out: &mut [f64],
) {
    let line = gauss_legendre(4);
    for &e in edges {
        let nodes = space.edge_nodes(e);
        let [a, b] = space.mesh.edges[e].vertices.map(|v| space.mesh.vertices[v]);
        let len = space.mesh.edge_length(e);
        for (s, w) in line.points.iter().zip(&line.weights) {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let fv = scale * w * len * f(x, t);
            let phi = p2_edge_values(*s);
            for (k, &node) in nodes.iter().enumerate() {
                for (c, nc) in normal.iter().enumerate() {
                    if *nc != 0.0 {
                        out[space.velocity_dof(node, c)] += fv * phi[k] * nc;
                    }
                }
            }
        }
    }
}

/// Natural loads `-(p_b, v · n)` from every traction side.
pub fn add_traction_loads(space: &TaylorHoodSpace, walls: &Walls, t: f64, out: &mut [f64]) {
    for side in Side::ALL {
        if let Some(BoundaryCondition::Traction(p)) = walls.get(side) {
            let edges = space.traction_edges(side);
            add_normal_edge_load(space, &edges, side.outward_normal(), p, t, -1.0, out);
        }
    }
}

/// Adds `c ∫_Γ (u · τ)(v · τ)` with τ = (1, 0) to the matrix.
pub fn add_tangential_interface_mass(space: &TaylorHoodSpace, c: f64, matrix: &mut CsrMatrix) {
    if c == 0.0 {
        return;
    }
    let line = gauss_legendre(3);
    for ie in &space.interface_edges {
        let nodes = space.edge_nodes(ie.edge);
        for (s, w) in line.points.iter().zip(&line.weights) {
            let phi = p2_edge_values(*s);
            for k in 0..3 {
                for l in 0..3 {
                    matrix.add(
                        space.velocity_dof(nodes[k], 0),
                        space.velocity_dof(nodes[l], 0),
                        c * w * ie.length * phi[k] * phi[l],
                    );
                }
            }
        }
    }
}

pub fn zero_local() -> LocalMatrix {
    [[0.0; LOCAL_DOFS]; LOCAL_DOFS]
}

/// Velocity value and gradient at a quadrature point from local coefficients.
pub fn velocity_at(
    x: &[f64],
    dofs: &[usize; LOCAL_DOFS],
    phi: &[f64; 6],
    grad: &[[f64; 2]; 6],
) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut u = [0.0; 2];
    let mut g = [[0.0; 2]; 2];
    for c in 0..2 {
        for a in 0..6 {
            let coef = x[dofs[c * 6 + a]];
            u[c] += coef * phi[a];
            g[c][0] += coef * grad[a][0];
            g[c][1] += coef * grad[a][1];
        }
    }
    (u, g)
}

pub fn sym_grad(g: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

pub fn frobenius(d: &[[f64; 2]; 2]) -> f64 {
    (d[0][0] * d[0][0] + d[0][1] * d[0][1] + d[1][0] * d[1][0] + d[1][1] * d[1][1]).sqrt()
}
