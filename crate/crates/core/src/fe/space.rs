//! Taylor-Hood degree-of-freedom map of one subdomain, with the interface
//! coupling to the piecewise-linear multiplier space on Γ.
//!
//! Numbering: quadratic nodes are the mesh vertices followed by the edge
//! midpoints. Velocity component `c` at node `i` is dof `c * n_nodes + i`;
//! pressure at vertex `v` is dof `2 * n_nodes + v`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::fe::basis::{p2_edge_values, p2_values, ElementGeometry};
use crate::fe::fields::WallKind;
use crate::fe::quadrature::{gauss_legendre, triangle_degree4};
use crate::fe::sparse::{CsrMatrix, SparsityPattern};
use crate::mesh::{EdgeTag, Mesh, Side};

/// Local dofs per element: 6 nodes x 2 components, then 3 pressures.
pub const LOCAL_DOFS: usize = 15;

/// An edge of Γ as seen from one subdomain, nodes ordered left to right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceEdge {
    pub edge: usize,
    pub nodes: [usize; 3],
    pub multipliers: [usize; 2],
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct EssentialDof {
    pub dof: usize,
    pub node: usize,
    pub component: usize,
    /// Side whose boundary data fixes the value.
    pub side: Side,
}

#[derive(Debug)]
pub struct TaylorHoodSpace {
    pub mesh: Arc<Mesh>,
    pub n_nodes: usize,
    pub walls: [WallKind; 4],
    pub element_dofs: Vec<[usize; LOCAL_DOFS]>,
    pub geometry: Vec<ElementGeometry>,
    pub pattern: Arc<SparsityPattern>,
    /// Storage slot of local entry `(a, b)` at index `a * LOCAL_DOFS + b`.
    pub element_slots: Vec<[u32; LOCAL_DOFS * LOCAL_DOFS]>,
    pub essential: Vec<EssentialDof>,
    pub is_free: Vec<bool>,
    pub interface_edges: Vec<InterfaceEdge>,
    /// Mesh vertices carrying the multiplier basis, ordered along Γ.
    pub multiplier_vertices: Vec<usize>,
    /// Rows `(dof, [(multiplier, value)])` of the coupling matrix
    /// `G[i][k] = ∫_Γ (phi_i · n) zeta_k`.
    pub coupling: Vec<(usize, Vec<(usize, f64)>)>,
    /// Velocity mass matrix (both components) on the full pattern.
    pub velocity_mass: CsrMatrix,
    /// Pressure mass matrix on the full pattern.
    pub pressure_mass: CsrMatrix,
}

impl TaylorHoodSpace {
    /// Builds the dof map. `walls` gives the condition kind per side; the
    /// interface side is never essential.
    pub fn new(mesh: Arc<Mesh>, walls: [WallKind; 4]) -> Self {
        let nv = mesh.n_vertices();
        let n_nodes = nv + mesh.n_edges();
        let n_total = 2 * n_nodes + nv;

        let element_dofs: Vec<[usize; LOCAL_DOFS]> = (0..mesh.n_triangles())
            .map(|t| {
                let tri = mesh.triangles[t];
                let te = mesh.triangle_edges[t];
                let nodes = [tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]];
                let mut d = [0usize; LOCAL_DOFS];
                for c in 0..2 {
                    for k in 0..6 {
                        d[c * 6 + k] = c * n_nodes + nodes[k];
                    }
                }
                for k in 0..3 {
                    d[12 + k] = 2 * n_nodes + tri[k];
                }
                d
            })
            .collect();
        let geometry = mesh
            .triangles
            .iter()
            .map(|tri| ElementGeometry::new(tri.map(|v| mesh.vertices[v])))
            .collect();

        let mut rows = vec![BTreeSet::new(); n_total];
        for d in &element_dofs {
            for &i in d {
                rows[i].extend(d.iter().copied());
            }
        }
        let pattern = Arc::new(SparsityPattern::from_rows(rows));
        let element_slots = element_dofs
            .iter()
            .map(|d| {
                let mut s = [0u32; LOCAL_DOFS * LOCAL_DOFS];
                for a in 0..LOCAL_DOFS {
                    for b in 0..LOCAL_DOFS {
                        s[a * LOCAL_DOFS + b] =
                            pattern.position(d[a], d[b]).expect("element entry in pattern") as u32;
                    }
                }
                s
            })
            .collect();

        let interface_side = mesh.subdomain.interface_side();
        let mut essential = Vec::new();
        let mut is_free = vec![true; n_total];
        for side in Side::ALL {
            if side == interface_side {
                continue;
            }
            let components: &[usize] = match walls[side.index()] {
                WallKind::Velocity => &[0, 1],
                WallKind::NormalVelocity => match side.normal_component() {
                    0 => &[0],
                    _ => &[1],
                },
                WallKind::Traction => &[],
            };
            for e in mesh.edges_on_side(side) {
                let [a, b] = mesh.edges[e].vertices;
                for node in [a, b, nv + e] {
                    for &c in components {
                        let dof = c * n_nodes + node;
                        if is_free[dof] {
                            is_free[dof] = false;
                            essential.push(EssentialDof {
                                dof,
                                node,
                                component: c,
                                side,
                            });
                        }
                    }
                }
            }
        }

        let multiplier_vertices = mesh.interface_vertices();
        let interface_edges: Vec<InterfaceEdge> = mesh
            .interface_edges()
            .into_iter()
            .map(|e| {
                let [a, b] = mesh.edges[e].vertices;
                let (l, r) = if mesh.vertices[a][0] < mesh.vertices[b][0] { (a, b) } else { (b, a) };
                let index = |v: usize| {
                    multiplier_vertices
                        .iter()
                        .position(|&m| m == v)
                        .expect("interface edge vertex on Γ")
                };
                InterfaceEdge {
                    edge: e,
                    nodes: [l, r, nv + e],
                    multipliers: [index(l), index(r)],
                    length: mesh.edge_length(e),
                }
            })
            .collect();

        let normal = interface_side.outward_normal();
        let line = gauss_legendre(3);
        let mut coupling_rows: std::collections::BTreeMap<usize, Vec<(usize, f64)>> =
            Default::default();
        for ie in &interface_edges {
            for c in 0..2 {
                if normal[c] == 0.0 {
                    continue;
                }
                for (k, &node) in ie.nodes.iter().enumerate() {
                    let dof = c * n_nodes + node;
                    for (m, &zeta) in ie.multipliers.iter().enumerate() {
                        let mut v = 0.0;
                        for (s, w) in line.points.iter().zip(&line.weights) {
                            let hat = if m == 0 { 1.0 - s } else { *s };
                            v += w * p2_edge_values(*s)[k] * hat;
                        }
                        let row = coupling_rows.entry(dof).or_default();
                        let val = v * ie.length * normal[c];
                        match row.iter_mut().find(|(z, _)| *z == zeta) {
                            Some(entry) => entry.1 += val,
                            None => row.push((zeta, val)),
                        }
                    }
                }
            }
        }

        let mut space = Self {
            velocity_mass: CsrMatrix::zeros(pattern.clone()),
            pressure_mass: CsrMatrix::zeros(pattern.clone()),
            mesh,
            n_nodes,
            walls,
            element_dofs,
            geometry,
            pattern,
            element_slots,
            essential,
            is_free,
            interface_edges,
            multiplier_vertices,
            coupling: coupling_rows.into_iter().collect(),
        };
        space.assemble_masses();
        space
    }

    fn assemble_masses(&mut self) {
        let rule = triangle_degree4();
        for (t, geo) in self.geometry.iter().enumerate() {
            let slots = &self.element_slots[t];
            for (lam, w) in rule.points.iter().zip(&rule.weights) {
                let phi = p2_values(lam);
                let wa = w * geo.area;
                for a in 0..6 {
                    for b in 0..6 {
                        let m = wa * phi[a] * phi[b];
                        for c in 0..2 {
                            let slot = slots[(c * 6 + a) * LOCAL_DOFS + c * 6 + b] as usize;
                            self.velocity_mass.values[slot] += m;
                        }
                    }
                }
                for a in 0..3 {
                    for b in 0..3 {
                        let slot = slots[(12 + a) * LOCAL_DOFS + 12 + b] as usize;
                        self.pressure_mass.values[slot] += wa * lam[a] * lam[b];
                    }
                }
            }
        }
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.n_nodes + self.mesh.n_vertices()
    }

    pub fn n_velocity(&self) -> usize {
        2 * self.n_nodes
    }

    pub fn n_pressure(&self) -> usize {
        self.mesh.n_vertices()
    }

    pub fn n_multipliers(&self) -> usize {
        self.multiplier_vertices.len()
    }

    pub fn velocity_dof(&self, node: usize, component: usize) -> usize {
        component * self.n_nodes + node
    }

    pub fn pressure_dof(&self, vertex: usize) -> usize {
        2 * self.n_nodes + vertex
    }

    pub fn node_coords(&self, node: usize) -> [f64; 2] {
        let nv = self.mesh.n_vertices();
        if node < nv {
            self.mesh.vertices[node]
        } else {
            self.mesh.edge_midpoint(node - nv)
        }
    }

    /// Coupling load `G lambda` (length `n_dofs`).
    pub fn coupling_apply(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs()];
        self.coupling_apply_add(lambda, 1.0, &mut out);
        out
    }

    /// `out += scale * G lambda`.
    pub fn coupling_apply_add(&self, lambda: &[f64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(lambda.len(), self.n_multipliers());
        for (dof, row) in &self.coupling {
            out[*dof] += scale * row.iter().map(|(k, v)| v * lambda[*k]).sum::<f64>();
        }
    }

    /// Interface trace `G^T u`: entries `∫_Γ (u · n) zeta_k`.
    pub fn coupling_transpose(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_multipliers()];
        for (dof, row) in &self.coupling {
            for (k, v) in row {
                out[*k] += v * u[*dof];
            }
        }
        out
    }

    /// Velocity at every node as a vector field.
    pub fn nodal_velocity(&self, x: &[f64]) -> Vec<[f64; 2]> {
        (0..self.n_nodes)
            .map(|i| [x[i], x[self.n_nodes + i]])
            .collect()
    }

    pub fn pressure<'a>(&self, x: &'a [f64]) -> &'a [f64] {
        &x[2 * self.n_nodes..]
    }

    /// Nodal interpolation of velocity and pressure functions.
    pub fn interpolate(
        &self,
        velocity: impl Fn([f64; 2]) -> [f64; 2],
        pressure: impl Fn([f64; 2]) -> f64,
    ) -> Vec<f64> {
        let mut x = vec![0.0; self.n_dofs()];
        for node in 0..self.n_nodes {
            let u = velocity(self.node_coords(node));
            x[node] = u[0];
            x[self.n_nodes + node] = u[1];
        }
        for v in 0..self.mesh.n_vertices() {
            x[2 * self.n_nodes + v] = pressure(self.mesh.vertices[v]);
        }
        x
    }

    /// All edges carrying the natural load of the given side.
    pub fn traction_edges(&self, side: Side) -> Vec<usize> {
        if self.walls[side.index()] != WallKind::Traction
            || side == self.mesh.subdomain.interface_side()
        {
            return Vec::new();
        }
        self.mesh.edges_on_side(side).collect()
    }

    /// Quadratic nodes of an edge: start vertex, end vertex, midpoint.
    pub fn edge_nodes(&self, e: usize) -> [usize; 3] {
        let [a, b] = self.mesh.edges[e].vertices;
        [a, b, self.mesh.n_vertices() + e]
    }

    pub fn is_interface_edge(&self, e: usize) -> bool {
        self.mesh.edges[e].tag == EdgeTag::Interface
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rectangle_mesh, Rectangle, Subdomain};

    fn fluid_space(n: usize) -> TaylorHoodSpace {
        let mesh = build_rectangle_mesh(Rectangle::new(0.0, 1.0, 1.0, 2.0), n, n, Subdomain::Fluid)
            .unwrap();
        TaylorHoodSpace::new(Arc::new(mesh), [WallKind::Velocity; 4])
    }

    #[test]
    fn dof_counts() {
        let s = fluid_space(4);
        let m = &s.mesh;
        assert_eq!(s.n_velocity(), 2 * (m.n_vertices() + m.n_edges()));
        assert_eq!(s.n_pressure(), m.n_vertices());
        assert_eq!(s.n_multipliers(), 5);
    }

    #[test]
    fn essential_dofs_cover_walls_but_not_interface_interior() {
        let s = fluid_space(4);
        // boundary nodes excluding the open part of the interface:
        // 4 sides * 8 boundary nodes - 7 interior interface nodes
        let boundary_nodes = 4 * 8 - 7;
        assert_eq!(s.essential.len(), 2 * boundary_nodes);
        assert_eq!(s.is_free.iter().filter(|f| !**f).count(), s.essential.len());
    }

    #[test]
    fn mass_matrices_integrate_constants() {
        let s = fluid_space(3);
        let ones = s.interpolate(|_| [1.0, 1.0], |_| 1.0);
        let mu = s.velocity_mass.mul_vec(&ones);
        let total: f64 = mu[..s.n_velocity()].iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        let mp = s.pressure_mass.mul_vec(&ones);
        let total_p: f64 = mp[s.n_velocity()..].iter().sum();
        assert!((total_p - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coupling_of_unit_normal_flow_gives_hat_integrals() {
        let s = fluid_space(2);
        // u = (0, -1) has u . n_f = 1 on the fluid side of y = 1
        let u = s.interpolate(|_| [0.0, -1.0], |_| 0.0);
        let trace = s.coupling_transpose(&u);
        let expect = [0.25, 0.5, 0.25];
        for (t, e) in trace.iter().zip(expect) {
            assert!((t - e).abs() < 1e-14, "{trace:?}");
        }
    }
}
