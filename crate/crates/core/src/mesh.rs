//! Structured triangulations of the two stacked rectangular subdomains.
//!
//! The fluid region sits on top of the porous region; they share the
//! horizontal segment Γ. Each rectangle is split into `nx * ny` cells and
//! every cell is cut along its lower-left to upper-right diagonal.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::error::MeshError;

/// Tolerance used to match interface vertices between the two meshes.
pub const INTERFACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn is_degenerate(&self) -> bool {
        !(self.x1 > self.x0 && self.y1 > self.y0) || !self.area().is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subdomain {
    Fluid,
    Porous,
}

impl Subdomain {
    /// Side of the rectangle that touches Γ in the stacked geometry.
    pub fn interface_side(self) -> Side {
        match self {
            Subdomain::Fluid => Side::Bottom,
            Subdomain::Porous => Side::Top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn index(self) -> usize {
        match self {
            Side::Bottom => 0,
            Side::Right => 1,
            Side::Top => 2,
            Side::Left => 3,
        }
    }

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Side::Bottom => [0.0, -1.0],
            Side::Right => [1.0, 0.0],
            Side::Top => [0.0, 1.0],
            Side::Left => [-1.0, 0.0],
        }
    }

    /// Cartesian component carrying the normal direction (0 = x, 1 = y).
    pub fn normal_component(self) -> usize {
        match self {
            Side::Bottom | Side::Top => 1,
            Side::Left | Side::Right => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTag {
    Interior,
    Exterior(Side),
    Interface,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub tag: EdgeTag,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Local edge `k` of a triangle joins its vertices `k` and `(k + 1) % 3`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    pub subdomain: Subdomain,
    pub rect: Rectangle,
    pub nx: usize,
    pub ny: usize,
}

/// Builds the structured triangulation of `rect` with `nx * ny` cells.
pub fn build_rectangle_mesh(
    rect: Rectangle,
    nx: usize,
    ny: usize,
    subdomain: Subdomain,
) -> Result<Mesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidCellCount { nx, ny });
    }
    if rect.is_degenerate() {
        return Err(MeshError::DegenerateRectangle {
            x0: rect.x0,
            x1: rect.x1,
            y0: rect.y0,
            y1: rect.y1,
        });
    }

    let hx = (rect.x1 - rect.x0) / nx as f64;
    let hy = (rect.y1 - rect.y0) / ny as f64;
    let vid = |i: usize, j: usize| j * (nx + 1) + i;

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // Pin the last row/column to the exact rectangle bounds so the
        // interface ordinate is reproduced bit-for-bit on both meshes.
        let y = if j == ny { rect.y1 } else { rect.y0 + j as f64 * hy };
        for i in 0..=nx {
            let x = if i == nx { rect.x1 } else { rect.x0 + i as f64 * hx };
            vertices.push([x, y]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let ll = vid(i, j);
            let lr = vid(i + 1, j);
            let ul = vid(i, j + 1);
            let ur = vid(i + 1, j + 1);
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }

    let side_of = |a: usize, b: usize| -> Option<Side> {
        let (ia, ja) = (a % (nx + 1), a / (nx + 1));
        let (ib, jb) = (b % (nx + 1), b / (nx + 1));
        if ja == 0 && jb == 0 {
            Some(Side::Bottom)
        } else if ja == ny && jb == ny {
            Some(Side::Top)
        } else if ia == 0 && ib == 0 {
            Some(Side::Left)
        } else if ia == nx && ib == nx {
            Some(Side::Right)
        } else {
            None
        }
    };

    let interface_side = subdomain.interface_side();
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let mut local = [0usize; 3];
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            let id = *lookup.entry(key).or_insert_with(|| {
                let tag = match side_of(key.0, key.1) {
                    Some(side) if side == interface_side => EdgeTag::Interface,
                    Some(side) => EdgeTag::Exterior(side),
                    None => EdgeTag::Interior,
                };
                edges.push(Edge {
                    vertices: [key.0, key.1],
                    tag,
                });
                edges.len() - 1
            });
            local[k] = id;
        }
        triangle_edges.push(local);
    }

    Ok(Mesh {
        vertices,
        triangles,
        triangle_edges,
        edges,
        subdomain,
        rect,
        nx,
        ny,
    })
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Largest cell diameter along either axis.
    pub fn mesh_size(&self) -> f64 {
        let hx = (self.rect.x1 - self.rect.x0) / self.nx as f64;
        let hy = (self.rect.y1 - self.rect.y0) / self.ny as f64;
        hx.max(hy)
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
    }

    /// Interface edges ordered by increasing x, each with its vertices
    /// ordered left to right.
    pub fn interface_edges(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].tag == EdgeTag::Interface)
            .collect();
        ids.sort_by(|&a, &b| {
            self.edge_midpoint(a)[0]
                .partial_cmp(&self.edge_midpoint(b)[0])
                .expect("finite coordinates")
        });
        ids
    }

    /// Interface vertices ordered by increasing x.
    pub fn interface_vertices(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.tag == EdgeTag::Interface)
            .flat_map(|e| e.vertices)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.sort_by(|&a, &b| {
            self.vertices[a][0]
                .partial_cmp(&self.vertices[b][0])
                .expect("finite coordinates")
        });
        ids
    }

    pub fn edges_on_side(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.tag == EdgeTag::Exterior(side))
            .map(|(i, _)| i)
    }

    /// Writes the mesh with optional per-vertex point data as a legacy VTK
    /// unstructured grid.
    pub fn write_vtk<W: Write>(
        &self,
        out: &mut W,
        scalars: &[(&str, &[f64])],
        vectors: &[(&str, &[[f64; 2]])],
    ) -> io::Result<()> {
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "{:?} subdomain mesh", self.subdomain)?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
        writeln!(out, "POINTS {} double", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(out, "{:.16e} {:.16e} 0", v[0], v[1])?;
        }
        let nt = self.triangles.len();
        writeln!(out, "CELLS {} {}", nt, 4 * nt)?;
        for t in &self.triangles {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(out, "CELL_TYPES {nt}")?;
        for _ in 0..nt {
            writeln!(out, "5")?;
        }
        if scalars.is_empty() && vectors.is_empty() {
            return Ok(());
        }
        writeln!(out, "POINT_DATA {}", self.vertices.len())?;
        for (name, values) in scalars {
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in values.iter() {
                writeln!(out, "{v:.16e}")?;
            }
        }
        for (name, values) in vectors {
            writeln!(out, "VECTORS {name} double")?;
            for v in values.iter() {
                writeln!(out, "{:.16e} {:.16e} 0", v[0], v[1])?;
            }
        }
        Ok(())
    }
}

/// Vertex correspondence across Γ between the fluid and porous meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceMap {
    pub fluid_vertices: Vec<usize>,
    pub porous_vertices: Vec<usize>,
    pub fluid_edges: Vec<usize>,
    pub porous_edges: Vec<usize>,
    /// Arc length along Γ measured from its left end point.
    pub arc_length: Vec<f64>,
}

pub fn build_interface_map(fluid: &Mesh, porous: &Mesh) -> Result<InterfaceMap, MeshError> {
    if fluid.subdomain != Subdomain::Fluid || porous.subdomain != Subdomain::Porous {
        return Err(MeshError::SubdomainMismatch);
    }
    let fv = fluid.interface_vertices();
    let pv = porous.interface_vertices();
    if fv.len() != pv.len() {
        return Err(MeshError::InterfaceCountMismatch {
            fluid: fv.len(),
            porous: pv.len(),
        });
    }
    for (index, (&a, &b)) in fv.iter().zip(&pv).enumerate() {
        let (pa, pb) = (fluid.vertices[a], porous.vertices[b]);
        if (pa[0] - pb[0]).abs() > INTERFACE_TOLERANCE || (pa[1] - pb[1]).abs() > INTERFACE_TOLERANCE {
            return Err(MeshError::InterfaceCoordinateMismatch {
                index,
                fluid: pa,
                porous: pb,
            });
        }
    }
    let x_start = fluid.vertices[fv[0]][0];
    let arc_length = fv.iter().map(|&v| fluid.vertices[v][0] - x_start).collect();
    Ok(InterfaceMap {
        fluid_vertices: fv,
        porous_vertices: pv,
        fluid_edges: fluid.interface_edges(),
        porous_edges: porous.interface_edges(),
        arc_length,
    })
}

impl InterfaceMap {
    pub fn len(&self) -> usize {
        self.fluid_vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fluid_vertices.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.arc_length.last().unwrap_or(&0.0)
    }

    pub fn fluid_to_porous(&self, fluid_vertex: usize) -> Option<usize> {
        self.fluid_vertices
            .iter()
            .position(|&v| v == fluid_vertex)
            .map(|k| self.porous_vertices[k])
    }

    pub fn porous_to_fluid(&self, porous_vertex: usize) -> Option<usize> {
        self.porous_vertices
            .iter()
            .position(|&v| v == porous_vertex)
            .map(|k| self.fluid_vertices[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rectangle {
        Rectangle::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn counts_follow_structured_formula() {
        let m = build_rectangle_mesh(unit(), 4, 4, Subdomain::Porous).unwrap();
        assert_eq!(m.n_vertices(), 25);
        assert_eq!(m.n_triangles(), 32);
        // Euler: V - E + F = 1 for a disc.
        assert_eq!(m.n_vertices() + m.n_triangles() - m.n_edges(), 1);
    }

    #[test]
    fn single_cell_has_all_edges_on_boundary() {
        let m = build_rectangle_mesh(unit(), 1, 1, Subdomain::Porous).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_triangles(), 2);
        let boundary = m.edges.iter().filter(|e| e.tag != EdgeTag::Interior).count();
        assert_eq!(boundary, 4);
        assert_eq!(m.n_edges(), 5);
    }

    #[test]
    fn fluid_interface_edges_lie_on_y_equal_one() {
        let m = build_rectangle_mesh(Rectangle::new(0.0, 1.0, 1.0, 2.0), 8, 8, Subdomain::Fluid)
            .unwrap();
        let on_line: Vec<usize> = (0..m.n_edges())
            .filter(|&e| {
                let [a, b] = m.edges[e].vertices;
                m.vertices[a][1] == 1.0 && m.vertices[b][1] == 1.0
            })
            .collect();
        let tagged = m.interface_edges();
        assert_eq!(on_line.len(), 8);
        let mut sorted = tagged.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, on_line);
        assert_eq!(m.interface_vertices().len(), 9);
    }

    #[test]
    fn triangles_are_counterclockwise_and_tile_the_rectangle() {
        let rect = Rectangle::new(-0.5, 2.0, 1.0, 1.7);
        let m = build_rectangle_mesh(rect, 7, 3, Subdomain::Fluid).unwrap();
        let mut total = 0.0;
        for t in 0..m.n_triangles() {
            let a = m.signed_area(t);
            assert!(a > 0.0);
            total += a;
        }
        assert!((total - rect.area()).abs() <= 1e-12 * rect.area());
    }

    #[test]
    fn every_boundary_vertex_has_a_tagged_edge() {
        let m = build_rectangle_mesh(unit(), 5, 3, Subdomain::Porous).unwrap();
        let mut touched = vec![false; m.n_vertices()];
        for e in m.edges.iter().filter(|e| e.tag != EdgeTag::Interior) {
            for v in e.vertices {
                touched[v] = true;
            }
        }
        for (v, p) in m.vertices.iter().enumerate() {
            let on_boundary = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
            assert_eq!(on_boundary, touched[v], "vertex {v} at {p:?}");
        }
        let per_side: Vec<usize> = Side::ALL
            .iter()
            .map(|&s| m.edges_on_side(s).count())
            .collect();
        // top side of the porous block is the interface
        assert_eq!(per_side, vec![5, 3, 0, 3]);
        assert_eq!(m.interface_edges().len(), 5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            build_rectangle_mesh(unit(), 0, 3, Subdomain::Fluid),
            Err(MeshError::InvalidCellCount { .. })
        ));
        assert!(matches!(
            build_rectangle_mesh(Rectangle::new(0.0, 0.0, 0.0, 1.0), 2, 2, Subdomain::Fluid),
            Err(MeshError::DegenerateRectangle { .. })
        ));
    }

    fn stacked(nf: usize, np: usize) -> (Mesh, Mesh) {
        let f = build_rectangle_mesh(Rectangle::new(0.0, 1.0, 1.0, 2.0), nf, nf, Subdomain::Fluid)
            .unwrap();
        let p = build_rectangle_mesh(unit(), np, np, Subdomain::Porous).unwrap();
        (f, p)
    }

    #[test]
    fn matched_meshes_pair_all_interface_vertices() {
        let (f, p) = stacked(8, 8);
        let map = build_interface_map(&f, &p).unwrap();
        assert_eq!(map.len(), 9);
        assert!(map.arc_length.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(map.length(), 1.0);
        for (&a, &b) in map.fluid_vertices.iter().zip(&map.porous_vertices) {
            assert_eq!(map.fluid_to_porous(a), Some(b));
            assert_eq!(map.porous_to_fluid(map.fluid_to_porous(a).unwrap()), Some(a));
        }
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let (f, p) = stacked(8, 4);
        assert_eq!(
            build_interface_map(&f, &p),
            Err(MeshError::InterfaceCountMismatch { fluid: 9, porous: 5 })
        );
    }

    #[test]
    fn perturbed_vertex_is_rejected() {
        let (f, mut p) = stacked(8, 8);
        let v = p.interface_vertices()[3];
        p.vertices[v][0] += 1e-6;
        assert!(matches!(
            build_interface_map(&f, &p),
            Err(MeshError::InterfaceCoordinateMismatch { .. })
        ));
    }

    #[test]
    fn vtk_dump_has_expected_sections() {
        let m = build_rectangle_mesh(unit(), 2, 2, Subdomain::Porous).unwrap();
        let p: Vec<f64> = m.vertices.iter().map(|v| v[0]).collect();
        let mut buf = Vec::new();
        m.write_vtk(&mut buf, &[("pressure", &p)], &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("POINTS 9 double"));
        assert!(text.contains("CELLS 8 32"));
        assert!(text.contains("SCALARS pressure double 1"));
    }
}
