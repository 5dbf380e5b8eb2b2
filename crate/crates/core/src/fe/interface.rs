//! Interface quantities on the multiplier space: traces and the Γ mass matrix.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::{CsrMatrix, SparsityPattern};

/// Entries `∫_Γ (u_f · n_f) zeta_k + ∫_Γ (u_p · n_p) zeta_k`.
pub fn interface_trace_residual(
    fluid: &TaylorHoodSpace,
    porous: &TaylorHoodSpace,
    u_f: &[f64],
    u_p: &[f64],
) -> Vec<f64> {
    let mut r = fluid.coupling_transpose(u_f);
    for (a, b) in r.iter_mut().zip(porous.coupling_transpose(u_p)) {
        *a += b;
    }
    r
}

/// Piecewise-linear mass matrix along Γ.
pub fn interface_mass_matrix(space: &TaylorHoodSpace) -> CsrMatrix {
    let n = space.n_multipliers();
    let mut rows = vec![BTreeSet::new(); n];
    for ie in &space.interface_edges {
        for &a in &ie.multipliers {
            rows[a].extend(ie.multipliers);
        }
    }
    let mut m = CsrMatrix::zeros(Arc::new(SparsityPattern::from_rows(rows)));
    for ie in &space.interface_edges {
        let [a, b] = ie.multipliers;
        let l = ie.length;
        m.add(a, a, l / 3.0);
        m.add(b, b, l / 3.0);
        m.add(a, b, l / 6.0);
        m.add(b, a, l / 6.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::fields::WallKind;
    use crate::mesh::{build_rectangle_mesh, Rectangle, Subdomain};

    fn spaces(n: usize, nx: usize) -> (TaylorHoodSpace, TaylorHoodSpace) {
        let f = build_rectangle_mesh(Rectangle::new(0.0, 1.0, 1.0, 2.0), nx, n, Subdomain::Fluid).unwrap();
        let p = build_rectangle_mesh(Rectangle::new(0.0, 1.0, 0.0, 1.0), nx, n, Subdomain::Porous).unwrap();
        (
            TaylorHoodSpace::new(Arc::new(f), [WallKind::Velocity; 4]),
            TaylorHoodSpace::new(Arc::new(p), [WallKind::NormalVelocity; 4]),
        )
    }

    #[test]
    fn zero_velocities_give_zero_residual() {
        let (f, p) = spaces(2, 2);
        let r = interface_trace_residual(&f, &p, &vec![0.0; f.n_dofs()], &vec![0.0; p.n_dofs()]);
        assert!(r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn continuous_normal_flow_cancels() {
        let (f, p) = spaces(2, 2);
        let uf = f.interpolate(|_| [0.0, -1.0], |_| 0.0);
        let up = p.interpolate(|_| [0.0, -1.0], |_| 0.0);
        let r = interface_trace_residual(&f, &p, &uf, &up);
        assert!(r.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn one_sided_flow_gives_lumped_hat_loads() {
        let (f, p) = spaces(2, 2);
        let uf = f.interpolate(|_| [0.0, -1.0], |_| 0.0);
        let r = interface_trace_residual(&f, &p, &uf, &vec![0.0; p.n_dofs()]);
        for (a, e) in r.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn single_element_mass_matrix() {
        let mesh = build_rectangle_mesh(Rectangle::new(0.0, 2.5, 1.0, 2.0), 1, 1, Subdomain::Fluid).unwrap();
        let s = TaylorHoodSpace::new(Arc::new(mesh), [WallKind::Velocity; 4]);
        let m = interface_mass_matrix(&s);
        let l = 2.5;
        assert!((m.get(0, 0) - l / 3.0).abs() < 1e-15);
        assert!((m.get(0, 1) - l / 6.0).abs() < 1e-15);
        assert!((m.get(1, 0) - l / 6.0).abs() < 1e-15);
        assert!((m.get(1, 1) - l / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mass_matrix_rows_and_constants() {
        let (f, _) = spaces(3, 5);
        let m = interface_mass_matrix(&f);
        let c = 1.7;
        let ones = vec![c; f.n_multipliers()];
        let mc = m.mul_vec(&ones);
        let quad: f64 = mc.iter().zip(&ones).map(|(a, b)| a * b).sum();
        assert!((quad - c * c).abs() < 1e-13);
        // row sums are the hat-function integrals: h/2 at the ends, h inside
        let h = 0.2;
        let rows = m.mul_vec(&vec![1.0; f.n_multipliers()]);
        assert!((rows[0] - h / 2.0).abs() < 1e-15);
        assert!((rows[2] - h).abs() < 1e-15);
    }
}
