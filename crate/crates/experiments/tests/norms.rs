use std::sync::Arc;

use stokes_darcy::fe::{TaylorHoodSpace, WallKind};
use stokes_darcy::mesh::{build_rectangle_mesh, Rectangle, Subdomain};
use stokes_darcy_experiments::norms::{discrete_errors, observed_order, state_errors, ExactField};

fn space(n: usize) -> TaylorHoodSpace {
    let mesh = build_rectangle_mesh(Rectangle::new(0.0, 2.0, 0.0, 1.0), 2 * n, n, Subdomain::Porous).unwrap();
    TaylorHoodSpace::new(Arc::new(mesh), [WallKind::Traction; 4])
}

fn smooth() -> ExactField {
    ExactField {
        velocity: Arc::new(|[x, y], _| [(2.0 * x).sin() * y.exp(), (x * y).cos()]),
        gradient: Arc::new(|[x, y], _| {
            [
                [2.0 * (2.0 * x).cos() * y.exp(), (2.0 * x).sin() * y.exp()],
                [-y * (x * y).sin(), -x * (x * y).sin()],
            ]
        }),
        pressure: Arc::new(|[x, y], _| x * x - y),
    }
}

#[test]
fn constant_offsets_give_their_magnitude() {
    let s = space(3);
    let c = -0.7;
    let state = s.interpolate(|_| [c, 0.0], |_| c);
    let e = state_errors(&s, &state, &ExactField::zero(), 0.0);
    let area: f64 = 2.0;
    assert!((e.velocity_l2 - c.abs() * area.sqrt()).abs() < 1e-12);
    assert!((e.pressure_l2 - c.abs() * area.sqrt()).abs() < 1e-12);
    assert!(e.velocity_h1_semi < 1e-12 && e.divergence_l2 < 1e-12);
    let d = discrete_errors(&s, &state, &vec![0.0; state.len()]);
    assert_eq!(d, e);
}

#[test]
fn linear_fields_are_reproduced_exactly() {
    let s = space(2);
    let exact = ExactField {
        velocity: Arc::new(|[x, y], _| [x + 2.0 * y, 3.0 - y]),
        gradient: Arc::new(|_, _| [[1.0, 2.0], [0.0, -1.0]]),
        pressure: Arc::new(|[x, y], _| 1.0 + x - y),
    };
    let state = s.interpolate(|[x, y]| [x + 2.0 * y, 3.0 - y], |[x, y]| 1.0 + x - y);
    let e = state_errors(&s, &state, &exact, 0.0);
    assert!(e.velocity_h1 < 1e-12 && e.pressure_l2 < 1e-12);
}

#[test]
fn interpolation_errors_converge_at_the_element_orders() {
    let exact = smooth();
    let errors: Vec<_> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let s = space(n);
            let (u, p) = (exact.velocity.clone(), exact.pressure.clone());
            let state = s.interpolate(|x| u(x, 0.0), |x| p(x, 0.0));
            state_errors(&s, &state, &exact, 0.0)
        })
        .collect();
    for w in errors.windows(2) {
        let l2 = observed_order(w[0].velocity_l2, w[1].velocity_l2);
        let h1 = observed_order(w[0].velocity_h1_semi, w[1].velocity_h1_semi);
        let p = observed_order(w[0].pressure_l2, w[1].pressure_l2);
        assert!((2.8..3.3).contains(&l2), "velocity L2 order {l2}");
        assert!((1.8..2.3).contains(&h1), "velocity H1 order {h1}");
        assert!((1.8..2.3).contains(&p), "pressure L2 order {p}");
    }
}

#[test]
fn observed_order_of_a_quartered_error_is_two() {
    assert!((observed_order(4e-3, 1e-3) - 2.0).abs() < 1e-14);
}
