//! Restart-free GMRES with modified Gram-Schmidt and right preconditioning.

/// Result of a GMRES run.
#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Relative residual `|b - A x_k| / |b|` after each iteration, starting
    /// with `1` for the zero initial guess.
    pub history: Vec<f64>,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` from `x0 = 0`. With a preconditioner `M`, iterates on
/// `A M y = b` and returns `x = M y`, so the monitored residual is the true
/// one. Stops when the relative residual drops below `tol`, on breakdown, or
/// after `maxit` iterations (then `converged` is false and the best iterate
/// is returned).
pub fn gmres<E>(
    mut matvec: impl FnMut(&[f64]) -> Result<Vec<f64>, E>,
    rhs: &[f64],
    tol: f64,
    maxit: usize,
    mut precond: Option<&mut dyn FnMut(&[f64]) -> Result<Vec<f64>, E>>,
) -> Result<GmresOutcome, E> {
    let n = rhs.len();
    let beta = norm(rhs);
    if beta == 0.0 {
        return Ok(GmresOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            history: vec![0.0],
            converged: true,
        });
    }
    let mut basis: Vec<Vec<f64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // Columns of the Hessenberg matrix, already rotated.
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];
    let mut history = vec![1.0];
    let mut converged = false;
    let mut k = 0;
    while k < maxit {
        let z = match precond.as_mut() {
            Some(p) => p(&basis[k])?,
            None => basis[k].clone(),
        };
        let mut w = matvec(&z)?;
        let mut h = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            h[i] = dot(&w, v);
            for (wj, vj) in w.iter_mut().zip(v) {
                *wj -= h[i] * vj;
            }
        }
        h[k + 1] = norm(&w);
        for i in 0..k {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = cs[i] * a + sn[i] * b;
            h[i + 1] = -sn[i] * a + cs[i] * b;
        }
        let r = h[k].hypot(h[k + 1]);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (h[k] / r, h[k + 1] / r) };
        let breakdown = h[k + 1] <= 1e-14 * r.max(f64::MIN_POSITIVE) || h[k + 1] == 0.0;
        let next = w.iter().map(|v| v / h[k + 1]).collect::<Vec<_>>();
        h[k] = r;
        h[k + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        g.push(-s * g[k]);
        g[k] *= c;
        h_cols.push(h);
        k += 1;
        let rel = g[k].abs() / beta;
        history.push(rel);
        if rel < tol {
            converged = true;
            break;
        }
        if breakdown {
            // The Krylov space is invariant: the least-squares solution is exact.
            converged = true;
            break;
        }
        basis.push(next);
    }
    // Back substitution on the k x k triangular system.
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h_cols[j][i] * y[j];
        }
        y[i] = s / h_cols[i][i];
    }
    let mut v = vec![0.0; n];
    for (yi, b) in y.iter().zip(&basis) {
        for (vj, bj) in v.iter_mut().zip(b) {
            *vj += yi * bj;
        }
    }
    let solution = match precond.as_mut() {
        Some(p) => p(&v)?,
        None => v,
    };
    Ok(GmresOutcome {
        solution,
        iterations: k,
        history,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn dense(a: &[Vec<f64>]) -> impl FnMut(&[f64]) -> Result<Vec<f64>, Infallible> + '_ {
        move |x| Ok(a.iter().map(|row| dot(row, x)).collect())
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let out = gmres(dense(&a), &[1.0, -2.0, 3.0], 1e-12, 10, None).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        assert!((out.solution[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let out = gmres(dense(&a), &[1.0, 2.0], 1e-12, 10, None).unwrap();
        assert!(out.iterations <= 2);
        assert!((out.solution[0] - 1.0).abs() < 1e-13 && (out.solution[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = vec![vec![3.0]];
        let out = gmres(dense(&a), &[0.0], 1e-10, 5, None).unwrap();
        assert_eq!(out.solution, vec![0.0]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn exhaustion_is_flagged() {
        let a: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| if i == j { (i + 1) as f64 } else { 0.1 }).collect())
            .collect();
        let out = gmres(dense(&a), &[1.0; 6], 1e-14, 2, None).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
        assert!(out.history[2] < out.history[0]);
    }

    #[test]
    fn exact_preconditioner_converges_immediately() {
        let a = vec![vec![4.0, 1.0], vec![0.0, 2.0]];
        let mut inv = |x: &[f64]| -> Result<Vec<f64>, Infallible> {
            Ok(vec![(x[0] - 0.5 * x[1]) / 4.0, x[1] / 2.0])
        };
        let out = gmres(dense(&a), &[5.0, 2.0], 1e-12, 10, Some(&mut inv)).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.solution[0] - 1.0).abs() < 1e-14 && (out.solution[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matvec_errors_propagate() {
        let out = gmres(|_: &[f64]| Err::<Vec<f64>, _>("boom"), &[1.0], 1e-8, 3, None);
        assert_eq!(out, Err("boom"));
    }
}
