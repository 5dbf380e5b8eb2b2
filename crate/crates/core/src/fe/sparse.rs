//! Compressed-row matrices with a reusable pattern, and a direct solver
//! built on the sparse LU of `faer`.

use std::collections::BTreeSet;
use std::sync::{Arc, Once, OnceLock};

use faer::prelude::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::MatMut;

use crate::error::SolveError;

/// Amplification `|A| |y| / |r|` above which a factorization is treated as
/// numerically singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e13;

/// Relative residual bound accepted from a direct solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Square sparsity pattern with sorted column indices in each row. The
/// symbolic LU analysis is computed once per pattern and shared.
#[derive(Debug)]
pub struct SparsityPattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    symbolic: OnceLock<Result<SymbolicLu<usize>, SolveError>>,
}

impl SparsityPattern {
    pub fn from_rows(rows: Vec<BTreeSet<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for row in rows {
            debug_assert!(row.iter().all(|&c| c < n));
            col_idx.extend(row);
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            symbolic: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub fn cols(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row(i)]
    }

    /// Storage slot of entry `(i, j)`, if it is part of the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.cols(i).binary_search(&j).ok().map(|k| start + k)
    }

    /// The pattern read as compressed columns, i.e. the pattern of `A^T`.
    fn transposed_view(&self) -> SymbolicSparseColMatRef<'_, usize> {
        SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.row_ptr, None, &self.col_idx)
    }

    fn symbolic_lu(&self) -> Result<SymbolicLu<usize>, SolveError> {
        self.symbolic
            .get_or_init(|| {
                SymbolicLu::try_new(self.transposed_view())
                    .map_err(|e| SolveError::Factorization(format!("{e:?}")))
            })
            .clone()
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub pattern: Arc<SparsityPattern>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let pattern = SparsityPattern::from_rows(
            rows.iter()
                .map(|r| (0..r.len()).filter(|&j| r[j] != 0.0).collect())
                .collect(),
        );
        let mut m = Self::zeros(Arc::new(pattern));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    m.add(i, j, v);
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.pattern.dim()
    }

    /// Adds `v` to entry `(i, j)`; panics if the entry is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .pattern
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is not in the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Replaces row `i` by the corresponding row of the identity.
    pub fn set_identity_row(&mut self, i: usize) {
        for k in self.pattern.row(i) {
            self.values[k] = if self.pattern.col_idx[k] == i { 1.0 } else { 0.0 };
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.pattern.row(i);
            *yi = self.values[r.clone()]
                .iter()
                .zip(&self.pattern.col_idx[r])
                .map(|(a, &j)| a * x[j])
                .sum();
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.values[self.pattern.row(i)].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Deterministic probe vector with entries in (-1, 1).
fn probe_vector(n: usize) -> Vec<f64> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

static SEQUENTIAL: Once = Once::new();

/// LU factors of a sparse matrix, ready for repeated solves.
pub struct SparseLu {
    matrix: CsrMatrix,
    lu: Lu<usize, f64>,
    norm: f64,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu")
            .field("dim", &self.matrix.dim())
            .field("nnz", &self.matrix.pattern.nnz())
            .finish()
    }
}

impl SparseLu {
    pub fn factorize(matrix: CsrMatrix) -> Result<Self, SolveError> {
        // Parallel sparse kernels would make results depend on scheduling;
        // the solver needs bit-reproducible runs.
        SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
        if !matrix.is_finite() {
            return Err(SolveError::NonFinite);
        }
        let symbolic = matrix.pattern.symbolic_lu()?;
        // Row-compressed A read as column-compressed data is A^T; solves use
        // the transposed factors.
        let view = SparseColMatRef::new(matrix.pattern.transposed_view(), &matrix.values);
        let lu = Lu::try_new_with_symbolic(symbolic, view).map_err(|e| match e {
            LuError::SymbolicSingular { index } => SolveError::StructurallySingular { pivot: index },
            LuError::Generic(e) => SolveError::Factorization(format!("{e:?}")),
        })?;
        let norm = matrix.norm_inf();
        let this = Self { matrix, lu, norm };
        this.check_conditioning()?;
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        let n = x.len();
        let view = MatMut::from_column_major_slice_mut(&mut x, n, 1);
        self.lu.solve_transpose_in_place(view);
        x
    }

    fn check_conditioning(&self) -> Result<(), SolveError> {
        let r = probe_vector(self.dim());
        let y = self.raw_solve(&r);
        let amplification = self.norm * norm_inf(&y) / norm_inf(&r).max(f64::MIN_POSITIVE);
        if !amplification.is_finite() || amplification > SINGULARITY_THRESHOLD {
            return Err(SolveError::NumericallySingular { amplification });
        }
        Ok(())
    }

    /// Solves `A x = b`, with one step of iterative refinement if the first
    /// residual exceeds the accepted bound.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        let n = self.dim();
        if b.len() != n {
            return Err(SolveError::DimensionMismatch {
                rows: n,
                cols: n,
                rhs: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }
        let mut x = self.raw_solve(b);
        let mut residual = vec![0.0; n];
        for attempt in 0..2 {
            self.matrix.mul_vec_into(&x, &mut residual);
            for (r, bi) in residual.iter_mut().zip(b) {
                *r = bi - *r;
            }
            let res = norm_inf(&residual);
            let bound = RESIDUAL_TOLERANCE * (self.norm * norm_inf(&x) + norm_inf(b));
            if !res.is_finite() {
                return Err(SolveError::NonFinite);
            }
            if res <= bound {
                return Ok(x);
            }
            if attempt == 1 {
                return Err(SolveError::Residual {
                    residual: res,
                    bound,
                });
            }
            let dx = self.raw_solve(&residual);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        unreachable!()
    }
}

/// Assembled linear system with essential rows already replaced by
/// identity rows.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// `false` for essential (eliminated) degrees of freedom.
    pub free: Vec<bool>,
}

impl SparseSystem {
    /// Residual `b - A x` restricted to free rows.
    pub fn free_residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.matrix.mul_vec(x);
        ax.iter()
            .zip(&self.rhs)
            .zip(&self.free)
            .map(|((a, b), &f)| if f { b - a } else { 0.0 })
            .collect()
    }
}

pub fn solve_sparse(system: &SparseSystem) -> Result<Vec<f64>, SolveError> {
    let n = system.matrix.dim();
    if system.rhs.len() != n {
        return Err(SolveError::DimensionMismatch {
            rows: n,
            cols: n,
            rhs: system.rhs.len(),
        });
    }
    SparseLu::factorize(system.matrix.clone())?.solve(&system.rhs)
}
