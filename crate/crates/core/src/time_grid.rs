//! Partitions of (0, T] and fields that are piecewise constant in time with
//! values in the multiplier space, plus the L² projection between grids.

use crate::error::TimeGridError;

/// Relative tolerance (times `T`) under which two breakpoints coincide.
pub const BREAKPOINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, TimeGridError> {
        if points.len() < 2 {
            return Err(TimeGridError::NoIntervals);
        }
        if points[0] != 0.0 {
            return Err(TimeGridError::NotIncreasing(0));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(TimeGridError::NotIncreasing(i + 1));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn n_intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grid has breakpoints")
    }

    /// Interval `m` as `(t^m, t^{m+1})`, counting from zero.
    pub fn interval(&self, m: usize) -> (f64, f64) {
        (self.points[m], self.points[m + 1])
    }

    pub fn len(&self, m: usize) -> f64 {
        self.points[m + 1] - self.points[m]
    }

    /// Whether every breakpoint of `self` is (within tolerance) one of `other`.
    pub fn is_subgrid_of(&self, other: &TimeGrid) -> bool {
        let tol = BREAKPOINT_TOLERANCE * self.horizon();
        self.points
            .iter()
            .all(|t| other.points.iter().any(|s| (s - t).abs() <= tol))
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        let tol = BREAKPOINT_TOLERANCE * self.horizon();
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| (a - b).abs() <= tol)
    }
}

pub fn uniform_grid(t_final: f64, n: usize) -> Result<TimeGrid, TimeGridError> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(TimeGridError::NonPositiveHorizon(t_final));
    }
    if n == 0 {
        return Err(TimeGridError::NoIntervals);
    }
    let mut points: Vec<f64> = (0..=n).map(|k| k as f64 * t_final / n as f64).collect();
    points[n] = t_final;
    TimeGrid::new(points)
}

/// One coefficient vector per interval of `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantField {
    pub grid: TimeGrid,
    pub slabs: Vec<Vec<f64>>,
}

impl PiecewiseConstantField {
    pub fn new(grid: TimeGrid, slabs: Vec<Vec<f64>>) -> Result<Self, TimeGridError> {
        if slabs.len() != grid.n_intervals() {
            return Err(TimeGridError::SlabCount {
                slabs: slabs.len(),
                intervals: grid.n_intervals(),
            });
        }
        let width = slabs.first().map_or(0, Vec::len);
        if let Some(slab) = slabs.iter().position(|s| s.len() != width) {
            return Err(TimeGridError::SlabLength {
                slab,
                len: slabs[slab].len(),
                expected: width,
            });
        }
        Ok(Self { grid, slabs })
    }

    pub fn constant(grid: TimeGrid, value: &[f64]) -> Self {
        let slabs = vec![value.to_vec(); grid.n_intervals()];
        Self { grid, slabs }
    }

    pub fn zeros(grid: TimeGrid, width: usize) -> Self {
        Self::constant(grid, &vec![0.0; width])
    }

    pub fn width(&self) -> usize {
        self.slabs.first().map_or(0, Vec::len)
    }

    /// Slabs stacked into one vector, slab-major.
    pub fn flatten(&self) -> Vec<f64> {
        self.slabs.concat()
    }

    pub fn from_flat(grid: TimeGrid, width: usize, data: &[f64]) -> Result<Self, TimeGridError> {
        let n = grid.n_intervals();
        if data.len() != n * width {
            return Err(TimeGridError::SlabLength {
                slab: 0,
                len: data.len(),
                expected: n * width,
            });
        }
        let slabs = if width == 0 {
            vec![Vec::new(); n]
        } else {
            data.chunks(width).map(<[f64]>::to_vec).collect()
        };
        Self::new(grid, slabs)
    }

    /// `∫_0^T` of the field, i.e. `Σ |J_m| slab_m`.
    pub fn time_integral(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        for (m, slab) in self.slabs.iter().enumerate() {
            let len = self.grid.len(m);
            for (o, v) in out.iter_mut().zip(slab) {
                *o += len * v;
            }
        }
        out
    }
}

/// L² projection onto piecewise constants on `target`: each target slab is
/// the overlap-weighted average of the source slabs. One forward sweep over
/// the merged breakpoints.
pub fn project(
    source: &PiecewiseConstantField,
    target: &TimeGrid,
) -> Result<PiecewiseConstantField, TimeGridError> {
    let (ts, tt) = (source.grid.horizon(), target.horizon());
    let tol = BREAKPOINT_TOLERANCE * ts.max(tt);
    if (ts - tt).abs() > tol {
        return Err(TimeGridError::HorizonMismatch(ts, tt));
    }
    let width = source.width();
    let sp = source.grid.points();
    let tp = target.points();
    let mut slabs = Vec::with_capacity(target.n_intervals());
    let mut acc = vec![0.0; width];
    let (mut i, mut j) = (0usize, 0usize);
    let mut t = 0.0;
    while j < target.n_intervals() {
        let (s_end, t_end) = (sp[i + 1], tp[j + 1]);
        let next = s_end.min(t_end);
        let overlap = next - t;
        if overlap > 0.0 {
            for (a, v) in acc.iter_mut().zip(&source.slabs[i]) {
                *a += overlap * v;
            }
        }
        t = next;
        if (s_end - next).abs() <= tol && i + 1 < source.grid.n_intervals() {
            i += 1;
        }
        if (t_end - next).abs() <= tol {
            let len = target.len(j);
            slabs.push(acc.iter().map(|a| a / len).collect());
            acc.iter_mut().for_each(|a| *a = 0.0);
            j += 1;
            // Snap to the target breakpoint so drift never accumulates.
            t = t_end;
        }
    }
    PiecewiseConstantField::new(target.clone(), slabs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(points: &[f64], values: &[f64]) -> PiecewiseConstantField {
        PiecewiseConstantField::new(
            TimeGrid::new(points.to_vec()).unwrap(),
            values.iter().map(|v| vec![*v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn uniform_grids() {
        assert_eq!(uniform_grid(1.0, 4).unwrap().points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = uniform_grid(0.01, 5).unwrap();
        for m in 0..5 {
            assert!((g.len(m) - 0.002).abs() < 1e-15);
        }
        assert_eq!(uniform_grid(1.0, 1).unwrap().points(), &[0.0, 1.0]);
        assert!(uniform_grid(-1.0, 3).is_err());
        assert!(uniform_grid(1.0, 0).is_err());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.0]).is_err());
    }

    #[test]
    fn fine_to_coarse_average() {
        let f = field(&[0.0, 0.5, 1.0], &[1.0, 3.0]);
        let p = project(&f, &uniform_grid(1.0, 1).unwrap()).unwrap();
        assert_eq!(p.slabs, vec![vec![2.0]]);
    }

    #[test]
    fn shifted_grids() {
        let f = field(&[0.0, 0.4, 1.0], &[1.0, 2.0]);
        let p = project(&f, &uniform_grid(1.0, 2).unwrap()).unwrap();
        assert!((p.slabs[0][0] - 1.2).abs() < 1e-15);
        assert!((p.slabs[1][0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identical_grids_are_identity() {
        let f = field(&[0.0, 0.1, 0.35, 1.0], &[1.5, -2.0, 7.0]);
        let p = project(&f, &f.grid).unwrap();
        for (a, b) in p.slabs.iter().zip(&f.slabs) {
            assert!((a[0] - b[0]).abs() <= 1e-15 * b[0].abs());
        }
    }

    #[test]
    fn horizon_mismatch() {
        let f = field(&[0.0, 1.0], &[1.0]);
        assert!(matches!(
            project(&f, &uniform_grid(2.0, 2).unwrap()),
            Err(TimeGridError::HorizonMismatch(..))
        ));
    }

    #[test]
    fn drifted_breakpoints_do_not_create_phantom_slabs() {
        // 0.1 * 3 != 0.3 in binary
        let a = uniform_grid(0.3, 3).unwrap();
        let b = TimeGrid::new(vec![0.0, 0.1, 0.2, 0.1 + 0.2]).unwrap();
        let f = PiecewiseConstantField::new(a, vec![vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let p = project(&f, &b).unwrap();
        for (m, v) in p.slabs.iter().enumerate() {
            assert!((v[0] - (m + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn flatten_round_trip() {
        let f = PiecewiseConstantField::new(
            uniform_grid(1.0, 2).unwrap(),
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        )
        .unwrap();
        let g = PiecewiseConstantField::from_flat(f.grid.clone(), 2, &f.flatten()).unwrap();
        assert_eq!(f, g);
    }
}
