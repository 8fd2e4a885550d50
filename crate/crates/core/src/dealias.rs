//! Alias-free evaluation of quadratic products and cubic integrals.
//!
//! A product of trigonometric polynomials is evaluated pointwise on an
//! evaluation grid of `m` points per axis. The result is exact whenever no
//! mode of the product wraps around that grid: for a quadratic product the
//! summed per-axis extents must stay below `m/2`, for the mean of a cubic
//! product they must stay below `m`. The native grid is used when it already
//! satisfies this, otherwise the operands are zero-padded to `2n`.

use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft::fft3;
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::spectral::{derivative, forward_scale, inverse_scale};

/// Coefficients below this fraction of a field's peak are treated as
/// transform round-off when deciding whether a product fits a grid.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Physical-space evaluation grid for a family of fields on `grid`.
#[derive(Debug, Clone, Copy)]
pub struct EvalGrid {
    grid: TorusGrid,
    m: usize,
}

impl EvalGrid {
    /// Native grid when a cubic product of fields with summed extent
    /// `total_extent` is alias-free on it, the `2n` grid otherwise.
    pub fn for_cubic(grid: TorusGrid, total_extent: usize) -> Self {
        let m = if total_extent < grid.n() {
            grid.n()
        } else {
            2 * grid.n()
        };
        Self { grid, m }
    }

    /// Always the zero-padded `2n` grid.
    pub fn padded(grid: TorusGrid) -> Self {
        Self {
            grid,
            m: 2 * grid.n(),
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn cell_volume(&self) -> f64 {
        (self.grid.box_length() / self.m as f64).powi(3)
    }

    /// Real samples of `u` on the evaluation grid.
    pub fn physical(&self, u: &SpectralField) -> Vec<f64> {
        let m = self.m;
        if u.is_zero() {
            return vec![0.0; m * m * m];
        }
        let mut data = embed(u, m);
        fft3(&mut data, m, FftDirection::Inverse);
        let scale = inverse_scale(self.grid.box_length());
        data.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn physical_vec(&self, u: &VectorField) -> [Vec<f64>; 3] {
        [
            self.physical(u.comp(0)),
            self.physical(u.comp(1)),
            self.physical(u.comp(2)),
        ]
    }

    /// `grad[i][j] = ∂_j a_i` on the evaluation grid.
    pub fn physical_grad(&self, a: &VectorField) -> [[Vec<f64>; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.physical(&derivative(a.comp(i), j))))
    }

    /// Spectral coefficients on the source grid of real samples given on the
    /// evaluation grid. Modes that do not fit the source grid are discarded.
    pub fn spectral(&self, samples: Vec<f64>) -> SpectralField {
        let m = self.m;
        let mut data: Vec<Complex64> = samples
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        fft3(&mut data, m, FftDirection::Forward);
        let scale = forward_scale(self.grid.box_length(), m);
        let grid = self.grid;
        let mut out = vec![Complex64::default(); grid.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let lm = grid.lattice(idx);
            let p = padded_position(lm, m);
            *slot = data[p] * scale;
        }
        SpectralField::from_parts(grid, out, true, false)
    }

    /// `∫ u_j (∂_j a_i) b_i dx` from pre-evaluated samples.
    pub fn triple(&self, u: &[Vec<f64>; 3], grad_a: &[[Vec<f64>; 3]; 3], b: &[Vec<f64>; 3]) -> f64 {
        let len = u[0].len();
        let mut acc = 0.0;
        for x in 0..len {
            let mut local = 0.0;
            for i in 0..3 {
                let mut adv = 0.0;
                for j in 0..3 {
                    adv += u[j][x] * grad_a[i][j][x];
                }
                local += adv * b[i][x];
            }
            acc += local;
        }
        acc * self.cell_volume()
    }

    /// `∫ Σ_i a_i b_i dx` from pre-evaluated samples.
    pub fn dot(&self, a: &[Vec<f64>; 3], b: &[Vec<f64>; 3]) -> f64 {
        let mut acc = 0.0;
        for x in 0..a[0].len() {
            acc += a[0][x] * b[0][x] + a[1][x] * b[1][x] + a[2][x] * b[2][x];
        }
        acc * self.cell_volume()
    }
}

fn padded_position(lm: [i64; 3], m: usize) -> usize {
    let w = |v: i64| {
        if v >= 0 {
            v as usize
        } else {
            (v + m as i64) as usize
        }
    };
    (w(lm[0]) * m + w(lm[1])) * m + w(lm[2])
}

/// Zero-pad coefficients of `u` into an `m^3` spectral buffer.
fn embed(u: &SpectralField, m: usize) -> Vec<Complex64> {
    let grid = u.grid();
    if m == grid.n() {
        return u.coeffs().to_vec();
    }
    let mut data = vec![Complex64::default(); m * m * m];
    for (idx, c) in u.coeffs().iter().enumerate() {
        if c.re != 0.0 || c.im != 0.0 {
            data[padded_position(grid.lattice(idx), m)] = *c;
        }
    }
    data
}

/// Alias-free product `a·b` stored on the operands' grid.
///
/// Fails when the product has modes at or beyond the grid's Nyquist index.
pub fn product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let grid = *a.grid();
    if a.is_zero() || b.is_zero() {
        return Ok(SpectralField::zeros(grid));
    }
    let extent = a.effective_extent(NOISE_FLOOR) + b.effective_extent(NOISE_FLOOR);
    let limit = grid.n() / 2;
    if extent >= limit {
        return Err(Error::Aliasing { extent, limit });
    }
    // extent < n/2: the native grid represents every mode of the product
    let eval = EvalGrid { grid, m: grid.n() };
    let pa = eval.physical(a);
    let pb = eval.physical(b);
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let real = a.is_real() && b.is_real();
    let mut out = eval.spectral(prod);
    if !real {
        out = SpectralField::from_parts(grid, out.into_coeffs(), false, false);
    }
    Ok(out)
}

/// Same as [`product`], evaluated on the zero-padded `2n` grid.
pub fn product_padded(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let grid = *a.grid();
    let extent = a.effective_extent(NOISE_FLOOR) + b.effective_extent(NOISE_FLOOR);
    let limit = grid.n() / 2;
    if extent >= limit {
        return Err(Error::Aliasing { extent, limit });
    }
    let eval = EvalGrid::padded(grid);
    let pa = eval.physical(a);
    let pb = eval.physical(b);
    Ok(eval.spectral(pa.iter().zip(&pb).map(|(x, y)| x * y).collect()))
}

/// `∫ u·∇a·b dx = ∫ u_j ∂_j a_i b_i dx`, alias-free.
pub fn trilinear(u: &VectorField, a: &VectorField, b: &VectorField) -> Result<f64> {
    if u.grid() != a.grid() || u.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if u.is_zero() || a.is_zero() || b.is_zero() {
        return Ok(0.0);
    }
    let extent = u.effective_extent(NOISE_FLOOR)
        + a.effective_extent(NOISE_FLOOR)
        + b.effective_extent(NOISE_FLOOR);
    trilinear_on(&EvalGrid::for_cubic(*u.grid(), extent), u, a, b)
}

/// Trilinear form evaluated on an explicit evaluation grid.
pub fn trilinear_on(
    eval: &EvalGrid,
    u: &VectorField,
    a: &VectorField,
    b: &VectorField,
) -> Result<f64> {
    let pu = eval.physical_vec(u);
    let ga = eval.physical_grad(a);
    let pb = eval.physical_vec(b);
    Ok(eval.triple(&pu, &ga, &pb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::transform_forward;

    #[test]
    fn product_of_sines_matches_identity() {
        let g = TorusGrid::periodic(16).unwrap();
        let s = transform_forward(g, &g.sample(|x| x[2].sin())).unwrap();
        let p = product(&s, &s).unwrap();
        let direct = transform_forward(g, &g.sample(|x| x[2].sin().powi(2))).unwrap();
        for (a, b) in p.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        let padded = product_padded(&s, &s).unwrap();
        for (a, b) in p.coeffs().iter().zip(padded.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn product_guard_rejects_wide_bands() {
        let g = TorusGrid::periodic(8).unwrap();
        let s = transform_forward(g, &g.sample(|x| (3.0 * x[0]).cos())).unwrap();
        assert!(matches!(product(&s, &s), Err(Error::Aliasing { .. })));
    }
}
