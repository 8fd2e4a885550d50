//! Fourier-side field containers.
//!
//! Coefficients follow the symmetric convention
//! `û(ξ) = (2π)^{-3/2} ∫ e^{-i x·ξ} u(x) dx`, evaluated exactly on the torus
//! for trigonometric polynomials. With it, Plancherel reads
//! `∫|u|^2 dx = Σ_ξ |û(ξ)|^2 (2π/L)^3`.

use std::ops::{Add, Sub};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;

/// Tolerance for the divergence-free certificate, relative to `max|û| · max|ξ|`.
pub const DIV_FREE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    real: bool,
    mean_zero: bool,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
            real: true,
            mean_zero: true,
        }
    }

    pub fn from_coeffs(
        grid: TorusGrid,
        coeffs: Vec<Complex64>,
        real: bool,
        mean_zero: bool,
    ) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        let mut field = Self {
            grid,
            coeffs,
            real,
            mean_zero,
        };
        if mean_zero {
            field.coeffs[0] = Complex64::default();
        }
        Ok(field)
    }

    pub(crate) fn from_parts(
        grid: TorusGrid,
        coeffs: Vec<Complex64>,
        real: bool,
        mean_zero: bool,
    ) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid,
            coeffs,
            real,
            mean_zero,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// Annihilate the zero mode and flag the field as mean-zero.
    pub fn mean_free(mut self) -> Self {
        self.coeffs[0] = Complex64::default();
        self.mean_zero = true;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Coefficient-wise multiplication by a real multiplier in storage order.
    pub fn apply_multiplier(&self, multiplier: &[f64]) -> Self {
        assert_eq!(multiplier.len(), self.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(multiplier)
            .map(|(c, &m)| {
                if m == 0.0 {
                    Complex64::default()
                } else {
                    c * m
                }
            })
            .collect();
        Self::from_parts(
            self.grid,
            coeffs,
            self.real,
            self.mean_zero || multiplier[0] == 0.0,
        )
    }

    /// Coefficient-wise multiplication by `f(idx)`.
    pub fn map_indexed<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        Self::from_parts(self.grid, coeffs, self.real, self.mean_zero)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        Self::from_parts(self.grid, coeffs, self.real, self.mean_zero)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_parts(
            self.grid,
            coeffs,
            self.real && other.real,
            self.mean_zero && other.mean_zero,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_parts(
            self.grid,
            coeffs,
            self.real && other.real,
            self.mean_zero && other.mean_zero,
        ))
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ|û|^2 (2π/L)^3`, the squared L² norm by Plancherel.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.spectral_cell()
    }

    /// Smallest and largest `|ξ|` carrying a nonzero coefficient.
    pub fn support_radii(&self) -> Option<(f64, f64)> {
        self.effective_support_radii(0.0)
    }

    /// As [`Self::support_radii`], ignoring coefficients with
    /// `|c| <= rel · max|c|`.
    pub fn effective_support_radii(&self, rel: f64) -> Option<(f64, f64)> {
        let geo = self.grid.geometry();
        let cut = rel * self.max_abs();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (c, &r) in self.coeffs.iter().zip(&geo.norm) {
            if (c.re != 0.0 || c.im != 0.0) && c.norm() > cut {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (hi >= lo).then_some((lo, hi))
    }

    /// Largest `|m_axis|` over nonzero coefficients, maximised over axes.
    pub fn axis_extent(&self) -> usize {
        self.effective_extent(0.0)
    }

    /// As [`Self::axis_extent`], ignoring coefficients with
    /// `|c| <= rel · max|c|` (rounding noise left by a transform).
    pub fn effective_extent(&self, rel: f64) -> usize {
        let cut = rel * self.max_abs();
        let mut ext = 0i64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.norm() > cut && (c.re != 0.0 || c.im != 0.0) {
                let m = self.grid.lattice(idx);
                ext = ext.max(m[0].abs()).max(m[1].abs()).max(m[2].abs());
            }
        }
        ext as usize
    }

    /// `max_ξ |û(-ξ) - conj(û(ξ))|`, zero for real-valued fields up to rounding.
    pub fn hermitian_defect(&self) -> f64 {
        let half = (self.grid.n() / 2) as i64;
        let mut worst: f64 = 0.0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let m = self.grid.lattice(idx);
            if m.iter().any(|&v| v == -half) {
                continue;
            }
            let mirror = self
                .grid
                .position([-m[0], -m[1], -m[2]])
                .expect("mirror in range");
            worst = worst.max((self.coeffs[mirror] - c.conj()).norm());
        }
        worst
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.try_add(rhs).expect("grid mismatch in field addition")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.try_sub(rhs)
            .expect("grid mismatch in field subtraction")
    }
}

/// Three components on one grid, with a divergence-free certificate flag.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [SpectralField; 3],
    div_free: bool,
}

impl VectorField {
    pub fn new(comps: [SpectralField; 3]) -> Result<Self> {
        if comps[0].grid() != comps[1].grid() || comps[0].grid() != comps[2].grid() {
            return Err(Error::GridMismatch);
        }
        let mut v = Self {
            comps,
            div_free: false,
        };
        v.div_free = v.divergence_defect() <= DIV_FREE_TOL;
        Ok(v)
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            comps: [
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
            ],
            div_free: true,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.comps[0].grid()
    }

    pub fn comps(&self) -> &[SpectralField; 3] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &SpectralField {
        &self.comps[i]
    }

    pub fn into_comps(self) -> [SpectralField; 3] {
        self.comps
    }

    pub fn is_div_free(&self) -> bool {
        self.div_free
    }

    pub fn is_real(&self) -> bool {
        self.comps.iter().all(|c| c.is_real())
    }

    pub fn is_mean_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_mean_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// `max|ξ·û| / (max|û| · max|ξ|)`, zero for the zero field.
    pub fn divergence_defect(&self) -> f64 {
        let grid = *self.grid();
        let geo = grid.geometry();
        let mut worst: f64 = 0.0;
        let mut amp: f64 = 0.0;
        let mut kmax: f64 = 0.0;
        for idx in 0..grid.len() {
            let xi = grid.xi(idx);
            let mut dot = Complex64::default();
            for (j, comp) in self.comps.iter().enumerate() {
                let c = comp.coeffs()[idx];
                dot += c * xi[j];
                if c.re != 0.0 || c.im != 0.0 {
                    amp = amp.max(c.norm());
                    kmax = kmax.max(geo.norm[idx]);
                }
            }
            worst = worst.max(dot.norm());
        }
        if amp == 0.0 {
            0.0
        } else {
            worst / (amp * kmax)
        }
    }

    /// Apply the same operation to every component.
    pub fn map<F: Fn(&SpectralField) -> SpectralField>(&self, f: F) -> Self {
        let comps = [f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])];
        Self {
            comps,
            div_free: self.div_free,
        }
    }

    pub fn with_certificate(mut self, div_free: bool) -> Self {
        self.div_free = div_free;
        self
    }

    /// Re-evaluate the divergence-free certificate from the coefficients.
    pub fn recertified(mut self) -> Self {
        self.div_free = self.divergence_defect() <= DIV_FREE_TOL;
        self
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            comps: [
                self.comps[0].try_add(&other.comps[0])?,
                self.comps[1].try_add(&other.comps[1])?,
                self.comps[2].try_add(&other.comps[2])?,
            ],
            div_free: self.div_free && other.div_free,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            comps: [
                self.comps[0].try_sub(&other.comps[0])?,
                self.comps[1].try_sub(&other.comps[1])?,
                self.comps[2].try_sub(&other.comps[2])?,
            ],
            div_free: self.div_free && other.div_free,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|c| c.scaled(factor))
    }

    pub fn energy(&self) -> f64 {
        self.comps.iter().map(|c| c.energy()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn support_radii(&self) -> Option<(f64, f64)> {
        self.effective_support_radii(0.0)
    }

    pub fn effective_support_radii(&self, rel: f64) -> Option<(f64, f64)> {
        let cut = rel * self.max_abs();
        let geo = self.grid().geometry();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.comps {
            for (z, &r) in c.coeffs().iter().zip(&geo.norm) {
                if (z.re != 0.0 || z.im != 0.0) && z.norm() > cut {
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
        }
        (hi >= lo).then_some((lo, hi))
    }

    pub fn axis_extent(&self) -> usize {
        self.comps
            .iter()
            .map(|c| c.axis_extent())
            .max()
            .unwrap_or(0)
    }

    pub fn effective_extent(&self, rel: f64) -> usize {
        self.comps
            .iter()
            .map(|c| c.effective_extent(rel))
            .max()
            .unwrap_or(0)
    }
}
