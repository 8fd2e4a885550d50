//! Geometry of the periodic box `[0, L)^3` sampled with `n` points per axis.
//!
//! Wavenumbers live on the lattice `(2π/L) · {-n/2, …, n/2 - 1}^3`. Spectral
//! arrays use the FFT-standard ordering (non-negative indices first, then the
//! negative ones) with the last axis varying fastest.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    box_length: f64,
}

/// Per-grid cached wavenumber magnitudes.
#[derive(Debug)]
pub struct Geometry {
    /// `|ξ|` for every lattice point in storage order.
    pub norm: Vec<f64>,
    /// `|ξ|²` for every lattice point in storage order.
    pub norm2: Vec<f64>,
}

type GeometryCache = Mutex<HashMap<(usize, u64), Arc<Geometry>>>;

fn geometry_cache() -> &'static GeometryCache {
    static CACHE: OnceLock<GeometryCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl TorusGrid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    /// The `2π`-periodic box, where lattice wavenumbers are integers.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lowest nonzero wavenumber magnitude `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Nyquist wavenumber `π n / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.box_length
    }

    /// Physical-space volume element `(L/n)^3`.
    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n as f64).powi(3)
    }

    /// Frequency-space volume element `(2π/L)^3`.
    pub fn spectral_cell(&self) -> f64 {
        self.dk().powi(3)
    }

    /// The same box sampled with twice as many points per axis.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            box_length: self.box_length,
        }
    }

    /// Signed lattice index of storage position `i` along one axis.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage position of signed lattice index `m` (must satisfy `-n/2 <= m < n/2`).
    #[inline]
    pub fn storage_index(&self, m: i64) -> usize {
        if m >= 0 {
            m as usize
        } else {
            (m + self.n as i64) as usize
        }
    }

    #[inline]
    pub fn flat(&self, i0: usize, i1: usize, i2: usize) -> usize {
        (i0 * self.n + i1) * self.n + i2
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Signed lattice indices `(m0, m1, m2)` of flat position `idx`.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let (i0, i1, i2) = self.unflat(idx);
        [
            self.signed_index(i0),
            self.signed_index(i1),
            self.signed_index(i2),
        ]
    }

    /// Physical wavevector `ξ` at flat position `idx`.
    #[inline]
    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let m = self.lattice(idx);
        let dk = self.dk();
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    /// Flat position of a signed lattice triple, if representable.
    pub fn position(&self, m: [i64; 3]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m.iter().any(|&c| c < -half || c >= half) {
            return None;
        }
        Some(self.flat(
            self.storage_index(m[0]),
            self.storage_index(m[1]),
            self.storage_index(m[2]),
        ))
    }

    /// Physical coordinate of sample `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.box_length / self.n as f64
    }

    pub fn geometry(&self) -> Arc<Geometry> {
        let key = (self.n, self.box_length.to_bits());
        let mut cache = geometry_cache().lock().expect("geometry cache poisoned");
        cache
            .entry(key)
            .or_insert_with(|| {
                let dk2 = self.dk() * self.dk();
                let norm2: Vec<f64> = (0..self.len())
                    .map(|idx| {
                        let m = self.lattice(idx);
                        (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64 * dk2
                    })
                    .collect();
                let norm = norm2.iter().map(|v| v.sqrt()).collect();
                Arc::new(Geometry { norm, norm2 })
            })
            .clone()
    }

    /// Sample a real function of position on the grid.
    pub fn sample<F: Fn([f64; 3]) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let (i0, i1, i2) = self.unflat(idx);
                f([
                    self.coordinate(i0),
                    self.coordinate(i1),
                    self.coordinate(i2),
                ])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(4, 1.0).is_err());
        assert!(TorusGrid::new(12, 1.0).is_err());
        assert!(TorusGrid::new(16, 0.0).is_err());
        assert!(TorusGrid::new(16, f64::NAN).is_err());
        assert!(TorusGrid::new(8, 1.0).is_ok());
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::periodic(16).unwrap();
        for m in -8..8 {
            assert_eq!(g.signed_index(g.storage_index(m)), m);
        }
        let p = g.position([-3, 7, -8]).unwrap();
        assert_eq!(g.lattice(p), [-3, 7, -8]);
        assert!(g.position([8, 0, 0]).is_none());
    }

    #[test]
    fn unit_box_has_integer_wavenumbers() {
        let g = TorusGrid::periodic(8).unwrap();
        let p = g.position([1, -2, 3]).unwrap();
        let xi = g.xi(p);
        assert!((xi[0] - 1.0).abs() < 1e-15);
        assert!((xi[1] + 2.0).abs() < 1e-15);
        assert_eq!(g.geometry().norm2[p], 14.0);
    }
}
