//! Smooth dyadic partition of unity on the lattice, the block and low-pass
//! operators built from it, and Bernstein-type norm comparisons.
//!
//! Every multiplier is stored with true zeros wherever the profile vanishes,
//! so support statements about blocks can be checked bit-exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::norms::{lp_norm_samples, magnitude};
use crate::spectral::{gradient, transform_inverse};

/// The radial cutoff `ψ` and the annulus profile `φ(r) = ψ(r/2) - ψ(r)`.
///
/// `ψ` equals 1 on `[0, 1/2]`, 0 on `[1, ∞)` and follows the `C^∞` step
/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})` with `t = 2(1 - r)` in between.
#[derive(Debug, Clone, Copy, Default)]
pub struct DyadicProfile;

impl DyadicProfile {
    pub const PLATEAU: f64 = 0.5;
    pub const CUTOFF: f64 = 1.0;
    pub const SHAPE: &'static str = "exp(-1/t) smooth step on [1/2, 1]";

    pub fn psi(r: f64) -> f64 {
        if r <= Self::PLATEAU {
            1.0
        } else if r >= Self::CUTOFF {
            0.0
        } else {
            let t = (Self::CUTOFF - r) / (Self::CUTOFF - Self::PLATEAU);
            let a = (-1.0 / t).exp();
            let b = (-1.0 / (1.0 - t)).exp();
            a / (a + b)
        }
    }

    pub fn phi(r: f64) -> f64 {
        let v = Self::psi(0.5 * r) - Self::psi(r);
        // both terms are exactly 1 below r = 1/2 and exactly 0 above r = 2
        if v == 0.0 {
            0.0
        } else {
            v
        }
    }

    /// Hash of `ψ` sampled at 257 points of `[0, 1]`, so reports pin the
    /// exact transition that produced them.
    pub fn fingerprint() -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for i in 0..=256 {
            for byte in Self::psi(i as f64 / 256.0).to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        format!("{h:016x}")
    }

    pub fn info() -> ProfileInfo {
        ProfileInfo {
            shape: Self::SHAPE.to_string(),
            plateau: Self::PLATEAU,
            cutoff: Self::CUTOFF,
            fingerprint: Self::fingerprint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileInfo {
    pub shape: String,
    pub plateau: f64,
    pub cutoff: f64,
    pub fingerprint: String,
}

/// `[x]` read as the floor, for either sign of `x`.
pub fn floor_index(x: f64) -> i32 {
    x.floor() as i32
}

/// Products `θk` this close to an integer are read as that integer, so a
/// `θ` computed from a rational `s` (e.g. `s = 7/10`, `θ = 1/2 - 1e-16`)
/// lands on the intended index.
pub const INDEX_SNAP: f64 = 1e-9;

/// `[θk]` with the floor convention.
pub fn theta_index(theta: f64, k: i32) -> i32 {
    let x = theta * k as f64;
    let r = x.round();
    if (x - r).abs() <= INDEX_SNAP {
        r as i32
    } else {
        floor_index(x)
    }
}

/// Every `k` for which `Δ̇_k` can be nonzero somewhere on the lattice
/// (`|ξ|` ranges from `2π/L` to the cube corner `√3·πn/L`).
pub fn lattice_blocks(grid: &TorusGrid) -> std::ops::RangeInclusive<i32> {
    let lo = grid.dk().log2().floor() as i32;
    let hi = (3f64.sqrt() * grid.nyquist()).log2().ceil() as i32 + 1;
    lo..=hi
}

/// Dyadic indices that are meaningful on a grid.
///
/// The admissible band is `2^{k_min} ≤ |ξ| ≤ 2^{k_max}`: its lower end sits at
/// or above the lowest lattice frequency, and `2^{k_max+1}` stays strictly
/// below Nyquist, so a product of two band fields is still resolved by the
/// grid. `block_lo..=block_hi` covers every block that can be nonzero on the
/// lattice at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicWindow {
    pub k_min: i32,
    pub k_max: i32,
    pub block_lo: i32,
    pub block_hi: i32,
}

impl DyadicWindow {
    pub fn for_grid(grid: &TorusGrid) -> Result<Self> {
        let k_min = grid.dk().log2().ceil() as i32;
        let mut k_max = grid.nyquist().log2().floor() as i32 - 1;
        while 2f64.powi(k_max + 1) >= grid.nyquist() {
            k_max -= 1;
        }
        if k_min > k_max {
            return Err(Error::WindowTooSmall(format!(
                "n = {} and L = {} admit no dyadic block inside the guarded band",
                grid.n(),
                grid.box_length()
            )));
        }
        let blocks = lattice_blocks(grid);
        Ok(Self {
            k_min,
            k_max,
            block_lo: *blocks.start(),
            block_hi: *blocks.end(),
        })
    }

    /// As [`Self::for_grid`], additionally requiring `blocks` window indices.
    pub fn with_blocks(grid: &TorusGrid, blocks: usize) -> Result<Self> {
        let w = Self::for_grid(grid)?;
        if w.len() < blocks {
            return Err(Error::WindowTooSmall(format!(
                "n = {} gives {} dyadic blocks, at least {blocks} needed",
                grid.n(),
                w.len()
            )));
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn band(&self) -> (f64, f64) {
        (2f64.powi(self.k_min), 2f64.powi(self.k_max))
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    /// Indices `k` at which tail and low-pass are both informative: at
    /// `k_min` the low-pass of a band field vanishes, at `k_max + 1` the tail does.
    pub fn eval_range(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max + 1
    }

    pub fn lattice_blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.block_lo..=self.block_hi
    }

    /// Whether every nonzero coefficient lies in the admissible band.
    pub fn contains(&self, radii: Option<(f64, f64)>) -> bool {
        let (lo, hi) = self.band();
        match radii {
            None => true,
            Some((a, b)) => a >= lo && b <= hi,
        }
    }

    pub fn check_band(&self, what: &str, radii: Option<(f64, f64)>) -> Result<()> {
        if self.contains(radii) {
            return Ok(());
        }
        let (lo, hi) = self.band();
        let (a, b) = radii.unwrap_or((0.0, 0.0));
        Err(Error::GuardBand(format!(
            "{what} has support |ξ| in [{a}, {b}], outside the admissible band [{lo}, {hi}]"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Block,
    Lowpass,
}

type MultiplierCache = Mutex<HashMap<(usize, u64, Kind, i32), Arc<Vec<f64>>>>;

/// Past this many cached coefficients (about 256 MB) the cache is flushed;
/// sweeps over many grids would otherwise retain every table.
const CACHE_LIMIT: usize = 1 << 25;

fn multiplier(grid: &TorusGrid, kind: Kind, k: i32) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<MultiplierCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (grid.n(), grid.box_length().to_bits(), kind, k);
    if let Some(m) = cache.lock().expect("multiplier cache poisoned").get(&key) {
        return m.clone();
    }
    let scale = 2f64.powi(-k);
    let geo = grid.geometry();
    let table: Vec<f64> = geo
        .norm
        .iter()
        .map(|&r| match kind {
            Kind::Block => DyadicProfile::phi(r * scale),
            Kind::Lowpass => DyadicProfile::psi(r * scale),
        })
        .collect();
    let table = Arc::new(table);
    let mut guard = cache.lock().expect("multiplier cache poisoned");
    if guard.values().map(|t| t.len()).sum::<usize>() + table.len() > CACHE_LIMIT {
        guard.clear();
    }
    guard.insert(key, table.clone());
    table
}

/// `φ(2^{-k}|ξ|)` in storage order.
pub fn block_multiplier(grid: &TorusGrid, k: i32) -> Arc<Vec<f64>> {
    multiplier(grid, Kind::Block, k)
}

/// `ψ(2^{-k}|ξ|)` in storage order.
pub fn lowpass_multiplier(grid: &TorusGrid, k: i32) -> Arc<Vec<f64>> {
    multiplier(grid, Kind::Lowpass, k)
}

/// `Δ̇_k u`.
pub fn block(u: &SpectralField, k: i32) -> SpectralField {
    u.apply_multiplier(&block_multiplier(u.grid(), k))
}

/// `Ṡ_k u`.
pub fn lowpass(u: &SpectralField, k: i32) -> SpectralField {
    u.apply_multiplier(&lowpass_multiplier(u.grid(), k))
}

/// `u^k = u - Ṡ_k u`, formed by subtraction so coefficients where `ψ = 1`
/// are exact zeros.
pub fn tail(u: &SpectralField, k: i32) -> SpectralField {
    let m = lowpass_multiplier(u.grid(), k);
    let coeffs = u
        .coeffs()
        .iter()
        .zip(m.iter())
        .map(|(c, &w)| {
            if w == 1.0 {
                Default::default()
            } else {
                c - c * w
            }
        })
        .collect();
    SpectralField::from_coeffs(*u.grid(), coeffs, u.is_real(), u.is_mean_zero())
        .expect("tail of a finite field is finite")
}

/// `Σ_{|l'-l| ≤ 2} Δ̇_{l'} u`, summed in ascending `l'`.
pub fn tilde_block(u: &SpectralField, l: i32) -> SpectralField {
    let mut acc = block(u, l - 2);
    for j in l - 1..=l + 2 {
        acc = &acc + &block(u, j);
    }
    acc
}

/// Componentwise versions for vector fields.
pub fn block_vec(u: &VectorField, k: i32) -> VectorField {
    u.map(|c| block(c, k))
}

pub fn lowpass_vec(u: &VectorField, k: i32) -> VectorField {
    u.map(|c| lowpass(c, k))
}

pub fn tail_vec(u: &VectorField, k: i32) -> VectorField {
    u.map(|c| tail(c, k))
}

pub fn tilde_block_vec(u: &VectorField, l: i32) -> VectorField {
    u.map(|c| tilde_block(c, l))
}

/// Spectral region claimed for a band-limited field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `2^{k-1} ≤ |ξ| ≤ 2^{k+1}`, the support of `Δ̇_k`.
    Annulus,
    /// `|ξ| ≤ 2^k`.
    Ball,
}

impl Region {
    pub fn bounds(&self, k: i32) -> (f64, f64) {
        match self {
            Region::Annulus => (2f64.powi(k - 1), 2f64.powi(k + 1)),
            Region::Ball => (0.0, 2f64.powi(k)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinReport {
    pub k: i32,
    pub p: f64,
    pub q: f64,
    pub region: Region,
    pub norm_u_lp: f64,
    pub norm_grad_lq: f64,
    /// `‖∇u‖_{L^q} / (2^{k(1+3/p-3/q)} ‖u‖_{L^p})`.
    pub gradient_ratio: f64,
    /// `‖u‖_{L^q} / (2^{3k(1/p-1/q)} ‖u‖_{L^p})`.
    pub lift_ratio: f64,
    pub norm_u_l2: f64,
    pub norm_grad_l2: f64,
    pub min_freq: f64,
    pub max_freq: f64,
    /// `min|ξ|·‖u‖₂ ≤ ‖∇u‖₂ ≤ max|ξ|·‖u‖₂` over the actual support.
    pub l2_bounds_hold: bool,
}

/// Measured Bernstein ratios of a scalar field claimed to live in `region` at
/// scale `2^k`.
pub fn bernstein_check(
    u: &SpectralField,
    k: i32,
    region: Region,
    p: f64,
    q: f64,
) -> Result<BernsteinReport> {
    if !(p >= 1.0 && q >= p) {
        return Err(Error::InvalidParameter(format!(
            "Bernstein exponents need 1 <= p <= q, got p = {p}, q = {q}"
        )));
    }
    let (lo, hi) = region.bounds(k);
    let radii = u.support_radii();
    if let Some((a, b)) = radii {
        if a < lo || b > hi {
            return Err(Error::Support(format!(
                "support |ξ| in [{a}, {b}] is not inside [{lo}, {hi}]"
            )));
        }
    }
    let grid = u.grid();
    let cell = grid.cell_volume();
    let samples = transform_inverse(u);
    let grad = gradient(u);
    let grad_mag = magnitude(&[
        transform_inverse(grad.comp(0)),
        transform_inverse(grad.comp(1)),
        transform_inverse(grad.comp(2)),
    ]);
    let norm_u_lp = lp_norm_samples(&samples, cell, p);
    let norm_u_lq = lp_norm_samples(&samples, cell, q);
    let norm_grad_lq = lp_norm_samples(&grad_mag, cell, q);
    let lambda = 2f64.powi(k);
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let gain = 3.0 * (inv(p) - inv(q));
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };

    let norm_u_l2 = u.energy().sqrt();
    let norm_grad_l2 = grad.energy().sqrt();
    let (min_freq, max_freq) = radii.unwrap_or((0.0, 0.0));
    // rounding allowance: the two sides are sums of the same squares
    let slack = 1e-12 * max_freq * norm_u_l2;
    let l2_bounds_hold = min_freq * norm_u_l2 <= norm_grad_l2 + slack
        && norm_grad_l2 <= max_freq * norm_u_l2 + slack;
    Ok(BernsteinReport {
        k,
        p,
        q,
        region,
        norm_u_lp,
        norm_grad_lq,
        gradient_ratio: ratio(norm_grad_lq, lambda.powf(1.0 + gain) * norm_u_lp),
        lift_ratio: ratio(norm_u_lq, lambda.powf(gain) * norm_u_lp),
        norm_u_l2,
        norm_grad_l2,
        min_freq,
        max_freq,
        l2_bounds_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_plateau_and_cutoff_are_exact() {
        assert_eq!(DyadicProfile::psi(0.0), 1.0);
        assert_eq!(DyadicProfile::psi(0.5), 1.0);
        assert_eq!(DyadicProfile::psi(1.0), 0.0);
        assert_eq!(DyadicProfile::phi(1.0), 1.0);
        assert_eq!(DyadicProfile::phi(0.5), 0.0);
        assert_eq!(DyadicProfile::phi(2.0), 0.0);
        assert_eq!(DyadicProfile::phi(0.25), 0.0);
        assert!((DyadicProfile::psi(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn floor_index_rounds_down_for_negative_k() {
        assert_eq!(theta_index(0.5, -3), -2);
        assert_eq!(theta_index(0.5, 3), 1);
        assert_eq!(theta_index(0.25, -1), -1);
        assert_eq!(theta_index(0.5, 0), 0);
    }

    #[test]
    fn representation_error_does_not_move_the_index() {
        let theta = (4.0 * 0.7 - 2.0) / (3.0 - 2.0 * 0.7);
        assert!(theta < 0.5);
        for k in -8..=8 {
            assert_eq!(theta_index(theta, k), theta_index(0.5, k));
        }
    }

    #[test]
    fn window_for_standard_box() {
        let w = DyadicWindow::for_grid(&TorusGrid::periodic(64).unwrap()).unwrap();
        assert_eq!((w.k_min, w.k_max), (0, 3));
        let w = DyadicWindow::for_grid(&TorusGrid::periodic(128).unwrap()).unwrap();
        assert_eq!((w.k_min, w.k_max), (0, 4));
        let big = TorusGrid::new(64, 2.0 * std::f64::consts::PI * 8.0).unwrap();
        let w = DyadicWindow::for_grid(&big).unwrap();
        assert_eq!((w.k_min, w.k_max), (-3, 0));
        assert!(DyadicWindow::with_blocks(&TorusGrid::periodic(8).unwrap(), 3).is_err());
    }
}
