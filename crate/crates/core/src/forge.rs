//! Seeded test fields and small-data forced steady solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dealias::{product, NOISE_FLOOR};
use crate::dyadic::{DyadicProfile, DyadicWindow};
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::spectral::{derivative, leray_project, power_multiplier, transform_forward};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    SingleMode,
    TaylorGreen,
    WhiteBand,
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    /// `α` in `‖Δ̇_k u‖₂ ∝ 2^{-αk}` for power laws.
    #[serde(default)]
    pub slope: f64,
    /// Dyadic band `[k_lo, k_hi]`; defaults to the grid's window.
    #[serde(default)]
    pub band: Option<[i32; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "unit")]
    pub amplitude: f64,
    /// Lattice index of a single mode.
    #[serde(default)]
    pub mode: Option<[i64; 3]>,
    #[serde(default)]
    pub polarization: Option<[f64; 3]>,
    #[serde(default)]
    pub phase: f64,
}

fn unit() -> f64 {
    1.0
}

impl SpectrumSpec {
    pub fn power_law(slope: f64, seed: u64) -> Self {
        Self {
            kind: SpectrumKind::PowerLaw,
            slope,
            band: None,
            seed,
            amplitude: 1.0,
            mode: None,
            polarization: None,
            phase: 0.0,
        }
    }

    pub fn white_band(seed: u64) -> Self {
        Self {
            kind: SpectrumKind::WhiteBand,
            ..Self::power_law(0.0, seed)
        }
    }

    pub fn taylor_green(amplitude: f64) -> Self {
        Self {
            kind: SpectrumKind::TaylorGreen,
            amplitude,
            ..Self::power_law(0.0, 0)
        }
    }

    pub fn single_mode(mode: [i64; 3], polarization: [f64; 3], amplitude: f64, phase: f64) -> Self {
        Self {
            kind: SpectrumKind::SingleMode,
            amplitude,
            mode: Some(mode),
            polarization: Some(polarization),
            phase,
            ..Self::power_law(0.0, 0)
        }
    }

    pub fn with_band(mut self, lo: i32, hi: i32) -> Self {
        self.band = Some([lo, hi]);
        self
    }

    /// Target `‖Δ̇_k u‖₂` for the random kinds. A white band has flat
    /// coefficient variance, so its block norms grow like `2^{3k/2}`.
    pub fn block_target(&self, k: i32, k_lo: i32) -> f64 {
        let alpha = match self.kind {
            SpectrumKind::WhiteBand => -1.5,
            _ => self.slope,
        };
        self.amplitude * 2f64.powf(-alpha * (k - k_lo) as f64)
    }
}

/// Zero every coefficient at or below `rel · max|c|`.
fn clean(u: SpectralField, rel: f64) -> SpectralField {
    let cut = rel * u.max_abs();
    u.map_indexed(|_, c| {
        if c.norm() <= cut {
            Complex64::default()
        } else {
            c
        }
    })
}

fn from_samples(grid: TorusGrid, f: [&dyn Fn([f64; 3]) -> f64; 3]) -> Result<VectorField> {
    let comps = [
        clean(transform_forward(grid, &grid.sample(f[0]))?, NOISE_FLOOR).mean_free(),
        clean(transform_forward(grid, &grid.sample(f[1]))?, NOISE_FLOOR).mean_free(),
        clean(transform_forward(grid, &grid.sample(f[2]))?, NOISE_FLOOR).mean_free(),
    ];
    VectorField::new(comps)
}

/// Stream key of the pair `±m`, identical for both members.
fn pair_key(m: [i64; 3]) -> (u64, bool) {
    let neg = [-m[0], -m[1], -m[2]];
    let canonical = m >= neg;
    let c = if canonical { m } else { neg };
    let pack = |v: i64| (v + (1 << 20)) as u64 & 0x1f_ffff;
    (
        (pack(c[0]) << 42) | (pack(c[1]) << 21) | pack(c[2]),
        canonical,
    )
}

fn random_band(grid: TorusGrid, seed: u64, lo: f64, hi: f64) -> VectorField {
    let geo = grid.geometry();
    let mut comps = [
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
        vec![Complex64::default(); grid.len()],
    ];
    for idx in 0..grid.len() {
        let r = geo.norm[idx];
        if r < lo || r > hi {
            continue;
        }
        let (key, canonical) = pair_key(grid.lattice(idx));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(key);
        for comp in comps.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re, im);
            comp[idx] = if canonical { z } else { z.conj() };
        }
    }
    let [a, b, c] = comps;
    let field = VectorField::new([
        SpectralField::from_parts(grid, a, true, true),
        SpectralField::from_parts(grid, b, true, true),
        SpectralField::from_parts(grid, c, true, true),
    ])
    .expect("components share a grid");
    leray_project(&field)
}

/// Reshape the block norms of `u` to `targets` (indexed from `k_lo`) with a
/// radial gain `Σ_k φ_k(|ξ|) c_k`, refined by fixed-point correction. Only
/// the support of `u` is visited.
fn shape_blocks(u: &VectorField, k_lo: i32, targets: &[f64]) -> VectorField {
    let grid = *u.grid();
    let geo = grid.geometry();
    let support: Vec<usize> = (0..grid.len())
        .filter(|&idx| u.comps().iter().any(|c| c.coeffs()[idx].norm_sqr() > 0.0))
        .collect();
    // φ_k(|ξ|) per support point and target block
    let phis: Vec<Vec<f64>> = support
        .iter()
        .map(|&idx| {
            (0..targets.len())
                .map(|i| DyadicProfile::phi(geo.norm[idx] / 2f64.powi(k_lo + i as i32)))
                .collect()
        })
        .collect();
    let power: Vec<f64> = support
        .iter()
        .map(|&idx| u.comps().iter().map(|c| c.coeffs()[idx].norm_sqr()).sum())
        .collect();
    let cell = grid.spectral_cell();
    let mut gains = vec![1.0; targets.len()];
    let radial =
        |gains: &[f64], p: &[f64]| -> f64 { gains.iter().zip(p).map(|(c, f)| c * f).sum() };
    for _ in 0..40 {
        let mut sq = vec![0.0; targets.len()];
        for (p, w) in phis.iter().zip(&power) {
            let g = radial(&gains, p);
            for (acc, f) in sq.iter_mut().zip(p) {
                *acc += (f * g).powi(2) * w;
            }
        }
        let mut worst: f64 = 0.0;
        for (i, t) in targets.iter().enumerate() {
            let got = (sq[i] * cell).sqrt();
            if got > 0.0 {
                gains[i] *= t / got;
                worst = worst.max((got / t - 1.0).abs());
            }
        }
        if worst < 1e-4 {
            break;
        }
    }
    let mut gain = vec![0.0; grid.len()];
    for (&idx, p) in support.iter().zip(&phis) {
        gain[idx] = radial(&gains, p);
    }
    u.map(|c| c.apply_multiplier(&gain))
        .with_certificate(u.is_div_free())
}

pub fn generate(grid: TorusGrid, spec: &SpectrumSpec) -> Result<VectorField> {
    if !(spec.amplitude.is_finite() && spec.slope.is_finite()) {
        return Err(Error::InvalidParameter(
            "amplitude and slope must be finite".into(),
        ));
    }
    let window = DyadicWindow::for_grid(&grid)?;
    let dk = grid.dk();
    let a = spec.amplitude;
    let field = match spec.kind {
        SpectrumKind::SingleMode => {
            let m = spec
                .mode
                .ok_or_else(|| Error::InvalidParameter("single-mode spec needs `mode`".into()))?;
            let p = spec.polarization.unwrap_or([1.0, 0.0, 0.0]);
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidParameter(
                    "polarization must be nonzero".into(),
                ));
            }
            let wave = move |x: [f64; 3]| {
                (dk * (m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2]) + spec.phase)
                    .sin()
            };
            let c = |i: usize| a * p[i] / norm;
            let (c0, c1, c2) = (c(0), c(1), c(2));
            from_samples(
                grid,
                [&|x| c0 * wave(x), &|x| c1 * wave(x), &|x| c2 * wave(x)],
            )?
        }
        SpectrumKind::TaylorGreen => from_samples(
            grid,
            [
                &|x| a * (dk * x[0]).sin() * (dk * x[1]).cos() * (dk * x[2]).cos(),
                &|x| -a * (dk * x[0]).cos() * (dk * x[1]).sin() * (dk * x[2]).cos(),
                &|_| 0.0,
            ],
        )?,
        SpectrumKind::WhiteBand | SpectrumKind::PowerLaw => {
            let [k_lo, k_hi] = spec.band.unwrap_or([window.k_min, window.k_max]);
            if k_lo > k_hi || k_lo < window.k_min || k_hi > window.k_max {
                return Err(Error::GuardBand(format!(
                    "band [{k_lo}, {k_hi}] exceeds the window [{}, {}]",
                    window.k_min, window.k_max
                )));
            }
            let raw = random_band(grid, spec.seed, 2f64.powi(k_lo), 2f64.powi(k_hi));
            let targets: Vec<f64> = (k_lo..=k_hi).map(|k| spec.block_target(k, k_lo)).collect();
            shape_blocks(&raw, k_lo, &targets)
        }
    };
    let out = leray_project(&field);
    window.check_band("generated field", out.effective_support_radii(NOISE_FLOOR))?;
    Ok(out)
}

/// `(u·∇)u`, alias-free.
pub fn advection(u: &VectorField) -> Result<VectorField> {
    let grid = *u.grid();
    let mut out = Vec::with_capacity(3);
    for i in 0..3 {
        let mut acc = SpectralField::zeros(grid);
        for j in 0..3 {
            acc = acc.try_add(&product(u.comp(j), &derivative(u.comp(i), j))?)?;
        }
        out.push(acc);
    }
    let comps: [SpectralField; 3] = out.try_into().expect("three components");
    VectorField::new(comps)
}

/// Indicator of the window band `2^{k_min} ≤ |ξ| ≤ 2^{k_max}`.
pub fn band_mask(grid: &TorusGrid) -> Result<Vec<f64>> {
    let w = DyadicWindow::for_grid(grid)?;
    let (lo, hi) = w.band();
    Ok(grid
        .geometry()
        .norm
        .iter()
        .map(|&r| if r >= lo && r <= hi { 1.0 } else { 0.0 })
        .collect())
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub u: VectorField,
    pub f: VectorField,
    /// `‖(-Δ)^s u + B[Leray(u·∇u)] - B[Leray f]‖₂ / ‖f‖₂`, `B` the band projection.
    pub residual: f64,
    pub iterations: usize,
}

fn band_leray(v: &VectorField, mask: &[f64]) -> VectorField {
    leray_project(&v.map(|c| c.apply_multiplier(mask)))
}

/// Steady residual `(-Δ)^s u + B Leray(u·∇u - f)` of the band-truncated system.
pub fn steady_residual(u: &VectorField, f: &VectorField, s: f64) -> Result<VectorField> {
    let mask = band_mask(u.grid())?;
    let lin = u.map(|c| power_multiplier(c, s));
    let nl = band_leray(&advection(u)?, &mask);
    lin.try_add(&nl)?.try_sub(&band_leray(f, &mask))
}

fn relative(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Solve `(-Δ)^s u + B Leray(u·∇u) = B Leray f` by the iteration
/// `u ← (-Δ)^{-s} B Leray(f - u·∇u)`, where `B` keeps the window band so
/// every iterate stays inside the guarded window.
pub fn picard_solve(f: &VectorField, s: f64, max_iter: usize, tol: f64) -> Result<PicardResult> {
    if !(0.5..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "Picard solve needs 1/2 <= s <= 1, got {s}"
        )));
    }
    let mask = band_mask(f.grid())?;
    let forcing = band_leray(f, &mask);
    let f_norm = f.energy().sqrt();
    let invert = |v: &VectorField| v.map(|c| power_multiplier(c, -s)).with_certificate(true);

    let mut u = invert(&forcing);
    let mut last_update = f64::INFINITY;
    let mut growing = 0;
    for it in 1..=max_iter {
        let res = relative(steady_residual(&u, f, s)?.energy().sqrt(), f_norm);
        if res <= tol {
            return Ok(PicardResult {
                u,
                f: f.clone(),
                residual: res,
                iterations: it,
            });
        }
        let next = invert(&forcing.try_sub(&band_leray(&advection(&u)?, &mask))?);
        let update = next.try_sub(&u)?.energy().sqrt();
        if !update.is_finite() {
            return Err(Error::Divergence(it));
        }
        growing = if update > last_update { growing + 1 } else { 0 };
        if growing >= 3 {
            return Err(Error::Divergence(it));
        }
        last_update = update;
        u = next;
    }
    let residual = relative(steady_residual(&u, f, s)?.energy().sqrt(), f_norm);
    if residual <= tol {
        return Ok(PicardResult {
            u,
            f: f.clone(),
            residual,
            iterations: max_iter,
        });
    }
    Err(Error::MaxIterations { max_iter, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_is_a_sine() {
        let g = TorusGrid::periodic(16).unwrap();
        let spec = SpectrumSpec::single_mode([0, 0, 1], [1.0, 0.0, 0.0], 2.0, 0.3);
        let u = generate(g, &spec).unwrap();
        let samples = crate::spectral::transform_inverse(u.comp(0));
        let want = g.sample(|x| 2.0 * (x[2] + 0.3).sin());
        for (a, b) in samples.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(u.comp(1).is_zero() && u.comp(2).is_zero());
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let g = TorusGrid::periodic(32).unwrap();
        let a = generate(g, &SpectrumSpec::power_law(1.2, 5)).unwrap();
        let b = generate(g, &SpectrumSpec::power_law(1.2, 5)).unwrap();
        let c = generate(g, &SpectrumSpec::power_law(1.2, 6)).unwrap();
        assert_eq!(a.comp(0).coeffs(), b.comp(0).coeffs());
        assert_ne!(a.comp(0).coeffs(), c.comp(0).coeffs());
        assert!(a.comps().iter().all(|c| c.hermitian_defect() == 0.0));
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let g = TorusGrid::periodic(16).unwrap();
        let r = picard_solve(&VectorField::zeros(g), 1.0, 5, 1e-12).unwrap();
        assert!(r.u.is_zero());
        assert_eq!(r.iterations, 1);
    }
}
