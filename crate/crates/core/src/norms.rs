//! Lebesgue, Dirichlet, homogeneous Sobolev and Besov norms.

use serde::Serialize;

use crate::dyadic::{block, lattice_blocks, DyadicWindow};
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::spectral::{derivative, transform_inverse};

/// Scalar and vector fields alike, viewed as a list of scalar components.
pub trait Components {
    fn components(&self) -> &[SpectralField];
}

impl Components for SpectralField {
    fn components(&self) -> &[SpectralField] {
        std::slice::from_ref(self)
    }
}

impl Components for VectorField {
    fn components(&self) -> &[SpectralField] {
        self.comps()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    Fourier,
    LpSum,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub name: String,
    pub s_or_p: f64,
    pub method: NormMethod,
    pub value: f64,
}

/// Pointwise Euclidean magnitude of sampled components.
pub fn magnitude(samples: &[Vec<f64>]) -> Vec<f64> {
    let len = samples[0].len();
    (0..len)
        .map(|x| samples.iter().map(|c| c[x] * c[x]).sum::<f64>().sqrt())
        .collect()
}

/// `(Σ |v|^p · cell)^{1/p}`, or `max |v|` for `p = ∞`.
pub fn lp_norm_samples(samples: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return (samples.iter().map(|v| v * v).sum::<f64>() * cell).sqrt();
    }
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    // normalize by the peak so large p cannot overflow
    let sum: f64 = samples.iter().map(|v| (v.abs() / peak).powf(p)).sum();
    peak * (sum * cell).powf(1.0 / p)
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "L^p needs p >= 1, got {p}"
        )))
    }
}

/// `‖u‖_{L^p}` by physical-space quadrature on the field's own grid; vector
/// fields use the pointwise Euclidean magnitude.
pub fn lp_norm<F: Components>(u: &F, p: f64) -> Result<f64> {
    check_p(p)?;
    let comps = u.components();
    let cell = comps[0].grid().cell_volume();
    if comps.iter().all(|c| c.is_zero()) {
        return Ok(0.0);
    }
    if comps.len() == 1 {
        return Ok(lp_norm_samples(&transform_inverse(&comps[0]), cell, p));
    }
    let samples: Vec<Vec<f64>> = comps.iter().map(transform_inverse).collect();
    Ok(lp_norm_samples(&magnitude(&samples), cell, p))
}

/// `Σ_i ‖∇u_i‖²_{L²}`, by quadrature of the sampled gradient.
pub fn dirichlet<F: Components>(u: &F) -> f64 {
    let mut acc = 0.0;
    for c in u.components() {
        if c.is_zero() {
            continue;
        }
        let cell = c.grid().cell_volume();
        for axis in 0..3 {
            let d = transform_inverse(&derivative(c, axis));
            acc += d.iter().map(|v| v * v).sum::<f64>() * cell;
        }
    }
    acc
}

/// `Σ_ξ |ξ|^{2s} |û(ξ)|² (2π/L)³` over nonzero modes, i.e. `‖(-Δ)^{s/2}u‖²_{L²}`.
pub fn fractional_dirichlet<F: Components>(u: &F, s: f64) -> f64 {
    u.components()
        .iter()
        .map(|c| weighted_energy(c, |r2| if s == 1.0 { r2 } else { r2.powf(s) }))
        .sum()
}

fn weighted_energy<W: Fn(f64) -> f64>(c: &SpectralField, weight: W) -> f64 {
    let geo = c.grid().geometry();
    let mut acc = 0.0;
    for (z, &r2) in c.coeffs().iter().zip(&geo.norm2) {
        if r2 > 0.0 && (z.re != 0.0 || z.im != 0.0) {
            acc += weight(r2) * z.norm_sqr();
        }
    }
    acc * c.grid().spectral_cell()
}

/// `‖Δ̇_k u‖_{L²}` by Plancherel.
pub fn block_l2<F: Components>(u: &F, k: i32) -> f64 {
    u.components()
        .iter()
        .map(|c| block(c, k).energy())
        .sum::<f64>()
        .sqrt()
}

/// `‖u‖_{Ḣ^s}`, either from `|ξ|^{2s}` weights or from the dyadic sum
/// `(Σ_k 2^{2ks} ‖Δ̇_k u‖²)^{1/2}` over every block the lattice can carry.
/// The zero mode never contributes.
pub fn sobolev_norm<F: Components>(u: &F, s: f64, method: NormMethod) -> Result<f64> {
    match method {
        NormMethod::Fourier => Ok(u
            .components()
            .iter()
            .map(|c| weighted_energy(c, |r2| r2.powf(s)))
            .sum::<f64>()
            .sqrt()),
        NormMethod::LpSum => {
            let grid = u.components()[0].grid();
            let w = lattice_blocks(grid);
            let mut acc = 0.0;
            for k in w {
                let b = block_l2(u, k);
                acc += (2f64.powi(k).powf(s) * b).powi(2);
            }
            Ok(acc.sqrt())
        }
        NormMethod::Quadrature => Err(Error::InvalidParameter(
            "homogeneous Sobolev norms have no quadrature form here".into(),
        )),
    }
}

/// `sup_k 2^{ks} ‖Δ̇_k u‖_{L^∞}` over the grid's dyadic window.
pub fn besov_infty_norm<F: Components>(u: &F, s: f64) -> Result<f64> {
    let grid = *u.components()[0].grid();
    let w = DyadicWindow::for_grid(&grid)?;
    let mut best: f64 = 0.0;
    for k in w.blocks() {
        let sup = block_sup(u, k);
        best = best.max(2f64.powi(k).powf(s) * sup);
    }
    Ok(best)
}

/// `‖Δ̇_k u‖_{L^∞}` on the grid samples.
pub fn block_sup<F: Components>(u: &F, k: i32) -> f64 {
    let blocks: Vec<SpectralField> = u.components().iter().map(|c| block(c, k)).collect();
    sup_norm(&blocks)
}

/// Grid maximum of the pointwise magnitude of the given components.
pub fn sup_norm(comps: &[SpectralField]) -> f64 {
    if comps.iter().all(|c| c.is_zero()) {
        return 0.0;
    }
    let samples: Vec<Vec<f64>> = comps.iter().map(transform_inverse).collect();
    magnitude(&samples).into_iter().fold(0.0, f64::max)
}

/// `‖û‖_{L^r(B_R)} = (Σ_{|ξ| < R} |û(ξ)|^r (2π/L)³)^{1/r}` on the lattice,
/// with `|û|` the Euclidean norm over components.
pub fn fourier_ball_norm<F: Components>(u: &F, r: f64, radius: f64) -> Result<f64> {
    check_p(r)?;
    let comps = u.components();
    let grid = comps[0].grid();
    let geo = grid.geometry();
    let mut acc = 0.0;
    for (idx, &rad) in geo.norm.iter().enumerate() {
        if rad >= radius {
            continue;
        }
        let m2: f64 = comps.iter().map(|c| c.coeffs()[idx].norm_sqr()).sum();
        if m2 > 0.0 {
            acc += m2.powf(0.5 * r);
        }
    }
    Ok((acc * grid.spectral_cell()).powf(1.0 / r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::spectral::transform_forward;
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = TorusGrid::periodic(16).unwrap();
        let s = transform_forward(g, &g.sample(|x| x[2].sin()))
            .unwrap()
            .mean_free();
        let expected = (2.0 * PI).powi(3) / 2.0;
        assert!((lp_norm(&s, 2.0).unwrap().powi(2) - expected).abs() < 1e-11 * expected);
        assert!((lp_norm(&s, f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!((dirichlet(&s) - expected).abs() < 1e-11 * expected);
        assert!((fractional_dirichlet(&s, 1.0) - expected).abs() < 1e-11 * expected);
        let h = sobolev_norm(&s, 0.5, NormMethod::Fourier).unwrap();
        assert!((h - expected.sqrt()).abs() < 1e-12 * h);
        assert!(lp_norm(&s, 0.5).is_err());
    }
}
