//! Transforms, differential and nonlocal multipliers, Leray projection and
//! pressure recovery on the periodic box.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use crate::dealias;
use crate::error::{Error, Result};
use crate::fft::fft3;
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;

/// Scale applied after an unnormalized forward FFT on an `m`-point grid.
pub(crate) fn forward_scale(box_length: f64, m: usize) -> f64 {
    (box_length / m as f64).powi(3) / (2.0 * PI).powf(1.5)
}

/// Scale applied after an unnormalized inverse FFT (independent of grid size).
pub(crate) fn inverse_scale(box_length: f64) -> f64 {
    (2.0 * PI).powf(1.5) / box_length.powi(3)
}

pub fn transform_forward(grid: TorusGrid, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft3(&mut data, grid.n(), FftDirection::Forward);
    let scale = forward_scale(grid.box_length(), grid.n());
    for c in &mut data {
        *c *= scale;
    }
    Ok(SpectralField::from_parts(grid, data, true, false))
}

/// Complex samples of the field on its own grid.
pub fn transform_inverse_complex(u: &SpectralField) -> Vec<Complex64> {
    let grid = u.grid();
    let mut data = u.coeffs().to_vec();
    fft3(&mut data, grid.n(), FftDirection::Inverse);
    let scale = inverse_scale(grid.box_length());
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Real samples of the field (imaginary parts are dropped).
pub fn transform_inverse(u: &SpectralField) -> Vec<f64> {
    if u.is_zero() {
        return vec![0.0; u.grid().len()];
    }
    transform_inverse_complex(u)
        .into_iter()
        .map(|c| c.re)
        .collect()
}

/// `(-Δ)^s u`: multiply by `|ξ|^{2s}`; the zero mode is always annihilated.
pub fn fractional_laplacian(u: &SpectralField, s: f64) -> Result<SpectralField> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional exponent must lie in (0, 2], got {s}"
        )));
    }
    Ok(power_multiplier(u, s))
}

/// `(-Δ)^{-s} u` on mean-zero fields.
pub fn inverse_fractional_laplacian(u: &SpectralField, s: f64) -> Result<SpectralField> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional exponent must lie in (0, 2], got {s}"
        )));
    }
    Ok(power_multiplier(u, -s))
}

/// Multiply by `|ξ|^{2s}` for any real `s`, with the zero mode removed.
pub(crate) fn power_multiplier(u: &SpectralField, s: f64) -> SpectralField {
    let geo = u.grid().geometry();
    let out = u.map_indexed(|i, c| {
        let r2 = geo.norm2[i];
        if r2 == 0.0 {
            Complex64::default()
        } else if s == 1.0 {
            c * r2
        } else {
            c * r2.powf(s)
        }
    });
    out.mean_free()
}

/// `∂_j u`: multiplication by `i ξ_j`.
pub fn derivative(u: &SpectralField, axis: usize) -> SpectralField {
    let grid = *u.grid();
    let dk = grid.dk();
    u.map_indexed(|idx, c| {
        let (i0, i1, i2) = grid.unflat(idx);
        let i = [i0, i1, i2][axis];
        let xi = grid.signed_index(i) as f64 * dk;
        Complex64::new(-c.im * xi, c.re * xi)
    })
    .mean_free()
}

pub fn gradient(u: &SpectralField) -> VectorField {
    VectorField::new([derivative(u, 0), derivative(u, 1), derivative(u, 2)])
        .expect("components share a grid")
}

pub fn divergence(u: &VectorField) -> Result<SpectralField> {
    let d0 = derivative(u.comp(0), 0);
    let d1 = derivative(u.comp(1), 1);
    let d2 = derivative(u.comp(2), 2);
    d0.try_add(&d1)?.try_add(&d2)
}

/// `û ↦ û - ξ (ξ·û)/|ξ|^2`.
pub fn leray_project(u: &VectorField) -> VectorField {
    let grid = *u.grid();
    let geo = grid.geometry();
    let n = grid.len();
    let mut out: [Vec<Complex64>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for idx in 0..n {
        let r2 = geo.norm2[idx];
        let c = [
            u.comp(0).coeffs()[idx],
            u.comp(1).coeffs()[idx],
            u.comp(2).coeffs()[idx],
        ];
        if r2 == 0.0 {
            for o in out.iter_mut() {
                o.push(Complex64::default());
            }
            continue;
        }
        let xi = grid.xi(idx);
        let dot = c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2];
        for j in 0..3 {
            out[j].push(c[j] - dot * (xi[j] / r2));
        }
    }
    let [a, b, c] = out;
    let real = u.is_real();
    VectorField::new([
        SpectralField::from_parts(grid, a, real, true),
        SpectralField::from_parts(grid, b, real, true),
        SpectralField::from_parts(grid, c, real, true),
    ])
    .expect("components share a grid")
    .with_certificate(true)
}

/// `(u_i u_j)^` for `i <= j`, in the order 00, 01, 02, 11, 12, 22.
fn stress(u: &VectorField) -> Result<[SpectralField; 6]> {
    let p = |i: usize, j: usize| dealias::product(u.comp(i), u.comp(j));
    Ok([p(0, 0)?, p(0, 1)?, p(0, 2)?, p(1, 1)?, p(1, 2)?, p(2, 2)?])
}

const PAIRS: [(usize, usize, f64); 6] = [
    (0, 0, 1.0),
    (0, 1, 2.0),
    (0, 2, 2.0),
    (1, 1, 1.0),
    (1, 2, 2.0),
    (2, 2, 1.0),
];

/// `ξ⊗ξ : (u⊗u)^(ξ)`, shared by the pressure and its residual.
fn stress_contraction(grid: &TorusGrid, stress: &[SpectralField; 6], idx: usize) -> Complex64 {
    let xi = grid.xi(idx);
    PAIRS
        .iter()
        .zip(stress)
        .map(|(&(i, j, w), s)| s.coeffs()[idx] * (w * xi[i] * xi[j]))
        .sum()
}

/// Pressure solving `-ΔP = ∇·∇·(u⊗u)` with zero mean.
pub fn pressure_from_velocity(u: &VectorField) -> Result<SpectralField> {
    let grid = *u.grid();
    let stress = stress(u)?;
    let geo = grid.geometry();
    let coeffs = (0..grid.len())
        .map(|idx| {
            let r2 = geo.norm2[idx];
            if r2 == 0.0 {
                Complex64::default()
            } else {
                -stress_contraction(&grid, &stress, idx) / r2
            }
        })
        .collect();
    Ok(SpectralField::from_parts(grid, coeffs, u.is_real(), true))
}

/// `max_ξ |(-ΔP)^ - (∇·∇·(u⊗u))^|` over nonzero modes, and the scale
/// `max_ξ |ξ|^2 · max|(u⊗u)^|` it should be compared against.
pub fn pressure_residual(u: &VectorField, p: &SpectralField) -> Result<(f64, f64)> {
    let grid = *u.grid();
    let stress = stress(u)?;
    let geo = grid.geometry();
    let mut worst: f64 = 0.0;
    let mut kmax2: f64 = 0.0;
    for idx in 1..grid.len() {
        let r2 = geo.norm2[idx];
        let lhs = p.coeffs()[idx] * r2;
        let rhs = -stress_contraction(&grid, &stress, idx);
        worst = worst.max((lhs - rhs).norm());
        if stress.iter().any(|s| s.coeffs()[idx].norm() > 0.0) {
            kmax2 = kmax2.max(r2);
        }
    }
    let amp = stress.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
    Ok((worst, amp * kmax2.max(grid.dk() * grid.dk())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_x3(grid: TorusGrid) -> SpectralField {
        transform_forward(grid, &grid.sample(|x| x[2].sin())).unwrap()
    }

    #[test]
    fn zero_array_gives_zero_coefficients() {
        let g = TorusGrid::periodic(8).unwrap();
        let f = transform_forward(g, &vec![0.0; g.len()]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn single_mode_has_two_coefficients() {
        let g = TorusGrid::periodic(16).unwrap();
        let f = sin_x3(g);
        let expected = (2.0 * PI).powf(1.5) / 2.0;
        let plus = g.position([0, 0, 1]).unwrap();
        let minus = g.position([0, 0, -1]).unwrap();
        let mut count = 0;
        for (i, c) in f.coeffs().iter().enumerate() {
            if c.norm() > 1e-9 {
                count += 1;
                assert!(i == plus || i == minus);
                assert!((c.norm() - expected).abs() < 1e-12 * expected);
            }
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn rejects_bad_input() {
        let g = TorusGrid::periodic(8).unwrap();
        assert!(matches!(
            transform_forward(g, &[0.0; 5]),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut v = vec![0.0; g.len()];
        v[3] = f64::NAN;
        assert!(matches!(transform_forward(g, &v), Err(Error::NonFinite(3))));
    }

    #[test]
    fn unit_frequency_laplacian_is_identity() {
        let g = TorusGrid::periodic(16).unwrap();
        let f = sin_x3(g).mean_free();
        let lf = fractional_laplacian(&f, 1.0).unwrap();
        for (a, b) in lf.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(fractional_laplacian(&f, 0.0).is_err());
        assert!(fractional_laplacian(&f, 2.5).is_err());
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let g = TorusGrid::periodic(16).unwrap();
        let grad = gradient(&sin_x3(g));
        let expected = g.sample(|x| x[2].cos());
        for j in 0..2 {
            assert!(transform_inverse(grad.comp(j))
                .iter()
                .all(|v| v.abs() < 1e-13));
        }
        let got = transform_inverse(grad.comp(2));
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn shear_has_zero_pressure() {
        let g = TorusGrid::periodic(16).unwrap();
        let u = VectorField::new([
            sin_x3(g).mean_free(),
            SpectralField::zeros(g),
            SpectralField::zeros(g),
        ])
        .unwrap();
        let p = pressure_from_velocity(&u).unwrap();
        assert!(p.max_abs() < 1e-12);
    }
}
