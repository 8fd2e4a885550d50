//! Bony decomposition of products and the dyadic bookkeeping behind the
//! product law `‖fg‖_{Ḣ^{2s-3/2}} ≤ C ‖f‖_{Ḣ^s} ‖g‖_{Ḣ^s}`.

use serde::Serialize;

use crate::dealias::{product, NOISE_FLOOR};
use crate::dyadic::{block, lattice_blocks, lowpass, tilde_block, DyadicWindow};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::norms::{block_l2, sobolev_norm, NormMethod};

/// Pre-mask leakage above this fraction of a summand's peak means the
/// product was not resolved and is reported as a support failure.
pub const LEAK_LIMIT: f64 = 1e-12;

/// Support record of one paraproduct summand `Δ̇_i a · Ṡ_{i-2} b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummandAudit {
    pub i: i32,
    pub term: &'static str,
    /// `[2^{i-2}, (9/8) 2^{i+1})`.
    pub annulus: (f64, f64),
    /// Radii allowed by the operands' actual supports, `None` if one is zero.
    pub operand_bound: Option<(f64, f64)>,
    /// Largest coefficient outside the operand bound, relative to the peak,
    /// before it is cleared.
    pub leak: f64,
    pub contained: bool,
}

#[derive(Debug, Clone)]
pub struct BonySplit {
    /// `Σ_i Δ̇_i f · Ṡ_{i-2} g`.
    pub t_fg: SpectralField,
    /// `Σ_i Δ̇_i g · Ṡ_{i-2} f`.
    pub t_gf: SpectralField,
    /// `Σ_i Δ̇_i f · Δ̃_i g`.
    pub remainder: SpectralField,
    pub audit: Vec<SummandAudit>,
}

impl BonySplit {
    pub fn total(&self) -> SpectralField {
        &(&self.t_fg + &self.t_gf) + &self.remainder
    }
}

/// Radii that `a·b` can occupy given the supports of `a` and `b`.
pub fn product_support_bound(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a_lo, a_hi) = a?;
    let (b_lo, b_hi) = b?;
    let lo = (a_lo - b_hi).max(b_lo - a_hi).max(0.0);
    Some((lo, a_hi + b_hi))
}

/// Zero every coefficient whose `|ξ|` falls outside `[lo, hi]` (with a
/// relative allowance for the rounding of `|ξ|`), returning the masked
/// field and the largest cleared magnitude relative to the peak.
pub fn mask_to_shell(u: &SpectralField, bound: Option<(f64, f64)>) -> (SpectralField, f64) {
    let peak = u.max_abs();
    let geo = u.grid().geometry();
    let (lo, hi) = match bound {
        Some((lo, hi)) => (lo * (1.0 - 1e-12), hi * (1.0 + 1e-12)),
        None => (f64::INFINITY, f64::NEG_INFINITY),
    };
    let mut leak: f64 = 0.0;
    let keep: Vec<f64> = geo
        .norm
        .iter()
        .zip(u.coeffs())
        .map(|(&r, c)| {
            if r < lo || r > hi {
                leak = leak.max(c.norm());
                0.0
            } else {
                1.0
            }
        })
        .collect();
    let masked = u.apply_multiplier(&keep);
    let rel = if peak > 0.0 { leak / peak } else { 0.0 };
    (masked, rel)
}

/// Sum in a fixed balanced binary tree, so the result does not depend on
/// how summands were produced.
pub fn pairwise_sum(grid: TorusGrid, mut terms: Vec<SpectralField>) -> SpectralField {
    match terms.len() {
        0 => SpectralField::zeros(grid),
        1 => terms.pop().expect("one term"),
        len => {
            let right = terms.split_off(len / 2);
            &pairwise_sum(grid, terms) + &pairwise_sum(grid, right)
        }
    }
}

fn check_mean_zero(name: &str, u: &SpectralField) -> Result<()> {
    let c = u.coeffs()[0];
    if c.re != 0.0 || c.im != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must have zero mean"
        )));
    }
    Ok(())
}

fn paraproduct(
    hi: &SpectralField,
    lo: &SpectralField,
    term: &'static str,
    blocks: std::ops::RangeInclusive<i32>,
    audit: &mut Vec<SummandAudit>,
) -> Result<SpectralField> {
    let grid = *hi.grid();
    let mut summands = Vec::new();
    for i in blocks {
        let a = block(hi, i);
        let b = lowpass(lo, i - 2);
        let bound = product_support_bound(a.support_radii(), b.support_radii());
        let annulus = (2f64.powi(i - 2), 1.125 * 2f64.powi(i + 1));
        let raw = product(&a, &b)?;
        let (masked, leak) = mask_to_shell(&raw, bound);
        let contained = match bound {
            None => true,
            Some((l, h)) => l >= annulus.0 && h < annulus.1,
        };
        audit.push(SummandAudit {
            i,
            term,
            annulus,
            operand_bound: bound,
            leak,
            contained,
        });
        if !contained || leak > LEAK_LIMIT {
            return Err(Error::Support(format!(
                "{term} summand at i = {i} leaves the annulus [{}, {}) (bound {bound:?}, leak {leak:e})",
                annulus.0, annulus.1
            )));
        }
        summands.push(masked);
    }
    Ok(pairwise_sum(grid, summands))
}

/// Split `fg` into its two paraproducts and the resonant remainder.
///
/// Both inputs must have zero mean and lie in the admissible band, which
/// makes the split exact up to rounding.
pub fn bony_split(f: &SpectralField, g: &SpectralField) -> Result<BonySplit> {
    f.check_grid(g)?;
    let grid = *f.grid();
    check_mean_zero("f", f)?;
    check_mean_zero("g", g)?;
    let w = DyadicWindow::for_grid(&grid)?;
    w.check_band("f", f.effective_support_radii(NOISE_FLOOR))?;
    w.check_band("g", g.effective_support_radii(NOISE_FLOOR))?;

    let mut audit = Vec::new();
    let t_fg = paraproduct(f, g, "t_fg", w.blocks(), &mut audit)?;
    let t_gf = paraproduct(g, f, "t_gf", w.blocks(), &mut audit)?;
    let mut summands = Vec::new();
    for i in w.blocks() {
        let a = block(f, i);
        let b = tilde_block(g, i);
        let bound = product_support_bound(a.support_radii(), b.support_radii());
        let (masked, _) = mask_to_shell(&product(&a, &b)?, bound);
        summands.push(masked);
    }
    let remainder = pairwise_sum(grid, summands);
    Ok(BonySplit {
        t_fg,
        t_gf,
        remainder,
        audit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductTerms {
    pub k: i32,
    /// `2^{k(2s-3/2)} ‖Δ̇_k(fg)‖₂`.
    pub block: f64,
    /// `2^{k(2s-3/2)} ‖Δ̇_k Σ_i Δ̇_i f Ṡ_{i-2} g‖₂`.
    pub l: f64,
    pub m: f64,
    pub n: f64,
    /// `Σ_{|i-k|≤2} 2^{is}‖Δ̇_i f‖ Σ_{j≤i-3} 2^{(3/2-s)(j-i)} 2^{js}‖Δ̇_j g‖`.
    pub l_bound: f64,
    pub m_bound: f64,
    /// `Σ_{i≥k-4} 2^{2(k-i)s} 2^{is}‖Δ̇_i f‖ 2^{is}‖Δ̃_i g‖`.
    pub n_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductReport {
    pub s: f64,
    pub norm_fg: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    /// `None` when `‖f‖‖g‖ = 0`: the estimate then holds vacuously.
    pub ratio: Option<f64>,
    /// `‖fg‖_{Ḣ^{2s-3/2}}` from the dyadic sum.
    pub norm_fg_lp_sum: f64,
    pub terms: Vec<ProductTerms>,
    pub l_aggregate: f64,
    pub m_aggregate: f64,
    pub n_aggregate: f64,
    /// Largest `L_k / L_bound_k` over `k` with a nonzero bound; likewise below.
    pub c_l: f64,
    pub c_m: f64,
    pub c_n: f64,
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "product estimate needs 0 < s < 1, got {s}"
        )))
    }
}

/// `‖fg‖_{Ḣ^{2s-3/2}} / (‖f‖_{Ḣ^s} ‖g‖_{Ḣ^s})`, or `None` when the
/// denominator vanishes. The zero mode of `fg` is excluded, as for every
/// homogeneous norm.
pub fn product_ratio(f: &SpectralField, g: &SpectralField, s: f64) -> Result<Option<f64>> {
    check_s(s)?;
    let nf = sobolev_norm(f, s, NormMethod::Fourier)?;
    let ng = sobolev_norm(g, s, NormMethod::Fourier)?;
    if nf * ng == 0.0 {
        return Ok(None);
    }
    let fg = product(f, g)?;
    Ok(Some(
        sobolev_norm(&fg, 2.0 * s - 1.5, NormMethod::Fourier)? / (nf * ng),
    ))
}

fn weighted_blocks(u: &SpectralField, s: f64, blocks: &[i32]) -> Vec<f64> {
    blocks
        .iter()
        .map(|&k| 2f64.powi(k).powf(s) * block_l2(u, k))
        .collect()
}

fn bound_lm(a: &[f64], b: &[f64], blocks: &[i32], k: i32, s: f64) -> f64 {
    let mut total = 0.0;
    for (ii, &i) in blocks.iter().enumerate() {
        if (i - k).abs() > 2 {
            continue;
        }
        let mut inner = 0.0;
        for (jj, &j) in blocks.iter().enumerate() {
            if j <= i - 3 {
                inner += 2f64.powf((1.5 - s) * (j - i) as f64) * b[jj];
            }
        }
        total += a[ii] * inner;
    }
    total
}

/// Full dyadic account of the product estimate for one pair.
pub fn product_sobolev_bound(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
) -> Result<ProductReport> {
    check_s(s)?;
    let grid = *f.grid();
    let sigma = 2.0 * s - 1.5;
    let norm_f = sobolev_norm(f, s, NormMethod::Fourier)?;
    let norm_g = sobolev_norm(g, s, NormMethod::Fourier)?;
    let fg = product(f, g)?;
    let norm_fg = sobolev_norm(&fg, sigma, NormMethod::Fourier)?;
    let norm_fg_lp_sum = sobolev_norm(&fg, sigma, NormMethod::LpSum)?;
    let ratio = (norm_f * norm_g > 0.0).then(|| norm_fg / (norm_f * norm_g));

    let split = bony_split(f, g)?;
    let blocks: Vec<i32> = lattice_blocks(&grid).collect();
    let a_f = weighted_blocks(f, s, &blocks);
    let a_g = weighted_blocks(g, s, &blocks);
    let tilde_g: Vec<f64> = blocks
        .iter()
        .map(|&i| 2f64.powi(i).powf(s) * tilde_block(g, i).energy().sqrt())
        .collect();

    let mut terms = Vec::with_capacity(blocks.len());
    for &k in &blocks {
        let w = 2f64.powi(k).powf(sigma);
        let mut n_bound = 0.0;
        for (ii, &i) in blocks.iter().enumerate() {
            if i >= k - 4 {
                n_bound += 2f64.powf(2.0 * (k - i) as f64 * s) * a_f[ii] * tilde_g[ii];
            }
        }
        terms.push(ProductTerms {
            k,
            block: w * block_l2(&fg, k),
            l: w * block_l2(&split.t_fg, k),
            m: w * block_l2(&split.t_gf, k),
            n: w * block_l2(&split.remainder, k),
            l_bound: bound_lm(&a_f, &a_g, &blocks, k, s),
            m_bound: bound_lm(&a_g, &a_f, &blocks, k, s),
            n_bound,
        });
    }
    let aggregate =
        |sel: fn(&ProductTerms) -> f64| terms.iter().map(|t| sel(t).powi(2)).sum::<f64>().sqrt();
    let constant = |val: fn(&ProductTerms) -> f64, bound: fn(&ProductTerms) -> f64| {
        terms
            .iter()
            .filter(|t| bound(t) > 0.0)
            .map(|t| val(t) / bound(t))
            .fold(0.0, f64::max)
    };
    Ok(ProductReport {
        s,
        norm_fg,
        norm_f,
        norm_g,
        ratio,
        norm_fg_lp_sum,
        l_aggregate: aggregate(|t| t.l),
        m_aggregate: aggregate(|t| t.m),
        n_aggregate: aggregate(|t| t.n),
        c_l: constant(|t| t.l, |t| t.l_bound),
        c_m: constant(|t| t.m, |t| t.m_bound),
        c_n: constant(|t| t.n, |t| t.n_bound),
        terms,
    })
}
