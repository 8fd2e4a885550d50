//! Named verification suites composed from the library operations, and the
//! report they produce.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dealias::product;
use crate::decay::DecaySeries;
use crate::diagnostics::{diagnostics, ChainReport};
use crate::dyadic::{
    bernstein_check, block, lattice_blocks, lowpass, tail_vec, DyadicProfile, DyadicWindow, Region,
};
use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::forge::{generate, picard_solve, SpectrumSpec};
use crate::grid::TorusGrid;
use crate::ledger::{
    energy_balance_residual, high_theta, ledger_classical, ledger_classical_multi,
    ledger_fractional_high, ledger_fractional_low, remainder_decay, support_audit, DecayTerm,
    LedgerCheck, TrilinearLedger,
};
use crate::norms::sup_norm;
use crate::paraproduct::{bony_split, product_ratio};
use crate::spectral::{
    gradient, leray_project, pressure_from_velocity, pressure_residual, transform_forward,
    transform_inverse,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the estimated working set, in bytes.
pub const BUDGET_VAR: &str = "LPVERIFY_BUDGET_BYTES";

/// Products of two band fields need a low and a high block.
pub const MIN_WINDOW_BLOCKS: usize = 2;

/// Removed low-frequency parts must fall below this fraction of the ledger
/// scale at the top of the window.
pub const TOP_REMOVED_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Core,
    Dyadic,
    Paraproduct,
    ClassicalIdentity,
    FractionalLow,
    FractionalHigh,
    SHalf,
    Diagnostics,
    EnergyBalance,
    All,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Core,
        Suite::Dyadic,
        Suite::Paraproduct,
        Suite::ClassicalIdentity,
        Suite::FractionalLow,
        Suite::FractionalHigh,
        Suite::SHalf,
        Suite::Diagnostics,
        Suite::EnergyBalance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Dyadic => "dyadic",
            Suite::Paraproduct => "paraproduct",
            Suite::ClassicalIdentity => "classical-identity",
            Suite::FractionalLow => "fractional-low",
            Suite::FractionalHigh => "fractional-high",
            Suite::SHalf => "s-half",
            Suite::Diagnostics => "diagnostics",
            Suite::EnergyBalance => "energy-balance",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::ALL.to_vec(),
            s => vec![s],
        }
    }

    /// Orders exercised when the configuration names none.
    pub fn default_s(self) -> Vec<f64> {
        match self {
            Suite::Paraproduct => vec![0.55, 5.0 / 6.0],
            Suite::FractionalLow => vec![5.0 / 6.0],
            Suite::FractionalHigh => vec![0.6, 0.7],
            Suite::SHalf => vec![0.5],
            Suite::Diagnostics => vec![5.0 / 6.0, 0.6],
            Suite::EnergyBalance => vec![1.0, 5.0 / 6.0, 0.5],
            _ => Vec::new(),
        }
    }

    /// Whether `s` is admissible; `None` when the suite takes no order.
    pub fn admits(self, s: f64) -> Option<bool> {
        let ok = match self {
            Suite::Paraproduct | Suite::Diagnostics => s > 0.0 && s < 1.0,
            Suite::FractionalLow => (5.0 / 6.0..1.0).contains(&s),
            Suite::FractionalHigh => (0.5..5.0 / 6.0).contains(&s),
            Suite::SHalf => s == 0.5,
            Suite::EnergyBalance => (0.5..=1.0).contains(&s),
            _ => return None,
        };
        Some(ok)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n: usize,
    #[serde(default = "default_box")]
    pub box_length: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Orders `s`; empty selects each suite's defaults.
    #[serde(default)]
    pub s: Vec<f64>,
    /// Restricts `k` to `[lo, hi]` within the evaluation range.
    #[serde(default)]
    pub k_window: Option<[i32; 2]>,
    /// Number of seeded fields (and of product pairs).
    #[serde(default = "default_fields")]
    pub fields: usize,
    /// Power-law exponent `α` of the test fields, `‖Δ̇_k u‖₂ ∝ 2^{-αk}`.
    #[serde(default = "default_slope")]
    pub slope: f64,
    /// Zero amplitude runs every suite on `u = 0`.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Overrides keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub svg: bool,
}

fn default_box() -> f64 {
    TAU
}
fn default_theta() -> f64 {
    0.5
}
fn default_fields() -> usize {
    1
}
fn default_slope() -> f64 {
    -1.0
}
fn default_amplitude() -> f64 {
    1.0
}

impl SuiteConfig {
    pub fn new(suite: Suite, n: usize) -> Self {
        Self {
            suite,
            n,
            box_length: TAU,
            seed: 0,
            theta: 0.5,
            s: Vec::new(),
            k_window: None,
            fields: 1,
            slope: default_slope(),
            amplitude: 1.0,
            tolerances: BTreeMap::new(),
            out: None,
            threads: None,
            svg: false,
        }
    }

    pub fn orders(&self, suite: Suite) -> Vec<f64> {
        if self.s.is_empty() {
            return suite.default_s();
        }
        match self.suite {
            // under `all`, each member keeps the orders it admits
            Suite::All => self
                .s
                .iter()
                .copied()
                .filter(|&s| suite.admits(s) == Some(true))
                .collect(),
            _ => self.s.clone(),
        }
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<(TorusGrid, DyadicWindow)> {
        let grid =
            TorusGrid::new(self.n, self.box_length).map_err(|e| Error::Config(e.to_string()))?;
        let window = DyadicWindow::with_blocks(&grid, MIN_WINDOW_BLOCKS)?;
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if self.fields == 0 {
            return Err(Error::Config("at least one field is needed".into()));
        }
        if !self.amplitude.is_finite() || !self.slope.is_finite() {
            return Err(Error::Config("amplitude and slope must be finite".into()));
        }
        if self.suite != Suite::All {
            for &s in &self.s {
                match self.suite.admits(s) {
                    Some(true) => {}
                    Some(false) => {
                        return Err(Error::Config(format!(
                            "s = {s} is not admissible for suite {}",
                            self.suite.name()
                        )))
                    }
                    None => {
                        return Err(Error::Config(format!(
                            "suite {} takes no order s",
                            self.suite.name()
                        )))
                    }
                }
            }
        }
        if let Some([lo, hi]) = self.k_window {
            let r = window.eval_range();
            if lo > hi || lo < *r.start() || hi > *r.end() {
                return Err(Error::Config(format!(
                    "k window [{lo}, {hi}] is not inside the evaluation range [{}, {}]",
                    r.start(),
                    r.end()
                )));
            }
        }
        if let Some(0) = self.threads {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok((grid, window))
    }
}

/// Working-set estimate: about forty complex arrays of the grid size live at
/// once inside a ledger evaluation.
pub fn estimate_bytes(n: usize) -> u64 {
    40 * 16 * (n as u64).pow(3)
}

pub fn check_budget(n: usize) -> Result<()> {
    let Ok(raw) = std::env::var(BUDGET_VAR) else {
        return Ok(());
    };
    let budget: u64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{BUDGET_VAR} must be a byte count, got {raw:?}")))?;
    let need = estimate_bytes(n);
    if need > budget {
        return Err(Error::Budget { need, budget });
    }
    Ok(())
}

/// Exit status for an error: 2 for configuration, 3 for resources, 1 otherwise.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::WindowTooSmall(_)
        | Error::InvalidParameter(_)
        | Error::Json(_) => 2,
        Error::Budget { .. } => 3,
        _ => 1,
    }
}

/// Process exit status for a finished run or a failed one.
pub fn exit_code(outcome: &Result<RunReport>) -> i32 {
    match outcome {
        Ok(r) if r.passed => 0,
        Ok(_) => 1,
        Err(e) => error_code(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    /// Which identity or bound the check certifies.
    pub anchor: String,
    pub k: Option<i32>,
    pub value: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRecord {
    pub suite: String,
    pub s: Option<f64>,
    pub series: DecaySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRecord {
    pub s: f64,
    pub chain: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: SuiteConfig,
    pub window: DyadicWindow,
    pub checks: Vec<Check>,
    pub decay: Vec<DecayRecord>,
    pub chains: Vec<ChainRecord>,
    /// Measurements the configuration could not support, with the reason.
    pub skipped: Vec<String>,
    /// Wall-clock seconds per suite.
    pub timings: BTreeMap<String, f64>,
    pub version: String,
    pub profile_fingerprint: String,
    pub passed: bool,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn checks_for<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a Check> {
        self.checks.iter().filter(move |c| c.suite == suite)
    }
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    grid: TorusGrid,
    window: DyadicWindow,
    suite: &'static str,
    fields: Vec<VectorField>,
    checks: Vec<Check>,
    decay: Vec<DecayRecord>,
    chains: Vec<ChainRecord>,
    skipped: Vec<String>,
}

impl Ctx<'_> {
    /// `|value| ≤ tol·scale`, with `tol` overridable by name.
    fn bound(
        &mut self,
        name: &str,
        anchor: &str,
        k: Option<i32>,
        value: f64,
        scale: f64,
        tol: f64,
    ) {
        let tolerance = self.cfg.tol(name, tol);
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name: name.to_string(),
            anchor: anchor.to_string(),
            k,
            value,
            scale,
            tolerance,
            pass: value.is_finite() && value.abs() <= tolerance * scale,
        });
    }

    fn flag(&mut self, name: &str, anchor: &str, k: Option<i32>, ok: bool) {
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name: name.to_string(),
            anchor: anchor.to_string(),
            k,
            value: if ok { 0.0 } else { 1.0 },
            scale: 1.0,
            tolerance: 0.0,
            pass: ok,
        });
    }

    fn ledger(&mut self, anchor: &str, ledger: &TrilinearLedger) {
        for c in &ledger.checks {
            let LedgerCheck {
                name,
                value,
                scale,
                tolerance,
                ..
            } = c;
            self.bound(name, anchor, Some(ledger.k), *value, *scale, *tolerance);
        }
        for c in &ledger.certificates {
            self.flag(
                &format!("finite {}", c.name),
                anchor,
                Some(ledger.k),
                c.finite,
            );
        }
    }

    fn ks(&self) -> Vec<i32> {
        let r = self.window.eval_range();
        let (lo, hi) = match self.cfg.k_window {
            Some([lo, hi]) => (lo, hi),
            None => (*r.start(), *r.end()),
        };
        (lo..=hi).collect()
    }

    fn is_zero_field(&self) -> bool {
        self.cfg.amplitude == 0.0
    }

    fn decay(
        &mut self,
        s: Option<f64>,
        u: &VectorField,
        term: DecayTerm,
        ks: &[i32],
    ) -> Result<()> {
        let anchor = format!("{}-decay", term.name());
        match remainder_decay(u, term, ks.iter().copied()) {
            Ok(series) => {
                let ok = series.meets_prediction();
                self.checks.push(Check {
                    suite: self.suite.to_string(),
                    name: format!("{} slope", term.name()),
                    anchor,
                    k: None,
                    value: series.slope,
                    scale: series.predicted,
                    tolerance: crate::decay::EXPONENT_TOLERANCE,
                    pass: ok,
                });
                self.decay.push(DecayRecord {
                    suite: self.suite.to_string(),
                    s,
                    series,
                });
            }
            // a vanishing field has no rate, only the identity `term = 0`
            Err(Error::Degenerate(_)) if self.is_zero_field() => {
                self.flag(&format!("{} vanishes", term.name()), &anchor, None, true);
            }
            // the window is too narrow to carry a rate
            Err(e @ Error::InsufficientPoints { .. }) => {
                self.skipped
                    .push(format!("{}: {} fit skipped: {e}", self.suite, term.name()));
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn field_for(cfg: &SuiteConfig, grid: TorusGrid, i: usize) -> Result<VectorField> {
    if cfg.amplitude == 0.0 {
        return Ok(VectorField::zeros(grid));
    }
    let mut spec = SpectrumSpec::power_law(cfg.slope, cfg.seed + i as u64);
    spec.amplitude = cfg.amplitude;
    generate(grid, &spec)
}

/// Execute the configured suites. The report is not written here; see
/// [`crate::output::write_report`].
pub fn run_suite(cfg: &SuiteConfig) -> Result<RunReport> {
    let (grid, window) = cfg.validate()?;
    check_budget(cfg.n)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_inner(cfg, grid, window))
}

fn run_inner(cfg: &SuiteConfig, grid: TorusGrid, window: DyadicWindow) -> Result<RunReport> {
    let fields = (0..cfg.fields)
        .map(|i| field_for(cfg, grid, i))
        .collect::<Result<Vec<_>>>()?;
    let mut ctx = Ctx {
        cfg,
        grid,
        window,
        suite: "",
        fields,
        checks: Vec::new(),
        decay: Vec::new(),
        chains: Vec::new(),
        skipped: Vec::new(),
    };
    let mut timings = BTreeMap::new();
    for suite in cfg.suite.members() {
        ctx.suite = suite.name();
        let t = Instant::now();
        let orders = cfg.orders(suite);
        match suite {
            Suite::Core => core_suite(&mut ctx)?,
            Suite::Dyadic => dyadic_suite(&mut ctx)?,
            Suite::Paraproduct => paraproduct_suite(&mut ctx, &orders)?,
            Suite::ClassicalIdentity => classical_suite(&mut ctx)?,
            Suite::FractionalLow => fractional_low_suite(&mut ctx, &orders)?,
            Suite::FractionalHigh => fractional_high_suite(&mut ctx, &orders)?,
            Suite::SHalf => fractional_high_suite(&mut ctx, &orders)?,
            Suite::Diagnostics => diagnostics_suite(&mut ctx, &orders)?,
            Suite::EnergyBalance => energy_suite(&mut ctx, &orders)?,
            Suite::All => unreachable!("expanded above"),
        }
        timings.insert(suite.name().to_string(), t.elapsed().as_secs_f64());
    }
    let passed = ctx.checks.iter().all(|c| c.pass);
    Ok(RunReport {
        config: cfg.clone(),
        window,
        checks: ctx.checks,
        decay: ctx.decay,
        chains: ctx.chains,
        skipped: ctx.skipped,
        timings,
        version: VERSION.to_string(),
        profile_fingerprint: DyadicProfile::fingerprint(),
        passed,
    })
}

fn rel(err: f64, scale: f64) -> (f64, f64) {
    (err, if scale > 0.0 { scale } else { 1.0 })
}

fn core_suite(ctx: &mut Ctx) -> Result<()> {
    let grid = ctx.grid;
    for u in ctx.fields.clone() {
        // round trip through physical space
        let mut worst: f64 = 0.0;
        for c in u.comps() {
            let back = transform_forward(grid, &transform_inverse(c))?;
            worst = worst.max((&back - c).max_abs());
        }
        let (v, s) = rel(worst, u.max_abs());
        ctx.bound("round trip", "transform-round-trip", None, v, s, 1e-12);

        let phys: f64 = u
            .comps()
            .iter()
            .map(|c| transform_inverse(c).iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            * grid.cell_volume();
        let (v, s) = rel(phys - u.energy(), u.energy());
        ctx.bound("plancherel", "plancherel", None, v, s, 1e-12);

        // a field with a gradient part, so the projection has work to do
        let potential = gradient(u.comp(0));
        let raw = u.try_add(&potential)?;
        let once = leray_project(&raw);
        let twice = leray_project(&once);
        let (v, s) = rel(twice.try_sub(&once)?.max_abs(), once.max_abs());
        ctx.bound("leray idempotence", "leray-projection", None, v, s, 1e-13);
        let (v, s) = rel(leray_project(&potential).max_abs(), potential.max_abs());
        ctx.bound(
            "leray annihilates gradients",
            "leray-projection",
            None,
            v,
            s,
            1e-13,
        );

        let p = pressure_from_velocity(&u)?;
        let (res, scale) = pressure_residual(&u, &p)?;
        let (v, s) = rel(res, scale);
        ctx.bound("pressure residual", "pressure-poisson", None, v, s, 1e-10);
    }
    Ok(())
}

fn dyadic_suite(ctx: &mut Ctx) -> Result<()> {
    let grid = ctx.grid;
    let geo = grid.geometry();
    let blocks: Vec<i32> = lattice_blocks(&grid).collect();
    for u in ctx.fields.clone() {
        let f = u.comp(0);
        let amp = f.max_abs().max(f64::MIN_POSITIVE);
        let parts: Vec<SpectralField> = blocks.iter().map(|&k| block(f, k)).collect();
        for (&k, b) in blocks.iter().zip(&parts) {
            let (lo, hi) = (2f64.powi(k - 1), 2f64.powi(k + 1));
            let outside = b
                .coeffs()
                .iter()
                .zip(&geo.norm)
                .filter(|(c, &r)| (r <= lo || r >= hi) && c.norm() != 0.0)
                .count();
            ctx.bound(
                "block support",
                "block-annulus-support",
                Some(k),
                outside as f64,
                1.0,
                0.0,
            );
            let rep = bernstein_check(b, k, Region::Annulus, 2.0, 2.0)?;
            ctx.flag(
                "bernstein L2 two-sided",
                "bernstein",
                Some(k),
                rep.l2_bounds_hold,
            );
        }
        for (i, &j) in blocks.iter().enumerate() {
            for &k in &blocks[i..] {
                if k - j >= 2 {
                    let v = block(&parts[i], k).max_abs();
                    ctx.bound(
                        "block orthogonality",
                        "almost-orthogonality",
                        Some(k),
                        v,
                        1.0,
                        0.0,
                    );
                }
            }
        }
        let sum = crate::paraproduct::pairwise_sum(grid, parts);
        let (v, s) = rel((&sum - f).max_abs(), amp);
        ctx.bound(
            "block reconstruction",
            "block-reconstruction",
            None,
            v,
            s,
            1e-12,
        );
        for &k in &blocks {
            let d = &(&lowpass(f, k + 1) - &lowpass(f, k)) - &block(f, k);
            let (v, s) = rel(d.max_abs(), amp);
            ctx.bound(
                "low-pass telescoping",
                "low-pass-telescoping",
                Some(k),
                v,
                s,
                1e-12,
            );
        }
    }
    Ok(())
}

fn paraproduct_suite(ctx: &mut Ctx, orders: &[f64]) -> Result<()> {
    let grid = ctx.grid;
    let n = ctx.fields.len();
    for i in 0..n {
        let f = ctx.fields[i].comp(0).clone();
        let g = field_for(ctx.cfg, grid, n + i)?.comp(1).clone();
        let split = bony_split(&f, &g)?;
        let fg = product(&f, &g)?;
        let (v, s) = rel((&split.total() - &fg).max_abs(), fg.max_abs());
        ctx.bound(
            "bony reconstruction",
            "bony-decomposition",
            None,
            v,
            s,
            1e-11,
        );
        let audit_ok = split
            .audit
            .iter()
            .all(|a| a.contained && a.leak <= crate::paraproduct::LEAK_LIMIT);
        ctx.flag(
            "paraproduct summand support",
            "paraproduct-support",
            None,
            audit_ok,
        );
        for &s in orders {
            let ratio = product_ratio(&f, &g, s)?;
            let v = ratio.unwrap_or(0.0);
            ctx.flag(
                &format!("product ratio finite at s={s}"),
                "sobolev-product-estimate",
                None,
                v.is_finite(),
            );
        }
    }
    Ok(())
}

fn classical_suite(ctx: &mut Ctx) -> Result<()> {
    let ks = ctx.ks();
    let theta = ctx.cfg.theta;
    let mut thetas = vec![theta];
    thetas.extend([0.25, 0.75].into_iter().filter(|&t| t != theta));
    for (fi, u) in ctx.fields.clone().into_iter().enumerate() {
        let per_k: Vec<Result<(Vec<TrilinearLedger>, usize)>> = ks
            .par_iter()
            .map(|&k| {
                Ok((
                    ledger_classical_multi(&u, k, &thetas)?,
                    support_audit(&u, k)?.violations,
                ))
            })
            .collect();
        for (&k, r) in ks.iter().zip(per_k) {
            let (ledgers, violations) = r?;
            ctx.ledger("classical-trilinear-split", &ledgers[0]);
            let base =
                ledgers[0].term("I231").unwrap_or(0.0) + ledgers[0].term("I232").unwrap_or(0.0);
            for l in &ledgers[1..] {
                let other = l.term("I231").unwrap_or(0.0) + l.term("I232").unwrap_or(0.0);
                ctx.bound(
                    &format!("theta invariance {}", l.theta),
                    "resonant-theta-partition",
                    Some(k),
                    other - base,
                    l.scale,
                    crate::ledger::TOL_THETA,
                );
            }
            ctx.bound(
                "support violations",
                "frequency-support-lemma",
                Some(k),
                violations as f64,
                1.0,
                0.0,
            );
        }
        if fi == 0 {
            ctx.decay(None, &u, DecayTerm::ThetaRemainder { theta }, &ks)?;
        }
    }
    Ok(())
}

fn fractional_low_suite(ctx: &mut Ctx, orders: &[f64]) -> Result<()> {
    let ks = ctx.ks();
    for (fi, u) in ctx.fields.clone().into_iter().enumerate() {
        for &s in orders {
            let per_k: Vec<Result<(TrilinearLedger, TrilinearLedger)>> = ks
                .par_iter()
                .map(|&k| {
                    Ok((
                        ledger_fractional_low(&u, k, s)?,
                        ledger_classical(&u, k, 0.5)?,
                    ))
                })
                .collect();
            for r in per_k {
                let (frac, classical) = r?;
                ctx.ledger("fractional-low-trilinear-split", &frac);
                let diff = frac
                    .terms
                    .iter()
                    .map(|(name, v)| (v - classical.term(name).unwrap_or(f64::NAN)).abs())
                    .fold(0.0, f64::max);
                ctx.bound(
                    "classical coherence",
                    "order-independent-split",
                    Some(frac.k),
                    diff,
                    frac.scale,
                    1e-12,
                );
            }
            if fi == 0 {
                ctx.decay(Some(s), &u, DecayTerm::FractionalRemainder { s }, &ks)?;
            }
        }
    }
    Ok(())
}

/// High-frequency path; also serves `s = 1/2`, where the first split sits at `Ṡ_0`.
fn fractional_high_suite(ctx: &mut Ctx, orders: &[f64]) -> Result<()> {
    let ks: Vec<i32> = ctx.ks().into_iter().filter(|&k| k >= 0).collect();
    let top = ctx.window.k_max + 1;
    for u in ctx.fields.clone() {
        for &s in orders {
            let per_k: Vec<Result<TrilinearLedger>> = ks
                .par_iter()
                .map(|&k| ledger_fractional_high(&u, k, s))
                .collect();
            for r in per_k {
                let l = r?;
                ctx.ledger("high-frequency-trilinear-split", &l);
                if l.k == top {
                    for term in ["J1_low", "J2_low", "J3_low"] {
                        let v = l.term(term).unwrap_or(f64::NAN);
                        ctx.bound(
                            &format!("{term} at window top"),
                            "removed-low-part-vanishes",
                            Some(l.k),
                            v,
                            l.scale,
                            TOP_REMOVED_TOL,
                        );
                    }
                }
            }
            if s == 0.5 {
                ctx.flag(
                    "split at zero",
                    "half-order-split",
                    None,
                    high_theta(s) == 0.0,
                );
                let v = sup_norm(tail_vec(&u, 0).comps());
                ctx.flag(
                    "finite sup of u^0",
                    "half-order-tail-bound",
                    None,
                    v.is_finite(),
                );
            }
        }
    }
    Ok(())
}

fn diagnostics_suite(ctx: &mut Ctx, orders: &[f64]) -> Result<()> {
    for u in ctx.fields.clone() {
        for &s in orders {
            let rep = diagnostics(&u, s)?;
            for chain in rep.chains {
                ctx.checks.push(Check {
                    suite: ctx.suite.to_string(),
                    name: format!("{} at s={s}", chain.name),
                    anchor: chain.name.clone(),
                    k: None,
                    value: chain.c_emp,
                    scale: 1.0,
                    tolerance: f64::INFINITY,
                    pass: chain.holds(),
                });
                ctx.chains.push(ChainRecord { s, chain });
            }
        }
    }
    Ok(())
}

/// Forcing amplitude for the manufactured solutions; small enough that the
/// Picard map contracts.
pub const FORCING_AMPLITUDE: f64 = 1e-2;

fn energy_suite(ctx: &mut Ctx, orders: &[f64]) -> Result<()> {
    let ks = ctx.ks();
    for u in ctx.fields.clone() {
        let f = u.scaled(FORCING_AMPLITUDE);
        for &s in orders {
            let sol = picard_solve(&f, s, 60, 1e-13)?;
            let floor = (10.0 * sol.residual).max(1e-9);
            let per_k: Vec<Result<_>> = ks
                .par_iter()
                .map(|&k| energy_balance_residual(&sol.u, &sol.f, s, k))
                .collect();
            for r in per_k {
                let b = r?;
                ctx.bound(
                    &format!("energy balance at s={s}"),
                    "localized-energy-balance",
                    Some(b.k),
                    b.residual,
                    b.scale,
                    floor,
                );
            }
        }
    }
    Ok(())
}
