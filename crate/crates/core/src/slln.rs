//! Capacity strong law of large numbers: analytic majorants and a
//! finite-horizon simulation under a Gaussian mean family.
//!
//! If `tau_{phi_p}(Z_n) <= c n^{-alpha}`, the deviation capacities are
//! bounded by `2 exp(-phi_q(eps / tau_n)) <= C0 exp(-K n^beta)` with
//! `beta = q alpha`, `C0 = 2 exp(1/q - 1/2)` and `K = (eps/c)^q / q`, and
//! the series of bounds is dominated by `(1/beta) K^{-1/beta} Gamma(1/beta)`.
//!
//! The simulated deviation event is "the running mean leaves
//! `[m_under - eps, m_bar + eps]` at some `n` in `[n_min, n_steps]`", a
//! finite-horizon stand-in for the lim inf / lim sup event.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::{gaussian_family_log_upper_exp_moment, FamilySpec, GaussianMeanFamily};
use crate::nfunc::{phi_p_dual_index, phi_p_eval, NFunction};
use crate::par;
use crate::rng::{stream_rng, SAMPLER_VERSION};
use crate::subgauss::{default_lambda_grid, tau_phi, GaussianOracle};

/// Default cap on `n_steps * n_paths * |M|` scalar draws.
pub const DEFAULT_MAX_DRAWS: u64 = 1_000_000_000;
const TAU_TOL: f64 = 1e-7;
// below this both bounds lose relative precision
const SUBNORMAL_FLOOR: f64 = 1e-300;

/// Constants of the majorization chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremConstants {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub c: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub c0: f64,
    pub k: f64,
}

pub fn theorem_constants(p: f64, alpha: f64, c: f64, epsilon: f64) -> Result<TheoremConstants> {
    let q = phi_p_dual_index(p)?;
    for (name, v) in [("alpha", alpha), ("c", c), ("epsilon", epsilon)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    Ok(TheoremConstants {
        p,
        q,
        alpha,
        c,
        epsilon,
        beta: q * alpha,
        c0: 2.0 * (1.0 / q - 0.5).exp(),
        k: (epsilon / c).powf(q) / q,
    })
}

impl TheoremConstants {
    /// `tau_n = c n^{-alpha}`.
    pub fn tau_at(&self, n: u64) -> f64 {
        self.c * (n as f64).powf(-self.alpha)
    }

    /// `C0 exp(-K n^beta)`.
    pub fn theorem_bound(&self, n: u64) -> f64 {
        self.c0 * (-self.k * (n as f64).powf(self.beta)).exp()
    }

    /// First `n` with `eps / tau_n > 1`.
    pub fn first_majorized_n(&self) -> u64 {
        let mut n = ((self.c / self.epsilon).powf(1.0 / self.alpha))
            .floor()
            .max(1.0) as u64;
        while self.epsilon / self.tau_at(n) <= 1.0 {
            n += 1;
        }
        while n > 1 && self.epsilon / self.tau_at(n - 1) > 1.0 {
            n -= 1;
        }
        n
    }

    pub fn phi(&self) -> NFunction {
        NFunction::PhiP(self.p)
    }
}

/// `2 exp(-phi^*(eps / tau_n))`; for `phi_p` this is `2 exp(-phi_q(eps / tau_n))`.
pub fn lemma_bound_at_n(phi_p: &NFunction, tau_n: f64, epsilon: f64) -> Result<f64> {
    if !(tau_n > 0.0) || !tau_n.is_finite() {
        return Err(Error::domain(format!(
            "tau_n must be finite and > 0, got {tau_n}"
        )));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    let y = epsilon / tau_n;
    let exponent = match phi_p {
        NFunction::PhiP(p) => phi_p_eval(phi_p_dual_index(*p)?, y)?,
        other => other.conjugate(y)?,
    };
    Ok(2.0 * (-exponent).exp())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Gamma(x)` for `x > 0` (Lanczos, with reflection below 1/2).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "gamma_fn requires finite x > 0, got {x}"
        )));
    }
    if x == x.floor() && x <= 171.0 {
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// `int_0^inf exp(-K x^beta) dx = (1/beta) K^{-1/beta} Gamma(1/beta)`.
pub fn integral_bound(k: f64, beta: f64) -> Result<f64> {
    if !(k > 0.0) || !(beta > 0.0) {
        return Err(Error::domain(format!(
            "integral bound needs K > 0 and beta > 0, got {k}, {beta}"
        )));
    }
    Ok(k.powf(-1.0 / beta) * gamma_fn(1.0 / beta)? / beta)
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `sum_{n=1}^N exp(-K n^beta)`, ascending with compensated summation.
pub fn series_partial_sum(consts: &TheoremConstants, n_terms: u64) -> f64 {
    partial_sums(consts, &[n_terms])[0]
}

/// Partial sums at each (ascending) checkpoint in one pass.
fn partial_sums(consts: &TheoremConstants, checkpoints: &[u64]) -> Vec<f64> {
    let mut acc = Neumaier::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut n = 0u64;
    for &target in checkpoints {
        while n < target {
            n += 1;
            acc.add((-consts.k * (n as f64).powf(consts.beta)).exp());
        }
        out.push(acc.value());
    }
    out
}

/// Parameters of a path-ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct SllnConfig {
    pub family: GaussianMeanFamily,
    pub n_steps: u64,
    pub n_paths: u64,
    pub epsilon: f64,
    pub n_min: u64,
    pub master_seed: u64,
    pub max_draws: u64,
}

impl SllnConfig {
    pub fn new(
        family: GaussianMeanFamily,
        n_steps: u64,
        n_paths: u64,
        epsilon: f64,
        n_min: u64,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            family,
            n_steps,
            n_paths,
            epsilon,
            n_min,
            master_seed,
            max_draws: DEFAULT_MAX_DRAWS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Three means `{-0.3, 0, 0.3}`, `sigma = 1`, `10^4` steps, `10^3` paths,
    /// `eps = 0.1`, deviations counted from `n = 5000`.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            family: GaussianMeanFamily::new(vec![-0.3, 0.0, 0.3], 1.0)
                .expect("static family is valid"),
            n_steps: 10_000,
            n_paths: 1_000,
            epsilon: 0.1,
            n_min: 5_000,
            master_seed,
            max_draws: DEFAULT_MAX_DRAWS,
        }
    }

    pub fn with_max_draws(mut self, max_draws: u64) -> Self {
        self.max_draws = max_draws;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || self.n_paths == 0 {
            return Err(Error::domain("n_steps and n_paths must be >= 1"));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::domain(format!(
                "epsilon must be finite and > 0, got {}",
                self.epsilon
            )));
        }
        if self.n_min == 0 || self.n_min > self.n_steps {
            return Err(Error::domain(format!(
                "n_min must lie in [1, n_steps = {}], got {}",
                self.n_steps, self.n_min
            )));
        }
        Ok(())
    }

    pub fn total_draws(&self) -> Option<u64> {
        self.n_steps
            .checked_mul(self.n_paths)?
            .checked_mul(self.family.means().len() as u64)
    }

    fn check_budget(&self) -> Result<()> {
        match self.total_draws() {
            Some(d) if d <= self.max_draws => Ok(()),
            d => Err(Error::ResourceLimit(format!(
                "run needs {} scalar draws, cap is {} (raise CAPLAW_MAX_DRAWS to allow it)",
                d.map_or_else(|| "more than u64::MAX".to_string(), |d| d.to_string()),
                self.max_draws
            ))),
        }
    }

    /// `{1, 2, 5} x 10^k` for `n >= 10` up to `n_steps`, plus `n_steps`.
    pub fn checkpoints(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut decade = 10u64;
        'outer: loop {
            for mult in [1, 2, 5] {
                match decade.checked_mul(mult) {
                    Some(n) if n <= self.n_steps => out.push(n),
                    _ => break 'outer,
                }
            }
            decade = match decade.checked_mul(10) {
                Some(d) => d,
                None => break,
            };
        }
        if out.last() != Some(&self.n_steps) {
            out.push(self.n_steps);
        }
        out
    }
}

/// Deviation frequency of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelRate {
    pub m: f64,
    pub rate: f64,
}

/// Frequency with which the running mean lies outside the band at time `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointFrequency {
    pub n: u64,
    pub per_model: Vec<ModelRate>,
    /// Max over models: empirical `V^` of the single-time deviation event.
    pub max_frequency: f64,
    /// Binomial standard error of the maximizing model's frequency.
    pub std_error: f64,
}

/// Empirical capacities of the deviation event and its complement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub upper_deviation: f64,
    pub lower_sandwich: f64,
    pub per_model_rates: Vec<ModelRate>,
    pub checkpoints: Vec<CheckpointFrequency>,
}

struct PathOutcome {
    deviated: bool,
    outside_at: Vec<bool>,
}

fn simulate_path(cfg: &SllnConfig, model: usize, path: u64, checkpoints: &[u64]) -> PathOutcome {
    let m = cfg.family.means()[model];
    let sigma = cfg.family.sigma();
    let lo = cfg.family.m_under() - cfg.epsilon;
    let hi = cfg.family.m_bar() + cfg.epsilon;
    let mut rng = stream_rng(cfg.master_seed, model as u64, path);
    let mut sum = Neumaier::default();
    let mut deviated = false;
    let mut outside_at = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for n in 1..=cfg.n_steps {
        let z: f64 = rng.sample(StandardNormal);
        sum.add(m + sigma * z);
        let mean = sum.value() / n as f64;
        let outside = mean > hi || mean < lo;
        if n >= cfg.n_min && outside {
            deviated = true;
        }
        if next < checkpoints.len() && checkpoints[next] == n {
            outside_at.push(outside);
            next += 1;
        }
    }
    PathOutcome {
        deviated,
        outside_at,
    }
}

/// Streams every path of every model and counts band exits.
pub fn simulate_running_means(cfg: &SllnConfig) -> Result<CapacityEstimate> {
    cfg.validate()?;
    cfg.check_budget()?;
    let checkpoints = cfg.checkpoints();
    let models = cfg.family.means().len();
    let paths = cfg.n_paths;
    let outcomes = par::map_indexed(models * paths as usize, |job| {
        let (model, path) = (job / paths as usize, job as u64 % paths);
        simulate_path(cfg, model, path, &checkpoints)
    });

    let total = paths as f64;
    let mut deviating = vec![0u64; models];
    let mut outside = vec![vec![0u64; checkpoints.len()]; models];
    for (job, o) in outcomes.iter().enumerate() {
        let model = job / paths as usize;
        deviating[model] += o.deviated as u64;
        for (k, &flag) in o.outside_at.iter().enumerate() {
            outside[model][k] += flag as u64;
        }
    }
    let means = cfg.family.means();
    let per_model_rates: Vec<ModelRate> = means
        .iter()
        .zip(&deviating)
        .map(|(&m, &d)| ModelRate {
            m,
            rate: d as f64 / total,
        })
        .collect();
    let upper_deviation = per_model_rates.iter().map(|r| r.rate).fold(0.0, f64::max);
    let lower_sandwich = deviating
        .iter()
        .map(|&d| (paths - d) as f64 / total)
        .fold(1.0, f64::min);

    let checkpoint_rows = checkpoints
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let per_model: Vec<ModelRate> = means
                .iter()
                .zip(&outside)
                .map(|(&m, counts)| ModelRate {
                    m,
                    rate: counts[k] as f64 / total,
                })
                .collect();
            let max_frequency = per_model.iter().map(|r| r.rate).fold(0.0, f64::max);
            CheckpointFrequency {
                n,
                per_model,
                max_frequency,
                std_error: (max_frequency * (1.0 - max_frequency) / total).sqrt(),
            }
        })
        .collect();

    Ok(CapacityEstimate {
        upper_deviation,
        lower_sandwich,
        per_model_rates,
        checkpoints: checkpoint_rows,
    })
}

/// Running means `S_n / n`, `n = 1..=n_steps`, of one path under model
/// `model`. Uses the same stream as [`simulate_running_means`].
pub fn running_mean_path(
    family: &GaussianMeanFamily,
    model: usize,
    master_seed: u64,
    path: u64,
    n_steps: u64,
) -> Result<Vec<f64>> {
    let Some(&m) = family.means().get(model) else {
        return Err(Error::domain(format!(
            "model {model} out of range for {} means",
            family.means().len()
        )));
    };
    let sigma = family.sigma();
    let mut rng = stream_rng(master_seed, model as u64, path);
    let mut sum = Neumaier::default();
    Ok((1..=n_steps)
        .map(|n| {
            let z: f64 = rng.sample(StandardNormal);
            sum.add(m + sigma * z);
            sum.value() / n as f64
        })
        .collect())
}

/// Rate assumption `tau_{phi_p}(Z_n) <= c n^{-alpha}` fed into the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremInputs {
    pub p: f64,
    pub alpha: f64,
    pub c: f64,
}

impl TheoremInputs {
    /// `p = 2`, `alpha = 1/2`, `c = sigma`: the i.i.d. Gaussian rate.
    pub fn gaussian(family: &GaussianMeanFamily) -> Self {
        Self {
            p: 2.0,
            alpha: 0.5,
            c: family.sigma(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SllnConfigEcho {
    pub family: FamilySpec,
    pub n_steps: u64,
    pub n_paths: u64,
    pub epsilon: f64,
    pub n_min: u64,
    pub master_seed: u64,
    pub max_draws: u64,
}

impl From<&SllnConfig> for SllnConfigEcho {
    fn from(c: &SllnConfig) -> Self {
        Self {
            family: FamilySpec::from(&c.family),
            n_steps: c.n_steps,
            n_paths: c.n_paths,
            epsilon: c.epsilon,
            n_min: c.n_min,
            master_seed: c.master_seed,
            max_draws: c.max_draws,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

/// One row of the per-checkpoint table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckpointRow {
    pub m: f64,
    pub n: u64,
    pub deviation_frequency: f64,
    pub lemma_bound: f64,
    pub theorem_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub n: u64,
    pub partial_sum: f64,
    pub integral_bound: f64,
}

/// `log E^ e^{lambda (Z_n - m_bar)}` computed from the law of `Z_n` and from
/// the product of the coordinate moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBoundCheck {
    pub n: u64,
    pub lambda: f64,
    pub direct: f64,
    pub product: f64,
    /// `lambda^2 sigma^2 / (2n)`.
    pub closed_form: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningMeanTau {
    pub n: u64,
    pub tau: f64,
    /// `sigma / sqrt(n)`.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SllnReport {
    pub sampler_version: String,
    pub horizon_note: String,
    pub config: SllnConfigEcho,
    pub inputs: TheoremInputs,
    pub constants: TheoremConstants,
    pub first_majorized_n: u64,
    pub certificate_band: Band,
    pub expectation_band: Band,
    pub bands_coincide: bool,
    pub estimate: CapacityEstimate,
    pub checkpoint_rows: Vec<CheckpointRow>,
    pub series: Vec<SeriesRow>,
    pub integral_bound: f64,
    pub product_bound: Vec<ProductBoundCheck>,
    pub running_mean_tau: Vec<RunningMeanTau>,
    /// Checkpoint frequencies beyond `n = 100` do not increase by more than
    /// two binomial standard errors.
    pub convergence_trend_holds: bool,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
}

impl SllnReport {
    pub fn invariants_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

const PRODUCT_BOUND_NS: [u64; 3] = [1, 10, 100];
const PRODUCT_BOUND_LAMBDAS: [f64; 5] = [0.01, 0.1, 1.0, 3.0, 10.0];

/// Checkpoint frequencies beyond `n = 100` never rise by more than two
/// binomial standard errors of the difference.
pub fn convergence_trend_holds(checkpoints: &[CheckpointFrequency]) -> bool {
    let tail: Vec<&CheckpointFrequency> = checkpoints.iter().filter(|c| c.n >= 100).collect();
    tail.windows(2).all(|w| {
        let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        w[1].max_frequency <= w[0].max_frequency + 2.0 * se
    })
}

/// Runs the simulation and assembles bounds, series and invariant checks.
pub fn slln_report(cfg: &SllnConfig, inputs: TheoremInputs) -> Result<SllnReport> {
    let constants = theorem_constants(inputs.p, inputs.alpha, inputs.c, cfg.epsilon)?;
    let phi = constants.phi();
    let estimate = simulate_running_means(cfg)?;
    let n0 = constants.first_majorized_n();
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let sum = estimate.lower_sandwich + estimate.upper_deviation;
    if (sum - 1.0).abs() > 1e-12 {
        violations.push(format!(
            "lower_sandwich + upper_deviation = {sum}, expected 1"
        ));
    }

    let horizon = cfg.n_steps.max(10_000);
    for n in n0..=horizon {
        let lemma = lemma_bound_at_n(&phi, constants.tau_at(n), cfg.epsilon)?;
        let theorem = constants.theorem_bound(n);
        if lemma > theorem * (1.0 + 1e-12) + SUBNORMAL_FLOOR {
            violations.push(format!(
                "lemma bound {lemma} exceeds C0 exp(-K n^beta) = {theorem} at n = {n}"
            ));
            break;
        }
    }

    let mut checkpoint_rows = Vec::new();
    for cp in &estimate.checkpoints {
        let lemma = lemma_bound_at_n(&phi, constants.tau_at(cp.n), cfg.epsilon)?;
        let theorem = constants.theorem_bound(cp.n);
        if cp.max_frequency > lemma + 3.0 * cp.std_error {
            violations.push(format!(
                "empirical capacity {} exceeds lemma bound {lemma} at n = {}",
                cp.max_frequency, cp.n
            ));
        }
        for r in &cp.per_model {
            checkpoint_rows.push(CheckpointRow {
                m: r.m,
                n: cp.n,
                deviation_frequency: r.rate,
                lemma_bound: lemma,
                theorem_bound: theorem,
            });
        }
    }

    let integral = integral_bound(constants.k, constants.beta)?;
    let series_ns = cfg.checkpoints();
    let mut series_points = vec![1u64];
    series_points.extend(series_ns.iter().copied().filter(|&n| n > 1));
    let sums = partial_sums(&constants, &series_points);
    let series: Vec<SeriesRow> = series_points
        .iter()
        .zip(&sums)
        .map(|(&n, &s)| SeriesRow {
            n,
            partial_sum: s,
            integral_bound: integral,
        })
        .collect();
    if let Some(row) = series.iter().find(|r| r.partial_sum > r.integral_bound) {
        violations.push(format!(
            "partial sum {} exceeds integral bound {} at N = {}",
            row.partial_sum, row.integral_bound, row.n
        ));
    }

    let fam = &cfg.family;
    let sigma = fam.sigma();
    let m_bar = fam.m_bar();
    let mut product_bound = Vec::new();
    for &n in &PRODUCT_BOUND_NS {
        let zn = fam.running_mean_family(n)?;
        for &lambda in &PRODUCT_BOUND_LAMBDAS {
            let direct = gaussian_family_log_upper_exp_moment(&zn, lambda, m_bar);
            let product =
                n as f64 * gaussian_family_log_upper_exp_moment(fam, lambda / n as f64, m_bar);
            let closed_form = lambda * lambda * sigma * sigma / (2.0 * n as f64);
            if direct > product + 1e-12 || (direct - closed_form).abs() > 1e-12 {
                violations.push(format!(
                    "product bound fails at n = {n}, lambda = {lambda}: direct {direct}, product {product}, closed form {closed_form}"
                ));
            }
            product_bound.push(ProductBoundCheck {
                n,
                lambda,
                direct,
                product,
                closed_form,
            });
        }
    }

    let grid = default_lambda_grid();
    let mut running_mean_tau = Vec::new();
    for &n in &PRODUCT_BOUND_NS {
        let oracle = GaussianOracle::running_mean(fam, n)?;
        let expected = sigma / (n as f64).sqrt();
        let r = tau_phi(
            &oracle,
            &NFunction::phi_2(),
            m_bar,
            fam.m_under(),
            &grid,
            4.0 * sigma,
            TAU_TOL,
        )?;
        if (r.tau - expected).abs() > 1e-4 {
            violations.push(format!(
                "tau(Z_{n}) = {} but sigma/sqrt(n) = {expected}",
                r.tau
            ));
        }
        if r.tau > constants.tau_at(n) * (1.0 + 1e-6) {
            warnings.push(format!(
                "tau(Z_{n}) = {} exceeds the assumed rate c n^-alpha = {}",
                r.tau,
                constants.tau_at(n)
            ));
        }
        running_mean_tau.push(RunningMeanTau {
            n,
            tau: r.tau,
            expected,
        });
    }

    let certificate_band = Band {
        lower: fam.m_under(),
        upper: fam.m_bar(),
    };
    let expectation_band = Band {
        lower: fam.lower_mean(),
        upper: fam.upper_mean(),
    };
    let bands_coincide = certificate_band == expectation_band;
    if !bands_coincide {
        violations.push("certificate band differs from the expectation band".into());
    }

    let trend = convergence_trend_holds(&estimate.checkpoints);
    if !trend {
        warnings.push(
            "checkpoint deviation frequency rose by more than 2 standard errors beyond n = 100"
                .into(),
        );
    }

    Ok(SllnReport {
        sampler_version: SAMPLER_VERSION.to_string(),
        horizon_note: format!(
            "finite-horizon approximation: deviation counted for n in [{}, {}]",
            cfg.n_min, cfg.n_steps
        ),
        config: SllnConfigEcho::from(cfg),
        inputs,
        constants,
        first_majorized_n: n0,
        certificate_band,
        expectation_band,
        bands_coincide,
        estimate,
        checkpoint_rows,
        series,
        integral_bound: integral,
        product_bound,
        running_mean_tau,
        convergence_trend_holds: trend,
        warnings,
        violations,
    })
}
