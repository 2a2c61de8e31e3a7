//! Two-sided phi-sub-Gaussian certificates, the optimal parameter `tau_phi`
//! and conjugate tail bounds.
//!
//! A variable is certified when
//! `log E^ e^{lambda (xi - m_bar)} <= phi(a lambda)` for `lambda > 0` and
//! `log E^ e^{lambda (xi - m_under)} <= phi(a lambda)` for `lambda < 0`.
//! Every comparison runs in the log domain. The universally quantified
//! conditions are checked on a finite lambda grid.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::{
    gaussian_family_log_upper_exp_moment, mc_upper_expectation, DiscreteModelFamily,
    DiscreteRandomVariable, GaussianMeanFamily, McEstimate, McFamily,
};
use crate::nfunc::{NFunction, NFunctionDescriptor};
use crate::rng::stream_rng;

/// Standard errors allowed below zero when the oracle is sampled.
pub const MC_SLACK_STD_ERRORS: f64 = 3.0;
/// Relative rounding allowance for exact oracles.
const EXACT_ROUNDING: f64 = 1e-12;
const MIN_TAIL_SAMPLES: usize = 1000;

/// Parameters `(a, m_bar, m_under)` of a two-sided certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubGaussianParams {
    pub a: f64,
    pub m_bar: f64,
    pub m_under: f64,
}

impl SubGaussianParams {
    pub fn new(a: f64, m_bar: f64, m_under: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!(
                "parameter a must be finite and > 0, got {a}"
            )));
        }
        if !m_bar.is_finite() || !m_under.is_finite() {
            return Err(Error::domain("centering constants must be finite"));
        }
        Ok(Self { a, m_bar, m_under })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactGaussian,
    McEstimated,
    DiscreteExact,
}

impl Provenance {
    pub fn is_statistical(self) -> bool {
        matches!(self, Provenance::McEstimated)
    }
}

/// `(lambda, shift) -> log E^ e^{lambda (xi - shift)}`.
pub trait LogMgfOracle: Sync {
    fn log_mgf(&self, lambda: f64, shift: f64) -> f64;
    fn provenance(&self) -> Provenance;
    /// Amount by which a margin may fall below zero and still count as held.
    fn slack(&self, lambda: f64, shift: f64) -> f64;
}

/// Closed-form oracle of the coordinate variable under a Gaussian mean family.
#[derive(Debug, Clone)]
pub struct GaussianOracle {
    family: GaussianMeanFamily,
}

impl GaussianOracle {
    pub fn new(family: GaussianMeanFamily) -> Self {
        Self { family }
    }

    /// Oracle of `Z_n = S_n / n` under the product family.
    pub fn running_mean(family: &GaussianMeanFamily, n: u64) -> Result<Self> {
        Ok(Self::new(family.running_mean_family(n)?))
    }

    pub fn family(&self) -> &GaussianMeanFamily {
        &self.family
    }
}

impl LogMgfOracle for GaussianOracle {
    fn log_mgf(&self, lambda: f64, shift: f64) -> f64 {
        gaussian_family_log_upper_exp_moment(&self.family, lambda, shift)
    }

    fn provenance(&self) -> Provenance {
        Provenance::ExactGaussian
    }

    fn slack(&self, lambda: f64, shift: f64) -> f64 {
        EXACT_ROUNDING * (1.0 + self.log_mgf(lambda, shift).abs())
    }
}

/// Exact oracle of a discrete variable under a discrete family.
#[derive(Debug, Clone)]
pub struct DiscreteOracle {
    family: DiscreteModelFamily,
    variable: DiscreteRandomVariable,
}

impl DiscreteOracle {
    pub fn new(family: DiscreteModelFamily, variable: DiscreteRandomVariable) -> Result<Self> {
        family.model_expectations(&variable)?;
        Ok(Self { family, variable })
    }

    /// A variable identically equal to `c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(
            DiscreteModelFamily::new(1, vec![vec![1.0]])?,
            DiscreteRandomVariable::new(vec![c])?,
        )
    }
}

fn log_sum_exp_weighted(weights: &[f64], exponents: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<(f64, f64)> = weights
        .iter()
        .copied()
        .zip(exponents)
        .filter(|(w, _)| *w > 0.0)
        .collect();
    let peak = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return peak;
    }
    let sum: f64 = terms.iter().map(|(w, t)| w * (t - peak).exp()).sum();
    peak + sum.ln()
}

impl LogMgfOracle for DiscreteOracle {
    fn log_mgf(&self, lambda: f64, shift: f64) -> f64 {
        self.family
            .measures()
            .iter()
            .map(|q| {
                log_sum_exp_weighted(
                    q,
                    self.variable.values().iter().map(|x| lambda * (x - shift)),
                )
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn provenance(&self) -> Provenance {
        Provenance::DiscreteExact
    }

    fn slack(&self, lambda: f64, shift: f64) -> f64 {
        EXACT_ROUNDING * (1.0 + self.log_mgf(lambda, shift).abs())
    }
}

/// Sampled oracle: a fixed set of draws per model, reused for every lambda.
#[derive(Debug, Clone)]
pub struct McOracle {
    samples: Vec<Vec<f64>>,
}

impl McOracle {
    pub fn from_family<F: McFamily>(family: &F, n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples < 2 {
            return Err(Error::domain(format!(
                "n_samples must be >= 2, got {n_samples}"
            )));
        }
        let samples = (0..family.model_count())
            .map(|m| {
                let mut rng = stream_rng(seed, m as u64, 0);
                (0..n_samples).map(|_| family.draw(m, &mut rng)).collect()
            })
            .collect();
        Ok(Self { samples })
    }

    /// Per model: `(log mean e^{t}, relative standard error of the mean)`.
    fn model_log_means(&self, lambda: f64, shift: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(move |xs| {
            let exps: Vec<f64> = xs.iter().map(|x| lambda * (x - shift)).collect();
            let peak = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let n = exps.len() as f64;
            let scaled: Vec<f64> = exps.iter().map(|t| (t - peak).exp()).collect();
            let mean = scaled.iter().sum::<f64>() / n;
            let var = scaled.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (peak + mean.ln(), (var / n).sqrt() / mean)
        })
    }

    fn best(&self, lambda: f64, shift: f64) -> (f64, f64) {
        self.model_log_means(lambda, shift)
            .fold(
                (f64::NEG_INFINITY, 0.0),
                |b, c| if c.0 > b.0 { c } else { b },
            )
    }
}

impl LogMgfOracle for McOracle {
    fn log_mgf(&self, lambda: f64, shift: f64) -> f64 {
        self.best(lambda, shift).0
    }

    fn provenance(&self) -> Provenance {
        Provenance::McEstimated
    }

    fn slack(&self, lambda: f64, shift: f64) -> f64 {
        let (_, rel_se) = self.best(lambda, shift);
        (1.0 + MC_SLACK_STD_ERRORS * rel_se).ln()
    }
}

/// 61 log-spaced magnitudes in `[1e-3, 1e2]`, negative then positive.
pub fn default_lambda_grid() -> Vec<f64> {
    log_lambda_grid(1e-3, 1e2, 61)
}

pub fn log_lambda_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let mags: Vec<f64> = (0..count)
        .map(|k| {
            if count == 1 {
                lo
            } else {
                10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)
            }
        })
        .collect();
    mags.iter()
        .rev()
        .map(|m| -m)
        .chain(mags.iter().copied())
        .collect()
}

/// Result of checking a certificate on a lambda grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubGaussianCertificate {
    pub phi: NFunctionDescriptor,
    pub a: f64,
    pub m_bar: f64,
    pub m_under: f64,
    pub grid: Vec<f64>,
    pub holds: bool,
    pub worst_margin: f64,
    pub worst_lambda: f64,
    pub provenance: Provenance,
    /// The verdict carries sampling error.
    pub statistical: bool,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.contains(&0.0) {
        return Err(Error::domain("lambda grid must not contain 0"));
    }
    if let Some(l) = grid.iter().find(|l| !l.is_finite()) {
        return Err(Error::domain(format!(
            "lambda grid value {l} is not finite"
        )));
    }
    if !grid.iter().any(|&l| l > 0.0) || !grid.iter().any(|&l| l < 0.0) {
        return Err(Error::domain(
            "lambda grid needs both positive and negative values",
        ));
    }
    Ok(())
}

fn certificate_margins<O: LogMgfOracle + ?Sized>(
    oracle: &O,
    phi: &NFunction,
    params: &SubGaussianParams,
    grid: &[f64],
) -> (bool, f64, f64) {
    let mut holds = true;
    let mut worst = (f64::INFINITY, f64::NAN);
    for &lambda in grid {
        let shift = if lambda > 0.0 {
            params.m_bar
        } else {
            params.m_under
        };
        let margin = phi.eval(params.a * lambda) - oracle.log_mgf(lambda, shift);
        if !(margin >= -oracle.slack(lambda, shift)) {
            holds = false;
        }
        if margin < worst.0 || margin.is_nan() {
            worst = (margin, lambda);
        }
    }
    (holds, worst.0, worst.1)
}

/// Checks both one-sided exponential-moment conditions on `lambda_grid`.
pub fn check_phi_subgaussian<O: LogMgfOracle + ?Sized>(
    oracle: &O,
    phi: &NFunction,
    params: &SubGaussianParams,
    lambda_grid: &[f64],
) -> Result<SubGaussianCertificate> {
    validate_grid(lambda_grid)?;
    let (holds, worst_margin, worst_lambda) = certificate_margins(oracle, phi, params, lambda_grid);
    let provenance = oracle.provenance();
    Ok(SubGaussianCertificate {
        phi: phi.descriptor(),
        a: params.a,
        m_bar: params.m_bar,
        m_under: params.m_under,
        grid: lambda_grid.to_vec(),
        holds,
        worst_margin,
        worst_lambda,
        provenance,
        statistical: provenance.is_statistical(),
    })
}

/// Outcome of the `tau_phi` bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauResult {
    pub tau: f64,
    /// The condition already holds at the bisection floor `tol`; the
    /// infimum is (numerically) zero.
    pub degenerate: bool,
    pub bisection_steps: usize,
    pub certificate: SubGaussianCertificate,
}

/// `inf { a : both conditions hold on lambda_grid }`, by bisection on
/// `[tol, a_hi]`. The returned value always satisfies the conditions.
#[allow(clippy::too_many_arguments)]
pub fn tau_phi<O: LogMgfOracle + ?Sized>(
    oracle: &O,
    phi: &NFunction,
    m_bar: f64,
    m_under: f64,
    lambda_grid: &[f64],
    a_hi: f64,
    tol: f64,
) -> Result<TauResult> {
    validate_grid(lambda_grid)?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::domain(format!(
            "tol must be finite and > 0, got {tol}"
        )));
    }
    if !(a_hi > tol) || !a_hi.is_finite() {
        return Err(Error::domain(format!(
            "a_hi must be finite and > tol, got {a_hi}"
        )));
    }
    let holds = |a: f64| -> Result<bool> {
        let params = SubGaussianParams::new(a, m_bar, m_under)?;
        Ok(certificate_margins(oracle, phi, &params, lambda_grid).0)
    };
    if !holds(a_hi)? {
        return Err(Error::Bracket(format!(
            "a_hi too small: condition fails at a = {a_hi}"
        )));
    }
    let (tau, degenerate, steps) = if holds(tol)? {
        (tol, true, 0)
    } else {
        let (mut lo, mut hi) = (tol, a_hi);
        let mut steps = 0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if holds(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
        }
        (hi, false, steps)
    };
    let certificate = check_phi_subgaussian(
        oracle,
        phi,
        &SubGaussianParams::new(tau, m_bar, m_under)?,
        lambda_grid,
    )?;
    Ok(TauResult {
        tau,
        degenerate,
        bisection_steps: steps,
        certificate,
    })
}

/// Closed form of `tau_{phi_2}` on a lambda grid for a Gaussian mean family.
///
/// With `phi_2(a lambda) = a^2 lambda^2 / 2` the condition at `lambda` reads
/// `a^2 >= sigma^2 + 2 (m_ext - shift) / lambda`, where `m_ext` is the
/// largest mean for `lambda > 0` and the smallest for `lambda < 0`.
pub fn gaussian_phi2_tau_on_grid(
    family: &GaussianMeanFamily,
    m_bar: f64,
    m_under: f64,
    lambda_grid: &[f64],
) -> Result<f64> {
    validate_grid(lambda_grid)?;
    let s2 = family.sigma().powi(2);
    let need = lambda_grid
        .iter()
        .map(|&l| {
            let gap = if l > 0.0 {
                family.m_bar() - m_bar
            } else {
                family.m_under() - m_under
            };
            s2 + 2.0 * gap / l
        })
        .fold(0.0, f64::max);
    Ok(need.sqrt())
}

/// Unoptimized Chernoff exponent `lambda eps - phi(a lambda)`.
pub fn chernoff_exponent(phi: &NFunction, a: f64, epsilon: f64, lambda: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "parameter a must be finite and > 0, got {a}"
        )));
    }
    Ok(lambda * epsilon - phi.eval(a * lambda))
}

/// Capacity tail bound `2 exp(-phi^*(eps / a))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundResult {
    pub epsilon: f64,
    pub a: f64,
    /// `phi^*(eps / a)`.
    pub exponent: f64,
    /// Two-sided bound `2 exp(-exponent)`.
    pub bound: f64,
    /// Bound on `V^(xi - m_bar > eps)`.
    pub upper_tail: f64,
    /// Bound on `V^(xi - m_under < -eps)`.
    pub lower_tail: f64,
    /// Optimizing `lambda > 0` of the upper-tail Chernoff exponent.
    pub lambda_star: f64,
}

pub fn tail_bound(phi: &NFunction, a: f64, epsilon: f64) -> Result<TailBoundResult> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "parameter a must be finite and > 0, got {a}"
        )));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::domain(format!(
            "epsilon must be finite and > 0, got {epsilon}"
        )));
    }
    let upper = phi.conjugate_with_argmax(epsilon / a)?;
    let lower = phi.conjugate(-epsilon / a)?;
    Ok(TailBoundResult {
        epsilon,
        a,
        exponent: upper.value,
        bound: 2.0 * (-upper.value).exp(),
        upper_tail: (-upper.value).exp(),
        lower_tail: (-lower).exp(),
        lambda_star: upper.argmax / a,
    })
}

/// Monte Carlo estimate of `max_m P_m({xi - m_bar > eps} U {xi - m_under < -eps})`.
pub fn empirical_tail_capacity(
    family: &GaussianMeanFamily,
    m_bar: f64,
    m_under: f64,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon must be > 0, got {epsilon}")));
    }
    if n_samples < MIN_TAIL_SAMPLES {
        return Err(Error::domain(format!(
            "n_samples must be >= {MIN_TAIL_SAMPLES}, got {n_samples}"
        )));
    }
    mc_upper_expectation(
        family,
        |x| {
            if x - m_bar > epsilon || x - m_under < -epsilon {
                1.0
            } else {
                0.0
            }
        },
        n_samples,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn three_means(sigma: f64) -> GaussianMeanFamily {
        GaussianMeanFamily::new(vec![-0.3, 0.0, 0.3], sigma).unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 122);
        assert_abs_diff_eq!(g[0], -100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g[61], 1e-3, epsilon = 1e-15);
        assert!(g.iter().all(|&l| l != 0.0));
    }

    #[test]
    fn gaussian_certificate_at_sigma_is_tight() {
        let oracle = GaussianOracle::new(three_means(1.0));
        let phi = NFunction::phi_2();
        let grid = default_lambda_grid();
        let cert = check_phi_subgaussian(
            &oracle,
            &phi,
            &SubGaussianParams::new(1.0, 0.3, -0.3).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(cert.holds);
        assert_abs_diff_eq!(cert.worst_margin, 0.0, epsilon = 1e-12);
        assert_eq!(cert.provenance, Provenance::ExactGaussian);
    }

    #[test]
    fn gaussian_certificate_below_and_above_sigma() {
        let oracle = GaussianOracle::new(three_means(1.0));
        let phi = NFunction::phi_2();
        let grid = default_lambda_grid();
        // margin (a^2 - sigma^2) lambda^2 / 2
        let fails = check_phi_subgaussian(
            &oracle,
            &phi,
            &SubGaussianParams::new(0.9, 0.3, -0.3).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(!fails.holds);
        assert_abs_diff_eq!(fails.worst_margin, (0.81 - 1.0) * 1e4 / 2.0, epsilon = 1e-8);
        for &lambda in &grid {
            let single = check_phi_subgaussian(
                &oracle,
                &phi,
                &SubGaussianParams::new(0.9, 0.3, -0.3).unwrap(),
                &[lambda, -lambda],
            )
            .unwrap();
            assert!(!single.holds);
        }
        let loose = check_phi_subgaussian(
            &oracle,
            &phi,
            &SubGaussianParams::new(2.0, 0.3, -0.3).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(loose.holds);
        assert_abs_diff_eq!(loose.worst_margin, 1.5 * 1e-6, epsilon = 1e-12);
    }

    #[test]
    fn grid_validation() {
        let oracle = GaussianOracle::new(three_means(1.0));
        let p = SubGaussianParams::new(1.0, 0.3, -0.3).unwrap();
        let phi = NFunction::phi_2();
        assert!(check_phi_subgaussian(&oracle, &phi, &p, &[0.0, 1.0, -1.0]).is_err());
        assert!(check_phi_subgaussian(&oracle, &phi, &p, &[1.0, 2.0]).is_err());
        assert!(SubGaussianParams::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tau_recovers_sigma() {
        let phi = NFunction::phi_2();
        let grid = default_lambda_grid();
        for sigma in [0.5, 1.0] {
            let fam = three_means(sigma);
            let oracle = GaussianOracle::new(fam.clone());
            let r = tau_phi(&oracle, &phi, fam.m_bar(), fam.m_under(), &grid, 4.0, 1e-7).unwrap();
            assert!((r.tau - sigma).abs() <= 1e-6, "{} vs {sigma}", r.tau);
            assert!(!r.degenerate);
            assert!(r.certificate.holds);
            let closed =
                gaussian_phi2_tau_on_grid(&fam, fam.m_bar(), fam.m_under(), &grid).unwrap();
            assert_abs_diff_eq!(closed, sigma, epsilon = 1e-15);
        }
    }

    #[test]
    fn tau_matches_closed_form_for_loose_centering() {
        let fam = three_means(1.0);
        let oracle = GaussianOracle::new(fam.clone());
        let grid = default_lambda_grid();
        let (m_bar, m_under) = (0.5, -0.4);
        let closed = gaussian_phi2_tau_on_grid(&fam, m_bar, m_under, &grid).unwrap();
        let r = tau_phi(
            &oracle,
            &NFunction::phi_2(),
            m_bar,
            m_under,
            &grid,
            4.0,
            1e-9,
        )
        .unwrap();
        assert!(closed < 1.0);
        assert!((r.tau - closed).abs() <= 2e-9, "{} vs {closed}", r.tau);
    }

    #[test]
    fn tau_errors_and_degenerate_case() {
        let fam = three_means(2.0);
        let oracle = GaussianOracle::new(fam.clone());
        let grid = default_lambda_grid();
        let err = tau_phi(&oracle, &NFunction::phi_2(), 0.3, -0.3, &grid, 1.5, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Bracket(_)));

        let constant = DiscreteOracle::constant(0.7).unwrap();
        let r = tau_phi(&constant, &NFunction::phi_2(), 0.7, 0.7, &grid, 4.0, 1e-6).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.tau, 1e-6);
        assert_eq!(r.certificate.provenance, Provenance::DiscreteExact);
    }

    #[test]
    fn discrete_oracle_matches_direct_sum() {
        let fam = DiscreteModelFamily::new(2, vec![vec![0.5, 0.5], vec![0.8, 0.2]]).unwrap();
        let x = DiscreteRandomVariable::new(vec![1.0, -1.0]).unwrap();
        let oracle = DiscreteOracle::new(fam, x).unwrap();
        let direct = |lambda: f64, s: f64| {
            let a: f64 = 0.5 * (lambda * (1.0 - s)).exp() + 0.5 * (lambda * (-1.0 - s)).exp();
            let b: f64 = 0.8 * (lambda * (1.0 - s)).exp() + 0.2 * (lambda * (-1.0 - s)).exp();
            a.max(b).ln()
        };
        for lambda in [-3.0, -0.5, 0.2, 1.0, 4.0] {
            assert_abs_diff_eq!(
                oracle.log_mgf(lambda, 0.1),
                direct(lambda, 0.1),
                epsilon = 1e-13
            );
        }
        assert_eq!(oracle.log_mgf(0.0, 5.0), 0.0);
        // large lambda stays finite in the log domain
        assert!(oracle.log_mgf(2000.0, 0.0).is_finite());
    }

    #[test]
    fn mc_oracle_tracks_exact_oracle() {
        let fam = three_means(1.0);
        let exact = GaussianOracle::new(fam.clone());
        let mc = McOracle::from_family(&fam, 200_000, 9).unwrap();
        for lambda in [-1.0, -0.3, 0.3, 1.0] {
            let shift = if lambda > 0.0 { 0.3 } else { -0.3 };
            let diff = (mc.log_mgf(lambda, shift) - exact.log_mgf(lambda, shift)).abs();
            assert!(
                diff <= 2.0 * mc.slack(lambda, shift) + 1e-3,
                "lambda {lambda}: {diff}"
            );
        }
        assert_eq!(mc.provenance(), Provenance::McEstimated);
        let grid = log_lambda_grid(0.05, 1.5, 9);
        let cert = check_phi_subgaussian(
            &mc,
            &NFunction::phi_2(),
            &SubGaussianParams::new(1.1, 0.3, -0.3).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(cert.holds && cert.statistical);
    }

    #[test]
    fn chernoff_examples() {
        let phi = NFunction::phi_2();
        assert_abs_diff_eq!(chernoff_exponent(&phi, 1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(chernoff_exponent(&phi, 1.0, 1.0, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            chernoff_exponent(&phi, 1.0, 1.0, 1e-12).unwrap(),
            0.0,
            epsilon = 1e-11
        );
        assert!(chernoff_exponent(&phi, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        let r = tail_bound(&NFunction::phi_2(), 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(r.exponent, 4.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.bound, 2.0 * (-4.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.bound, 0.022218, epsilon = 1e-6);
        assert_abs_diff_eq!(r.lambda_star, 3.0, epsilon = 1e-15);

        let r = tail_bound(&NFunction::phi_p(3.0).unwrap(), 1.0, 2.0).unwrap();
        let exponent = (2.0 / 3.0) * 2f64.powf(1.5) - 2.0 / 3.0 + 0.5;
        assert_abs_diff_eq!(r.exponent, exponent, epsilon = 1e-14);
        assert_abs_diff_eq!(r.bound, 0.3585, epsilon = 1e-4);

        let r = tail_bound(&NFunction::phi_2(), 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.bound, 2.0, epsilon = 1e-12);
        assert_eq!(r.upper_tail, r.lower_tail);
        assert!(tail_bound(&NFunction::phi_2(), 0.0, 1.0).is_err());
        assert!(tail_bound(&NFunction::phi_2(), 1.0, 0.0).is_err());
    }

    #[test]
    fn tail_bound_custom_function_numeric_path() {
        let psi = NFunction::custom("x^2/2", |x| 0.5 * x * x);
        let numeric = tail_bound(&psi, 1.0, 3.0).unwrap();
        let analytic = tail_bound(&NFunction::phi_2(), 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(numeric.exponent, analytic.exponent, epsilon = 1e-9);
        assert_abs_diff_eq!(numeric.lambda_star, analytic.lambda_star, epsilon = 1e-6);
    }

    #[test]
    fn empirical_tail_examples() {
        let single = GaussianMeanFamily::new(vec![0.0], 1.0).unwrap();
        let est = empirical_tail_capacity(&single, 0.0, 0.0, 2.0, 200_000, 1).unwrap();
        assert!((est.estimate - 0.0455).abs() < 5.0 * est.std_error + 1e-4);
        assert!(est.estimate <= tail_bound(&NFunction::phi_2(), 1.0, 2.0).unwrap().bound);
        let fam = three_means(1.0);
        let est = empirical_tail_capacity(&fam, 0.3, -0.3, 1.0, 10_000, 1).unwrap();
        // extreme means: P(Z > 1) + P(Z < -1.6)
        let exact = 0.5 * libm::erfc(1.0 / 2f64.sqrt()) + 0.5 * libm::erfc(1.6 / 2f64.sqrt());
        assert!((est.estimate - exact).abs() < 5.0 * est.std_error);
        assert!(est.estimate < 2.0 * (-0.5f64).exp());
        assert!(empirical_tail_capacity(&single, 0.0, 0.0, 2.0, 999, 1).is_err());
        assert!(empirical_tail_capacity(&single, 0.0, 0.0, 0.0, 5000, 1).is_err());
    }
}
