//! Upper and lower expectations generated by finite families of models.
//!
//! `E^[X] = max_Q E_Q[X]`, `E_[X] = -E^[-X]`, `V^(A) = E^[1_A]` and
//! `v(A) = 1 - V^(A^c)`. Discrete families are evaluated exactly, Gaussian
//! mean families in closed form, and both can be sampled.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::report::PropertyReport;
use crate::rng::stream_rng;

/// Tolerance on the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-12;
/// Largest outcome count for which event pairs are enumerated exhaustively.
pub const EXHAUSTIVE_OUTCOME_LIMIT: usize = 12;
const AXIOM_TOL: f64 = 1e-10;
const SAMPLED_EVENT_PAIRS: usize = 4096;
const MC_BLOCK: usize = 8192;

/// A finite sample space together with a finite set of probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModelFamily {
    outcome_count: usize,
    measures: Vec<Vec<f64>>,
}

impl DiscreteModelFamily {
    pub fn new(outcome_count: usize, measures: Vec<Vec<f64>>) -> Result<Self> {
        if outcome_count == 0 {
            return Err(Error::domain("a family needs at least one outcome"));
        }
        if measures.is_empty() {
            return Err(Error::domain("a family needs at least one measure"));
        }
        for (i, q) in measures.iter().enumerate() {
            if q.len() != outcome_count {
                return Err(Error::domain(format!(
                    "measure {i} has {} entries, expected {outcome_count}",
                    q.len()
                )));
            }
            if let Some(w) = q.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
                return Err(Error::domain(format!("measure {i} has invalid weight {w}")));
            }
            let mass: f64 = q.iter().sum();
            if (mass - 1.0).abs() > MASS_TOL {
                return Err(Error::domain(format!("measure {i} sums to {mass}, not 1")));
            }
        }
        Ok(Self {
            outcome_count,
            measures,
        })
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn measures(&self) -> &[Vec<f64>] {
        &self.measures
    }

    pub fn model_count(&self) -> usize {
        self.measures.len()
    }

    fn check_variable(&self, x: &DiscreteRandomVariable) -> Result<()> {
        if x.len() != self.outcome_count {
            return Err(Error::domain(format!(
                "variable has {} values but the family has {} outcomes",
                x.len(),
                self.outcome_count
            )));
        }
        Ok(())
    }

    /// `E_Q[X]` for every model `Q`, in family order.
    pub fn model_expectations(&self, x: &DiscreteRandomVariable) -> Result<Vec<f64>> {
        self.check_variable(x)?;
        Ok(self
            .measures
            .iter()
            .map(|q| q.iter().zip(x.values()).map(|(w, v)| w * v).sum())
            .collect())
    }
}

/// A finite-valued random variable on a discrete sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteRandomVariable(Vec<f64>);

impl DiscreteRandomVariable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "random variable value {v} is not finite"
            )));
        }
        Ok(Self(values))
    }

    pub fn constant(outcome_count: usize, c: f64) -> Self {
        Self(vec![c; outcome_count])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// An event of a discrete sample space, stored as a sorted index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteEvent {
    outcome_count: usize,
    members: Vec<usize>,
}

impl DiscreteEvent {
    pub fn new(outcome_count: usize, mut members: Vec<usize>) -> Result<Self> {
        if let Some(i) = members.iter().find(|&&i| i >= outcome_count) {
            return Err(Error::domain(format!(
                "event index {i} out of range for {outcome_count} outcomes"
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self {
            outcome_count,
            members,
        })
    }

    pub fn empty(outcome_count: usize) -> Self {
        Self {
            outcome_count,
            members: Vec::new(),
        }
    }

    pub fn full(outcome_count: usize) -> Self {
        Self {
            outcome_count,
            members: (0..outcome_count).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self) -> Self {
        let members = (0..self.outcome_count)
            .filter(|i| self.members.binary_search(i).is_err())
            .collect();
        Self {
            outcome_count: self.outcome_count,
            members,
        }
    }

    pub fn indicator(&self) -> DiscreteRandomVariable {
        let mut v = vec![0.0; self.outcome_count];
        for &i in &self.members {
            v[i] = 1.0;
        }
        DiscreteRandomVariable(v)
    }
}

/// A finite union of disjoint intervals `(lo, hi]`, listed in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalEvent {
    intervals: Vec<(f64, f64)>,
}

impl IntervalEvent {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::domain(format!(
                    "interval ({lo}, {hi}] is not ordered"
                )));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::domain("intervals must be increasing and disjoint"));
        }
        Ok(Self { intervals })
    }

    /// `{x > hi} U {x <= lo}` for `lo < hi`.
    pub fn outside(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x > lo && x <= hi)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = f64::NEG_INFINITY;
        for &(lo, hi) in &self.intervals {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = hi;
        }
        if cursor < f64::INFINITY {
            out.push((cursor, f64::INFINITY));
        }
        Self { intervals: out }
    }
}

/// `E^[X] = max_Q E_Q[X]`.
pub fn upper_expectation_exact(
    fam: &DiscreteModelFamily,
    x: &DiscreteRandomVariable,
) -> Result<f64> {
    Ok(fam
        .model_expectations(x)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `E_[X] = -E^[-X] = min_Q E_Q[X]`.
pub fn lower_expectation_exact(
    fam: &DiscreteModelFamily,
    x: &DiscreteRandomVariable,
) -> Result<f64> {
    Ok(-upper_expectation_exact(fam, &x.map(|v| -v))?)
}

fn check_event(fam: &DiscreteModelFamily, a: &DiscreteEvent) -> Result<()> {
    if a.outcome_count != fam.outcome_count {
        return Err(Error::domain(format!(
            "event over {} outcomes used with a family of {}",
            a.outcome_count, fam.outcome_count
        )));
    }
    Ok(())
}

/// `V^(A) = max_Q Q(A)`.
pub fn upper_probability_exact(fam: &DiscreteModelFamily, a: &DiscreteEvent) -> Result<f64> {
    check_event(fam, a)?;
    upper_expectation_exact(fam, &a.indicator())
}

/// `v(A) = 1 - V^(A^c)`.
pub fn lower_capacity_exact(fam: &DiscreteModelFamily, a: &DiscreteEvent) -> Result<f64> {
    check_event(fam, a)?;
    Ok(1.0 - upper_probability_exact(fam, &a.complement())?)
}

/// Normal laws `N(m, sigma^2)` for `m` in a finite mean set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeanFamily {
    means: Vec<f64>,
    sigma: f64,
}

impl GaussianMeanFamily {
    pub fn new(means: Vec<f64>, sigma: f64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::domain("mean set must be nonempty"));
        }
        if let Some(m) = means.iter().find(|m| !m.is_finite()) {
            return Err(Error::domain(format!("mean {m} is not finite")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "sigma must be finite and > 0, got {sigma}"
            )));
        }
        Ok(Self { means, sigma })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn m_under(&self) -> f64 {
        self.means.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn m_bar(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `E^ xi` for the coordinate variable; equals `m_bar`.
    pub fn upper_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `E_ xi = -E^(-xi)`; equals `m_under`.
    pub fn lower_mean(&self) -> f64 {
        -self
            .means
            .iter()
            .map(|m| -m)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Family of the running mean `S_n / n` of `n` i.i.d. coordinates, which
    /// is `N(m, sigma^2 / n)` under each product model.
    pub fn running_mean_family(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("running mean needs n >= 1"));
        }
        Self::new(self.means.clone(), self.sigma / (n as f64).sqrt())
    }

    fn model_probability(&self, m: f64, a: &IntervalEvent) -> f64 {
        a.intervals
            .iter()
            .map(|&(lo, hi)| normal_cdf((hi - m) / self.sigma) - normal_cdf((lo - m) / self.sigma))
            .sum()
    }

    /// `V^(A) = max_m P_m(A)`.
    pub fn upper_probability(&self, a: &IntervalEvent) -> f64 {
        self.means
            .iter()
            .map(|&m| self.model_probability(m, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `v(A) = 1 - V^(A^c)`.
    pub fn lower_capacity(&self, a: &IntervalEvent) -> f64 {
        1.0 - self.upper_probability(&a.complement())
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        1.0
    } else if z == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
    }
}

/// `log E e^{lambda (X - shift)}` for `X ~ N(m, sigma^2)`.
pub fn gaussian_log_exp_moment(m: f64, sigma: f64, lambda: f64, shift: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
    }
    Ok(0.5 * lambda * lambda * sigma * sigma + lambda * (m - shift))
}

/// `log E^ e^{lambda (xi - shift)} = max_m log E_m e^{lambda (xi - shift)}`,
/// with the maximizing mean.
pub fn gaussian_family_log_upper_exp_moment_argmax(
    fam: &GaussianMeanFamily,
    lambda: f64,
    shift: f64,
) -> (f64, f64) {
    let var_term = 0.5 * lambda * lambda * fam.sigma * fam.sigma;
    fam.means
        .iter()
        .map(|&m| (var_term + lambda * (m - shift), m))
        .fold((f64::NEG_INFINITY, f64::NAN), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

pub fn gaussian_family_log_upper_exp_moment(
    fam: &GaussianMeanFamily,
    lambda: f64,
    shift: f64,
) -> f64 {
    gaussian_family_log_upper_exp_moment_argmax(fam, lambda, shift).0
}

/// A family that can be sampled model by model.
pub trait McFamily: Sync {
    fn model_count(&self) -> usize;
    fn draw<R: Rng + ?Sized>(&self, model: usize, rng: &mut R) -> f64;
}

impl McFamily for GaussianMeanFamily {
    fn model_count(&self) -> usize {
        self.means.len()
    }

    fn draw<R: Rng + ?Sized>(&self, model: usize, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.means[model] + self.sigma * z
    }
}

/// A discrete family paired with the variable whose values are sampled.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteSampler<'a> {
    family: &'a DiscreteModelFamily,
    variable: &'a DiscreteRandomVariable,
}

impl<'a> DiscreteSampler<'a> {
    pub fn new(
        family: &'a DiscreteModelFamily,
        variable: &'a DiscreteRandomVariable,
    ) -> Result<Self> {
        family.check_variable(variable)?;
        Ok(Self { family, variable })
    }
}

impl McFamily for DiscreteSampler<'_> {
    fn model_count(&self) -> usize {
        self.family.model_count()
    }

    fn draw<R: Rng + ?Sized>(&self, model: usize, rng: &mut R) -> f64 {
        let q = &self.family.measures[model];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, w) in q.iter().enumerate() {
            acc += w;
            if u < acc {
                return self.variable.values()[k];
            }
        }
        // mass rounding: fall back to the last outcome with positive weight
        let k = q.iter().rposition(|&w| w > 0.0).unwrap_or(q.len() - 1);
        self.variable.values()[k]
    }
}

/// Sample mean of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of an upper expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Standard error of the maximizing model's average.
    pub std_error: f64,
    pub argmax_model: usize,
    pub per_model: Vec<ModelEstimate>,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
    finite: bool,
}

impl Moments {
    const EMPTY: Moments = Moments {
        count: 0.0,
        mean: 0.0,
        m2: 0.0,
        finite: true,
    };

    fn push(&mut self, x: f64) {
        if !x.is_finite() {
            self.finite = false;
            return;
        }
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return Moments {
                finite: self.finite && other.finite,
                ..self
            };
        }
        if self.count == 0.0 {
            return Moments {
                finite: self.finite && other.finite,
                ..other
            };
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
            finite: self.finite && other.finite,
        }
    }
}

/// `max_Q` of per-model sample averages of `g`, each model drawing
/// `n_samples` values from its own seed streams.
pub fn mc_upper_expectation<F, G>(fam: &F, g: G, n_samples: usize, seed: u64) -> Result<McEstimate>
where
    F: McFamily,
    G: Fn(f64) -> f64 + Sync,
{
    if n_samples < 2 {
        return Err(Error::domain(format!(
            "n_samples must be >= 2, got {n_samples}"
        )));
    }
    let models = fam.model_count();
    let blocks = n_samples.div_ceil(MC_BLOCK);
    let partial = par::map_indexed(models * blocks, |job| {
        let (model, block) = (job / blocks, job % blocks);
        let mut rng = stream_rng(seed, model as u64, block as u64);
        let len = MC_BLOCK.min(n_samples - block * MC_BLOCK);
        let mut acc = Moments::EMPTY;
        for _ in 0..len {
            acc.push(g(fam.draw(model, &mut rng)));
        }
        acc
    });

    let mut per_model = Vec::with_capacity(models);
    for (model, chunk) in partial.chunks(blocks).enumerate() {
        let m = chunk.iter().fold(Moments::EMPTY, |a, &b| a.merge(b));
        if !m.finite {
            return Err(Error::Estimation(format!(
                "integrand produced non-finite values under model {model}"
            )));
        }
        let var = m.m2 / (m.count - 1.0);
        per_model.push(ModelEstimate {
            mean: m.mean,
            std_error: (var / m.count).sqrt(),
        });
    }
    let (argmax_model, best) =
        per_model
            .iter()
            .enumerate()
            .fold((0, per_model[0]), |acc, (i, e)| {
                if e.mean > acc.1.mean {
                    (i, *e)
                } else {
                    acc
                }
            });
    Ok(McEstimate {
        estimate: best.mean,
        std_error: best.std_error,
        argmax_model,
        per_model,
    })
}

/// Checks the sub-linear expectation axioms on `(X, Y, lam, c)` and the
/// capacity axioms of the induced `V^` over event pairs.
pub fn verify_sublinear_axioms(
    fam: &DiscreteModelFamily,
    x: &DiscreteRandomVariable,
    y: &DiscreteRandomVariable,
    lam: f64,
    c: f64,
) -> Result<PropertyReport> {
    fam.check_variable(x)?;
    fam.check_variable(y)?;
    if !(lam >= 0.0) || !lam.is_finite() {
        return Err(Error::domain(format!(
            "homogeneity factor must be >= 0, got {lam}"
        )));
    }
    if !c.is_finite() {
        return Err(Error::domain(format!("constant {c} is not finite")));
    }
    let up = |v: &DiscreteRandomVariable| upper_expectation_exact(fam, v);
    let n = fam.outcome_count;
    let mut report = PropertyReport::new();

    let lo = x.zip_with(y, f64::min);
    let hi = x.zip_with(y, f64::max);
    let mut pairs = vec![(&lo, x), (x, &hi), (&lo, y), (y, &hi)];
    if x.le(y) {
        pairs.push((x, y));
    }
    if y.le(x) {
        pairs.push((y, x));
    }
    let mut mono_ok = true;
    for (small, large) in pairs {
        mono_ok &= up(small)? <= up(large)? + AXIOM_TOL;
    }
    report.push(
        "monotone",
        mono_ok,
        "E^[min(X,Y)] <= E^[X], E^[Y] <= E^[max(X,Y)]",
    );

    let ec = up(&DiscreteRandomVariable::constant(n, c))?;
    report.push(
        "constant_preserving",
        (ec - c).abs() <= AXIOM_TOL * (1.0 + c.abs()),
        format!("E^[{c}] = {ec}"),
    );

    let (ex, ey) = (up(x)?, up(y)?);
    let exy = up(&x.zip_with(y, |a, b| a + b))?;
    report.push(
        "sub_additive",
        exy <= ex + ey + AXIOM_TOL,
        format!("E^[X+Y] = {exy} <= E^[X] + E^[Y] = {}", ex + ey),
    );

    let elx = up(&x.map(|v| lam * v))?;
    let ely = up(&y.map(|v| lam * v))?;
    report.push(
        "positive_homogeneous",
        (elx - lam * ex).abs() <= AXIOM_TOL * (1.0 + elx.abs())
            && (ely - lam * ey).abs() <= AXIOM_TOL * (1.0 + ely.abs()),
        format!("E^[{lam} X] = {elx}, {lam} E^[X] = {}", lam * ex),
    );

    let mut dual_ok = true;
    let mut order_ok = true;
    for v in [x, y] {
        let direct_min = fam
            .model_expectations(v)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let lower = lower_expectation_exact(fam, v)?;
        dual_ok &= (direct_min - lower).abs() <= AXIOM_TOL;
        order_ok &= lower <= up(v)? + AXIOM_TOL;
    }
    report.push("submean_duality", dual_ok, "min_Q E_Q[X] = -E^[-X]");
    report.push("submean_below_supermean", order_ok, "E_[X] <= E^[X]");

    report.extend(verify_capacity_axioms(fam));
    Ok(report)
}

fn verify_capacity_axioms(fam: &DiscreteModelFamily) -> PropertyReport {
    if fam.outcome_count <= EXHAUSTIVE_OUTCOME_LIMIT {
        capacity_axioms_exhaustive(fam)
    } else {
        capacity_axioms_sampled(fam)
    }
}

fn capacity_axioms_exhaustive(fam: &DiscreteModelFamily) -> PropertyReport {
    let n = fam.outcome_count;
    let size = 1usize << n;
    let full = size - 1;
    // per-measure subset masses by lowest-bit recursion
    let mut upper = vec![f64::NEG_INFINITY; size];
    let mut lower = vec![f64::INFINITY; size];
    let mut mass = vec![0.0; size];
    for q in &fam.measures {
        mass[0] = 0.0;
        for mask in 1..size {
            let bit = mask.trailing_zeros() as usize;
            mass[mask] = mass[mask & (mask - 1)] + q[bit];
        }
        for mask in 0..size {
            upper[mask] = upper[mask].max(mass[mask]);
            lower[mask] = lower[mask].min(mass[mask]);
        }
    }
    let mut report = PropertyReport::new();
    report.push(
        "capacity_normalized",
        (upper[full] - 1.0).abs() <= AXIOM_TOL && upper[0].abs() <= AXIOM_TOL,
        format!("V^(Omega) = {}, V^(empty) = {}", upper[full], upper[0]),
    );
    let mut monotone = true;
    let mut sub_additive = true;
    for a in 0..size {
        for b in 0..size {
            if a & b == a && upper[a] > upper[b] + AXIOM_TOL {
                monotone = false;
            }
            if upper[a | b] > upper[a] + upper[b] + AXIOM_TOL {
                sub_additive = false;
            }
        }
    }
    let pairs = format!("exhaustive over {} event pairs", size * size);
    report.push("capacity_monotone", monotone, pairs.clone());
    report.push("capacity_sub_additive", sub_additive, pairs);
    let conjugacy = (0..size).all(|a| (lower[a] - (1.0 - upper[full ^ a])).abs() <= AXIOM_TOL);
    report.push(
        "capacity_conjugacy",
        conjugacy,
        format!("min_Q Q(A) = 1 - V^(A^c) for all {size} events"),
    );
    let sigma = (0..size).all(|a| {
        let singles: f64 = (0..n)
            .filter(|k| a >> k & 1 == 1)
            .map(|k| upper[1 << k])
            .sum();
        upper[a] <= singles + AXIOM_TOL
    });
    report.push(
        "capacity_sigma_sub_additive",
        sigma,
        "V^(A) <= sum of V^ over the singletons of A",
    );
    report
}

fn capacity_axioms_sampled(fam: &DiscreteModelFamily) -> PropertyReport {
    let n = fam.outcome_count;
    let mass_of = |mask: &[bool], q: &[f64]| -> f64 {
        q.iter().zip(mask).filter(|(_, &m)| m).map(|(w, _)| w).sum()
    };
    let upper = |mask: &[bool]| {
        fam.measures
            .iter()
            .map(|q| mass_of(mask, q))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let lower = |mask: &[bool]| {
        fam.measures
            .iter()
            .map(|q| mass_of(mask, q))
            .fold(f64::INFINITY, f64::min)
    };
    let mut rng = stream_rng(0, n as u64, fam.model_count() as u64);
    let mut report = PropertyReport::new();
    let full = vec![true; n];
    let empty = vec![false; n];
    report.push(
        "capacity_normalized",
        (upper(&full) - 1.0).abs() <= AXIOM_TOL && upper(&empty).abs() <= AXIOM_TOL,
        format!(
            "V^(Omega) = {}, V^(empty) = {}",
            upper(&full),
            upper(&empty)
        ),
    );
    let (mut monotone, mut sub_additive, mut conjugacy, mut sigma) = (true, true, true, true);
    for _ in 0..SAMPLED_EVENT_PAIRS {
        let a: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let b: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let union: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
        let inter: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x && *y).collect();
        let (ua, ub, uu, ui) = (upper(&a), upper(&b), upper(&union), upper(&inter));
        monotone &= ui <= ua + AXIOM_TOL && ua <= uu + AXIOM_TOL;
        sub_additive &= uu <= ua + ub + AXIOM_TOL;
        let ac: Vec<bool> = a.iter().map(|x| !x).collect();
        conjugacy &= (lower(&a) - (1.0 - upper(&ac))).abs() <= AXIOM_TOL;
        let singles: f64 = (0..n)
            .filter(|&k| a[k])
            .map(|k| {
                let mut s = vec![false; n];
                s[k] = true;
                upper(&s)
            })
            .sum();
        sigma &= ua <= singles + AXIOM_TOL;
    }
    let pairs = format!("sampled over {SAMPLED_EVENT_PAIRS} event pairs");
    report.push("capacity_monotone", monotone, pairs.clone());
    report.push("capacity_sub_additive", sub_additive, pairs.clone());
    report.push("capacity_conjugacy", conjugacy, pairs.clone());
    report.push("capacity_sigma_sub_additive", sigma, pairs);
    report
}

/// Both sides of the product-family factorization inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    /// `E^[prod f_i(xi_i)] = max_m prod_i E_{Q_m}[f_i]`.
    pub lhs: f64,
    /// `prod_i max_m E_{Q_m}[f_i]`.
    pub rhs: f64,
    pub holds: bool,
    /// `lhs < rhs` by more than the comparison tolerance.
    pub strict: bool,
}

/// `E^ prod f_i(xi_i) <= prod E^ f_i(xi_i)` for the product family
/// `{Q_m^(1) x ... x Q_m^(k)}` sharing one model index `m`.
pub fn verify_independence_factorization(
    coordinate_fams: &[DiscreteModelFamily],
    f: &[DiscreteRandomVariable],
) -> Result<FactorizationReport> {
    if coordinate_fams.is_empty() {
        return Err(Error::domain("at least one coordinate is required"));
    }
    if coordinate_fams.len() != f.len() {
        return Err(Error::domain(format!(
            "{} coordinate families but {} functions",
            coordinate_fams.len(),
            f.len()
        )));
    }
    let models = coordinate_fams[0].model_count();
    if let Some(bad) = coordinate_fams.iter().find(|c| c.model_count() != models) {
        return Err(Error::domain(format!(
            "coordinate families must share one model index: {} vs {models} models",
            bad.model_count()
        )));
    }
    if f.iter().flat_map(|v| v.values()).any(|&v| v < 0.0) {
        return Err(Error::domain("factorization functions must be nonnegative"));
    }
    let mut per_coordinate = Vec::with_capacity(f.len());
    for (fam, fi) in coordinate_fams.iter().zip(f) {
        per_coordinate.push(fam.model_expectations(fi)?);
    }
    let lhs = (0..models)
        .map(|m| per_coordinate.iter().map(|e| e[m]).product::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let rhs: f64 = per_coordinate
        .iter()
        .map(|e| e.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .product();
    let tol = 1e-12;
    Ok(FactorizationReport {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
        strict: lhs < rhs - tol,
    })
}

/// JSON form of a model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Discrete {
        outcomes: usize,
        measures: Vec<Vec<f64>>,
    },
    Gaussian {
        means: Vec<f64>,
        sigma: f64,
    },
}

/// A validated family.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    Discrete(DiscreteModelFamily),
    Gaussian(GaussianMeanFamily),
}

impl FamilySpec {
    pub fn build(&self) -> Result<ModelFamily> {
        match self {
            FamilySpec::Discrete { outcomes, measures } => Ok(ModelFamily::Discrete(
                DiscreteModelFamily::new(*outcomes, measures.clone())?,
            )),
            FamilySpec::Gaussian { means, sigma } => Ok(ModelFamily::Gaussian(
                GaussianMeanFamily::new(means.clone(), *sigma)?,
            )),
        }
    }
}

impl From<&GaussianMeanFamily> for FamilySpec {
    fn from(f: &GaussianMeanFamily) -> Self {
        FamilySpec::Gaussian {
            means: f.means.clone(),
            sigma: f.sigma,
        }
    }
}

impl From<&DiscreteModelFamily> for FamilySpec {
    fn from(f: &DiscreteModelFamily) -> Self {
        FamilySpec::Discrete {
            outcomes: f.outcome_count,
            measures: f.measures.clone(),
        }
    }
}
