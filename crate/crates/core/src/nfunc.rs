//! Quadratic N-functions and their convex conjugates.
//!
//! The standardized power function `phi_p` equals `x^2/2` on `|x| <= 1` and
//! `|x|^p / p - 1/p + 1/2` beyond. For `p > 1` its conjugate is `phi_q` with
//! `1/p + 1/q = 1`; everything else goes through a golden-section search on
//! the concave objective `x|y| - f(x)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::PropertyReport;

/// Default absolute tolerance of the conjugate search.
pub const DEFAULT_CONJUGATE_TOL: f64 = 1e-9;
/// Iteration cap of the golden-section search.
pub const MAX_GOLDEN_ITERATIONS: usize = 200;

/// Evaluates `phi_p(x)`.
pub fn phi_p_eval(p: f64, x: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "phi_p requires finite p >= 1, got {p}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "phi_p argument must be finite, got {x}"
        )));
    }
    Ok(phi_p_unchecked(p, x))
}

#[inline]
fn phi_p_unchecked(p: f64, x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 1.0 {
        0.5 * ax * ax
    } else {
        ax.powf(p) / p - 1.0 / p + 0.5
    }
}

/// Hölder dual index `q = p / (p - 1)`.
pub fn phi_p_dual_index(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "dual index undefined for p = {p} (requires finite p > 1)"
        )));
    }
    Ok(p / (p - 1.0))
}

/// A user-supplied even convex function.
#[derive(Clone)]
pub struct CustomFn {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomFn {
    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("label", &self.label)
            .finish()
    }
}

/// Descriptor of a (quadratic) N-function.
#[derive(Debug, Clone)]
pub enum NFunction {
    PhiP(f64),
    Custom(CustomFn),
}

/// Serializable summary of an [`NFunction`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NFunctionDescriptor {
    PhiP { p: f64 },
    Custom { label: String },
}

impl NFunction {
    pub fn phi_p(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::domain(format!(
                "phi_p requires finite p >= 1, got {p}"
            )));
        }
        Ok(NFunction::PhiP(p))
    }

    /// The classical sub-Gaussian case `phi_2(x) = x^2 / 2`.
    pub fn phi_2() -> Self {
        NFunction::PhiP(2.0)
    }

    /// Wraps an arbitrary closure. The caller declares that it is even and convex.
    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        NFunction::Custom(CustomFn {
            label: label.into(),
            f: Arc::new(f),
        })
    }

    /// `psi(x) = a * f(b x)`, as a custom function.
    pub fn scaled(a: f64, b: f64, inner: NFunction) -> Result<Self> {
        check_scaling(a, b)?;
        let label = format!("{a}*[{}]({b}x)", inner.label());
        Ok(NFunction::custom(label, move |x| a * inner.eval(b * x)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NFunction::PhiP(p) => phi_p_unchecked(*p, x),
            NFunction::Custom(c) => (c.f)(x),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NFunction::PhiP(p) => format!("phi_{p}"),
            NFunction::Custom(c) => c.label.clone(),
        }
    }

    pub fn descriptor(&self) -> NFunctionDescriptor {
        match self {
            NFunction::PhiP(p) => NFunctionDescriptor::PhiP { p: *p },
            NFunction::Custom(c) => NFunctionDescriptor::Custom {
                label: c.label.clone(),
            },
        }
    }

    /// Closed-form conjugate, when one is known (`phi_p^* = phi_q`, `p > 1`).
    pub fn analytic_conjugate(&self, y: f64) -> Option<f64> {
        match self {
            NFunction::PhiP(p) if *p > 1.0 => {
                let q = *p / (*p - 1.0);
                Some(phi_p_unchecked(q, y))
            }
            _ => None,
        }
    }

    /// Conjugate at `y`: analytic when available, otherwise numeric with an
    /// expanding search domain.
    pub fn conjugate(&self, y: f64) -> Result<f64> {
        Ok(self.conjugate_with_argmax(y)?.value)
    }

    /// Conjugate at `y` together with a maximizer `x >= 0` of `x|y| - f(x)`.
    pub fn conjugate_with_argmax(&self, y: f64) -> Result<ConjugateValue> {
        if !y.is_finite() {
            return Err(Error::domain(format!(
                "conjugate argument must be finite, got {y}"
            )));
        }
        if let (NFunction::PhiP(p), Some(value)) = (self, self.analytic_conjugate(y)) {
            let ay = y.abs();
            let argmax = if ay <= 1.0 {
                ay
            } else {
                ay.powf(1.0 / (p - 1.0))
            };
            return Ok(ConjugateValue {
                value,
                argmax,
                truncated: false,
            });
        }
        let mut x_max = 10f64.max(10.0 * y.abs());
        for _ in 0..24 {
            let query = ConjugateQuery::new(y, x_max, DEFAULT_CONJUGATE_TOL)?;
            let value = numeric_conjugate(self, &query)?;
            if !value.truncated {
                return Ok(value);
            }
            x_max *= 4.0;
        }
        Err(Error::domain(format!(
            "supremum of x*{y} - {}(x) is not attained on any searched domain",
            self.label()
        )))
    }
}

fn check_scaling(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "scale a must be finite and > 0, got {a}"
        )));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::domain(format!(
            "scale b must be finite and nonzero, got {b}"
        )));
    }
    Ok(())
}

/// Argument and search domain of a numeric conjugate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateQuery {
    pub y: f64,
    pub x_max: f64,
    pub tol: f64,
}

impl ConjugateQuery {
    pub fn new(y: f64, x_max: f64, tol: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::domain(format!(
                "conjugate argument must be finite, got {y}"
            )));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::domain(format!(
                "x_max must be finite and > 0, got {x_max}"
            )));
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::domain(format!(
                "tol must be finite and > 0, got {tol}"
            )));
        }
        Ok(Self { y, x_max, tol })
    }

    /// Query whose domain `[0, max(10, 10 |y|^(1/(p-1)))]` contains the
    /// maximizer of the `phi_p` objective.
    pub fn for_phi_p(p: f64, y: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::domain(format!(
                "default search domain needs p > 1, got {p}"
            )));
        }
        let x_max = 10f64.max(10.0 * y.abs().powf(1.0 / (p - 1.0)));
        Self::new(y, x_max, DEFAULT_CONJUGATE_TOL)
    }
}

/// Result of a numeric conjugate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugateValue {
    pub value: f64,
    pub argmax: f64,
    /// The supremum sits at the truncation boundary `x_max`; the value is a
    /// lower bound of the true conjugate.
    pub truncated: bool,
}

/// `sup_{0 <= x <= x_max} { x|y| - f(x) }` by golden-section search.
pub fn numeric_conjugate(f: &NFunction, query: &ConjugateQuery) -> Result<ConjugateValue> {
    let ConjugateQuery { y, x_max, tol } = *query;
    ConjugateQuery::new(y, x_max, tol)?;
    let y = y.abs();
    let objective = |x: f64| x * y - f.eval(x);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, x_max);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..MAX_GOLDEN_ITERATIONS {
        if hi - lo <= tol {
            break;
        }
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d);
        }
    }
    let width = hi - lo;

    let mut best = (0.0, objective(0.0));
    for (x, v) in [(c, fc), (d, fd), (x_max, objective(x_max))] {
        if v > best.1 {
            best = (x, v);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::domain(format!(
            "conjugate objective is not finite for {}",
            f.label()
        )));
    }
    let truncated = x_max - best.0 <= 2.0 * width.max(tol);
    Ok(ConjugateValue {
        value: best.1,
        argmax: best.0,
        truncated,
    })
}

/// Conjugate of `psi(x) = a f(b x)` via `psi^*(y) = a f^*(y / (a b))`.
pub fn scaled_conjugate(a: f64, b: f64, f: &NFunction, y: f64) -> Result<f64> {
    check_scaling(a, b)?;
    Ok(a * f.conjugate(y / (a * b))?)
}

/// Grid checks of the N-function axioms plus the quadratic-near-origin shape.
pub fn verify_quadratic_nfunction(
    f: &NFunction,
    grid: &[f64],
    c_expect: f64,
    x0_expect: f64,
) -> Result<PropertyReport> {
    if grid.is_empty() {
        return Err(Error::domain("verification grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("grid value {bad} is not finite")));
    }
    let tol = |v: f64| 1e-12 * (1.0 + v.abs());
    let mut report = PropertyReport::new();

    let odd = grid
        .iter()
        .copied()
        .find(|&x| (f.eval(x) - f.eval(-x)).abs() > tol(f.eval(x)));
    report.push(
        "even",
        odd.is_none(),
        odd.map_or_else(
            || "f(x) = f(-x) on grid".into(),
            |x| format!("f({x}) != f({})", -x),
        ),
    );

    let f0 = f.eval(0.0);
    report.push("zero_at_origin", f0.abs() <= 1e-15, format!("f(0) = {f0}"));

    let mut positive: Vec<f64> = grid.iter().map(|x| x.abs()).filter(|&x| x > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    positive.dedup();
    let decrease = positive
        .windows(2)
        .find(|w| f.eval(w[1]) < f.eval(w[0]) - tol(f.eval(w[0])));
    report.push(
        "monotone_positive",
        decrease.is_none(),
        decrease.map_or_else(
            || "nondecreasing on positive grid".into(),
            |w| format!("f({}) > f({})", w[0], w[1]),
        ),
    );

    let mut convex_violation = None;
    'outer: for (i, &x) in grid.iter().enumerate() {
        for &z in &grid[i + 1..] {
            let mid = f.eval(0.5 * (x + z));
            let chord = 0.5 * (f.eval(x) + f.eval(z));
            if mid > chord + tol(chord) {
                convex_violation = Some((x, z));
                break 'outer;
            }
        }
    }
    report.push(
        "midpoint_convex",
        convex_violation.is_none(),
        convex_violation.map_or_else(
            || "midpoint convex on all grid pairs".into(),
            |(x, z)| format!("midpoint convexity fails for ({x}, {z})"),
        ),
    );

    let mut worst_quad: f64 = 0.0;
    for &x in grid.iter().filter(|x| x.abs() <= x0_expect) {
        worst_quad = worst_quad.max((f.eval(x) - c_expect * x * x).abs());
    }
    report.push(
        "quadratic_near_origin",
        worst_quad <= 1e-9,
        format!("max |f(x) - {c_expect} x^2| on |x| <= {x0_expect} is {worst_quad:e}"),
    );

    match (positive.first().copied(), positive.last().copied()) {
        (Some(small), Some(large)) => {
            let ratio = |x: f64| f.eval(x) / x;
            let toward_zero: Vec<f64> = (0..=6).map(|k| ratio(small * 10f64.powi(-k))).collect();
            let zero_ok = toward_zero.windows(2).all(|w| w[1] <= w[0])
                && toward_zero[6] <= 1e-3 * toward_zero[0];
            report.push(
                "ratio_vanishes_at_zero",
                zero_ok,
                format!("f(x)/x from {:e} to {:e}", toward_zero[0], toward_zero[6]),
            );
            let toward_inf: Vec<f64> = (0..=6).map(|k| ratio(large * 10f64.powi(k))).collect();
            let inf_ok =
                toward_inf.windows(2).all(|w| w[1] > w[0]) && toward_inf[6] >= 10.0 * toward_inf[0];
            report.push(
                "ratio_diverges_at_infinity",
                inf_ok,
                format!("f(x)/x from {:e} to {:e}", toward_inf[0], toward_inf[6]),
            );
        }
        _ => {
            report.push("ratio_vanishes_at_zero", false, "no nonzero grid points");
            report.push(
                "ratio_diverges_at_infinity",
                false,
                "no nonzero grid points",
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn symmetric_grid() -> Vec<f64> {
        let pos: Vec<f64> = (1..=50).map(|k| k as f64 * 0.1).collect();
        pos.iter().map(|x| -x).chain(pos.iter().copied()).collect()
    }

    #[test]
    fn phi_p_values() {
        assert_eq!(phi_p_eval(2.0, 1.0).unwrap(), 0.5);
        assert_eq!(phi_p_eval(3.0, 0.0).unwrap(), 0.0);
        // (1/3) 8 - 1/3 + 1/2 = 17/6
        assert_abs_diff_eq!(phi_p_eval(3.0, 2.0).unwrap(), 17.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_p_eval(3.0, -2.0).unwrap(), 17.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn phi_p_continuous_at_one() {
        for p in [1.0, 1.5, 2.0, 3.0, 7.5] {
            let below = phi_p_eval(p, 1.0).unwrap();
            let above = phi_p_eval(p, 1.0 + 1e-12).unwrap();
            assert_abs_diff_eq!(below, 0.5, epsilon = 0.0);
            assert_abs_diff_eq!(above, 0.5, epsilon = 1e-11);
        }
    }

    #[test]
    fn phi_p_rejects_bad_input() {
        assert!(matches!(phi_p_eval(0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(phi_p_eval(2.0, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(
            phi_p_eval(2.0, f64::INFINITY),
            Err(Error::Domain(_))
        ));
        assert!(phi_p_eval(1.0, 3.0).is_ok());
    }

    #[test]
    fn dual_index() {
        assert_eq!(phi_p_dual_index(2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(phi_p_dual_index(3.0).unwrap(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_p_dual_index(1.5).unwrap(), 3.0, epsilon = 1e-14);
        for p in [1.1, 1.5, 2.0, 3.0, 10.0] {
            let q = phi_p_dual_index(p).unwrap();
            assert_abs_diff_eq!(1.0 / p + 1.0 / q, 1.0, epsilon = 1e-15);
        }
        assert!(phi_p_dual_index(1.0).is_err());
        assert!(phi_p_dual_index(0.3).is_err());
    }

    #[test]
    fn numeric_conjugate_examples() {
        let phi2 = NFunction::phi_2();
        let q = ConjugateQuery::new(0.5, 10.0, 1e-9).unwrap();
        let v = numeric_conjugate(&phi2, &q).unwrap();
        assert_abs_diff_eq!(v.value, 0.125, epsilon = 1e-9);
        assert!(!v.truncated);

        // independent evaluation of phi_1.5(2) = (2/3) 2^1.5 - 2/3 + 1/2
        let expected = (2.0 / 3.0) * 2f64.powf(1.5) - 2.0 / 3.0 + 0.5;
        assert_abs_diff_eq!(expected, 1.718951, epsilon = 1e-6);
        let phi3 = NFunction::phi_p(3.0).unwrap();
        let q = ConjugateQuery::new(2.0, 10.0, 1e-9).unwrap();
        assert_abs_diff_eq!(
            numeric_conjugate(&phi3, &q).unwrap().value,
            expected,
            epsilon = 1e-9
        );

        for f in [phi2, phi3, NFunction::custom("x^4", |x| x.powi(4))] {
            let q = ConjugateQuery::new(0.0, 10.0, 1e-9).unwrap();
            assert_eq!(numeric_conjugate(&f, &q).unwrap().value, 0.0);
        }
    }

    #[test]
    fn numeric_conjugate_flags_truncation() {
        let abs = NFunction::custom("|x|", f64::abs);
        let q = ConjugateQuery::new(2.0, 10.0, 1e-9).unwrap();
        let v = numeric_conjugate(&abs, &q).unwrap();
        assert!(v.truncated);
        assert_abs_diff_eq!(v.value, 10.0, epsilon = 1e-9);

        // phi_2 at y = 20 on [0, 10]: maximizer x = 20 lies outside
        let q = ConjugateQuery::new(20.0, 10.0, 1e-9).unwrap();
        assert!(
            numeric_conjugate(&NFunction::phi_2(), &q)
                .unwrap()
                .truncated
        );
    }

    #[test]
    fn query_validation() {
        assert!(ConjugateQuery::new(1.0, 0.0, 1e-9).is_err());
        assert!(ConjugateQuery::new(1.0, 1.0, 0.0).is_err());
        assert!(ConjugateQuery::new(f64::NAN, 1.0, 1e-9).is_err());
        let q = ConjugateQuery::for_phi_p(1.5, 10.0).unwrap();
        assert_abs_diff_eq!(q.x_max, 1000.0, epsilon = 1e-9);
        assert!(ConjugateQuery::for_phi_p(1.0, 1.0).is_err());
    }

    #[test]
    fn scaled_conjugate_examples() {
        let phi2 = NFunction::phi_2();
        assert_abs_diff_eq!(
            scaled_conjugate(1.0, 1.0, &phi2, 1.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            scaled_conjugate(2.0, 1.0, &phi2, 2.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            scaled_conjugate(1.0, 3.0, &phi2, 3.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );

        for (a, b, y) in [(2.0, 1.0, 2.0), (1.0, 3.0, 3.0)] {
            let psi = NFunction::scaled(a, b, phi2.clone()).unwrap();
            let q = ConjugateQuery::new(y, 10.0, 1e-9).unwrap();
            let numeric = numeric_conjugate(&psi, &q).unwrap().value;
            assert_abs_diff_eq!(
                numeric,
                scaled_conjugate(a, b, &phi2, y).unwrap(),
                epsilon = 1e-8
            );
        }
        assert!(scaled_conjugate(0.0, 1.0, &phi2, 1.0).is_err());
        assert!(scaled_conjugate(1.0, 0.0, &phi2, 1.0).is_err());
    }

    #[test]
    fn custom_conjugate_uses_numeric_route() {
        // conjugate of x^2/2 written as a custom closure equals y^2/2
        let f = NFunction::custom("half square", |x| 0.5 * x * x);
        assert!(f.analytic_conjugate(3.0).is_none());
        assert_abs_diff_eq!(f.conjugate(30.0).unwrap(), 450.0, epsilon = 1e-6);
        let abs = NFunction::custom("|x|", f64::abs);
        assert!(abs.conjugate(2.0).is_err());
    }

    #[test]
    fn quadratic_nfunction_checks() {
        let grid = symmetric_grid();
        for p in [2.0, 3.0] {
            let report =
                verify_quadratic_nfunction(&NFunction::phi_p(p).unwrap(), &grid, 0.5, 1.0).unwrap();
            assert!(
                report.all_passed(),
                "{:?}",
                report.failures().collect::<Vec<_>>()
            );
        }
        let abs = NFunction::custom("|x|", f64::abs);
        let report = verify_quadratic_nfunction(&abs, &grid, 0.5, 1.0).unwrap();
        assert_eq!(report.passed("ratio_vanishes_at_zero"), Some(false));
        assert_eq!(report.passed("even"), Some(true));
        assert!(verify_quadratic_nfunction(&abs, &[], 0.5, 1.0).is_err());

        let concave = NFunction::custom("sqrt|x|", |x: f64| x.abs().sqrt());
        let report = verify_quadratic_nfunction(&concave, &grid, 0.5, 1.0).unwrap();
        assert_eq!(report.passed("midpoint_convex"), Some(false));
    }
}
