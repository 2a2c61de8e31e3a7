use caplaw::nfunc::{numeric_conjugate, phi_p_dual_index, scaled_conjugate, ConjugateQuery};
use caplaw::{NFunction, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::config_error;
use crate::output::{num, Table};

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    /// Exponent of phi_p (must exceed 1)
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    /// Comma-separated evaluation points
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    /// Evenly spaced grid LO,HI,COUNT (replaces --y)
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    /// Golden-section tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Outer scale of psi(x) = a phi_p(b x)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Inner scale of psi(x) = a phi_p(b x)
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugateParams {
    pub p: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub y: Vec<f64>,
    pub tol: f64,
}

impl Default for ConjugateParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            a: None,
            b: None,
            y: (0..=20).map(|k| -5.0 + 0.5 * k as f64).collect(),
            tol: 1e-9,
        }
    }
}

impl ConjugateParams {
    pub fn merge(mut self, args: &ConjugateArgs) -> Result<Self> {
        if let Some(p) = args.p {
            self.p = p;
        }
        if let Some(y) = &args.y {
            self.y = y.clone();
        }
        if let Some(g) = &args.grid {
            let [lo, hi, count] = g[..] else {
                return Err(config_error("--grid expects LO,HI,COUNT"));
            };
            if !(count >= 1.0) || count.fract() != 0.0 {
                return Err(config_error(format!(
                    "grid count must be a positive integer, got {count}"
                )));
            }
            let n = count as usize;
            self.y = (0..n)
                .map(|k| {
                    if n == 1 {
                        lo
                    } else {
                        lo + (hi - lo) * k as f64 / (n - 1) as f64
                    }
                })
                .collect();
        }
        if let Some(t) = args.tol {
            self.tol = t;
        }
        if args.a.is_some() {
            self.a = args.a;
        }
        if args.b.is_some() {
            self.b = args.b;
        }
        if (self.a, self.b) != (None, None) {
            self.a = Some(self.a.unwrap_or(1.0));
            self.b = Some(self.b.unwrap_or(1.0));
        }
        Ok(self)
    }
}

#[derive(Debug, Serialize)]
pub struct ConjugateRow {
    pub y: f64,
    pub analytic: f64,
    pub numeric: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Serialize)]
pub struct ConjugateReport {
    pub function: String,
    pub rows: Vec<ConjugateRow>,
}

/// Numeric conjugate of `psi` whose maximizer lies near `x_hint`, widening
/// the search window while the supremum sits on its edge.
fn numeric(psi: &NFunction, y: f64, x_hint: f64, tol: f64) -> Result<f64> {
    let mut x_max = x_hint;
    for _ in 0..24 {
        let v = numeric_conjugate(psi, &ConjugateQuery::new(y, x_max, tol)?)?;
        if !v.truncated {
            return Ok(v.value);
        }
        x_max *= 4.0;
    }
    Err(config_error(format!("supremum not attained for y = {y}")))
}

pub fn run(params: &ConjugateParams) -> Result<(ConjugateReport, Vec<Table>)> {
    phi_p_dual_index(params.p)?;
    let phi = NFunction::phi_p(params.p)?;
    let (a, b) = (params.a.unwrap_or(1.0), params.b.unwrap_or(1.0));
    let scaled = params.a.is_some();
    let psi = if scaled {
        NFunction::scaled(a, b, phi.clone())?
    } else {
        phi.clone()
    };
    let mut rows = Vec::with_capacity(params.y.len());
    for &y in &params.y {
        let (analytic, numeric) = if scaled {
            let hint = ConjugateQuery::for_phi_p(params.p, y / (a * b))?.x_max / b.abs();
            (
                scaled_conjugate(a, b, &phi, y)?,
                numeric(&psi, y, hint, params.tol)?,
            )
        } else {
            let hint = ConjugateQuery::for_phi_p(params.p, y)?.x_max;
            let exact = phi
                .analytic_conjugate(y)
                .ok_or_else(|| config_error("no closed form"))?;
            (exact, numeric(&psi, y, hint, params.tol)?)
        };
        rows.push(ConjugateRow {
            y,
            analytic,
            numeric,
            abs_diff: (analytic - numeric).abs(),
        });
    }
    let table = Table {
        name: "conjugate.csv",
        header: &["y", "analytic", "numeric", "abs_diff"],
        rows: rows
            .iter()
            .map(|r| vec![num(r.y), num(r.analytic), num(r.numeric), num(r.abs_diff)])
            .collect(),
    };
    Ok((
        ConjugateReport {
            function: psi.label(),
            rows,
        },
        vec![table],
    ))
}
