use caplaw::subgauss::{empirical_tail_capacity, tail_bound};
use caplaw::{FamilySpec, ModelFamily, NFunction, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::{config_error, FamilyArgs};
use crate::output::{num, opt_num, Table};

#[derive(Debug, Args)]
pub struct TailboundArgs {
    /// Exponent of phi_p
    #[arg(long)]
    p: Option<f64>,
    /// Sub-Gaussian parameter
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Comma-separated deviation levels
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Option<Vec<f64>>,
    /// Add a Monte Carlo column under a Gaussian family
    #[arg(long)]
    empirical: bool,
    /// Draws per model for the empirical column
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, allow_hyphen_values = true)]
    m_bar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m_under: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailboundParams {
    pub p: f64,
    pub a: f64,
    pub eps: Vec<f64>,
    pub empirical: bool,
    pub samples: usize,
    pub family: FamilySpec,
    pub m_bar: Option<f64>,
    pub m_under: Option<f64>,
}

impl Default for TailboundParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            a: 1.0,
            eps: vec![1.0, 2.0, 3.0],
            empirical: false,
            samples: 1_000_000,
            family: FamilySpec::Gaussian {
                means: vec![0.0],
                sigma: 1.0,
            },
            m_bar: None,
            m_under: None,
        }
    }
}

impl TailboundParams {
    pub fn merge(mut self, args: &TailboundArgs) -> Result<Self> {
        self.p = args.p.unwrap_or(self.p);
        self.a = args.a.unwrap_or(self.a);
        if let Some(e) = &args.eps {
            self.eps = e.clone();
        }
        self.empirical |= args.empirical;
        self.samples = args.samples.unwrap_or(self.samples);
        args.family.apply(&mut self.family)?;
        self.m_bar = args.m_bar.or(self.m_bar);
        self.m_under = args.m_under.or(self.m_under);
        if let FamilySpec::Gaussian { means, .. } = &self.family {
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            self.m_bar = self.m_bar.or(Some(hi));
            self.m_under = self.m_under.or(Some(lo));
        }
        Ok(self)
    }
}

#[derive(Debug, Serialize)]
pub struct TailRow {
    pub epsilon: f64,
    pub a: f64,
    pub exponent: f64,
    pub bound: f64,
    pub upper_tail: f64,
    pub lower_tail: f64,
    pub empirical: Option<f64>,
    pub empirical_std_error: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
}

pub fn run(params: &TailboundParams, seed: u64) -> Result<(TailReport, Vec<Table>)> {
    let phi = NFunction::phi_p(params.p)?;
    let family = if params.empirical {
        match params.family.build()? {
            ModelFamily::Gaussian(g) => Some(g),
            ModelFamily::Discrete(_) => {
                return Err(config_error("the empirical column needs a Gaussian family"))
            }
        }
    } else {
        None
    };
    let mut rows = Vec::with_capacity(params.eps.len());
    for &eps in &params.eps {
        let t = tail_bound(&phi, params.a, eps)?;
        let emp = match &family {
            Some(g) => {
                let m_bar = params.m_bar.unwrap_or(g.m_bar());
                let m_under = params.m_under.unwrap_or(g.m_under());
                Some(empirical_tail_capacity(
                    g,
                    m_bar,
                    m_under,
                    eps,
                    params.samples,
                    seed,
                )?)
            }
            None => None,
        };
        rows.push(TailRow {
            epsilon: t.epsilon,
            a: t.a,
            exponent: t.exponent,
            bound: t.bound,
            upper_tail: t.upper_tail,
            lower_tail: t.lower_tail,
            empirical: emp.as_ref().map(|e| e.estimate),
            empirical_std_error: emp.as_ref().map(|e| e.std_error),
        });
    }
    let table = Table {
        name: "tailbound.csv",
        header: &[
            "epsilon",
            "a",
            "exponent",
            "bound",
            "upper_tail",
            "lower_tail",
            "empirical",
            "empirical_std_error",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    num(r.epsilon),
                    num(r.a),
                    num(r.exponent),
                    num(r.bound),
                    num(r.upper_tail),
                    num(r.lower_tail),
                    opt_num(r.empirical),
                    opt_num(r.empirical_std_error),
                ]
            })
            .collect(),
    };
    Ok((TailReport { rows }, vec![table]))
}
