use caplaw::expectation::{lower_expectation_exact, upper_expectation_exact, DiscreteSampler};
use caplaw::subgauss::{
    log_lambda_grid, tau_phi, DiscreteOracle, GaussianOracle, McOracle, TauResult,
};
use caplaw::{DiscreteRandomVariable, FamilySpec, LogMgfOracle, ModelFamily, NFunction, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::{config_error, desk_family, FamilyArgs};
use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Values of the variable on a discrete family's outcomes
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Exponent of phi_p
    #[arg(long)]
    p: Option<f64>,
    /// Upper centering (default: the upper mean)
    #[arg(long, allow_hyphen_values = true)]
    m_bar: Option<f64>,
    /// Lower centering (default: the lower mean)
    #[arg(long, allow_hyphen_values = true)]
    m_under: Option<f64>,
    /// Upper end of the bisection bracket
    #[arg(long)]
    a_hi: Option<f64>,
    /// Bisection tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
    /// Draws per model for the mc oracle
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauParams {
    pub family: FamilySpec,
    pub values: Option<Vec<f64>>,
    pub p: f64,
    pub m_bar: Option<f64>,
    pub m_under: Option<f64>,
    pub a_hi: f64,
    pub tol: f64,
    pub oracle: OracleKind,
    pub samples: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
}

impl Default for TauParams {
    fn default() -> Self {
        Self {
            family: desk_family(),
            values: None,
            p: 2.0,
            m_bar: None,
            m_under: None,
            a_hi: 4.0,
            tol: 1e-7,
            oracle: OracleKind::Exact,
            samples: 100_000,
            lambda_min: 1e-3,
            lambda_max: 1e2,
            lambda_count: 61,
        }
    }
}

impl TauParams {
    pub fn merge(mut self, args: &TauArgs) -> Result<Self> {
        args.family.apply(&mut self.family)?;
        if args.values.is_some() {
            self.values = args.values.clone();
        }
        self.p = args.p.unwrap_or(self.p);
        self.m_bar = args.m_bar.or(self.m_bar);
        self.m_under = args.m_under.or(self.m_under);
        self.a_hi = args.a_hi.unwrap_or(self.a_hi);
        self.tol = args.tol.unwrap_or(self.tol);
        self.oracle = args.oracle.unwrap_or(self.oracle);
        self.samples = args.samples.unwrap_or(self.samples);
        Ok(self)
    }
}

#[derive(Debug, Serialize)]
pub struct TauReport {
    #[serde(flatten)]
    pub result: TauResult,
    pub warnings: Vec<String>,
}

struct Built {
    oracle: Box<dyn LogMgfOracle>,
    m_bar: f64,
    m_under: f64,
}

fn build(params: &TauParams, seed: u64) -> Result<Built> {
    match params.family.build()? {
        ModelFamily::Gaussian(fam) => {
            if params.values.is_some() {
                return Err(config_error("values apply to discrete families only"));
            }
            let (m_bar, m_under) = (fam.m_bar(), fam.m_under());
            let oracle: Box<dyn LogMgfOracle> = match params.oracle {
                OracleKind::Exact => Box::new(GaussianOracle::new(fam)),
                OracleKind::Mc => Box::new(McOracle::from_family(&fam, params.samples, seed)?),
            };
            Ok(Built {
                oracle,
                m_bar,
                m_under,
            })
        }
        ModelFamily::Discrete(fam) => {
            let values = params
                .values
                .clone()
                .ok_or_else(|| config_error("a discrete family needs the variable's values"))?;
            let x = DiscreteRandomVariable::new(values)?;
            let m_bar = upper_expectation_exact(&fam, &x)?;
            let m_under = lower_expectation_exact(&fam, &x)?;
            let oracle: Box<dyn LogMgfOracle> = match params.oracle {
                OracleKind::Exact => Box::new(DiscreteOracle::new(fam, x)?),
                OracleKind::Mc => {
                    let sampler = DiscreteSampler::new(&fam, &x)?;
                    Box::new(McOracle::from_family(&sampler, params.samples, seed)?)
                }
            };
            Ok(Built {
                oracle,
                m_bar,
                m_under,
            })
        }
    }
}

/// Resolves the default centerings so the echo is complete.
pub fn resolve(mut params: TauParams, seed: u64) -> Result<TauParams> {
    let built = build(&params, seed)?;
    params.m_bar = Some(params.m_bar.unwrap_or(built.m_bar));
    params.m_under = Some(params.m_under.unwrap_or(built.m_under));
    Ok(params)
}

pub fn run(params: &TauParams, seed: u64) -> Result<(TauReport, Vec<Table>)> {
    let built = build(params, seed)?;
    let m_bar = params.m_bar.unwrap_or(built.m_bar);
    let m_under = params.m_under.unwrap_or(built.m_under);
    let phi = NFunction::phi_p(params.p)?;
    if params.lambda_count == 0
        || !(params.lambda_min > 0.0)
        || !(params.lambda_max >= params.lambda_min)
    {
        return Err(config_error(
            "lambda grid needs 0 < lambda_min <= lambda_max and lambda_count >= 1",
        ));
    }
    let grid = log_lambda_grid(params.lambda_min, params.lambda_max, params.lambda_count);
    let result = tau_phi(
        built.oracle.as_ref(),
        &phi,
        m_bar,
        m_under,
        &grid,
        params.a_hi,
        params.tol,
    )?;
    let mut warnings = Vec::new();
    if result.degenerate {
        warnings.push(format!(
            "degenerate: the condition holds at a = {}; the variable is (numerically) constant at the centerings",
            result.tau
        ));
    }
    if result.certificate.statistical {
        warnings.push("certificate rests on Monte Carlo estimates".to_string());
    }
    let rows = grid
        .iter()
        .map(|&l| {
            let shift = if l > 0.0 { m_bar } else { m_under };
            let log_mgf = built.oracle.log_mgf(l, shift);
            let bound = phi.eval(result.tau * l);
            vec![
                num(l),
                num(shift),
                num(log_mgf),
                num(bound),
                num(bound - log_mgf),
            ]
        })
        .collect();
    let table = Table {
        name: "tau_margins.csv",
        header: &["lambda", "shift", "log_mgf", "phi_bound", "margin"],
        rows,
    };
    Ok((TauReport { result, warnings }, vec![table]))
}
