use caplaw::slln::{slln_report, DEFAULT_MAX_DRAWS};
use caplaw::{FamilySpec, ModelFamily, Result, SllnConfig, SllnReport, TheoremInputs};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::{config_error, desk_family, FamilyArgs};
use crate::output::{num, Table};

pub const MAX_DRAWS_ENV: &str = "CAPLAW_MAX_DRAWS";

#[derive(Debug, Args)]
pub struct SllnArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    n_steps: Option<u64>,
    #[arg(long)]
    n_paths: Option<u64>,
    /// Half-width added to the mean band
    #[arg(long)]
    epsilon: Option<f64>,
    /// First time at which band exits count
    #[arg(long)]
    n_min: Option<u64>,
    /// Exponent p of the assumed rate tau(Z_n) <= c n^-alpha
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Rate constant c (default: sigma)
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SllnParams {
    pub family: FamilySpec,
    pub n_steps: u64,
    pub n_paths: u64,
    pub epsilon: f64,
    pub n_min: u64,
    pub p: f64,
    pub alpha: f64,
    pub c: Option<f64>,
    pub max_draws: u64,
}

impl Default for SllnParams {
    fn default() -> Self {
        let desk = SllnConfig::desk(0);
        Self {
            family: desk_family(),
            n_steps: desk.n_steps,
            n_paths: desk.n_paths,
            epsilon: desk.epsilon,
            n_min: desk.n_min,
            p: 2.0,
            alpha: 0.5,
            c: None,
            max_draws: DEFAULT_MAX_DRAWS,
        }
    }
}

impl SllnParams {
    pub fn merge(mut self, args: &SllnArgs, env_cap: Option<&str>) -> Result<Self> {
        args.family.apply(&mut self.family)?;
        self.n_steps = args.n_steps.unwrap_or(self.n_steps);
        self.n_paths = args.n_paths.unwrap_or(self.n_paths);
        self.epsilon = args.epsilon.unwrap_or(self.epsilon);
        self.n_min = args.n_min.unwrap_or(self.n_min);
        self.p = args.p.unwrap_or(self.p);
        self.alpha = args.alpha.unwrap_or(self.alpha);
        self.c = args.c.or(self.c);
        if let Some(raw) = env_cap {
            self.max_draws = raw.trim().parse().map_err(|_| {
                config_error(format!("{MAX_DRAWS_ENV} must be an integer, got {raw:?}"))
            })?;
        }
        if let (None, FamilySpec::Gaussian { sigma, .. }) = (self.c, &self.family) {
            self.c = Some(*sigma);
        }
        Ok(self)
    }
}

pub fn run(params: &SllnParams, seed: u64) -> Result<(SllnReport, Vec<Table>, Vec<String>)> {
    let ModelFamily::Gaussian(family) = params.family.build()? else {
        return Err(config_error("slln runs need a Gaussian family"));
    };
    let cfg = SllnConfig::new(
        family.clone(),
        params.n_steps,
        params.n_paths,
        params.epsilon,
        params.n_min,
        seed,
    )?
    .with_max_draws(params.max_draws);
    let inputs = TheoremInputs {
        p: params.p,
        alpha: params.alpha,
        c: params.c.unwrap_or(family.sigma()),
    };
    let report = slln_report(&cfg, inputs)?;
    let checkpoints = Table {
        name: "slln_checkpoints.csv",
        header: &[
            "m",
            "n",
            "deviation_frequency",
            "lemma_bound",
            "theorem_bound",
        ],
        rows: report
            .checkpoint_rows
            .iter()
            .map(|r| {
                vec![
                    num(r.m),
                    r.n.to_string(),
                    num(r.deviation_frequency),
                    num(r.lemma_bound),
                    num(r.theorem_bound),
                ]
            })
            .collect(),
    };
    let series = Table {
        name: "slln_series.csv",
        header: &["n", "partial_sum", "integral_bound"],
        rows: report
            .series
            .iter()
            .map(|r| vec![r.n.to_string(), num(r.partial_sum), num(r.integral_bound)])
            .collect(),
    };
    let violations = report.violations.clone();
    Ok((report, vec![checkpoints, series], violations))
}
