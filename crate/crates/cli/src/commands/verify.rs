use caplaw::expectation::{
    verify_independence_factorization, verify_sublinear_axioms, FactorizationReport,
};
use caplaw::{
    DiscreteModelFamily, DiscreteRandomVariable, FamilySpec, ModelFamily, PropertyReport, Result,
};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::{config_error, FamilyArgs};
use crate::output::{num, Table};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Values of X on the outcomes
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Values of Y on the outcomes
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Option<Vec<f64>>,
    /// Homogeneity factor
    #[arg(long)]
    lam: Option<f64>,
    /// Constant for the constant-preserving check
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
}

/// Coordinates of a product family and one nonnegative function per coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependenceSpec {
    pub coordinates: Vec<FamilySpec>,
    pub functions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub family: FamilySpec,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub lam: f64,
    pub c: f64,
    pub independence: Option<IndependenceSpec>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            family: FamilySpec::Discrete {
                outcomes: 2,
                measures: vec![vec![0.5, 0.5], vec![0.8, 0.2]],
            },
            x: None,
            y: None,
            lam: 2.0,
            c: 1.0,
            independence: None,
        }
    }
}

fn outcomes(spec: &FamilySpec) -> Result<usize> {
    match spec {
        FamilySpec::Discrete { outcomes, .. } => Ok(*outcomes),
        FamilySpec::Gaussian { .. } => Err(config_error("verify needs a discrete family")),
    }
}

impl VerifyParams {
    /// Fills every default that depends on the family.
    pub fn merge(mut self, args: &VerifyArgs) -> Result<Self> {
        args.family.apply(&mut self.family)?;
        self.x = args.x.clone().or(self.x);
        self.y = args.y.clone().or(self.y);
        self.lam = args.lam.unwrap_or(self.lam);
        self.c = args.c.unwrap_or(self.c);
        let n = outcomes(&self.family)?;
        if n == 0 {
            return Err(config_error("a discrete family needs at least one outcome"));
        }
        self.x
            .get_or_insert_with(|| (0..n).map(|k| k as f64).collect());
        self.y
            .get_or_insert_with(|| (0..n).map(|k| (n - 1 - k) as f64 - 0.5).collect());
        if self.independence.is_none() {
            let indicator = |k: usize| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
            self.independence = Some(IndependenceSpec {
                coordinates: vec![self.family.clone(), self.family.clone()],
                functions: vec![indicator(0), indicator(n - 1)],
            });
        }
        Ok(self)
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub axioms: PropertyReport,
    pub factorization: FactorizationReport,
    pub all_passed: bool,
}

fn discrete(spec: &FamilySpec) -> Result<DiscreteModelFamily> {
    match spec.build()? {
        ModelFamily::Discrete(d) => Ok(d),
        ModelFamily::Gaussian(_) => Err(config_error("verify needs discrete families")),
    }
}

pub fn run(params: &VerifyParams) -> Result<(VerifyReport, Vec<Table>, Vec<String>)> {
    let fam = discrete(&params.family)?;
    let missing = || config_error("unresolved verify parameters");
    let x = DiscreteRandomVariable::new(params.x.clone().ok_or_else(missing)?)?;
    let y = DiscreteRandomVariable::new(params.y.clone().ok_or_else(missing)?)?;
    let axioms = verify_sublinear_axioms(&fam, &x, &y, params.lam, params.c)?;

    let ind = params.independence.as_ref().ok_or_else(missing)?;
    let coords = ind
        .coordinates
        .iter()
        .map(discrete)
        .collect::<Result<Vec<_>>>()?;
    let funcs = ind
        .functions
        .iter()
        .map(|f| DiscreteRandomVariable::new(f.clone()))
        .collect::<Result<Vec<_>>>()?;
    let factorization = verify_independence_factorization(&coords, &funcs)?;

    let mut violations: Vec<String> = axioms
        .failures()
        .map(|f| format!("{} failed: {}", f.name, f.detail))
        .collect();
    if !factorization.holds {
        violations.push(format!(
            "factorization fails: {} > {}",
            factorization.lhs, factorization.rhs
        ));
    }
    let mut rows: Vec<Vec<String>> = axioms
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()])
        .collect();
    rows.push(vec![
        "independence_factorization".into(),
        factorization.holds.to_string(),
        format!(
            "lhs {} <= rhs {}",
            num(factorization.lhs),
            num(factorization.rhs)
        ),
    ]);
    let table = Table {
        name: "verify.csv",
        header: &["check", "passed", "detail"],
        rows,
    };
    Ok((
        VerifyReport {
            all_passed: violations.is_empty(),
            axioms,
            factorization,
        },
        vec![table],
        violations,
    ))
}
