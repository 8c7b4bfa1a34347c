use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use fractalkit::realline::{
    maximal_scan, maximal_superlevel, step_chebyshev, stieltjes_integral_with, total_variation, MonotoneFn,
    PiecewiseLinear, StepFunction, StieltjesOptions,
};
use serde_json::{json, Value};

use crate::funcspec::FnSpec;
use crate::input;
use crate::report::{num, Report, Table};

fn load_mu(report: &mut Report, path: &Path) -> Result<MonotoneFn> {
    let text = report.read(path)?;
    report.param("mu", path.display().to_string());
    input::json(&text, &path.display().to_string())
}

#[derive(Args, Debug)]
pub struct StieltjesArgs {
    /// MonotoneFn JSON {nodes: [[x, y_minus, y_plus], ...], left, right}
    #[arg(long)]
    pub mu: PathBuf,
    /// Integrand: poly:c0,c1,..., sin:k, cos:k, abs, exp or const:c
    #[arg(long)]
    pub f: FnSpec,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 30)]
    pub max_depth: u32,
}

pub fn stieltjes(report: &mut Report, args: StieltjesArgs) -> Result<Value> {
    let mu = load_mu(report, &args.mu)?;
    report.param("f", args.f.to_string());
    report.param("a", args.a);
    report.param("b", args.b);
    report.param("tol", args.tol);
    report.param("max_depth", args.max_depth);
    let opts = StieltjesOptions {
        tol: args.tol,
        max_depth: args.max_depth,
        ..StieltjesOptions::default()
    };
    let f = args.f;
    let outcome = stieltjes_integral_with(|x| f.eval(x), &mu, args.a, args.b, opts)?;
    Ok(serde_json::to_value(outcome)?)
}

#[derive(Args, Debug)]
pub struct VariationArgs {
    /// CSV of x,y knots of a piecewise linear function
    #[arg(long, conflicts_with = "f", required_unless_present = "f")]
    pub knots: Option<PathBuf>,
    /// A function spec instead of knots; the result is then a lower bound
    #[arg(long)]
    pub f: Option<FnSpec>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Comma list of refinement levels
    #[arg(long, default_value = "2,4,6,8,10,12")]
    pub levels: String,
}

pub fn variation(report: &mut Report, args: VariationArgs) -> Result<Value> {
    let levels: Vec<u32> = args
        .levels
        .split(',')
        .map(|t| t.trim().parse::<u32>().with_context(|| format!("level {t:?}")))
        .collect::<Result<_>>()?;
    report.param("a", args.a);
    report.param("b", args.b);
    report.param("levels", &levels);
    let est = match (&args.knots, &args.f) {
        (Some(path), _) => {
            let text = report.read(path)?;
            report.param("knots", path.display().to_string());
            let rows = input::numeric_rows(&text, &path.display().to_string())?;
            let pts = rows
                .iter()
                .enumerate()
                .map(|(k, r)| match r.as_slice() {
                    [x, y] => Ok((*x, *y)),
                    _ => bail!("{}: record {} needs x,y", path.display(), k + 1),
                })
                .collect::<Result<Vec<_>>>()?;
            let turning: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let h = PiecewiseLinear::new(pts)?;
            total_variation(|x| h.eval(x), args.a, args.b, Some(&turning), &levels)?
        }
        (None, Some(f)) => {
            report.param("f", f.to_string());
            total_variation(|x| f.eval(x), args.a, args.b, None, &levels)?
        }
        (None, None) => bail!("give --knots or --f"),
    };
    if !est.exact {
        report.warn("no turning points declared: the value is a lower bound on the total variation");
    }
    let mut table = Table::new(vec!["level", "partition_size", "variation"]);
    for (l, n, v) in &est.estimates {
        table.push(vec![l.to_string(), n.to_string(), num(*v)]);
    }
    report.table = Some(table);
    Ok(serde_json::to_value(est)?)
}

#[derive(Args, Debug)]
pub struct MaximalArgs {
    #[arg(long)]
    pub mu: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Scan points: `lo:hi:n` or a comma list
    #[arg(long, allow_hyphen_values = true)]
    pub xs: String,
    /// Extra dyadic candidates between nodes, up to 20
    #[arg(long, default_value_t = 0)]
    pub depth: u32,
    /// Threshold for the superlevel set (alpha = 1 only)
    #[arg(long)]
    pub t: Option<f64>,
}

pub fn maximal(report: &mut Report, args: MaximalArgs) -> Result<Value> {
    let mu = load_mu(report, &args.mu)?;
    let xs = input::sample_points(&args.xs)?;
    report.param("alpha", args.alpha);
    report.param("xs", &args.xs);
    report.param("depth", args.depth);
    report.param("t", args.t);
    let scan = maximal_scan(&mu, args.alpha, &xs, args.depth)?;
    let mut table = Table::new(vec!["x", "mu_star"]);
    for m in &scan {
        table.push(vec![num(m.x), num(m.value)]);
    }
    report.table = Some(table);
    if scan.iter().any(|m| m.value.is_infinite()) {
        report.warn("the scan hits a jump of mu, where the maximal function is infinite (null in JSON)");
    }
    let superlevel = match args.t {
        Some(_) if args.alpha != 1.0 => bail!("--t needs --alpha 1: superlevel sets are computed for alpha = 1"),
        Some(t) => Some(maximal_superlevel(&mu, t)?),
        None => None,
    };
    Ok(json!({ "scan": scan, "superlevel": superlevel }))
}

#[derive(Args, Debug)]
pub struct ChebyshevArgs {
    /// StepFunction JSON [{lo, hi, lo_closed, hi_closed, weight}, ...]
    #[arg(long)]
    pub phi: PathBuf,
    #[arg(long)]
    pub t: f64,
}

pub fn chebyshev(report: &mut Report, args: ChebyshevArgs) -> Result<Value> {
    let text = report.read(&args.phi)?;
    let phi: StepFunction = input::json(&text, &args.phi.display().to_string())?;
    report.param("phi", args.phi.display().to_string());
    report.param("t", args.t);
    Ok(serde_json::to_value(step_chebyshev(&phi, args.t)?)?)
}
