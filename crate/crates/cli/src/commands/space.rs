use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use fractalkit::hausdorff::{
    decreasing_limit, hausdorff_distance_brute, hausdorff_distance_detail, hausdorff_distance_grid, SetSequence,
};
use fractalkit::measure::{content_upper_bound, covering_counts, dimension_fit, measure_profile, CoveringEstimate};
use fractalkit::metric::{
    disconnectedness_profile, enlargement, epsilon_components_of, greedy_disjoint_selection, FiniteMetricSpace,
    SetFamily, SubsetRef,
};
use serde_json::{json, Value};

use super::{load_family, load_subset, Mode, SpaceInput};
use crate::input;
use crate::report::{num, Report, Table};

#[derive(Args, Debug)]
pub struct DimArgs {
    #[command(flatten)]
    pub space: SpaceInput,
    /// `geometric:start,ratio,count` or a comma list, strictly decreasing
    #[arg(long)]
    pub scales: String,
    #[arg(long, value_enum, default_value_t = Mode::Grid)]
    pub mode: Mode,
    /// Report the fitted slope as the dimension estimate `alpha`
    #[arg(long)]
    pub alpha_fit: bool,
    /// Replace the metric by d^a before counting
    #[arg(long)]
    pub snowflake: Option<f64>,
}

pub fn dim(report: &mut Report, args: DimArgs) -> Result<Value> {
    let mut space = args.space.load(report)?;
    if let Some(a) = args.snowflake {
        space = space.with_snowflake(a)?;
    }
    let scales = input::scales(&args.scales)?;
    report.param("scales", &scales);
    report.param("mode", args.mode.name());
    report.param("snowflake", args.snowflake);
    report.param("alpha_fit", args.alpha_fit);

    let counts = covering_counts(&space, &scales, args.mode.config()?)?;
    let fit = dimension_fit(&scales, &counts)?;
    if !fit.counts_monotone {
        report.warn("counts are not monotone in the scale");
    }
    if !fit.is_reliable() {
        report.warn(format!("low-confidence fit: r^2 = {}", fit.r_squared));
    }
    if args.mode == Mode::Greedy {
        report.warn("greedy mode: counts are upper bounds on covering numbers");
    }
    let mut table = Table::new(vec!["scale", "count", "log_inv_scale", "log_count"]);
    for (s, c, x, y) in fit.table() {
        table.push(vec![num(s), c.to_string(), num(x), num(y)]);
    }
    report.table = Some(table);
    let mut result = json!({ "fit": fit, "reliable": fit.is_reliable() });
    if args.alpha_fit {
        result["alpha"] = json!(fit.slope);
    }
    Ok(result)
}

#[derive(Args, Debug)]
pub struct ContentArgs {
    #[command(flatten)]
    pub space: SpaceInput,
    /// JSON array of point indices; defaults to every point
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long)]
    pub alpha: f64,
    /// Strictly decreasing comma list of scales delta
    #[arg(long)]
    pub delta: String,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
}

fn estimate_json(e: &CoveringEstimate, mode: Mode) -> Value {
    let mut v = serde_json::to_value(e).unwrap_or(Value::Null);
    v["certified"] = json!(mode == Mode::Exact);
    v
}

pub fn content(report: &mut Report, args: ContentArgs) -> Result<Value> {
    let space = args.space.load(report)?;
    let set = load_subset(report, &args.subset, &space)?;
    let deltas = input::number_list(&args.delta)?;
    report.param("alpha", args.alpha);
    report.param("delta", &deltas);
    report.param("mode", args.mode.name());
    let config = args.mode.config()?;
    args.mode.warn_if_approximate(report);
    let estimates = if deltas.len() == 1 {
        vec![content_upper_bound(&space, &set, args.alpha, deltas[0], config)?]
    } else {
        measure_profile(&space, &set, args.alpha, &deltas, config)?
    };
    let mut table = Table::new(vec!["delta", "value", "cover_size"]);
    for e in &estimates {
        table.push(vec![num(e.delta), num(e.value), e.cover.len().to_string()]);
    }
    report.table = Some(table);
    Ok(json!({ "estimates": estimates.iter().map(|e| estimate_json(e, args.mode)).collect::<Vec<_>>() }))
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[command(flatten)]
    pub space: SpaceInput,
    /// JSON array of index arrays
    #[arg(long)]
    pub family: PathBuf,
}

pub fn cover(report: &mut Report, args: CoverArgs) -> Result<Value> {
    let space = args.space.load(report)?;
    report.param("family", args.family.display().to_string());
    let family = load_family(report, &args.family)?;
    let selected = greedy_disjoint_selection(&space, &family)?;
    let enlargements = selected
        .iter()
        .map(|&i| enlargement(&space, &family.members[i]))
        .collect::<fractalkit::Result<Vec<SubsetRef>>>()?;
    let covers = SetFamily::new(enlargements.clone()).covers(&family.union());
    Ok(json!({ "selected": selected, "enlargements": enlargements, "enlargements_cover_union": covers }))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Brute,
    Grid,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct HdistArgs {
    #[command(subcommand)]
    pub seq: Option<HdistSeq>,
    /// First point cloud CSV
    pub a: Option<PathBuf>,
    /// Second point cloud CSV
    pub b: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
}

#[derive(Subcommand, Debug)]
pub enum HdistSeq {
    /// Distances from each set of a decreasing sequence to its intersection
    Seq {
        #[command(flatten)]
        space: SpaceInput,
        /// JSON array of index arrays, each contained in the one before
        #[arg(long)]
        sets: PathBuf,
    },
}

impl HdistArgs {
    pub fn name(&self) -> &'static str {
        if self.seq.is_some() {
            "hdist seq"
        } else {
            "hdist"
        }
    }
}

pub fn hdist(report: &mut Report, args: HdistArgs) -> Result<Value> {
    if let Some(HdistSeq::Seq { space, sets }) = args.seq {
        let space = space.load(report)?;
        report.param("sets", sets.display().to_string());
        let family = load_family(report, &sets)?;
        let seq = SetSequence::decreasing(family.members)?;
        let lim = decreasing_limit(&space, &seq)?;
        let mut table = Table::new(vec!["j", "distance"]);
        for (j, d) in lim.distances.iter().enumerate() {
            table.push(vec![j.to_string(), num(*d)]);
        }
        report.table = Some(table);
        return Ok(serde_json::to_value(lim)?);
    }
    let (Some(pa), Some(pb)) = (&args.a, &args.b) else {
        bail!("hdist needs two point cloud files, or the seq subcommand");
    };
    let mut clouds = Vec::new();
    for p in [pa, pb] {
        let text = report.read(p)?;
        let rows = input::numeric_rows(&text, &p.display().to_string())?;
        if rows.is_empty() {
            bail!("{}: no records", p.display());
        }
        clouds.push(rows);
    }
    report.param("a", pa.display().to_string());
    report.param("b", pb.display().to_string());
    report.param("method", format!("{:?}", args.method).to_lowercase());
    let (a, b) = (&clouds[0], &clouds[1]);
    let space = FiniteMetricSpace::euclidean(a.iter().chain(b).cloned().collect()).context("point clouds")?;
    let e1 = SubsetRef::new(0..a.len());
    let e2 = SubsetRef::new(a.len()..a.len() + b.len());
    let h = match args.method {
        Method::Auto => hausdorff_distance_detail(&space, &e1, &e2)?,
        Method::Brute => hausdorff_distance_brute(&space, &e1, &e2)?,
        Method::Grid => hausdorff_distance_grid(&space, &e1, &e2)?,
    };
    let (i, j) = (h.argmax_pair.0, h.argmax_pair.1 - a.len());
    Ok(json!({
        "distance": h.distance,
        "argmax_pair": [i, j],
        "points": [a[i], b[j]],
    }))
}

#[derive(Args, Debug)]
pub struct ComponentsArgs {
    #[command(flatten)]
    pub space: SpaceInput,
    /// Chain gap bound: points are linked when closer than eps
    #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
    pub eps: Option<f64>,
    /// Comma list of gaps for the largest-component-diameter profile
    #[arg(long)]
    pub profile: Option<String>,
    /// JSON array of indices to restrict to (with --eps)
    #[arg(long, requires = "eps")]
    pub subset: Option<PathBuf>,
}

pub fn components(report: &mut Report, args: ComponentsArgs) -> Result<Value> {
    let space = args.space.load(report)?;
    if let Some(profile) = &args.profile {
        let deltas = input::number_list(profile)?;
        report.param("profile", &deltas);
        let rows = disconnectedness_profile(&space, &deltas)?;
        let mut table = Table::new(vec!["delta", "largest_component_diameter"]);
        for (d, w) in &rows {
            table.push(vec![num(*d), num(*w)]);
        }
        report.table = Some(table);
        let profile: Vec<Value> = rows.iter().map(|(d, w)| json!({ "delta": d, "diameter": w })).collect();
        return Ok(json!({ "profile": profile }));
    }
    let eps = args.eps.unwrap_or_default();
    let set = load_subset(report, &args.subset, &space)?;
    report.param("eps", eps);
    let comps = epsilon_components_of(&space, &set, eps)?;
    Ok(json!({ "count": comps.len(), "components": comps }))
}
