use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Subcommand;
use fractalkit::lipschitz::{inf_conv_approx_many, level_profile, lipschitz_constant, McShaneExtension};
use serde_json::{json, Value};

use super::{load_family, load_sampled, SpaceInput};
use crate::input;
use crate::report::{num, Report, Table};

#[derive(Subcommand, Debug)]
pub enum LipCommand {
    /// Extend a function on a subset to every point without raising its constant
    Extend {
        #[command(flatten)]
        space: SpaceInput,
        /// CSV of index,value on the subset
        #[arg(long)]
        values: PathBuf,
        /// Lipschitz constant; defaults to the sampled constant of the input
        #[arg(long)]
        c: Option<f64>,
    },
    /// Lipschitz approximations f_j(x) = min_y f(y) + j d(x, y)
    Approx {
        #[command(flatten)]
        space: SpaceInput,
        /// CSV of index,value covering every point
        #[arg(long)]
        values: PathBuf,
        /// Comma list of constants j
        #[arg(long)]
        j: String,
    },
    /// Step-function majorant of f built from a cover, with its superlevel set
    Levelprofile {
        #[command(flatten)]
        space: SpaceInput,
        /// JSON array of index arrays
        #[arg(long)]
        cover: PathBuf,
        /// CSV of index,value covering every point
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Lipschitz constant; defaults to the sampled constant of the input
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        t: f64,
    },
}

impl LipCommand {
    pub fn name(&self) -> &'static str {
        match self {
            LipCommand::Extend { .. } => "lip extend",
            LipCommand::Approx { .. } => "lip approx",
            LipCommand::Levelprofile { .. } => "lip levelprofile",
        }
    }
}

pub fn run(report: &mut Report, cmd: LipCommand) -> Result<Value> {
    match cmd {
        LipCommand::Extend { space, values, c } => {
            let space = space.load(report)?;
            let h = load_sampled(report, &values)?;
            report.param("values", values.display().to_string());
            let c = match c {
                Some(c) => c,
                None => lipschitz_constant(&space, &h)?,
            };
            report.param("c", c);
            let ext = McShaneExtension::new(&space, &h, c)?;
            let all: Vec<usize> = (0..space.len()).collect();
            let out = ext.eval_many(&all)?;
            let mut table = Table::new(vec!["index", "value"]);
            for (i, v) in out.iter().enumerate() {
                table.push(vec![i.to_string(), num(*v)]);
            }
            report.table = Some(table);
            Ok(json!({ "c": c, "values": out }))
        }
        LipCommand::Approx { space, values, j } => {
            let space = space.load(report)?;
            let f = load_sampled(report, &values)?;
            let js = input::number_list(&j)?;
            report.param("values", values.display().to_string());
            report.param("j", &js);
            if f.len() != space.len() {
                bail!("{}: f must be given at all {} points", values.display(), space.len());
            }
            let all: Vec<usize> = (0..space.len()).collect();
            let columns = js
                .iter()
                .map(|&j| inf_conv_approx_many(&space, &f, j, &all))
                .collect::<fractalkit::Result<Vec<Vec<f64>>>>()?;
            let mut table = Table::new(vec!["j", "index", "f", "f_j"]);
            let mut gaps = Vec::new();
            for (&j, col) in js.iter().zip(&columns) {
                let mut gap = 0.0f64;
                for (i, v) in col.iter().enumerate() {
                    let fi = f.values()[i];
                    gap = gap.max(fi - v);
                    table.push(vec![num(j), i.to_string(), num(fi), num(*v)]);
                }
                gaps.push(gap);
            }
            report.table = Some(table);
            Ok(json!({ "j": js, "values": columns, "max_gap": gaps }))
        }
        LipCommand::Levelprofile {
            space,
            cover,
            values,
            alpha,
            c,
            t,
        } => {
            let space = space.load(report)?;
            let family = load_family(report, &cover)?;
            let f = load_sampled(report, &values)?;
            report.param("cover", cover.display().to_string());
            report.param("values", values.display().to_string());
            let c = match c {
                Some(c) => c,
                None => lipschitz_constant(&space, &f)?,
            };
            report.param("alpha", alpha);
            report.param("c", c);
            report.param("t", t);
            let profile = level_profile(&space, &family, &f, alpha, c, t)?;
            let mut table = Table::new(vec!["lo", "hi", "weight"]);
            for (j, w) in profile.phi.terms() {
                table.push(vec![num(j.lo), num(j.hi), num(*w)]);
            }
            report.table = Some(table);
            Ok(serde_json::to_value(profile)?)
        }
    }
}
