use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use fractalkit::cantor::{cantor_homeomorphism, cantor_integral, cantor_levels, CantorSpec, NodeRule};
use serde_json::{json, Value};

use crate::funcspec::FnSpec;
use crate::input;
use crate::report::{num, Report, Table};

#[derive(Subcommand, Debug)]
pub enum CantorCommand {
    /// The level-j interval family
    Gen {
        /// CantorSpec JSON {prefix, tail, max_depth}
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Integral against the Cantor measure by a level-j node sum
    Integrate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        depth: usize,
        /// poly:c0,c1,..., sin:k, cos:k, abs, exp or const:c
        #[arg(long)]
        f: FnSpec,
        #[arg(long, value_enum, default_value_t = Rule::Left)]
        rule: Rule,
    },
    /// The level-j piecewise linear map between two Cantor sets
    Homeo {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Points to map: `lo:hi:n` or a comma list
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Rule {
    Left,
    Right,
}

impl CantorCommand {
    pub fn name(&self) -> &'static str {
        match self {
            CantorCommand::Gen { .. } => "cantor gen",
            CantorCommand::Integrate { .. } => "cantor integrate",
            CantorCommand::Homeo { .. } => "cantor homeo",
        }
    }
}

fn load_spec(report: &mut Report, path: &Path) -> Result<CantorSpec> {
    let text = report.read(path)?;
    input::json(&text, &path.display().to_string())
}

pub fn run(report: &mut Report, cmd: CantorCommand) -> Result<Value> {
    match cmd {
        CantorCommand::Gen { spec, depth } => {
            let s = load_spec(report, &spec)?;
            report.param("spec", spec.display().to_string());
            report.param("depth", depth);
            let level = cantor_levels(&s, depth)?;
            let mut table = Table::new(vec!["index", "lo", "hi"]);
            for (k, iv) in level.intervals.iter().enumerate() {
                table.push(vec![k.to_string(), num(iv.lo), num(iv.hi)]);
            }
            report.table = Some(table);
            let total: f64 = level.intervals.iter().map(|iv| iv.len()).sum();
            Ok(json!({ "count": level.intervals.len(), "total_length": total, "level": level }))
        }
        CantorCommand::Integrate { spec, depth, f, rule } => {
            let s = load_spec(report, &spec)?;
            report.param("spec", spec.display().to_string());
            report.param("depth", depth);
            report.param("f", f.to_string());
            let node_rule = match rule {
                Rule::Left => NodeRule::Left,
                Rule::Right => NodeRule::Right,
            };
            report.param("rule", node_rule);
            let value = cantor_integral(&s, |x| f.eval(x), depth, node_rule)?;
            Ok(json!({ "value": value }))
        }
        CantorCommand::Homeo { from, to, depth, at } => {
            let a = load_spec(report, &from)?;
            let b = load_spec(report, &to)?;
            report.param("from", from.display().to_string());
            report.param("to", to.display().to_string());
            report.param("depth", depth);
            let map = cantor_homeomorphism(&a, &b, depth)?;
            let xs = match &at {
                Some(s) => input::sample_points(s)?,
                None => Vec::new(),
            };
            report.param("at", &xs);
            let mut table = Table::new(vec!["x", "h"]);
            let values: Vec<Value> = xs
                .iter()
                .map(|&x| {
                    let y = map.eval(x);
                    table.push(vec![num(x), num(y)]);
                    json!([x, y])
                })
                .collect();
            report.table = Some(table);
            Ok(json!({ "breakpoints": map.breakpoints().len(), "values": values }))
        }
    }
}
