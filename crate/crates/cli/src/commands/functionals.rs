use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::Subcommand;
use fractalkit::functionals::{convolve, evaluate, fourier, weak_convergence_check, DiscreteFunctional, TestFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::funcspec::FnSpec;
use crate::input;
use crate::report::{num, Report, Table};

#[derive(Subcommand, Debug)]
pub enum FnCommand {
    /// lambda(f) for a functional given by weighted atoms
    Eval {
        /// Functional JSON {domain, n, atoms: [[[coords...], weight], ...]}
        #[arg(long)]
        functional: PathBuf,
        /// poly:c0,c1,..., sin:k, cos:k, abs, exp or const:c, applied per coordinate
        #[arg(long)]
        f: FnSpec,
    },
    /// Convolution of two functionals on the same group
    Conv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Fourier transform at one or more frequencies
    Fourier {
        #[arg(long)]
        functional: PathBuf,
        /// Frequency as a comma list of coordinates; repeatable
        #[arg(long, required = true, allow_hyphen_values = true)]
        w: Vec<String>,
    },
    /// Distance of a sequence from a limit on seeded random tent functions
    Weak {
        /// Sequence members, in order
        #[arg(long, required = true, num_args = 1..)]
        seq: Vec<PathBuf>,
        #[arg(long)]
        limit: PathBuf,
        /// Number of random test functions
        #[arg(long, default_value_t = 16)]
        tests: usize,
    },
}

impl FnCommand {
    pub fn name(&self) -> &'static str {
        match self {
            FnCommand::Eval { .. } => "fn eval",
            FnCommand::Conv { .. } => "fn conv",
            FnCommand::Fourier { .. } => "fn fourier",
            FnCommand::Weak { .. } => "fn weak",
        }
    }
}

fn load(report: &mut Report, path: &Path) -> Result<DiscreteFunctional> {
    let text = report.read(path)?;
    input::json(&text, &path.display().to_string())
}

/// Tent `max(0, 1 - |p - c| / r)` around `c`.
struct Tent {
    center: Vec<f64>,
    radius: f64,
}

impl Tent {
    fn eval(&self, p: &[f64]) -> f64 {
        let d = p
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        (1.0 - d / self.radius).max(0.0)
    }
}

fn random_tents(rng: &mut ChaCha8Rng, all: &[&DiscreteFunctional], count: usize) -> Vec<Tent> {
    let dim = all[0].domain().dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for lam in all {
        for (p, _) in lam.atoms() {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    if lo[0] > hi[0] {
        lo.fill(0.0);
        hi.fill(1.0);
    }
    let span = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max).max(1.0);
    (0..count)
        .map(|_| Tent {
            center: lo
                .iter()
                .zip(&hi)
                .map(|(&a, &b)| if a < b { rng.gen_range(a..=b) } else { a })
                .collect(),
            radius: span * rng.gen_range(0.05..0.5),
        })
        .collect()
}

pub fn run(report: &mut Report, cmd: FnCommand, seed: u64) -> Result<Value> {
    match cmd {
        FnCommand::Eval { functional, f } => {
            let lam = load(report, &functional)?;
            report.param("functional", functional.display().to_string());
            report.param("f", f.to_string());
            let value = evaluate(&lam, |p| f.eval_point(p))?;
            Ok(json!({ "value": value, "total_mass": lam.total_mass() }))
        }
        FnCommand::Conv { a, b } => {
            let l1 = load(report, &a)?;
            let l2 = load(report, &b)?;
            report.param("a", a.display().to_string());
            report.param("b", b.display().to_string());
            Ok(serde_json::to_value(convolve(&l1, &l2)?.merged())?)
        }
        FnCommand::Fourier { functional, w } => {
            let lam = load(report, &functional)?;
            report.param("functional", functional.display().to_string());
            let freqs = w.iter().map(|s| input::number_list(s)).collect::<Result<Vec<_>>>()?;
            report.param("w", &freqs);
            let mut table = Table::new(vec!["w", "re", "im", "abs"]);
            let mut values = Vec::new();
            for f in &freqs {
                let v = fourier(&lam, f)?;
                let w_text: Vec<String> = f.iter().map(|x| num(*x)).collect();
                table.push(vec![
                    w_text.join(";"),
                    num(v.value.re),
                    num(v.value.im),
                    num(v.value.norm()),
                ]);
                values.push(v);
            }
            report.table = Some(table);
            Ok(json!({ "values": values }))
        }
        FnCommand::Weak { seq, limit, tests } => {
            if tests == 0 {
                bail!("--tests must be at least 1");
            }
            let members = seq.iter().map(|p| load(report, p)).collect::<Result<Vec<_>>>()?;
            let lam = load(report, &limit)?;
            report.param("seq", seq.iter().map(|p| p.display().to_string()).collect::<Vec<_>>());
            report.param("limit", limit.display().to_string());
            report.param("tests", tests);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let all: Vec<&DiscreteFunctional> = members.iter().chain([&lam]).collect();
            let tents = random_tents(&mut rng, &all, tests);
            let closures: Vec<_> = tents.iter().map(|t| move |p: &[f64]| t.eval(p)).collect();
            let refs: Vec<TestFn<'_>> = closures.iter().map(|c| c as TestFn<'_>).collect();
            let gaps = weak_convergence_check(&members, &lam, &refs)?;
            let mut table = Table::new(vec!["j", "max_gap"]);
            for (j, g) in gaps.iter().enumerate() {
                table.push(vec![j.to_string(), num(*g)]);
            }
            report.table = Some(table);
            let tents: Vec<Value> = tents
                .iter()
                .map(|t| json!({ "center": t.center, "radius": t.radius }))
                .collect();
            Ok(json!({ "max_gap": gaps, "tests": tents }))
        }
    }
}
