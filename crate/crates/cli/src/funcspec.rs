use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Error};

/// A test function given on the command line.
///
/// `poly:c0,c1,...`, `sin:k`, `cos:k`, `abs`, `exp`, `const:c`. On `R^n` the
/// function acts as the product of its values on each coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum FnSpec {
    Poly(Vec<f64>),
    Sin(f64),
    Cos(f64),
    Abs,
    Exp,
    Const(f64),
}

impl FnSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FnSpec::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            FnSpec::Sin(k) => (k * x).sin(),
            FnSpec::Cos(k) => (k * x).cos(),
            FnSpec::Abs => x.abs(),
            FnSpec::Exp => x.exp(),
            FnSpec::Const(c) => *c,
        }
    }

    pub fn eval_point(&self, p: &[f64]) -> f64 {
        p.iter().map(|&x| self.eval(x)).product()
    }
}

fn one_number(arg: Option<&str>, name: &str) -> Result<f64, Error> {
    let arg = arg.ok_or_else(|| anyhow!("{name} needs a parameter, as in {name}:1"))?;
    arg.trim()
        .parse()
        .map_err(|_| anyhow!("{name}: {arg:?} is not a number"))
}

impl FromStr for FnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let spec = match name {
            "poly" => {
                let coeffs = arg
                    .ok_or_else(|| anyhow!("poly needs coefficients, as in poly:0,1"))?
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| anyhow!("poly: {t:?} is not a number"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                FnSpec::Poly(coeffs)
            }
            "sin" => FnSpec::Sin(one_number(arg, "sin")?),
            "cos" => FnSpec::Cos(one_number(arg, "cos")?),
            "const" => FnSpec::Const(one_number(arg, "const")?),
            "abs" | "exp" if arg.is_some() => bail!("{name} takes no parameter"),
            "abs" => FnSpec::Abs,
            "exp" => FnSpec::Exp,
            _ => bail!("unknown function {name:?}; expected poly, sin, cos, abs, exp or const"),
        };
        Ok(spec)
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Poly(c) => {
                let parts: Vec<String> = c.iter().map(f64::to_string).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            FnSpec::Sin(k) => write!(f, "sin:{k}"),
            FnSpec::Cos(k) => write!(f, "cos:{k}"),
            FnSpec::Abs => write!(f, "abs"),
            FnSpec::Exp => write!(f, "exp"),
            FnSpec::Const(c) => write!(f, "const:{c}"),
        }
    }
}
