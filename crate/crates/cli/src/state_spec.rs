//! `--state` values: `phi-plus[:phase_deg]`, `werner:V`, `file:<path>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use qrng_core::quantum::{bell_phi_plus, werner};
use qrng_core::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    PhiPlus { phase_deg: f64 },
    Werner { visibility: f64 },
    File(PathBuf),
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        Ok(match self {
            StateSpec::PhiPlus { phase_deg } => bell_phi_plus(*phase_deg)?,
            StateSpec::Werner { visibility } => werner(*visibility)?,
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading state file {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing state file {}", path.display()))?
            }
        })
    }
}

impl FromStr for StateSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>, what: &str| -> Result<f64> {
            let a = a.with_context(|| format!("`{kind}` needs {what}"))?;
            let v: f64 = a.parse().with_context(|| format!("`{a}` is not a number"))?;
            if !v.is_finite() {
                bail!("{what} must be finite");
            }
            Ok(v)
        };
        match kind {
            "phi-plus" => Ok(StateSpec::PhiPlus {
                phase_deg: if arg.is_some() { number(arg, "a phase in degrees")? } else { 0.0 },
            }),
            "werner" => {
                let visibility = number(arg, "a visibility")?;
                if !(0.0..=1.0).contains(&visibility) {
                    bail!("visibility must lie in [0, 1] (got {visibility})");
                }
                Ok(StateSpec::Werner { visibility })
            }
            "file" => match arg {
                Some(p) if !p.is_empty() => Ok(StateSpec::File(p.into())),
                _ => bail!("`file` needs a path"),
            },
            _ => bail!("unknown state `{s}`; expected phi-plus[:phase], werner:V or file:<path>"),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::PhiPlus { phase_deg } if *phase_deg == 0.0 => write!(f, "phi-plus"),
            StateSpec::PhiPlus { phase_deg } => write!(f, "phi-plus:{phase_deg}"),
            StateSpec::Werner { visibility } => write!(f, "werner:{visibility}"),
            StateSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
