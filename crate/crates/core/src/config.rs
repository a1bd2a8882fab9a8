//! JSON descriptions of problems and parameter families.
//!
//! ```json
//! { "domain": [0, 1],
//!   "kernel": { "kind": "cos-arctan", "c1": 2, "c2": 1 },
//!   "forcing": { "type": "endpoints",
//!                "lower": { "poly": [0.125, 2] },
//!                "upper": { "poly": [0.375, 2] } } }
//! ```
//!
//! A family file replaces the fixed kernel with `"kernel": "<kind>"` and a
//! `"box"` of parameter bounds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::inverse::{manufacture_forcing, ParamFamily};
use crate::ivfun::{Domain, GridFun, IvFun1D};
use crate::volterra::{Kernel, KernelKind, VolterraProblem};

fn unit() -> Domain {
    Domain::UNIT
}

fn default_manufacture_level() -> u32 {
    crate::scenarios::MANUFACTURE_LEVEL
}

/// `Σ poly[i] tⁱ + cos · cos t + sin · sin t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    #[serde(default)]
    pub poly: Vec<f64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        let p = self.poly.iter().rev().fold(0.0, |acc, c| acc * t + c);
        p + self.cos * t.cos() + self.sin * t.sin()
    }

    fn validate(&self) -> Result<()> {
        if self
            .poly
            .iter()
            .chain([&self.cos, &self.sin])
            .all(|c| c.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Format("non-finite profile coefficient".into()))
        }
    }
}

/// Endpoint profiles of an interval-valued function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointProfiles {
    pub lower: Profile,
    pub upper: Profile,
}

impl EndpointProfiles {
    pub fn build(&self, domain: Domain) -> Result<IvFun1D> {
        self.lower.validate()?;
        self.upper.validate()?;
        let (lo, hi) = (self.lower.clone(), self.upper.clone());
        Ok(IvFun1D::analytic(
            domain,
            move |t| lo.eval(t),
            move |t| hi.eval(t),
        ))
    }
}

/// Where the forcing `G` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingSpec {
    /// Closed-form endpoints.
    Endpoints { lower: Profile, upper: Profile },
    /// `G` chosen so that `solution` solves the equation with `kernel`.
    Manufactured {
        solution: EndpointProfiles,
        kernel: Kernel,
        #[serde(default = "default_manufacture_level")]
        level: u32,
    },
    /// A `t,lower,upper` CSV, relative to the config file.
    Table { path: PathBuf },
}

impl ForcingSpec {
    pub fn build(&self, domain: Domain, base_dir: &Path) -> Result<IvFun1D> {
        match self {
            ForcingSpec::Endpoints { lower, upper } => EndpointProfiles {
                lower: lower.clone(),
                upper: upper.clone(),
            }
            .build(domain),
            ForcingSpec::Manufactured {
                solution,
                kernel,
                level,
            } => {
                let exact = solution.build(domain)?;
                Ok(manufacture_forcing(&exact, *kernel, *level)?.into())
            }
            ForcingSpec::Table { path } => {
                let full = base_dir.join(path);
                let file = std::fs::File::open(&full)
                    .map_err(|e| Error::Format(format!("{}: {e}", full.display())))?;
                let g = GridFun::read_csv(file)?;
                if g.domain() != domain {
                    return Err(Error::Format(format!(
                        "{} covers {:?}, expected {:?}",
                        full.display(),
                        g.domain(),
                        domain
                    )));
                }
                Ok(g.into())
            }
        }
    }
}

/// A single equation `X = G + ∫ K(·, s, X(s)) ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "unit")]
    pub domain: Domain,
    pub kernel: Kernel,
    pub forcing: ForcingSpec,
}

impl ProblemFile {
    pub fn build(&self, base_dir: &Path) -> Result<VolterraProblem> {
        let kernel = Kernel::new(self.kernel.kind, self.kernel.c1, self.kernel.c2)?;
        Ok(VolterraProblem::new(
            self.forcing.build(self.domain, base_dir)?,
            kernel,
        ))
    }
}

/// A family with kernel coefficients ranging over `bounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    #[serde(default = "unit")]
    pub domain: Domain,
    pub kernel: KernelKind,
    #[serde(rename = "box")]
    pub bounds: Vec<Interval>,
    pub forcing: ForcingSpec,
}

impl FamilyFile {
    pub fn build(&self, base_dir: &Path) -> Result<ParamFamily> {
        ParamFamily::new(
            self.kernel,
            self.bounds.clone(),
            self.forcing.build(self.domain, base_dir)?,
        )
    }
}

/// Reads and parses a JSON file; any failure is a [`Error::Format`].
pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Directory that relative paths inside `path` resolve against.
pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}
