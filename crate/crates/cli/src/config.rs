use std::collections::BTreeSet;

use anyhow::{bail, Context, Result};
use dwork_core::dwork::SpecDocument;
use dwork_core::padic::{default_digit_count, PAdicExponent};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[serde(rename = "classical_L")]
    ClassicalL,
    #[serde(rename = "unit_root_L")]
    UnitRootL,
    #[serde(rename = "L_s")]
    Ls,
    VerifyTraceFormula,
    VerifyDeltaStructure,
    VerifyMomentProduct,
    VerifySplitting,
    VerifyContinuity,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::ClassicalL => "classical_L",
            Task::UnitRootL => "unit_root_L",
            Task::Ls => "L_s",
            Task::VerifyTraceFormula => "verify_trace_formula",
            Task::VerifyDeltaStructure => "verify_delta_structure",
            Task::VerifyMomentProduct => "verify_moment_product",
            Task::VerifySplitting => "verify_splitting",
            Task::VerifyContinuity => "verify_continuity",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub u: Vec<usize>,
    /// Packed element of `F_q`.
    pub c: u32,
}

/// `kappa` as an integer, a decimal string, a list of base-`p` digits, or an
/// eventually periodic digit expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaConfig {
    Integer(i64),
    Text(String),
    Digits(Vec<u32>),
    Periodic {
        #[serde(default)]
        head: Vec<u32>,
        period: Vec<u32>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxConfig {
    Auto(String),
    Fixed(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum SplittingConfig {
    Theta,
    /// `alpha = sum alpha_digits[k] pi^k`, a 1-unit in `Z_p[pi]`.
    Generic { alpha_digits: Vec<u64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    p: Option<u64>,
    #[serde(default)]
    a: Option<usize>,
    n: Option<usize>,
    f: Option<Vec<TermConfig>>,
    sigma_module: Option<SpecDocument>,
    kappa: Option<KappaConfig>,
    #[serde(rename = "N_pi")]
    n_pi: u32,
    #[serde(rename = "T_degree")]
    t_degree: usize,
    #[serde(rename = "box", default)]
    box_size: Option<BoxConfig>,
    tasks: Vec<Task>,
    #[serde(default)]
    slack: Option<u32>,
    #[serde(default)]
    splitting: Option<SplittingConfig>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Polynomial(Vec<TermConfig>),
    SigmaModule(SpecDocument),
}

/// A validated job with every default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct JobConfig {
    pub p: u64,
    pub a: usize,
    pub n: usize,
    pub input: Input,
    pub kappa: KappaConfig,
    #[serde(rename = "N_pi")]
    pub n_pi: u32,
    #[serde(rename = "T_degree")]
    pub t_degree: usize,
    /// `None` for the automatic box.
    #[serde(rename = "box")]
    pub box_size: Option<usize>,
    pub tasks: Vec<Task>,
    pub slack: u32,
    pub splitting: SplittingConfig,
}

pub const DEFAULT_SLACK: u32 = 4;

pub fn parse_config(text: &str) -> Result<JobConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("schema violation at {path}: {}", e.into_inner())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<JobConfig> {
    let (p, a, n, input) = match (raw.f, raw.sigma_module) {
        (Some(_), Some(_)) => bail!("schema violation: give exactly one of f and sigma_module"),
        (None, None) => bail!("schema violation: one of f and sigma_module is required"),
        (Some(terms), None) => {
            let p = raw.p.context("schema violation at p: required with f")?;
            let n = raw.n.context("schema violation at n: required with f")?;
            let a = raw.a.unwrap_or(1);
            let q = p.checked_pow(a as u32).context("schema violation at a: field too large")?;
            for (k, t) in terms.iter().enumerate() {
                if t.u.len() != n {
                    bail!("schema violation at f[{k}].u: length {} differs from n = {n}", t.u.len());
                }
                if t.c as u64 >= q {
                    bail!("inconsistent coefficient at f[{k}].c: {} is not an element of F_{q}", t.c);
                }
            }
            (p, a, n, Input::Polynomial(terms))
        }
        (None, Some(doc)) => {
            for (field, given, expected) in [("p", raw.p.map(|x| x as usize), doc.p as usize), ("a", raw.a, doc.a), ("n", raw.n, doc.n)] {
                if given.is_some_and(|g| g != expected) {
                    bail!("inconsistent {field}: job says {}, sigma_module says {expected}", given.unwrap());
                }
            }
            (doc.p, doc.a, doc.n, Input::SigmaModule(doc))
        }
    };
    if n == 0 {
        bail!("schema violation at n: at least one variable is required");
    }
    if raw.t_degree == 0 {
        bail!("schema violation at T_degree: must be at least 1");
    }
    let slack = raw.slack.unwrap_or(DEFAULT_SLACK);
    if (raw.n_pi as usize) < raw.t_degree + slack as usize {
        bail!(
            "inconsistent precision: N_pi = {} is below T_degree + slack = {}",
            raw.n_pi,
            raw.t_degree + slack as usize
        );
    }
    if raw.tasks.is_empty() {
        bail!("schema violation at tasks: no tasks requested");
    }
    let box_size = match raw.box_size {
        None => None,
        Some(BoxConfig::Fixed(u)) => Some(u),
        Some(BoxConfig::Auto(s)) if s == "auto" => None,
        Some(BoxConfig::Auto(s)) => bail!("schema violation at box: expected \"auto\" or an integer, got {s:?}"),
    };
    let kappa = raw.kappa.unwrap_or(KappaConfig::Integer(1));
    let job = JobConfig {
        p,
        a,
        n,
        input,
        kappa,
        n_pi: raw.n_pi,
        t_degree: raw.t_degree,
        box_size,
        tasks: raw.tasks.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
        slack,
        splitting: raw.splitting.unwrap_or(SplittingConfig::Theta),
    };
    job.kappa_exponent().context("schema violation at kappa")?;
    Ok(job)
}

impl JobConfig {
    pub fn kappa_exponent(&self) -> Result<PAdicExponent> {
        let p = self.p as u32;
        let len = default_digit_count(p, self.n_pi);
        Ok(match &self.kappa {
            KappaConfig::Integer(v) => PAdicExponent::from_i64(p, *v, len),
            KappaConfig::Text(s) => {
                let v: BigInt = s.trim().parse().with_context(|| format!("{s:?} is not an integer"))?;
                PAdicExponent::from_integer(p, &v, len)
            }
            KappaConfig::Digits(d) => PAdicExponent::from_finite_digits(p, d, len)?,
            KappaConfig::Periodic { head, period } => PAdicExponent::periodic(p, head, period, len)?,
        })
    }
}
