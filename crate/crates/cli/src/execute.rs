use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use dwork_core::dwork::{
    build_frobenius_series, classical_l, fredholm_determinant, generic_splitting, l_from_fredholm, splitting_defect,
    theta_splitting, trace_formula_check, BlockOperator, FiberEvaluator, SigmaModuleSpec, SplittingFunction,
    TorusPolynomial,
};
use dwork_core::moment::{moment_l_euler, operator_limit_check, unit_root_l_euler, MomentFamily};
use dwork_core::padic::{PAdicExponent, RingElement, RingTower};
use dwork_core::series::TSeries;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Input, JobConfig, SplittingConfig, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Computed,
    Error,
}

/// The first coefficient (or trace, or point) where a comparison fell short.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub label: String,
    pub index: usize,
    pub left: Value,
    pub right: Value,
    pub valuation: u32,
    pub threshold: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub diagnostics: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskReport {
    fn computed(series: Value, diagnostics: Value) -> Self {
        TaskReport {
            status: Status::Computed,
            series: Some(series),
            diagnostics,
            failure: None,
            error: None,
        }
    }

    fn verdict(failure: Option<Failure>, diagnostics: Value) -> Self {
        TaskReport {
            status: if failure.is_some() { Status::Fail } else { Status::Pass },
            series: None,
            diagnostics,
            failure,
            error: None,
        }
    }

    fn error(message: String) -> Self {
        TaskReport {
            status: Status::Error,
            series: None,
            diagnostics: Value::Null,
            failure: None,
            error: Some(message),
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Fail | Status::Error)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub job: JobConfig,
    pub module: Value,
    pub tasks: BTreeMap<String, TaskReport>,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.tasks.values().any(TaskReport::failed)
    }
}

struct Job<'a> {
    config: &'a JobConfig,
    tower: RingTower,
    spec: SigmaModuleSpec,
    polynomial: Option<TorusPolynomial>,
    theta: SplittingFunction,
    kappa: PAdicExponent,
}

impl Job<'_> {
    fn degree(&self) -> usize {
        self.config.t_degree
    }

    fn n_pi(&self) -> u32 {
        self.config.n_pi
    }

    fn threshold(&self) -> u32 {
        self.n_pi() - self.config.slack
    }

    fn fibers(&self) -> Result<FiberEvaluator<'_>> {
        Ok(FiberEvaluator::new(&self.tower, self.spec.matrix())?)
    }
}

/// Compares two series coefficientwise; `None` when every coefficient agrees to
/// `threshold` or to the precision both sides carry.
fn compare(label: &str, left: &TSeries, right: &TSeries, threshold: u32) -> Result<(u32, Option<Failure>)> {
    let cmp = left.compare(right, threshold)?;
    let failure = cmp.first_failure.map(|k| {
        let diff = left.coeff(k) - right.coeff(k);
        Failure {
            label: label.to_string(),
            index: k,
            left: json!(left.coeff(k)),
            right: json!(right.coeff(k)),
            valuation: diff.val(),
            threshold,
        }
    });
    Ok((cmp.min_valuation, failure))
}

fn build_job(config: &JobConfig) -> Result<Job<'_>> {
    let max_degree = config.t_degree.max(3);
    let tower = RingTower::new(config.p, config.a, max_degree, config.n_pi)?;
    let ctx = tower.base().clone();
    let theta = match &config.splitting {
        SplittingConfig::Theta => theta_splitting(&ctx, None)?,
        SplittingConfig::Generic { alpha_digits } => {
            let alpha = RingElement::from_pi_digits(&ctx, alpha_digits, config.n_pi);
            generic_splitting(&alpha)?
        }
    };
    let (spec, polynomial) = match &config.input {
        Input::Polynomial(terms) => {
            let terms: Vec<(Vec<usize>, u32)> = terms.iter().map(|t| (t.u.clone(), t.c)).collect();
            let f = TorusPolynomial::new(tower.fields().base(), config.n, &terms)?;
            let fa = build_frobenius_series(&f, &theta, None)?;
            (SigmaModuleSpec::rank_one(fa)?, Some(f))
        }
        Input::SigmaModule(doc) => (SigmaModuleSpec::from_document(&ctx, doc)?, None),
    };
    Ok(Job {
        kappa: config.kappa_exponent()?,
        config,
        tower,
        spec,
        polynomial,
        theta,
    })
}

/// Runs every task of a validated job. Tasks run in parallel; the report is keyed
/// by task name so its layout does not depend on scheduling.
pub fn execute(config: &JobConfig) -> Result<Report> {
    let job = build_job(config)?;
    let module = json!({
        "rank": job.spec.rank(),
        "profile": job.spec.profile(),
        "series_box": job.spec.bound(),
        "decay_estimate": job.spec.decay_estimate(),
    });
    let tasks = config
        .tasks
        .par_iter()
        .map(|&task| {
            let report = run_task(&job, task).unwrap_or_else(|e| TaskReport::error(format!("{e:#}")));
            (task.name().to_string(), report)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(Report {
        job: config.clone(),
        module,
        tasks,
    })
}

fn run_task(job: &Job, task: Task) -> Result<TaskReport> {
    let d = job.degree();
    let bound = job.config.box_size;
    match task {
        Task::ClassicalL => {
            let l = match &job.polynomial {
                Some(f) => classical_l(f, &job.theta, d, bound)?,
                None => {
                    let op = BlockOperator::assemble(job.spec.matrix(), job.tower.base().q(), bound)?;
                    l_from_fredholm(&fredholm_determinant(&op, d)?, job.spec.nvars())?
                }
            };
            Ok(TaskReport::computed(json!(l), json!({ "precision": l.precision() })))
        }
        Task::UnitRootL => {
            let l = unit_root_l_euler(&job.fibers()?, &job.kappa, d)?;
            Ok(TaskReport::computed(json!(l), json!({ "kappa_digits": job.kappa.digits() })))
        }
        Task::Ls => {
            let family = MomentFamily::new(&job.spec)?;
            let mut series = serde_json::Map::new();
            let mut congruence = serde_json::Map::new();
            for s in 0..=job.spec.rank() {
                let l = family.l_s(&job.kappa, s, bound, d)?;
                congruence.insert(s.to_string(), json!(l.min_valuation_from(1)));
                series.insert(s.to_string(), json!(l));
            }
            Ok(TaskReport::computed(
                Value::Object(series),
                json!({ "basis_size": family.basis().len(), "min_valuation_beyond_constant": congruence }),
            ))
        }
        Task::VerifyTraceFormula => {
            let max_m = d.min(3);
            let reports = trace_formula_check(job.spec.matrix(), &job.tower, max_m, bound)?;
            let threshold = job.threshold();
            let failure = reports.iter().find(|r| r.difference_valuation < threshold).map(|r| Failure {
                label: "trace formula".into(),
                index: r.m,
                left: json!(r.lhs),
                right: json!(r.rhs),
                valuation: r.difference_valuation,
                threshold,
            });
            let valuations: Vec<u32> = reports.iter().map(|r| r.difference_valuation).collect();
            Ok(TaskReport::verdict(failure, json!({ "difference_valuations": valuations })))
        }
        Task::VerifyDeltaStructure => {
            let family = MomentFamily::new(&job.spec)?;
            let operator = family.l_s(&job.kappa, 0, bound, d)?;
            let euler = moment_l_euler(&job.fibers()?, family.basis(), &job.kappa, 0, d)?;
            let (v, failure) = compare("L^(0): operator vs Euler product", &operator, &euler, job.threshold())?;
            Ok(TaskReport::verdict(failure, json!({ "min_valuation": v, "operator": operator, "euler": euler })))
        }
        Task::VerifyMomentProduct => {
            let family = MomentFamily::new(&job.spec)?;
            let s_max = job.spec.rank();
            let assembled = family.l_unit_assembled(&job.kappa, bound, d, s_max)?;
            let euler = unit_root_l_euler(&job.fibers()?, &job.kappa, d)?;
            let threshold = (s_max as u32).saturating_sub(1).min(job.threshold());
            let (v, failure) = compare("assembled vs Euler product", &assembled, &euler, threshold)?;
            Ok(TaskReport::verdict(
                failure,
                json!({ "s_max": s_max, "threshold": threshold, "min_valuation": v, "assembled": assembled }),
            ))
        }
        Task::VerifySplitting => {
            if job.config.a != 1 {
                bail!("verify_splitting runs over F_p (a = 1)");
            }
            let threshold = job.threshold();
            let mut worst = u32::MAX;
            let mut failure = None;
            for m in 1..=d.min(3) {
                let group = job.tower.fields().field(m)?.order() - 1;
                for log in std::iter::once(None).chain((0..group).map(Some)) {
                    let v = splitting_defect(&job.theta, &job.tower, m, log)?;
                    worst = worst.min(v);
                    if v < threshold && failure.is_none() {
                        failure = Some(Failure {
                            label: format!("splitting identity over F_p^{m}"),
                            index: log.map_or(0, |j| j as usize + 1),
                            left: json!(m),
                            right: json!(log),
                            valuation: v,
                            threshold,
                        });
                    }
                }
            }
            Ok(TaskReport::verdict(failure, json!({ "min_valuation": worst })))
        }
        Task::VerifyContinuity => verify_continuity(job),
    }
}

fn verify_continuity(job: &Job) -> Result<TaskReport> {
    let d = job.degree();
    let fibers = job.fibers()?;
    let base = unit_root_l_euler(&fibers, &job.kappa, d)?;
    let e = job.tower.base().ramification() as u32;
    let p = job.config.p as i64;
    let mut failure = None;
    let mut samples = Vec::new();
    for m in 1..=3u32 {
        let shift = p.checked_pow(m).context("p^m overflows")?;
        let other = unit_root_l_euler(&fibers, &job.kappa.add_i64(shift), d)?;
        let threshold = (e * (m + 1) - 1).min(1 + e * m).min(job.threshold());
        let (v, f) = compare(&format!("kappa vs kappa + p^{m}"), &base, &other, threshold)?;
        samples.push(json!({ "m": m, "min_valuation": v, "threshold": threshold }));
        failure = failure.or(f);
    }
    let family = MomentFamily::new(&job.spec)?;
    let limits = operator_limit_check(family.system(), &job.kappa, &[1, 2, 3], None)?;
    if failure.is_none() {
        failure = limits.iter().find(|s| !s.passed).map(|s| Failure {
            label: "operator limit".into(),
            index: s.m,
            left: json!(s.column),
            right: json!(s.k_m),
            valuation: s.valuation,
            threshold: s.bound,
        });
    }
    let checked = limits.len();
    Ok(TaskReport::verdict(
        failure,
        json!({ "shifts": samples, "operator_limit_samples": checked }),
    ))
}
