use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use soler_core::analysis::{
    charge, cone_region_check, dq_domega_points, positivity_report, vk_classify_samples, VkVerdict,
};
use soler_core::dirac::{continue_branch, solve_profile_shooting, ShootingOptions, SolverOptions};
use soler_core::groundstate::{
    decay_constants, groundstate_residual, hat_pair, solve_groundstate, GroundstateOptions,
    GroundstateProfile,
};
use soler_core::model::{DiracProfile, HatPair};
use soler_core::verify::{run_criterion, CriterionResult, Suite};

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{check_schema, csv, ensure_finite, json, write_atomic, SCHEMA_VERSION};

const DECAY_WINDOW: (f64, f64) = (5.0, 15.0);
const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn groundstate(cfg: &RunConfig) -> Result<(GroundstateProfile, HatPair), Failure> {
    let grid = cfg.grid()?;
    let gs = solve_groundstate(cfg.n, cfg.k, cfg.m, &grid, &GroundstateOptions::default())?;
    let hat = hat_pair(&gs, &grid)?;
    Ok((gs, hat))
}

fn profile_csv(p: &DiracProfile, hat: &HatPair) -> Result<String, Failure> {
    let header = ["t", "V", "U", "Vhat", "Uhat", "tildeV", "tildeU"];
    let rows = (0..p.grid().n_points()).map(|i| {
        vec![
            p.grid().node(i),
            p.v.values()[i],
            p.u.values()[i],
            hat.vhat.values()[i],
            hat.uhat.values()[i],
            p.tilde_v.values()[i],
            p.tilde_u.values()[i],
        ]
    });
    csv(&header, rows)
}

#[derive(Debug, Serialize)]
struct DecaySummary {
    t_lo: f64,
    t_hi: f64,
    c: f64,
    #[serde(rename = "C")]
    big_c: f64,
}

#[derive(Debug, Serialize)]
struct GroundstateSummary {
    schema_version: &'static str,
    n: usize,
    k: f64,
    m: f64,
    u0: f64,
    residual: f64,
    decay: Option<DecaySummary>,
    csv: PathBuf,
}

pub fn cmd_groundstate(cfg: &RunConfig) -> Result<String, Failure> {
    cfg.validate_model()?;
    let (gs, _) = groundstate(cfg)?;
    let rows = (0..gs.u.len()).map(|i| vec![gs.grid.node(i), gs.u[i], gs.du[i]]);
    let table = csv(&["r", "u", "du"], rows)?;
    let decay = if gs.grid.t_max() >= DECAY_WINDOW.1 {
        let (c, big_c) = decay_constants(&gs, DECAY_WINDOW.0, DECAY_WINDOW.1)?;
        Some(DecaySummary {
            t_lo: DECAY_WINDOW.0,
            t_hi: DECAY_WINDOW.1,
            c,
            big_c,
        })
    } else {
        None
    };
    let residual = groundstate_residual(&gs);
    let mut checks = vec![gs.u0, residual];
    if let Some(d) = &decay {
        checks.extend([d.c, d.big_c]);
    }
    ensure_finite("groundstate summary", &checks)?;
    write_atomic(&cfg.output.groundstate_csv, &table)?;
    json(&GroundstateSummary {
        schema_version: SCHEMA_VERSION,
        n: cfg.n,
        k: cfg.k,
        m: cfg.m,
        u0: gs.u0,
        residual,
        decay,
        csv: cfg.output.groundstate_csv.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub eps: f64,
    pub omega: f64,
    #[serde(rename = "Q")]
    pub charge: f64,
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    pub norm_tilde_weighted: f64,
    pub iterations: usize,
    pub residual: f64,
    pub positivity_pass: bool,
    pub cone_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub eps: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDocument {
    pub schema_version: String,
    pub code_version: String,
    pub config: RunConfig,
    pub truncated: bool,
    pub failure: Option<TruncationRecord>,
    pub points: Vec<PointRecord>,
}

/// Returns the stdout report and whether the branch ran to the end.
pub fn cmd_branch(cfg: &RunConfig) -> Result<(String, bool), Failure> {
    cfg.validate_branch()?;
    let nl = cfg.nonlinearity()?;
    let (_, hat) = groundstate(cfg)?;
    let branch = continue_branch(
        &cfg.eps_schedule.values(),
        &hat,
        &nl,
        &SolverOptions::default(),
        cfg.gamma,
    )?;
    let t1 = (2.0 * cfg.n as f64).max(5.0);
    let mut points = Vec::with_capacity(branch.len());
    for (p, point) in branch.profiles.iter().zip(&branch.points) {
        let record = PointRecord {
            eps: point.eps,
            omega: point.omega,
            charge: point.charge,
            energy: point.energy,
            norm_tilde_weighted: point.norm_tilde_weighted,
            iterations: point.iterations,
            residual: point.residual,
            positivity_pass: positivity_report(p).pass,
            cone_pass: cone_region_check(p, t1).unwrap_or(false),
        };
        let mut values = vec![
            record.eps,
            record.omega,
            record.charge,
            record.norm_tilde_weighted,
            record.residual,
        ];
        values.extend(record.energy);
        ensure_finite("branch record", &values)?;
        points.push(record);
    }
    if let Some(dir) = &cfg.output.profiles_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Invalid(format!("cannot create {}: {e}", dir.display())))?;
        for (i, p) in branch.profiles.iter().enumerate() {
            write_atomic(
                &dir.join(format!("profile_{i:03}.csv")),
                &profile_csv(p, &hat)?,
            )?;
        }
    }
    let failure = branch
        .failure
        .clone()
        .map(|(eps, reason)| TruncationRecord { eps, reason });
    let complete = failure.is_none();
    let doc = BranchDocument {
        schema_version: SCHEMA_VERSION.into(),
        code_version: CODE_VERSION.into(),
        config: cfg.clone(),
        truncated: !complete,
        failure,
        points,
    };
    write_atomic(&cfg.output.branch_json, &json(&doc)?)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: &'static str,
        points: usize,
        truncated: bool,
        failure: &'a Option<TruncationRecord>,
        json: &'a Path,
    }
    let report = json(&Summary {
        schema_version: SCHEMA_VERSION,
        points: doc.points.len(),
        truncated: doc.truncated,
        failure: &doc.failure,
        json: &cfg.output.branch_json,
    })?;
    Ok((report, complete))
}

#[derive(Debug, Serialize)]
struct ChargeCurveSummary {
    schema_version: &'static str,
    verdict: VkVerdict,
    csv: PathBuf,
}

pub fn cmd_charge_curve(branch_path: &Path, output: Option<&Path>) -> Result<String, Failure> {
    let text = std::fs::read_to_string(branch_path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", branch_path.display())))?;
    let doc: BranchDocument = serde_json::from_str(&text).map_err(|e| {
        Failure::Invalid(format!(
            "malformed branch file {}: {e}",
            branch_path.display()
        ))
    })?;
    check_schema(&doc.schema_version)?;
    let cfg = &doc.config;
    cfg.validate_model()?;
    let nl = cfg.nonlinearity()?;
    let mut samples: Vec<(f64, f64)> = doc.points.iter().map(|p| (p.omega, p.charge)).collect();
    let derivs = dq_domega_points(&mut samples)?;
    let verdict = vk_classify_samples(&nl, cfg.n, cfg.m, &samples)?;
    let rows = samples
        .iter()
        .zip(&derivs)
        .map(|(&(w, q), &(_, d))| vec![w, q, d]);
    let table = csv(&["omega", "Q", "dQ_domega"], rows)?;
    let path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.charge_curve_csv.clone());
    write_atomic(&path, &table)?;
    json(&ChargeCurveSummary {
        schema_version: SCHEMA_VERSION,
        verdict,
        csv: path,
    })
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    schema_version: &'static str,
    suite: String,
    pass: bool,
    criteria: Vec<CriterionResult>,
}

/// Returns the report and whether every selected criterion passed.
pub fn cmd_verify(suite: &str, as_json: bool) -> Result<(String, bool), Failure> {
    let suite: Suite = suite.parse()?;
    let mut results = Vec::new();
    for id in suite.criteria() {
        let mut r = run_criterion(id)?;
        if let Some(bad) = r.measurements.iter().find(|m| !m.value.is_finite()) {
            r.pass = false;
            r.detail = format!("{}; non-finite measurement {}", r.detail, bad.name);
        }
        results.push(r);
    }
    let pass = results.iter().all(|r| r.pass);
    let report = if as_json {
        json(&VerifyReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            pass,
            criteria: results,
        })?
    } else {
        results.iter().map(|r| r.summary_line() + "\n").collect()
    };
    Ok((report, pass))
}

#[derive(Debug, Serialize)]
struct ShootSummary {
    schema_version: &'static str,
    eps: f64,
    omega: f64,
    v0: f64,
    bisection_steps: usize,
    residual: f64,
    charge: f64,
    csv: PathBuf,
}

pub fn cmd_oracle_shoot(cfg: &RunConfig, eps: f64) -> Result<String, Failure> {
    cfg.validate_model()?;
    if !(eps > 0.0 && eps < cfg.m) {
        return Err(Failure::Invalid(format!(
            "eps = {eps} must lie in (0, m = {})",
            cfg.m
        )));
    }
    let nl = cfg.nonlinearity()?;
    let (_, hat) = groundstate(cfg)?;
    let p = solve_profile_shooting(eps, &hat, &nl, &ShootingOptions::default())?;
    let summary = ShootSummary {
        schema_version: SCHEMA_VERSION,
        eps,
        omega: p.omega,
        v0: p.v.values()[0],
        bisection_steps: p.iterations,
        residual: p.residual,
        charge: charge(&p),
        csv: cfg.output.profile_csv.clone(),
    };
    ensure_finite(
        "shooting summary",
        &[summary.v0, summary.residual, summary.charge],
    )?;
    write_atomic(&cfg.output.profile_csv, &profile_csv(&p, &hat)?)?;
    json(&summary)
}
