//! Configuration, commands and reports behind the `jetphase` binary.
//!
//! A run is described by one JSON document ([`RunConfig`]); `integrate` writes
//! one CSV per initial point plus `summary.json`, `audit` writes a JSON report
//! of structure and symmetry residuals with a PASS/FAIL verdict per row.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogModel};
use crate::dynamics::{duality_residuals, nondegeneracy, omega_closure_residual};
use crate::fields::Constants;
use crate::momentum::{charge_drift, momentum_map, momentum_residual, SymmetryAlgebra};
use crate::motion::{integrate_many, IntegratorOptions, Termination, Trajectory};
use crate::phase::PhasePoint;
use crate::symmetry::{
    bracket_homomorphism_residual, is_killing, self_holonomy_residual, AffineField, AffineScalar, SpecialPhaseFunction,
};
use crate::{Error, Mat4, Vec3, Vec4};

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn numeric(e: Error) -> CliError {
    CliError::Numeric(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spacetime: SpacetimeConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub initial_points: Vec<InitialPoint>,
    /// `[start, end]` of the coordinate time; the start is the x⁰ of every initial point.
    #[serde(default)]
    pub x0_range: Option<[f64; 2]>,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorOptions,
    /// Catalog generator names or inline affine fields; defaults to the whole catalog algebra.
    #[serde(default)]
    pub symmetries: Option<Vec<SymmetrySpec>>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Number of random probe points for `audit` and for fitting structure constants.
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_integrator() -> IntegratorOptions {
    IntegratorOptions::Rk4 { step: 1e-3 }
}

fn default_probes() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpacetimeConfig {
    Minkowski {},
    ReissnerNordstrom {
        k_s: f64,
        k_q: f64,
        q0: f64,
        /// Keep the field strength but drop the potential.
        #[serde(default)]
        omit_potential: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub m: f64,
    pub q: f64,
    pub c: f64,
    pub hbar: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let k = Constants::natural();
        ConstantsConfig { m: k.m, q: k.q, c: k.c, hbar: k.hbar }
    }
}

/// Spatial position `x¹..x³` and velocity `x¹₀..x³₀`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialPoint {
    pub x: [f64; 3],
    pub v: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SymmetrySpec {
    Catalog(String),
    Inline(InlineSymmetry),
}

/// `X^λ = constant[λ] + linear[λ][μ] x^μ` with `f̆ = scalar.constant + scalar.gradient · x`.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSymmetry {
    pub name: String,
    #[serde(default)]
    pub constant: [f64; 4],
    #[serde(default)]
    pub linear: [[f64; 4]; 4],
    #[serde(default)]
    pub scalar: Option<InlineScalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InlineScalar {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub gradient: [f64; 4],
}

/// Tolerance names and defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 8] = [
    ("duality", 1e-9),
    ("closure", 1e-6),
    ("nondegeneracy", 1e-6),
    ("killing", 1e-10),
    ("self_holonomy", 1e-9),
    ("momentum", 1e-8),
    ("homomorphism", 1e-6),
    ("drift", 1e-8),
];

/// Reads and parses a config file, reporting the line, column and field of a schema error.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}:{m}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        CliError::Config(format!(" field `{}`: {}", e.path(), e.inner()))
    })?;
    Ok(cfg)
}

/// Merges `tolerances` from the config with `name=value` overrides.
pub fn resolve_tolerances(cfg: &BTreeMap<String, f64>, overrides: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut tol: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let mut set = |name: &str, value: f64, origin: &str| -> CliResult<()> {
        if !tol.contains_key(name) {
            let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|(k, _)| *k).collect();
            return Err(CliError::Config(format!("{origin}: unknown tolerance `{name}` (known: {})", known.join(", "))));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(CliError::Config(format!("{origin}: tolerance `{name}` must be positive, got {value}")));
        }
        tol.insert(name.to_string(), value);
        Ok(())
    };
    for (k, v) in cfg {
        set(k, *v, "tolerances")?;
    }
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--tol `{o}`: expected NAME=VALUE")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("--tol `{o}`: `{v}` is not a number")))?;
        set(k.trim(), v, "--tol")?;
    }
    Ok(tol)
}

/// Worker pool sized by `JETPHASE_THREADS` (all cores when unset).
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let threads = match std::env::var("JETPHASE_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("JETPHASE_THREADS must be a positive integer, got `{s}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

/// A config resolved against the catalog.
pub struct Setup {
    pub catalog: CatalogModel,
    pub symmetries: Vec<SpecialPhaseFunction>,
    pub algebra: SymmetryAlgebra,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub probes: Vec<PhasePoint>,
}

impl Setup {
    pub fn new(cfg: &RunConfig, tol_overrides: &[String], seed: Option<u64>) -> CliResult<Self> {
        let tolerances = resolve_tolerances(&cfg.tolerances, tol_overrides)?;
        let seed = seed.unwrap_or(cfg.seed);
        let k = cfg.constants;
        let constants = Constants::new(k.m, k.q, k.c, k.hbar).map_err(|e| CliError::Config(format!("constants: {e}")))?;
        let mut catalog = match cfg.spacetime {
            SpacetimeConfig::Minkowski {} => catalog::minkowski(constants),
            SpacetimeConfig::ReissnerNordstrom { k_s, k_q, q0, .. } => catalog::reissner_nordstrom(constants, k_s, k_q, q0),
        }
        .map_err(|e| CliError::Config(format!("spacetime: {e}")))?;
        if let SpacetimeConfig::ReissnerNordstrom { omit_potential: true, .. } = cfg.spacetime {
            catalog.model = catalog.model.without_potential();
        }
        let symmetries = match &cfg.symmetries {
            None => catalog.algebra.basis.clone(),
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(i, s)| resolve_symmetry(&catalog, s).map_err(|m| CliError::Config(format!("symmetries[{i}]: {m}"))))
                .collect::<CliResult<Vec<_>>>()?,
        };
        if cfg.probes == 0 {
            return Err(CliError::Config("probes: must be at least 1".into()));
        }
        let probes = catalog.sample_points(seed, cfg.probes).map_err(numeric)?;
        let fit: Vec<Vec4> = catalog.sample_points(seed.wrapping_add(1), 6).map_err(numeric)?.iter().map(|p| p.x).collect();
        let check: Vec<Vec4> = probes.iter().map(|p| p.x).collect();
        let algebra = SymmetryAlgebra::new(symmetries.clone(), &fit, &check).map_err(numeric)?;
        Ok(Setup { catalog, symmetries, algebra, tolerances, seed, probes })
    }

    fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }
}

fn resolve_symmetry(cm: &CatalogModel, s: &SymmetrySpec) -> std::result::Result<SpecialPhaseFunction, String> {
    match s {
        SymmetrySpec::Catalog(name) => cm.basis_index(name).map(|i| cm.algebra.basis[i].clone()).ok_or_else(|| {
            format!("unknown generator `{name}` for {} (known: {})", cm.model.name, cm.algebra.names().join(", "))
        }),
        SymmetrySpec::Inline(f) => {
            let field = AffineField::new(Vec4::from(f.constant), Mat4::from_fn(|r, c| f.linear[r][c]));
            let scalar = f.scalar.map_or(AffineScalar::zero(), |s| AffineScalar {
                constant: s.constant,
                coefficients: Vec4::from(s.gradient),
            });
            Ok(SpecialPhaseFunction::new(f.name.clone(), Arc::new(field), Arc::new(scalar)))
        }
    }
}

/// Per-trajectory entry of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub file: String,
    pub samples: usize,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub drift: BTreeMap<String, f64>,
    pub max_drift: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateSummary {
    pub spacetime: String,
    pub seed: u64,
    pub charges: Vec<String>,
    /// Why the charge columns are missing, if they are.
    pub charges_unavailable: Option<String>,
    pub drift_tolerance: f64,
    pub trajectories: Vec<TrajectorySummary>,
}

fn initial_points(cfg: &RunConfig, setup: &Setup) -> CliResult<(Vec<PhasePoint>, f64)> {
    let [start, end] = cfg.x0_range.ok_or_else(|| CliError::Config("x0_range: required for integrate".into()))?;
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(CliError::Config(format!("x0_range: need start < end, got [{start}, {end}]")));
    }
    if cfg.initial_points.is_empty() {
        return Err(CliError::Config("initial_points: at least one point is required".into()));
    }
    let points = cfg
        .initial_points
        .iter()
        .enumerate()
        .map(|(i, ip)| {
            let x = Vec4::new(start, ip.x[0], ip.x[1], ip.x[2]);
            PhasePoint::new(&setup.catalog.model, x, Vec3::from(ip.v))
                .map_err(|e| CliError::Config(format!("initial_points[{i}]: {e}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((points, end))
}

fn csv_row(p: &PhasePoint, charges: Option<&[f64]>) -> String {
    let mut fields: Vec<String> = p.x.iter().chain(p.v.iter()).map(|v| v.to_string()).collect();
    if let Some(c) = charges {
        fields.extend(c.iter().map(|v| v.to_string()));
    }
    fields.join(",")
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// `integrate`: one CSV per initial point and `summary.json` in `out`.
pub fn cmd_integrate(cfg: &RunConfig, out: &Path, tol_overrides: &[String], seed: Option<u64>) -> CliResult<IntegrateSummary> {
    let pool = thread_pool()?;
    let setup = Setup::new(cfg, tol_overrides, seed)?;
    let (points, end) = initial_points(cfg, &setup)?;
    let model = &setup.catalog.model;
    let results = pool.install(|| integrate_many(model, &points, end, &cfg.integrator));
    let trajs: Vec<Trajectory> = results.into_iter().collect::<crate::Result<_>>().map_err(numeric)?;

    let names = setup.algebra.names();
    let charges_unavailable = match momentum_map(model, &setup.algebra, &points[0]) {
        Err(Error::MissingPotential) => Some(Error::MissingPotential.to_string()),
        Err(e) => return Err(numeric(e)),
        Ok(_) => None,
    };
    fs::create_dir_all(out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let tol = setup.tol("drift");
    let summaries: Vec<TrajectorySummary> = pool.install(|| {
        trajs
            .par_iter()
            .enumerate()
            .map(|(i, t)| -> CliResult<TrajectorySummary> {
                let file = format!("trajectory_{i:03}.csv");
                let mut header = "x0,x1,x2,x3,v1,v2,v3".to_string();
                let mut drift = BTreeMap::new();
                let mut rows = Vec::with_capacity(t.points.len());
                if charges_unavailable.is_none() {
                    for n in &names {
                        header.push(',');
                        header.push_str(n);
                    }
                    for p in &t.points {
                        let j = momentum_map(model, &setup.algebra, p).map_err(numeric)?;
                        rows.push(csv_row(p, Some(j.as_slice())));
                    }
                    let d = charge_drift(model, &setup.algebra, t).map_err(numeric)?;
                    drift = names.iter().cloned().zip(d.iter().copied()).collect();
                } else {
                    rows.extend(t.points.iter().map(|p| csv_row(p, None)));
                }
                let mut text = header;
                text.push('\n');
                for r in rows {
                    text.push_str(&r);
                    text.push('\n');
                }
                write_file(&out.join(&file), &text)?;
                let max_drift = drift.values().copied().reduce(f64::max);
                let status = if max_drift.is_none_or(|d| d < tol) { "PASS" } else { "FAIL" };
                Ok(TrajectorySummary {
                    file,
                    samples: t.points.len(),
                    termination: t.termination.clone(),
                    accepted_steps: t.accepted_steps,
                    rejected_steps: t.rejected_steps,
                    drift,
                    max_drift,
                    status: status.into(),
                })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let summary = IntegrateSummary {
        spacetime: model.name.clone(),
        seed: setup.seed,
        charges: if charges_unavailable.is_none() { names } else { Vec::new() },
        charges_unavailable,
        drift_tolerance: tol,
        trajectories: summaries,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&out.join("summary.json"), &(json + "\n"))?;
    Ok(summary)
}

/// One line of the audit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub check: String,
    pub subject: String,
    /// Worst value over the probes; `None` when the check could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: f64,
    /// `max`: the value must not exceed the tolerance; `min`: it must exceed it.
    pub bound: String,
    pub status: String,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spacetime: String,
    pub seed: u64,
    pub probes: usize,
    pub passed: usize,
    pub failed: usize,
    pub rows: Vec<AuditRow>,
}

fn max_row(check: &str, subject: &str, value: crate::Result<f64>, tol: f64) -> CliResult<AuditRow> {
    let (value, diagnostic) = match value {
        Ok(v) => (Some(v), None),
        Err(Error::MissingPotential) => (None, Some(format!("MissingPotential: {}", Error::MissingPotential))),
        Err(e) => return Err(numeric(e)),
    };
    let pass = value.is_some_and(|v| v <= tol);
    Ok(AuditRow {
        check: check.into(),
        subject: subject.into(),
        value,
        tolerance: tol,
        bound: "max".into(),
        status: if pass { "PASS" } else { "FAIL" }.into(),
        diagnostic,
    })
}

fn worst<F>(probes: &[PhasePoint], f: F) -> crate::Result<f64>
where
    F: Fn(&PhasePoint) -> crate::Result<f64> + Sync + Send,
{
    let vals = probes.par_iter().map(f).collect::<crate::Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `audit`: structure and symmetry residuals over random probes.
pub fn cmd_audit(cfg: &RunConfig, out: &Path, tol_overrides: &[String], seed: Option<u64>) -> CliResult<AuditReport> {
    let pool = thread_pool()?;
    let setup = Setup::new(cfg, tol_overrides, seed)?;
    let rows = pool.install(|| audit_rows(&setup))?;
    let passed = rows.iter().filter(|r| r.status == "PASS").count();
    let report = AuditReport {
        spacetime: setup.catalog.model.name.clone(),
        seed: setup.seed,
        probes: setup.probes.len(),
        passed,
        failed: rows.len() - passed,
        rows,
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(out, &(json + "\n"))?;
    Ok(report)
}

fn audit_rows(setup: &Setup) -> CliResult<Vec<AuditRow>> {
    let model = &setup.catalog.model;
    let probes = &setup.probes;
    let mut rows = Vec::new();

    let duals = probes.par_iter().map(|p| duality_residuals(model, p)).collect::<crate::Result<Vec<_>>>().map_err(numeric)?;
    let tol = setup.tol("duality");
    for (name, get) in [
        ("r1", (|d: &crate::dynamics::DualityResiduals| d.r1) as fn(&crate::dynamics::DualityResiduals) -> f64),
        ("r2", |d| d.r2),
        ("r3", |d| d.r3),
        ("r4", |d| d.r4),
    ] {
        rows.push(max_row("duality", name, Ok(duals.iter().map(get).fold(0.0, f64::max)), tol)?);
    }
    rows.push(max_row("closure", "dOmega", worst(probes, |p| omega_closure_residual(model, p)), setup.tol("closure"))?);

    let nd = probes
        .par_iter()
        .map(|p| nondegeneracy(model, p).map(|n| n.full.abs()))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(numeric)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let tol = setup.tol("nondegeneracy");
    rows.push(AuditRow {
        check: "nondegeneracy".into(),
        subject: "tau_hat^Omega^3".into(),
        value: Some(nd),
        tolerance: tol,
        bound: "min".into(),
        status: if nd > tol { "PASS" } else { "FAIL" }.into(),
        diagnostic: None,
    });

    let xs: Vec<Vec4> = probes.iter().map(|p| p.x).collect();
    for f in &setup.symmetries {
        let tol = setup.tol("killing");
        let k = is_killing(model, f.field.as_ref(), &xs, tol).map(|r| r.metric.max(r.em));
        rows.push(max_row("killing", &f.name, k, tol)?);
        let sh = worst(probes, |p| self_holonomy_residual(model, f, p));
        rows.push(max_row("self_holonomy", &f.name, sh, setup.tol("self_holonomy"))?);
        let mr = worst(probes, |p| momentum_residual(model, f.field.clone(), p));
        rows.push(max_row("momentum", &f.name, mr, setup.tol("momentum"))?);
    }
    let tol = setup.tol("homomorphism");
    for (i, f) in setup.symmetries.iter().enumerate() {
        for h in &setup.symmetries[i + 1..] {
            let r = worst(probes, |p| bracket_homomorphism_residual(model, f, h, p));
            rows.push(max_row("homomorphism", &format!("{},{}", f.name, h.name), r, tol)?);
        }
    }
    Ok(rows)
}
