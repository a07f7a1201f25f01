//! Command-line reports over the degeneration catalogue.

mod text;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use degen_atlas::chamber::{compare_panel, lift_fan, verify_fig5, FAN_PANELS};
use degen_atlas::oracle::{pinned_curves, perturbed, randomized_membership_test, OracleError};
use degen_atlas::relations::{verify_row, verify_table2, RelationError, RELATION_ROWS};
use degen_atlas::roots::{analyse, lattice_row, verify_table1, RootError};
use degen_atlas::surface::{build_model, catalogue, catalogue_model, Component, ModelError, ModelId, SurfaceKind};

pub use text::{flatten, parse_text, render_text};

pub const SCHEMA: &str = "degen-atlas/report/v1";
pub const DEFAULT_SEED: u64 = 2024;
pub const SEED_ENV: &str = "DEGEN_ATLAS_SEED";

#[derive(Parser, Debug)]
#[command(name = "degen-atlas", version, about = "Lattices, period relations and polarization fans of quartic K3 degenerations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Summarise the nine catalogue models.
    List,
    /// Generalized roots of ℒ and their lattice type.
    Roots {
        model: String,
        #[arg(long, default_value_t = 4)]
        bound: u64,
    },
    /// Imposed period relations and certificates for the model's relation rows.
    Relation { model: String },
    /// Wall-and-chamber decomposition of the lifted polarization cone.
    Chambers { model: String },
    /// Build a custom pair from two base surfaces and a point split.
    Build {
        #[arg(long)]
        v0: String,
        #[arg(long)]
        v1: String,
        #[arg(long)]
        n: usize,
        /// Polarization in basis-name syntax, e.g. `l-e1+4l'-2e'1-e'2`.
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
    },
    /// Check the model's relations on random points of the pinned elliptic curves.
    Oracle {
        model: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the lattice, relation and fan suites.
    Verify {
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownModel(_)
            | ModelError::UnknownSymbol { .. }
            | ModelError::Parse(_)
            | ModelError::Dimension { .. }
            | ModelError::PointsOutOfRange { .. }
            | ModelError::InvalidPolarization { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<RootError> for CliError {
    fn from(e: RootError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<RelationError> for CliError {
    fn from(e: RelationError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<degen_atlas::chamber::ChamberError> for CliError {
    fn from(e: degen_atlas::chamber::ChamberError) -> Self {
        CliError::Failed(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub all_pass: bool,
}

impl Summary {
    fn of(results: impl IntoIterator<Item = bool>) -> Summary {
        let v: Vec<bool> = results.into_iter().collect();
        let passed = v.iter().filter(|&&b| b).count();
        Summary { checks: v.len(), passed, all_pass: passed == v.len() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub results: Value,
    pub summary: Summary,
}

/// What a run produced: exit code and the two output streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn catalogue_id(name: &str) -> Result<ModelId, CliError> {
    match name.parse::<ModelId>()? {
        ModelId::Custom => Err(CliError::Usage("CUSTOM models are made with `build`".into())),
        id => Ok(id),
    }
}

fn surface_kind(s: &str) -> Result<SurfaceKind, CliError> {
    SurfaceKind::parse(s).ok_or_else(|| CliError::Usage(format!("unknown base surface '{s}'; use P2 or P1xP1")))
}

fn list() -> Result<(Value, Summary), CliError> {
    let rows: Vec<Value> = catalogue()
        .iter()
        .map(|m| {
            json!({
                "model": m.id,
                "lattice": degen_atlas::roots::expected_type(m.id).map(|t| t.to_string()),
                "v0": m.surface_name(Component::V0),
                "v1": m.surface_name(Component::V1),
                "d": m.d(),
                "h": m.h().map(|h| m.format_vector(h)).unwrap_or_default(),
                "xi": m.format_vector(m.xi()),
                "singular_model": m.id.singular_model(),
            })
        })
        .collect();
    Ok((Value::Array(rows), Summary::of([])))
}

fn roots(model: &str, bound: u64) -> Result<(Value, Summary), CliError> {
    let m = catalogue_model(catalogue_id(model)?)?;
    let row = lattice_row(&m, bound);
    if let Some(e) = &row.error {
        return Err(CliError::Failed(e.clone()));
    }
    let pass = row.pass;
    Ok((serde_json::to_value(row).expect("serializable"), Summary::of([pass])))
}

fn relation(model: &str) -> Result<(Value, Summary), CliError> {
    let id = catalogue_id(model)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for r in RELATION_ROWS.iter().filter(|r| r.model == id) {
        let result = verify_row(r)?;
        checks.push(result.passed());
        rows.push(json!({
            "row": result.row,
            "v0": result.components[0],
            "v1": result.components[1],
            "d": result.d,
            "target": r.target().to_string(),
            "r_h": result.system.r_h.to_string(),
            "r_xi": result.system.r_xi.to_string(),
            "aux": result.system.aux.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "derivation": result.derivation,
            "certificate": result.certificate_text,
        }));
    }
    Ok((Value::Array(rows), Summary::of(checks)))
}

fn chambers(model: &str) -> Result<(Value, Summary), CliError> {
    let id = catalogue_id(model)?;
    let fan = lift_fan(&catalogue_model(id)?)?;
    let panel = FAN_PANELS.iter().find(|p| p.model == id).expect("every catalogue model has a panel");
    let diffs = compare_panel(panel, &fan);
    let value = json!({
        "model": id,
        "chambers": fan.chambers.len(),
        "walls": fan.walls,
        "boundary": fan.boundary,
        "labels": fan.chambers.iter().map(|c| c.label()).collect::<Vec<_>>(),
        "fan": fan,
        "reference_diffs": diffs,
        "diagram": fan.diagram(),
    });
    Ok((value, Summary::of([diffs.is_empty()])))
}

fn build(v0: &str, v1: &str, n: usize, h: Option<&str>) -> Result<(Value, Summary), CliError> {
    let (b0, b1) = (surface_kind(v0)?, surface_kind(v1)?);
    let mut m = build_model(b0, b1, n, None)?;
    if let Some(h) = h {
        let hv = m.parse_vector(h)?;
        m = build_model(b0, b1, n, Some(hv))?;
    }
    let e0 = m.anticanonical(Component::V0);
    let e1 = m.anticanonical(Component::V1);
    let mut value = json!({
        "model": m.export(),
        "e0_squared": m.intersect(&e0, &e0).to_string(),
        "e1_squared": m.intersect(&e1, &e1).to_string(),
        "alphabet": m.alphabet(),
    });
    if h.is_some() {
        let (l, roots, class) = analyse(&m, 4)?;
        value["roots"] = json!({
            "rank": l.rank(),
            "lattice": class.lattice_type.to_string(),
            "roots2_count": roots.roots2_count(),
            "roots4_count": roots.roots4_count(),
            "other_count": roots.other_count(),
            "note": "chamber data for custom pairs is relative to the built-in curve catalogue",
        });
    }
    Ok((value, Summary::of([])))
}

fn oracle(model: &str, trials: usize, seed: u64) -> Result<(Value, Summary), CliError> {
    let id = catalogue_id(model)?;
    let curves = pinned_curves()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for r in RELATION_ROWS.iter().filter(|r| r.model == id) {
        let (_, system) = r.system()?;
        let target = r.target();
        for c in &curves {
            let supported = randomized_membership_test(&system, &target, trials, c, seed)?;
            let control = randomized_membership_test(&system, &perturbed(&target), trials, c, seed)?;
            checks.push(supported.is_supported() && !control.is_supported());
            rows.push(json!({
                "row": r.row,
                "curve": {"p": c.p, "a": c.a, "b": c.b, "order": c.generator_order},
                "target": target.to_string(),
                "verdict": if supported.is_supported() { "SUPPORTED" } else { "REFUTED" },
                "perturbed_target": perturbed(&target).to_string(),
                "perturbed_verdict": if control.is_supported() { "SUPPORTED" } else { "REFUTED" },
                "detail": {"target": supported, "perturbed": control},
            }));
        }
    }
    Ok((json!({"seed": seed, "trials": trials, "checks": rows}), Summary::of(checks)))
}

fn verify_all() -> Result<(Value, Summary), CliError> {
    let t1 = verify_table1();
    let t2 = verify_table2()?;
    let f5 = verify_fig5()?;
    let lattice: Vec<Value> = t1
        .rows
        .iter()
        .map(|r| json!({"check": format!("lattice type {}", r.model), "model": r.model, "found": r.found, "expected": r.expected, "roots2_count": r.roots2_count, "pass": r.pass}))
        .collect();
    let relations: Vec<Value> = t2
        .iter()
        .map(|r| json!({"check": format!("relation row {}", r.row), "row": r.row, "model": r.model, "certificate": r.certificate_text, "pass": r.passed()}))
        .collect();
    let fans: Vec<Value> = f5
        .iter()
        .map(|r| json!({"check": format!("chamber fan {}", r.model), "model": r.model, "chambers": r.fan.chambers.len(), "diffs": r.diffs, "pass": r.passed()}))
        .collect();
    let checks =
        t1.rows.iter().map(|r| r.pass).chain(t2.iter().map(|r| r.passed())).chain(f5.iter().map(|r| r.passed()));
    let summary = Summary::of(checks);
    Ok((json!({"lattices": lattice, "relations": relations, "fans": fans}), summary))
}

fn dispatch(cli: &Cli, env_seed: Option<&str>) -> Result<(Value, Summary), CliError> {
    match &cli.command {
        Command::List => list(),
        Command::Roots { model, bound } => roots(model, *bound),
        Command::Relation { model } => relation(model),
        Command::Chambers { model } => chambers(model),
        Command::Build { v0, v1, n, h } => build(v0, v1, *n, h.as_deref()),
        Command::Oracle { model, trials, seed } => {
            let seed = match (seed, env_seed) {
                (Some(s), _) => *s,
                (None, Some(s)) => s.parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}='{s}' is not an integer")))?,
                (None, None) => DEFAULT_SEED,
            };
            oracle(model, *trials, seed)
        }
        Command::Verify { all: true } => verify_all(),
        Command::Verify { all: false } => Err(CliError::Usage("verify needs --all".into())),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let command = command_echo(&cli.command);
    match dispatch(&cli, env_seed) {
        Ok((results, summary)) => {
            let code = if summary.all_pass { 0 } else { 1 };
            let report = Report { schema: SCHEMA, command, results, summary };
            let stdout = if cli.json {
                serde_json::to_string_pretty(&report).expect("serializable") + "\n"
            } else {
                render_text(&serde_json::to_value(&report).expect("serializable"))
            };
            let stderr = if code == 0 { String::new() } else { "verification failed\n".to_string() };
            Outcome { code, stdout, stderr }
        }
        Err(CliError::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(CliError::Failed(msg)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn command_echo(c: &Command) -> String {
    match c {
        Command::List => "list".into(),
        Command::Roots { model, bound } => format!("roots {model} --bound {bound}"),
        Command::Relation { model } => format!("relation {model}"),
        Command::Chambers { model } => format!("chambers {model}"),
        Command::Build { v0, v1, n, h } => match h {
            Some(h) => format!("build --v0 {v0} --v1 {v1} --n {n} --h {h}"),
            None => format!("build --v0 {v0} --v1 {v1} --n {n}"),
        },
        Command::Oracle { model, trials, seed } => match seed {
            Some(s) => format!("oracle {model} --trials {trials} --seed {s}"),
            None => format!("oracle {model} --trials {trials}"),
        },
        Command::Verify { .. } => "verify --all".into(),
    }
}
