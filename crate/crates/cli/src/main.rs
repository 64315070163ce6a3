use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cscp_core::fixtures;
use cscp_core::io::{
    config_path, load_document, metrics_csv, record_session, replay_session, response_csv,
    serialize_document, session_text, write_atomic, Document, LintCase, MetricsTable, SessionInputs, Workspace,
    WorkspaceConfig, WorkspaceError,
};
use cscp_core::metrics::{relative_metrics, response_time_table, CostCoefficients};
use cscp_core::operator::{Scenario, TimeModelParams};
use cscp_core::panel::{PanelSpec, PlantState};
use cscp_core::synthesis::{
    choose_panel, enumerate_scale, lint_autonomy, synthesize_address_field, synthesize_hierarchy_with_cost,
    synthesize_matrix, synthesize_matrix_with_select, Constraints, HierarchyCost,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cscp", version, about = "Command-signaling control panel synthesis, simulation and replay")]
struct Cli {
    /// Workspace config; CSCP_WORKSPACE overrides it.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a minimal panel geometry.
    #[command(subcommand)]
    Synth(Synth),
    /// Run a scenario and write the session log.
    Simulate(SimulateArgs),
    /// Write the normalized metrics table.
    CompareMetrics(CompareMetricsArgs),
    /// Write the per-task response-time table.
    CompareTimes(CompareTimesArgs),
    /// Lint information-field layouts; exits 1 on violations.
    Lint(LintArgs),
    /// Start the panel session server.
    Serve(ServeArgs),
    /// Re-run saved sessions and verify byte-identical output.
    Replay(ReplayArgs),
}

#[derive(Subcommand)]
enum Synth {
    /// Select-by-command matrix with the fewest controls.
    Matrix(MatrixArgs),
    /// Multi-stage selection with the fewest keys.
    Hierarchy(HierarchyArgs),
    /// Paged address field selected from a keypad.
    Address(AddressArgs),
    /// Every panel family for a unit count, ranked by compression.
    Scale(ScaleArgs),
    /// Best family under control, indicator and time limits.
    Choose(ChooseArgs),
}

#[derive(Args)]
struct Output {
    /// Print JSON instead of a summary line.
    #[arg(long)]
    json: bool,
    /// Also save the result here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    units: usize,
    /// Units with a single command each instead of on/off pairs.
    #[arg(long)]
    single_state: bool,
    /// Fix the number of system-select buttons.
    #[arg(long)]
    select: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HierarchyArgs {
    #[arg(long)]
    units: usize,
    #[arg(long)]
    max_stages: Option<usize>,
    /// Count one keypad reused at every stage.
    #[arg(long)]
    reused_keypad: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AddressArgs {
    #[arg(long)]
    units: usize,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    units: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ChooseArgs {
    #[arg(long)]
    units: usize,
    #[arg(long)]
    max_controls: Option<usize>,
    #[arg(long)]
    max_indicators: Option<usize>,
    #[arg(long)]
    max_task_time: Option<f64>,
    #[arg(long)]
    g_load: bool,
    /// Time-model parameters document.
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    /// Panel spec file or id.
    #[arg(long)]
    panel: String,
    /// Plant file or id; defaults to the workspace plant.
    #[arg(long)]
    plant: Option<String>,
    /// Scenario file or id.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    params: Option<PathBuf>,
    /// Session log path; defaults to `<scenario>--<panel>.log.json` in the
    /// output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareMetricsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["conv-192", "csf-16", "csd-r"].map(String::from))]
    panels: Vec<String>,
    #[arg(long, default_value_t = 192)]
    units: usize,
    #[arg(long, default_value = "csd-r")]
    baseline: String,
    /// Count panel mass only, without wiring.
    #[arg(long)]
    panel_only_mass: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CompareTimesArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["me-81", "mm-81", "addr-81"].map(String::from))]
    panels: Vec<String>,
    #[arg(long)]
    plant: Option<String>,
    /// Scenario whose steps are the task suite.
    #[arg(long, default_value = "std-tasks")]
    tasks: String,
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct LintArgs {
    /// Lint case files or shipped case ids.
    #[arg(required_unless_present = "all")]
    cases: Vec<String>,
    /// Lint every shipped case.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Advance plant time only on explicit tick requests.
    #[arg(long)]
    virtual_time: bool,
    #[arg(long, default_value_t = 10.0)]
    tick_rate: f64,
}

#[derive(Args)]
struct ReplayArgs {
    /// Session log files or shipped session names.
    #[arg(required_unless_present = "all")]
    sessions: Vec<String>,
    /// Replay every shipped session.
    #[arg(long)]
    all: bool,
}

/// Failure reported as `{"error": kind, "message": ...}` with exit code 1.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        Self {
            kind,
            message: message.to_string(),
        }
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Self {
        let kind = match e {
            WorkspaceError::Parse { .. } => "parse",
            _ => "io",
        };
        Failure::new(kind, e)
    }
}

type Result<T> = std::result::Result<T, Failure>;

/// Lookup order: an existing file, then a workspace entry, then a shipped
/// fixture.
struct Sources {
    workspace: Option<Workspace>,
}

impl Sources {
    fn open(given: Option<&Path>) -> Result<Self> {
        let workspace = match config_path(given) {
            Ok(path) => Some(WorkspaceConfig::load(&path)?),
            Err(WorkspaceError::NoConfig) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Self { workspace })
    }

    fn resolve<T: Document + Clone>(
        &self,
        name: &str,
        what: &'static str,
        in_workspace: impl Fn(&Workspace) -> Option<T>,
        fixture: impl Fn(&str) -> Option<T>,
    ) -> Result<T> {
        let path = Path::new(name);
        if path.is_file() {
            return Ok(load_document(path)?);
        }
        self.workspace
            .as_ref()
            .and_then(in_workspace)
            .or_else(|| fixture(name))
            .ok_or_else(|| Failure::new("not_found", format!("no {what} file or id {name}")))
    }

    fn panel(&self, name: &str) -> Result<PanelSpec> {
        self.resolve(name, "panel", |w| w.panels.iter().find(|p| p.id == name).cloned(), fixtures::panel)
    }

    fn plant(&self, name: Option<&str>) -> Result<PlantState> {
        match name {
            Some(n) => self.resolve(n, "plant", |w| (w.plant.id == n).then(|| w.plant.clone()), fixtures::plant),
            None => self
                .workspace
                .as_ref()
                .map(|w| w.plant.clone())
                .ok_or_else(|| Failure::new("usage", "--plant is required without a workspace")),
        }
    }

    fn scenario(&self, name: &str) -> Result<Scenario> {
        self.resolve(
            name,
            "scenario",
            |w| w.scenarios.iter().find(|s| s.id == name).cloned(),
            fixtures::scenario,
        )
    }

    fn params(&self, path: Option<&Path>) -> Result<TimeModelParams> {
        match (path, &self.workspace) {
            (Some(p), _) => Ok(load_document(p)?),
            (None, Some(w)) => Ok(w.params.clone()),
            (None, None) => Ok(TimeModelParams::default()),
        }
    }

    fn output_dir(&self, given: Option<&Path>) -> PathBuf {
        match (given, &self.workspace) {
            (Some(d), _) => d.to_path_buf(),
            (None, Some(w)) => w.output_dir.clone(),
            (None, None) => PathBuf::from("."),
        }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn emit<T: Serialize>(output: &Output, value: &T, summary: String) -> Result<()> {
    if output.json {
        print!("{}", json(value));
    } else {
        println!("{summary}");
    }
    if let Some(path) = &output.out {
        write(path, &json(value))?;
    }
    Ok(())
}

fn synth(cmd: &Synth, sources: &Sources) -> Result<()> {
    let domain = |e: cscp_core::synthesis::SynthesisError| Failure::new("synthesis", e);
    match cmd {
        Synth::Matrix(a) => {
            let g = match a.select {
                Some(s) => synthesize_matrix_with_select(a.units, s, !a.single_state),
                None => synthesize_matrix(a.units, !a.single_state),
            }
            .map_err(domain)?;
            emit(
                &a.output,
                &g,
                format!("s={} b={} controls={}", g.s, g.b, g.total_controls),
            )
        }
        Synth::Hierarchy(a) => {
            let cost = if a.reused_keypad {
                HierarchyCost::ReusedKeypad
            } else {
                HierarchyCost::DistinctKeys
            };
            let p = synthesize_hierarchy_with_cost(a.units, a.max_stages, cost).map_err(domain)?;
            let branching: Vec<String> = p.branching.iter().map(ToString::to_string).collect();
            emit(
                &a.output,
                &p,
                format!(
                    "branching={} stages={} keys={} keypad={} capacity={}",
                    branching.join("x"),
                    p.stages,
                    p.total_keys,
                    p.keypad_keys,
                    p.capacity
                ),
            )
        }
        Synth::Address(a) => {
            let p = synthesize_address_field(a.units, a.rows, a.cols).map_err(domain)?;
            emit(
                &a.output,
                &p,
                format!(
                    "rows={} cols={} screens={} keypad={} keypads={} controls={}",
                    p.rows, p.cols, p.screens, p.keypad, p.keypads, p.total_controls
                ),
            )
        }
        Synth::Scale(a) => {
            let entries = enumerate_scale(a.units).map_err(domain)?;
            let lines: Vec<String> = entries
                .iter()
                .map(|e| {
                    format!(
                        "{} indicators={} controls={} k_sig={:.3} k_cmd={:.3}",
                        e.family, e.profile.indicators, e.profile.controls, e.profile.k_sig, e.profile.k_cmd
                    )
                })
                .collect();
            emit(&a.output, &entries, lines.join("\n"))
        }
        Synth::Choose(a) => {
            let constraints = Constraints {
                max_controls: a.max_controls,
                max_indicators: a.max_indicators,
                max_task_time: a.max_task_time,
                g_load_serviceable: a.g_load,
            };
            let params = sources.params(a.params.as_deref())?;
            let ranked = choose_panel(a.units, &constraints, &params).map_err(domain)?;
            let lines: Vec<String> = ranked
                .iter()
                .map(|r| {
                    format!(
                        "{} controls={} indicators={} task_time={:.3}",
                        r.family, r.controls, r.indicators, r.task_time
                    )
                })
                .collect();
            emit(&a.output, &ranked, lines.join("\n"))
        }
    }
}

fn simulate(a: &SimulateArgs, sources: &Sources) -> Result<()> {
    let inputs = SessionInputs {
        plant: sources.plant(a.plant.as_deref())?,
        spec: sources.panel(&a.panel)?,
        scenario: sources.scenario(&a.scenario)?,
        params: sources.params(a.params.as_deref())?,
    };
    let out = a.out.clone().unwrap_or_else(|| {
        sources
            .output_dir(None)
            .join(format!("{}--{}.log.json", inputs.scenario.id, inputs.spec.id))
    });
    let record = record_session(inputs).map_err(|e| Failure::new("simulation", e))?;
    write(&out, &session_text(&record))?;
    let t = record.log.totals;
    println!(
        "wrote {} K={} U={} O={} L={} total_time={:.3}",
        out.display(),
        t.k,
        t.u,
        t.o,
        t.l,
        record.log.total_time
    );
    Ok(())
}

fn compare_metrics(a: &CompareMetricsArgs, sources: &Sources) -> Result<()> {
    let specs: Vec<PanelSpec> = a.panels.iter().map(|p| sources.panel(p)).collect::<Result<_>>()?;
    let coefficients = CostCoefficients {
        mass_includes_wiring: !a.panel_only_mass,
        ..CostCoefficients::default()
    };
    let rows = relative_metrics(&specs, a.units, &a.baseline, &coefficients).map_err(|e| Failure::new("metrics", e))?;
    let table = MetricsTable {
        n_units: a.units,
        baseline: a.baseline.clone(),
        coefficients,
        rows,
    };
    let dir = sources.output_dir(a.out_dir.as_deref());
    let csv = metrics_csv(&table);
    write(&dir.join("metrics.csv"), &csv)?;
    write(
        &dir.join("metrics.json"),
        &serialize_document(&table).map_err(|e| Failure::new("metrics", e))?,
    )?;
    print!("{csv}");
    Ok(())
}

fn compare_times(a: &CompareTimesArgs, sources: &Sources) -> Result<()> {
    let plant = match (&a.plant, &sources.workspace) {
        (None, None) => sources.plant(Some("std-81"))?,
        (p, _) => sources.plant(p.as_deref())?,
    };
    let panels: Vec<(PanelSpec, PlantState)> = a
        .panels
        .iter()
        .map(|p| Ok((sources.panel(p)?, plant.clone())))
        .collect::<Result<_>>()?;
    let tasks = sources.scenario(&a.tasks)?.steps;
    let params = sources.params(a.params.as_deref())?;
    let table = response_time_table(&panels, &tasks, &params).map_err(|e| Failure::new("metrics", e))?;
    let dir = sources.output_dir(a.out_dir.as_deref());
    let csv = response_csv(&table);
    write(&dir.join("response.csv"), &csv)?;
    write(
        &dir.join("response.json"),
        &serialize_document(&table).map_err(|e| Failure::new("metrics", e))?,
    )?;
    print!("{csv}");
    Ok(())
}

/// Returns whether every case was clean.
fn lint(a: &LintArgs) -> Result<bool> {
    let cases: Vec<LintCase> = if a.all {
        fixtures::lint_cases()
    } else {
        a.cases
            .iter()
            .map(|name| {
                let path = Path::new(name);
                if path.is_file() {
                    Ok(load_document(path)?)
                } else {
                    fixtures::lint_cases()
                        .into_iter()
                        .find(|c| c.id == *name)
                        .ok_or_else(|| Failure::new("not_found", format!("no lint case file or id {name}")))
                }
            })
            .collect::<Result<_>>()?
    };
    let mut clean = true;
    for case in &cases {
        let report =
            lint_autonomy(&case.plant, &case.layout, &case.functions).map_err(|e| Failure::new("lint", e))?;
        println!("{}: {} violation(s)", case.id, report.violations.len());
        for v in &report.violations {
            println!("  {}", v.description);
        }
        clean &= report.is_clean();
    }
    Ok(clean)
}

/// Returns whether every session replayed identically.
fn replay(a: &ReplayArgs) -> Result<bool> {
    let names: Vec<String> = if a.all {
        fixtures::SESSIONS.iter().map(|(n, _)| n.to_string()).collect()
    } else {
        a.sessions.clone()
    };
    let mut ok = true;
    for name in &names {
        let path = Path::new(name);
        let text = if path.is_file() {
            cscp_core::io::workspace::read_text(path)?
        } else {
            fixtures::session_text(name)
                .ok_or_else(|| Failure::new("not_found", format!("no session file or name {name}")))?
                .to_string()
        };
        let verdict = replay_session(&text).map_err(|e| Failure::new("replay", e))?;
        let status = match (verdict.digest_matches, verdict.first_difference) {
            (false, _) => "digest mismatch".to_string(),
            (true, None) => "identical".to_string(),
            (true, Some(line)) => format!("differs at line {line}"),
        };
        println!("{name}: {status} digest={}", verdict.digest);
        ok &= verdict.ok();
    }
    Ok(ok)
}

fn serve(a: &ServeArgs) -> Result<()> {
    let config = cscp_service::ServiceConfig {
        realtime: !a.virtual_time,
        tick_rate: a.tick_rate,
    };
    if !(a.tick_rate > 0.0) || !a.tick_rate.is_finite() {
        return Err(Failure::new("usage", "--tick-rate must be positive"));
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new("io", e))?;
    eprintln!("serving on http://{}", a.addr);
    runtime
        .block_on(cscp_service::serve(a.addr, config))
        .map_err(|e| Failure::new("io", e))
}

fn run(cli: Cli) -> Result<bool> {
    let sources = || Sources::open(cli.workspace.as_deref());
    match &cli.command {
        Command::Synth(s) => synth(s, &sources()?).map(|_| true),
        Command::Simulate(a) => simulate(a, &sources()?).map(|_| true),
        Command::CompareMetrics(a) => compare_metrics(a, &sources()?).map(|_| true),
        Command::CompareTimes(a) => compare_times(a, &sources()?).map(|_| true),
        Command::Lint(a) => lint(a),
        Command::Serve(a) => serve(a).map(|_| true),
        Command::Replay(a) => replay(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) if f.kind == "usage" => {
            eprintln!("error: {}", f.message);
            ExitCode::from(2)
        }
        Err(f) => {
            eprintln!("{}", serde_json::json!({"error": f.kind, "message": f.message}));
            ExitCode::from(1)
        }
    }
}
