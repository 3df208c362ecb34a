//! `coordcert`: simulate four-party causal circuits, evaluate the chain
//! and branch-conditioned coordination inequalities, derive moment-matrix
//! bounds, check the inflated-wiring chain argument, and search for
//! maximally coordinated realizations.
//!
//! Reports are JSON with a `schema_version` field, floats at 12
//! significant digits, printed to stdout and (when an output directory is
//! configured via `--out` or `COORDCERT_OUT`) mirrored to files alongside
//! plot-ready CSV tables.  Identical configuration and seed produce
//! byte-identical outputs.  Exit status: 0 on success, 2 on validation
//! errors, 3 on solver non-convergence.

use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coordcert_core::bound::{coordination_bound, BoundOptions, BoundReport};
use coordcert_core::circuit::{circuit_from_json, circuit_to_json, CausalCircuit};
use coordcert_core::exec::{configure_jobs, ExecMode};
use coordcert_core::ineq::{
    eval_ineq1, eval_ineq2, ghz_settings_behavior, max_coordination_search, shared_random_bit,
    visibility_threshold, CHSHVariant, Ineq1Report, Ineq2Report, MultiStartOptions, SearchOptions,
    SearchReport, ThresholdOptions, ThresholdReport, VPoint,
};
use coordcert_core::inflation::{inflation_realization_from_json, sos_chain_check, SosReport};
use coordcert_core::io::{fmt12, json_num_array, JsonObj};
use coordcert_core::quantum::{
    realization_from_json, realization_to_json, simulate, Behavior, SettingsBehavior,
};
use coordcert_sdp::SolveOptions;

const SCHEMA_VERSION: i64 = 1;

/// Failure classes mapped to exit codes: validation → 2, solver → 3.
enum Failure {
    Validation(String),
    Solver(String),
}

type AppResult = Result<(), Failure>;

fn invalid(e: impl Display) -> Failure {
    Failure::Validation(e.to_string())
}

fn solver(e: impl Display) -> Failure {
    Failure::Solver(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "coordcert",
    version,
    about = "Coordination certificates for four-party causal circuits: \
             simulation, inequality evaluation, moment-matrix bounds, \
             inflated-wiring checks, and realization search."
)]
struct Cli {
    /// Output directory for emitted artifacts (defaults to $COORDCERT_OUT;
    /// when neither is set, reports go to stdout only).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for data-parallel sweeps: 1 forces sequential
    /// execution, 0 uses one worker per logical core.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a realization against a circuit file and report the
    /// outcome distribution with its correlators.
    Simulate(SimulateArgs),
    /// Evaluate the chain inequality <AB>+<BC>+<CD> <= <A><D>/2 + 3√3/2
    /// on a four-party binary behavior.
    Ineq1(Ineq1Args),
    /// Evaluate the branch-conditioned quadratic inequality
    /// CHSH₋² + CHSH₊² + 8(3Σ−8)² <= 16 on a settings behavior.
    Ineq2(Ineq2Args),
    /// Locate the visibility threshold above which the quadratic
    /// inequality is violated, and emit the lhs-vs-visibility curve.
    Threshold(ThresholdArgs),
    /// Upper-bound the chain expression over the moment-matrix
    /// relaxation grid and certify it with the feasibility witness.
    Bound(BoundArgs),
    /// Check the chain residual argument on an inflated-wiring
    /// realization file.
    SosCheck(SosCheckArgs),
    /// Rewrite a circuit file into its canonical form.
    Canonicalize(CanonicalizeArgs),
    /// Search for the most coordinated behavior a uniform-dimension
    /// realization of the four-party circuit can produce.
    Search(SearchArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Circuit file (JSON).
    circuit: PathBuf,
    /// Realization file (JSON; must realize the same circuit).
    realization: PathBuf,
}

#[derive(Args)]
struct Ineq1Args {
    /// Behavior file (JSON); omit when using --fixture.
    behavior: Option<PathBuf>,
    /// Built-in input; available here: shared-random-bit.
    #[arg(long, value_name = "NAME", conflicts_with = "behavior")]
    fixture: Option<String>,
}

#[derive(Args)]
struct Ineq2Args {
    /// Settings-behavior file (JSON); omit when using --fixture.
    settings_behavior: Option<PathBuf>,
    /// Built-in input; available here: ghz4 (visibility from --v).
    #[arg(long, value_name = "NAME", conflicts_with = "settings_behavior")]
    fixture: Option<String>,
    /// Visibility of the ghz4 fixture state.
    #[arg(long, default_value_t = 1.0, value_name = "VIS")]
    v: f64,
    /// CHSH facet signs for the +1 branch (e.g. "+++-").
    #[arg(long, default_value = "+++-", value_name = "SIGNS")]
    variant_plus: String,
    /// CHSH facet signs for the -1 branch (e.g. "++-+").
    #[arg(long, default_value = "++-+", value_name = "SIGNS")]
    variant_minus: String,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Bisection stops when the visibility bracket is this narrow.
    #[arg(long, default_value_t = 0.002, value_name = "STEP")]
    grid_step: f64,
    /// Visibility spacing of the emitted curve samples.
    #[arg(long, default_value_t = 0.01, value_name = "STEP")]
    curve_step: f64,
    /// Lower edge of the searched visibility window.
    #[arg(long, default_value_t = 0.85, value_name = "V")]
    v_min: f64,
    /// Optimizer restarts per visibility point.
    #[arg(long, default_value_t = 24, value_name = "N")]
    restarts: usize,
    /// Base seed for the optimizer restarts.
    #[arg(long, default_value_t = 1, value_name = "SEED")]
    seed: u64,
    /// CHSH facet signs for the +1 branch.
    #[arg(long, default_value = "+++-", value_name = "SIGNS")]
    variant_plus: String,
    /// CHSH facet signs for the -1 branch.
    #[arg(long, default_value = "++-+", value_name = "SIGNS")]
    variant_minus: String,
}

#[derive(Args)]
struct BoundArgs {
    /// Relaxation level (1 or 2).
    #[arg(long, default_value_t = 2, value_name = "L")]
    level: usize,
    /// Grid spacing over the marginal rectangle.
    #[arg(long, default_value_t = 0.1, value_name = "STEP")]
    grid_step: f64,
    /// Skip the refinement pass around the incumbent cell.
    #[arg(long)]
    no_refine: bool,
    /// Override the solver's feasibility and duality-gap tolerance.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Solver seed recorded in the report (the interior-point start is
    /// deterministic).
    #[arg(long, default_value_t = 1, value_name = "SEED")]
    seed: u64,
}

#[derive(Args)]
struct SosCheckArgs {
    /// Inflated-wiring realization file (JSON).
    realization: PathBuf,
    /// Slack allowed in the triangle-bound comparison.
    #[arg(long, default_value_t = 1e-9, value_name = "TOL")]
    tol: f64,
}

#[derive(Args)]
struct CanonicalizeArgs {
    /// Circuit file (JSON).
    circuit: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Uniform wire dimension of the searched realizations.
    #[arg(long, default_value_t = 2, value_name = "D")]
    dim: usize,
    /// Multi-start restarts.
    #[arg(long, default_value_t = 32, value_name = "N")]
    restarts: usize,
    /// Base random seed.
    #[arg(long, default_value_t = 1, value_name = "SEED")]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> AppResult {
    let _ = configure_jobs(cli.jobs);
    let mode = if cli.jobs == 1 {
        ExecMode::Sequential
    } else {
        ExecMode::auto()
    };
    let emit = Emitter::new(cli.out.as_ref())?;
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, &emit),
        Command::Ineq1(a) => cmd_ineq1(&a, &emit),
        Command::Ineq2(a) => cmd_ineq2(&a, &emit),
        Command::Threshold(a) => cmd_threshold(&a, mode, &emit),
        Command::Bound(a) => cmd_bound(&a, mode, &emit),
        Command::SosCheck(a) => cmd_sos_check(&a, &emit),
        Command::Canonicalize(a) => cmd_canonicalize(&a, &emit),
        Command::Search(a) => cmd_search(&a, mode, &emit),
    }
}

/// Stdout printer with an optional artifact directory.
struct Emitter {
    out_dir: Option<PathBuf>,
}

impl Emitter {
    fn new(flag: Option<&PathBuf>) -> Result<Self, Failure> {
        let out_dir = flag
            .cloned()
            .or_else(|| std::env::var_os("COORDCERT_OUT").map(PathBuf::from));
        if let Some(d) = &out_dir {
            fs::create_dir_all(d)
                .map_err(|e| invalid(format!("cannot create output directory {d:?}: {e}")))?;
        }
        Ok(Self { out_dir })
    }

    /// Print `text` to stdout and mirror it to `name` in the output
    /// directory when one is configured.
    fn report(&self, name: &str, text: &str) -> AppResult {
        print!("{text}");
        self.artifact(name, text)
    }

    /// Write `text` to `name` in the output directory only.
    fn artifact(&self, name: &str, text: &str) -> AppResult {
        if let Some(d) = &self.out_dir {
            let path = d.join(name);
            fs::write(&path, text)
                .map_err(|e| invalid(format!("cannot write {path:?}: {e}")))?;
        }
        Ok(())
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {path:?}: {e}")))
}

fn parse_variant(text: &str, which: &str) -> Result<CHSHVariant, Failure> {
    CHSHVariant::parse(text).map_err(|e| invalid(format!("--variant-{which}: {e}")))
}

fn path_str(p: &PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

// ---------------------------------------------------------------------------
// simulate

fn cmd_simulate(a: &SimulateArgs, emit: &Emitter) -> AppResult {
    let circuit = circuit_from_json(&read_file(&a.circuit)?)
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.circuit))))?;
    let realization = realization_from_json(&read_file(&a.realization)?)
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.realization))))?;
    let canon_given = circuit
        .canonicalize()
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.circuit))))?;
    let canon_real = realization
        .circuit
        .canonicalize()
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.realization))))?;
    if canon_given != canon_real {
        return Err(invalid(
            "the realization file does not realize the given circuit",
        ));
    }
    let behavior = simulate(&realization).map_err(invalid)?;
    let parties: Vec<String> = realization
        .circuit
        .measurements()
        .iter()
        .map(|m| m.id.clone())
        .collect();

    let mut obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "simulate")
        .str("circuit", &path_str(&a.circuit))
        .str("realization", &path_str(&a.realization))
        .raw("parties", render_str_array(&parties))
        .raw(
            "outcome_arities",
            render_int_array(behavior.arities().iter().map(|&a| a as i64)),
        )
        .raw("probs", json_num_array(behavior.probs()));
    if behavior.arities().iter().all(|&x| x == 2) {
        let singles: Vec<String> = (0..parties.len())
            .map(|k| {
                format!(
                    "\"{}\": {}",
                    parties[k],
                    fmt12(behavior.correlator(&[k]))
                )
            })
            .collect();
        obj = obj.raw("singles", format!("{{{}}}", singles.join(", ")));
        let mut pairs: Vec<String> = Vec::new();
        for i in 0..parties.len() {
            for j in (i + 1)..parties.len() {
                pairs.push(format!(
                    "\"{}{}\": {}",
                    parties[i],
                    parties[j],
                    fmt12(behavior.correlator(&[i, j]))
                ));
            }
        }
        obj = obj.raw("pairs", format!("{{{}}}", pairs.join(", ")));
    }
    emit.report("simulate_report.json", &obj.render())?;
    emit.artifact("behavior.json", &behavior.to_json())
}

fn render_str_array(items: &[String]) -> String {
    let quoted: Vec<String> = items
        .iter()
        .map(|s| format!("\"{}\"", coordcert_core::io::json_escape(s)))
        .collect();
    format!("[{}]", quoted.join(", "))
}

fn render_int_array(items: impl Iterator<Item = i64>) -> String {
    let parts: Vec<String> = items.map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

// ---------------------------------------------------------------------------
// ineq1

fn cmd_ineq1(a: &Ineq1Args, emit: &Emitter) -> AppResult {
    let (input, behavior) = match (&a.behavior, &a.fixture) {
        (Some(path), None) => {
            let b = Behavior::from_json(&read_file(path)?)
                .map_err(|e| invalid(format!("{}: {e}", path_str(path))))?;
            (path_str(path), b)
        }
        (None, Some(name)) => match name.as_str() {
            "shared-random-bit" => (name.clone(), shared_random_bit()),
            other => {
                return Err(invalid(format!(
                    "unknown ineq1 fixture {other:?}; available: shared-random-bit"
                )))
            }
        },
        _ => {
            return Err(invalid(
                "ineq1 needs a behavior file or --fixture shared-random-bit",
            ))
        }
    };
    let report = eval_ineq1(&behavior).map_err(invalid)?;
    let obj = append_ineq1_fields(
        JsonObj::new()
            .int("schema_version", SCHEMA_VERSION)
            .str("command", "ineq1")
            .str("input", &input),
        &report,
    );
    emit.report("ineq1_report.json", &obj.render())
}

fn append_ineq1_fields(obj: JsonObj, r: &Ineq1Report) -> JsonObj {
    obj.num("lhs", r.lhs)
        .num("rhs", r.rhs)
        .num("violation", r.violation)
        .bool("violated", r.violated)
}

// ---------------------------------------------------------------------------
// ineq2

fn cmd_ineq2(a: &Ineq2Args, emit: &Emitter) -> AppResult {
    let variant_plus = parse_variant(&a.variant_plus, "plus")?;
    let variant_minus = parse_variant(&a.variant_minus, "minus")?;
    let (input, sb) = match (&a.settings_behavior, &a.fixture) {
        (Some(path), None) => {
            let sb = SettingsBehavior::from_json(&read_file(path)?)
                .map_err(|e| invalid(format!("{}: {e}", path_str(path))))?;
            (path_str(path), sb)
        }
        (None, Some(name)) => match name.as_str() {
            "ghz4" => (
                format!("ghz4(v={})", fmt12(a.v)),
                ghz_settings_behavior(a.v).map_err(invalid)?,
            ),
            other => {
                return Err(invalid(format!(
                    "unknown ineq2 fixture {other:?}; available: ghz4"
                )))
            }
        },
        _ => {
            return Err(invalid(
                "ineq2 needs a settings-behavior file or --fixture ghz4",
            ))
        }
    };
    let report = eval_ineq2(&sb, &variant_minus, &variant_plus).map_err(invalid)?;
    let obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "ineq2")
        .str("input", &input)
        .str("variant_plus", &variant_plus.to_string())
        .str("variant_minus", &variant_minus.to_string());
    let obj = append_ineq2_fields(obj, &report);
    emit.report("ineq2_report.json", &obj.render())
}

fn append_ineq2_fields(obj: JsonObj, r: &Ineq2Report) -> JsonObj {
    obj.num("p_plus", r.p_plus)
        .num("p_minus", r.p_minus)
        .num("chsh_minus", r.chsh_minus)
        .num("chsh_plus", r.chsh_plus)
        .num("sigma", r.sigma)
        .num("lhs", r.lhs)
        .num("bound", r.bound)
        .bool("precondition_satisfied", r.precondition_satisfied)
        .bool("violated", r.violated)
}

// ---------------------------------------------------------------------------
// threshold

fn cmd_threshold(a: &ThresholdArgs, mode: ExecMode, emit: &Emitter) -> AppResult {
    if !(0.0..1.0).contains(&a.v_min) {
        return Err(invalid(format!("--v-min must be in [0, 1), got {}", a.v_min)));
    }
    if a.grid_step <= 0.0 || a.curve_step <= 0.0 {
        return Err(invalid("--grid-step and --curve-step must be positive"));
    }
    if a.restarts == 0 {
        return Err(invalid("--restarts must be at least 1"));
    }
    let o = ThresholdOptions {
        v_min: a.v_min,
        grid_step: a.grid_step,
        curve_step: a.curve_step,
        variant_minus: parse_variant(&a.variant_minus, "minus")?,
        variant_plus: parse_variant(&a.variant_plus, "plus")?,
        opt: MultiStartOptions {
            restarts: a.restarts,
            seed: a.seed,
            mode,
            ..MultiStartOptions::default()
        },
    };
    // Window and budget were validated above; a failure past this point
    // means the optimizer could not establish the crossing.
    let report = visibility_threshold(&o).map_err(solver)?;
    let obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "threshold")
        .num("v_min", a.v_min)
        .num("grid_step", a.grid_step)
        .num("curve_step", a.curve_step)
        .int("restarts", a.restarts as i64)
        .int("seed", a.seed as i64)
        .str("variant_plus", &o.variant_plus.to_string())
        .str("variant_minus", &o.variant_minus.to_string())
        .num("v_star", report.v_star)
        .num("half_width", report.half_width)
        .num("lhs_at_unit_visibility", report.at_unit_visibility.lhs)
        .raw(
            "best_settings",
            json_num_array(&report.best_settings.params()),
        )
        .int("bisection_points", report.bisection.len() as i64)
        .int("curve_points", report.curve.len() as i64);
    emit.report("threshold_report.json", &obj.render())?;
    emit.artifact("threshold_curve.csv", &curve_csv(&report))
}

fn curve_csv(report: &ThresholdReport) -> String {
    let mut csv = String::from("v,lhs,chsh_minus,chsh_plus,sigma,violated\n");
    for VPoint { v, report: r } in &report.curve {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt12(*v),
            fmt12(r.lhs),
            fmt12(r.chsh_minus),
            fmt12(r.chsh_plus),
            fmt12(r.sigma),
            r.violated
        ));
    }
    csv
}

// ---------------------------------------------------------------------------
// bound

fn cmd_bound(a: &BoundArgs, mode: ExecMode, emit: &Emitter) -> AppResult {
    if !(a.level == 1 || a.level == 2) {
        return Err(invalid(format!("--level must be 1 or 2, got {}", a.level)));
    }
    if a.grid_step <= 0.0 || a.grid_step > 2.0 {
        return Err(invalid(format!(
            "--grid-step must be in (0, 2], got {}",
            a.grid_step
        )));
    }
    let mut solve = SolveOptions {
        seed: a.seed,
        ..SolveOptions::default()
    };
    if let Some(tol) = a.tol {
        if tol <= 0.0 || tol >= 1.0 {
            return Err(invalid(format!("--tol must be in (0, 1), got {tol}")));
        }
        solve.tol_feas = tol;
        solve.tol_gap = tol;
    }
    let o = BoundOptions {
        level: a.level,
        grid_step: a.grid_step,
        refine: !a.no_refine,
        mode,
        solve,
    };
    let report = coordination_bound(&o).map_err(solver)?;
    let obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "bound")
        .int("level", report.level as i64)
        .num("grid_step", report.grid_step)
        .bool("refine", !a.no_refine)
        .num("bound", report.bound)
        .num("best_alpha", report.best_alpha)
        .num("best_delta", report.best_delta)
        .int("grid_cells", report.cells.len() as i64)
        .int("refined_cells", report.refined_cells.len() as i64)
        .int("failed_cells", report.failed_cells as i64)
        .num("witness_value", report.witness_value)
        .num("witness_max_violation", report.witness_max_violation)
        .num("witness_min_eigenvalue", report.witness_min_eigenvalue)
        .bool("witness_certified", report.witness_certified);
    emit.report("bound_report.json", &obj.render())?;
    emit.artifact("bound_cells.csv", &cells_csv(&report))
}

fn cells_csv(report: &BoundReport) -> String {
    let mut csv = String::from("phase,alpha,delta,value,status\n");
    for (phase, cells) in [("coarse", &report.cells), ("refined", &report.refined_cells)] {
        for c in cells.iter() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                phase,
                fmt12(c.alpha),
                fmt12(c.delta),
                fmt12(c.value),
                c.status
            ));
        }
    }
    csv
}

// ---------------------------------------------------------------------------
// sos-check

fn cmd_sos_check(a: &SosCheckArgs, emit: &Emitter) -> AppResult {
    if a.tol <= 0.0 {
        return Err(invalid(format!("--tol must be positive, got {}", a.tol)));
    }
    let r = inflation_realization_from_json(&read_file(&a.realization)?)
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.realization))))?;
    let sys = r.wired_system().map_err(invalid)?;
    let phi = r.global_state().map_err(invalid)?;
    let report: SosReport = sos_chain_check(&sys, &phi, a.tol).map_err(invalid)?;
    let obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "sos-check")
        .str("input", &path_str(&a.realization))
        .num("tol", a.tol)
        .num("r_ab", report.r_ab)
        .num("r_bc", report.r_bc)
        .num("r_cd", report.r_cd)
        .num("r_ad", report.r_ad)
        .num("end_to_end", report.end_to_end)
        .bool("triangle_holds", report.triangle_holds)
        .num("gap", report.gap)
        .num("mean_a", report.mean_a)
        .num("mean_d", report.mean_d)
        .num("max_link_residual", report.max_link_residual())
        .num(
            "zero_residual_identity_defect",
            report.zero_residual_identity_defect(),
        );
    emit.report("sos_check_report.json", &obj.render())
}

// ---------------------------------------------------------------------------
// canonicalize

fn cmd_canonicalize(a: &CanonicalizeArgs, emit: &Emitter) -> AppResult {
    let circuit: CausalCircuit = circuit_from_json(&read_file(&a.circuit)?)
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.circuit))))?;
    let canon = circuit
        .canonicalize()
        .map_err(|e| invalid(format!("{}: {e}", path_str(&a.circuit))))?;
    emit.report("canonical.json", &circuit_to_json(&canon))
}

// ---------------------------------------------------------------------------
// search

fn cmd_search(a: &SearchArgs, mode: ExecMode, emit: &Emitter) -> AppResult {
    if a.dim < 2 {
        return Err(invalid(format!("--dim must be at least 2, got {}", a.dim)));
    }
    if a.restarts == 0 {
        return Err(invalid("--restarts must be at least 1"));
    }
    let o = SearchOptions {
        dim: a.dim,
        restarts: a.restarts,
        seed: a.seed,
        mode,
        ..SearchOptions::default()
    };
    let report: SearchReport = max_coordination_search(&o).map_err(solver)?;
    let obj = JsonObj::new()
        .int("schema_version", SCHEMA_VERSION)
        .str("command", "search")
        .int("dim", report.dim as i64)
        .int("restarts", report.restarts as i64)
        .int("seed", report.seed as i64)
        .num("score", report.score)
        .int("best_restart", report.restart as i64)
        .raw(
            "ineq1",
            append_ineq1_fields(JsonObj::new(), &report.ineq1).render_indent(1),
        );
    emit.report("search_report.json", &obj.render())?;
    emit.artifact(
        "search_realization.json",
        &realization_to_json(&report.realization),
    )?;
    emit.artifact("search_behavior.json", &report.behavior.to_json())
}
