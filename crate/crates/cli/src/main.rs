//! Command-line front end: scenario files in, tables and CSV reports out.
//!
//! Exit codes: 0 success, 1 domain or usage error, 2 scenario parse error,
//! 3 I/O error. All numbers are printed with 12 significant digits; CSV uses
//! comma delimiters and LF line endings. Identical inputs produce
//! byte-identical output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oligo_rd_core::model::{validate_model, CheckStatus, ProbeRegion};
use oligo_rd_core::scenario::Scenario;
use oligo_rd_core::steadystate::{joint_steady_state, Mode, Regime, SteadyState};
use oligo_rd_core::{analysis, compare_bertrand_cournot, compare_loops, dynamics};

#[derive(Parser)]
#[command(name = "oligo-rd", version, about = "R&D differential-game toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every model sign assumption over a probe region.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve all joint steady states for a regime and solution mode.
    Steady {
        scenario: PathBuf,
        /// Overrides the [steady] section regime (bertrand|cournot).
        #[arg(long, value_parser = parse_regime)]
        regime: Option<Regime>,
        /// Overrides the [steady] section mode (open|closed|feedback).
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        #[arg(long)]
        json: bool,
    },
    /// Compare Bertrand vs Cournot (and loop modes when beta = 0) at a cost level.
    Compare {
        scenario: PathBuf,
        /// Common cost level m.
        #[arg(long = "at-m")]
        at_m: f64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the [sweep] grid and write a CSV table.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Integrate the cost-state dynamics and write a trajectory CSV.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also run at half the step and report the error ratio.
        #[arg(long)]
        halve: bool,
        #[arg(long)]
        json: bool,
    },
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "bertrand" => Ok(Regime::Bertrand),
        "cournot" => Ok(Regime::Cournot),
        other => Err(format!("unknown regime '{other}' (expected bertrand|cournot)")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "open" => Ok(Mode::OpenLoop),
        "closed" => Ok(Mode::ClosedLoop),
        "feedback" => Ok(Mode::Feedback),
        other => Err(format!("unknown mode '{other}' (expected open|closed|feedback)")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<oligo_rd_core::Error> for Failure {
    fn from(e: oligo_rd_core::Error) -> Self {
        let message = e.to_string();
        let code = if message.contains("scenario parse:") { 2 } else { 1 };
        Failure { code, message }
    }
}

/// 12 significant digits, scientific.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds every number in a JSON tree to 12 significant digits so that JSON
/// and table output carry the same precision.
fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded: f64 = sig(x).parse().unwrap();
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *n = num;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn print_json(value: serde_json::Value) {
    let mut value = value;
    round_json(&mut value);
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })?;
    Ok(Scenario::from_toml(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })
}

fn thread_count() -> usize {
    std::env::var("OLIGO_RD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

fn cmd_validate(path: &Path, json: bool) -> Result<u8, Failure> {
    let scenario = load_scenario(path)?;
    let spec = scenario.model_spec()?;
    let probe = ProbeRegion::default_for(&spec);
    let report = validate_model(&spec, &probe);
    if json {
        print_json(serde_json::json!({
            "checks": report.checks,
            "all_pass": report.all_pass(),
        }));
    } else {
        for check in &report.checks {
            match &check.status {
                CheckStatus::Pass => println!("{}: pass", check.name),
                CheckStatus::Degenerate { at } => println!("{}: degenerate at {at}", check.name),
                CheckStatus::Violation { at, value } => {
                    println!("{}: violation at {at} (value {})", check.name, sig(*value))
                }
            }
        }
        if report.all_pass() {
            println!("all checks pass");
        } else {
            println!("assumption checks failed");
        }
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

/// One steady-state block. The solution mode is deliberately absent: the
/// memoryless closed-loop and feedback solutions coincide, and their reports
/// must be byte-identical.
fn steady_json(state: &SteadyState) -> serde_json::Value {
    serde_json::json!({
        "regime": state.regime,
        "m_star": state.m_star,
        "k_star": state.k_star,
        "q_star": state.q_star,
        "p_star": state.p_star,
        "lambda_own": state.lambda_own,
        "lambda_other": state.lambda_other,
        "residuals": state.residuals,
        "choice_soc": state.choice_soc,
        "investment_soc": state.investment_soc,
        "k_locally_decreasing": state.k_locally_decreasing,
    })
}

fn cmd_steady(
    path: &Path,
    regime: Option<Regime>,
    mode: Option<Mode>,
    json: bool,
) -> Result<u8, Failure> {
    let scenario = load_scenario(path)?;
    let spec = scenario.model_spec()?;
    let section = scenario.steady;
    let regime = regime
        .or(section.map(|s| s.regime))
        .ok_or_else(|| Failure::usage("no regime: pass --regime or add a [steady] section"))?;
    let mode = mode
        .or(section.map(|s| s.mode))
        .ok_or_else(|| Failure::usage("no mode: pass --mode or add a [steady] section"))?;
    let states = joint_steady_state(&spec, regime, mode)?;
    if json {
        print_json(serde_json::Value::Array(states.iter().map(steady_json).collect()));
        return Ok(0);
    }
    if states.is_empty() {
        println!("no steady states in the admissible cost range");
        return Ok(0);
    }
    for (idx, st) in states.iter().enumerate() {
        println!("steady state {} ({:?})", idx + 1, st.regime);
        println!("  m_star       = {}", sig(st.m_star));
        println!("  k_star       = {}", sig(st.k_star));
        println!("  q_star       = {}", sig(st.q_star));
        println!("  p_star       = {}", sig(st.p_star));
        println!("  lambda_own   = {}", sig(st.lambda_own));
        println!("  lambda_other = {}", sig(st.lambda_other));
        for (name, value) in &st.residuals {
            println!("  residual {name} = {}", sig(*value));
        }
        println!(
            "  choice_soc     = {} ({})",
            sig(st.choice_soc.value),
            if st.choice_soc.satisfied { "satisfied" } else { "violated" }
        );
        println!(
            "  investment_soc = {} ({})",
            sig(st.investment_soc.value),
            if st.investment_soc.satisfied { "satisfied" } else { "violated" }
        );
        println!("  k_locally_decreasing = {}", st.k_locally_decreasing);
    }
    Ok(0)
}

fn cmd_compare(path: &Path, at_m: f64, json: bool) -> Result<u8, Failure> {
    let scenario = load_scenario(path)?;
    let spec = scenario.model_spec()?;
    let choke = spec.choke_price();
    if !(at_m > 0.0 && at_m < choke) {
        return Err(Failure::usage(format!(
            "cost level {at_m} lies outside the admissible range (0, {choke})"
        )));
    }
    let mut row = compare_bertrand_cournot(&spec, at_m)?;
    if spec.tech.beta == 0.0 {
        for regime in [Regime::Bertrand, Regime::Cournot] {
            let part = compare_loops(&spec, regime, at_m)?;
            match regime {
                Regime::Bertrand => {
                    row.k_open_bertrand = part.k_open_bertrand;
                    row.k_closed_bertrand = part.k_closed_bertrand;
                    row.class_bertrand = part.class_bertrand;
                    row.prop3_bertrand = part.prop3_bertrand;
                }
                Regime::Cournot => {
                    row.k_open_cournot = part.k_open_cournot;
                    row.k_closed_cournot = part.k_closed_cournot;
                    row.class_cournot = part.class_cournot;
                    row.prop3_cournot = part.prop3_cournot;
                }
            }
        }
    }
    if json {
        print_json(serde_json::to_value(&row).unwrap());
    } else {
        let table = analysis::SweepTable { rows: vec![row] };
        print!("{}", table.to_csv(sig));
    }
    Ok(0)
}

fn cmd_sweep(path: &Path, out: &Path, json: bool) -> Result<u8, Failure> {
    let scenario = load_scenario(path)?;
    let spec = scenario.model_spec()?;
    let section = scenario
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::usage("scenario has no [sweep] section"))?;
    let grid = section.to_grid(&scenario.model);
    let table = analysis::sweep(&spec, &grid, section.loops, thread_count())?;
    write_file(out, &table.to_csv(sig))?;
    let rows = table.rows.len();
    let failures = table.rows.iter().filter(|r| r.error.is_some()).count();
    let holds = |f: fn(&analysis::ComparisonRow) -> Option<analysis::Verdict>| {
        table.rows.iter().filter(|r| f(r) == Some(analysis::Verdict::Holds)).count()
    };
    let prop2 = holds(|r| r.prop2);
    let prop3_b = holds(|r| r.prop3_bertrand);
    let prop3_c = holds(|r| r.prop3_cournot);
    if json {
        print_json(serde_json::json!({
            "rows": rows,
            "failures": failures,
            "prop2_holds": prop2,
            "prop3_bertrand_holds": prop3_b,
            "prop3_cournot_holds": prop3_c,
            "out": out.display().to_string(),
        }));
    } else {
        println!(
            "rows={rows} failures={failures} prop2_holds={prop2} \
             prop3_bertrand_holds={prop3_b} prop3_cournot_holds={prop3_c}"
        );
    }
    Ok(0)
}

fn halved_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("trajectory");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}.half.{ext}"))
}

fn cmd_simulate(path: &Path, out: &Path, halve: bool, json: bool) -> Result<u8, Failure> {
    let scenario = load_scenario(path)?;
    let spec = scenario.model_spec()?;
    let section = scenario
        .dynamics
        .as_ref()
        .ok_or_else(|| Failure::usage("scenario has no [dynamics] section"))?;
    let run = |step: f64| {
        dynamics::integrate(&spec, &section.policy, &section.m0, section.horizon, step)
    };
    let base = run(section.step)?;
    write_file(out, &dynamics::trajectory_csv(&base, sig))?;
    let mut ratio = None;
    if halve {
        let half = run(section.step / 2.0)?;
        write_file(&halved_path(out), &dynamics::trajectory_csv(&half, sig))?;
        // Error ratio against a step/4 reference; fourth-order one-step
        // integration puts the ratio near 16 (exactly 17 in the limit).
        let reference = run(section.step / 4.0)?;
        let gap = |t: &dynamics::Trajectory| -> f64 {
            t.m.last()
                .unwrap()
                .iter()
                .zip(reference.m.last().unwrap())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        ratio = Some(gap(&base) / gap(&half));
    }
    if json {
        print_json(serde_json::json!({
            "points": base.times.len(),
            "terminal_residual": base.terminal_residual,
            "error_ratio": ratio,
            "out": out.display().to_string(),
        }));
    } else {
        println!(
            "points={} terminal_residual={}",
            base.times.len(),
            sig(base.terminal_residual)
        );
        if let Some(r) = ratio {
            println!("error_ratio={}", sig(r));
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Validate { scenario, json } => cmd_validate(&scenario, json),
        Cmd::Steady { scenario, regime, mode, json } => cmd_steady(&scenario, regime, mode, json),
        Cmd::Compare { scenario, at_m, json } => cmd_compare(&scenario, at_m, json),
        Cmd::Sweep { scenario, out, json } => cmd_sweep(&scenario, &out, json),
        Cmd::Simulate { scenario, out, halve, json } => cmd_simulate(&scenario, &out, halve, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success; usage errors exit 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
