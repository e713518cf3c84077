use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rsasm::{json as js, parse_program, probe, Program};
use rsasm_core::engine::{Status, Trace};
use rsasm_core::treealg::{tree_diff, tree_update_rule};

#[derive(Parser)]
#[command(
    name = "rsasm",
    version,
    about = "Run reflective sequential abstract state machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program until a fixpoint, a clash, an error or the step cap.
    Run {
        file: PathBuf,
        /// Overrides the cap in the program's OPTIONS section.
        #[arg(long, env = "RSASM_MAX_STEPS")]
        max_steps: Option<usize>,
        /// Write the full trace as canonical JSON.
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
        /// Print the self tree before this step (the step count gives the
        /// final tree).
        #[arg(long, value_name = "STEP")]
        dump_self: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Exit nonzero when the run stops on a clash.
        #[arg(long)]
        strict: bool,
    },
    /// Parse and validate a program without running it.
    Check {
        file: PathBuf,
        /// Print the program back in normalized form.
        #[arg(long)]
        print: bool,
    },
    /// Randomized postulate probes.
    Probe {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the tree difference between the self trees at two steps of a
    /// saved trace.
    DiffSelf {
        trace: PathBuf,
        i: usize,
        j: usize,
        /// Also print the equivalent update rule.
        #[arg(long)]
        rule: bool,
    },
}

fn load(file: &Path) -> Result<Program, String> {
    let src = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    parse_program(&src).map_err(|e| format!("{}:{e}", file.display()))
}

fn print_text(trace: &Trace) {
    println!("status: {}", trace.status.as_str());
    if let Status::Error(e) = &trace.status {
        println!("error: {e}");
    }
    println!("steps: {}", trace.steps.len());
    if let Some(c) = trace.steps.last().and_then(|r| r.clash()) {
        println!("clash: {} ({})", c.location, c.reason);
    }
    for (loc, v) in trace.final_state.defined() {
        if !loc.is_self() {
            println!("{loc} = {v}");
        }
    }
}

fn run(
    file: &Path,
    max_steps: Option<usize>,
    trace_out: Option<&Path>,
    dump_self: Option<usize>,
    format: Format,
    strict: bool,
) -> Result<ExitCode, String> {
    let program = load(file)?;
    let mut machine = program.machine(None).map_err(|e| e.to_string())?;
    if let Some(n) = max_steps {
        machine.max_steps = n;
    }
    let trace = machine.run();
    let j = js::trace(&trace);
    if let Some(out) = trace_out {
        fs::write(out, js::to_string(&j)).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    if let Some(i) = dump_self {
        let t = js::self_at(&j, i)?;
        match format {
            Format::Text => println!("{t}"),
            Format::Json => println!("{}", js::to_string_pretty(&js::tree(&t))),
        }
    } else {
        match format {
            Format::Text => print_text(&trace),
            Format::Json => println!("{}", js::to_string(&j)),
        }
    }
    Ok(match trace.status {
        Status::Error(_) => ExitCode::from(1),
        Status::Clash if strict => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    })
}

fn check(file: &Path, print: bool) -> Result<ExitCode, String> {
    let program = load(file)?;
    program.machine(None).map_err(|e| e.to_string())?;
    if print {
        print!("{}", program.to_source());
    } else {
        println!(
            "ok: {} symbols, rule of size {}",
            program.signature.len(),
            program.rule.size()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_probes(trials: usize, seed: u64, format: Format) -> ExitCode {
    let reports = probe::all(seed, trials);
    match format {
        Format::Text => {
            for r in &reports {
                println!("{r}");
                for v in r.violations.iter().chain(&r.trace_violations).take(5) {
                    println!("  {v}");
                }
            }
        }
        Format::Json => {
            let items: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "checked": r.checked,
                        "skipped": r.skipped,
                        "violations": r.violations,
                        "traces": r.traces,
                        "trace_violations": r.trace_violations,
                    })
                })
                .collect();
            println!("{}", js::to_string(&json!(items)));
        }
    }
    if reports.iter().all(probe::Report::ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn diff_self(file: &Path, i: usize, j: usize, rule: bool) -> Result<ExitCode, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let trace: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))?;
    let (t1, t2) = (js::self_at(&trace, i)?, js::self_at(&trace, j)?);
    println!("{}", tree_diff(&t1, &t2));
    if rule {
        println!("{}", tree_update_rule(&t1, &t2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            file,
            max_steps,
            trace,
            dump_self,
            format,
            strict,
        } => run(
            &file,
            max_steps,
            trace.as_deref(),
            dump_self,
            format,
            strict,
        ),
        Command::Check { file, print } => check(&file, print),
        Command::Probe {
            trials,
            seed,
            format,
        } => Ok(run_probes(trials, seed, format)),
        Command::DiffSelf { trace, i, j, rule } => diff_self(&trace, i, j, rule),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
