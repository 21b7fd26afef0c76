//! Command-line front end: parse, run, extract and check verification
//! conditions, synthesize programs from condition lists, and emit C.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use liffig::interp::{self, run_with_observer};
use liffig::pretty::program_to_string;
use liffig::state::trace_to_text;
use liffig::vc::{check_vcs, vcs_to_liffig, witness_text, NotCheckableReason, Tally};
use liffig::vcfile::{parse_vc_file, write_vc_file, VcFile};
use liffig::{
    cgen, parse_term, parse_program, Diagnostic, DomainWindow, Ident, Program, RunConfig,
    RunResult, VariantVerdict, VcVerdict,
};

/// Exit status conventions, shared by every subcommand: 0 for success,
/// 1 for usage and parse errors, 2 for a run or condition that failed
/// (abort, assertion violation, counterexample), 3 for an arithmetic fault.
const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_FAULT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "liffig",
    about = "Tools for labeled guarded-command programs",
    version,
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a program and report diagnostics.
    Check {
        /// A `.lif` source file.
        file: PathBuf,
    },
    /// Run a program and print the outcome.
    Run(RunArgs),
    /// Print a program's verification conditions as a condition list.
    Vcs {
        /// A `.lif` source file.
        file: PathBuf,
        /// Write the list here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force check verification conditions over a finite window.
    Verify(VerifyArgs),
    /// Build a program from a verification-condition list.
    Synth {
        /// A `.vc` condition-list file.
        file: PathBuf,
        /// Write the program here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a program to C.
    Transpile(TranspileArgs),
}

#[derive(Args)]
struct RunArgs {
    /// A `.lif` source file.
    file: PathBuf,
    /// Input binding `var=value`; repeatable, and several may be given
    /// separated by commas.
    #[arg(long, value_name = "VAR=VALUE")]
    set: Vec<String>,
    /// Maximum number of label visits.
    #[arg(long)]
    fuel: Option<u64>,
    /// Termination measure to check over the finished trace.
    #[arg(long, value_name = "TERM")]
    variant: Option<String>,
    /// Write the visited labels and states to this file.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Copy each input `v` into the ghost `v0` when `v0` is declared
    /// and not set explicitly.
    #[arg(long)]
    bind_ghosts: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// A `.lif` program (its conditions are extracted) or a `.vc` list.
    file: PathBuf,
    /// Window `lo..hi` for every variable and array cell, inclusive.
    #[arg(long, value_name = "LO..HI")]
    window: Option<String>,
}

#[derive(Args)]
struct TranspileArgs {
    /// A `.lif` source file.
    file: PathBuf,
    /// Name of the emitted C function.
    #[arg(long, default_value = "f")]
    name: String,
    /// Function parameters, in order; comma separated.
    #[arg(long, value_delimiter = ',', value_name = "VAR,...")]
    params: Vec<String>,
    /// Variable returned when the program's `return` term is this variable.
    #[arg(long, value_name = "VAR")]
    return_var: Option<String>,
    /// Assert every label's assertion at runtime.
    #[arg(long)]
    checked: bool,
    /// Emit `long long` instead of `int`.
    #[arg(long)]
    wide: bool,
    /// Write the C text here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors exit 1; --help and --version exit 0.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<u8, String> {
    match cmd {
        Cmd::Check { file } => cmd_check(&file),
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Vcs { file, out } => cmd_vcs(&file, out.as_deref()),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Synth { file, out } => cmd_synth(&file, out.as_deref()),
        Cmd::Transpile(args) => cmd_transpile(&args),
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_program(path: &Path) -> Result<(Program, Vec<Diagnostic>), u8> {
    let source = match read(path) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return Err(EXIT_USAGE);
        }
    };
    match parse_program(&source) {
        Ok(parsed) => Ok((parsed.program, parsed.warnings)),
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            Err(EXIT_USAGE)
        }
    }
}

fn cmd_check(file: &Path) -> Result<u8, String> {
    let source = read(file)?;
    match parse_program(&source) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                println!("{w}");
            }
            println!(
                "ok: {} declaration(s), {} block(s)",
                parsed.program.decls.len(),
                parsed.program.blocks.len()
            );
            Ok(EXIT_OK)
        }
        Err(diags) => {
            for d in &diags {
                println!("{d}");
            }
            Ok(EXIT_USAGE)
        }
    }
}

fn parse_inputs(program: &Program, args: &RunArgs) -> Result<BTreeMap<Ident, i64>, String> {
    let mut inputs = BTreeMap::new();
    for chunk in args.set.iter().flat_map(|s| s.split(',')) {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (name, value) = interp::parse_binding(chunk)?;
        match program.decl(&name) {
            Some(d) if d.kind == liffig::DeclKind::Scalar => {}
            Some(_) => return Err(format!("`{name}` is an array; --set binds scalars")),
            None => return Err(format!("unknown variable `{name}` in --set")),
        }
        inputs.insert(name, value);
    }
    if args.bind_ghosts {
        let ghosts: Vec<(Ident, i64)> = inputs
            .iter()
            .filter_map(|(v, val)| {
                let ghost = Ident::new(&format!("{v}0")).ok()?;
                match program.decl(&ghost) {
                    Some(d) if d.kind == liffig::DeclKind::Scalar => Some((ghost, *val)),
                    _ => None,
                }
            })
            .collect();
        for (ghost, val) in ghosts {
            inputs.entry(ghost).or_insert(val);
        }
    }
    Ok(inputs)
}

fn result_code(result: &RunResult) -> u8 {
    match result {
        RunResult::Halted(_) => EXIT_OK,
        RunResult::Fault(..) => EXIT_FAULT,
        _ => EXIT_FAILED,
    }
}

fn cmd_run(args: &RunArgs) -> Result<u8, String> {
    let (program, warnings) = match load_program(&args.file) {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    for w in &warnings {
        eprintln!("{w}");
    }
    let inputs = parse_inputs(&program, args)?;
    let mut cfg = RunConfig::default();
    if let Some(fuel) = args.fuel {
        cfg.fuel = fuel;
    }
    let variant = match &args.variant {
        Some(text) => {
            let t = parse_term(text).map_err(|d| format!("bad --variant: {d}"))?;
            cfg.variant = Some(t.clone());
            Some(t)
        }
        None => None,
    };

    // A trace is only recorded when something will read it.
    let wants_trace = args.trace.is_some() || variant.is_some();
    let mut code;
    if wants_trace {
        let trace = interp::run(&program, &inputs, &cfg);
        for w in &trace.warnings {
            eprintln!("note: {w}");
        }
        println!("RESULT {}", trace.result);
        code = result_code(&trace.result);
        if let Some(path) = &args.trace {
            emit(&trace_to_text(&trace), Some(path))?;
        }
        if let Some(term) = &variant {
            match interp::check_variant(&trace, term) {
                Ok(VariantVerdict::Ok) => println!("VARIANT ok"),
                Ok(VariantVerdict::ViolationAt(i)) => {
                    let (label, state) = &trace.visits[i];
                    let value = liffig::eval::eval_term(term, state)
                        .map(|v| v.to_string())
                        .unwrap_or_else(|k| format!("fault: {k}"));
                    println!("VARIANT violated at visit {i} (label {label}, value {value})");
                    code = code.max(EXIT_FAILED);
                }
                Err(kind) => {
                    println!("VARIANT fault: {kind}");
                    code = code.max(EXIT_FAULT);
                }
            }
        }
    } else {
        let summary = run_with_observer(&program, &inputs, &cfg, |_, _| {});
        for w in &summary.warnings {
            eprintln!("note: {w}");
        }
        println!("RESULT {}", summary.result);
        code = result_code(&summary.result);
    }
    Ok(code)
}

fn cmd_vcs(file: &Path, out: Option<&Path>) -> Result<u8, String> {
    let (program, warnings) = match load_program(file) {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    for w in &warnings {
        eprintln!("{w}");
    }
    let vcfile = VcFile::from_program(&program).map_err(|d| d.to_string())?;
    emit(&write_vc_file(&vcfile), out)?;
    Ok(EXIT_OK)
}

fn parse_window(text: &str) -> Result<DomainWindow, String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("bad --window `{text}`; expected `lo..hi`"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad window bound `{lo}`"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad window bound `{hi}`"))?;
    if hi < lo {
        return Err(format!("empty window `{text}`"));
    }
    Ok(DomainWindow::uniform(lo, hi))
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    let window = match &args.window {
        Some(text) => parse_window(text)?,
        None => DomainWindow::default(),
    };
    let is_vc_file = args.file.extension().is_some_and(|e| e == "vc");
    let vcs = if is_vc_file {
        let source = read(&args.file)?;
        let vcfile = match parse_vc_file(&source) {
            Ok(f) => f,
            Err(diags) => {
                for d in &diags {
                    eprintln!("{d}");
                }
                return Ok(EXIT_USAGE);
            }
        };
        vcfile.to_vcs().map_err(|d| d.to_string())?
    } else {
        let (program, warnings) = match load_program(&args.file) {
            Ok(p) => p,
            Err(code) => return Ok(code),
        };
        for w in &warnings {
            eprintln!("{w}");
        }
        liffig::vc::extract_vcs(&program).map_err(|e| e.to_string())?
    };

    let (verdicts, tally) = check_vcs(&vcs, &window).map_err(|e| e.to_string())?;
    for (vc, verdict) in vcs.iter().zip(&verdicts) {
        let head = format!("({} -> {})", vc.pre_label, vc.post_label);
        match verdict {
            VcVerdict::Valid => println!("{head} VALID"),
            VcVerdict::CounterExample { state, post_state } => {
                let suffix = if post_state.is_none() { " (command faults)" } else { "" };
                println!("{head} COUNTEREXAMPLE {}{suffix}", witness_text(state));
            }
            VcVerdict::NotCheckable(NotCheckableReason::Opaque) => {
                println!("{head} NOTCHECKABLE (prose)");
            }
            VcVerdict::NotCheckable(NotCheckableReason::Hole) => {
                println!("{head} NOTCHECKABLE (hole)");
            }
        }
    }
    let Tally { valid, counter_examples, not_checkable } = tally;
    println!("{valid} VALID, {counter_examples} COUNTEREXAMPLE, {not_checkable} NOTCHECKABLE");
    Ok(if counter_examples > 0 { EXIT_FAILED } else { EXIT_OK })
}

fn cmd_synth(file: &Path, out: Option<&Path>) -> Result<u8, String> {
    let source = read(file)?;
    let vcfile = match parse_vc_file(&source) {
        Ok(f) => f,
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            return Ok(EXIT_USAGE);
        }
    };
    let vcs = vcfile.to_vcs().map_err(|d| d.to_string())?;
    let program = vcs_to_liffig(
        &vcs,
        &vcfile.assertion_map(),
        &vcfile.start,
        &vcfile.halt,
        &vcfile.return_term,
    )
    .map_err(|e| e.to_string())?;
    emit(&program_to_string(&program), out)?;
    Ok(EXIT_OK)
}

fn cmd_transpile(args: &TranspileArgs) -> Result<u8, String> {
    let (program, warnings) = match load_program(&args.file) {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    for w in &warnings {
        eprintln!("{w}");
    }
    let mut opts = cgen::CgenOptions {
        name: args.name.clone(),
        checked: args.checked,
        wide: args.wide,
        ..cgen::CgenOptions::default()
    };
    for p in &args.params {
        opts.params.push(Ident::new(p.trim()).map_err(|e| e.to_string())?);
    }
    if let Some(rv) = &args.return_var {
        opts.return_var = Some(Ident::new(rv.trim()).map_err(|e| e.to_string())?);
    }
    let text = cgen::to_c(&program, &opts).map_err(|e| e.to_string())?;
    emit(&text, args.out.as_deref())?;
    Ok(EXIT_OK)
}
