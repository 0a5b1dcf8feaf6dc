mod args;
mod config;
mod run;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};
use walklab::{with_action, Error};

use args::{Cli, Command, Format};
use run::Output;

pub const SCHEMA: &str = "walklab.report.v1";

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } | Error::RangeExhausted(_) => EXIT_RESOURCE,
        Error::InvariantViolation(_) | Error::Precondition { .. } => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

fn uses_seed(cmd: &Command) -> bool {
    use args::ModeArg::Mc;
    match cmd {
        Command::Walk(a) => a.mode == Mc,
        Command::InvertedOrbit(a) => a.mode == Some(Mc) || (a.mode.is_none() && a.samples.is_some()),
        Command::Lamplighter(a) => a.mode == Mc,
        Command::Spectral(a) => a.mode == Mc,
        Command::Liouville(_) | Command::Ball(_) | Command::Verify(_) => false,
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    spec: Value,
    result: &'a Value,
}

fn spec_echo(cmd: &Command) -> Value {
    let v = match cmd {
        Command::Walk(a) => serde_json::to_value(a),
        Command::InvertedOrbit(a) => serde_json::to_value(a),
        Command::Lamplighter(a) => serde_json::to_value(a),
        Command::Liouville(a) => serde_json::to_value(a),
        Command::Spectral(a) => serde_json::to_value(a),
        Command::Ball(a) => serde_json::to_value(a),
        Command::Verify(a) => serde_json::to_value(a),
    };
    v.expect("arguments serialize")
}

fn emit(cmd: &Command, out: &Output) -> Result<(), Error> {
    let common = cmd.common();
    let text = match common.format {
        Format::Json => {
            let env = Envelope { schema: SCHEMA, version: env!("CARGO_PKG_VERSION"), command: cmd.name(), spec: spec_echo(cmd), result: &out.result };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Encoding(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => out
            .csv
            .clone()
            .ok_or_else(|| Error::Config(format!("{} has no CSV projection; use --format json", cmd.name())))?,
    };
    match &common.output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify(cmd: &Command, ids: &[u8]) -> Result<bool, Error> {
    use walklab::verify::{run_all, run_one, verdict_line};
    let mut stdout = std::io::stdout().lock();
    let mut all_ok = true;
    let mut criteria = Vec::new();
    let mut record = |c: walklab::verify::Criterion, t: std::time::Duration| {
        let _ = writeln!(stdout, "{}", verdict_line(&c, t));
        all_ok &= c.passed && t <= c.time_limit;
        criteria.push(c);
    };
    if ids.is_empty() {
        let results = std::cell::RefCell::new(Vec::new());
        run_all(|c, t| results.borrow_mut().push((c.clone(), t)));
        for (c, t) in results.into_inner() {
            record(c, t);
        }
    } else {
        for &id in ids {
            let start = Instant::now();
            let c = run_one(id);
            record(c, start.elapsed());
        }
    }
    let passed = criteria.iter().filter(|c| c.passed).count();
    let _ = writeln!(std::io::stdout().lock(), "{passed}/{} criteria pass", criteria.len());
    if cmd.common().output.is_some() {
        emit(cmd, &Output { result: json!({"criteria": criteria, "all_pass": all_ok}), csv: None, failed: !all_ok })?;
    }
    Ok(all_ok)
}

fn dispatch(cmd: &Command, seed: u64) -> Result<Output, Error> {
    match cmd {
        Command::Walk(a) => with_action!(&run::build(&a.spec)?, g => run::walk(g, a, seed)),
        Command::InvertedOrbit(a) => with_action!(&run::build(&a.spec)?, g => run::inverted_orbit(g, a, seed)),
        Command::Lamplighter(a) => run::lamplighter(a, seed),
        Command::Liouville(a) => with_action!(&run::build(&a.spec)?, g => run::liouville(g, a)),
        Command::Spectral(a) => match &a.network {
            Some(p) => run::network_expansion(p),
            None => with_action!(&run::build(&a.spec)?, g => run::spectral(g, a, seed)),
        },
        Command::Ball(a) => with_action!(&run::build(&a.spec)?, g => run::ball(g, a)),
        Command::Verify(_) => unreachable!("verify is handled separately"),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("walklab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.command.common().threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("walklab: cannot size the worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let seed = match cli.command.common().seed {
        Some(s) => s,
        None if uses_seed(&cli.command) => {
            let s = walklab::mc::fresh_seed();
            eprintln!("seed: {s}");
            cli.command.common_mut().seed = Some(s);
            s
        }
        None => 0,
    };
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Verify(v) => verify(&cli.command, &v.criterion).map(|ok| (ok, None)),
        cmd => dispatch(cmd, seed).and_then(|out| {
            emit(cmd, &out)?;
            Ok((!out.failed, Some(out)))
        }),
    };
    // Wall-clock stays on stderr so that reports replay byte for byte.
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok((true, _)) => ExitCode::SUCCESS,
        Ok((false, _)) => {
            eprintln!("walklab: a checked property failed");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(e) => {
            eprintln!("walklab: {} failed: {e}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
