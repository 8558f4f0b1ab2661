//! Command-line front end: argument grammar, dispatch, output formats, the
//! result cache and the verification suite.

pub mod args;
pub mod cache;
pub mod commands;
pub mod emit;
pub mod report;
pub mod suite;

use serde_json::json;

use args::{Cli, Command, VerifyArgs};
use cache::{Cache, CacheEvent};
use commands::{CliError, CliResult};
use emit::{emit, Format, Rendered, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_THEOREM_MISMATCH: i32 = 2;

/// What to print and how to exit.
#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
    if let Command::Verify(v) = &cli.command {
        return verify(v, cli.format);
    }
    let compute =
        || -> CliResult<String> { Ok(emit(&commands::run(&cli.command, cli.seed)?, cli.format)?) };
    let mut stderr = String::new();
    let stdout = match &cli.cache_dir {
        None => compute()?,
        Some(dir) => {
            let cache = Cache::new(dir, cli.cache_audit)?;
            let key = format!("{:?} seed={} format={}", cli.command, cli.seed, cli.format);
            let (value, event) = cache.get_or_compute(&key, env!("CARGO_PKG_VERSION"), compute)?;
            if event == CacheEvent::AuditFailed {
                stderr.push_str(
                    "warning: cached result differed from recomputation and was replaced\n",
                );
            }
            value
        }
    };
    Ok(Output {
        stdout,
        stderr,
        code: EXIT_OK,
    })
}

fn verify(v: &VerifyArgs, format: Format) -> CliResult<Output> {
    if v.list {
        let pattern = glob::Pattern::new(&v.filter)
            .map_err(|e| suite::SuiteError::BadFilter(v.filter.clone(), e.to_string()))?;
        let mut t = Table::new(&["id", "criterion", "kind", "slow", "summary"]);
        let mut rows = Vec::new();
        for c in suite::registry().iter().filter(|c| pattern.matches(c.id)) {
            t.push(vec![
                c.id.into(),
                c.criterion.to_string(),
                c.severity.to_string(),
                c.slow.to_string(),
                c.summary.into(),
            ]);
            rows.push(json!({"id": c.id, "criterion": c.criterion, "kind": c.severity, "slow": c.slow, "summary": c.summary}));
        }
        if rows.is_empty() {
            return Err(suite::SuiteError::UnknownCheck(v.filter.clone()).into());
        }
        return Ok(Output {
            stdout: emit(&Rendered::json(rows).with_table(t), format)?,
            stderr: String::new(),
            code: EXIT_OK,
        });
    }
    let reports = suite::run_suite(&v.filter, v.slow)?;
    let mut t = Table::new(&[
        "id",
        "criterion",
        "kind",
        "status",
        "checked",
        "mismatches",
        "runtime_ms",
    ]);
    let mut stderr = String::new();
    for r in &reports {
        t.push(vec![
            r.id.clone(),
            r.criterion.to_string(),
            r.kind.to_string(),
            r.status.to_string(),
            r.checked.to_string(),
            r.mismatch_count.to_string(),
            r.runtime_ms.to_string(),
        ]);
        if r.is_mismatch() {
            let first = r
                .witnesses
                .first()
                .map(|w| w.witness.as_str())
                .unwrap_or("no cases checked");
            stderr.push_str(&format!(
                "MISMATCH [{}] {}: {} case(s), first at {first}\n",
                r.kind, r.id, r.mismatch_count
            ));
        }
    }
    let code = exit_code(&reports);
    Ok(Output {
        stdout: emit(&Rendered::json(&reports).with_table(t), format)?,
        stderr,
        code,
    })
}

/// Only theorem mismatches fail the run.
pub fn exit_code(reports: &[report::VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.is_failure()) {
        EXIT_THEOREM_MISMATCH
    } else {
        EXIT_OK
    }
}

/// Parses `argv` and runs it, mapping every failure to an exit code.
pub fn main_with<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            } else {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => Output {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_USAGE,
        },
    }
}
