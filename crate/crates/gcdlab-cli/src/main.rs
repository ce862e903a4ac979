//! gcdlab command-line front end.
//!
//! Exit codes: 0 on success, 1 on computation failure (including selftest
//! failures), 2 on usage errors (clap's default).

mod args;
mod commands;
mod report;
mod selftest;

use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use args::Cli;
use report::{Format, Report, SCHEMA_VERSION};

fn main() {
    let cli = Cli::parse();
    let clock = Instant::now();

    let requested_threads = cli
        .threads
        .or_else(|| {
            std::env::var("GCDLAB_PARALLELISM")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if requested_threads > 0 {
        // ignore failure: the pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(requested_threads)
            .build_global();
    }

    let mut config = match serde_json::to_value(&cli.command) {
        Ok(Value::Object(m)) => m,
        _ => {
            eprintln!("error: config echo failed to serialize");
            std::process::exit(1);
        }
    };
    config.insert("seed".into(), json!(cli.seed));
    config.insert("parallelism".into(), json!(requested_threads));
    config.insert(
        "format".into(),
        json!(match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Human => "human",
        }),
    );

    match commands::execute(&cli.command, cli.seed) {
        Ok(rows) => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: cli.command.name().to_string(),
                config: Value::Object(config),
                rows,
            };
            let elapsed_ms = clock.elapsed().as_secs_f64() * 1e3;
            print!("{}", report.render(cli.format, elapsed_ms));
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
