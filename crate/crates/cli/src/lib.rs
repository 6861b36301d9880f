//! The `corrterm` command-line frontend.
//!
//! Output is TSV by default (`#` lines are comments) or JSON with
//! `--format json`. Exit status is 0 on success or a produced certificate,
//! 2 when no certificate was produced, and 1 on any error, which is reported
//! as a single line `error: KIND: MESSAGE` on stderr.

pub mod cache;
pub mod commands;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Arg, ArgAction};

use crate::cache::{Cache, VERSION_TAG};
use crate::commands::Commands;

pub const CACHE_ENV: &str = "CORRTERM_CACHE";

pub fn app(commands: &Commands) -> clap::Command {
    let mut app = clap::Command::new("corrterm")
        .version(VERSION_TAG)
        .about("Exact Heegaard Floer correction terms and concordance obstructions")
        .subcommand_required(true)
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(["tsv", "json"])
                .default_value("tsv"),
        )
        .arg(
            Arg::new("cache")
                .long("cache")
                .global(true)
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .action(ArgAction::Set)
                .help(format!("append-only result cache (default: ${CACHE_ENV})")),
        );
    for c in commands.iter() {
        app = app.subcommand(c.definition());
    }
    app
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Run one invocation; `args` includes the program name.
pub fn run<I, T>(
    args: I,
    cache_env: Option<OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let commands = Commands::standard();
    let matches = match app(&commands).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let text = e.to_string();
                    let first = text
                        .lines()
                        .find(|l| !l.trim().is_empty())
                        .unwrap_or("invalid arguments");
                    let _ = writeln!(
                        err,
                        "error: usage: {}",
                        one_line(first.trim_start_matches("error: "))
                    );
                    1
                }
            };
        }
    };
    let json = matches.get_one::<String>("format").map(String::as_str) == Some("json");
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = commands.get(name).expect("registered");

    let fail = |err: &mut dyn Write, e: corrterm::Error| {
        let _ = writeln!(err, "error: {}: {}", e.kind(), one_line(&e.to_string()));
        1
    };
    let plan = match cmd.plan(sub) {
        Ok(p) => p,
        Err(e) => return fail(err, e),
    };

    let cache_path = matches
        .get_one::<PathBuf>("cache")
        .cloned()
        .or_else(|| cache_env.filter(|v| !v.is_empty()).map(PathBuf::from));
    let mut cache = cache_path.map(|p| Cache::open(&p, err));

    let cached = match (&mut cache, &plan.key) {
        (Some(c), Some(k)) => c.get(k),
        _ => None,
    };
    let report = match cached {
        Some(v) => v,
        None => match (plan.job)() {
            Ok(v) => {
                if let (Some(c), Some(k)) = (&mut cache, &plan.key) {
                    c.put(k, &v, err);
                }
                v
            }
            Err(e) => return fail(err, e),
        },
    };

    let text = if json {
        serde_json::to_string_pretty(&report).expect("json") + "\n"
    } else {
        cmd.render_tsv(&report)
    };
    let _ = out.write_all(text.as_bytes());
    if let Some(c) = &cache {
        let _ = writeln!(err, "cache: {} hit(s), {} miss(es)", c.hits, c.misses);
    }
    cmd.exit_code(&report)
}
