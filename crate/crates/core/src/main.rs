use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use boltzkit::cli::{error_json, parse_config_for, run, to_json_string, Command};
use boltzkit::par::init_threads_from_env;

/// Run a boltzkit experiment from a config file.
#[derive(Parser)]
#[command(name = "boltzkit", version)]
struct Args {
    /// strichartz, bilinear, annihilation, boardgame, duhamel, uniqueness or solve
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path without extension; overrides the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads_from_env();
    let parsed = fs::read_to_string(&args.config)
        .map_err(boltzkit::Error::from)
        .and_then(|text| parse_config_for(&text, Some(args.command)));
    let mut cfg = match parsed {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            let out = args
                .out
                .unwrap_or_else(|| PathBuf::from(format!("boltzkit-{}", args.command)));
            let mut path = out.into_os_string();
            path.push(".json");
            if let Ok(s) = to_json_string(&error_json(None, &e)) {
                let _ = fs::write(path, s);
            }
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = args.out {
        cfg.out_path = o;
    }
    let outcome = run(&cfg);
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    ExitCode::from(outcome.code as u8)
}
