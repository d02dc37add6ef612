use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

use chern_cli::config::{parse_config_text, ConfigError, RunConfig, KEYS};
use chern_cli::run::{run, RunError};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

fn help(key: &str) -> &'static str {
    match key {
        "lx" | "ly" => "cells along one lattice direction",
        "l" => "cells along both directions",
        "t1" => "Haldane nearest-neighbour hopping",
        "t2" => "Haldane next-nearest-neighbour hopping",
        "phi" => "Haldane flux phase (accepts pi expressions, e.g. -pi/2)",
        "delta" => "staggered sublattice potential",
        "t" => "Kane-Mele hopping",
        "lso" => "Kane-Mele spin-orbit coupling",
        "lr" => "Kane-Mele Rashba coupling",
        "method" => "tbc-link, tbc-fd, noncomm, noncomm-hi, bott, spin-split, spin-generalized, chern-matrix, oracle, flatness, wilson, spin-tbc",
        "variant" => "real-space evaluator of the spin methods: bott or noncomm",
        "q" => "finite-difference order of noncomm-hi",
        "gauge" => "twist gauge: boundary or uniform",
        "fermi" => "fill all states below this energy instead of half filling",
        "margin" => "OBC truncation width",
        "w" => "disorder strength of a single run or sweep",
        "seed" => "base RNG seed",
        "disorder-w" => "comma-separated disorder strengths of an ensemble",
        "realizations" => "realizations per disorder strength",
        "sweep" => "outer sweep axis name=start:stop:count",
        "sweep2" => "inner sweep axis name=start:stop:count",
        "out" => "output file (default: stdout)",
        "format" => "csv or json",
        "threads" => "worker threads (default: all cores)",
        _ => "",
    }
}

fn command() -> Command {
    let mut cmd = Command::new("chern")
        .about("Chern and spin Chern numbers of honeycomb tight-binding models")
        .arg(Arg::new("model").help("haldane or kane-mele"))
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key = value file; flags override its entries"),
        );
    for &key in KEYS.iter().filter(|k| **k != "model") {
        let arg = Arg::new(key).long(key).help(help(key));
        let arg = match key {
            "obc" => arg.action(ArgAction::SetTrue).help("open boundaries with truncated positions"),
            "timing" => arg.action(ArgAction::SetTrue).help("fill the seconds column"),
            "grid" => arg.num_args(2).value_names(["NX", "NY"]).help("twist or momentum grid"),
            _ => arg.allow_hyphen_values(true),
        };
        cmd = cmd.arg(arg);
    }
    cmd
}

fn merged(m: &ArgMatches) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{path}: {e}")))?;
            parse_config_text(&text).map_err(|e| ConfigError(format!("{path}: {e}")))?
        }
        None => BTreeMap::new(),
    };
    for &key in KEYS {
        if m.value_source(key) != Some(ValueSource::CommandLine) {
            continue;
        }
        let value = match key {
            "obc" | "timing" => "true".to_string(),
            _ => m
                .get_many::<String>(key)
                .into_iter()
                .flatten()
                .cloned()
                .collect::<Vec<_>>()
                .join(" "),
        };
        map.insert(key.to_string(), value);
    }
    Ok(map)
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match merged(&matches).and_then(|map| RunConfig::from_map(&map)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("chern: configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg) {
        Ok(s) if s.failures > 0 => {
            eprintln!("chern: {} of {} points failed (see the status column)", s.failures, s.points);
            ExitCode::from(EXIT_PARTIAL)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chern: {e}");
            ExitCode::from(match e {
                RunError::Numerical { .. } => EXIT_NUMERICAL,
                RunError::Config(_) | RunError::Io(_) => EXIT_CONFIG,
            })
        }
    }
}
