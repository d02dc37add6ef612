//! Single runs, parameter sweeps and disorder ensembles.
//!
//! Points are evaluated on a rayon pool in chunks; each chunk is collected
//! in input order and handed to one writer, so output files do not depend on
//! the thread count or completion order.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use chern_core::{derive_seed, DisorderSpec};
use rayon::prelude::*;

use crate::config::{as_count, ConfigError, Model, Params, RunConfig};
use crate::pipeline::{evaluate, extra_names, is_quantized, Outcome};
use crate::record::{InputEcho, Layout, ResultRecord, Sink};

/// Points evaluated between two writes.
const CHUNK: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("at {point}: {source}")]
    Numerical {
        point: String,
        source: chern_core::Error,
    },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

/// What a finished run reports back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub points: usize,
    pub failures: usize,
}

/// Sets one named parameter.
pub fn assign(p: &mut Params, name: &str, v: f64) -> Result<(), ConfigError> {
    match name {
        "l" => {
            p.lx = as_count(name, v)?;
            p.ly = p.lx;
        }
        "lx" => p.lx = as_count(name, v)?,
        "ly" => p.ly = as_count(name, v)?,
        "t1" => p.t1 = v,
        "t2" => p.t2 = v,
        "phi" => p.phi = v,
        "delta" => p.delta = v,
        "t" => p.t = v,
        "lso" => p.lso = v,
        "lr" => p.lr = v,
        "w" => p.w = v,
        "margin" => p.margin = as_count(name, v)?,
        "q" => p.q = as_count(name, v)?,
        "fermi" => p.fermi = Some(v),
        other => return Err(ConfigError(format!("unknown parameter `{other}`"))),
    }
    Ok(())
}

struct Job {
    params: Params,
    axes: Vec<(String, f64)>,
    disorder: Option<DisorderSpec>,
    realization: Option<usize>,
}

fn describe(cfg: &RunConfig, job: &Job) -> String {
    let p = &job.params;
    let mut s = format!("Lx={} Ly={} ", p.lx, p.ly);
    s.push_str(&match cfg.model {
        Model::Haldane => format!("t1={} t2={} phi={} delta={}", p.t1, p.t2, p.phi, p.delta),
        Model::KaneMele => format!("t={} lso={} lr={} delta={}", p.t, p.lso, p.lr, p.delta),
    });
    if let Some(ef) = p.fermi {
        s.push_str(&format!(" fermi={ef}"));
    }
    if let Some(d) = &job.disorder {
        s.push_str(&format!(" W={} seed={}", d.strength, d.seed));
    }
    s
}

fn single_disorder(cfg: &RunConfig, p: &Params) -> Option<DisorderSpec> {
    (p.w != 0.0).then(|| DisorderSpec::new(p.w, cfg.seed))
}

fn record(cfg: &RunConfig, job: &Job, result: &Result<Outcome, chern_core::Error>, seconds: f64) -> ResultRecord {
    let input = InputEcho {
        model: cfg.model,
        method: cfg.method,
        variant: cfg.variant,
        params: job.params,
        grid: cfg.grid,
        gauge: cfg.gauge,
        obc: cfg.obc,
        axes: job.axes.clone(),
        disorder: job.disorder.as_ref().map(|d| (d.strength, d.seed)),
        realization: job.realization,
    };
    let seconds = cfg.timing.then_some(seconds);
    match result {
        Ok(o) => ResultRecord {
            input,
            value: Some(o.value),
            integer: Some(o.integer),
            extras: extra_names(cfg.method)
                .iter()
                .zip(&o.extras)
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            gap: o.diagnostics.gap,
            flatness: o.diagnostics.flatness,
            min_singular: o.diagnostics.min_singular,
            residue: o.diagnostics.imaginary_residue,
            std: None,
            status: "ok".into(),
            seconds,
        },
        Err(e) => ResultRecord {
            input,
            value: None,
            integer: None,
            extras: BTreeMap::new(),
            gap: None,
            flatness: None,
            min_singular: None,
            residue: None,
            std: None,
            status: format!("error: {e}"),
            seconds,
        },
    }
}

fn evaluate_jobs(cfg: &RunConfig, jobs: &[Job]) -> Vec<(Result<Outcome, chern_core::Error>, f64)> {
    jobs.par_iter()
        .map(|job| {
            let start = Instant::now();
            let r = evaluate(cfg, &job.params, job.disorder.as_ref());
            (r, start.elapsed().as_secs_f64())
        })
        .collect()
}

fn open_sink(cfg: &RunConfig, layout: Layout) -> Result<Sink, RunError> {
    let out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout()),
    };
    Ok(Sink::new(out, cfg.format, layout)?)
}

fn layout(cfg: &RunConfig, ensemble: bool) -> Layout {
    Layout {
        axes: cfg.sweeps.iter().map(|s| s.name.clone()).collect(),
        extras: extra_names(cfg.method).to_vec(),
        ensemble,
    }
}

/// Runs `cfg` on its own thread pool when a thread count is configured.
pub fn run(cfg: &RunConfig) -> Result<Summary, RunError> {
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(cfg))
        }
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Summary, RunError> {
    if cfg.disorder.is_some() {
        run_disorder(cfg)
    } else if !cfg.sweeps.is_empty() {
        run_sweep(cfg)
    } else {
        run_single(cfg).map(|_| Summary { points: 1, failures: 0 })
    }
}

/// Evaluates the base point; a numerical failure is returned as an error
/// and nothing is written.
pub fn run_single(cfg: &RunConfig) -> Result<ResultRecord, RunError> {
    let job = Job {
        params: cfg.params,
        axes: Vec::new(),
        disorder: single_disorder(cfg, &cfg.params),
        realization: None,
    };
    let start = Instant::now();
    let result = evaluate(cfg, &job.params, job.disorder.as_ref());
    let seconds = start.elapsed().as_secs_f64();
    if let Err(e) = result {
        return Err(RunError::Numerical {
            point: describe(cfg, &job),
            source: e,
        });
    }
    let rec = record(cfg, &job, &result, seconds);
    let mut sink = open_sink(cfg, layout(cfg, false))?;
    sink.write(&rec)?;
    sink.finish()?;
    Ok(rec)
}

fn sweep_jobs(cfg: &RunConfig) -> Result<Vec<Job>, ConfigError> {
    let mut grid: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for axis in &cfg.sweeps {
        let values = axis.values();
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((axis.name.clone(), *v));
                    p
                })
            })
            .collect();
    }
    grid.into_iter()
        .map(|axes| {
            let mut params = cfg.params;
            for (name, v) in &axes {
                assign(&mut params, name, *v)?;
            }
            if params.lx < 2 || params.ly < 2 {
                return Err(ConfigError("lattice sizes must be at least 2".into()));
            }
            Ok(Job {
                disorder: single_disorder(cfg, &params),
                params,
                axes,
                realization: None,
            })
        })
        .collect()
}

/// Evaluates the Cartesian product of the sweep axes (first axis outermost);
/// failures are recorded per row.
pub fn run_sweep(cfg: &RunConfig) -> Result<Summary, RunError> {
    let jobs = sweep_jobs(cfg)?;
    let mut sink = open_sink(cfg, layout(cfg, false))?;
    let mut failures = 0;
    for chunk in jobs.chunks(CHUNK) {
        for (job, (res, secs)) in chunk.iter().zip(evaluate_jobs(cfg, chunk)) {
            failures += usize::from(res.is_err());
            sink.write(&record(cfg, job, &res, secs))?;
        }
    }
    sink.finish()?;
    Ok(Summary {
        points: jobs.len(),
        failures,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Disorder ensembles: realization `r` at strength index `k` uses the seed
/// `derive_seed(seed, k, r)`. After the rows of each strength an aggregate
/// row carries the mean and standard deviation over successful realizations,
/// taken over the rounded integers for quantized methods.
pub fn run_disorder(cfg: &RunConfig) -> Result<Summary, RunError> {
    let quantized = is_quantized(cfg);
    let ens = cfg.disorder.as_ref().expect("disorder ensemble configured");
    let mut sink = open_sink(cfg, layout(cfg, true))?;
    let mut failures = 0;
    let mut points = 0;
    for (k, &w) in ens.strengths.iter().enumerate() {
        let jobs: Vec<Job> = (0..ens.realizations)
            .map(|r| {
                let mut params = cfg.params;
                params.w = w;
                Job {
                    params,
                    axes: Vec::new(),
                    disorder: Some(DisorderSpec::new(w, derive_seed(cfg.seed, k as u64, r as u64))),
                    realization: Some(r),
                }
            })
            .collect();
        let mut values = Vec::with_capacity(jobs.len());
        let mut group_failures = 0;
        for chunk in jobs.chunks(CHUNK) {
            for (job, (res, secs)) in chunk.iter().zip(evaluate_jobs(cfg, chunk)) {
                match &res {
                    Ok(o) => values.push(if quantized { o.integer as f64 } else { o.value }),
                    Err(_) => group_failures += 1,
                }
                sink.write(&record(cfg, job, &res, secs))?;
            }
        }
        points += jobs.len();
        failures += group_failures;
        let mut params = cfg.params;
        params.w = w;
        let mut agg = record(
            cfg,
            &Job {
                params,
                axes: Vec::new(),
                disorder: Some(DisorderSpec::new(w, cfg.seed)),
                realization: None,
            },
            &Err(chern_core::Error::InvalidSelection {
                reason: "no successful realization",
            }),
            0.0,
        );
        agg.seconds = None;
        if !values.is_empty() {
            let (mean, std) = mean_std(&values);
            agg.value = Some(mean);
            agg.std = Some(std);
            agg.status = if group_failures == 0 {
                "ok".into()
            } else {
                format!("partial: {group_failures} of {} realizations failed", jobs.len())
            };
        } else {
            agg.status = "error: every realization failed".into();
        }
        sink.write(&agg)?;
    }
    sink.finish()?;
    Ok(Summary { points, failures })
}
