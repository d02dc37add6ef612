//! Result records and their CSV / JSON serialization.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{Format, Gauge, MethodKind, Model, Params, Variant};

/// Everything that determined one evaluated point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub model: Model,
    pub method: MethodKind,
    pub variant: Variant,
    pub params: Params,
    pub grid: (usize, usize),
    pub gauge: Gauge,
    pub obc: bool,
    /// Swept parameters of this point, in axis order.
    pub axes: Vec<(String, f64)>,
    /// Disorder strength and seed actually used, if any.
    pub disorder: Option<(f64, u64)>,
    /// Realization index within a disorder ensemble.
    pub realization: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub input: InputEcho,
    pub value: Option<f64>,
    pub integer: Option<i64>,
    pub extras: BTreeMap<String, f64>,
    pub gap: Option<f64>,
    pub flatness: Option<f64>,
    pub min_singular: Option<f64>,
    pub residue: Option<f64>,
    /// Standard deviation over realizations (aggregate rows only).
    pub std: Option<f64>,
    /// `ok`, `error: …` or, for aggregates, `partial: …`.
    pub status: String,
    pub seconds: Option<f64>,
}

/// `%g`-style formatting with 12 significant digits, independent of locale.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Column layout shared by every row of one output file.
#[derive(Debug, Clone)]
pub struct Layout {
    pub axes: Vec<String>,
    pub extras: Vec<&'static str>,
    pub ensemble: bool,
}

impl Layout {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.axes.clone();
        if self.ensemble {
            h.extend(["w", "realization", "seed"].map(String::from));
        }
        h.extend(["value", "integer"].map(String::from));
        h.extend(self.extras.iter().map(|s| s.to_string()));
        h.extend(["gap", "flatness", "min_singular", "residue"].map(String::from));
        if self.ensemble {
            h.push("std".into());
        }
        h.extend(["status", "seconds"].map(String::from));
        h
    }

    fn row(&self, r: &ResultRecord) -> Vec<String> {
        let mut row: Vec<String> = r.input.axes.iter().map(|(_, v)| format_float(*v)).collect();
        if self.ensemble {
            let (w, seed) = r.input.disorder.unwrap_or((f64::NAN, 0));
            row.push(format_float(w));
            match r.input.realization {
                Some(k) => {
                    row.push(k.to_string());
                    row.push(seed.to_string());
                }
                None => {
                    row.push("mean".into());
                    row.push(String::new());
                }
            }
        }
        row.push(opt(r.value));
        row.push(r.integer.map(|i| i.to_string()).unwrap_or_default());
        for name in &self.extras {
            row.push(opt(r.extras.get(*name).copied()));
        }
        row.extend([opt(r.gap), opt(r.flatness), opt(r.min_singular), opt(r.residue)]);
        if self.ensemble {
            row.push(opt(r.std));
        }
        row.push(r.status.clone());
        row.push(opt(r.seconds));
        row
    }
}

/// Streams records in the order they are handed over.
pub enum Sink {
    Csv {
        writer: Box<csv::Writer<Box<dyn Write>>>,
        layout: Layout,
    },
    Json {
        out: Box<dyn Write>,
        first: bool,
    },
}

impl Sink {
    pub fn new(out: Box<dyn Write>, format: Format, layout: Layout) -> std::io::Result<Self> {
        match format {
            Format::Csv => {
                let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
                writer.write_record(layout.header()).map_err(into_io)?;
                Ok(Sink::Csv {
                    writer: Box::new(writer),
                    layout,
                })
            }
            Format::Json => {
                let mut out = out;
                out.write_all(b"[")?;
                Ok(Sink::Json { out, first: true })
            }
        }
    }

    pub fn write(&mut self, r: &ResultRecord) -> std::io::Result<()> {
        match self {
            Sink::Csv { writer, layout } => {
                writer.write_record(layout.row(r)).map_err(into_io)?;
                writer.flush()
            }
            Sink::Json { out, first } => {
                out.write_all(if *first { b"\n" } else { b",\n" })?;
                *first = false;
                serde_json::to_writer(&mut *out, r).map_err(std::io::Error::other)?;
                out.flush()
            }
        }
    }

    pub fn finish(self) -> std::io::Result<()> {
        match self {
            Sink::Csv { mut writer, .. } => writer.flush(),
            Sink::Json { mut out, .. } => {
                out.write_all(b"\n]\n")?;
                out.flush()
            }
        }
    }
}

fn into_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
