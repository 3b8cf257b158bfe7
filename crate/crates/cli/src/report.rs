use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::{Cli, Format};

pub const SCHEMA: &str = "rotalg-report/1";

/// Failure of a run with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] rotalg::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use rotalg::Error::*;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Lib(e) => match e {
                Parse(_) | Parameter(_) => 2,
                Precondition(_) | NotInvertible(_) | Pole { .. } | Undecidable(_) | TooManyTerms(_) => 3,
                NonConvergence { .. } | PrecisionExhausted { .. } => 4,
            },
        }
    }
}

/// Result of a verb: the JSON payload and, where the verb has one, a CSV table.
pub struct Output {
    pub result: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Self { result: to_value(result)?, table: None })
    }

    pub fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }
}

pub fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    version: &'static str,
    verb: &'static str,
    config: &'a Cli,
    result: &'a Value,
}

/// `key,value` rows for verbs without a natural table.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
        other => rows.push(vec![prefix.to_string(), other.to_string()]),
    }
}

fn render(cli: &Cli, out: &Output) -> Result<Vec<u8>, CliError> {
    match cli.format {
        Format::Json => {
            let env = Envelope { schema: SCHEMA, version: rotalg::VERSION, verb: cli.verb.name(), config: cli, result: &out.result };
            let mut s = serde_json::to_vec_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(e.to_string());
            match &out.table {
                Some(t) => {
                    w.write_record(&t.header).map_err(io)?;
                    for r in &t.rows {
                        w.write_record(r).map_err(io)?;
                    }
                }
                None => {
                    let mut rows = Vec::new();
                    flatten("", &out.result, &mut rows);
                    w.write_record(["key", "value"]).map_err(io)?;
                    for r in rows {
                        w.write_record(r).map_err(io)?;
                    }
                }
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

pub fn emit(cli: &Cli, out: Output) -> Result<(), CliError> {
    let bytes = render(cli, &out)?;
    match &cli.out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
