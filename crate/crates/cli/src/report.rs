use std::fs;
use std::io::Write;
use std::path::Path;

use recurlab::Error;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "recurlab.report/1";

pub const EXIT_OK: u8 = 0;
pub const EXIT_PROPERTY: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;

/// A finished run: the JSON envelope plus an optional table for CSV output.
pub struct Report {
    pub command: String,
    pub statement: &'static str,
    pub parameters: Value,
    pub result: Value,
    pub holds: bool,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, statement: &'static str, parameters: Value, result: impl Serialize, holds: bool) -> Self {
        Report {
            command: command.to_string(),
            statement,
            parameters,
            result: serde_json::to_value(result).expect("reports serialize"),
            holds,
            table: None,
        }
    }

    pub fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "schema": SCHEMA,
            "command": self.command,
            "statement": self.statement,
            "parameters": self.parameters,
            "holds": self.holds,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("json");
        s.push('\n');
        s
    }

    /// The table if there is one, else `check,holds` rows from the boolean
    /// fields at the top of the result.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            None => {
                w.write_record(["check", "holds"])?;
                w.write_record(["all", &self.holds.to_string()])?;
                if let Value::Object(m) = &self.result {
                    for (k, v) in m {
                        if let Value::Bool(b) = v {
                            w.write_record([k.as_str(), &b.to_string()])?;
                        }
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Structural(_) | Error::Domain(_) | Error::Convergence { .. } => EXIT_PARSE,
        Error::Precondition { .. } | Error::Construction(_) | Error::TooLarge { .. } | Error::Precision { .. } => {
            EXIT_PRECONDITION
        }
    }
}

/// The report written for a rejected run.
pub fn error_json(command: &str, e: &Error) -> String {
    let kind = match e {
        Error::Parse { .. } => "parse",
        Error::Structural(_) => "structural",
        Error::Domain(_) => "domain",
        Error::Convergence { .. } => "convergence",
        Error::Precondition { .. } => "precondition",
        Error::Construction(_) => "construction",
        Error::TooLarge { .. } => "too-large",
        Error::Precision { .. } => "precision",
    };
    let mut detail = json!({ "kind": kind, "message": e.to_string() });
    match e {
        Error::Parse { location, .. } => detail["location"] = json!(location),
        Error::Precondition { hypothesis, witness } => {
            detail["hypothesis"] = json!(hypothesis);
            detail["witness"] = json!(witness);
        }
        Error::Precision { enclosures } => {
            let f: Vec<String> = enclosures.iter().map(recurlab::rational::format).collect();
            detail["lhs"] = json!([f[0], f[1]]);
            detail["rhs"] = json!([f[2], f[3]]);
        }
        _ => {}
    }
    let v = json!({ "schema": SCHEMA, "command": command, "error": detail });
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}
