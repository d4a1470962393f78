use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{exit, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Computed and shown, but outside the regime where a check is asserted.
    Reported,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Reported => "REPORTED",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass | Status::Reported => exit::PASS,
            Status::Fail => exit::CHECK_FAILED,
        }
    }
}

/// One command's result in every output format it supports.
#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub json: Value,
    pub pretty: String,
    pub csv: Option<String>,
}

impl Report {
    pub fn new(status: Status, json: Value) -> Self {
        Report {
            status,
            json,
            pretty: String::new(),
            csv: None,
        }
    }

    pub fn line(mut self, text: impl AsRef<str>) -> Self {
        let _ = writeln!(self.pretty, "{}", text.as_ref());
        self
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&self.json).expect("json values serialize")
            )),
            Format::Pretty => Ok(format!("{}{}\n", self.pretty, self.status.label())),
            Format::Csv => self.csv.clone().ok_or_else(|| {
                CliError::Usage("csv output is only available for coefficient tables".into())
            }),
        }
    }
}
