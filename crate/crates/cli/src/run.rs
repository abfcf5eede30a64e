use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use spectral_pu::Error;

use crate::args::Command;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Why a command stopped, and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 4,
            Failure::Core(e) => match e {
                Error::Io(_) | Error::Image(_) | Error::Json(_) | Error::Parse(_) => 4,
                Error::InfiniteExtinction { .. } => 3,
                Error::Numerical(_) => 1,
                e if e.is_gamut_error() => 3,
                _ => 2,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Core(e) => match e {
                Error::OutOfGamut { .. } => "out_of_gamut",
                Error::BoundarySingular { .. } => "boundary_singular",
                Error::Infeasible(_) | Error::ConstraintInfeasible => "infeasible",
                Error::InfiniteExtinction { .. } => "infinite_extinction",
                Error::Io(_) | Error::Image(_) => "io",
                Error::Json(_) | Error::Parse(_) => "parse",
                Error::Numerical(_) => "internal",
                _ => "usage",
            },
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_line(&self) -> String {
        serde_json::json!({
            "error": self.code(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub seconds: f64,
}

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Command,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub timings: Vec<PhaseTiming>,
    pub result: serde_json::Value,
}

impl RunManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Json(e)))
    }
}

/// Output directory, files written so far and phase timings of a run.
pub struct Run {
    out: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    timings: Vec<PhaseTiming>,
    result: serde_json::Value,
}

impl Run {
    pub fn new(out: &Path) -> CliResult<Self> {
        fs::create_dir_all(out).map_err(|e| Failure::Io(format!("cannot create {}: {e}", out.display())))?;
        Ok(Run {
            out: out.to_path_buf(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: Vec::new(),
            result: serde_json::Value::Null,
        })
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let value = f();
        self.record(name, start.elapsed().as_secs_f64());
        value
    }

    pub fn record(&mut self, name: &str, seconds: f64) {
        self.timings.push(PhaseTiming {
            phase: name.to_string(),
            seconds,
        });
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<PathBuf> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    /// Registers a file written by someone else.
    pub fn wrote(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    pub fn set_result(&mut self, result: serde_json::Value) {
        self.result = result;
    }

    pub fn finish(self, command: &Command) -> CliResult<()> {
        let manifest = RunManifest {
            command: command.name().to_string(),
            parameters: command.clone(),
            seed: command.seed(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: self.inputs,
            outputs: self.outputs,
            timings: self.timings,
            result: self.result,
        };
        let path = self.out.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
    }
}
