//! Merges command-line flags with an optional TOML file of defaults.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::{Command, Failure, SharedArgs};

const SHARED_KEYS: [&str; 4] = ["grid-M", "ppi", "out", "seed"];

fn command_keys(command: &Command) -> &'static [&'static str] {
    match command {
        Command::Duality { .. } => &["trials", "n-max"],
        Command::Blowup { .. } => &["m"],
        Command::FejerConverge { .. } => &["n", "arc", "final-tol"],
        Command::Witness { .. } => &["stages", "target"],
        Command::Density { .. } => &["degrees", "function"],
        Command::Maximal { .. } => &["orders"],
        Command::TaylorFourier { .. } => &["trials", "radii", "degree"],
    }
}

pub struct Settings {
    table: Table,
    pub shared_grid_m: Option<usize>,
    pub shared_ppi: Option<usize>,
    pub shared_seed: Option<u64>,
    out: Option<PathBuf>,
}

fn bad(key: &str, expected: &str) -> Failure {
    Failure::Config(format!("config key `{key}` must be {expected}"))
}

impl Settings {
    pub fn load(shared: &SharedArgs, command: &Command) -> Result<Self, Failure> {
        let table = match &shared.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                text.parse::<Table>().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
            }
            None => Table::new(),
        };
        let allowed = command_keys(command);
        if let Some(key) = table.keys().find(|k| !SHARED_KEYS.contains(&k.as_str()) && !allowed.contains(&k.as_str())) {
            return Err(Failure::Config(format!("unknown config key `{key}` for this subcommand")));
        }
        let mut s = Settings { table, shared_grid_m: shared.grid_m, shared_ppi: shared.ppi, shared_seed: shared.seed, out: None };
        s.out = match &shared.out {
            Some(p) => Some(p.clone()),
            None => match s.table.get("out") {
                Some(Value::String(p)) => Some(PathBuf::from(p)),
                Some(_) => return Err(bad("out", "a string")),
                None => None,
            },
        };
        Ok(s)
    }

    pub fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }

    pub fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.table.get(key) {
            None => Ok(default),
            Some(Value::Integer(i)) => usize::try_from(*i).map_err(|_| bad(key, "a non-negative integer")),
            Some(_) => Err(bad(key, "a non-negative integer")),
        }
    }

    pub fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> Result<u64, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.table.get(key) {
            None => Ok(default),
            Some(Value::Integer(i)) => u64::try_from(*i).map_err(|_| bad(key, "a non-negative integer")),
            Some(_) => Err(bad(key, "a non-negative integer")),
        }
    }

    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.table.get(key) {
            None => Ok(default),
            Some(v) => as_f64(v).ok_or_else(|| bad(key, "a number")),
        }
    }

    pub fn string(&self, flag: Option<String>, key: &str, default: &str) -> Result<String, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.table.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(bad(key, "a string")),
        }
    }

    pub fn usize_list(&self, flag: Option<Vec<usize>>, key: &str, default: &[usize]) -> Result<Vec<usize>, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.list(key, default, |v| match v {
            Value::Integer(i) => usize::try_from(*i).ok(),
            _ => None,
        }, |s| s.parse().ok())
    }

    pub fn f64_list(&self, flag: Option<Vec<f64>>, key: &str, default: &[f64]) -> Result<Vec<f64>, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        self.list(key, default, as_f64, |s| s.parse().ok())
    }

    /// Accepts a TOML array or a comma-separated string.
    fn list<T: Clone>(
        &self,
        key: &str,
        default: &[T],
        item: impl Fn(&Value) -> Option<T>,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<Vec<T>, Failure> {
        match self.table.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a.iter().map(|v| item(v).ok_or_else(|| bad(key, "a list of numbers"))).collect(),
            Some(Value::String(s)) => {
                s.split(',').map(|p| parse(p.trim()).ok_or_else(|| bad(key, "a list of numbers"))).collect()
            }
            Some(_) => Err(bad(key, "a list of numbers")),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}
