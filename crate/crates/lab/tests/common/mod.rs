#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_contraction-lab");

pub const R25: &str = r#"{"labels":["x","y","z"],"dist":[[0,1,1],[1,0,3],[1,3,0]]}"#;
pub const UNIT: &str = r#"{"lo":0,"hi":1,"dist":"abs(x-y)"}"#;

/// Writes fixture files into a fresh temporary directory.
pub struct Fixtures {
    dir: tempfile::TempDir,
}

impl Fixtures {
    pub fn new() -> Self {
        let f = Fixtures {
            dir: tempfile::tempdir().expect("temp dir"),
        };
        f.write("r25.json", R25);
        f.write("unit.json", UNIT);
        f
    }

    pub fn write(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, contents).expect("write fixture");
        p
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn dir(&self) -> &Path {
        self.dir.path()
    }
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({}): {}", e, self.stdout))
    }
}

/// Runs the binary in `cwd` with the seed override cleared unless given.
pub fn run_in(cwd: &Path, args: &[&str], env_seed: Option<&str>) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .current_dir(cwd)
        .env_remove("CONTRACTION_LAB_SEED");
    if let Some(s) = env_seed {
        cmd.env("CONTRACTION_LAB_SEED", s);
    }
    let out = cmd.output().expect("run contraction-lab");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
    }
}

/// Validates a JSON result against the schema published for its command and status.
pub fn check_schema(result: &Value) -> Result<(), String> {
    let command = result["command"].as_str().unwrap_or_default();
    let status = match result["status"].as_str() {
        Some("ok") => contraction_lab::Status::Ok,
        Some("violation") => contraction_lab::Status::Violation,
        Some("not-applicable") => contraction_lab::Status::NotApplicable,
        Some("error") => contraction_lab::Status::Error,
        other => return Err(format!("unknown status {:?}", other)),
    };
    let text = contraction_lab::schema::for_result(command, status)
        .ok_or_else(|| format!("no schema for command {:?}", command))?;
    let schema: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let errors: Vec<String> = validator
        .iter_errors(result)
        .take(5)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors.join("; "))
    }
}
