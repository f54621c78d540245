//! File formats read and written by the CLI.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use surfpack::{validate_solution, Instance, Length, PackingSolution, Violation};

#[derive(Deserialize)]
#[serde(untagged)]
enum InstanceInput {
    One(Instance),
    Many(Vec<Instance>),
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Reads a file holding either one instance object or an array of them.
pub fn read_instances(path: &Path) -> Result<Vec<Instance>> {
    let text = read_text(path)?;
    let parsed: InstanceInput =
        serde_json::from_str(&text).with_context(|| format!("parsing instances from {}", path.display()))?;
    Ok(match parsed {
        InstanceInput::One(i) => vec![i],
        InstanceInput::Many(v) => v,
    })
}

/// Writes to `path`, or to stdout when it is `None`.
pub fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Solution JSON: the packing plus its areas and validator verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(flatten)]
    pub solution: PackingSolution,
    pub half_area: Length,
    pub verdict: String,
    pub violations: Vec<Violation>,
}

impl SolutionFile {
    pub fn new(instance: &Instance, solution: PackingSolution) -> Result<Self> {
        let report = validate_solution(instance, &solution)?;
        Ok(Self {
            half_area: solution.half_surface_area(),
            verdict: report.verdict().to_string(),
            violations: report.violations,
            solution,
        })
    }
}
