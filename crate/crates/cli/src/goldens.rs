use std::fmt;
use std::path::Path;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use hodge_limit::fixtures::kodaira;
use hodge_limit::mellinverify::{ModelChart, Profile};
use hodge_limit::sncdegeneration::Alpha;

use crate::commands::{degeneration, mellin, MellinCase, MellinDoc};
use crate::input::InputError;
use crate::Global;

pub const SUITES: [&str; 2] = ["kodaira", "charts"];

#[derive(Args, Debug, Clone)]
pub struct GoldenArgs {
    /// One of `kodaira`, `charts`.
    #[arg(long)]
    pub suite: String,
}

#[derive(Debug)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown suite `{}`, expected one of {}", self.0, SUITES.join(", "))
    }
}

impl std::error::Error for UnknownSuite {}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)
        .map_err(|e| InputError::Config(format!("cannot write {}: {e}", dir.join(name).display())))?;
    Ok(())
}

/// The bundled model charts, by file stem.
pub fn charts() -> Result<Vec<(&'static str, MellinCase, ModelChart)>> {
    let half = Alpha::new(1, 2);
    Ok(vec![
        ("reduced-r0", MellinCase::Constant, ModelChart::with_sections(1, vec![1, 1], Alpha::zero(), &[1], &[1])?),
        ("half-e21-r0", MellinCase::Constant, ModelChart::with_sections(1, vec![2, 1], half.clone(), &[], &[])?),
        ("half-e231-r0", MellinCase::Constant, ModelChart::with_sections(2, vec![2, 3, 1], half, &[], &[])?),
        ("reduced-r1", MellinCase::Constant, ModelChart::with_sections(2, vec![1, 1, 1], Alpha::zero(), &[2], &[2])?),
        ("e23-r1", MellinCase::Constant, ModelChart::with_sections(1, vec![2, 3], Alpha::zero(), &[], &[])?),
        ("offdiag", MellinCase::Offdiag, ModelChart::with_sections(2, vec![1, 1, 1], Alpha::zero(), &[1], &[2])?),
    ])
}

/// Writes the suite into `--output`; recorded failures do not change the
/// exit code.
pub fn emit(g: &Global, args: &GoldenArgs) -> Result<bool> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(UnknownSuite(args.suite.clone()).into());
    }
    let dir = g.output.as_deref().ok_or_else(|| InputError::Config("--output directory is required".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| InputError::Config(format!("cannot create {}: {e}", dir.display())))?;
    match args.suite.as_str() {
        "kodaira" => {
            for n in 3..=5 {
                let spec = kodaira(n);
                write_json(dir, &format!("kodaira-{n}.json"), &spec)?;
                write_json(dir, &format!("kodaira-{n}.report.json"), &degeneration(spec, None)?)?;
            }
        }
        _ => {
            for (stem, case, chart) in charts()? {
                let doc = MellinDoc { chart: Some(chart), ..Default::default() };
                write_json(dir, &format!("chart-{stem}.json"), &doc)?;
                write_json(dir, &format!("chart-{stem}.report.json"), &mellin(case, &doc, None, None)?)?;
            }
            let doc = MellinDoc { profile: Some(Profile::bump(1.0, 0.7)), ..Default::default() };
            write_json(dir, "profile-bump.json", &doc)?;
            write_json(dir, "renorm.report.json", &mellin(MellinCase::Renorm, &doc, None, None)?)?;
            write_json(dir, "lelong.report.json", &mellin(MellinCase::Lelong, &doc, None, None)?)?;
        }
    }
    Ok(true)
}
