//! Command-line interface.
//!
//! Reports go to stdout and diagnostics to stderr. Exit codes:
//! 0 success/agreement, 1 usage or I/O error, 2 invalid or non-manifold
//! input, 3 disagreement between the fast path and the oracle.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench::bench_boxes;
use crate::boundary::validate_manifold;
use crate::generator::{self, Fixture};
use crate::homology::{assemble_report, AnalysisError};
use crate::invariants::mesh::{mesh_genus, parse_off};
use crate::oracle::{compare, oracle_betti, Comparison};
use crate::volume::{decode, save_volume, VolumeError, VolumeFormat, VoxelVolume};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExitStatus(i32);

impl ExitStatus {
    pub const SUCCESS: ExitStatus = ExitStatus(0);
    pub const USAGE: ExitStatus = ExitStatus(1);
    pub const INVALID_INPUT: ExitStatus = ExitStatus(2);
    pub const DISAGREEMENT: ExitStatus = ExitStatus(3);

    pub fn code(self) -> i32 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "voxtopo", version, about = "Genus and homology of 3D binary voxel images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute boundary genera and homology groups of a volume
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Include per-component and per-surface detail in text output
        #[arg(long)]
        per_component: bool,
    },
    /// List manifold violations of a volume
    Validate {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Brute-force Betti numbers from cell counts and cavities
    Oracle {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Compare the fast pipeline against the oracle
    Compare {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Write a test shape: box W H D | plate-with-holes G | u-shape H |
    /// hollow-box OUTER CAVITY | random SEED BUDGET
    Generate {
        shape: String,
        params: Vec<u64>,
        #[arg(short, long)]
        output: PathBuf,
        /// File encoding; defaults to the output extension, else binary
        #[arg(long, value_enum)]
        volume_format: Option<VolumeFormat>,
    },
    /// Genus of each component of a closed triangle mesh (OFF)
    MeshGenus {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Time the analysis of solid k³ boxes
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                ExitStatus::USAGE
            } else {
                let _ = write!(out, "{text}");
                ExitStatus::SUCCESS
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(status) => status,
        Err(Failure(status, message)) => {
            let _ = writeln!(err, "error: {message}");
            status
        }
    }
}

struct Failure(ExitStatus, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(ExitStatus::USAGE, e.to_string())
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path)
        .map_err(|e| Failure(ExitStatus::USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<VoxelVolume, Failure> {
    let bytes = read_input(path)?;
    let format = VolumeFormat::sniff(&bytes).ok_or_else(|| {
        Failure(
            ExitStatus::INVALID_INPUT,
            format!("{}: {}", path.display(), VolumeError::UnknownFormat),
        )
    })?;
    decode(&bytes, format)
        .map_err(|e| Failure(ExitStatus::INVALID_INPUT, format!("{}: {e}", path.display())))
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("JSON values serialize"))
}

fn build_fixture(shape: &str, params: &[u64]) -> Result<Fixture, Failure> {
    let usage = |expected: &str| {
        Failure(
            ExitStatus::USAGE,
            format!("shape {shape:?} takes {expected}, got {} parameter(s)", params.len()),
        )
    };
    let p = |i: usize| params[i] as usize;
    let fixture = match shape {
        "box" if params.len() == 3 => generator::cuboid(p(0), p(1), p(2)),
        "box" => return Err(usage("W H D")),
        "plate-with-holes" if params.len() == 1 => generator::plate_with_holes(p(0)),
        "plate-with-holes" => return Err(usage("G")),
        "u-shape" if params.len() == 1 => generator::u_shape(p(0)),
        "u-shape" => return Err(usage("HANDLES")),
        "hollow-box" if params.len() == 2 => generator::hollow_box(p(0), p(1)),
        "hollow-box" => return Err(usage("OUTER CAVITY")),
        "random" if params.len() == 2 => generator::random_manifold(params[0], p(1)),
        "random" => return Err(usage("SEED BUDGET")),
        other => {
            return Err(Failure(
                ExitStatus::USAGE,
                format!(
                    "unknown shape {other:?}; expected box, plate-with-holes, u-shape, hollow-box or random"
                ),
            ))
        }
    };
    fixture.map_err(|e| Failure(ExitStatus::USAGE, e.to_string()))
}

fn report_violations(
    out: &mut dyn Write,
    violations: &[crate::boundary::ManifoldViolation],
    format: OutputFormat,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => print_json(out, &json!({ "valid": violations.is_empty(), "violations": violations })),
        OutputFormat::Text => {
            if violations.is_empty() {
                writeln!(out, "valid")?;
            }
            for v in violations {
                writeln!(out, "{v}")?;
            }
            Ok(())
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<ExitStatus, Failure> {
    match command {
        Command::Analyze {
            input,
            format,
            per_component,
        } => {
            let v = load(&input)?;
            match assemble_report(&v) {
                Ok(report) => {
                    match format {
                        OutputFormat::Json => print_json(out, &report.to_json())?,
                        OutputFormat::Text => write!(out, "{}", report.to_text(per_component))?,
                    }
                    Ok(ExitStatus::SUCCESS)
                }
                Err(AnalysisError::NotManifold(violations)) => {
                    writeln!(err, "error: input is not a digital 3-manifold")?;
                    report_violations(out, &violations, format)?;
                    Ok(ExitStatus::INVALID_INPUT)
                }
                Err(e) => Err(Failure(
                    ExitStatus::INVALID_INPUT,
                    format!("{} stage failed: {e}", e.stage()),
                )),
            }
        }
        Command::Validate { input, format } => {
            let violations = validate_manifold(&load(&input)?);
            report_violations(out, &violations, format)?;
            Ok(if violations.is_empty() {
                ExitStatus::SUCCESS
            } else {
                ExitStatus::INVALID_INPUT
            })
        }
        Command::Oracle { input, format } => {
            let r = oracle_betti(&load(&input)?);
            match format {
                OutputFormat::Json => print_json(
                    out,
                    &json!({ "betti": r.triple(), "euler": r.euler, "cells": r.cells }),
                )?,
                OutputFormat::Text => writeln!(out, "{} {} {}", r.b0, r.b1, r.b2)?,
            }
            Ok(ExitStatus::SUCCESS)
        }
        Command::Compare { input, format } => {
            let result = compare(&load(&input)?);
            match format {
                OutputFormat::Json => print_json(out, &serde_json::to_value(&result).expect("serializable"))?,
                OutputFormat::Text => match &result {
                    Comparison::Agree { betti } => {
                        writeln!(out, "agree: {} {} {}", betti[0], betti[1], betti[2])?
                    }
                    Comparison::Disagree { fast, oracle, .. } => writeln!(
                        out,
                        "disagree: fast {} {} {}, oracle {} {} {}",
                        fast[0], fast[1], fast[2], oracle[0], oracle[1], oracle[2]
                    )?,
                    Comparison::Incomparable { oracle, reason, .. } => writeln!(
                        out,
                        "incomparable: {reason}; oracle {} {} {}",
                        oracle[0], oracle[1], oracle[2]
                    )?,
                },
            }
            Ok(match result {
                Comparison::Agree { .. } => ExitStatus::SUCCESS,
                Comparison::Disagree { .. } => ExitStatus::DISAGREEMENT,
                Comparison::Incomparable { .. } => ExitStatus::INVALID_INPUT,
            })
        }
        Command::Generate {
            shape,
            params,
            output,
            volume_format,
        } => {
            let fixture = build_fixture(&shape, &params)?;
            let format = volume_format
                .or_else(|| VolumeFormat::from_extension(&output))
                .unwrap_or(VolumeFormat::Binary);
            save_volume(&fixture.volume, &output, format)
                .map_err(|e| Failure(ExitStatus::USAGE, format!("{}: {e}", output.display())))?;
            writeln!(err, "wrote {} to {}", fixture.name, output.display())?;
            Ok(ExitStatus::SUCCESS)
        }
        Command::MeshGenus { input, format } => {
            let bytes = read_input(&input)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| Failure(ExitStatus::INVALID_INPUT, "OFF file is not UTF-8".into()))?;
            let parsed = parse_off(&text).and_then(|m| mesh_genus(&m));
            let components =
                parsed.map_err(|e| Failure(ExitStatus::INVALID_INPUT, format!("{}: {e}", input.display())))?;
            match format {
                OutputFormat::Json => {
                    let list: Vec<_> = components
                        .iter()
                        .map(|c| {
                            json!({
                                "component": c.component,
                                "genus": c.genus,
                                "euler": c.euler,
                                "angle_defect_total": c.angle_defect_total,
                            })
                        })
                        .collect();
                    print_json(out, &json!({ "components": list }))?;
                }
                OutputFormat::Text => {
                    for c in &components {
                        writeln!(out, "component {}: genus {}", c.component, c.genus)?;
                    }
                }
            }
            Ok(ExitStatus::SUCCESS)
        }
        Command::Bench { sizes, repeats } => {
            if sizes.contains(&0) {
                return Err(Failure(ExitStatus::USAGE, "sizes must be positive".into()));
            }
            let samples = bench_boxes(&sizes, repeats)
                .map_err(|e| Failure(ExitStatus::INVALID_INPUT, e.to_string()))?;
            writeln!(out, "voxels seconds")?;
            for s in samples {
                writeln!(out, "{} {:.6}", s.voxels, s.seconds)?;
            }
            Ok(ExitStatus::SUCCESS)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (ExitStatus, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let status = run(
            std::iter::once("voxtopo").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            status,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&[]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["analyze", "/nonexistent/file.vox3"]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["--help"]).0, ExitStatus::SUCCESS);
    }

    #[test]
    fn generate_parameter_errors() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.vox3");
        let out = out.to_str().unwrap();
        assert_eq!(run_args(&["generate", "box", "1", "2", "-o", out]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["generate", "sphere", "-o", out]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["generate", "hollow-box", "3", "2", "-o", out]).0, ExitStatus::USAGE);
        assert_eq!(run_args(&["generate", "u-shape", "1", "-o", out]).0, ExitStatus::SUCCESS);
    }

    #[test]
    fn garbage_input_is_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("junk.p3d");
        std::fs::write(&p, "hello").unwrap();
        let (status, _, err) = run_args(&["analyze", p.to_str().unwrap()]);
        assert_eq!(status, ExitStatus::INVALID_INPUT);
        assert!(err.contains("unrecognized"));
    }
}
