//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::schmidt_spectrum;
use crate::analytic::{coefficient_matrix, CoefficientMatrix, PhysicalParams, SigmaMode, DEFAULT_MAX_INDEX};
use crate::error::{HgError, Result};
use crate::figures::generate_figure;
use crate::io::{matrix_to_csv, to_json, write_atomic, MatrixDocument};
use crate::oracle::{gaussian_approx_delta, QuadratureSpec};
use crate::quadrature::QuadratureRule;
use crate::special_functions::{ModeFunctionConvention, Normalization, PhaseConvention};
use crate::verify::{tolerance_from_env, verify_default_grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hgspdc", version, about = "Hermite-Gauss decomposition of SPDC two-photon states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the coefficient matrix C_ab.
    Coeffs {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Schmidt spectrum as JSON.
    Schmidt {
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the analytic coefficients against quadrature.
    Verify {
        #[arg(long, default_value = "default")]
        grid: GridName,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::GaussHermite)]
        rule: RuleArg,
        /// Also print the per-case report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Regenerate the panels of one figure as PNG files.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        phase: Option<PhaseArg>,
    },
    /// Print the phase-matching width δ in the units of the inputs.
    Delta {
        #[arg(long, allow_negative_numbers = true)]
        crystal_length: f64,
        #[arg(long, allow_negative_numbers = true)]
        pump_wavenumber: f64,
    },
}

#[derive(Debug, Args)]
pub struct PhysicsArgs {
    /// Pump HG index along x.
    #[arg(long)]
    pub n: usize,
    /// Pump HG index along y.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub w: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// geometric, pump, pm or explicit:VALUE
    #[arg(long, default_value = "geometric", value_parser = parse_sigma_mode)]
    pub sigma_mode: SigmaMode,
    #[arg(long, default_value_t = DEFAULT_MAX_INDEX)]
    pub max_index: usize,
    /// Skip renormalization of the truncated grid.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, value_enum, default_value_t = PhaseArg::Real)]
    pub phase: PhaseArg,
    #[arg(long, value_enum, default_value_t = NormArg::Unit)]
    pub norm: NormArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridName {
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    GaussHermite,
    ClenshawCurtis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    /// Real modes with positive leading coefficient.
    Real,
    /// Modes carry the −iⁿ prefactor.
    MinusI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Unit,
    /// Modes with squared norm 1/2.
    Half,
}

impl From<PhaseArg> for PhaseConvention {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::Real => PhaseConvention::RealPositiveLeading,
            PhaseArg::MinusI => PhaseConvention::PaperPhase,
        }
    }
}

fn parse_sigma_mode(s: &str) -> std::result::Result<SigmaMode, String> {
    match s {
        "geometric" => Ok(SigmaMode::Geometric),
        "pump" => Ok(SigmaMode::PumpMatched),
        "pm" => Ok(SigmaMode::PhaseMatched),
        _ => match s.strip_prefix("explicit:") {
            Some(v) => v
                .parse::<f64>()
                .map(SigmaMode::Explicit)
                .map_err(|e| format!("bad explicit width {v:?}: {e}")),
            None => Err(format!("unknown sigma mode {s:?} (geometric, pump, pm, explicit:V)")),
        },
    }
}

impl PhysicsArgs {
    fn convention(&self) -> ModeFunctionConvention {
        let norm = match self.norm {
            NormArg::Unit => Normalization::UnitNorm,
            NormArg::Half => Normalization::PaperDn,
        };
        ModeFunctionConvention::new(norm, self.phase.into())
    }

    fn matrix(&self, order: usize) -> Result<CoefficientMatrix> {
        let params = PhysicalParams::new(self.w, self.delta, self.sigma_mode, (self.n, self.m.unwrap_or(0)))?
            .with_convention(self.convention());
        coefficient_matrix(order, &params, self.max_index, !self.raw)
    }
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => Ok(out.write_all(bytes)?),
    }
}

fn axis_csv(x: &CoefficientMatrix, y: &CoefficientMatrix) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["axis", "a", "b", "value"])?;
    for (axis, m) in [("x", x), ("y", y)] {
        for a in 0..m.dim() {
            for b in 0..m.dim() {
                w.write_record([axis.to_string(), a.to_string(), b.to_string(), format!("{:.16e}", m.get(a, b))])?;
            }
        }
    }
    w.into_inner().map_err(|e| HgError::Io(e.into_error()))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Coeffs { physics, format, out: path } => {
            let x = physics.matrix(physics.n)?;
            let bytes = match (physics.m, format) {
                (None, Format::Csv) => matrix_to_csv(&x)?,
                (None, Format::Json) => to_json(&MatrixDocument::from(&x))?,
                (Some(m), Format::Csv) => axis_csv(&x, &physics.matrix(m)?)?,
                (Some(m), Format::Json) => {
                    let y = physics.matrix(m)?;
                    to_json(&serde_json::json!({
                        "x": MatrixDocument::from(&x),
                        "y": MatrixDocument::from(&y),
                    }))?
                }
            };
            emit(out, path.as_ref(), &bytes)?;
        }
        Command::Schmidt { physics, out: path } => {
            let mut spectrum = schmidt_spectrum(&physics.matrix(physics.n)?)?;
            if let Some(m) = physics.m {
                spectrum = spectrum.product(&schmidt_spectrum(&physics.matrix(m)?)?);
            }
            emit(out, path.as_ref(), &to_json(&spectrum)?)?;
        }
        Command::Verify { grid: GridName::Default, nodes, rule, json } => {
            let spec = QuadratureSpec {
                nodes_per_axis: nodes,
                rule: match rule {
                    RuleArg::GaussHermite => QuadratureRule::GaussHermite,
                    RuleArg::ClenshawCurtis => QuadratureRule::ClenshawCurtis,
                },
                ..QuadratureSpec::default()
            };
            let report = verify_default_grid(tolerance_from_env(), &spec)?;
            if json {
                out.write_all(&to_json(&report)?)?;
            }
            writeln!(
                out,
                "max deviation {:.3e} (tolerance {:.1e}), quadrature parity {:.3e}, {} cases: {}",
                report.max_relative_deviation,
                report.tolerance,
                report.max_quadrature_parity_violation,
                report.cases.len(),
                if report.passed() { "PASS" } else { "FAIL" }
            )?;
            if !report.passed() {
                return Ok(EXIT_NUMERIC);
            }
        }
        Command::Figure { which, out: dir, phase } => {
            let convention = phase.map(|p| ModeFunctionConvention::new(Normalization::UnitNorm, p.into()));
            for p in generate_figure(which, &dir, convention)? {
                writeln!(out, "{}", p.display())?;
            }
        }
        Command::Delta { crystal_length, pump_wavenumber } => {
            writeln!(out, "{:.12e}", gaussian_approx_delta(crystal_length, pump_wavenumber)?)?;
        }
    }
    Ok(EXIT_OK)
}

fn exit_code(e: &HgError) -> i32 {
    match e {
        HgError::Capability { .. } | HgError::Domain(_) | HgError::Precondition(_) => EXIT_USAGE,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_IO,
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hgspdc").chain(args.iter().copied());
        let code = run_command(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sigma_mode_parsing() {
        assert_eq!(parse_sigma_mode("pm").unwrap(), SigmaMode::PhaseMatched);
        assert_eq!(parse_sigma_mode("explicit:1.5").unwrap(), SigmaMode::Explicit(1.5));
        assert!(parse_sigma_mode("explicit:x").is_err());
        assert!(parse_sigma_mode("waist").is_err());
    }

    #[test]
    fn separable_csv() {
        let (code, out, _) = run(&[
            "coeffs", "--n", "0", "--w", "1", "--delta", "1", "--sigma-mode", "geometric", "--max-index", "4",
            "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let big: Vec<&str> = out
            .lines()
            .skip(1)
            .filter(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs() >= 1e-10)
            .collect();
        assert_eq!(big.len(), 1);
        assert!(big[0].starts_with("0,0,"));
    }

    #[test]
    fn usage_and_domain_errors() {
        assert_eq!(run(&["delta", "--crystal-length", "0", "--pump-wavenumber", "1"]).0, EXIT_USAGE);
        assert_eq!(run(&["coeffs", "--n", "0", "--w", "-1", "--delta", "1"]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["figure", "--which", "7", "--out", "/tmp"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn delta_prints_value() {
        let (code, out, _) = run(&["delta", "--crystal-length", "4", "--pump-wavenumber", "1"]);
        assert_eq!(code, 0);
        assert!((out.trim().parse::<f64>().unwrap() - 0.257).abs() < 1e-12);
    }

    #[test]
    fn schmidt_json_with_second_axis() {
        let (code, out, _) = run(&["schmidt", "--n", "1", "--m", "1", "--w", "1", "--delta", "1", "--max-index", "6"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["schmidt_number"].as_f64().unwrap() - 4.0).abs() < 1e-9);
        assert!((v["entropy_bits"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    }
}
