//! Batch front end: certify symmetries, compute spectra, sweep a parameter
//! grid, or bisect the symmetry-breaking point.
//!
//! Exit codes: 0 on success, 2 on config errors, 3 on numerical failures.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::Serialize;

use rtsym_core::sweep::{AnalyticRow, CertRecord, EpFooter, OutputFormat};
use rtsym_core::{
    analytic_spectrum, assemble, eigenspectrum, find_rt_angle, is_symmetric, load_config,
    locate_ep, preset_fig2, preset_fig3, run_sweep, AntiunitarySpec, Error, FockSpace,
    HamiltonianSpec, Result,
};

#[derive(Parser)]
#[command(
    name = "rtsym",
    version,
    about = "Driven two-mode gain/loss bosonic Hamiltonians: symmetry certification, spectra, exceptional points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetry verdicts (PT and RT) for a Hamiltonian spec
    Certify {
        /// Hamiltonian spec JSON ({"terms": [...]})
        #[arg(long)]
        config: PathBuf,
        /// Per-mode Fock cutoff
        #[arg(long, default_value_t = 8)]
        cutoff: usize,
        /// Certification residual tolerance (max-norm)
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Override a named parameter, e.g. --param kappa=0.5
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Write the JSON records here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues and classification at a single parameter point
    Spectrum {
        /// Hamiltonian spec JSON ({"terms": [...]})
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 8)]
        cutoff: usize,
        /// Output format: csv or json
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and emit one row per grid point
    Sweep {
        /// Sweep config JSON (see README for the schema)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in sweep: fig2 (undriven) or fig3 (driven)
        #[arg(long)]
        preset: Option<String>,
        /// Drive strength for the fig3 preset (default 0.1)
        #[arg(long)]
        eps: Option<f64>,
        /// Override the per-mode Fock cutoff
        #[arg(long)]
        cutoff: Option<usize>,
        /// Override the output format: csv or json
        #[arg(long)]
        format: Option<String>,
        /// Override the output path ("-" for stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config value: term parameters (g, eps, kappa, phi,
        /// delta) or grid fields (lo, hi, steps, cutoff)
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Bisect the symmetry-breaking point of the single-excitation block
    Ep {
        /// Coupling strength
        #[arg(long)]
        g: f64,
        /// Drive strength (the block ignores it; nonzero flags the caveat)
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Lower bracket in kappa
        #[arg(long)]
        lo: f64,
        /// Upper bracket in kappa
        #[arg(long)]
        hi: f64,
        /// Bisection tolerance in kappa
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        let code = match err {
            Error::Eigensolver(_) | Error::NonFinite(_) | Error::Singular(_) => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Certify { config, cutoff, tol, params, out } => {
            let mut spec = load_spec(&config)?;
            apply_params(&mut spec, &params)?;
            let records = certify(&spec, cutoff, tol)?;
            write_json(&records, out.as_deref())
        }
        Command::Spectrum { config, cutoff, format, params, out } => {
            let mut spec = load_spec(&config)?;
            apply_params(&mut spec, &params)?;
            let format = OutputFormat::from_str(&format)?;
            let report = spectrum_point(&spec, cutoff)?;
            match format {
                OutputFormat::Json => write_json(&report, out.as_deref()),
                OutputFormat::Csv => write_text(&report.to_csv(), out.as_deref()),
            }
        }
        Command::Sweep { config, preset, eps, cutoff, format, out, params } => {
            let mut sweep_config = match (&config, &preset) {
                (Some(path), None) => load_config(path)?,
                (None, Some(name)) => match name.as_str() {
                    "fig2" => {
                        let mut config = preset_fig2();
                        if let Some(eps) = eps {
                            config.hamiltonian.set_parameter("eps", eps)?;
                        }
                        config
                    }
                    "fig3" => preset_fig3(eps.unwrap_or(0.1)),
                    other => {
                        return Err(Error::config(
                            "--preset",
                            format!("unknown preset `{other}` (expected fig2 or fig3)"),
                        ))
                    }
                },
                _ => {
                    return Err(Error::config(
                        "--config",
                        "pass exactly one of --config or --preset",
                    ))
                }
            };
            if let Some(n) = cutoff {
                sweep_config.cutoff = n;
            }
            for param in &params {
                let (key, value) = split_param(param)?;
                match key {
                    "lo" => sweep_config.sweep.lo = value,
                    "hi" => sweep_config.sweep.hi = value,
                    "steps" => sweep_config.sweep.steps = value as usize,
                    "cutoff" => sweep_config.cutoff = value as usize,
                    name => sweep_config
                        .hamiltonian
                        .set_parameter(name, value)
                        .map_err(|e| Error::config("--param", e.to_string()))?,
                }
            }
            let out_format = match format {
                Some(text) => OutputFormat::from_str(&text)?,
                None => sweep_config.output.as_ref().map(|o| o.format).unwrap_or(OutputFormat::Csv),
            };
            let out_path: Option<PathBuf> = match out {
                Some(path) if path.as_os_str() == "-" => None,
                Some(path) => Some(path),
                None => sweep_config.output.as_ref().map(|o| PathBuf::from(&o.path)),
            };

            let outcome = run_sweep(&sweep_config)?;
            if let Some(ref footer) = outcome.ep {
                eprintln!(
                    "exceptional point: kappa* = {:.9} (bracket [{:.6}, {:.6}]{})",
                    footer.kappa_star,
                    footer.bracket.0,
                    footer.bracket.1,
                    if footer.block_approximation { ", single-excitation block approximation" } else { "" }
                );
            }
            match out_path {
                Some(path) => {
                    rtsym_core::emit(&outcome, out_format, &path)?;
                    eprintln!("wrote {} rows to {}", outcome.rows.len(), path.display());
                    Ok(())
                }
                None => {
                    let text = match out_format {
                        OutputFormat::Csv => rtsym_core::sweep::render_csv(&outcome),
                        OutputFormat::Json => rtsym_core::sweep::render_json(&outcome)?,
                    };
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Ep { g, eps, lo, hi, tol, out } => {
            let located = locate_ep(g, eps, lo, hi, tol)?;
            let footer = EpFooter {
                kappa_star: located.kappa_star,
                bracket: located.bracket,
                tol,
                block_approximation: located.block_approximation,
            };
            write_json(&footer, out.as_deref())
        }
    }
}

fn load_spec(path: &Path) -> Result<HamiltonianSpec> {
    let text = std::fs::read_to_string(path)?;
    let spec: HamiltonianSpec =
        serde_json::from_str(&text).map_err(|e| Error::config("<config>", e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn split_param(param: &str) -> Result<(&str, f64)> {
    let (key, value) = param
        .split_once('=')
        .ok_or_else(|| Error::config("--param", format!("expected KEY=VALUE, got `{param}`")))?;
    let value: f64 = value
        .parse()
        .map_err(|e| Error::config("--param", format!("bad value in `{param}`: {e}")))?;
    Ok((key, value))
}

fn apply_params(spec: &mut HamiltonianSpec, params: &[String]) -> Result<()> {
    for param in params {
        let (key, value) = split_param(param)?;
        spec.set_parameter(key, value)
            .map_err(|e| Error::config("--param", e.to_string()))?;
    }
    Ok(())
}

fn certify(spec: &HamiltonianSpec, cutoff: usize, tol: f64) -> Result<Vec<CertRecord>> {
    let space = FockSpace::two_mode(cutoff)?;
    let h = assemble(&space, spec)?;

    let pt = AntiunitarySpec::pt(&space)?;
    let pt_cert = is_symmetric(&h, &pt, tol)?;
    let mut records = vec![CertRecord {
        symmetry: "PT".to_string(),
        theta: std::f64::consts::PI,
        residual: pt_cert.residual,
        verdict: pt_cert.verdict,
    }];

    let rt_record = match find_rt_angle(&h, tol)? {
        Some(found) => CertRecord {
            symmetry: "RT".to_string(),
            theta: found.theta,
            residual: found.residual,
            verdict: true,
        },
        None => {
            // no angle clears the tolerance; report the drive-phase candidate
            let theta = spec.suggested_rt_angle();
            let cert = is_symmetric(&h, &AntiunitarySpec::rt(&space, theta)?, tol)?;
            CertRecord {
                symmetry: "RT".to_string(),
                theta,
                residual: cert.residual,
                verdict: cert.verdict,
            }
        }
    };
    records.push(rt_record);
    Ok(records)
}

#[derive(Debug, Serialize)]
struct SpectrumOut {
    eigenvalues: Vec<C64>,
    class: String,
    min_angle: f64,
    cond: f64,
    analytic: Option<AnalyticRow>,
}

impl SpectrumOut {
    fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("index,re,im\n");
        for (i, e) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{i},{:.16e},{:.16e}", e.re, e.im).expect("string write");
        }
        out
    }
}

fn spectrum_point(spec: &HamiltonianSpec, cutoff: usize) -> Result<SpectrumOut> {
    let space = FockSpace::two_mode(cutoff)?;
    let h = assemble(&space, spec)?;
    let report = eigenspectrum(&h)?;

    let g = spec.parameter("g").unwrap_or(0.0);
    let eps = spec.parameter("eps").unwrap_or(0.0);
    let kappa = spec.parameter("kappa").unwrap_or(0.0);
    let analytic = match analytic_spectrum(g, kappa, eps, -1..=1) {
        Ok(levels) => Some(AnalyticRow {
            lambda: levels.lambda,
            lambda0: levels.lambda0,
            e0: levels.level(0).expect("level 0 requested"),
            ep: levels.level(1).expect("level 1 requested"),
            em: levels.level(-1).expect("level -1 requested"),
        }),
        Err(Error::Singular(_)) => None,
        Err(other) => return Err(other),
    };

    Ok(SpectrumOut {
        eigenvalues: report.eigenvalues.clone(),
        class: report.classification.label().to_string(),
        min_angle: report.coalescence.min_angle,
        cond: report.coalescence.condition_number,
        analytic,
    })
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::config("<output>", format!("json serialization: {e}")))?;
    write_text(&format!("{text}\n"), out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
