//! Batch sweeps over a parameter grid: certifications, analytic and numeric
//! spectra per point, exceptional-point refinement, and deterministic CSV or
//! JSON emission.
//!
//! The CSV column order is fixed:
//!
//! ```text
//! index,kappa,lambda_re,lambda_im,lambda0_re,lambda0_im,E0_re,E0_im,Ep_re,Ep_im,Em_re,Em_im,class,min_angle,cond,singular
//! ```
//!
//! Floats are printed with 17 significant digits so identical configs emit
//! identical bytes. Complex values occupy `_re`/`_im` column pairs. Rows at
//! the analytic branch point carry the literal `SINGULAR` in the affected
//! cells and in the `singular` column; grid points within the exceptional-
//! point tolerance of the refined `κ*` are classified `SINGULAR` rather than
//! forced into either phase. The numeric tracked branches and the symmetry
//! verdicts are carried by the JSON format only.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::hamiltonian::{assemble, HamiltonianSpec, Term};
use crate::spectrum::{
    analytic_spectrum, continue_branches, eig_values, locate_ep, single_excitation_report,
};
use crate::symmetry::{find_rt_angle, is_symmetric, AntiunitarySpec};

pub const CSV_HEADER: &str = "index,kappa,lambda_re,lambda_im,lambda0_re,lambda0_im,E0_re,E0_im,Ep_re,Ep_im,Em_re,Em_im,class,min_angle,cond,singular";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("output.format", format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    /// Name of the swept parameter; must exist in the template.
    pub parameter: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Symmetry-certification residual bound.
    #[serde(default = "default_symmetry_tol")]
    pub symmetry: f64,
    /// Spectrum-classification tolerance relative to the spectral radius.
    #[serde(default = "default_classification_tol")]
    pub classification: f64,
    /// Exceptional-point bisection tolerance in the swept parameter.
    #[serde(default = "default_ep_tol")]
    pub ep: f64,
}

fn default_symmetry_tol() -> f64 {
    1e-10
}
fn default_classification_tol() -> f64 {
    1e-8
}
fn default_ep_tol() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: default_symmetry_tol(),
            classification: default_classification_tol(),
            ep: default_ep_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: String,
}

/// A sweep: a Hamiltonian template, one swept parameter, a cutoff, and
/// tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub hamiltonian: HamiltonianSpec,
    pub sweep: SweepRange,
    pub cutoff: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl SweepConfig {
    /// Structured validation; error messages carry the offending field path.
    pub fn validate(&self) -> Result<()> {
        if self.cutoff == 0 {
            return Err(Error::config("cutoff", "must be at least 1"));
        }
        if !(self.sweep.lo.is_finite() && self.sweep.hi.is_finite()) {
            return Err(Error::config("sweep.lo", "bounds must be finite"));
        }
        if self.sweep.lo >= self.sweep.hi {
            return Err(Error::config("sweep.lo", "lo must be strictly below hi"));
        }
        if self.sweep.steps < 2 {
            return Err(Error::config("sweep.steps", "need at least 2 grid points"));
        }
        self.hamiltonian
            .validate()
            .map_err(|e| Error::config("hamiltonian", e.to_string()))?;
        let mut probe = self.hamiltonian.clone();
        probe
            .set_parameter(&self.sweep.parameter, self.sweep.lo)
            .map_err(|e| Error::config("sweep.parameter", e.to_string()))?;
        if !(self.tolerances.symmetry > 0.0
            && self.tolerances.classification > 0.0
            && self.tolerances.ep > 0.0)
        {
            return Err(Error::config("tolerances", "tolerances must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.sweep.steps;
        (0..n)
            .map(|i| self.sweep.lo + i as f64 * (self.sweep.hi - self.sweep.lo) / (n - 1) as f64)
            .collect()
    }
}

/// Parse a config file.
pub fn load_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::config("<config>", e.to_string()))
}

/// The gain/loss sweep of the undriven pair: `g = 1`, `ε = 0`, `κ ∈ [0, 2]`
/// over 201 points. Without drive the tracked branches live in exact
/// total-occupation blocks, so a small cutoff loses nothing.
pub fn preset_fig2() -> SweepConfig {
    SweepConfig {
        hamiltonian: HamiltonianSpec::new(vec![
            Term::LinearCoupling { g: C64::new(1.0, 0.0) },
            Term::DriveH1 { eps: 0.0 },
            Term::GainLoss { kappa: 0.0 },
        ]),
        sweep: SweepRange { parameter: "kappa".to_string(), lo: 0.0, hi: 2.0, steps: 201 },
        cutoff: 6,
        tolerances: Tolerances::default(),
        output: Some(OutputSpec { format: OutputFormat::Csv, path: "fig2.csv".to_string() }),
    }
}

/// The driven sweep at drive strength `eps`: `g = 1`, `κ ∈ [0, 2]`, 201
/// points, cutoff 12 (the convergence gate for the tracked levels).
pub fn preset_fig3(eps: f64) -> SweepConfig {
    SweepConfig {
        hamiltonian: HamiltonianSpec::new(vec![
            Term::LinearCoupling { g: C64::new(1.0, 0.0) },
            Term::DrivePhased { eps, phi: 0.0 },
            Term::GainLoss { kappa: 0.0 },
        ]),
        sweep: SweepRange { parameter: "kappa".to_string(), lo: 0.0, hi: 2.0, steps: 201 },
        cutoff: 12,
        tolerances: Tolerances::default(),
        output: Some(OutputSpec { format: OutputFormat::Csv, path: "fig3.csv".to_string() }),
    }
}

/// Analytic columns of one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub lambda: C64,
    pub lambda0: C64,
    pub e0: C64,
    pub ep: C64,
    pub em: C64,
}

/// One symmetry verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertRecord {
    pub symmetry: String,
    pub theta: f64,
    pub residual: f64,
    pub verdict: bool,
}

/// One grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    /// Swept value; occupies the `kappa` column of the CSV contract.
    pub kappa: f64,
    /// Analytic branch point marker.
    pub singular: bool,
    pub analytic: Option<AnalyticRow>,
    /// Numeric branches tracking the analytic levels n = −1, 0, +1.
    pub numeric: [C64; 3],
    /// Phase label of the single-excitation block, or `SINGULAR` near `κ*`.
    pub class: String,
    /// Minimum eigenvector angle of the single-excitation block.
    pub min_angle: f64,
    /// Eigenvector-matrix condition number of the block.
    pub cond: f64,
    pub symmetry: Vec<CertRecord>,
}

/// Refined exceptional point, reported as a footer record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpFooter {
    pub kappa_star: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub block_approximation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub ep: Option<EpFooter>,
}

/// Run the sweep in grid order.
///
/// The three numeric branches are matched to the analytic levels
/// `n = −1, 0, +1` wherever those exist; across singular points (and for
/// templates outside the analytic family) they fall back to nearest-neighbour
/// continuation in the complex plane with ties broken by the previous-step
/// velocity. Pure continuation cannot cross the defective point: the
/// truncated matrix carries a cluster of spurious zeros there that would
/// capture the branches.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let space = FockSpace::two_mode(config.cutoff)?;
    let pt = AntiunitarySpec::pt(&space)?;
    let grid = config.grid();

    // One rotation angle for the whole sweep, searched at the first point.
    let mut first_spec = config.hamiltonian.clone();
    first_spec.set_parameter(&config.sweep.parameter, grid[0])?;
    let first_h = assemble(&space, &first_spec)?;
    let rt_angle = find_rt_angle(&first_h, config.tolerances.symmetry)?;
    let rt_spec = match rt_angle {
        Some(found) => Some((found.theta, AntiunitarySpec::rt(&space, found.theta)?)),
        None => None,
    };

    let mut rows = Vec::with_capacity(grid.len());
    let mut all_real_flags = Vec::with_capacity(grid.len());
    let mut prev: Option<[C64; 3]> = None;
    let mut velocity = [C64::new(0.0, 0.0); 3];

    for (index, &value) in grid.iter().enumerate() {
        let mut spec = config.hamiltonian.clone();
        spec.set_parameter(&config.sweep.parameter, value)?;
        let g = spec.parameter("g").unwrap_or(0.0);
        let eps = spec.parameter("eps").unwrap_or(0.0);
        let kappa = spec.parameter("kappa").unwrap_or(0.0);
        let delta = spec.parameter("delta").unwrap_or(0.0);

        let analytic = match analytic_spectrum(g, kappa, eps, -1..=1) {
            Ok(spectrum) => Some(AnalyticRow {
                lambda: spectrum.lambda,
                lambda0: spectrum.lambda0,
                e0: spectrum.level(0).expect("level 0 requested"),
                ep: spectrum.level(1).expect("level 1 requested"),
                em: spectrum.level(-1).expect("level -1 requested"),
            }),
            Err(Error::Singular(_)) => None,
            Err(other) => return Err(other),
        };

        let h = assemble(&space, &spec)?;
        let eigenvalues = eig_values(h.matrix()).map_err(|e| match e {
            Error::Eigensolver(msg) => Error::Eigensolver(format!(
                "{msg} at {} = {value}",
                config.sweep.parameter
            )),
            other => other,
        })?;

        let targets = match (&analytic, &prev) {
            (Some(a), _) => [a.em, a.e0, a.ep],
            (None, Some(p)) => [p[0] + velocity[0], p[1] + velocity[1], p[2] + velocity[2]],
            (None, None) => [C64::new(-g, 0.0), C64::new(0.0, 0.0), C64::new(g, 0.0)],
        };
        let picked = continue_branches(&eigenvalues, &targets, &velocity);
        let tracked = [eigenvalues[picked[0]], eigenvalues[picked[1]], eigenvalues[picked[2]]];
        if let Some(p) = prev {
            for k in 0..3 {
                velocity[k] = tracked[k] - p[k];
            }
        }
        prev = Some(tracked);

        let block = single_excitation_report(C64::new(g, 0.0), kappa, delta)?;
        all_real_flags.push(block.classification.is_all_real());

        let mut symmetry = vec![{
            let cert = is_symmetric(&h, &pt, config.tolerances.symmetry)?;
            CertRecord {
                symmetry: "PT".to_string(),
                theta: std::f64::consts::PI,
                residual: cert.residual,
                verdict: cert.verdict,
            }
        }];
        if let Some((theta, ref rt)) = rt_spec {
            let cert = is_symmetric(&h, rt, config.tolerances.symmetry)?;
            symmetry.push(CertRecord {
                symmetry: "RT".to_string(),
                theta,
                residual: cert.residual,
                verdict: cert.verdict,
            });
        }

        rows.push(SweepRow {
            index,
            kappa: value,
            singular: analytic.is_none(),
            analytic,
            numeric: tracked,
            class: block.classification.label().to_string(),
            min_angle: block.coalescence.min_angle,
            cond: block.coalescence.condition_number,
            symmetry,
        });
    }

    // Refine the first classification change of the block into an EP footer;
    // bisection runs over kappa, so only kappa sweeps get one.
    let mut ep = None;
    if config.sweep.parameter == "kappa" {
        for i in 1..all_real_flags.len() {
            if all_real_flags[i] != all_real_flags[i - 1] {
                let g = config.hamiltonian.parameter("g").unwrap_or(0.0);
                let eps = config.hamiltonian.parameter("eps").unwrap_or(0.0);
                let located = locate_ep(g, eps, grid[i - 1], grid[i], config.tolerances.ep)?;
                ep = Some(EpFooter {
                    kappa_star: located.kappa_star,
                    bracket: located.bracket,
                    tol: config.tolerances.ep,
                    block_approximation: located.block_approximation,
                });
                break;
            }
        }
    }
    if let Some(ref footer) = ep {
        for row in &mut rows {
            if (row.kappa - footer.kappa_star).abs() <= footer.tol {
                row.class = "SINGULAR".to_string();
            }
        }
    }

    Ok(SweepOutcome { rows, ep })
}

fn push_f64(out: &mut String, x: f64) {
    use std::fmt::Write;
    write!(out, "{x:.16e}").expect("string write");
}

fn push_complex(out: &mut String, z: Option<C64>) {
    match z {
        Some(z) => {
            push_f64(out, z.re);
            out.push(',');
            push_f64(out, z.im);
        }
        None => out.push_str("SINGULAR,SINGULAR"),
    }
}

/// Render the fixed-header CSV (byte-stable for identical outcomes).
pub fn render_csv(outcome: &SweepOutcome) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &outcome.rows {
        use std::fmt::Write;
        write!(out, "{},", row.index).expect("string write");
        push_f64(&mut out, row.kappa);
        out.push(',');
        push_complex(&mut out, row.analytic.map(|a| a.lambda));
        out.push(',');
        push_complex(&mut out, row.analytic.map(|a| a.lambda0));
        out.push(',');
        push_complex(&mut out, row.analytic.map(|a| a.e0));
        out.push(',');
        push_complex(&mut out, row.analytic.map(|a| a.ep));
        out.push(',');
        push_complex(&mut out, row.analytic.map(|a| a.em));
        out.push(',');
        out.push_str(&row.class);
        out.push(',');
        push_f64(&mut out, row.min_angle);
        out.push(',');
        push_f64(&mut out, row.cond);
        out.push(',');
        if row.singular {
            out.push_str("SINGULAR");
        }
        out.push('\n');
    }
    if let Some(ref ep) = outcome.ep {
        use std::fmt::Write;
        let mut line = String::new();
        write!(line, "# ep,kappa_star=").expect("string write");
        push_f64(&mut line, ep.kappa_star);
        write!(line, ",bracket_lo=").expect("string write");
        push_f64(&mut line, ep.bracket.0);
        write!(line, ",bracket_hi=").expect("string write");
        push_f64(&mut line, ep.bracket.1);
        write!(line, ",tol=").expect("string write");
        push_f64(&mut line, ep.tol);
        write!(line, ",block_approximation={}", ep.block_approximation).expect("string write");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Render the JSON form (full rows, round-trippable).
pub fn render_json(outcome: &SweepOutcome) -> Result<String> {
    serde_json::to_string_pretty(outcome)
        .map_err(|e| Error::config("<output>", format!("json serialization: {e}")))
}

/// Write the outcome to a file; I/O errors surface verbatim.
pub fn emit(outcome: &SweepOutcome, format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => render_csv(outcome),
        OutputFormat::Json => render_json(outcome)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn small_fig3_config(eps: f64, lo: f64, hi: f64, steps: usize) -> SweepConfig {
        let mut config = preset_fig3(eps);
        config.sweep.lo = lo;
        config.sweep.hi = hi;
        config.sweep.steps = steps;
        config
    }

    #[test]
    fn validation_reports_field_paths() {
        let mut config = preset_fig2();
        config.sweep.steps = 1;
        assert!(config.validate().unwrap_err().to_string().contains("sweep.steps"));

        let mut config = preset_fig2();
        config.sweep.lo = 3.0;
        assert!(config.validate().unwrap_err().to_string().contains("sweep.lo"));

        let mut config = preset_fig2();
        config.sweep.parameter = "delta".to_string();
        assert!(config.validate().unwrap_err().to_string().contains("sweep.parameter"));

        let mut config = preset_fig2();
        config.cutoff = 0;
        assert!(config.validate().unwrap_err().to_string().contains("cutoff"));
    }

    #[test]
    fn grid_hits_the_bounds_and_the_midpoint_exactly() {
        let config = preset_fig2();
        let grid = config.grid();
        assert_eq!(grid.len(), 201);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[100], 1.0);
        assert_eq!(grid[200], 2.0);
    }

    #[test]
    fn fig2_rows_follow_the_single_excitation_solution() {
        let outcome = run_sweep(&preset_fig2()).unwrap();
        assert_eq!(outcome.rows.len(), 201);

        // κ = 0.6: real triplet {−0.8, 0, 0.8}
        let row = &outcome.rows[60];
        assert!((row.kappa - 0.6).abs() < 1e-15);
        let analytic = row.analytic.unwrap();
        assert!((analytic.lambda - c(0.8, 0.0)).norm() < 1e-12);
        let mut re: Vec<f64> = row.numeric.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-0.8, 0.0, 0.8]) {
            assert!((got - want).abs() < 1e-9, "re {got} vs {want}");
        }
        assert!(row.numeric.iter().all(|z| z.im.abs() < 1e-9));
        assert_eq!(row.class, "AllReal");

        // κ = 1.5: imaginary pair {0, ±1.118i}
        let row = &outcome.rows[150];
        let mut im: Vec<f64> = row.numeric.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        let mu = 1.118033988749895;
        for (got, want) in im.iter().zip([-mu, 0.0, mu]) {
            assert!((got - want).abs() < 1e-9, "im {got} vs {want}");
        }
        assert!(row.numeric.iter().all(|z| z.re.abs() < 1e-9));
        assert_eq!(row.class, "ConjugatePaired");

        // footer: EP refined to κ* = 1 within the ep tolerance
        let ep = outcome.ep.as_ref().expect("classification changes");
        assert!((ep.kappa_star - 1.0).abs() <= 1e-6);
        assert!(!ep.block_approximation);

        // the row exactly at the branch point is tagged, not forced
        let row = &outcome.rows[100];
        assert!(row.singular);
        assert!(row.analytic.is_none());
        assert_eq!(row.class, "SINGULAR");

        // H1 certifications hold across the whole sweep
        for row in &outcome.rows {
            for cert in &row.symmetry {
                assert!(cert.verdict, "row {} {}", row.index, cert.symmetry);
            }
        }
    }

    #[test]
    fn fig3_slice_matches_the_driven_levels() {
        let config = small_fig3_config(0.1, 0.5, 0.7, 5);
        let outcome = run_sweep(&config).unwrap();
        let row = &outcome.rows[2];
        assert!((row.kappa - 0.6).abs() < 1e-15);
        let analytic = row.analytic.unwrap();
        assert!((analytic.e0 - c(-0.03125, 0.0)).norm() < 1e-12);
        assert!((analytic.ep - c(0.76875, 0.0)).norm() < 1e-12);
        assert!((analytic.em - c(-0.83125, 0.0)).norm() < 1e-12);
        for (branch, level) in row.numeric.iter().zip([analytic.em, analytic.e0, analytic.ep]) {
            assert!((branch - level).norm() < 1e-4, "branch {branch} vs level {level}");
        }
        // the driven spec certifies RT at θ = 0, and is not PT-symmetric
        let pt = &row.symmetry[0];
        assert!(!pt.verdict);
        let rt = &row.symmetry[1];
        assert!(rt.verdict && rt.theta.abs() < 1e-6);
    }

    #[test]
    fn csv_header_is_fixed_and_empty_outcomes_are_header_only() {
        let empty = SweepOutcome { rows: vec![], ep: None };
        let text = render_csv(&empty);
        assert_eq!(text, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_marks_singular_rows() {
        let config = small_fig3_config(0.1, 0.98, 1.02, 3);
        let outcome = run_sweep(&config).unwrap();
        let text = render_csv(&outcome);
        let lines: Vec<&str> = text.lines().collect();
        // κ = 1 row is the second data line
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells[4], "SINGULAR"); // lambda0_re
        assert_eq!(cells[15], "SINGULAR"); // singular marker
        assert_eq!(cells[12], "SINGULAR"); // class within ep tolerance of κ*
    }

    #[test]
    fn json_round_trips_exactly() {
        let config = small_fig3_config(0.05, 0.2, 0.4, 3);
        let outcome = run_sweep(&config).unwrap();
        let text = render_json(&outcome).unwrap();
        let back: SweepOutcome = serde_json::from_str(&text).unwrap();
        assert_eq!(back, outcome);
    }

    #[test]
    fn identical_configs_emit_identical_bytes() {
        let config = small_fig3_config(0.1, 0.3, 0.5, 4);
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(render_csv(&a), render_csv(&b));
        assert_eq!(render_json(&a).unwrap(), render_json(&b).unwrap());
    }

    #[test]
    fn config_files_parse_with_defaults() {
        let json = r#"{
            "hamiltonian": {
                "terms": [
                    {"type": "linear_coupling", "g": [1.0, 0.0]},
                    {"type": "gain_loss", "kappa": 0.0}
                ]
            },
            "sweep": {"parameter": "kappa", "lo": 0.0, "hi": 2.0, "steps": 21},
            "cutoff": 4
        }"#;
        let config: SweepConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.tolerances, Tolerances::default());
        assert_eq!(config.hamiltonian.units, "g");
        config.validate().unwrap();
        let outcome = run_sweep(&config).unwrap();
        assert_eq!(outcome.rows.len(), 21);
    }
}
