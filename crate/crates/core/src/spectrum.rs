//! Numeric eigendecomposition, spectrum classification, the analytic
//! eigenvalue formulas, exceptional-point localization, and the square-root
//! splitting law.
//!
//! Branch convention: `λ = √(g² − κ²)` uses the principal square root, so λ
//! sits on the positive real axis for `κ < g` and on the positive imaginary
//! axis for `κ > g`. Every formula and test in the crate uses this
//! convention.

use std::ops::RangeInclusive;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, SVD};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Operator;

/// Spectrum classification: fully real, closed under conjugation, or mixed.
///
/// Index lists partition the eigenvalue set exactly once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Classification {
    AllReal,
    ConjugatePaired { pairs: Vec<(usize, usize)>, real: Vec<usize> },
    Mixed { pairs: Vec<(usize, usize)>, real: Vec<usize>, unpaired: Vec<usize> },
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::AllReal => "AllReal",
            Classification::ConjugatePaired { .. } => "ConjugatePaired",
            Classification::Mixed { .. } => "Mixed",
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, Classification::Mixed { .. })
    }

    pub fn is_all_real(&self) -> bool {
        matches!(self, Classification::AllReal)
    }
}

/// Eigenvector-coalescence diagnostics. Near an exceptional point the minimum
/// principal angle goes to zero and the condition number of the eigenvector
/// matrix diverges.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoalescenceMetrics {
    /// Minimum pairwise principal angle between eigenvectors, radians.
    pub min_angle: f64,
    /// Condition number of the eigenvector matrix.
    pub condition_number: f64,
}

/// Full eigendecomposition of a truncated operator.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm column eigenvectors matching the eigenvalue order.
    pub eigenvectors: Array2<C64>,
    pub classification: Classification,
    pub coalescence: CoalescenceMetrics,
}

impl SpectrumReport {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

/// Relative classification tolerance (times the spectral radius).
pub const CLASSIFICATION_TOL: f64 = 1e-8;

/// Dense non-Hermitian eigendecomposition with deterministic ordering.
/// Solver failures surface as explicit errors, never as silent NaNs.
pub fn eigenspectrum(h: &Operator) -> Result<SpectrumReport> {
    let (eigenvalues, eigenvectors) = eig_matrix(h.matrix())?;
    let radius = eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let classification = classify_spectrum(&eigenvalues, CLASSIFICATION_TOL * radius);
    let coalescence = coalescence_measure(&eigenvectors)?;
    Ok(SpectrumReport { eigenvalues, eigenvectors, classification, coalescence })
}

/// Eigenvalues only (no eigenvectors), sorted by (real, imaginary) part.
/// Several times cheaper than the full decomposition; the sweep layer runs on
/// this.
pub(crate) fn eig_values(m: &Array2<C64>) -> Result<Vec<C64>> {
    let vals = m.eigvals().map_err(|e| Error::Eigensolver(e.to_string()))?;
    if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalues".to_string()));
    }
    let mut eigenvalues: Vec<C64> = vals.to_vec();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eigenvalues)
}

/// Eigendecomposition of a bare matrix: unit-norm columns, sorted by
/// (real, imaginary) part.
pub(crate) fn eig_matrix(m: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let (vals, vecs) = m.eig().map_err(|e| Error::Eigensolver(e.to_string()))?;
    if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalues".to_string()));
    }
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        vals[i]
            .re
            .total_cmp(&vals[j].re)
            .then(vals[i].im.total_cmp(&vals[j].im))
    });
    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        let column = vecs.column(i);
        let norm = column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for row in 0..n {
            eigenvectors[(row, col)] = column[row] / norm;
        }
    }
    Ok((eigenvalues, eigenvectors))
}

/// Classify a spectrum: `AllReal` when every `|Im|` is within `tol`,
/// otherwise greedy conjugate pairing (sorted by real part, `±Im` matched
/// within `tol`); `Mixed` when a genuinely complex eigenvalue stays unpaired.
pub fn classify_spectrum(eigs: &[C64], tol: f64) -> Classification {
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for (i, z) in eigs.iter().enumerate() {
        if z.im.abs() <= tol {
            real.push(i);
        } else {
            complex.push(i);
        }
    }
    if complex.is_empty() {
        return Classification::AllReal;
    }
    complex.sort_by(|&i, &j| {
        eigs[i]
            .re
            .total_cmp(&eigs[j].re)
            .then(eigs[i].im.abs().total_cmp(&eigs[j].im.abs()))
    });
    let mut used = vec![false; complex.len()];
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    for pos in 0..complex.len() {
        if used[pos] {
            continue;
        }
        let i = complex[pos];
        let target = eigs[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for cand in pos + 1..complex.len() {
            if used[cand] {
                continue;
            }
            let j = complex[cand];
            if (eigs[j].re - target.re).abs() <= tol && (eigs[j].im - target.im).abs() <= tol {
                let dist = (eigs[j] - target).norm();
                if best.is_none_or(|(_, d)| dist < d) {
                    best = Some((cand, dist));
                }
            }
        }
        used[pos] = true;
        match best {
            Some((cand, _)) => {
                used[cand] = true;
                pairs.push((i, complex[cand]));
            }
            None => unpaired.push(i),
        }
    }
    if unpaired.is_empty() {
        Classification::ConjugatePaired { pairs, real }
    } else {
        Classification::Mixed { pairs, real, unpaired }
    }
}

/// Minimum pairwise principal angle and eigenvector-matrix condition number.
pub fn coalescence_measure(eigenvectors: &Array2<C64>) -> Result<CoalescenceMetrics> {
    let n = eigenvectors.ncols();
    if n < 2 {
        return Ok(CoalescenceMetrics {
            min_angle: std::f64::consts::FRAC_PI_2,
            condition_number: 1.0,
        });
    }
    // Gram matrix: G[i,j] = <v_i, v_j>
    let mut adjoint = Array2::zeros((n, eigenvectors.nrows()));
    for ((i, j), z) in eigenvectors.indexed_iter() {
        adjoint[(j, i)] = z.conj();
    }
    let gram = adjoint.dot(eigenvectors);
    let mut min_angle = std::f64::consts::FRAC_PI_2;
    for i in 0..n {
        for j in i + 1..n {
            let denom = (gram[(i, i)].re * gram[(j, j)].re).sqrt();
            let cosine = (gram[(i, j)].norm() / denom).min(1.0);
            min_angle = min_angle.min(cosine.acos());
        }
    }
    let (_, singular_values, _) = eigenvectors
        .svd(false, false)
        .map_err(|e| Error::Eigensolver(format!("svd: {e}")))?;
    let smax = singular_values.iter().cloned().fold(0.0f64, f64::max);
    let smin = singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(CoalescenceMetrics { min_angle, condition_number })
}

/// Closed-form spectrum of the diagonalised quadratic-plus-drive Hamiltonian:
/// `λ = √(g² − κ²)`, `λ₀ = −2gε²/λ²`, levels `nλ + λ₀`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticSpectrum {
    pub lambda: C64,
    pub lambda0: C64,
    /// `n ↦ nλ + λ₀` over the requested range of excitation differences.
    pub levels: Vec<(i64, C64)>,
}

impl AnalyticSpectrum {
    pub fn level(&self, n: i64) -> Option<C64> {
        self.levels.iter().find(|(k, _)| *k == n).map(|(_, e)| *e)
    }
}

/// Evaluate the analytic spectrum away from the branch point; `κ = g` returns
/// the explicit singular error (the caller interprets the divergence).
pub fn analytic_spectrum(
    g: f64,
    kappa: f64,
    eps: f64,
    n_range: RangeInclusive<i64>,
) -> Result<AnalyticSpectrum> {
    let lam2 = g * g - kappa * kappa;
    if lam2 == 0.0 || lam2.abs() < f64::MIN_POSITIVE {
        return Err(Error::Singular(format!("branch point kappa = g = {g}")));
    }
    let lambda = if lam2 > 0.0 {
        C64::new(lam2.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-lam2).sqrt())
    };
    let lambda0 = C64::new(-2.0 * g * eps * eps / lam2, 0.0);
    if !lambda0.re.is_finite() {
        return Err(Error::Singular(format!("drive shift diverges at kappa = {kappa}")));
    }
    let levels = n_range
        .map(|n| (n, C64::new(n as f64, 0.0) * lambda + lambda0))
        .collect();
    Ok(AnalyticSpectrum { lambda, lambda0, levels })
}

/// Single-excitation block of the detuned coupled pair in the `{|10⟩, |01⟩}`
/// basis. Exact for `ε = 0`; a block approximation otherwise.
pub fn single_excitation_block(g: C64, kappa: f64, delta: f64) -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[(0, 0)] = C64::new(delta, -kappa);
    m[(0, 1)] = g;
    m[(1, 0)] = g.conj();
    m[(1, 1)] = C64::new(delta, kappa);
    m
}

/// Eigensolve and classify the single-excitation block.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub eigenvalues: Vec<C64>,
    pub classification: Classification,
    pub coalescence: CoalescenceMetrics,
}

pub fn single_excitation_report(g: C64, kappa: f64, delta: f64) -> Result<BlockReport> {
    let block = single_excitation_block(g, kappa, delta);
    let (eigenvalues, eigenvectors) = eig_matrix(&block)?;
    let radius = eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let classification = classify_spectrum(&eigenvalues, CLASSIFICATION_TOL * radius);
    let coalescence = coalescence_measure(&eigenvectors)?;
    Ok(BlockReport { eigenvalues, classification, coalescence })
}

/// Result of the exceptional-point bisection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpResult {
    pub kappa_star: f64,
    /// Bracket that was refined.
    pub bracket: (f64, f64),
    /// True when `ε > 0`: the single-excitation block only approximates the
    /// coalescence of the driven spectrum.
    pub block_approximation: bool,
}

/// Bisect the classification boundary of the single-excitation block over
/// `κ ∈ [kappa_lo, kappa_hi]`. The endpoints must classify differently.
pub fn locate_ep(
    g: f64,
    eps: f64,
    kappa_lo: f64,
    kappa_hi: f64,
    tol_kappa: f64,
) -> Result<EpResult> {
    let bad_tol = !tol_kappa.is_finite() || tol_kappa <= 0.0;
    if bad_tol || !kappa_lo.is_finite() || !kappa_hi.is_finite() || kappa_lo >= kappa_hi {
        return Err(Error::InvalidArgument(format!(
            "need kappa_lo < kappa_hi and tol_kappa > 0, got [{kappa_lo}, {kappa_hi}], {tol_kappa}"
        )));
    }
    let broken = |kappa: f64| -> Result<bool> {
        let report = single_excitation_report(C64::new(g, 0.0), kappa, 0.0)?;
        Ok(!report.classification.is_all_real())
    };
    let b_lo = broken(kappa_lo)?;
    let b_hi = broken(kappa_hi)?;
    if b_lo == b_hi {
        return Err(Error::NonBracketing { lo: kappa_lo, hi: kappa_hi });
    }
    let (mut lo, mut hi) = (kappa_lo, kappa_hi);
    let mut guard = 0;
    while hi - lo > tol_kappa {
        let mid = 0.5 * (lo + hi);
        if broken(mid)? == b_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        guard += 1;
        if guard > 200 {
            break;
        }
    }
    Ok(EpResult {
        kappa_star: 0.5 * (lo + hi),
        bracket: (kappa_lo, kappa_hi),
        block_approximation: eps > 0.0,
    })
}

/// Eigenvalue splitting near the transition: the exact value
/// `ΔE = E₊ − E₀ = λ = √((g−κ)(g+κ))` next to the sensing approximation
/// `√(2κΔg)` with `Δg = g − κ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Splitting {
    pub exact: f64,
    pub approx: f64,
}

pub fn splitting_law(g: f64, kappa: f64) -> Result<Splitting> {
    let delta_g = g - kappa;
    if delta_g < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "splitting law needs Δg = g − κ ≥ 0, got g = {g}, κ = {kappa}"
        )));
    }
    Ok(Splitting {
        exact: (delta_g * (g + kappa)).sqrt(),
        approx: (2.0 * kappa * delta_g).sqrt(),
    })
}

/// Continue three tracked branches to the next grid point: minimal total
/// matching distance over injective assignments, ties broken by the
/// previous-step velocity.
pub fn continue_branches(eigs: &[C64], prev: &[C64; 3], velocity: &[C64; 3]) -> [usize; 3] {
    assert!(eigs.len() >= 3, "need at least three eigenvalues to track");
    const CANDIDATES: usize = 8;
    let shortlist: Vec<Vec<usize>> = prev
        .iter()
        .map(|p| {
            let mut order: Vec<usize> = (0..eigs.len()).collect();
            order.sort_by(|&i, &j| (eigs[i] - p).norm().total_cmp(&(eigs[j] - p).norm()));
            order.truncate(CANDIDATES.min(eigs.len()));
            order
        })
        .collect();

    let mut best: Option<([usize; 3], f64, f64)> = None;
    for &i0 in &shortlist[0] {
        for &i1 in &shortlist[1] {
            if i1 == i0 {
                continue;
            }
            for &i2 in &shortlist[2] {
                if i2 == i0 || i2 == i1 {
                    continue;
                }
                let pick = [i0, i1, i2];
                let cost: f64 =
                    pick.iter().zip(prev.iter()).map(|(&i, p)| (eigs[i] - p).norm()).sum();
                let tiebreak: f64 = pick
                    .iter()
                    .zip(prev.iter().zip(velocity.iter()))
                    .map(|(&i, (p, v))| (eigs[i] - (p + v)).norm())
                    .sum();
                let better = match best {
                    None => true,
                    Some((_, c, t)) => {
                        cost < c - 1e-12 * (1.0 + c) || ((cost - c).abs() <= 1e-12 * (1.0 + c) && tiebreak < t)
                    }
                };
                if better {
                    best = Some((pick, cost, tiebreak));
                }
            }
        }
    }
    best.expect("shortlists are non-empty").0
}

/// Max over characteristic-polynomial coefficients of `|Im c_k|` relative to
/// the same coefficient built from eigenvalue moduli. Eigenvalues are
/// normalized by the spectral radius first, so the coefficients stay
/// representable.
pub fn char_poly_reality_residual(eigs: &[C64]) -> f64 {
    let radius = eigs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if radius == 0.0 {
        return 0.0;
    }
    let scaled: Vec<C64> = eigs.iter().map(|z| z / radius).collect();
    // elementary symmetric polynomials via incremental products
    let mut coeffs: Vec<C64> = vec![C64::new(1.0, 0.0)];
    let mut bounds: Vec<f64> = vec![1.0];
    for z in &scaled {
        coeffs.push(C64::new(0.0, 0.0));
        bounds.push(0.0);
        for k in (1..coeffs.len()).rev() {
            let carry = coeffs[k - 1] * z;
            coeffs[k] += carry;
            let carry_bound = bounds[k - 1] * z.norm();
            bounds[k] += carry_bound;
        }
    }
    coeffs
        .iter()
        .zip(bounds.iter())
        .skip(1)
        .map(|(c, b)| if *b > 0.0 { c.im.abs() / b } else { 0.0 })
        .fold(0.0f64, f64::max)
}

/// Find the eigenvalue nearest to a target; used when comparing numeric
/// spectra against the analytic levels.
pub fn nearest_eigenvalue(eigs: &[C64], target: C64) -> C64 {
    *eigs
        .iter()
        .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
        .expect("non-empty spectrum")
}

/// Unit-norm state helper for downstream classification.
pub fn column_state(report: &SpectrumReport, index: usize) -> Array1<C64> {
    report.eigenvectors.column(index).to_owned()
}
