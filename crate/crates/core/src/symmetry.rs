//! Antiunitary symmetry operators and certification by explicit conjugation.
//!
//! The reflections of interest combine a unitary factor `U` — a phase
//! diagonal times the mode-exchange permutation — with entrywise complex
//! conjugation `T` in the (real) Fock basis:
//!
//! * parity `P = exp[iπ(a†a + b†b)]`, diagonal `(−1)^{n_a+n_b}`;
//! * rotation `R(θ) = exp[iθ(a†a + b†b)]`, diagonal `e^{iθ(n_a+n_b)}`;
//! * exchange `P_S` (perfect shuffle), `|n_a, n_b⟩ → |n_b, n_a⟩`;
//! * the modified reflections `P̃T = P_S·P·T` and `R̃T(θ) = P_S·R(θ)·T`.
//!
//! Because `U` is a permutation times a phase within the truncated basis,
//! conjugating the truncated matrices is exact: truncation cannot create
//! false certification verdicts in either direction (the transformation rules
//! for the ladder matrices hold entrywise, which the tests pin down).

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Operator};

/// Map an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta % TAU;
    if t <= -PI {
        t += TAU;
    } else if t > PI {
        t -= TAU;
    }
    t
}

/// Parity operator: diagonal `(−1)^{n_a+…}` over occupation tuples.
pub fn parity_op(space: &FockSpace) -> Operator {
    space.diagonal(|occ| {
        let total: usize = occ.iter().sum();
        if total.is_multiple_of(2) { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) }
    })
}

/// Rotation operator: diagonal `e^{iθ(n_a+…)}`.
pub fn rotation_op(space: &FockSpace, theta: f64) -> Operator {
    space.diagonal(|occ| {
        let total: usize = occ.iter().sum();
        C64::from_polar(1.0, theta * total as f64)
    })
}

/// Mode-exchange operator (perfect shuffle): `|n_a, n_b⟩ → |n_b, n_a⟩`.
/// Defined for exactly two modes; the shared per-mode cutoff makes the
/// permutation map the truncated basis onto itself.
pub fn exchange_op(space: &FockSpace) -> Result<Operator> {
    let perm = exchange_permutation(space)?;
    let dim = space.dim();
    let mut matrix = Array2::zeros((dim, dim));
    for (j, &i) in perm.iter().enumerate() {
        matrix[(i, j)] = C64::new(1.0, 0.0);
    }
    Operator::from_matrix(*space, matrix)
}

fn exchange_permutation(space: &FockSpace) -> Result<Vec<usize>> {
    if space.num_modes() != 2 {
        return Err(Error::TwoModesRequired("the exchange operator"));
    }
    (0..space.dim())
        .map(|j| {
            let occ = space.occupations(j);
            space.index_of(&[occ[1], occ[0]])
        })
        .collect()
}

/// An antiunitary candidate: a unitary factor (phase diagonal × basis
/// permutation) plus a conjugation flag (true for anything containing `T`).
#[derive(Debug, Clone)]
pub struct AntiunitarySpec {
    unitary: Operator,
    conjugates: bool,
    // factorized form; column j of the unitary is phases[j] * e_{perm[j]}
    perm: Vec<usize>,
    phases: Vec<C64>,
}

/// How far a matrix may deviate from an exact phase-permutation product.
const UNITARY_TOL: f64 = 1e-12;

impl AntiunitarySpec {
    /// Wrap an explicit unitary. The matrix must be a phase diagonal times a
    /// basis permutation to within `1e−12`; anything else is rejected.
    pub fn new(unitary: Operator, conjugates: bool) -> Result<Self> {
        let (perm, phases) = factorize(&unitary)?;
        Ok(Self { unitary, conjugates, perm, phases })
    }

    /// The modified parity-time reflection `P̃T = P_S·P·T`.
    pub fn pt(space: &FockSpace) -> Result<Self> {
        let perm = exchange_permutation(space)?;
        let parity = parity_op(space);
        let phases: Vec<C64> = (0..space.dim()).map(|j| parity.matrix()[(j, j)]).collect();
        Ok(Self::from_parts(*space, perm, phases, true))
    }

    /// The rotation-time reflection `R̃T(θ) = P_S·R(θ)·T`.
    pub fn rt(space: &FockSpace, theta: f64) -> Result<Self> {
        let perm = exchange_permutation(space)?;
        let rotation = rotation_op(space, theta);
        let phases: Vec<C64> = (0..space.dim()).map(|j| rotation.matrix()[(j, j)]).collect();
        Ok(Self::from_parts(*space, perm, phases, true))
    }

    /// Plain complex conjugation (`U = I`), useful as a degenerate reflection.
    pub fn identity_conjugation(space: &FockSpace) -> Self {
        let dim = space.dim();
        Self::from_parts(*space, (0..dim).collect(), vec![C64::new(1.0, 0.0); dim], true)
    }

    fn from_parts(space: FockSpace, perm: Vec<usize>, phases: Vec<C64>, conjugates: bool) -> Self {
        let dim = space.dim();
        let mut matrix = Array2::zeros((dim, dim));
        for j in 0..dim {
            matrix[(perm[j], j)] = phases[j];
        }
        let unitary = Operator::from_matrix(space, matrix).expect("structural unitary is finite");
        Self { unitary, conjugates, perm, phases }
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn conjugates(&self) -> bool {
        self.conjugates
    }

    pub fn space(&self) -> FockSpace {
        self.unitary.space()
    }

    /// `U·conj(H)·U⁻¹` when the spec conjugates, else `U·H·U⁻¹`.
    ///
    /// Uses the phase-permutation factorization, which is entrywise exact:
    /// `A(H)[σ(i), σ(j)] = u_i · conj(u_j) · conj(H[i, j])`.
    pub fn transform(&self, h: &Operator) -> Result<Operator> {
        if h.space() != self.space() {
            return Err(Error::SpaceMismatch);
        }
        let dim = h.dim();
        let m = h.matrix();
        let mut out = Array2::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let entry = if self.conjugates { m[(i, j)].conj() } else { m[(i, j)] };
                out[(self.perm[i], self.perm[j])] = self.phases[i] * self.phases[j].conj() * entry;
            }
        }
        Ok(Operator::from_matrix(h.space(), out).expect("transform preserves finiteness"))
    }

    /// Apply to a state vector: `U·conj(v)` (or `U·v` without conjugation).
    pub fn apply_to_state(&self, state: &Array1<C64>) -> Result<Array1<C64>> {
        if state.len() != self.space().dim() {
            return Err(Error::ShapeMismatch {
                rows: state.len(),
                cols: 1,
                dim: self.space().dim(),
            });
        }
        let mut out = Array1::zeros(state.len());
        for j in 0..state.len() {
            let entry = if self.conjugates { state[j].conj() } else { state[j] };
            out[self.perm[j]] = self.phases[j] * entry;
        }
        Ok(out)
    }
}

/// Recover (permutation, phases) from a monomial unitary matrix.
fn factorize(unitary: &Operator) -> Result<(Vec<usize>, Vec<C64>)> {
    let dim = unitary.dim();
    let m = unitary.matrix();
    let mut perm = vec![usize::MAX; dim];
    let mut phases = vec![C64::new(0.0, 0.0); dim];
    let mut row_used = vec![false; dim];
    let mut worst = 0.0f64;
    for j in 0..dim {
        let mut found: Option<usize> = None;
        for i in 0..dim {
            let mag = m[(i, j)].norm();
            if mag > 0.5 {
                if found.is_some() {
                    return Err(Error::NotUnitary { residual: mag });
                }
                found = Some(i);
            } else {
                worst = worst.max(mag);
            }
        }
        let i = found.ok_or(Error::NotUnitary { residual: worst })?;
        if row_used[i] {
            return Err(Error::NotUnitary { residual: 1.0 });
        }
        row_used[i] = true;
        worst = worst.max((m[(i, j)].norm() - 1.0).abs());
        perm[j] = i;
        phases[j] = m[(i, j)];
    }
    if worst > UNITARY_TOL {
        return Err(Error::NotUnitary { residual: worst });
    }
    Ok((perm, phases))
}

/// Certification verdict for one antiunitary candidate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Certification {
    pub verdict: bool,
    /// Max-norm of `A(H) − H`; always reported so a single bad entry cannot hide.
    pub residual: f64,
}

/// True iff `A(H) = H` entrywise within `tol` (max-norm).
pub fn is_symmetric(h: &Operator, a: &AntiunitarySpec, tol: f64) -> Result<Certification> {
    let residual = a.transform(h)?.max_abs_diff(h)?;
    Ok(Certification { verdict: residual <= tol, residual })
}

/// A rotation angle found by residual search.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RtAngle {
    pub theta: f64,
    pub residual: f64,
}

/// Search for a `θ ∈ (−π, π]` at which `H` is `R̃T(θ)`-symmetric: coarse grid
/// (step π/360) followed by golden-section refinement of the residual.
/// Returns `None` when no angle clears `tol`; when several coarse angles
/// clear it (an undriven spec is invariant at every angle), the tie breaks
/// toward the smallest `|θ|`.
pub fn find_rt_angle(h: &Operator, tol: f64) -> Result<Option<RtAngle>> {
    let space = h.space();
    let residual_at = |theta: f64| -> Result<f64> {
        let a = AntiunitarySpec::rt(&space, theta)?;
        a.transform(h)?.max_abs_diff(h)
    };

    const STEPS: i64 = 360;
    let step = std::f64::consts::PI / STEPS as f64;
    let mut best_theta = 0.0;
    let mut best_residual = f64::INFINITY;
    let mut clear_theta: Option<f64> = None;
    for k in (1 - STEPS)..=STEPS {
        let theta = k as f64 * step;
        let r = residual_at(theta)?;
        if r < best_residual {
            best_residual = r;
            best_theta = theta;
        }
        if r <= tol {
            match clear_theta {
                Some(t) if t.abs() <= theta.abs() => {}
                _ => clear_theta = Some(theta),
            }
        }
    }

    let seed = clear_theta.unwrap_or(best_theta);
    let (theta, residual) = golden_min(seed - step, seed + step, &residual_at)?;
    // keep the seed unless refinement strictly improved on it
    let seed_residual = residual_at(seed)?;
    let (theta, residual) =
        if seed_residual <= residual { (seed, seed_residual) } else { (theta, residual) };
    if residual <= tol {
        Ok(Some(RtAngle { theta: wrap_angle(theta), residual }))
    } else {
        Ok(None)
    }
}

fn golden_min<F>(mut lo: f64, mut hi: f64, f: &F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..72 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, f(mid)?))
}

/// Outcome of testing whether a state is an eigenstate of a reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSymmetry {
    /// `A|Ψ⟩ = χ|Ψ⟩` with `|χ| = 1`; the eigenphase is returned.
    Symmetric { chi: C64 },
    Broken,
}

/// Classify a normalized state against a reflection: `Symmetric(χ)` when
/// `A|Ψ⟩ = χ|Ψ⟩` within `tol` and `|χ| = 1` within `tol`, else `Broken`.
pub fn classify_state_symmetry(
    state: &Array1<C64>,
    a: &AntiunitarySpec,
    tol: f64,
) -> Result<StateSymmetry> {
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ZeroVector);
    }
    let v = state.mapv(|z| z / norm);
    let w = a.apply_to_state(&v)?;
    let chi: C64 = v.iter().zip(w.iter()).map(|(vi, wi)| vi.conj() * wi).sum();
    let residual = v
        .iter()
        .zip(w.iter())
        .fold(0.0f64, |m, (vi, wi)| m.max((wi - chi * vi).norm()));
    if residual <= tol && (chi.norm() - 1.0).abs() <= tol {
        Ok(StateSymmetry::Symmetric { chi })
    } else {
        Ok(StateSymmetry::Broken)
    }
}
