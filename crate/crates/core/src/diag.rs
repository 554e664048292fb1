//! Analytic diagonalisation of the driven pair by bosonic algebra: complex
//! mode mixing, drive coefficients, and displacement shifts.
//!
//! This is an independent route to the spectrum and serves as the oracle
//! against the dense numeric eigensolver. The mixed ladder pairs are *not*
//! Hermitian conjugates of each other for `κ > 0`, but they satisfy the
//! canonical commutation relations away from the truncation edge, which is
//! what the diagonal form needs.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Operator};

/// Principal-branch `λ = √(g² − κ²)`: positive real below threshold, positive
/// imaginary above. Kept local so this module stays an independent code path
/// from the spectrum formulas it cross-checks.
fn lambda_of(g: f64, kappa: f64) -> Result<C64> {
    let lam2 = g * g - kappa * kappa;
    if lam2 == 0.0 || lam2.abs() < f64::MIN_POSITIVE {
        return Err(Error::Singular(format!("branch point kappa = g = {g}")));
    }
    Ok(if lam2 > 0.0 {
        C64::new(lam2.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-lam2).sqrt())
    })
}

/// Complex mixing half-angle: `sin(α/2) = √((λ+iκ)/2λ)` with
/// `cos(α/2)` pinned by `2·sin·cos·λ = g`, which also keeps
/// `cos² + sin² = 1` exactly.
#[derive(Debug, Clone, Copy)]
pub struct MixingAngle {
    pub cos_half: C64,
    pub sin_half: C64,
    pub lambda: C64,
}

pub fn mixing_angle(g: f64, kappa: f64) -> Result<MixingAngle> {
    let lambda = lambda_of(g, kappa)?;
    let i_kappa = C64::new(0.0, kappa);
    let sin_half = ((lambda + i_kappa) / (2.0 * lambda)).sqrt();
    let cos_half = C64::new(g, 0.0) / (2.0 * lambda * sin_half);
    Ok(MixingAngle { cos_half, sin_half, lambda })
}

/// The mixed ladder operators `c, c⁺, d, d⁺` (and their displaced versions).
#[derive(Debug, Clone)]
pub struct EigenmodeOps {
    pub c: Operator,
    pub c_plus: Operator,
    pub d: Operator,
    pub d_plus: Operator,
}

/// Mix the bare modes: `[c, d]ᵀ = R·[a, b]ᵀ` and `[c⁺, d⁺]ᵀ = R·[a†, b†]ᵀ`
/// with the complex rotation `R = [[cos(α/2), sin(α/2)], [−sin(α/2), cos(α/2)]]`.
pub fn mode_mix(space: &FockSpace, angle: &MixingAngle) -> Result<EigenmodeOps> {
    if space.num_modes() != 2 {
        return Err(Error::TwoModesRequired("mode mixing"));
    }
    let a = space.annihilation(0)?;
    let b = space.annihilation(1)?;
    let a_dag = a.adjoint();
    let b_dag = b.adjoint();
    let cos = angle.cos_half;
    let sin = angle.sin_half;
    Ok(EigenmodeOps {
        c: a.scale(cos).add(&b.scale(sin))?,
        d: a.scale(-sin).add(&b.scale(cos))?,
        c_plus: a_dag.scale(cos).add(&b_dag.scale(sin))?,
        d_plus: a_dag.scale(-sin).add(&b_dag.scale(cos))?,
    })
}

/// Drive amplitudes in the eigenmode basis: `ε_c = ε(cos + sin)`,
/// `ε_d = ε(cos − sin)`.
#[derive(Debug, Clone, Copy)]
pub struct DriveCoefficients {
    pub eps_c: C64,
    pub eps_d: C64,
}

pub fn drive_coefficients(eps: f64, angle: &MixingAngle) -> DriveCoefficients {
    DriveCoefficients {
        eps_c: eps * (angle.cos_half + angle.sin_half),
        eps_d: eps * (angle.cos_half - angle.sin_half),
    }
}

impl DriveCoefficients {
    /// Uniform spectral shift implied by the displacement:
    /// `λ₀ = −(ε_c² − ε_d²)/λ`.
    pub fn lambda0(&self, lambda: C64) -> C64 {
        -(self.eps_c * self.eps_c - self.eps_d * self.eps_d) / lambda
    }
}

/// Displacement shifts `c_ε = c + (ε_c/λ)I`, `d_ε = d − (ε_d/λ)I` (and the
/// same shifts on the plus operators). The displacement-operator conjugation
/// equals this shift, and the shift form is exact on the truncated space.
pub fn displace(
    ops: &EigenmodeOps,
    coeffs: &DriveCoefficients,
    lambda: C64,
) -> Result<EigenmodeOps> {
    if lambda.norm() == 0.0 {
        return Err(Error::Singular("displacement needs λ ≠ 0".to_string()));
    }
    let space = ops.c.space();
    let id = space.identity();
    let shift_c = id.scale(coeffs.eps_c / lambda);
    let shift_d = id.scale(coeffs.eps_d / lambda);
    Ok(EigenmodeOps {
        c: ops.c.add(&shift_c)?,
        c_plus: ops.c_plus.add(&shift_c)?,
        d: ops.d.sub(&shift_d)?,
        d_plus: ops.d_plus.sub(&shift_d)?,
    })
}

/// The extra step for `H1`: `ic → c`, `−ic⁺ → c⁺` (and the same for `d`).
/// The new operators satisfy the same commutation relations and turn the
/// `ε_c(ic − ic⁺)` drive into the `ε_c(c + c⁺)` form.
pub fn h1_phase_substitution(ops: &EigenmodeOps) -> EigenmodeOps {
    let i = C64::new(0.0, 1.0);
    EigenmodeOps {
        c: ops.c.scale(i),
        d: ops.d.scale(i),
        c_plus: ops.c_plus.scale(-i),
        d_plus: ops.d_plus.scale(-i),
    }
}

/// `λ(c⁺c − d⁺d)` for the given pair.
pub fn quadratic_form(ops: &EigenmodeOps, lambda: C64) -> Result<Operator> {
    let n_c = ops.c_plus.mul(&ops.c)?;
    let n_d = ops.d_plus.mul(&ops.d)?;
    Ok(n_c.sub(&n_d)?.scale(lambda))
}

/// The diagonal form `λ(c_ε⁺c_ε − d_ε⁺d_ε) + λ₀·I` assembled through the full
/// pipeline for `H2`; entrywise equal to the built matrix away from the
/// truncation edge.
pub fn reconstruct_h2(space: &FockSpace, g: f64, kappa: f64, eps: f64) -> Result<Operator> {
    let angle = mixing_angle(g, kappa)?;
    let ops = mode_mix(space, &angle)?;
    let coeffs = drive_coefficients(eps, &angle);
    reconstruct_from(space, &ops, &coeffs, angle.lambda)
}

/// Same pipeline for `H1`: phase substitution first, then displacement.
pub fn reconstruct_h1(space: &FockSpace, g: f64, kappa: f64, eps: f64) -> Result<Operator> {
    let angle = mixing_angle(g, kappa)?;
    let ops = h1_phase_substitution(&mode_mix(space, &angle)?);
    let coeffs = drive_coefficients(eps, &angle);
    reconstruct_from(space, &ops, &coeffs, angle.lambda)
}

fn reconstruct_from(
    space: &FockSpace,
    ops: &EigenmodeOps,
    coeffs: &DriveCoefficients,
    lambda: C64,
) -> Result<Operator> {
    let displaced = displace(ops, coeffs, lambda)?;
    let quad = quadratic_form(&displaced, lambda)?;
    quad.add(&space.identity().scale(coeffs.lambda0(lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_h1, build_h2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_close(x: C64, y: C64, tol: f64) {
        assert!((x - y).norm() <= tol, "{x} != {y}");
    }

    #[test]
    fn mixing_angle_symmetric_beam_splitter() {
        let angle = mixing_angle(1.0, 0.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(angle.cos_half, c(s, 0.0), 1e-15);
        assert_close(angle.sin_half, c(s, 0.0), 1e-15);
        assert_close(angle.lambda, c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn mixing_angle_frozen_values() {
        // oracle: direct arithmetic on the closed forms;
        // (0.75 ± 0.25i)² = 0.5 ∓ 0.375i reproduces (λ ∓ iκ)/(2λ) at λ = 0.8
        let angle = mixing_angle(1.0, 0.6).unwrap();
        assert_close(angle.sin_half, c(0.75, 0.25), 1e-14);
        assert_close(angle.cos_half, c(0.75, -0.25), 1e-14);

        let unity = angle.cos_half * angle.cos_half + angle.sin_half * angle.sin_half;
        assert_close(unity, c(1.0, 0.0), 1e-14);
        let product = 2.0 * angle.sin_half * angle.cos_half * angle.lambda;
        assert_close(product, c(1.0, 0.0), 1e-14);
    }

    #[test]
    fn mixing_angle_is_singular_at_the_branch_point() {
        assert!(matches!(mixing_angle(1.0, 1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn mixed_modes_satisfy_canonical_commutators_inside() {
        let space = FockSpace::two_mode(6).unwrap();
        let angle = mixing_angle(1.0, 0.6).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let id = space.identity();
        let zero = space.zero();

        let checks = [
            (ops.c.commutator(&ops.c_plus).unwrap(), &id),
            (ops.d.commutator(&ops.d_plus).unwrap(), &id),
            (ops.c.commutator(&ops.d_plus).unwrap(), &zero),
            (ops.d.commutator(&ops.c_plus).unwrap(), &zero),
        ];
        for (i, (comm, expect)) in checks.iter().enumerate() {
            let residual = comm.interior_max_abs_diff(expect, 1).unwrap();
            assert!(residual < 1e-10, "commutator {i}: residual {residual}");
        }
    }

    #[test]
    fn hermitian_case_mixes_to_sum_and_difference_modes() {
        let space = FockSpace::two_mode(3).unwrap();
        let angle = mixing_angle(1.0, 0.0).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let a = space.annihilation(0).unwrap();
        let b = space.annihilation(1).unwrap();

        let sum = a.add(&b).unwrap().scale(s);
        assert!(ops.c.max_abs_diff(&sum).unwrap() < 1e-15);
        let diff = b.sub(&a).unwrap().scale(s);
        assert!(ops.d.max_abs_diff(&diff).unwrap() < 1e-15);
        // only in the Hermitian case is c⁺ the adjoint of c
        assert!(ops.c_plus.max_abs_diff(&ops.c.adjoint()).unwrap() < 1e-15);
    }

    #[test]
    fn quadratic_form_reconstructs_the_undriven_hamiltonian() {
        let space = FockSpace::two_mode(6).unwrap();
        let (g, kappa) = (1.0, 0.6);
        let angle = mixing_angle(g, kappa).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let quad = quadratic_form(&ops, angle.lambda).unwrap();
        let h = build_h1(&space, g, 0.0, kappa).unwrap();
        let residual = quad.interior_max_abs_diff(&h, 2).unwrap();
        assert!(residual < 1e-12, "residual {residual}");
    }

    #[test]
    fn drive_coefficient_identities() {
        let angle = mixing_angle(1.0, 0.0).unwrap();
        let coeffs = drive_coefficients(0.1, &angle);
        assert_close(coeffs.eps_c, c(0.1 * 2.0f64.sqrt(), 0.0), 1e-15);
        assert_close(coeffs.eps_d, c(0.0, 0.0), 1e-15);

        let coeffs = drive_coefficients(0.0, &angle);
        assert_close(coeffs.eps_c, c(0.0, 0.0), 0.0);
        assert_close(coeffs.eps_d, c(0.0, 0.0), 0.0);

        let angle = mixing_angle(1.0, 0.6).unwrap();
        let coeffs = drive_coefficients(0.1, &angle);
        assert_close(coeffs.eps_c, c(0.15, 0.0), 1e-15);
        assert_close(coeffs.eps_d, c(0.0, -0.05), 1e-15);
        let diff = coeffs.eps_c * coeffs.eps_c - coeffs.eps_d * coeffs.eps_d;
        assert_close(diff, c(0.025, 0.0), 1e-15); // = 2gε²/λ at λ = 0.8
        let sum = coeffs.eps_c * coeffs.eps_c + coeffs.eps_d * coeffs.eps_d;
        assert_close(sum, c(0.02, 0.0), 1e-15); // = 2ε²
    }

    #[test]
    fn zero_displacement_is_the_identity_transformation() {
        let space = FockSpace::two_mode(4).unwrap();
        let angle = mixing_angle(1.0, 0.4).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let coeffs = drive_coefficients(0.0, &angle);
        let displaced = displace(&ops, &coeffs, angle.lambda).unwrap();
        assert_eq!(displaced.c.max_abs_diff(&ops.c).unwrap(), 0.0);
        assert_eq!(displaced.d_plus.max_abs_diff(&ops.d_plus).unwrap(), 0.0);
    }

    #[test]
    fn displacement_leaves_commutators_alone() {
        let space = FockSpace::two_mode(5).unwrap();
        let angle = mixing_angle(1.0, 0.5).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let coeffs = drive_coefficients(0.2, &angle);
        let displaced = displace(&ops, &coeffs, angle.lambda).unwrap();
        let before = ops.c.commutator(&ops.c_plus).unwrap();
        let after = displaced.c.commutator(&displaced.c_plus).unwrap();
        assert!(after.max_abs_diff(&before).unwrap() < 1e-12);
    }

    #[test]
    fn displacement_requires_nonzero_lambda() {
        let space = FockSpace::two_mode(3).unwrap();
        let angle = mixing_angle(1.0, 0.5).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let coeffs = drive_coefficients(0.1, &angle);
        assert!(matches!(displace(&ops, &coeffs, c(0.0, 0.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn double_phase_substitution_negates() {
        let space = FockSpace::two_mode(3).unwrap();
        let angle = mixing_angle(1.0, 0.3).unwrap();
        let ops = mode_mix(&space, &angle).unwrap();
        let twice = h1_phase_substitution(&h1_phase_substitution(&ops));
        assert_eq!(twice.c.max_abs_diff(&ops.c.scale(c(-1.0, 0.0))).unwrap(), 0.0);
        assert_eq!(twice.c_plus.max_abs_diff(&ops.c_plus.scale(c(-1.0, 0.0))).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_form_reconstructs_h2() {
        let space = FockSpace::two_mode(8).unwrap();
        let (g, kappa, eps) = (1.0, 0.6, 0.1);
        let rebuilt = reconstruct_h2(&space, g, kappa, eps).unwrap();
        let built = build_h2(&space, g, eps, kappa).unwrap();
        let residual = rebuilt.interior_max_abs_diff(&built, 2).unwrap();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn diagonal_form_reconstructs_h1_via_the_substitution() {
        let space = FockSpace::two_mode(8).unwrap();
        let (g, kappa, eps) = (1.0, 0.6, 0.1);
        let rebuilt = reconstruct_h1(&space, g, kappa, eps).unwrap();
        let built = build_h1(&space, g, eps, kappa).unwrap();
        let residual = rebuilt.interior_max_abs_diff(&built, 2).unwrap();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn pipeline_shift_agrees_with_the_spectrum_formula() {
        for (g, kappa, eps) in [(1.0, 0.6, 0.1), (1.3, 0.9, 0.2), (0.7, 0.2, 0.05)] {
            let angle = mixing_angle(g, kappa).unwrap();
            let coeffs = drive_coefficients(eps, &angle);
            let pipeline = coeffs.lambda0(angle.lambda);
            let formula = crate::spectrum::analytic_spectrum(g, kappa, eps, 0..=0)
                .unwrap()
                .lambda0;
            assert_close(pipeline, formula, 1e-14);
        }
    }
}
