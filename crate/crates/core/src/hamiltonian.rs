//! Declarative construction of the driven two-mode gain/loss Hamiltonians.
//!
//! A [`HamiltonianSpec`] is an ordered list of physical [`Term`]s with a
//! canonical JSON form (`{"type": "...", ...}` per term, complex numbers as
//! `[re, im]` pairs). The three named Hamiltonians are
//!
//! * `H1 = g(a†b + b†a) + ε(ia − ia†) + ε(ib − ib†) − iκ a†a + iκ b†b`
//! * `H2` — same, with drive `ε(a + a†) + ε(b + b†)`
//! * `H3` — detuned, complex-coupled, phased-drive generalisation of both
//!
//! plus the four families of rotation-time-invariant terms (kinds A–D).
//! Energies are stored in units of the coupling strength by default; the
//! presets keep the coupling real and positive.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Operator};
use crate::symmetry::wrap_angle;

/// The four families of rotation-time-invariant terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    /// `α₀ (a†)ⁿaⁿ + α₀* (b†)ⁿbⁿ` — n-th order nonlinearity.
    A,
    /// `α₁ (a†)ᵐbᵐ + α₁* (b†)ᵐaᵐ` — linear (m = 1) or nonlinear exchange.
    B,
    /// `|α₂| (e^{iφ} a^{j+1}(b†)ʲ + e^{iφ} b^{j+1}(a†)ʲ + H.c.)` — harmonic generation.
    C,
    /// `|α₃| (e^{i2φ} a^{l+2}(b†)ˡ + e^{i2φ} b^{l+2}(a†)ˡ + H.c.)` — third-harmonic-like.
    D,
}

/// One physical term of a two-mode Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Term {
    /// `g a†b + g* b†a`
    LinearCoupling { g: C64 },
    /// `ε(ia − ia†) + ε(ib − ib†)`
    DriveH1 { eps: f64 },
    /// `ε(e^{iφ} a + e^{−iφ} a†) + ε(e^{iφ} b + e^{−iφ} b†)`; `φ = 0` is the H2 drive.
    DrivePhased { eps: f64, phi: f64 },
    /// `−iκ a†a + iκ b†b` — loss on mode a, gain on mode b.
    GainLoss { kappa: f64 },
    /// `Δ (a†a + b†b)` — common detuning on both modes.
    Detuning { delta: f64 },
    /// One of the table families; `phi` is shared with the drive phase.
    TableTerm { kind: TableKind, order: u32, coefficient: C64, phi: f64 },
}

impl Term {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        let ok = match self {
            Term::LinearCoupling { g } => finite(g.re) && finite(g.im),
            Term::DriveH1 { eps } => finite(*eps) && *eps >= 0.0,
            Term::DrivePhased { eps, phi } => finite(*eps) && *eps >= 0.0 && finite(*phi),
            Term::GainLoss { kappa } => finite(*kappa) && *kappa >= 0.0,
            Term::Detuning { delta } => finite(*delta),
            Term::TableTerm { kind, order, coefficient, phi } => {
                if *order == 0 {
                    return Err(Error::InvalidSpec(match kind {
                        TableKind::C | TableKind::D => format!(
                            "table term {kind:?} with order 0 collapses to a drive; use drive_phased"
                        ),
                        _ => format!("table term {kind:?} requires order >= 1"),
                    }));
                }
                finite(coefficient.re) && finite(coefficient.im) && finite(*phi)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("non-finite or out-of-range parameter in {self:?}")))
        }
    }

    /// Assemble this term's matrix on `space`.
    pub fn build(&self, space: &FockSpace) -> Result<Operator> {
        self.validate()?;
        let a = space.annihilation(0)?;
        let b = space.annihilation(1)?;
        let op = match self {
            Term::LinearCoupling { g } => {
                let x = a.adjoint().mul(&b)?.scale(*g);
                x.add(&x.adjoint())?
            }
            Term::DriveH1 { eps } => {
                let ie = C64::new(0.0, *eps);
                let quad_a = a.sub(&a.adjoint())?;
                let quad_b = b.sub(&b.adjoint())?;
                quad_a.add(&quad_b)?.scale(ie)
            }
            Term::DrivePhased { eps, phi } => {
                let phase = C64::from_polar(*eps, *phi);
                let x = a.add(&b)?.scale(phase);
                x.add(&x.adjoint())?
            }
            Term::GainLoss { kappa } => {
                let loss = space.number(0)?.scale(C64::new(0.0, -*kappa));
                let gain = space.number(1)?.scale(C64::new(0.0, *kappa));
                loss.add(&gain)?
            }
            Term::Detuning { delta } => {
                let d = C64::new(*delta, 0.0);
                space.number(0)?.add(&space.number(1)?)?.scale(d)
            }
            Term::TableTerm { kind, order, coefficient, phi } => {
                build_table_term(space, *kind, *order, *coefficient, *phi)?
            }
        };
        Ok(op)
    }

    /// Value of the named scalar parameter, if this term carries one.
    fn parameter(&self, name: &str) -> Option<f64> {
        match (self, name) {
            (Term::LinearCoupling { g }, "g") => Some(g.re),
            (Term::DriveH1 { eps }, "eps") | (Term::DrivePhased { eps, .. }, "eps") => Some(*eps),
            (Term::DrivePhased { phi, .. }, "phi") => Some(*phi),
            (Term::GainLoss { kappa }, "kappa") => Some(*kappa),
            (Term::Detuning { delta }, "delta") => Some(*delta),
            _ => None,
        }
    }

    /// Overwrite the named scalar parameter. Returns whether it applied.
    fn set_parameter(&mut self, name: &str, value: f64) -> bool {
        match (self, name) {
            (Term::LinearCoupling { g }, "g") => {
                *g = C64::new(value, 0.0);
                true
            }
            (Term::DriveH1 { eps }, "eps") => {
                *eps = value;
                true
            }
            (Term::DrivePhased { eps, .. }, "eps") => {
                *eps = value;
                true
            }
            (Term::DrivePhased { phi, .. }, "phi") => {
                *phi = value;
                true
            }
            (Term::GainLoss { kappa }, "kappa") => {
                *kappa = value;
                true
            }
            (Term::Detuning { delta }, "delta") => {
                *delta = value;
                true
            }
            _ => false,
        }
    }
}

fn default_units() -> String {
    "g".to_string()
}

/// Ordered list of terms with a canonical JSON representation.
///
/// Term order is preserved through serialization for reproducibility even
/// though assembly is order-insensitive up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub terms: Vec<Term>,
    /// Energy unit label; `"g"` means energies are in units of the coupling.
    #[serde(default = "default_units")]
    pub units: String,
}

impl HamiltonianSpec {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms, units: default_units() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidSpec("spec contains no terms".to_string()));
        }
        for term in &self.terms {
            term.validate()?;
        }
        Ok(())
    }

    /// First value of the named parameter among the terms.
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.terms.iter().find_map(|t| t.parameter(name))
    }

    /// Set the named parameter on every term carrying it; errors when the
    /// template has no such parameter.
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<()> {
        let mut hits = 0;
        for term in &mut self.terms {
            if term.set_parameter(name, value) {
                hits += 1;
            }
        }
        if hits == 0 {
            return Err(Error::InvalidSpec(format!("no term carries a parameter named `{name}`")));
        }
        Ok(())
    }

    /// Rotation angle at which this spec is expected to be rotation-time
    /// invariant, from the drive-phase rule `θ = −2φ` (the undriven families
    /// are invariant at every angle, reported here as `θ = 0`).
    pub fn suggested_rt_angle(&self) -> f64 {
        for term in &self.terms {
            match term {
                Term::DrivePhased { phi, .. } => return wrap_angle(-2.0 * phi),
                Term::DriveH1 { .. } => return wrap_angle(std::f64::consts::PI),
                Term::TableTerm { kind: TableKind::C | TableKind::D, phi, .. } => {
                    return wrap_angle(-2.0 * phi)
                }
                _ => {}
            }
        }
        0.0
    }
}

/// Sum of the term matrices in listed order.
pub fn assemble(space: &FockSpace, spec: &HamiltonianSpec) -> Result<Operator> {
    spec.validate()?;
    let mut total = space.zero();
    for term in &spec.terms {
        total = total.add(&term.build(space)?)?;
    }
    if !total.all_finite() {
        return Err(Error::NonFinite("assemble"));
    }
    Ok(total)
}

/// `H1` of the driven gain/loss pair: parity-time symmetric under the
/// exchange-modified parity.
pub fn build_h1(space: &FockSpace, g: f64, eps: f64, kappa: f64) -> Result<Operator> {
    assemble(
        space,
        &HamiltonianSpec::new(vec![
            Term::LinearCoupling { g: C64::new(g, 0.0) },
            Term::DriveH1 { eps },
            Term::GainLoss { kappa },
        ]),
    )
}

/// `H2`: same quadratic part as `H1` with the real drive `ε(a + a†) + ε(b + b†)`.
/// Not parity-time symmetric, but rotation-time symmetric at `θ = 0`.
pub fn build_h2(space: &FockSpace, g: f64, eps: f64, kappa: f64) -> Result<Operator> {
    assemble(
        space,
        &HamiltonianSpec::new(vec![
            Term::LinearCoupling { g: C64::new(g, 0.0) },
            Term::DrivePhased { eps, phi: 0.0 },
            Term::GainLoss { kappa },
        ]),
    )
}

/// `H3`: detuned, complex-coupled, phase-driven generalisation; rotation-time
/// invariant at `θ = −2φ`.
pub fn build_h3(
    space: &FockSpace,
    delta: f64,
    g: C64,
    eps: f64,
    phi: f64,
    kappa: f64,
) -> Result<Operator> {
    assemble(
        space,
        &HamiltonianSpec::new(vec![
            Term::Detuning { delta },
            Term::LinearCoupling { g },
            Term::DrivePhased { eps, phi },
            Term::GainLoss { kappa },
        ]),
    )
}

/// One term of the four rotation-time-invariant families.
///
/// Kind A is emitted as the two-mode pair `α₀(a†)ⁿaⁿ + α₀*(b†)ⁿbⁿ`: under the
/// rotation-time reflection the a-mode part maps onto the conjugated b-mode
/// part, so the pairing makes the invariance unconditional in the coefficient.
pub fn build_table_term(
    space: &FockSpace,
    kind: TableKind,
    order: u32,
    coefficient: C64,
    phi: f64,
) -> Result<Operator> {
    if order == 0 {
        // route through Term::validate for the kind-specific message
        Term::TableTerm { kind, order, coefficient, phi }.validate()?;
    }
    let n = order as usize;
    let a = space.annihilation(0)?;
    let b = space.annihilation(1)?;
    let op = match kind {
        TableKind::A => {
            let on_a = a.adjoint().pow(n).mul(&a.pow(n))?.scale(coefficient);
            let on_b = b.adjoint().pow(n).mul(&b.pow(n))?.scale(coefficient.conj());
            on_a.add(&on_b)?
        }
        TableKind::B => {
            let x = a.adjoint().pow(n).mul(&b.pow(n))?.scale(coefficient);
            x.add(&x.adjoint())?
        }
        TableKind::C => {
            let phase = C64::from_polar(coefficient.norm(), phi);
            let ab = a.pow(n + 1).mul(&b.adjoint().pow(n))?;
            let ba = b.pow(n + 1).mul(&a.adjoint().pow(n))?;
            let x = ab.add(&ba)?.scale(phase);
            x.add(&x.adjoint())?
        }
        TableKind::D => {
            let phase = C64::from_polar(coefficient.norm(), 2.0 * phi);
            let ab = a.pow(n + 2).mul(&b.adjoint().pow(n))?;
            let ba = b.pow(n + 2).mul(&a.adjoint().pow(n))?;
            let x = ab.add(&ba)?.scale(phase);
            x.add(&x.adjoint())?
        }
    };
    Ok(op)
}
