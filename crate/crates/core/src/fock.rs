//! Truncated multimode Fock space and the dense bosonic operator algebra on it.
//!
//! Everything downstream (Hamiltonians, symmetry operators, spectra) is built
//! from [`Operator`] values tied to one [`FockSpace`]. Matrices are dense and
//! complex; at desk scale (two modes, cutoff ≤ 29) the dimension stays ≤ 900,
//! and full eigendecompositions are needed anyway.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Truncated occupation-number space: `num_modes` bosonic modes, each keeping
/// occupations `0..=cutoff`.
///
/// Basis ordering is row-major over occupation tuples with mode 0 outermost:
/// for two modes `(a, b)`, `index = n_a * (cutoff + 1) + n_b`. This ordering
/// is part of the serialized output contract, so downstream tools can
/// reconstruct states from flat indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    num_modes: usize,
    cutoff: usize,
    dim: usize,
}

impl FockSpace {
    /// Build a space with `num_modes ≥ 1` modes truncated at `cutoff ≥ 1`
    /// quanta per mode. Rejects dimensions that overflow `usize`.
    pub fn new(num_modes: usize, cutoff: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::InvalidSpace("num_modes must be at least 1"));
        }
        if cutoff == 0 {
            return Err(Error::InvalidSpace("cutoff must be at least 1"));
        }
        let per_mode = cutoff
            .checked_add(1)
            .ok_or(Error::InvalidSpace("cutoff + 1 overflows"))?;
        let mut dim: usize = 1;
        for _ in 0..num_modes {
            dim = dim
                .checked_mul(per_mode)
                .ok_or(Error::InvalidSpace("dimension overflows the index type"))?;
        }
        Ok(Self { num_modes, cutoff, dim })
    }

    /// Standard two-mode space used by the driven-cavity Hamiltonians.
    pub fn two_mode(cutoff: usize) -> Result<Self> {
        Self::new(2, cutoff)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Matrix dimension `(cutoff + 1)^num_modes`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat matrix index of an occupation tuple (mode 0 outermost).
    pub fn index_of(&self, occ: &[usize]) -> Result<usize> {
        if occ.len() != self.num_modes {
            return Err(Error::InvalidSpace("occupation tuple has wrong length"));
        }
        let per_mode = self.cutoff + 1;
        let mut index = 0;
        for &n in occ {
            if n > self.cutoff {
                return Err(Error::InvalidSpace("occupation exceeds the cutoff"));
            }
            index = index * per_mode + n;
        }
        Ok(index)
    }

    /// Occupation tuple of a flat matrix index.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.dim);
        let per_mode = self.cutoff + 1;
        let mut occ = vec![0; self.num_modes];
        let mut rest = index;
        for mode in (0..self.num_modes).rev() {
            occ[mode] = rest % per_mode;
            rest /= per_mode;
        }
        occ
    }

    /// Annihilation operator on `mode`: `⟨n−1|a|n⟩ = √n` within the mode's
    /// tensor factor, identity on the others. The column at `n = cutoff` is
    /// still populated; truncation only loses flows out of `cutoff + 1`.
    pub fn annihilation(&self, mode: usize) -> Result<Operator> {
        self.check_mode(mode)?;
        let mut matrix = Array2::zeros((self.dim, self.dim));
        for col in 0..self.dim {
            let occ = self.occupations(col);
            let n = occ[mode];
            if n >= 1 {
                let mut lowered = occ;
                lowered[mode] = n - 1;
                let row = self.index_of(&lowered).expect("lowered tuple stays in range");
                matrix[(row, col)] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
        Ok(Operator { space: *self, matrix })
    }

    /// Creation operator, the adjoint of [`annihilation`](Self::annihilation).
    pub fn creation(&self, mode: usize) -> Result<Operator> {
        Ok(self.annihilation(mode)?.adjoint())
    }

    /// Number operator `a†a`, diagonal `(0, 1, …, cutoff)` on `mode`.
    pub fn number(&self, mode: usize) -> Result<Operator> {
        self.check_mode(mode)?;
        let mut matrix = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            matrix[(i, i)] = C64::new(self.occupations(i)[mode] as f64, 0.0);
        }
        Ok(Operator { space: *self, matrix })
    }

    /// Identity operator.
    pub fn identity(&self) -> Operator {
        Operator { space: *self, matrix: Array2::eye(self.dim) }
    }

    /// Zero operator.
    pub fn zero(&self) -> Operator {
        Operator { space: *self, matrix: Array2::zeros((self.dim, self.dim)) }
    }

    /// Diagonal operator `f(n_0, …, n_{M−1})` over occupation tuples.
    pub fn diagonal<F>(&self, f: F) -> Operator
    where
        F: Fn(&[usize]) -> C64,
    {
        let mut matrix = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            matrix[(i, i)] = f(&self.occupations(i));
        }
        Operator { space: *self, matrix }
    }

    /// Indices of basis states whose occupations are all `≤ cutoff − buffer`.
    ///
    /// Truncation-edge exclusion for commutator and reconstruction checks:
    /// the buffer is one level per operator power involved in the identity
    /// under test.
    pub fn interior_indices(&self, buffer: usize) -> Vec<usize> {
        let limit = self.cutoff.saturating_sub(buffer);
        (0..self.dim)
            .filter(|&i| self.occupations(i).iter().all(|&n| n <= limit))
            .collect()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.num_modes {
            return Err(Error::ModeOutOfRange { mode, num_modes: self.num_modes });
        }
        Ok(())
    }
}

/// Dense complex operator tied to a [`FockSpace`]. Energies are dimensionless
/// (units of the coupling strength unless stated otherwise).
///
/// Values are immutable after construction and all combinators are pure, so
/// operators can be shared read-only across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    matrix: Array2<C64>,
}

impl Operator {
    /// Wrap an explicit matrix; the shape must match the space dimension and
    /// all entries must be finite.
    pub fn from_matrix(space: FockSpace, matrix: Array2<C64>) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != space.dim() || cols != space.dim() {
            return Err(Error::ShapeMismatch { rows, cols, dim: space.dim() });
        }
        let op = Self { space, matrix };
        if !op.all_finite() {
            return Err(Error::NonFinite("from_matrix"));
        }
        Ok(op)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn all_finite(&self) -> bool {
        self.matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_space(other)?;
        Ok(Operator { space: self.space, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_space(other)?;
        Ok(Operator { space: self.space, matrix: &self.matrix - &other.matrix })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_space(other)?;
        Ok(Operator { space: self.space, matrix: self.matrix.dot(&other.matrix) })
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator { space: self.space, matrix: self.matrix.mapv(|z| factor * z) }
    }

    /// Hermitian conjugate (conjugate transpose).
    pub fn adjoint(&self) -> Operator {
        let mut matrix = Array2::zeros(self.matrix.raw_dim());
        for ((i, j), z) in self.matrix.indexed_iter() {
            matrix[(j, i)] = z.conj();
        }
        Operator { space: self.space, matrix }
    }

    /// Entrywise complex conjugation in the Fock basis. This is the action of
    /// the time-reversal operator: the ladder matrices are real here, so
    /// conjugation flips only explicit factors of `i`.
    pub fn basis_conjugate(&self) -> Operator {
        Operator { space: self.space, matrix: self.matrix.mapv(|z| z.conj()) }
    }

    /// `self^n` by repeated multiplication; `n = 0` gives the identity.
    pub fn pow(&self, n: usize) -> Operator {
        let mut acc = self.space.identity();
        for _ in 0..n {
            acc = Operator { space: self.space, matrix: acc.matrix.dot(&self.matrix) };
        }
        acc
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.check_space(other)?;
        let forward = self.matrix.dot(&other.matrix);
        let backward = other.matrix.dot(&self.matrix);
        Ok(Operator { space: self.space, matrix: forward - backward })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()).expect("same space") <= tol
    }

    /// Max-norm of the entrywise difference. A single bad entry cannot hide.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_space(other)?;
        let mut max = 0.0f64;
        for (x, y) in self.matrix.iter().zip(other.matrix.iter()) {
            max = max.max((x - y).norm());
        }
        Ok(max)
    }

    /// Max-norm of the entrywise difference restricted to rows and columns of
    /// interior states (all occupations `≤ cutoff − buffer`).
    pub fn interior_max_abs_diff(&self, other: &Operator, buffer: usize) -> Result<f64> {
        self.check_space(other)?;
        let interior = self.space.interior_indices(buffer);
        let mut max = 0.0f64;
        for &i in &interior {
            for &j in &interior {
                max = max.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        Ok(max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Apply to a state vector.
    pub fn apply(&self, state: &Array1<C64>) -> Result<Array1<C64>> {
        if state.len() != self.dim() {
            return Err(Error::ShapeMismatch { rows: state.len(), cols: 1, dim: self.dim() });
        }
        Ok(self.matrix.dot(state))
    }

    fn check_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(FockSpace::new(2, 1).unwrap().dim(), 4);
        assert_eq!(FockSpace::new(2, 9).unwrap().dim(), 100);
        assert_eq!(FockSpace::new(1, 5).unwrap().dim(), 6);
    }

    #[test]
    fn space_rejects_bad_arguments() {
        assert!(FockSpace::new(0, 3).is_err());
        assert!(FockSpace::new(2, 0).is_err());
        // (2^62)^2 overflows a 64-bit index
        assert!(FockSpace::new(2, (1usize << 62) - 1).is_err());
    }

    #[test]
    fn basis_index_is_row_major_mode_a_outermost() {
        let space = FockSpace::two_mode(2).unwrap();
        assert_eq!(space.index_of(&[0, 0]).unwrap(), 0);
        assert_eq!(space.index_of(&[0, 1]).unwrap(), 1);
        assert_eq!(space.index_of(&[1, 0]).unwrap(), 3);
        assert_eq!(space.index_of(&[2, 2]).unwrap(), 8);
        assert_eq!(space.occupations(5), vec![1, 2]);
    }

    #[test]
    fn annihilation_single_mode_entries() {
        let space = FockSpace::new(1, 2).unwrap();
        let a = space.annihilation(0).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 2)], c(2.0f64.sqrt(), 0.0));
        let mut nonzero = 0;
        for z in m.iter() {
            if z.norm() > 0.0 {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn commutator_is_identity_on_interior() {
        let space = FockSpace::two_mode(5).unwrap();
        for mode in 0..2 {
            let a = space.annihilation(mode).unwrap();
            let comm = a.commutator(&a.adjoint()).unwrap();
            let residual = comm.interior_max_abs_diff(&space.identity(), 1).unwrap();
            assert!(residual < 1e-12, "mode {mode}: residual {residual}");
        }
    }

    #[test]
    fn different_modes_commute_exactly() {
        let space = FockSpace::two_mode(4).unwrap();
        let a = space.annihilation(0).unwrap();
        let b = space.annihilation(1).unwrap();
        assert_eq!(a.commutator(&b).unwrap().max_abs(), 0.0);
        assert_eq!(a.commutator(&b.adjoint()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn number_operator_diagonal() {
        let space = FockSpace::new(1, 4).unwrap();
        let n = space.creation(0).unwrap().mul(&space.annihilation(0).unwrap()).unwrap();
        // (√k)² rounds in the last bit
        for k in 0..=4 {
            assert!((n.matrix()[(k, k)] - c(k as f64, 0.0)).norm() < 1e-14);
        }
        assert!(n.max_abs_diff(&space.number(0).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn adjoint_of_annihilation_is_creation() {
        let space = FockSpace::two_mode(3).unwrap();
        let a = space.annihilation(0).unwrap();
        assert_eq!(a.adjoint().max_abs_diff(&space.creation(0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn conjugation_flips_i_and_fixes_real_matrices() {
        let space = FockSpace::two_mode(2).unwrap();
        let i_identity = space.identity().scale(c(0.0, 1.0));
        let flipped = i_identity.basis_conjugate();
        assert_eq!(flipped.max_abs_diff(&space.identity().scale(c(0.0, -1.0))).unwrap(), 0.0);

        let a = space.annihilation(0).unwrap();
        assert_eq!(a.basis_conjugate().max_abs_diff(&a).unwrap(), 0.0);
    }

    #[test]
    fn scaling_cancels() {
        let space = FockSpace::two_mode(2).unwrap();
        let id = space.identity();
        let sum = id.scale(c(2.0, 0.0)).add(&id.scale(c(-2.0, 0.0))).unwrap();
        assert_eq!(sum.max_abs(), 0.0);
    }

    #[test]
    fn identity_fixes_random_operator() {
        let space = FockSpace::two_mode(2).unwrap();
        let x = pseudo_random_operator(space, 7);
        assert!(space.identity().mul(&x).unwrap().max_abs_diff(&x).unwrap() < 1e-15);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let s1 = FockSpace::two_mode(2).unwrap();
        let s2 = FockSpace::two_mode(3).unwrap();
        let err = s1.identity().add(&s2.identity()).unwrap_err();
        assert!(matches!(err, Error::SpaceMismatch));
    }

    #[test]
    fn mode_out_of_range_is_an_error() {
        let space = FockSpace::two_mode(2).unwrap();
        assert!(matches!(
            space.annihilation(2).unwrap_err(),
            Error::ModeOutOfRange { mode: 2, num_modes: 2 }
        ));
    }

    #[test]
    fn from_matrix_rejects_non_finite() {
        let space = FockSpace::new(1, 1).unwrap();
        let mut m = Array2::<C64>::zeros((2, 2));
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(Operator::from_matrix(space, m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn hermitian_combinations_have_real_eigenvalues() {
        use ndarray_linalg::Eig;
        let space = FockSpace::two_mode(3).unwrap();
        for seed in 0..5u64 {
            let x = pseudo_random_operator(space, seed);
            let h = x.add(&x.adjoint()).unwrap().scale(c(0.5, 0.0));
            assert!(h.is_hermitian(1e-12));
            let (eigs, _) = h.matrix().eig().unwrap();
            let radius = eigs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            for e in eigs.iter() {
                assert!(e.im.abs() <= 1e-10 * radius.max(1.0), "eigenvalue {e} not real");
            }
        }
        // and a manifestly non-Hermitian counterexample
        let g = space.annihilation(0).unwrap().scale(c(0.0, 1.0));
        assert!(!g.add(&space.number(0).unwrap().scale(c(0.0, 1.0))).unwrap().is_hermitian(1e-10));
    }

    /// Deterministic filler matrix used where the exact values are irrelevant.
    fn pseudo_random_operator(space: FockSpace, seed: u64) -> Operator {
        let dim = space.dim();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let matrix = Array2::from_shape_fn((dim, dim), |_| C64::new(next(), next()));
        Operator::from_matrix(space, matrix).unwrap()
    }

    proptest! {
        #[test]
        fn basis_index_round_trips(num_modes in 1usize..4, cutoff in 1usize..6) {
            let space = FockSpace::new(num_modes, cutoff).unwrap();
            for index in 0..space.dim() {
                let occ = space.occupations(index);
                prop_assert_eq!(space.index_of(&occ).unwrap(), index);
            }
        }

        #[test]
        fn adjoint_and_conjugate_are_involutions(seed in 0u64..32) {
            let space = FockSpace::two_mode(2).unwrap();
            let x = pseudo_random_operator(space, seed);
            prop_assert_eq!(x.adjoint().adjoint().max_abs_diff(&x).unwrap(), 0.0);
            prop_assert_eq!(x.basis_conjugate().basis_conjugate().max_abs_diff(&x).unwrap(), 0.0);
        }
    }
}
