//! Bases of `C^A`, the per-edge lift, the map `E(a, b)` with its two slice
//! families, and the holographic transforms `f̂` / `f̌`.
//!
//! A basis is stored as its coefficient matrix `T` with `T[a][j]` the value
//! of element `j` at symbol `a`. On `|E|` edges the slices `E^[b]` stacked as
//! columns form the `|E|`-fold Kronecker power `M` of `T`, so every transform
//! here is one small matrix applied along each edge axis in turn:
//!
//! | transform     | per-edge operator |
//! |---------------|-------------------|
//! | `f̂`           | `T⁻¹`             |
//! | `f̌`           | `Tᵀ`              |
//! | reconstruct   | `T`               |
//!
//! The [`dense`] module computes the same maps from their definitions and is
//! the reference the fast path is tested against.

use std::ops::Deref;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::assignment::{space_size, Alphabet, Assignment, Assignments, EdgeSet, Scope};
use crate::error::{HolantError, Result};
use crate::function::{c_tensor_multi, pairing, FnTable, Scalar, ONE, ZERO};

/// Relative determinant threshold: `|det T| >= DET_RTOL * (max column norm)^|A|`.
pub const DET_RTOL: f64 = 1e-12;

/// Largest accepted 1-norm condition number of `T`.
pub const COND_CAP: f64 = 1e12;

/// Residual `‖T·T⁻¹ − I‖_max` above which one refinement step is applied.
pub const REFINE_THRESHOLD: f64 = 1e-12;

/// Residual `‖T·T⁻¹ − I‖_max` a basis must meet after refinement.
pub const INVERSE_TOL: f64 = 1e-10;

/// `|A|` linearly independent functions `A -> C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    alphabet: Arc<Alphabet>,
    labels: Arc<Alphabet>,
    /// Row-major `T`.
    matrix: Vec<Scalar>,
    /// Row-major `T⁻¹`.
    inverse: Vec<Scalar>,
    determinant: Scalar,
    condition: f64,
}

impl Basis {
    /// Builds a basis from row-major `T` (`T[a][j]` = element `j` at symbol `a`).
    pub fn from_matrix(alphabet: Arc<Alphabet>, matrix: Vec<Scalar>) -> Result<Self> {
        let n = alphabet.len();
        if matrix.len() != n * n {
            return Err(HolantError::BasisShape { expected: n, rows: matrix.len() / n.max(1), cols: n });
        }
        if let Some(i) = matrix.iter().position(|v| !v.is_finite()) {
            return Err(HolantError::NonFinite(i));
        }
        let t = DMatrix::from_row_slice(n, n, &matrix);

        let max_col = t.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        let threshold = DET_RTOL * max_col.powi(n as i32);
        let lu = t.clone().lu();
        let determinant = lu.determinant();
        let det = determinant.norm();
        if det.is_nan() || det < threshold || det == 0.0 {
            return Err(HolantError::SingularBasis { det: determinant.norm(), threshold });
        }
        let mut inv = lu.try_inverse().ok_or(HolantError::SingularBasis {
            det: determinant.norm(),
            threshold,
        })?;

        let condition = one_norm(&t) * one_norm(&inv);
        if condition.is_nan() || condition > COND_CAP {
            return Err(HolantError::IllConditionedBasis { cond: condition, cap: COND_CAP });
        }

        let identity = DMatrix::<Scalar>::identity(n, n);
        let mut residual = max_abs(&(&t * &inv - &identity));
        if residual > REFINE_THRESHOLD {
            // One Newton-Schulz step: X <- X (2I - T X).
            inv = &inv * (identity.scale(2.0) - &t * &inv);
            residual = max_abs(&(&t * &inv - &identity));
        }
        if residual.is_nan() || residual > INVERSE_TOL {
            return Err(HolantError::InaccurateInverse(residual));
        }

        let labels = Arc::new(default_labels(n));
        Ok(Self {
            alphabet,
            labels,
            matrix,
            inverse: inv.transpose().as_slice().to_vec(),
            determinant,
            condition,
        })
    }

    /// Builds a basis from `|A|` rows of `|A|` entries each.
    pub fn from_rows(alphabet: Arc<Alphabet>, rows: &[Vec<Scalar>]) -> Result<Self> {
        let n = alphabet.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            let cols = rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n);
            return Err(HolantError::BasisShape { expected: n, rows: rows.len(), cols });
        }
        Self::from_matrix(alphabet, rows.concat())
    }

    /// Builds a basis from its elements, each a function on the alphabet.
    pub fn from_elements(alphabet: Arc<Alphabet>, elements: &[FnTable]) -> Result<Self> {
        let n = alphabet.len();
        if elements.len() != n {
            return Err(HolantError::BasisShape { expected: n, rows: n, cols: elements.len() });
        }
        for e in elements {
            if e.alphabet() != &alphabet {
                return Err(HolantError::AlphabetMismatch);
            }
            if e.scope().len() != 1 {
                return Err(HolantError::ScopeMismatch);
            }
        }
        let matrix = (0..n)
            .flat_map(|a| elements.iter().map(move |e| e.values()[a]))
            .collect();
        Self::from_matrix(alphabet, matrix)
    }

    /// The indicator basis; `T = I`.
    pub fn standard(alphabet: Arc<Alphabet>) -> Self {
        let n = alphabet.len();
        let matrix = (0..n * n).map(|k| if k / n == k % n { ONE } else { ZERO }).collect();
        Self::from_matrix(alphabet, matrix).expect("identity is a basis")
    }

    /// Element `j` is the indicator of the first `j + 1` symbols; `T` is the
    /// upper-triangular all-ones matrix.
    pub fn cumulative(alphabet: Arc<Alphabet>) -> Self {
        let n = alphabet.len();
        let matrix = (0..n * n).map(|k| if k / n <= k % n { ONE } else { ZERO }).collect();
        Self::from_matrix(alphabet, matrix).expect("unit triangular is a basis")
    }

    /// Renames the basis elements; the names become the symbols of `B`.
    pub fn with_labels(mut self, labels: Alphabet) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(HolantError::AlphabetMismatch);
        }
        self.labels = Arc::new(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The basis elements viewed as an alphabet; transformed tables live on
    /// `B^E` over this alphabet.
    pub fn element_alphabet(&self) -> &Arc<Alphabet> {
        &self.labels
    }

    /// `T[a][j]`.
    pub fn entry(&self, symbol: usize, element: usize) -> Scalar {
        self.matrix[symbol * self.len() + element]
    }

    pub fn matrix(&self) -> &[Scalar] {
        &self.matrix
    }

    pub fn inverse(&self) -> &[Scalar] {
        &self.inverse
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.matrix.chunks(self.len()).map(<[Scalar]>::to_vec).collect()
    }

    pub fn determinant(&self) -> Scalar {
        self.determinant
    }

    /// 1-norm condition number `‖T‖₁‖T⁻¹‖₁`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Element `j` as a function on the alphabet.
    pub fn element(&self, j: usize) -> FnTable {
        let values = (0..self.len()).map(|a| self.entry(a, j)).collect();
        FnTable::on_symbols(self.alphabet.clone(), values).expect("valid size")
    }

    pub fn elements(&self) -> Vec<FnTable> {
        (0..self.len()).map(|j| self.element(j)).collect()
    }

    /// `max ‖T·T⁻¹ − I‖`.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.len();
        let t = DMatrix::from_row_slice(n, n, &self.matrix);
        let inv = DMatrix::from_row_slice(n, n, &self.inverse);
        max_abs(&(t * inv - DMatrix::identity(n, n)))
    }

    fn transposed(&self) -> Vec<Scalar> {
        let n = self.len();
        (0..n * n).map(|k| self.matrix[(k % n) * n + k / n]).collect()
    }
}

fn default_labels(n: usize) -> Alphabet {
    Alphabet::new((1..=n).map(|j| format!("b{j}"))).expect("distinct labels")
}

fn max_abs(m: &DMatrix<Scalar>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn one_norm(m: &DMatrix<Scalar>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// An assignment of basis elements to edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BAssignment(Assignment);

impl BAssignment {
    pub fn new(scope: Scope, basis: &Basis, elements: Vec<usize>) -> Result<Self> {
        Assignment::new(scope, basis.len(), elements).map(Self)
    }

    pub fn from_index(scope: Scope, basis: &Basis, index: usize) -> Result<Self> {
        Assignment::from_index(scope, basis.len(), index).map(Self)
    }

    pub fn from_assignment(x: Assignment, basis: &Basis) -> Result<Self> {
        if x.radix() != basis.len() {
            return Err(HolantError::AlphabetMismatch);
        }
        Ok(Self(x))
    }

    pub fn restrict(&self, scope: &Scope) -> Result<Self> {
        self.0.restrict(scope).map(Self)
    }

    pub fn into_inner(self) -> Assignment {
        self.0
    }
}

impl Deref for BAssignment {
    type Target = Assignment;

    fn deref(&self) -> &Assignment {
        &self.0
    }
}

/// All `B`-assignments on `scope`, in canonical order.
pub fn enumerate_b_assignments(scope: &Scope, basis: &Basis) -> Result<impl Iterator<Item = BAssignment>> {
    Ok(Assignments::new(scope.clone(), basis.len())?.map(BAssignment))
}

/// Lifts a function on the alphabet to the single-edge space `A^{e}`.
pub fn tau_lift(beta: &FnTable, parent: &Arc<EdgeSet>, edge: &str) -> Result<FnTable> {
    if beta.scope().len() != 1 {
        return Err(HolantError::ScopeMismatch);
    }
    let scope = Scope::single(parent.clone(), edge)?;
    FnTable::new(beta.alphabet().clone(), scope, beta.values().to_vec())
}

/// Inverse of [`tau_lift`]: reads a single-edge table back as a function on
/// the alphabet.
pub fn tau_unlift(f: &FnTable) -> Result<FnTable> {
    if f.scope().len() != 1 {
        return Err(HolantError::ScopeMismatch);
    }
    FnTable::on_symbols(f.alphabet().clone(), f.values().to_vec())
}

fn check_edge_sets(a: &Assignment, b: &BAssignment, basis: &Basis) -> Result<()> {
    if a.scope() != b.scope() {
        return Err(HolantError::ScopeMismatch);
    }
    if a.radix() != basis.len() || b.radix() != basis.len() {
        return Err(HolantError::AlphabetMismatch);
    }
    Ok(())
}

/// `E(a, b) = prod_e (element b(e))(a(e))`.
pub fn e_value(a: &Assignment, b: &BAssignment, basis: &Basis) -> Result<Scalar> {
    check_edge_sets(a, b, basis)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .fold(ONE, |acc, (&s, &j)| acc * basis.entry(s, j)))
}

/// `E^[b]`: the function `a -> E(a, b)` on `A^E`.
pub fn e_slice_b(b: &BAssignment, basis: &Basis) -> Result<FnTable> {
    if b.radix() != basis.len() {
        return Err(HolantError::AlphabetMismatch);
    }
    let scope = b.scope();
    let lifts = scope
        .labels()
        .zip(b.values())
        .map(|(edge, &j)| tau_lift(&basis.element(j), scope.parent(), edge))
        .collect::<Result<Vec<_>>>()?;
    c_tensor_multi(&lifts)
}

/// `E_[a]`: the function `b -> E(a, b)` on `B^E`.
pub fn e_slice_a(a: &Assignment, basis: &Basis) -> Result<FnTable> {
    if a.radix() != basis.len() {
        return Err(HolantError::AlphabetMismatch);
    }
    let scope = a.scope();
    let n = basis.len();
    let rows = scope
        .labels()
        .zip(a.values())
        .map(|(edge, &s)| {
            let row = (0..n).map(|j| basis.entry(s, j)).collect();
            let f = FnTable::on_symbols(basis.element_alphabet().clone(), row)?;
            tau_lift(&f, scope.parent(), edge)
        })
        .collect::<Result<Vec<_>>>()?;
    c_tensor_multi(&rows)
}

/// Applies the `n x n` row-major operator along every edge axis of a dense
/// table over `n^len` entries.
pub(crate) fn apply_along_edges(values: &[Scalar], n: usize, len: usize, op: &[Scalar]) -> Vec<Scalar> {
    debug_assert_eq!(op.len(), n * n);
    let mut cur = values.to_vec();
    let mut next = vec![ZERO; cur.len()];
    let mut fiber = vec![ZERO; n];
    for axis in 0..len {
        let stride = n.pow((len - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..cur.len()).step_by(block) {
            for inner in 0..stride {
                let base = start + inner;
                for (j, slot) in fiber.iter_mut().enumerate() {
                    *slot = cur[base + j * stride];
                }
                for r in 0..n {
                    let row = &op[r * n..(r + 1) * n];
                    next[base + r * stride] =
                        row.iter().zip(&fiber).fold(ZERO, |acc, (m, x)| acc + m * x);
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `f̂`: the coordinates of `f` in the basis `{E^[b]}`, so that
/// `f = sum_b f̂(b) E^[b]`.
pub fn hat_transform(f: &FnTable, basis: &Basis) -> Result<FnTable> {
    if f.alphabet() != basis.alphabet() {
        return Err(HolantError::AlphabetMismatch);
    }
    let n = basis.len();
    let values = apply_along_edges(f.values(), n, f.scope().len(), basis.inverse());
    FnTable::new(basis.element_alphabet().clone(), f.scope().clone(), values)
}

/// `f̌(b) = <f, E^[b]>`.
pub fn check_transform(f: &FnTable, basis: &Basis) -> Result<FnTable> {
    if f.alphabet() != basis.alphabet() {
        return Err(HolantError::AlphabetMismatch);
    }
    let n = basis.len();
    let values = apply_along_edges(f.values(), n, f.scope().len(), &basis.transposed());
    FnTable::new(basis.element_alphabet().clone(), f.scope().clone(), values)
}

/// `f(a) = <f̂, E_[a]>`, inverting [`hat_transform`].
pub fn reconstruct(fhat: &FnTable, basis: &Basis) -> Result<FnTable> {
    if fhat.alphabet() != basis.element_alphabet() {
        return Err(HolantError::AlphabetMismatch);
    }
    let n = basis.len();
    let values = apply_along_edges(fhat.values(), n, fhat.scope().len(), basis.matrix());
    FnTable::new(basis.alphabet().clone(), fhat.scope().clone(), values)
}

/// Both sides of `<⊛ f_i, E^[b]> = prod_i <f_i, E_i^[b|E_i]>`.
///
/// Returns `(unfactored, factored)`. The scopes of `fs` must partition the
/// domain of `b`.
pub fn factored_pairing_check(fs: &[FnTable], b: &BAssignment, basis: &Basis) -> Result<(Scalar, Scalar)> {
    let scopes: Vec<Scope> = fs.iter().map(|f| f.scope().clone()).collect();
    let partition = crate::assignment::Partition::new(b.scope().parent().clone(), scopes)
        .map_err(|e| HolantError::PartitionMismatch(e.to_string()))?;
    if !b.scope().is_full() {
        return Err(HolantError::PartitionMismatch("b must cover the whole edge set".into()));
    }
    let joint = c_tensor_multi(fs)?;
    let unfactored = pairing(&joint, &e_slice_b(b, basis)?)?;
    let factored = fs
        .iter()
        .zip(partition.parts())
        .map(|(f, part)| pairing(f, &e_slice_b(&b.restrict(part)?, basis)?))
        .try_fold(ONE, |acc, v| v.map(|v| acc * v))?;
    Ok((unfactored, factored))
}

/// Dense, definition-driven versions of the transforms.
///
/// These materialise the `|A|^|E| x |A|^|E|` matrix `M` whose columns are the
/// slices `E^[b]` and work with it directly. Cubic in the table size; used as
/// the reference for the Kronecker-structured path.
pub mod dense {
    use super::*;

    /// Largest table size the dense routines accept.
    pub const DENSE_MAX: usize = 4096;

    fn dense_size(radix: usize, len: usize) -> Result<usize> {
        let size = space_size(radix, len)?;
        if size > DENSE_MAX {
            return Err(HolantError::SpaceTooLarge { radix, len, cap: DENSE_MAX });
        }
        Ok(size)
    }

    /// `M` with column `k` = `E^[b_k]` in canonical order of `b`.
    pub fn slice_matrix(scope: &Scope, basis: &Basis) -> Result<DMatrix<Scalar>> {
        let size = dense_size(basis.len(), scope.len())?;
        let mut m = DMatrix::zeros(size, size);
        for (k, b) in enumerate_b_assignments(scope, basis)?.enumerate() {
            let col = e_slice_b(&b, basis)?;
            m.column_mut(k).copy_from_slice(col.values());
        }
        Ok(m)
    }

    /// `T ⊗ T ⊗ ... ⊗ T` (`len` factors), built from `T` alone.
    pub fn kron_power(basis: &Basis, len: usize) -> Result<DMatrix<Scalar>> {
        let n = basis.len();
        dense_size(n, len)?;
        let t = DMatrix::from_row_slice(n, n, basis.matrix());
        let mut m = DMatrix::from_element(1, 1, ONE);
        for _ in 0..len {
            m = m.kronecker(&t);
        }
        Ok(m)
    }

    pub fn determinant(m: &DMatrix<Scalar>) -> Scalar {
        m.clone().lu().determinant()
    }

    /// `ln |det M|` from the LU pivots; `-inf` when a pivot vanishes. Stays
    /// finite where the determinant itself under- or overflows.
    pub fn log_abs_determinant(m: &DMatrix<Scalar>) -> f64 {
        m.clone().lu().u().diagonal().iter().map(|p| p.norm().ln()).sum()
    }

    /// Solves `M f̂ = f` by LU with partial pivoting.
    pub fn hat_transform(f: &FnTable, basis: &Basis) -> Result<FnTable> {
        if f.alphabet() != basis.alphabet() {
            return Err(HolantError::AlphabetMismatch);
        }
        let m = slice_matrix(f.scope(), basis)?;
        let rhs = nalgebra::DVector::from_column_slice(f.values());
        let det = determinant(&m);
        let x = m
            .lu()
            .solve(&rhs)
            .ok_or(HolantError::SingularBasis { det: det.norm(), threshold: 0.0 })?;
        FnTable::new(basis.element_alphabet().clone(), f.scope().clone(), x.as_slice().to_vec())
    }

    /// `f̌(b) = <f, E^[b]>` for every `b`, one pairing each.
    pub fn check_transform(f: &FnTable, basis: &Basis) -> Result<FnTable> {
        if f.alphabet() != basis.alphabet() {
            return Err(HolantError::AlphabetMismatch);
        }
        dense_size(basis.len(), f.scope().len())?;
        let values = enumerate_b_assignments(f.scope(), basis)?
            .map(|b| pairing(f, &e_slice_b(&b, basis)?))
            .collect::<Result<Vec<_>>>()?;
        FnTable::new(basis.element_alphabet().clone(), f.scope().clone(), values)
    }

    /// `f(a) = <f̂, E_[a]>` for every `a`, one pairing each.
    pub fn reconstruct(fhat: &FnTable, basis: &Basis) -> Result<FnTable> {
        if fhat.alphabet() != basis.element_alphabet() {
            return Err(HolantError::AlphabetMismatch);
        }
        dense_size(basis.len(), fhat.scope().len())?;
        let values = Assignments::new(fhat.scope().clone(), basis.len())?
            .map(|a| pairing(fhat, &e_slice_a(&a, basis)?))
            .collect::<Result<Vec<_>>>()?;
        FnTable::new(basis.alphabet().clone(), fhat.scope().clone(), values)
    }
}
