//! Holant instances over two partitions of one edge set, brute-force
//! evaluation in the original and the transformed domain, and verification
//! of their equality.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{decode_index, space_size, Alphabet, EdgeSet, Partition, Scope};
use crate::basis::{check_transform, hat_transform, Basis};
use crate::error::{HolantError, Result};
use crate::function::{c_tensor_multi, pairing, FnTable, Projection, Scalar, ONE, ZERO};

/// Denominator floor in [`relative_error`].
pub const ABS_FLOOR: f64 = 1e-300;

/// Lower bound of the default verification tolerance.
pub const MIN_TOLERANCE: f64 = 1e-9;

/// Per-unit roundoff allowance scaled by `cond(T)^|E|`.
pub const COND_ROUNDOFF: f64 = 1e-13;

/// Relative tolerance used by the internal evaluation-path cross-checks.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

/// Which side of the instance a function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The `g_i`, transformed with `f̂`.
    Generator,
    /// The `h_j`, transformed with `f̌`.
    Recognizer,
}

/// Generator functions `g_i` on `{E_i}` and recognizer functions `h_j` on
/// `{E'_j}`, two partitions of one edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct HolantInstance {
    alphabet: Arc<Alphabet>,
    edges: Arc<EdgeSet>,
    generators: Vec<FnTable>,
    recognizers: Vec<FnTable>,
    generator_partition: Partition,
    recognizer_partition: Partition,
}

impl HolantInstance {
    pub fn new(
        alphabet: Arc<Alphabet>,
        edges: Arc<EdgeSet>,
        generators: Vec<FnTable>,
        recognizers: Vec<FnTable>,
    ) -> Result<Self> {
        let generator_partition = side_partition(&alphabet, &edges, &generators, "generators")?;
        let recognizer_partition = side_partition(&alphabet, &edges, &recognizers, "recognizers")?;
        Ok(Self { alphabet, edges, generators, recognizers, generator_partition, recognizer_partition })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn edges(&self) -> &Arc<EdgeSet> {
        &self.edges
    }

    pub fn generators(&self) -> &[FnTable] {
        &self.generators
    }

    pub fn recognizers(&self) -> &[FnTable] {
        &self.recognizers
    }

    pub fn side(&self, side: Side) -> &[FnTable] {
        match side {
            Side::Generator => &self.generators,
            Side::Recognizer => &self.recognizers,
        }
    }

    pub fn generator_partition(&self) -> &Partition {
        &self.generator_partition
    }

    pub fn recognizer_partition(&self) -> &Partition {
        &self.recognizer_partition
    }

    /// Size of the configuration space `|A|^|E|`, checked against the cap.
    pub fn space_size(&self) -> Result<usize> {
        space_size(self.alphabet.len(), self.edges.len())
    }

    /// The instance with every `g_i` replaced by `ĝ_i` and every `h_j` by
    /// `ȟ_j`, defined over the basis-element alphabet.
    pub fn transformed(&self, basis: &Basis) -> Result<HolantInstance> {
        if basis.alphabet() != &self.alphabet {
            return Err(HolantError::AlphabetMismatch);
        }
        let generators = self.generators.iter().map(|g| hat_transform(g, basis)).collect::<Result<_>>()?;
        let recognizers = self.recognizers.iter().map(|h| check_transform(h, basis)).collect::<Result<_>>()?;
        Ok(HolantInstance {
            alphabet: basis.element_alphabet().clone(),
            edges: self.edges.clone(),
            generators,
            recognizers,
            generator_partition: self.generator_partition.clone(),
            recognizer_partition: self.recognizer_partition.clone(),
        })
    }

    /// A copy with one function replaced. The replacement must keep the
    /// function's scope and alphabet.
    pub fn with_function(&self, side: Side, index: usize, table: FnTable) -> Result<HolantInstance> {
        let mut out = self.clone();
        let list = match side {
            Side::Generator => &mut out.generators,
            Side::Recognizer => &mut out.recognizers,
        };
        let size = list.len();
        let slot = list.get_mut(index).ok_or(HolantError::IndexOutOfRange { index, size })?;
        slot.same_domain(&table)?;
        *slot = table;
        Ok(out)
    }
}

fn side_partition(
    alphabet: &Arc<Alphabet>,
    edges: &Arc<EdgeSet>,
    tables: &[FnTable],
    side: &str,
) -> Result<Partition> {
    if tables.is_empty() {
        return Err(HolantError::PartitionMismatch(format!("{side}: at least one function is required")));
    }
    for (i, t) in tables.iter().enumerate() {
        if t.alphabet() != alphabet {
            return Err(HolantError::PartitionMismatch(format!("{side}[{i}]: alphabet differs from the instance")));
        }
        if **t.scope().parent() != **edges {
            return Err(HolantError::PartitionMismatch(format!("{side}[{i}]: scope is over a different edge set")));
        }
    }
    let scopes = tables.iter().map(|t| t.scope().clone()).collect();
    Partition::new(edges.clone(), scopes).map_err(|e| match e {
        HolantError::PartitionMismatch(m) => HolantError::PartitionMismatch(format!("{side}: {m}")),
        other => other,
    })
}

/// Precomputed restriction maps for every factor of an instance.
struct Evaluator<'a> {
    factors: Vec<(&'a [Scalar], Projection)>,
    radix: usize,
    len: usize,
}

impl<'a> Evaluator<'a> {
    fn new(inst: &'a HolantInstance) -> Self {
        let full = Scope::full(inst.edges.clone());
        let radix = inst.alphabet.len();
        let factors = inst
            .generators
            .iter()
            .chain(&inst.recognizers)
            .map(|f| (f.values(), Projection::new(f.scope(), &full, radix)))
            .collect();
        Self { factors, radix, len: inst.edges.len() }
    }

    /// Sequential sum of the summand over `range`, in index order.
    fn sum(&self, range: std::ops::Range<usize>) -> Scalar {
        let mut digits = vec![0; self.len];
        let mut acc = ZERO;
        for k in range {
            decode_index(k, self.radix, &mut digits);
            let term = self
                .factors
                .iter()
                .fold(ONE, |p, (values, proj)| p * values[proj.index(&digits)]);
            acc += term;
        }
        acc
    }
}

/// `sum_x prod_i g_i(x|E_i) prod_j h_j(x|E'_j)`, summed sequentially in
/// canonical order.
pub fn holant_value(inst: &HolantInstance) -> Result<Scalar> {
    let size = inst.space_size()?;
    Ok(Evaluator::new(inst).sum(0..size))
}

/// [`holant_value`] over `chunks` contiguous index ranges evaluated in
/// parallel; partial sums are combined in chunk order. Agrees with the
/// sequential sum up to rounding, not bit for bit.
pub fn holant_value_chunked(inst: &HolantInstance, chunks: usize) -> Result<Scalar> {
    let size = inst.space_size()?;
    let chunks = chunks.clamp(1, size);
    let step = size.div_ceil(chunks);
    let eval = Evaluator::new(inst);
    let partials: Vec<Scalar> = (0..chunks)
        .into_par_iter()
        .map(|c| eval.sum(c * step..((c + 1) * step).min(size)))
        .collect();
    Ok(partials.into_iter().fold(ZERO, |a, b| a + b))
}

/// `<⊛ g_i, ⊛ h_j>`, the same sum evaluated through the c-tensor.
pub fn pairing_form(inst: &HolantInstance) -> Result<Scalar> {
    inst.space_size()?;
    let g = c_tensor_multi(&inst.generators)?;
    let h = c_tensor_multi(&inst.recognizers)?;
    pairing(&g, &h)
}

/// `sum_y prod_i ĝ_i(y|E_i) prod_j ȟ_j(y|E'_j)` over `B^E`.
pub fn holant_value_transformed(inst: &HolantInstance, basis: &Basis) -> Result<Scalar> {
    holant_value(&inst.transformed(basis)?)
}

/// `|lhs - rhs| / max(|lhs|, |rhs|, ABS_FLOOR)`.
pub fn relative_error(lhs: Scalar, rhs: Scalar) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(ABS_FLOOR)
}

/// `max(1e-9, cond(T)^|E| * 1e-13)`.
pub fn default_tolerance(basis: &Basis, edges: usize) -> f64 {
    MIN_TOLERANCE.max(basis.condition().powi(edges as i32) * COND_ROUNDOFF)
}

/// Corrupts one entry of one transformed table before the right-hand side is
/// summed. Used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultInjection {
    pub side: Side,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Holant value over `A^E`.
    #[serde(with = "crate::io::scalar_pair")]
    pub lhs: Scalar,
    /// Transformed Holant value over `B^E`.
    #[serde(with = "crate::io::scalar_pair")]
    pub rhs: Scalar,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Relative gap between the direct sum and the c-tensor pairing, for the
    /// original and for the transformed tables.
    pub lhs_cross_check: f64,
    pub rhs_cross_check: f64,
    pub basis_condition: f64,
    pub alphabet_size: usize,
    pub edge_count: usize,
    pub instance_digest: String,
    pub basis_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultInjection>,
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    /// The two evaluation paths agree: to [`CROSS_CHECK_TOL`] on the original
    /// tables, and to the verification tolerance on the transformed ones,
    /// whose entries carry the same `cond(T)^|E|` amplification as `rhs`.
    pub fn cross_checks_pass(&self) -> bool {
        self.lhs_cross_check <= CROSS_CHECK_TOL && self.rhs_cross_check <= self.tolerance
    }
}

/// Checks `holant_value(inst) == holant_value_transformed(inst, basis)`.
///
/// `tolerance = None` uses [`default_tolerance`]. A failed comparison is a
/// report with `pass = false`, not an error.
pub fn verify_holant(inst: &HolantInstance, basis: &Basis, tolerance: Option<f64>) -> Result<VerificationReport> {
    verify_inner(inst, basis, tolerance, None)
}

/// [`verify_holant`] with one transformed table corrupted.
///
/// The entry with the largest influence on the right-hand side is shifted so
/// that the sum moves by `10 * tol * max(|lhs|, |rhs|)`. For any tolerance
/// below 0.8 this drives the relative error past the tolerance.
pub fn verify_with_fault(
    inst: &HolantInstance,
    basis: &Basis,
    tolerance: Option<f64>,
    fault: FaultInjection,
) -> Result<VerificationReport> {
    verify_inner(inst, basis, tolerance, Some(fault))
}

fn verify_inner(
    inst: &HolantInstance,
    basis: &Basis,
    tolerance: Option<f64>,
    fault: Option<FaultInjection>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let tolerance = tolerance.unwrap_or_else(|| default_tolerance(basis, inst.edges.len()));
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(HolantError::InvalidArgument(format!("tolerance must be finite and non-negative, got {tolerance}")));
    }

    let lhs = holant_value(inst)?;
    let lhs_cross_check = relative_error(lhs, pairing_form(inst)?);

    let mut transformed = inst.transformed(basis)?;
    let mut rhs = holant_value(&transformed)?;
    if let Some(fault) = fault {
        let scale = lhs.norm().max(rhs.norm()).max(ABS_FLOOR);
        transformed = inject_fault(&transformed, fault, 10.0 * tolerance * scale)?;
        rhs = holant_value(&transformed)?;
    }
    let rhs_cross_check = relative_error(rhs, pairing_form(&transformed)?);

    let rel_error = relative_error(lhs, rhs);
    Ok(VerificationReport {
        lhs,
        rhs,
        abs_error: (lhs - rhs).norm(),
        rel_error,
        tolerance,
        pass: rel_error <= tolerance,
        lhs_cross_check,
        rhs_cross_check,
        basis_condition: basis.condition(),
        alphabet_size: inst.alphabet.len(),
        edge_count: inst.edges.len(),
        instance_digest: crate::io::instance_digest(inst),
        basis_digest: crate::io::basis_digest(basis),
        fault,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Shifts one entry of the selected table so that the Holant sum moves by
/// `shift` (a positive real).
fn inject_fault(inst: &HolantInstance, fault: FaultInjection, shift: f64) -> Result<HolantInstance> {
    let table = inst
        .side(fault.side)
        .get(fault.index)
        .ok_or(HolantError::IndexOutOfRange { index: fault.index, size: inst.side(fault.side).len() })?;
    let weights = entry_weights(inst, fault.side, fault.index)?;
    let (entry, weight) = weights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, w)| (k, *w))
        .expect("table is nonempty");
    let delta = if weight.norm() > 0.0 { Scalar::new(shift, 0.0) / weight } else { Scalar::new(shift, 0.0) };
    let mut values = table.values().to_vec();
    values[entry] += delta;
    let corrupted = FnTable::new(table.alphabet().clone(), table.scope().clone(), values)?;
    inst.with_function(fault.side, fault.index, corrupted)
}

/// Derivative of the Holant sum with respect to each entry of one table: the
/// sum over all assignments restricting to that entry of the product of the
/// other factors.
fn entry_weights(inst: &HolantInstance, side: Side, index: usize) -> Result<Vec<Scalar>> {
    let size = inst.space_size()?;
    let eval = Evaluator::new(inst);
    let target = match side {
        Side::Generator => index,
        Side::Recognizer => inst.generators.len() + index,
    };
    let mut weights = vec![ZERO; eval.factors[target].0.len()];
    let mut digits = vec![0; eval.len];
    for k in 0..size {
        decode_index(k, eval.radix, &mut digits);
        let mut term = ONE;
        for (i, (values, proj)) in eval.factors.iter().enumerate() {
            if i != target {
                term *= values[proj.index(&digits)];
            }
        }
        weights[eval.factors[target].1.index(&digits)] += term;
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(v: &[f64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::new(x, 0.0)).collect()
    }

    /// One edge, g = (2, 3), h = (5, 7).
    fn fixture31() -> HolantInstance {
        let a = Arc::new(Alphabet::numeric(2).unwrap());
        let e = Arc::new(EdgeSet::new(["e"]).unwrap());
        let s = Scope::full(e.clone());
        let g = FnTable::new(a.clone(), s.clone(), reals(&[2.0, 3.0])).unwrap();
        let h = FnTable::new(a.clone(), s, reals(&[5.0, 7.0])).unwrap();
        HolantInstance::new(a, e, vec![g], vec![h]).unwrap()
    }

    #[test]
    fn worked_example_31() {
        let inst = fixture31();
        assert_eq!(holant_value(&inst).unwrap(), Scalar::new(31.0, 0.0));
        assert_eq!(pairing_form(&inst).unwrap(), Scalar::new(31.0, 0.0));

        let cum = Basis::cumulative(inst.alphabet().clone());
        let t = inst.transformed(&cum).unwrap();
        assert_eq!(t.generators()[0].values(), reals(&[-1.0, 3.0]).as_slice());
        assert_eq!(t.recognizers()[0].values(), reals(&[5.0, 12.0]).as_slice());
        assert_eq!(holant_value_transformed(&inst, &cum).unwrap(), Scalar::new(31.0, 0.0));

        let report = verify_holant(&inst, &cum, None).unwrap();
        assert!(report.pass);
        assert!(report.rel_error <= 1e-12);
        assert_eq!(report.tolerance, 1e-9);
        assert!(report.cross_checks_pass());
    }

    #[test]
    fn constant_one_counts_assignments() {
        let a = Arc::new(Alphabet::numeric(3).unwrap());
        let e = Arc::new(EdgeSet::numbered(4).unwrap());
        let one = |labels: &[&str]| {
            FnTable::constant(a.clone(), Scope::new(e.clone(), labels.iter().copied()).unwrap(), ONE).unwrap()
        };
        let inst = HolantInstance::new(
            a.clone(),
            e.clone(),
            vec![one(&["e1", "e2"]), one(&["e3", "e4"])],
            vec![one(&["e1"]), one(&["e2", "e3", "e4"])],
        )
        .unwrap();
        assert_eq!(holant_value(&inst).unwrap(), Scalar::new(81.0, 0.0));
        assert_eq!(holant_value_chunked(&inst, 7).unwrap(), Scalar::new(81.0, 0.0));
    }

    #[test]
    fn zero_recognizer_annihilates() {
        let inst = fixture31();
        let zero = FnTable::zeros(inst.alphabet().clone(), inst.recognizers()[0].scope().clone()).unwrap();
        let inst = inst.with_function(Side::Recognizer, 0, zero).unwrap();
        assert_eq!(holant_value(&inst).unwrap(), ZERO);
        let cum = Basis::cumulative(inst.alphabet().clone());
        assert_eq!(holant_value_transformed(&inst, &cum).unwrap(), ZERO);
        let r = verify_holant(&inst, &cum, None).unwrap();
        assert!(r.pass);
        assert_eq!(r.rel_error, 0.0);
    }

    #[test]
    fn standard_basis_is_a_fixed_point() {
        let inst = fixture31();
        let std = Basis::standard(inst.alphabet().clone());
        let r = verify_holant(&inst, &std, None).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert_eq!(r.rel_error, 0.0);
    }

    #[test]
    fn fault_injection_fails() {
        let inst = fixture31();
        let cum = Basis::cumulative(inst.alphabet().clone());
        for side in [Side::Generator, Side::Recognizer] {
            let r = verify_with_fault(&inst, &cum, None, FaultInjection { side, index: 0 }).unwrap();
            assert!(!r.pass, "{r:?}");
            assert!(r.rel_error > r.tolerance);
        }
        assert!(matches!(
            verify_with_fault(&inst, &cum, None, FaultInjection { side: Side::Generator, index: 3 }),
            Err(HolantError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_partitions() {
        let a = Arc::new(Alphabet::numeric(2).unwrap());
        let e = Arc::new(EdgeSet::numbered(2).unwrap());
        let f = |labels: &[&str]| {
            FnTable::zeros(a.clone(), Scope::new(e.clone(), labels.iter().copied()).unwrap()).unwrap()
        };
        let err = HolantInstance::new(a.clone(), e.clone(), vec![f(&["e1"])], vec![f(&["e1", "e2"])]);
        assert!(matches!(err, Err(HolantError::PartitionMismatch(m)) if m.starts_with("generators")));
        let err = HolantInstance::new(a.clone(), e.clone(), vec![f(&["e1", "e2"])], vec![]);
        assert!(matches!(err, Err(HolantError::PartitionMismatch(m)) if m.starts_with("recognizers")));
        let err = HolantInstance::new(
            a.clone(),
            e.clone(),
            vec![f(&["e1", "e2"])],
            vec![f(&["e1"]), f(&["e1"]), f(&["e2"])],
        );
        assert!(matches!(err, Err(HolantError::PartitionMismatch(_))));
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(ZERO, ZERO), 0.0);
        assert_eq!(relative_error(Scalar::new(2.0, 0.0), Scalar::new(1.0, 0.0)), 0.5);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let inst = fixture31();
        let std = Basis::standard(inst.alphabet().clone());
        assert!(verify_holant(&inst, &std, Some(f64::NAN)).is_err());
        assert!(verify_holant(&inst, &std, Some(-1.0)).is_err());
    }
}
