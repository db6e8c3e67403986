//! Dense complex-valued functions on configuration spaces `A^U`, their vector
//! space operations, the bilinear pairing and the commutative tensor product
//! (c-tensor).

use std::sync::Arc;

use crate::assignment::{decode_index, space_size, Alphabet, Assignment, Assignments, EdgeSet, Scope};
use crate::error::{HolantError, Result};

pub type Scalar = num_complex::Complex64;

pub const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Label of the single edge used for functions `A -> C`.
pub const POINT_EDGE: &str = "*";

/// A function `A^U -> C` stored densely in canonical assignment order.
#[derive(Debug, Clone, PartialEq)]
pub struct FnTable {
    alphabet: Arc<Alphabet>,
    scope: Scope,
    values: Vec<Scalar>,
}

impl FnTable {
    pub fn new(alphabet: Arc<Alphabet>, scope: Scope, values: Vec<Scalar>) -> Result<Self> {
        let expected = space_size(alphabet.len(), scope.len())?;
        if values.len() != expected {
            return Err(HolantError::LengthMismatch { expected, found: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HolantError::NonFinite(i));
        }
        Ok(Self { alphabet, scope, values })
    }

    pub fn zeros(alphabet: Arc<Alphabet>, scope: Scope) -> Result<Self> {
        Self::constant(alphabet, scope, crate::function::ZERO)
    }

    pub fn constant(alphabet: Arc<Alphabet>, scope: Scope, value: Scalar) -> Result<Self> {
        let n = space_size(alphabet.len(), scope.len())?;
        Self::new(alphabet, scope, vec![value; n])
    }

    /// Tabulates `f` over every assignment of the scope.
    pub fn from_fn(
        alphabet: Arc<Alphabet>,
        scope: Scope,
        mut f: impl FnMut(&Assignment) -> Scalar,
    ) -> Result<Self> {
        let values = Assignments::new(scope.clone(), alphabet.len())?.map(|x| f(&x)).collect();
        Self::new(alphabet, scope, values)
    }

    /// A function `A -> C`, stored on a single placeholder edge.
    pub fn on_symbols(alphabet: Arc<Alphabet>, values: Vec<Scalar>) -> Result<Self> {
        Self::new(alphabet, point_scope(), values)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at an assignment on exactly this table's scope.
    pub fn value(&self, x: &Assignment) -> Result<Scalar> {
        if x.scope() != &self.scope {
            return Err(HolantError::ScopeMismatch);
        }
        if x.radix() != self.alphabet.len() {
            return Err(HolantError::AlphabetMismatch);
        }
        Ok(self.values[x.index()])
    }

    /// Value of `f(restrict(x, scope))` for an assignment on a superset.
    pub fn value_restricted(&self, x: &Assignment) -> Result<Scalar> {
        self.value(&x.restrict(&self.scope)?)
    }

    /// Assignment/value pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Assignment, Scalar)> + '_ {
        Assignments::new(self.scope.clone(), self.alphabet.len())
            .expect("table size already validated")
            .zip(self.values.iter().copied())
    }

    /// The same values over another alphabet of equal size.
    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Result<Self> {
        if alphabet.len() != self.alphabet.len() {
            return Err(HolantError::AlphabetMismatch);
        }
        Ok(Self { alphabet, scope: self.scope.clone(), values: self.values.clone() })
    }

    pub(crate) fn from_parts_unchecked(alphabet: Arc<Alphabet>, scope: Scope, values: Vec<Scalar>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { alphabet, scope, values }
    }

    pub fn same_domain(&self, other: &FnTable) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(HolantError::AlphabetMismatch);
        }
        if self.scope != other.scope {
            return Err(HolantError::ScopeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FnTable) -> Result<FnTable> {
        add(self, other)
    }

    pub fn scale(&self, alpha: Scalar) -> FnTable {
        scale(alpha, self)
    }
}

pub(crate) fn point_scope() -> Scope {
    Scope::full(Arc::new(EdgeSet::new([POINT_EDGE]).expect("nonempty")))
}

pub fn add(f: &FnTable, g: &FnTable) -> Result<FnTable> {
    f.same_domain(g)?;
    let values = f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect();
    FnTable::new(f.alphabet.clone(), f.scope.clone(), values)
}

pub fn scale(alpha: Scalar, f: &FnTable) -> FnTable {
    let values: Vec<Scalar> = f.values.iter().map(|v| alpha * v).collect();
    // Overflow to infinity is the only way out of the finite range here.
    assert!(values.iter().all(|v| v.is_finite()), "scaled table overflowed");
    FnTable::from_parts_unchecked(f.alphabet.clone(), f.scope.clone(), values)
}

/// `sum_x f(x) g(x)`, without conjugation, accumulated in canonical order.
pub fn pairing(f: &FnTable, g: &FnTable) -> Result<Scalar> {
    f.same_domain(g)?;
    Ok(dot(&f.values, &g.values))
}

pub(crate) fn dot(u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b)
}

/// Indicator functions of the symbols, in alphabet order.
pub fn delta_basis(alphabet: &Arc<Alphabet>) -> Vec<FnTable> {
    let n = alphabet.len();
    (0..n)
        .map(|i| {
            let values = (0..n).map(|a| if a == i { ONE } else { ZERO }).collect();
            FnTable::on_symbols(alphabet.clone(), values).expect("valid size")
        })
        .collect()
}

/// The `i`-th function is the indicator of the first `i + 1` symbols.
pub fn cumulative_basis(alphabet: &Arc<Alphabet>) -> Vec<FnTable> {
    let n = alphabet.len();
    (0..n)
        .map(|i| {
            let values = (0..n).map(|a| if a <= i { ONE } else { ZERO }).collect();
            FnTable::on_symbols(alphabet.clone(), values).expect("valid size")
        })
        .collect()
}

/// Maps assignment digits on a superset scope to the canonical index of the
/// restriction onto a subset scope.
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    strides: Vec<usize>,
}

impl Projection {
    /// `sub` must be a subset of `sup`.
    pub(crate) fn new(sub: &Scope, sup: &Scope, radix: usize) -> Self {
        let n = sub.len();
        let strides = sup
            .members()
            .iter()
            .map(|&m| match sub.slot_of(m) {
                Some(slot) => radix.pow((n - 1 - slot) as u32),
                None => 0,
            })
            .collect();
        Self { strides }
    }

    #[inline]
    pub(crate) fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }
}

/// `(f ⊛ g)(x) = f(x|E1) * g(x|E2)` on the union of two disjoint scopes.
/// The result is laid out in parent edge order, whatever the operand order.
pub fn c_tensor(f: &FnTable, g: &FnTable) -> Result<FnTable> {
    if f.alphabet != g.alphabet {
        return Err(HolantError::AlphabetMismatch);
    }
    let scope = f.scope.disjoint_union(&g.scope)?;
    let radix = f.alphabet.len();
    let size = space_size(radix, scope.len())?;
    let pf = Projection::new(&f.scope, &scope, radix);
    let pg = Projection::new(&g.scope, &scope, radix);
    let mut digits = vec![0; scope.len()];
    let values = (0..size)
        .map(|k| {
            decode_index(k, radix, &mut digits);
            f.values[pf.index(&digits)] * g.values[pg.index(&digits)]
        })
        .collect();
    Ok(FnTable::from_parts_unchecked(f.alphabet.clone(), scope, values))
}

/// The c-tensor of several tables on pairwise disjoint scopes.
///
/// Operands are folded in order of their first edge, so the result does not
/// depend on the order in which they are passed.
pub fn c_tensor_multi(fs: &[FnTable]) -> Result<FnTable> {
    let mut sorted: Vec<&FnTable> = fs.iter().collect();
    sorted.sort_by_key(|f| f.scope.members()[0]);
    let (first, rest) = sorted
        .split_first()
        .ok_or_else(|| HolantError::InvalidArgument("c-tensor of no tables".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, f| c_tensor(&acc, f))
}

/// Coordinates of a table in canonical order.
pub fn vectorize(f: &FnTable) -> Vec<Scalar> {
    f.values.clone()
}

/// Kronecker product of two coordinate vectors; `u` indexes the outer block.
pub fn kron(u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}
