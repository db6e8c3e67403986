//! Finite alphabets, edge sets, assignments and the restriction / union
//! calculus.
//!
//! Every configuration space `A^U` is enumerated in one canonical order:
//! lexicographic, with the first member of `U` (in parent edge-set order)
//! most significant and symbol indices ascending. Function tables, files and
//! report digests all rely on this order.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{HolantError, Result};

/// Default hard limit on the size of any enumerated configuration space.
pub const DEFAULT_MAX_SPACE: usize = 1 << 24;

/// Environment variable overriding [`DEFAULT_MAX_SPACE`].
pub const MAX_SPACE_ENV: &str = "HOLANT_MAX_SPACE";

/// The enumeration cap in effect for this process.
///
/// Read once from `HOLANT_MAX_SPACE`; unparsable or zero values fall back to
/// the default.
pub fn max_space() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_SPACE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_SPACE)
    })
}

/// `radix^len`, checked against the enumeration cap.
pub fn space_size(radix: usize, len: usize) -> Result<usize> {
    let cap = max_space();
    let too_large = HolantError::SpaceTooLarge { radix, len, cap };
    let mut size: usize = 1;
    for _ in 0..len {
        size = size.checked_mul(radix).ok_or(too_large.clone())?;
        if size > cap {
            return Err(too_large);
        }
    }
    Ok(size)
}

fn check_distinct<'a>(
    items: impl IntoIterator<Item = &'a String>,
    dup: impl Fn(String) -> HolantError,
) -> Result<()> {
    let mut seen = HashSet::new();
    for item in items {
        if !seen.insert(item.as_str()) {
            return Err(dup(item.clone()));
        }
    }
    Ok(())
}

/// An ordered set of distinct symbols. The position of a symbol is its index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(HolantError::EmptyAlphabet);
        }
        check_distinct(&symbols, HolantError::DuplicateSymbol)?;
        Ok(Self { symbols })
    }

    /// The alphabet `{"0", "1", ..., "k-1"}`.
    pub fn numeric(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> Option<&str> {
        self.symbols.get(index).map(String::as_str)
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

/// An ordered, nonempty set of distinct edge labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    labels: Vec<String>,
}

impl EdgeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(HolantError::EmptyEdgeSet);
        }
        check_distinct(&labels, HolantError::DuplicateEdge)?;
        Ok(Self { labels })
    }

    /// Edges `e1, e2, ..., en`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("e{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> Option<&str> {
        self.labels.get(position).map(String::as_str)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A nonempty subset of a parent edge set. Members are kept in parent order,
/// which fixes the layout of every table defined on the scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scope {
    parent: Arc<EdgeSet>,
    members: Vec<usize>,
}

impl Scope {
    /// The scope covering the whole parent edge set.
    pub fn full(parent: Arc<EdgeSet>) -> Self {
        let members = (0..parent.len()).collect();
        Self { parent, members }
    }

    pub fn new<I, S>(parent: Arc<EdgeSet>, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut members = Vec::new();
        for label in labels {
            let label = label.as_ref();
            let pos = parent
                .position(label)
                .ok_or_else(|| HolantError::UnknownEdge(label.to_string()))?;
            if members.contains(&pos) {
                return Err(HolantError::DuplicateEdge(label.to_string()));
            }
            members.push(pos);
        }
        Self::from_positions(parent, members)
    }

    /// Builds a scope from parent positions; order of `positions` is ignored.
    pub fn from_positions(parent: Arc<EdgeSet>, mut positions: Vec<usize>) -> Result<Self> {
        if positions.is_empty() {
            return Err(HolantError::EmptyScope);
        }
        positions.sort_unstable();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            let label = parent.label(w[0]).unwrap_or("?").to_string();
            return Err(HolantError::DuplicateEdge(label));
        }
        if let Some(&bad) = positions.iter().find(|&&p| p >= parent.len()) {
            return Err(HolantError::UnknownEdge(format!("#{bad}")));
        }
        Ok(Self { parent, members: positions })
    }

    /// A one-edge scope.
    pub fn single(parent: Arc<EdgeSet>, label: &str) -> Result<Self> {
        Self::new(parent, [label])
    }

    pub fn parent(&self) -> &Arc<EdgeSet> {
        &self.parent
    }

    /// Parent positions of the members, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.members
            .iter()
            .map(move |&p| self.parent.label(p).expect("member in range"))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.parent.len()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.members.binary_search(&position).is_ok()
    }

    /// Position of a parent edge within this scope's member list.
    pub fn slot_of(&self, position: usize) -> Option<usize> {
        self.members.binary_search(&position).ok()
    }

    pub fn same_parent(&self, other: &Scope) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent
    }

    pub fn is_subset_of(&self, other: &Scope) -> bool {
        self.same_parent(other) && self.members.iter().all(|&m| other.contains(m))
    }

    /// First shared member, if any.
    pub fn overlap(&self, other: &Scope) -> Option<usize> {
        self.members.iter().copied().find(|&m| other.contains(m))
    }

    /// Union of two disjoint scopes over the same parent.
    pub fn disjoint_union(&self, other: &Scope) -> Result<Scope> {
        if !self.same_parent(other) {
            return Err(HolantError::ForeignScope);
        }
        if let Some(p) = self.overlap(other) {
            return Err(HolantError::OverlappingDomains(self.label_at(p)));
        }
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        members.sort_unstable();
        Ok(Self { parent: self.parent.clone(), members })
    }

    fn label_at(&self, position: usize) -> String {
        self.parent.label(position).unwrap_or("?").to_string()
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.labels().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// An ordered list of pairwise disjoint nonempty scopes covering the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parent: Arc<EdgeSet>,
    parts: Vec<Scope>,
}

impl Partition {
    pub fn new(parent: Arc<EdgeSet>, parts: Vec<Scope>) -> Result<Self> {
        if parts.is_empty() {
            return Err(HolantError::PartitionMismatch("no parts".into()));
        }
        let mut owner = vec![None; parent.len()];
        for (i, part) in parts.iter().enumerate() {
            if !(Arc::ptr_eq(part.parent(), &parent) || **part.parent() == *parent) {
                return Err(HolantError::PartitionMismatch(format!(
                    "part {i} is defined over a different edge set"
                )));
            }
            for &m in part.members() {
                if let Some(j) = owner[m] {
                    return Err(HolantError::PartitionMismatch(format!(
                        "edge `{}` appears in parts {j} and {i}",
                        parent.labels()[m]
                    )));
                }
                owner[m] = Some(i);
            }
        }
        if let Some(m) = owner.iter().position(Option::is_none) {
            return Err(HolantError::PartitionMismatch(format!(
                "edge `{}` is not covered",
                parent.labels()[m]
            )));
        }
        Ok(Self { parent, parts })
    }

    /// The single-part partition `{E}`.
    pub fn whole(parent: Arc<EdgeSet>) -> Self {
        let parts = vec![Scope::full(parent.clone())];
        Self { parent, parts }
    }

    /// The partition into singletons, in edge order.
    pub fn singletons(parent: Arc<EdgeSet>) -> Self {
        let parts = (0..parent.len())
            .map(|p| Scope { parent: parent.clone(), members: vec![p] })
            .collect();
        Self { parent, parts }
    }

    pub fn parent(&self) -> &Arc<EdgeSet> {
        &self.parent
    }

    pub fn parts(&self) -> &[Scope] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// A total map from a scope into `{0, .., radix-1}`.
///
/// With `radix = |A|` this is an alphabet assignment; with `radix = |B|` it
/// selects one basis element per edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    scope: Scope,
    radix: usize,
    values: Vec<usize>,
}

impl Assignment {
    /// `values[k]` is the value on the `k`-th scope member (parent order).
    pub fn new(scope: Scope, radix: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != scope.len() {
            return Err(HolantError::LengthMismatch { expected: scope.len(), found: values.len() });
        }
        for (slot, &v) in values.iter().enumerate() {
            if v >= radix {
                return Err(HolantError::ValueOutOfRange {
                    edge: scope.label_at(scope.members[slot]),
                    value: v,
                    size: radix,
                });
            }
        }
        Ok(Self { scope, radix, values })
    }

    /// Builds an assignment from `(label, value)` pairs; the labels form the
    /// scope.
    pub fn from_pairs<S: AsRef<str>>(
        parent: Arc<EdgeSet>,
        radix: usize,
        pairs: &[(S, usize)],
    ) -> Result<Self> {
        let scope = Scope::new(parent, pairs.iter().map(|(l, _)| l.as_ref()))?;
        let mut values = vec![0; scope.len()];
        for (label, v) in pairs {
            let pos = scope.parent.position(label.as_ref()).expect("validated by scope");
            values[scope.slot_of(pos).expect("member")] = *v;
        }
        Self::new(scope, radix, values)
    }

    /// The assignment at canonical index `index` of `radix^|scope|`.
    pub fn from_index(scope: Scope, radix: usize, index: usize) -> Result<Self> {
        let size = space_size(radix, scope.len())?;
        if index >= size {
            return Err(HolantError::IndexOutOfRange { index, size });
        }
        let mut values = vec![0; scope.len()];
        decode_index(index, radix, &mut values);
        Ok(Self { scope, radix, values })
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    /// Values in scope-member order.
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        let pos = self.scope.parent.position(label)?;
        self.value_at(pos)
    }

    /// Value at a parent position, if that edge is in the domain.
    pub fn value_at(&self, position: usize) -> Option<usize> {
        self.scope.slot_of(position).map(|s| self.values[s])
    }

    /// Canonical index within `radix^|scope|`.
    pub fn index(&self) -> usize {
        encode_index(&self.values, self.radix)
    }

    /// The restriction to `scope`, which must be a subset of the domain.
    pub fn restrict(&self, scope: &Scope) -> Result<Assignment> {
        if !scope.same_parent(&self.scope) {
            return Err(HolantError::ForeignScope);
        }
        let values = scope
            .members
            .iter()
            .map(|&m| {
                self.value_at(m)
                    .ok_or_else(|| HolantError::ScopeNotSubset(self.scope.label_at(m)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { scope: scope.clone(), radix: self.radix, values })
    }

    /// The union of two assignments on disjoint domains.
    pub fn union(&self, other: &Assignment) -> Result<Assignment> {
        if self.radix != other.radix {
            return Err(HolantError::AlphabetMismatch);
        }
        let scope = self.scope.disjoint_union(&other.scope)?;
        let values = scope
            .members
            .iter()
            .map(|&m| self.value_at(m).or_else(|| other.value_at(m)).expect("covered"))
            .collect();
        Ok(Self { scope, radix: self.radix, values })
    }

    /// Restrictions onto every part, in part order.
    pub fn decompose(&self, partition: &Partition) -> Result<Vec<Assignment>> {
        let domain_matches = self.scope.is_full()
            && (Arc::ptr_eq(&partition.parent, &self.scope.parent)
                || *partition.parent == *self.scope.parent);
        if !domain_matches {
            return Err(HolantError::PartitionMismatch(
                "partition does not cover the assignment's domain".into(),
            ));
        }
        partition.parts.iter().map(|p| self.restrict(p)).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, v)) in self.scope.labels().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}->{v}")?;
        }
        write!(f, "}}")
    }
}

/// Writes the mixed-radix digits of `index` into `digits`, most significant
/// first.
pub fn decode_index(mut index: usize, radix: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = index % radix;
        index /= radix;
    }
}

/// Inverse of [`decode_index`].
pub fn encode_index(digits: &[usize], radix: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d)
}

pub fn restrict(x: &Assignment, scope: &Scope) -> Result<Assignment> {
    x.restrict(scope)
}

pub fn union_assign(x1: &Assignment, x2: &Assignment) -> Result<Assignment> {
    x1.union(x2)
}

pub fn decompose(x: &Assignment, partition: &Partition) -> Result<Vec<Assignment>> {
    x.decompose(partition)
}

/// Union of a nonempty list of assignments on pairwise disjoint domains.
pub fn union_all(parts: &[Assignment]) -> Result<Assignment> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| HolantError::InvalidArgument("empty list of assignments".into()))?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.union(x))
}

pub fn index_of(x: &Assignment) -> usize {
    x.index()
}

pub fn assignment_of(index: usize, alphabet: &Alphabet, scope: &Scope) -> Result<Assignment> {
    Assignment::from_index(scope.clone(), alphabet.len(), index)
}

/// All assignments of `alphabet` on `scope`, in canonical order.
pub fn enumerate_assignments(alphabet: &Alphabet, scope: &Scope) -> Result<Assignments> {
    Assignments::new(scope.clone(), alphabet.len())
}

/// Iterator over `radix^|scope|` assignments in canonical order.
#[derive(Debug, Clone)]
pub struct Assignments {
    scope: Scope,
    radix: usize,
    next: usize,
    total: usize,
}

impl Assignments {
    pub fn new(scope: Scope, radix: usize) -> Result<Self> {
        let total = space_size(radix, scope.len())?;
        Ok(Self { scope, radix, next: 0, total })
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.next >= self.total {
            return None;
        }
        let mut values = vec![0; self.scope.len()];
        decode_index(self.next, self.radix, &mut values);
        self.next += 1;
        Some(Assignment { scope: self.scope.clone(), radix: self.radix, values })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.total - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Assignments {}
