//! Seeded generation of random instances and bases.
//!
//! Both generators draw from ChaCha8 seeded with the given `u64`; instances
//! use stream 0 and bases stream 1, so one seed can drive both.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{space_size, Alphabet, EdgeSet, Scope};
use crate::basis::Basis;
use crate::engine::HolantInstance;
use crate::error::{HolantError, Result};
use crate::function::{FnTable, Scalar};

/// Draws before [`random_basis`] gives up.
pub const MAX_BASIS_DRAWS: usize = 1000;

/// Shape and scale of a random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub alphabet_size: usize,
    pub edge_count: usize,
    pub generator_parts: usize,
    pub recognizer_parts: usize,
    /// Radius of the disc table entries are drawn from.
    pub magnitude: f64,
}

fn instance_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn basis_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// A point uniform in the disc of the given radius.
pub fn disc_sample<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Scalar {
    let r = radius * rng.random::<f64>().sqrt();
    Scalar::from_polar(r, TAU * rng.random::<f64>())
}

/// Splits `edges` into `parts` nonempty scopes: edges are shuffled and dealt
/// round-robin, so part sizes differ by at most one.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, edges: &Arc<EdgeSet>, parts: usize) -> Result<Vec<Scope>> {
    if parts == 0 || parts > edges.len() {
        return Err(HolantError::InfeasiblePartition { parts, edges: edges.len() });
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(rng);
    let mut members = vec![Vec::new(); parts];
    for (k, pos) in order.into_iter().enumerate() {
        members[k % parts].push(pos);
    }
    members.into_iter().map(|m| Scope::from_positions(edges.clone(), m)).collect()
}

/// A table with entries uniform in the disc of radius `magnitude`.
pub fn random_table<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &Arc<Alphabet>,
    scope: Scope,
    magnitude: f64,
) -> Result<FnTable> {
    let n = space_size(alphabet.len(), scope.len())?;
    let values = (0..n).map(|_| disc_sample(rng, magnitude)).collect();
    FnTable::new(alphabet.clone(), scope, values)
}

/// A deterministic random instance with alphabet `0..k-1` and edges `e1..en`.
pub fn random_instance(seed: u64, spec: InstanceSpec) -> Result<HolantInstance> {
    if !(spec.magnitude.is_finite() && spec.magnitude > 0.0) {
        return Err(HolantError::InvalidArgument(format!("magnitude must be positive, got {}", spec.magnitude)));
    }
    let alphabet = Arc::new(Alphabet::numeric(spec.alphabet_size)?);
    let edges = Arc::new(EdgeSet::numbered(spec.edge_count)?);
    space_size(alphabet.len(), edges.len())?;
    let mut rng = instance_rng(seed);
    let gen_scopes = random_partition(&mut rng, &edges, spec.generator_parts)?;
    let rec_scopes = random_partition(&mut rng, &edges, spec.recognizer_parts)?;
    let generators = gen_scopes
        .into_iter()
        .map(|s| random_table(&mut rng, &alphabet, s, spec.magnitude))
        .collect::<Result<_>>()?;
    let recognizers = rec_scopes
        .into_iter()
        .map(|s| random_table(&mut rng, &alphabet, s, spec.magnitude))
        .collect::<Result<_>>()?;
    HolantInstance::new(alphabet, edges, generators, recognizers)
}

/// A deterministic random basis of `C^k` with 1-norm condition number at most
/// `cond_bound`. Entries are drawn from the unit disc and the matrix is
/// redrawn until the bound holds.
pub fn random_basis(seed: u64, alphabet_size: usize, cond_bound: f64) -> Result<Basis> {
    random_basis_for(seed, Arc::new(Alphabet::numeric(alphabet_size)?), cond_bound)
}

/// [`random_basis`] over an existing alphabet.
pub fn random_basis_for(seed: u64, alphabet: Arc<Alphabet>, cond_bound: f64) -> Result<Basis> {
    if cond_bound.is_nan() || cond_bound < 1.0 {
        return Err(HolantError::InvalidArgument(format!("condition bound must be >= 1, got {cond_bound}")));
    }
    let n = alphabet.len();
    let mut rng = basis_rng(seed);
    for _ in 0..MAX_BASIS_DRAWS {
        let matrix = (0..n * n).map(|_| disc_sample(&mut rng, 1.0)).collect();
        match Basis::from_matrix(alphabet.clone(), matrix) {
            Ok(b) if b.condition() <= cond_bound => return Ok(b),
            _ => continue,
        }
    }
    Err(HolantError::BasisSearchExhausted { bound: cond_bound, retries: MAX_BASIS_DRAWS })
}
