//! Assignment calculus, function tables with the commutative tensor product,
//! holographic basis transforms, and brute-force verification that a Holant
//! sum is unchanged when generators and recognizers are carried into another
//! basis.
//!
//! ```
//! use std::sync::Arc;
//! use holant_core::{Alphabet, Basis, EdgeSet, FnTable, HolantInstance, Scalar, Scope};
//!
//! let a = Arc::new(Alphabet::numeric(2).unwrap());
//! let e = Arc::new(EdgeSet::new(["e"]).unwrap());
//! let table = |v: [f64; 2]| {
//!     FnTable::new(a.clone(), Scope::full(e.clone()), v.map(|x| Scalar::new(x, 0.0)).to_vec()).unwrap()
//! };
//! let inst = HolantInstance::new(a.clone(), e.clone(), vec![table([2.0, 3.0])], vec![table([5.0, 7.0])]).unwrap();
//! let report = holant_core::verify_holant(&inst, &Basis::cumulative(a), None).unwrap();
//! assert!(report.pass);
//! assert_eq!(report.lhs, Scalar::new(31.0, 0.0));
//! ```

pub mod assignment;
pub mod basis;
pub mod engine;
pub mod error;
pub mod function;
pub mod io;
pub mod random;

pub use assignment::{
    assignment_of, decompose, enumerate_assignments, index_of, max_space, restrict, union_all, union_assign,
    Alphabet, Assignment, Assignments, EdgeSet, Partition, Scope,
};
pub use basis::{
    check_transform, e_slice_a, e_slice_b, e_value, factored_pairing_check, hat_transform, reconstruct, tau_lift,
    tau_unlift, BAssignment, Basis,
};
pub use engine::{
    default_tolerance, holant_value, holant_value_chunked, holant_value_transformed, pairing_form, relative_error,
    verify_holant, verify_with_fault, FaultInjection, HolantInstance, Side, VerificationReport,
};
pub use error::{HolantError, Result};
pub use function::{
    add, c_tensor, c_tensor_multi, cumulative_basis, delta_basis, kron, pairing, scale, vectorize, FnTable, Scalar,
};
pub use random::{random_basis, random_instance, InstanceSpec};
