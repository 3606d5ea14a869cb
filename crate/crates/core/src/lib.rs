//! Local Clifford invariants of stabilizer states.
//!
//! Stabilizer states are handled as self-dual subspaces of F2^{2n}
//! ([`stabilizer`]) on top of a packed-bit GF(2) kernel ([`gf2`]). Two
//! complete families of local Clifford invariants live in [`invariants`]:
//! exact-support tuple counts and contained-support space dimensions, the
//! latter computed as coranks. [`lcequiv`] decides equivalence three ways
//! and [`dense`] cross-checks the arity-2 invariants against partial traces
//! of the state projector.
//!
//! ```
//! use lc_invariants::{invariants, lcequiv, Stabilizer};
//!
//! let ghz = Stabilizer::from_strings(&["XXX", "ZZI", "IZZ"]).unwrap();
//! let triangle = Stabilizer::graph_state_from_edges(3, &[(1, 2), (2, 3), (1, 3)]).unwrap();
//! let q = lcequiv::constructive_check(&ghz, &triangle).unwrap().unwrap();
//! assert!(lcequiv::maps_onto(&q, &ghz, &triangle).unwrap());
//!
//! let omega = invariants::OmegaTuple::parse("r=1; w1={1,2}", 3).unwrap();
//! assert_eq!(invariants::v_dim_invariant(&ghz, &omega).unwrap(), 1);
//! ```

pub mod dense;
pub mod error;
pub mod gf2;
pub mod invariants;
pub mod lcequiv;
pub mod stabilizer;

pub use error::{Error, Result};
pub use gf2::{GF2Matrix, GF2Vector};
pub use invariants::{Budget, Fingerprint, OmegaTuple};
pub use lcequiv::LocalCliffordOp;
pub use stabilizer::{PauliVector, QubitSet, Stabilizer};
