//! Exact Galois-module cohomology for varieties `N_{K/k}(Ξ) = P(t)`.
//!
//! Everything is expressed through the Galois group `G = Gal(E/k)` of a finite
//! extension and subgroups of it: fields never appear symbolically. The crate
//! computes `H^i(G, M)` for `i ≤ 3` over the bar resolution, the subgroups
//! `Ш^i_ω` of classes that vanish on every cyclic subgroup, the two ends of the
//! Brauer-group exact sequence, and quadratic Hilbert symbols over `Q`.

pub mod abelian;
pub mod brauer;
pub mod cohomology;
pub mod error;
pub mod gmodule;
pub mod group;
pub mod hilbert;
pub mod sha;
pub mod snf;
mod sparse;

pub use abelian::AbelianStructure;
pub use cohomology::{cohomology, Budget, CohomologyGroup};
pub use error::{Error, Result};
pub use gmodule::{GModule, ModuleMap, PData};
pub use group::{build_group, FiniteGroup, GroupSpec, Subgroup};

/// Version string mixed into cache keys and reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
