//! Lattice walks confined to the orthant: critical-point geometry of the
//! inventory, the reflection group of the covariance cone, the combinatorial
//! group of the walk, polyhedral nodal domains, and exact excursion counts.

pub mod counting;
pub mod coxeter;
pub mod critical;
pub mod dual;
pub mod model;
pub mod models;
pub mod nodal;
pub mod numeric;
pub mod poly;
pub mod report;
pub mod spectral;
pub mod walkgroup;

pub use critical::{critical_point, CriticalData, CriticalError};
pub use model::{parse_model, sections, SectionTriple, WalkModel};
