//! Matrix gauges on concrete operator spaces.

mod barrier;
pub mod catalog;
pub mod config;
pub mod error;
pub mod extension;
pub mod gauges;
pub mod io;
pub mod laws;
pub mod linalg;
pub mod maxgauge;
pub mod polytope;
pub mod report;
pub mod space;
pub mod subspace;
pub mod unitization;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use extension::{extension_lower_bound, is_real_cc, is_real_cp, Functional};
pub use gauges::{gauge_h, gauge_norm, gauge_nu, gauge_nu_e, ConcreteGauge, GaugeKind};
pub use linalg::{ComplexMatrix, C64};
pub use maxgauge::{nu_max, nu_max_diag_oracle, GaugeResult};
pub use report::CheckReport;
pub use space::{
    amplify, build_space, is_accretive, membership, sample_element, star_closure, LevelElement,
    OperatorSpace, Representation, SampleMode,
};
pub use unitization::{gauge_u, UnitizedElement};
