//! Numerical verification toolkit for spherically symmetric Finsler metrics
//! `F(x, y) = |y| φ(|x|, ⟨x,y⟩/|y|)`.
//!
//! The pieces, bottom-up:
//!
//! * [`jets`]: order-4 bivariate Taylor arithmetic, the derivative engine.
//! * [`metric`]: profiles, domains, grids, positivity margins.
//! * [`spray`]: spray scalars `Q`, `P` and geodesic integration.
//! * [`curvature`]: `R1`–`R4`, flag curvature, classification reports.
//! * [`families`]: metrics built from generator data (transport-equation
//!   constructions, the compatibility-condition construction, characteristics).
//! * [`catalog`]: closed-form example metrics with expected verdicts.
//! * [`cli`]: the command-line front end.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod families;
pub mod jets;
pub mod metric;
pub mod quadrature;
pub mod report;
pub mod spray;

pub use curvature::{classify, ClassificationReport, Status, Tolerances};
pub use jets::{Jet2, JetError, Var};
pub use metric::{DomainSpec, GridSpec, MetricProfile, RsPoint};
