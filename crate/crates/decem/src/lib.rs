//! Discrete exterior calculus on finite combinatorial models of the plane
//! and of 3-space, and the semi-discrete Maxwell system built on top of it.
//!
//! The spatial discretization lives on a tensor-product lattice of points,
//! intervals, faces and volumes. Fields are cochains ("discrete forms") with
//! one real component array per cell signature, and the whole calculus —
//! boundary `∂`, coboundary `d`, cup product `∪`, Hodge star `∗` and its
//! inverse, codifferential `δ`, Laplacian `Δ` — is given by explicit signed
//! shift rules on those arrays. Time stays continuous: Maxwell's equations
//! become a linear system of ordinary differential equations in the cochain
//! coefficients.
//!
//! Module map:
//!
//! - [`lattice`]: lattice topology, cells, chains and the boundary operator;
//! - [`forms`]: the [`forms::DiscreteForm`] container and (de)serialization;
//! - [`calculus`]: the operator calculus on forms;
//! - [`maxwell`]: field state, constitutive relations, the semi-discrete
//!   Maxwell right-hand side and its residual diagnostics;
//! - [`torus`]: the fully worked 2×2 periodic plane ("combinatorial torus"),
//!   where the system reduces to 12 linear ODEs with an explicit solution;
//! - [`integrate`]: a fixed-step RK4 driver and trajectory recording;
//! - [`verify`]: the randomized operator-identity suite used by the CLI.

pub mod calculus;
pub mod forms;
pub mod integrate;
pub mod lattice;
pub mod maxwell;
pub mod torus;
pub mod verify;

pub use calculus::InnerProductDomain;
pub use forms::DiscreteForm;
pub use lattice::{CellIndex, CellSignature, Chain, LatticeTopology};
pub use maxwell::{FieldState, PhysicalConstants, Potentials, Sources};
