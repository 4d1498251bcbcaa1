//! Entropy-stable non-oscillatory finite-difference schemes for hyperbolic
//! conservation laws.
//!
//! The flux at each interface is a sign-stability-gated convex combination
//! of an entropy-conservative flux (orders 2/4/6) and a non-oscillatory
//! flux (Rusanov, ENO or WENO): where the jump and the flux difference
//! share signs, the non-oscillatory flux is used; elsewhere the scheme
//! falls back to the entropy-conservative flux. The result keeps the
//! discrete cell entropy inequality while inheriting the shock resolution
//! of the underlying non-oscillatory scheme.
//!
//! Layout:
//! - [`models`]: conservation-law systems with entropy pairs,
//! - [`reconstruction`]: ENO/WENO interface reconstruction and flux splitting,
//! - [`ecflux`]: entropy-conservative fluxes and numerical entropy fluxes,
//! - [`esflux`]: the sign-gated entropy-stable flux and its diagnostics,
//! - [`integrator`]: grids, boundary conditions, SSP-RK3 time stepping,
//! - [`problems`]: the test-problem registry with exact solutions,
//! - [`harness`]: error norms, convergence studies, oscillation metrics,
//! - [`scheme`]: scheme-name grammar ("EC4-ENO-3", ...),
//! - [`cli`]: run driver and CSV outputs behind the `esno` binary.

pub mod ecflux;
pub mod error;
pub mod esflux;
pub mod integrator;
pub mod models;
pub mod reconstruction;
pub mod scheme;
mod util;

pub use error::{Error, Result};
