//! Conservation-law systems and their entropy structure.
//!
//! Each [`SystemModel`] bundles the physical flux f(u), an entropy pair
//! (eta, q), the entropy variables v = d(eta)/du, the entropy potential
//! psi = v.f - q and a wavespeed bound. Scalar models use the square
//! entropy eta = u^2/2 (so v = u); the Euler systems use
//! eta = -rho s / (gamma - 1) with s = ln p - gamma ln rho, the choice
//! for which psi reduces to the momentum component.

use crate::error::{Error, Result};

/// Maximum number of conserved components over all models (2D Euler).
pub const MAX_COMPONENTS: usize = 4;

/// Fixed-size state buffer; only the first `m` entries are meaningful.
pub type StateArray = [f64; MAX_COMPONENTS];

/// Density/pressure below this are treated as non-physical (an error, not
/// a clamp — clamping would mask scheme failures the tests must detect).
pub const POSITIVITY_FLOOR: f64 = 1e-13;

/// Coordinate direction of a flux or sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// A hyperbolic system u_t + div f(u) = 0 with a convex entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemModel {
    /// u_t + a u_x = 0.
    Advection { speed: f64 },
    /// u_t + (u^2/2)_x = 0.
    Burgers,
    /// 1D compressible Euler equations, ideal gas.
    Euler1d { gamma: f64 },
    /// 2D compressible Euler equations, ideal gas.
    Euler2d { gamma: f64 },
}

/// Entropy eta, entropy flux q, entropy variables v and potential psi
/// evaluated at one state. `q` and `psi` carry one entry per space
/// dimension of the model.
#[derive(Debug, Clone, Copy)]
pub struct EntropyPair {
    pub eta: f64,
    pub q: [f64; 2],
    pub v: StateArray,
    pub psi: [f64; 2],
}

impl SystemModel {
    pub fn advection(speed: f64) -> Self {
        SystemModel::Advection { speed }
    }

    pub fn burgers() -> Self {
        SystemModel::Burgers
    }

    pub fn euler1d(gamma: f64) -> Result<Self> {
        if gamma <= 1.0 {
            return Err(Error::Parameter {
                name: "gamma",
                reason: format!("must exceed 1, got {gamma}"),
            });
        }
        Ok(SystemModel::Euler1d { gamma })
    }

    pub fn euler2d(gamma: f64) -> Result<Self> {
        if gamma <= 1.0 {
            return Err(Error::Parameter {
                name: "gamma",
                reason: format!("must exceed 1, got {gamma}"),
            });
        }
        Ok(SystemModel::Euler2d { gamma })
    }

    /// Number of conserved components m.
    pub fn components(&self) -> usize {
        match self {
            SystemModel::Advection { .. } | SystemModel::Burgers => 1,
            SystemModel::Euler1d { .. } => 3,
            SystemModel::Euler2d { .. } => 4,
        }
    }

    /// Number of space dimensions the model is posed in.
    pub fn dims(&self) -> usize {
        match self {
            SystemModel::Euler2d { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.components() == 1
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemModel::Advection { .. } => "advection",
            SystemModel::Burgers => "burgers",
            SystemModel::Euler1d { .. } => "euler1d",
            SystemModel::Euler2d { .. } => "euler2d",
        }
    }

    /// Index of the momentum component normal to `axis`, if the model has one.
    /// Used by reflective boundaries.
    pub fn normal_momentum_component(&self, axis: Axis) -> Option<usize> {
        match (self, axis) {
            (SystemModel::Euler1d { .. }, Axis::X) => Some(1),
            (SystemModel::Euler2d { .. }, Axis::X) => Some(1),
            (SystemModel::Euler2d { .. }, Axis::Y) => Some(2),
            _ => None,
        }
    }

    fn check_axis(&self, axis: Axis) -> Result<()> {
        if axis == Axis::Y && self.dims() == 1 {
            return Err(Error::Parameter {
                name: "axis",
                reason: format!("model '{}' is one-dimensional", self.name()),
            });
        }
        Ok(())
    }

    /// Density, velocity components and pressure of an Euler state.
    /// Errors if density or pressure falls below the positivity floor.
    fn euler_primitives(&self, u: &[f64]) -> Result<(f64, f64, f64, f64)> {
        let rho = u[0];
        if !rho.is_finite() || rho < POSITIVITY_FLOOR {
            return Err(Error::NonPhysical { quantity: "rho", value: rho });
        }
        let gamma = self.gamma().expect("euler model");
        let (vx, vy, energy) = match self {
            SystemModel::Euler1d { .. } => (u[1] / rho, 0.0, u[2]),
            SystemModel::Euler2d { .. } => (u[1] / rho, u[2] / rho, u[3]),
            _ => unreachable!(),
        };
        let p = (gamma - 1.0) * (energy - 0.5 * rho * (vx * vx + vy * vy));
        if !p.is_finite() || p < POSITIVITY_FLOOR {
            return Err(Error::NonPhysical { quantity: "p", value: p });
        }
        Ok((rho, vx, vy, p))
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            SystemModel::Euler1d { gamma } | SystemModel::Euler2d { gamma } => Some(*gamma),
            _ => None,
        }
    }

    /// Checks the state is finite and (for Euler) has positive density and
    /// pressure.
    pub fn validate_state(&self, u: &[f64]) -> Result<()> {
        match self {
            SystemModel::Advection { .. } | SystemModel::Burgers => {
                if !u[0].is_finite() {
                    return Err(Error::NonPhysical { quantity: "u", value: u[0] });
                }
                Ok(())
            }
            _ => self.euler_primitives(u).map(|_| ()),
        }
    }

    /// Physical flux f(u) along `axis`.
    pub fn physical_flux(&self, u: &[f64], axis: Axis) -> Result<StateArray> {
        self.check_axis(axis)?;
        let mut f = [0.0; MAX_COMPONENTS];
        match self {
            SystemModel::Advection { speed } => f[0] = speed * u[0],
            SystemModel::Burgers => f[0] = 0.5 * u[0] * u[0],
            SystemModel::Euler1d { .. } => {
                let (rho, vx, _, p) = self.euler_primitives(u)?;
                f[0] = rho * vx;
                f[1] = rho * vx * vx + p;
                f[2] = vx * (u[2] + p);
            }
            SystemModel::Euler2d { .. } => {
                let (rho, vx, vy, p) = self.euler_primitives(u)?;
                match axis {
                    Axis::X => {
                        f[0] = rho * vx;
                        f[1] = rho * vx * vx + p;
                        f[2] = rho * vx * vy;
                        f[3] = vx * (u[3] + p);
                    }
                    Axis::Y => {
                        f[0] = rho * vy;
                        f[1] = rho * vx * vy;
                        f[2] = rho * vy * vy + p;
                        f[3] = vy * (u[3] + p);
                    }
                }
            }
        }
        Ok(f)
    }

    /// Entropy, entropy flux, entropy variables and potential at `u`.
    pub fn entropy_pair(&self, u: &[f64]) -> Result<EntropyPair> {
        let mut pair = EntropyPair { eta: 0.0, q: [0.0; 2], v: [0.0; MAX_COMPONENTS], psi: [0.0; 2] };
        match self {
            SystemModel::Advection { speed } => {
                let w = u[0];
                if !w.is_finite() {
                    return Err(Error::NonPhysical { quantity: "u", value: w });
                }
                pair.eta = 0.5 * w * w;
                pair.v[0] = w;
                pair.q[0] = speed * 0.5 * w * w;
                pair.psi[0] = speed * 0.5 * w * w;
            }
            SystemModel::Burgers => {
                let w = u[0];
                if !w.is_finite() {
                    return Err(Error::NonPhysical { quantity: "u", value: w });
                }
                pair.eta = 0.5 * w * w;
                pair.v[0] = w;
                pair.q[0] = w * w * w / 3.0;
                pair.psi[0] = w * w * w / 6.0;
            }
            SystemModel::Euler1d { gamma } | SystemModel::Euler2d { gamma } => {
                let (rho, vx, vy, p) = self.euler_primitives(u)?;
                let s = p.ln() - gamma * rho.ln();
                let eta = -rho * s / (gamma - 1.0);
                let speed_sq = vx * vx + vy * vy;
                pair.eta = eta;
                pair.q[0] = vx * eta;
                pair.v[0] = (gamma - s) / (gamma - 1.0) - rho * speed_sq / (2.0 * p);
                pair.v[1] = rho * vx / p;
                pair.psi[0] = rho * vx;
                match self {
                    SystemModel::Euler1d { .. } => pair.v[2] = -rho / p,
                    SystemModel::Euler2d { .. } => {
                        pair.q[1] = vy * eta;
                        pair.v[2] = rho * vy / p;
                        pair.v[3] = -rho / p;
                        pair.psi[1] = rho * vy;
                    }
                    _ => unreachable!(),
                }
            }
        }
        Ok(pair)
    }

    /// Largest characteristic speed |lambda| of df/du along `axis` at `u`.
    pub fn max_wavespeed(&self, u: &[f64], axis: Axis) -> Result<f64> {
        self.check_axis(axis)?;
        match self {
            SystemModel::Advection { speed } => Ok(speed.abs()),
            SystemModel::Burgers => {
                if !u[0].is_finite() {
                    return Err(Error::NonPhysical { quantity: "u", value: u[0] });
                }
                Ok(u[0].abs())
            }
            SystemModel::Euler1d { gamma } | SystemModel::Euler2d { gamma } => {
                let (rho, vx, vy, p) = self.euler_primitives(u)?;
                let c = (gamma * p / rho).sqrt();
                let vn = match axis {
                    Axis::X => vx,
                    Axis::Y => vy,
                };
                Ok(vn.abs() + c)
            }
        }
    }

    /// Conserved -> primitive variables (identity for scalar models;
    /// (rho, u, [v,] p) for Euler).
    pub fn primitive_from_conserved(&self, u: &[f64]) -> Result<StateArray> {
        let mut prim = [0.0; MAX_COMPONENTS];
        match self {
            SystemModel::Advection { .. } | SystemModel::Burgers => prim[0] = u[0],
            SystemModel::Euler1d { .. } => {
                let (rho, vx, _, p) = self.euler_primitives(u)?;
                prim[0] = rho;
                prim[1] = vx;
                prim[2] = p;
            }
            SystemModel::Euler2d { .. } => {
                let (rho, vx, vy, p) = self.euler_primitives(u)?;
                prim[0] = rho;
                prim[1] = vx;
                prim[2] = vy;
                prim[3] = p;
            }
        }
        Ok(prim)
    }

    /// Primitive -> conserved variables; errors on non-positive rho or p.
    pub fn conserved_from_primitive(&self, prim: &[f64]) -> Result<StateArray> {
        let mut u = [0.0; MAX_COMPONENTS];
        match self {
            SystemModel::Advection { .. } | SystemModel::Burgers => u[0] = prim[0],
            SystemModel::Euler1d { gamma } => {
                let (rho, vx, p) = (prim[0], prim[1], prim[2]);
                if rho < POSITIVITY_FLOOR {
                    return Err(Error::NonPhysical { quantity: "rho", value: rho });
                }
                if p < POSITIVITY_FLOOR {
                    return Err(Error::NonPhysical { quantity: "p", value: p });
                }
                u[0] = rho;
                u[1] = rho * vx;
                u[2] = p / (gamma - 1.0) + 0.5 * rho * vx * vx;
            }
            SystemModel::Euler2d { gamma } => {
                let (rho, vx, vy, p) = (prim[0], prim[1], prim[2], prim[3]);
                if rho < POSITIVITY_FLOOR {
                    return Err(Error::NonPhysical { quantity: "rho", value: rho });
                }
                if p < POSITIVITY_FLOOR {
                    return Err(Error::NonPhysical { quantity: "p", value: p });
                }
                u[0] = rho;
                u[1] = rho * vx;
                u[2] = rho * vy;
                u[3] = p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy);
            }
        }
        Ok(u)
    }
}
