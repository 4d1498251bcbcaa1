//! ENO and WENO interface reconstruction of split point fluxes.
//!
//! Point flux values are treated as cell averages of an auxiliary function
//! and reconstructed at cell interfaces (standard finite-difference WENO
//! practice). All stencil coefficients, optimal weights and smoothness
//! quadratic forms are derived here from Lagrange reconstruction
//! polynomials rather than copied from tables; the unit tests check them
//! against an independent brute-force reconstruction oracle.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::models::{Axis, SystemModel};
use crate::util::solve_linear_system;

/// Which interface of the centered cell a reconstruction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Non-oscillatory flux family. The trailing number is the formal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NsFamily {
    Llf1,
    Eno2,
    Eno3,
    Weno3Js,
    Weno5Js,
    Weno3Z,
    Weno5Z,
}

impl NsFamily {
    pub const ALL: [NsFamily; 7] = [
        NsFamily::Llf1,
        NsFamily::Eno2,
        NsFamily::Eno3,
        NsFamily::Weno3Js,
        NsFamily::Weno5Js,
        NsFamily::Weno3Z,
        NsFamily::Weno5Z,
    ];

    /// Reconstruction order parameter k (stencils of k cells), if the
    /// family reconstructs at all.
    pub fn k(&self) -> Option<usize> {
        match self {
            NsFamily::Llf1 => None,
            NsFamily::Eno2 | NsFamily::Weno3Js | NsFamily::Weno3Z => Some(2),
            NsFamily::Eno3 | NsFamily::Weno5Js | NsFamily::Weno5Z => Some(3),
        }
    }

    /// Ghost cells needed on each side of an interface.
    pub fn ghost_width(&self) -> usize {
        self.k().unwrap_or(1)
    }

    /// Formal order of the family.
    pub fn order(&self) -> usize {
        match self {
            NsFamily::Llf1 => 1,
            NsFamily::Eno2 => 2,
            NsFamily::Eno3 => 3,
            NsFamily::Weno3Js | NsFamily::Weno3Z => 3,
            NsFamily::Weno5Js | NsFamily::Weno5Z => 5,
        }
    }

    fn weno_weights(&self) -> Option<WenoWeights> {
        match self {
            NsFamily::Weno3Js | NsFamily::Weno5Js => Some(WenoWeights::Js),
            NsFamily::Weno3Z | NsFamily::Weno5Z => Some(WenoWeights::Z),
            _ => None,
        }
    }
}

/// Nonlinear weight recipe for WENO.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WenoWeights {
    Js,
    Z,
}

/// How the splitting wavespeed sigma is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSigmaMode {
    /// Max wavespeed over the whole line (sharp global bound).
    Global,
    /// Max wavespeed of the two cells adjacent to the interface.
    Local,
}

/// Configuration of the non-oscillatory flux F^s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsFluxConfig {
    pub family: NsFamily,
    pub epsilon: f64,
    pub splitting_sigma_mode: SplitSigmaMode,
}

impl NsFluxConfig {
    pub fn new(family: NsFamily) -> Self {
        NsFluxConfig { family, epsilon: 1e-6, splitting_sigma_mode: SplitSigmaMode::Global }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Parameter {
                name: "epsilon",
                reason: format!("must be positive, got {}", self.epsilon),
            });
        }
        Ok(())
    }
}

/// Smoothness indicators and weights of one WENO evaluation.
#[derive(Debug, Clone)]
pub struct ReconstructionWeights {
    pub beta: Vec<f64>,
    pub gamma_lin: Vec<f64>,
    pub omega: Vec<f64>,
    pub epsilon: f64,
}

// ---------------------------------------------------------------------------
// Derived coefficient tables.

/// Coefficients for reconstructing the value at the right interface of cell
/// `i` from the cell averages of stencil {i-r, ..., i-r+k-1}, plus the
/// optimal weights and the smoothness quadratic forms.
struct KTables {
    /// `coeffs[r][j]`: weight of the j-th stencil cell, stencils r = 0..k-1.
    coeffs: Vec<Vec<f64>>,
    /// Optimal (linear) weights gamma_r combining the k candidates into the
    /// full (2k-1)-cell reconstruction.
    gamma: Vec<f64>,
    /// `full[j]`: weight of window cell j in the (2k-1)-cell reconstruction.
    #[cfg_attr(not(test), allow(dead_code))]
    full: Vec<f64>,
    /// `beta_q[r]`: symmetric k x k quadratic form, beta_r = w^T Q w over
    /// the r-th candidate's stencil values.
    beta_q: Vec<Vec<Vec<f64>>>,
}

/// d/dx of the Lagrange basis polynomial through `nodes` that is 1 at
/// `nodes[j]`, evaluated at `x`.
fn lagrange_basis_deriv(nodes: &[f64], j: usize, x: f64) -> f64 {
    let mut denom = 1.0;
    for (q, &nq) in nodes.iter().enumerate() {
        if q != j {
            denom *= nodes[j] - nq;
        }
    }
    let mut sum = 0.0;
    for l in 0..nodes.len() {
        if l == j {
            continue;
        }
        let mut prod = 1.0;
        for (q, &nq) in nodes.iter().enumerate() {
            if q != j && q != l {
                prod *= x - nq;
            }
        }
        sum += prod;
    }
    sum / denom
}

/// Coefficients of the cell averages of stencil {i-r, ..., i-r+kk-1} in
/// the reconstructed point value at x_{i+1/2} (unit cells). Obtained by
/// interpolating the primitive function at the kk+1 stencil boundaries and
/// differentiating at the interface.
fn reconstruction_coeffs(kk: usize, r: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (0..=kk).map(|j| -(r as f64) - 0.5 + j as f64).collect();
    let x = 0.5;
    // coefficient of cell c is sum over primitive knots j > c of L_j'(x)
    let mut coeffs = vec![0.0; kk];
    for c in 0..kk {
        let mut sum = 0.0;
        for j in c + 1..=kk {
            sum += lagrange_basis_deriv(&nodes, j, x);
        }
        coeffs[c] = sum;
    }
    coeffs
}

/// Monomial-basis coefficients of the stencil-r reconstruction polynomial
/// as a matrix: a = M w for stencil values w (unit cells, cell i at the
/// origin).
fn poly_coeff_matrix(k: usize, r: usize) -> Vec<Vec<f64>> {
    // B[t][j] = integral of xi^j over cell t of the stencil
    let mut b = vec![vec![0.0; k]; k];
    for t in 0..k {
        let c = t as f64 - r as f64;
        for j in 0..k {
            let hi = (c + 0.5).powi(j as i32 + 1);
            let lo = (c - 0.5).powi(j as i32 + 1);
            b[t][j] = (hi - lo) / (j as f64 + 1.0);
        }
    }
    // Columns of M solve B m_col = e_t.
    let mut m = vec![vec![0.0; k]; k];
    for t in 0..k {
        let mut rhs = vec![0.0; k];
        rhs[t] = 1.0;
        let col = solve_linear_system(b.clone(), rhs);
        for (j, mj) in col.iter().enumerate() {
            m[j][t] = *mj;
        }
    }
    m
}

/// Quadratic form of the Jiang-Shu smoothness indicator for stencil r:
/// beta_r = sum_{l>=1} int_{cell i} (d^l p / dxi^l)^2 dxi.
fn beta_quadratic(k: usize, r: usize) -> Vec<Vec<f64>> {
    let m = poly_coeff_matrix(k, r);
    // G[j1][j2] = sum_l D(j1,l) D(j2,l) int xi^(j1+j2-2l)
    let mut g = vec![vec![0.0; k]; k];
    for j1 in 1..k {
        for j2 in 1..k {
            let mut sum = 0.0;
            for l in 1..=j1.min(j2) {
                let d1: f64 = ((j1 - l + 1)..=j1).map(|v| v as f64).product();
                let d2: f64 = ((j2 - l + 1)..=j2).map(|v| v as f64).product();
                let pw = j1 + j2 - 2 * l;
                let integral =
                    if pw % 2 == 0 { 0.5f64.powi(pw as i32) / (pw as f64 + 1.0) } else { 0.0 };
                sum += d1 * d2 * integral;
            }
            g[j1][j2] = sum;
        }
    }
    // Q = M^T G M
    let mut q = vec![vec![0.0; k]; k];
    for t1 in 0..k {
        for t2 in 0..k {
            let mut sum = 0.0;
            for j1 in 0..k {
                for j2 in 0..k {
                    sum += m[j1][t1] * g[j1][j2] * m[j2][t2];
                }
            }
            q[t1][t2] = sum;
        }
    }
    q
}

fn build_tables(k: usize) -> KTables {
    let coeffs: Vec<Vec<f64>> = (0..k).map(|r| reconstruction_coeffs(k, r)).collect();
    let full = reconstruction_coeffs(2 * k - 1, k - 1);
    // Solve for gamma by forward substitution over the leftmost window
    // positions: position t is covered only by stencils r >= k-1-t.
    let mut gamma = vec![0.0; k];
    for t in 0..k {
        let mut rhs = full[t];
        for r in (k - t)..=(k - 1) {
            // stencil r covers window positions k-1-r .. 2k-2-r
            let j = t - (k - 1 - r);
            rhs -= gamma[r] * coeffs[r][j];
        }
        let r = k - 1 - t;
        gamma[r] = rhs / coeffs[r][0];
    }
    let beta_q = (0..k).map(|r| beta_quadratic(k, r)).collect();
    KTables { coeffs, gamma, full, beta_q }
}

fn tables(k: usize) -> Result<&'static KTables> {
    static T2: OnceLock<KTables> = OnceLock::new();
    static T3: OnceLock<KTables> = OnceLock::new();
    match k {
        2 => Ok(T2.get_or_init(|| build_tables(2))),
        3 => Ok(T3.get_or_init(|| build_tables(3))),
        _ => Err(Error::Parameter {
            name: "k",
            reason: format!("supported reconstruction orders are 2 and 3, got {k}"),
        }),
    }
}

/// Optimal linear weights gamma_r for order k (exposed for tests and
/// diagnostics).
pub fn optimal_weights(k: usize) -> Result<Vec<f64>> {
    Ok(tables(k)?.gamma.clone())
}

fn check_window(window: &[f64], k: usize) -> Result<()> {
    if window.len() != 2 * k - 1 {
        return Err(Error::Parameter {
            name: "window",
            reason: format!("expected {} values for k = {k}, got {}", 2 * k - 1, window.len()),
        });
    }
    Ok(())
}

fn reversed(window: &[f64]) -> [f64; 5] {
    let mut rev = [0.0; 5];
    for (t, &w) in window.iter().rev().enumerate() {
        rev[t] = w;
    }
    rev
}

// ---------------------------------------------------------------------------
// ENO

/// Value at the requested interface of the center cell, reconstructed from
/// the single smoothest k-cell stencil. The stencil grows from {i} by
/// hierarchical comparison of absolute Newton divided differences; exact
/// ties prefer the left-shifted stencil. Inputs are cell averages.
pub fn eno_interface_value(window: &[f64], k: usize, side: Side) -> Result<f64> {
    let t = tables(k)?;
    check_window(window, k)?;
    if side == Side::Left {
        // left/right duality: reconstructing the left interface equals
        // reconstructing the right interface of the reversed data
        let rev = reversed(window);
        return eno_interface_value(&rev[..window.len()], k, Side::Right);
    }
    let ci = k - 1; // center cell position in the window
    let mut left = ci; // leftmost cell of the current stencil
    for level in 1..k {
        // undivided forward differences of order `level` starting at s
        let diff = |s: usize| -> f64 {
            let mut buf = [0.0; 5];
            let len = level + 1;
            buf[..len].copy_from_slice(&window[s..s + len]);
            for l in 0..level {
                for idx in 0..level - l {
                    buf[idx] = buf[idx + 1] - buf[idx];
                }
            }
            buf[0]
        };
        let take_left = diff(left - 1).abs() <= diff(left).abs();
        if take_left {
            left -= 1;
        }
    }
    let r = ci - left;
    let value = t.coeffs[r].iter().zip(&window[left..left + k]).map(|(c, w)| c * w).sum();
    Ok(value)
}

// ---------------------------------------------------------------------------
// WENO

fn weno_parts(window: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let t = tables(k)?;
    check_window(window, k)?;
    let ci = k - 1;
    let mut values = vec![0.0; k];
    let mut betas = vec![0.0; k];
    for r in 0..k {
        let stencil = &window[ci - r..ci - r + k];
        values[r] = t.coeffs[r].iter().zip(stencil).map(|(c, w)| c * w).sum();
        let q = &t.beta_q[r];
        let mut beta = 0.0;
        for (t1, w1) in stencil.iter().enumerate() {
            for (t2, w2) in stencil.iter().enumerate() {
                beta += q[t1][t2] * w1 * w2;
            }
        }
        betas[r] = beta.max(0.0);
    }
    Ok((values, betas, t.gamma.clone()))
}

/// Candidate interface values, smoothness indicators and linear weights for
/// the requested side. Exposed for tests and diagnostics.
pub fn weno_candidates(window: &[f64], k: usize, side: Side) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if side == Side::Left {
        let rev = reversed(window);
        return weno_parts(&rev[..window.len()], k);
    }
    weno_parts(window, k)
}

/// Nonlinear weights per the requested recipe.
pub fn weno_weights_from(
    betas: &[f64],
    gamma: &[f64],
    eps: f64,
    mode: WenoWeights,
) -> ReconstructionWeights {
    let k = betas.len();
    let mut alpha = vec![0.0; k];
    match mode {
        WenoWeights::Js => {
            for r in 0..k {
                alpha[r] = gamma[r] / ((eps + betas[r]) * (eps + betas[r]));
            }
        }
        WenoWeights::Z => {
            let tau = (betas[0] - betas[k - 1]).abs();
            for r in 0..k {
                alpha[r] = gamma[r] * (1.0 + tau / (betas[r] + eps));
            }
        }
    }
    let total: f64 = alpha.iter().sum();
    let omega: Vec<f64> = alpha.iter().map(|a| a / total).collect();
    ReconstructionWeights { beta: betas.to_vec(), gamma_lin: gamma.to_vec(), omega, epsilon: eps }
}

/// Weighted-stencil interface value. Reduces to the full (2k-1)-order
/// reconstruction when all smoothness indicators coincide.
pub fn weno_interface_value(
    window: &[f64],
    k: usize,
    eps: f64,
    mode: WenoWeights,
    side: Side,
) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Parameter {
            name: "epsilon",
            reason: format!("must be positive, got {eps}"),
        });
    }
    let (values, betas, gamma) = weno_candidates(window, k, side)?;
    let weights = weno_weights_from(&betas, &gamma, eps, mode);
    Ok(weights.omega.iter().zip(&values).map(|(w, v)| w * v).sum())
}

// ---------------------------------------------------------------------------
// Flux splitting and the assembled non-oscillatory flux

/// Lax-Friedrichs splitting f± = (f ± sigma u) / 2, componentwise.
pub fn split_flux_lxf(
    f_point: &[f64],
    u_point: &[f64],
    sigma: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if sigma < 0.0 {
        return Err(Error::Parameter {
            name: "sigma",
            reason: format!("splitting speed must be non-negative, got {sigma}"),
        });
    }
    let plus: Vec<f64> =
        f_point.iter().zip(u_point).map(|(f, u)| 0.5 * (f + sigma * u)).collect();
    let minus: Vec<f64> =
        f_point.iter().zip(u_point).map(|(f, u)| 0.5 * (f - sigma * u)).collect();
    Ok((plus, minus))
}

fn family_value(family: NsFamily, window: &[f64], k: usize, eps: f64, side: Side) -> Result<f64> {
    match family {
        NsFamily::Eno2 | NsFamily::Eno3 => eno_interface_value(window, k, side),
        _ => weno_interface_value(window, k, eps, family.weno_weights().unwrap(), side),
    }
}

/// Non-oscillatory flux F^s at every interface of a 1D line of cells.
///
/// `u` holds `n + 2 g` states of `m` components with ghosts filled; `out`
/// receives `n + 1` interface fluxes (interface j between cells j-1 and j
/// of the interior). For the reconstruction families the split fluxes
/// f+ and f- are reconstructed componentwise from the left- and
/// right-biased stencils; `llf1` is the first-order Rusanov flux.
pub fn nonoscillatory_flux_line(
    model: &SystemModel,
    cfg: &NsFluxConfig,
    axis: Axis,
    u: &[f64],
    n: usize,
    g: usize,
    out: &mut [f64],
) -> Result<()> {
    cfg.validate()?;
    let m = model.components();
    let total = n + 2 * g;
    if u.len() != total * m {
        return Err(Error::Config(format!(
            "line of {n} cells with ghost width {g} needs {} values, got {}",
            total * m,
            u.len()
        )));
    }
    if out.len() != (n + 1) * m {
        return Err(Error::Config("flux buffer size mismatch".into()));
    }
    let need = cfg.family.ghost_width();
    if g < need {
        return Err(Error::Config(format!(
            "family {:?} needs ghost width {need}, grid provides {g}",
            cfg.family
        )));
    }
    let cell = |t: usize| &u[t * m..(t + 1) * m];

    // point fluxes and wavespeeds for every cell of the line
    let mut f_point = vec![0.0; total * m];
    let mut speeds = vec![0.0; total];
    for t in 0..total {
        let f = model.physical_flux(cell(t), axis)?;
        f_point[t * m..(t + 1) * m].copy_from_slice(&f[..m]);
        speeds[t] = model.max_wavespeed(cell(t), axis)?;
    }
    let sigma_global = speeds.iter().cloned().fold(0.0f64, f64::max);

    if cfg.family == NsFamily::Llf1 {
        for j in 0..=n {
            let (a, b) = (g + j - 1, g + j);
            let alpha = speeds[a].max(speeds[b]);
            for c in 0..m {
                let mean = 0.5 * (f_point[a * m + c] + f_point[b * m + c]);
                out[j * m + c] = mean - 0.5 * alpha * (u[b * m + c] - u[a * m + c]);
            }
        }
        return Ok(());
    }

    let k = cfg.family.k().expect("reconstructing family");
    let wlen = 2 * k - 1;
    for j in 0..=n {
        let sigma = match cfg.splitting_sigma_mode {
            SplitSigmaMode::Global => sigma_global,
            SplitSigmaMode::Local => speeds[g + j - 1].max(speeds[g + j]),
        };
        for c in 0..m {
            // F+ : reconstruct f+ at the right interface of cell j-1
            let base = g + j - 1 - (k - 1);
            let mut wp = [0.0; 5];
            for t in 0..wlen {
                let cellix = base + t;
                wp[t] = 0.5 * (f_point[cellix * m + c] + sigma * u[cellix * m + c]);
            }
            let fp = family_value(cfg.family, &wp[..wlen], k, cfg.epsilon, Side::Right)?;
            // F- : reconstruct f- at the left interface of cell j
            let base = g + j - (k - 1);
            let mut wm = [0.0; 5];
            for t in 0..wlen {
                let cellix = base + t;
                wm[t] = 0.5 * (f_point[cellix * m + c] - sigma * u[cellix * m + c]);
            }
            let fm = family_value(cfg.family, &wm[..wlen], k, cfg.epsilon, Side::Left)?;
            out[j * m + c] = fp + fm;
        }
    }
    Ok(())
}

/// Ghost width required by `family` (re-exported convenience).
pub fn family_ghost_width(family: NsFamily) -> usize {
    family.ghost_width()
}
