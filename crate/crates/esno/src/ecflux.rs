//! Entropy-conservative interface fluxes.
//!
//! The two-point flux F* satisfies [[v]] . F* = [[psi]] per direction;
//! fourth- and sixth-order fluxes are linear combinations of two-point
//! evaluations over wider stencils, and each order comes with a matching
//! numerical entropy flux so the discrete cell entropy balance telescopes
//! exactly.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::models::{Axis, StateArray, SystemModel, MAX_COMPONENTS};
use crate::util::solve_linear_system;

/// Order of the entropy-conservative flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcOrder {
    Two,
    Four,
    Six,
}

impl EcOrder {
    pub const ALL: [EcOrder; 3] = [EcOrder::Two, EcOrder::Four, EcOrder::Six];

    pub fn order(&self) -> usize {
        match self {
            EcOrder::Two => 2,
            EcOrder::Four => 4,
            EcOrder::Six => 6,
        }
    }

    /// Half-order p: the flux combines two-point fluxes over spans 1..=p.
    pub fn half_order(&self) -> usize {
        self.order() / 2
    }

    /// Ghost cells required on each side of an interface.
    pub fn ghost_width(&self) -> usize {
        self.half_order()
    }

    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(EcOrder::Two),
            4 => Ok(EcOrder::Four),
            6 => Ok(EcOrder::Six),
            other => Err(Error::Parameter {
                name: "ec_order",
                reason: format!("supported orders are 2, 4, 6; got {other}"),
            }),
        }
    }
}

/// Coefficients alpha_k^p of the 2p-order combination, obtained by solving
/// sum_k k alpha_k = 1, sum_k k^(2j-1) alpha_k = 0 for j = 2..p.
#[derive(Debug, Clone)]
pub struct EcCoefficients {
    pub p: usize,
    pub alpha: Vec<f64>,
}

fn solve_coefficients(p: usize) -> EcCoefficients {
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (kk, row) in a[0].iter_mut().enumerate() {
        *row = (kk + 1) as f64;
    }
    b[0] = 1.0;
    for j in 2..=p {
        for kk in 0..p {
            a[j - 1][kk] = ((kk + 1) as f64).powi(2 * j as i32 - 1);
        }
    }
    EcCoefficients { p, alpha: solve_linear_system(a, b) }
}

/// Cached coefficients for p = 1, 2, 3.
pub fn ec_coefficients(p: usize) -> Result<&'static EcCoefficients> {
    static C1: OnceLock<EcCoefficients> = OnceLock::new();
    static C2: OnceLock<EcCoefficients> = OnceLock::new();
    static C3: OnceLock<EcCoefficients> = OnceLock::new();
    match p {
        1 => Ok(C1.get_or_init(|| solve_coefficients(1))),
        2 => Ok(C2.get_or_init(|| solve_coefficients(2))),
        3 => Ok(C3.get_or_init(|| solve_coefficients(3))),
        other => Err(Error::Parameter {
            name: "p",
            reason: format!("supported half-orders are 1, 2, 3; got {other}"),
        }),
    }
}

/// Logarithmic mean (a - b) / (ln a - ln b) for positive a, b, with a
/// series expansion when the ratio is within 1e-4 of 1.
fn log_mean(a: f64, b: f64) -> f64 {
    let zeta = a / b;
    if (zeta - 1.0).abs() <= 1e-4 {
        let f = (zeta - 1.0) / (zeta + 1.0);
        let u = f * f;
        (a + b) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))
    } else {
        (a - b) / zeta.ln()
    }
}

fn euler_primitives(model: &SystemModel, u: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let prim = model.primitive_from_conserved(u)?;
    match model {
        SystemModel::Euler1d { .. } => Ok((prim[0], prim[1], 0.0, prim[2])),
        SystemModel::Euler2d { .. } => Ok((prim[0], prim[1], prim[2], prim[3])),
        _ => unreachable!(),
    }
}

/// Second-order two-point entropy-conservative flux.
///
/// Scalar models use the closed form of [[psi]]/[[v]] (the arithmetic mean
/// for advection, (uL^2 + uL uR + uR^2)/6 for Burgers), which carries the
/// symmetric limit F*(u, u) = f(u) without a degenerate quotient. The Euler
/// flux is the mean-value construction with logarithmic means of rho and
/// rho/(2p).
pub fn ec2_flux(model: &SystemModel, u_l: &[f64], u_r: &[f64], axis: Axis) -> Result<StateArray> {
    let mut f = [0.0; MAX_COMPONENTS];
    match model {
        SystemModel::Advection { speed } => {
            f[0] = speed * 0.5 * (u_l[0] + u_r[0]);
        }
        SystemModel::Burgers => {
            let (a, b) = (u_l[0], u_r[0]);
            f[0] = (a * a + a * b + b * b) / 6.0;
        }
        SystemModel::Euler1d { gamma } => {
            let (rho_l, vl, _, pl) = euler_primitives(model, u_l)?;
            let (rho_r, vr, _, pr) = euler_primitives(model, u_r)?;
            let beta_l = 0.5 * rho_l / pl;
            let beta_r = 0.5 * rho_r / pr;
            let rho_ln = log_mean(rho_l, rho_r);
            let beta_ln = log_mean(beta_l, beta_r);
            let u_avg = 0.5 * (vl + vr);
            let vel2_avg = 0.5 * (vl * vl + vr * vr);
            let p_hat = 0.5 * (rho_l + rho_r) / (beta_l + beta_r);
            f[0] = rho_ln * u_avg;
            f[1] = u_avg * f[0] + p_hat;
            f[2] = 0.5 * f[0] * (1.0 / ((gamma - 1.0) * beta_ln) - vel2_avg) + u_avg * f[1];
        }
        SystemModel::Euler2d { gamma } => {
            let (rho_l, ul, vl, pl) = euler_primitives(model, u_l)?;
            let (rho_r, ur, vr, pr) = euler_primitives(model, u_r)?;
            let beta_l = 0.5 * rho_l / pl;
            let beta_r = 0.5 * rho_r / pr;
            let rho_ln = log_mean(rho_l, rho_r);
            let beta_ln = log_mean(beta_l, beta_r);
            let u_avg = 0.5 * (ul + ur);
            let v_avg = 0.5 * (vl + vr);
            let vel2_avg = 0.5 * (ul * ul + vl * vl + ur * ur + vr * vr);
            let p_hat = 0.5 * (rho_l + rho_r) / (beta_l + beta_r);
            let internal = 1.0 / ((gamma - 1.0) * beta_ln) - vel2_avg;
            match axis {
                Axis::X => {
                    f[0] = rho_ln * u_avg;
                    f[1] = u_avg * f[0] + p_hat;
                    f[2] = v_avg * f[0];
                    f[3] = 0.5 * f[0] * internal + u_avg * f[1] + v_avg * f[2];
                }
                Axis::Y => {
                    f[0] = rho_ln * v_avg;
                    f[1] = u_avg * f[0];
                    f[2] = v_avg * f[0] + p_hat;
                    f[3] = 0.5 * f[0] * internal + u_avg * f[1] + v_avg * f[2];
                }
            }
        }
    }
    Ok(f)
}

fn add_scaled(acc: &mut StateArray, flux: &StateArray, scale: f64, m: usize) {
    for c in 0..m {
        acc[c] += scale * flux[c];
    }
}

/// Fourth-order flux from the stencil (u_{i-1}, u_i, u_{i+1}, u_{i+2})
/// around the interface i+1/2, states stored consecutively in `stencil`.
pub fn ec4_flux(model: &SystemModel, stencil: &[f64], axis: Axis) -> Result<StateArray> {
    let m = model.components();
    debug_assert_eq!(stencil.len(), 4 * m);
    let cell = |t: usize| &stencil[t * m..(t + 1) * m];
    let mut f = [0.0; MAX_COMPONENTS];
    add_scaled(&mut f, &ec2_flux(model, cell(1), cell(2), axis)?, 4.0 / 3.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(0), cell(2), axis)?, -1.0 / 6.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(1), cell(3), axis)?, -1.0 / 6.0, m);
    Ok(f)
}

/// Sixth-order flux from the stencil (u_{i-2}, ..., u_{i+3}) around the
/// interface i+1/2.
pub fn ec6_flux(model: &SystemModel, stencil: &[f64], axis: Axis) -> Result<StateArray> {
    let m = model.components();
    debug_assert_eq!(stencil.len(), 6 * m);
    let cell = |t: usize| &stencil[t * m..(t + 1) * m];
    let mut f = [0.0; MAX_COMPONENTS];
    add_scaled(&mut f, &ec2_flux(model, cell(2), cell(3), axis)?, 3.0 / 2.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(1), cell(3), axis)?, -3.0 / 10.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(2), cell(4), axis)?, -3.0 / 10.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(0), cell(3), axis)?, 1.0 / 30.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(1), cell(4), axis)?, 1.0 / 30.0, m);
    add_scaled(&mut f, &ec2_flux(model, cell(2), cell(5), axis)?, 1.0 / 30.0, m);
    Ok(f)
}

/// Entropy-conservative flux of the given order at every interface of a
/// line of cells (ghosts filled). Interface j sits between cells
/// `g + j - 1` and `g + j`; `out` receives `(n + 1) * m` values.
pub fn ec_flux_line(
    model: &SystemModel,
    order: EcOrder,
    axis: Axis,
    u: &[f64],
    n: usize,
    g: usize,
    out: &mut [f64],
) -> Result<()> {
    let m = model.components();
    let p = order.half_order();
    if g < p {
        return Err(Error::Config(format!(
            "EC order {} needs ghost width {p}, grid provides {g}",
            order.order()
        )));
    }
    if u.len() != (n + 2 * g) * m || out.len() != (n + 1) * m {
        return Err(Error::Config("buffer size mismatch in ec_flux_line".into()));
    }
    for j in 0..=n {
        let left = g + j - 1;
        let f = match order {
            EcOrder::Two => {
                ec2_flux(model, &u[left * m..(left + 1) * m], &u[(left + 1) * m..(left + 2) * m], axis)?
            }
            EcOrder::Four => ec4_flux(model, &u[(left - 1) * m..(left + 3) * m], axis)?,
            EcOrder::Six => ec6_flux(model, &u[(left - 2) * m..(left + 4) * m], axis)?,
        };
        out[j * m..(j + 1) * m].copy_from_slice(&f[..m]);
    }
    Ok(())
}

/// Second-order numerical entropy flux q* = vbar . F* - psibar.
pub fn entropy_flux_q2(model: &SystemModel, u_l: &[f64], u_r: &[f64], axis: Axis) -> Result<f64> {
    let m = model.components();
    let d = axis.index();
    let f = ec2_flux(model, u_l, u_r, axis)?;
    let pl = model.entropy_pair(u_l)?;
    let pr = model.entropy_pair(u_r)?;
    let mut vf = 0.0;
    for c in 0..m {
        vf += 0.5 * (pl.v[c] + pr.v[c]) * f[c];
    }
    Ok(vf - 0.5 * (pl.psi[d] + pr.psi[d]))
}

/// Numerical entropy flux of the 2p-order entropy-conservative scheme at
/// interface i+1/2. `stencil` holds the 2p states u_{i-p+1}, ..., u_{i+p}
/// consecutively. For p = 1 this reduces to [`entropy_flux_q2`].
pub fn entropy_flux_2p(model: &SystemModel, stencil: &[f64], p: usize, axis: Axis) -> Result<f64> {
    let coef = ec_coefficients(p)?;
    let m = model.components();
    if stencil.len() != 2 * p * m {
        return Err(Error::Parameter {
            name: "stencil",
            reason: format!("2p-order entropy flux needs {} states, got {}", 2 * p, stencil.len() / m),
        });
    }
    // stencil position of u_{i+d} is d + p - 1
    let cell = |d: isize| {
        let t = (d + p as isize - 1) as usize;
        &stencil[t * m..(t + 1) * m]
    };
    let mut q = 0.0;
    for (kk, alpha) in coef.alpha.iter().enumerate() {
        let k = (kk + 1) as isize;
        for l in 0..=kk as isize {
            q += alpha * entropy_flux_q2(model, cell(-l), cell(-l + k), axis)?;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<SystemModel> {
        vec![
            SystemModel::advection(1.0),
            SystemModel::burgers(),
            SystemModel::euler1d(1.4).unwrap(),
            SystemModel::euler2d(1.4).unwrap(),
        ]
    }

    fn random_state(model: &SystemModel, rng: &mut impl Rng) -> StateArray {
        let mut prim = [0.0; MAX_COMPONENTS];
        match model {
            SystemModel::Advection { .. } | SystemModel::Burgers => {
                prim[0] = rng.random_range(-3.0..3.0);
            }
            SystemModel::Euler1d { .. } => {
                prim[0] = rng.random_range(0.1..5.0);
                prim[1] = rng.random_range(-3.0..3.0);
                prim[2] = rng.random_range(0.1..5.0);
            }
            SystemModel::Euler2d { .. } => {
                prim[0] = rng.random_range(0.1..5.0);
                prim[1] = rng.random_range(-3.0..3.0);
                prim[2] = rng.random_range(-3.0..3.0);
                prim[3] = rng.random_range(0.1..5.0);
            }
        }
        model.conserved_from_primitive(&prim).unwrap()
    }

    #[test]
    fn ec2_examples() {
        let burgers = SystemModel::burgers();
        let f = ec2_flux(&burgers, &[1.0], &[2.0], Axis::X).unwrap();
        assert!((f[0] - 7.0 / 6.0).abs() < 1e-15);

        let adv = SystemModel::advection(1.0);
        let f = ec2_flux(&adv, &[0.0], &[2.0], Axis::X).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-15);

        // consistency for every model
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for model in models() {
            let m = model.components();
            let u = random_state(&model, &mut rng);
            let f = ec2_flux(&model, &u[..m], &u[..m], Axis::X).unwrap();
            let exact = model.physical_flux(&u[..m], Axis::X).unwrap();
            for c in 0..m {
                assert!(
                    (f[c] - exact[c]).abs() <= 1e-13 * (1.0 + exact[c].abs()),
                    "{model:?} comp {c}: {} vs {}",
                    f[c],
                    exact[c]
                );
            }
        }
    }

    #[test]
    fn ec_identity_random_pairs() {
        // [[v]] . F* = [[psi]] per direction
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for model in models() {
            let m = model.components();
            for d in 0..model.dims() {
                let axis = if d == 0 { Axis::X } else { Axis::Y };
                for _ in 0..2000 {
                    let ul = random_state(&model, &mut rng);
                    let ur = random_state(&model, &mut rng);
                    let f = ec2_flux(&model, &ul[..m], &ur[..m], axis).unwrap();
                    let pl = model.entropy_pair(&ul[..m]).unwrap();
                    let pr = model.entropy_pair(&ur[..m]).unwrap();
                    let jump_v_dot_f: f64 = (0..m).map(|c| (pr.v[c] - pl.v[c]) * f[c]).sum();
                    let jump_psi = pr.psi[d] - pl.psi[d];
                    assert!(
                        (jump_v_dot_f - jump_psi).abs() <= 1e-11 * (1.0 + jump_psi.abs()),
                        "{model:?} axis {axis:?}: {jump_v_dot_f} vs {jump_psi}"
                    );
                }
            }
        }
    }

    #[test]
    fn ec2_symmetric_and_handles_near_equal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in models() {
            let m = model.components();
            for _ in 0..500 {
                let ul = random_state(&model, &mut rng);
                let ur = random_state(&model, &mut rng);
                let fab = ec2_flux(&model, &ul[..m], &ur[..m], Axis::X).unwrap();
                let fba = ec2_flux(&model, &ur[..m], &ul[..m], Axis::X).unwrap();
                for c in 0..m {
                    assert!((fab[c] - fba[c]).abs() <= 1e-13 * (1.0 + fab[c].abs()));
                }
                // nearly equal states stay finite and consistent
                let mut ur2 = ul;
                for c in 0..m {
                    ur2[c] *= 1.0 + 1e-13;
                }
                let f = ec2_flux(&model, &ul[..m], &ur2[..m], Axis::X).unwrap();
                let exact = model.physical_flux(&ul[..m], Axis::X).unwrap();
                for c in 0..m {
                    assert!((f[c] - exact[c]).abs() <= 1e-10 * (1.0 + exact[c].abs()));
                }
            }
        }
    }

    #[test]
    fn ec4_examples() {
        let adv = SystemModel::advection(1.0);
        let stencil = [0.0, 1.0, 2.0, 3.0];
        let f = ec4_flux(&adv, &stencil, Axis::X).unwrap();
        assert!((f[0] - 1.5).abs() < 1e-14);

        let burgers = SystemModel::burgers();
        let f = ec4_flux(&burgers, &[1.0, 1.0, 2.0, 2.0], Axis::X).unwrap();
        assert!((f[0] - 7.0 / 6.0).abs() < 1e-14);

        // constant data
        let euler = SystemModel::euler1d(1.4).unwrap();
        let c = euler.conserved_from_primitive(&[1.1, 0.4, 0.8]).unwrap();
        let mut stencil = vec![0.0; 12];
        for t in 0..4 {
            stencil[t * 3..(t + 1) * 3].copy_from_slice(&c[..3]);
        }
        let f = ec4_flux(&euler, &stencil, Axis::X).unwrap();
        let exact = euler.physical_flux(&c[..3], Axis::X).unwrap();
        for cix in 0..3 {
            assert!((f[cix] - exact[cix]).abs() < 1e-14 * (1.0 + exact[cix].abs()));
        }
    }

    #[test]
    fn ec6_examples() {
        let adv = SystemModel::advection(1.0);
        let f = ec6_flux(&adv, &[-1.0, 0.0, 1.0, 2.0, 3.0, 4.0], Axis::X).unwrap();
        assert!((f[0] - 1.5).abs() < 1e-14);

        // brute-force evaluation of the combination on equal-pair data
        let burgers = SystemModel::burgers();
        let s = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        let f = ec6_flux(&burgers, &s, Axis::X).unwrap();
        let two = |a: f64, b: f64| (a * a + a * b + b * b) / 6.0;
        let expect = 1.5 * two(s[2], s[3])
            - 0.3 * (two(s[1], s[3]) + two(s[2], s[4]))
            + (two(s[0], s[3]) + two(s[1], s[4]) + two(s[2], s[5])) / 30.0;
        assert!((f[0] - expect).abs() < 1e-14);

        let c = 0.6;
        let f = ec6_flux(&burgers, &[c; 6], Axis::X).unwrap();
        assert!((f[0] - 0.5 * c * c).abs() < 1e-14);
    }

    #[test]
    fn entropy_flux_q2_examples() {
        let burgers = SystemModel::burgers();
        // uL = uR: q*(u, u) = q(u)
        let q = entropy_flux_q2(&burgers, &[1.3], &[1.3], Axis::X).unwrap();
        assert!((q - 1.3f64.powi(3) / 3.0).abs() < 1e-14);

        let q = entropy_flux_q2(&burgers, &[1.0], &[2.0], Axis::X).unwrap();
        assert!((q - 1.0).abs() < 1e-14);

        let adv = SystemModel::advection(1.0);
        let q = entropy_flux_q2(&adv, &[0.0], &[2.0], Axis::X).unwrap();
        assert!(q.abs() < 1e-14);
    }

    #[test]
    fn coefficients_match_closed_forms() {
        let c1 = ec_coefficients(1).unwrap();
        assert!((c1.alpha[0] - 1.0).abs() < 1e-13);

        let c2 = ec_coefficients(2).unwrap();
        assert!((c2.alpha[0] - 4.0 / 3.0).abs() < 1e-13);
        assert!((c2.alpha[1] + 1.0 / 6.0).abs() < 1e-13);

        let c3 = ec_coefficients(3).unwrap();
        assert!((c3.alpha[0] - 3.0 / 2.0).abs() < 1e-13);
        assert!((c3.alpha[1] + 3.0 / 10.0).abs() < 1e-13);
        assert!((c3.alpha[2] - 1.0 / 30.0).abs() < 1e-13);

        // defining sum rules
        for p in 1..=3usize {
            let c = ec_coefficients(p).unwrap();
            let s1: f64 = c.alpha.iter().enumerate().map(|(k, a)| (k + 1) as f64 * a).sum();
            assert!((s1 - 1.0).abs() < 1e-13);
            for j in 2..=p {
                let s: f64 = c
                    .alpha
                    .iter()
                    .enumerate()
                    .map(|(k, a)| ((k + 1) as f64).powi(2 * j as i32 - 1) * a)
                    .sum();
                assert!(s.abs() < 1e-13);
            }
        }
        assert!(ec_coefficients(4).is_err());
    }

    #[test]
    fn entropy_flux_2p_reduces_to_q2() {
        let burgers = SystemModel::burgers();
        let q2 = entropy_flux_q2(&burgers, &[0.4], &[1.7], Axis::X).unwrap();
        let q = entropy_flux_2p(&burgers, &[0.4, 1.7], 1, Axis::X).unwrap();
        assert!((q - q2).abs() < 1e-15);
    }

    #[test]
    fn ec_entropy_balance_telescopes() {
        // For a periodic line the 2p-order flux and its entropy flux satisfy
        // v_i . dF_i = dq_i exactly (up to roundoff), every order.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for model in [SystemModel::burgers(), SystemModel::euler1d(1.4).unwrap()] {
            let m = model.components();
            let n = 12;
            for order in EcOrder::ALL {
                let p = order.half_order();
                let g = p;
                let mut u = vec![0.0; (n + 2 * g) * m];
                for t in 0..n {
                    let s = random_state(&model, &mut rng);
                    u[(g + t) * m..(g + t + 1) * m].copy_from_slice(&s[..m]);
                }
                // periodic ghosts
                for t in 0..g {
                    for c in 0..m {
                        u[t * m + c] = u[(n + t) * m + c];
                        u[(n + g + t) * m + c] = u[(g + t) * m + c];
                    }
                }
                let mut flux = vec![0.0; (n + 1) * m];
                ec_flux_line(&model, order, Axis::X, &u, n, g, &mut flux).unwrap();
                for i in 0..n {
                    let cellix = g + i;
                    let v = model.entropy_pair(&u[cellix * m..(cellix + 1) * m]).unwrap().v;
                    let vdf: f64 =
                        (0..m).map(|c| v[c] * (flux[(i + 1) * m + c] - flux[i * m + c])).sum();
                    let take = |j: usize| {
                        // stencil u_{i-p+1+j'}.. for interface j
                        let left = g + j - 1;
                        u[(left - (p - 1)) * m..(left + p + 1) * m].to_vec()
                    };
                    let qr = entropy_flux_2p(&model, &take(i + 1), p, Axis::X).unwrap();
                    let ql = entropy_flux_2p(&model, &take(i), p, Axis::X).unwrap();
                    assert!(
                        (vdf - (qr - ql)).abs() <= 1e-11 * (1.0 + vdf.abs()),
                        "{model:?} {order:?} cell {i}: {vdf} vs {}",
                        qr - ql
                    );
                }
            }
        }
    }

    #[test]
    fn ec_flux_truncation_orders() {
        // d/dx F over a smooth profile converges at order 2p.
        let model = SystemModel::burgers();
        for order in EcOrder::ALL {
            let p = order.half_order();
            let mut errs = Vec::new();
            for n in [32usize, 64] {
                let g = p;
                let dx = 2.0 / n as f64;
                let mut u = vec![0.0; n + 2 * g];
                for t in 0..n + 2 * g {
                    let x = -1.0 + (t as f64 - g as f64 + 0.5) * dx;
                    u[t] = (std::f64::consts::PI * x).sin();
                }
                let mut flux = vec![0.0; n + 1];
                ec_flux_line(&model, order, Axis::X, &u, n, g, &mut flux).unwrap();
                let mut l1 = 0.0;
                for i in 0..n {
                    let x = -1.0 + (i as f64 + 0.5) * dx;
                    let s = (std::f64::consts::PI * x).sin();
                    let exact = s * std::f64::consts::PI * (std::f64::consts::PI * x).cos();
                    l1 += ((flux[i + 1] - flux[i]) / dx - exact).abs() * dx;
                }
                errs.push(l1);
            }
            let rate = (errs[0] / errs[1]).log2();
            let target = order.order() as f64;
            assert!(
                (rate - target).abs() < 0.35,
                "{order:?}: rate {rate}, errors {errs:?}"
            );
        }
    }
}
