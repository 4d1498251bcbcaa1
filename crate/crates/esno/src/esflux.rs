//! The sign-stability-gated entropy-stable flux.
//!
//! The entropy-stable flux would subtract a diffusion term D [[v]] / 2
//! from the entropy-conservative flux F*; solving the least-squares match
//! against a non-oscillatory flux F^s makes that term F* - F^s, which is an
//! admissible diffusion exactly when sign(F* - F^s) = sign([[v]]). The gate
//! therefore substitutes F^s where the signs agree and keeps F* elsewhere,
//! and the diffusion operator itself is never assembled.

use crate::error::{Error, Result};
use crate::models::MAX_COMPONENTS;

/// Whether the sign test gates the whole interface or single components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorMode {
    /// All components must sign-match for F^s to be taken (default).
    Interface,
    /// Components are gated independently; still entropy-dissipative and
    /// strictly less diffusive.
    Componentwise,
}

/// Which jump enters the sign test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpVariable {
    /// Jump of the conserved variables [[u]] (default).
    Conserved,
    /// Jump of the entropy variables [[v]]; makes the interface entropy
    /// dissipation non-negative by construction.
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorConfig {
    pub mode: SelectorMode,
    pub zero_tol: f64,
    pub jump_variable: JumpVariable,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            mode: SelectorMode::Interface,
            zero_tol: 1e-13,
            jump_variable: JumpVariable::Conserved,
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.zero_tol < 0.0 {
            return Err(Error::Parameter {
                name: "zero_tol",
                reason: format!("must be non-negative, got {}", self.zero_tol),
            });
        }
        Ok(())
    }
}

/// Everything recorded about one gated interface.
#[derive(Debug, Clone)]
pub struct InterfaceRecord {
    pub f_ec: Vec<f64>,
    pub f_ns: Vec<f64>,
    pub f_hat: Vec<f64>,
    /// Bitmask of components taken from F^s; in interface mode it is all
    /// components or none.
    pub chi: u32,
    /// Implicit diffusion F* - F_hat (equals D [[v]] / 2 of the optimizer).
    pub diffusion: Vec<f64>,
    /// Numerical entropy flux of the entropy-conservative part; populated
    /// by the caller before [`interface_entropy_flux`].
    pub q_star: f64,
    pub q_hat: f64,
}

impl InterfaceRecord {
    pub fn any_selected(&self) -> bool {
        self.chi != 0
    }
}

/// Componentwise sign agreement: component l matches when both entries are
/// within `zero_tol` of zero or share a strict sign with both magnitudes
/// above the tolerance. Returns a bitmask of matching components.
pub fn sign_match(a: &[f64], b: &[f64], zero_tol: f64) -> u32 {
    let mut mask = 0u32;
    for (l, (&x, &y)) in a.iter().zip(b).enumerate() {
        let both_zero = x.abs() <= zero_tol && y.abs() <= zero_tol;
        let same_sign = (x > zero_tol && y > zero_tol) || (x < -zero_tol && y < -zero_tol);
        if both_zero || same_sign {
            mask |= 1 << l;
        }
    }
    mask
}

/// Selection mask for one interface given the flux difference F* - F^s and
/// the configured jump. Applies the interface/componentwise mode rule.
pub fn selection_mask(diff: &[f64], jump: &[f64], cfg: &SelectorConfig) -> u32 {
    let m = diff.len();
    let mask = sign_match(diff, jump, cfg.zero_tol);
    match cfg.mode {
        SelectorMode::Componentwise => mask,
        SelectorMode::Interface => {
            let all = (1u32 << m) - 1;
            if mask == all {
                all
            } else {
                0
            }
        }
    }
}

/// Writes the gated flux into `f_hat` and returns the selection mask.
/// The jump must already be in the variable requested by the config.
pub fn gate_flux(
    f_ec: &[f64],
    f_ns: &[f64],
    jump: &[f64],
    cfg: &SelectorConfig,
    f_hat: &mut [f64],
) -> u32 {
    let mut diff = [0.0; MAX_COMPONENTS];
    for (d, (e, s)) in diff.iter_mut().zip(f_ec.iter().zip(f_ns)) {
        *d = e - s;
    }
    let mask = selection_mask(&diff[..f_ec.len()], jump, cfg);
    for l in 0..f_ec.len() {
        f_hat[l] = if mask & (1 << l) != 0 { f_ns[l] } else { f_ec[l] };
    }
    mask
}

/// Assembles the full interface record. `jump` is [[u]] or [[v]] according
/// to `cfg.jump_variable`; `q_star` is left unset (NaN) for the caller.
pub fn esno_flux(f_ec: &[f64], f_ns: &[f64], jump: &[f64], cfg: &SelectorConfig) -> InterfaceRecord {
    let m = f_ec.len();
    let mut f_hat = vec![0.0; m];
    let chi = gate_flux(f_ec, f_ns, jump, cfg, &mut f_hat);
    let diffusion: Vec<f64> = (0..m).map(|l| f_ec[l] - f_hat[l]).collect();
    InterfaceRecord {
        f_ec: f_ec.to_vec(),
        f_ns: f_ns.to_vec(),
        f_hat,
        chi,
        diffusion,
        q_star: f64::NAN,
        q_hat: f64::NAN,
    }
}

/// Numerical entropy flux of the gated scheme,
/// q_hat = q* - vbar . (F* - F_hat), stored into the record.
pub fn interface_entropy_flux(record: &mut InterfaceRecord, v_l: &[f64], v_r: &[f64]) -> f64 {
    let m = record.f_ec.len();
    let mut correction = 0.0;
    for l in 0..m {
        correction += 0.5 * (v_l[l] + v_r[l]) * record.diffusion[l];
    }
    record.q_hat = record.q_star - correction;
    record.q_hat
}

/// The interface entropy production [[v]] . (F* - F_hat). The gated scheme
/// keeps this non-negative whenever selection occurred under the entropy
/// jump; callers assert it stays above a roundoff floor.
pub fn entropy_dissipation_check(record: &InterfaceRecord, v_l: &[f64], v_r: &[f64]) -> f64 {
    (0..record.f_ec.len()).map(|l| (v_r[l] - v_l[l]) * record.diffusion[l]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecflux::{ec2_flux, entropy_flux_q2};
    use crate::models::{Axis, SystemModel};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sign_match_examples() {
        assert_eq!(sign_match(&[1.0, -2.0, 0.0], &[3.0, -1.0, 0.0], 1e-13), 0b111);
        assert_eq!(sign_match(&[1.0], &[-1.0], 1e-13), 0);
        // zero against positive fails the sign equality
        assert_eq!(sign_match(&[0.0], &[0.5], 1e-13), 0);
    }

    #[test]
    fn esno_flux_examples() {
        let cfg = SelectorConfig::default();
        // matching signs select the non-oscillatory flux
        let rec = esno_flux(&[2.0], &[1.0], &[0.5], &cfg);
        assert_eq!(rec.f_hat[0], 1.0);
        assert_eq!(rec.chi, 1);
        assert_eq!(rec.diffusion[0], 1.0);
        // mismatch keeps the entropy-conservative flux
        let rec = esno_flux(&[2.0], &[3.0], &[0.5], &cfg);
        assert_eq!(rec.f_hat[0], 2.0);
        assert_eq!(rec.chi, 0);
        assert_eq!(rec.diffusion[0], 0.0);
        // zero jump with distinct fluxes falls back to F*
        let rec = esno_flux(&[2.0], &[1.5], &[0.0], &cfg);
        assert_eq!(rec.f_hat[0], 2.0);
        assert_eq!(rec.chi, 0);
    }

    #[test]
    fn interface_mode_requires_all_components() {
        let cfg = SelectorConfig::default();
        let rec = esno_flux(&[1.0, 1.0], &[0.5, 2.0], &[1.0, 1.0], &cfg);
        // component 0 matches, component 1 does not -> whole interface off
        assert_eq!(rec.chi, 0);
        assert_eq!(rec.f_hat, vec![1.0, 1.0]);

        let cw = SelectorConfig { mode: SelectorMode::Componentwise, ..cfg };
        let rec = esno_flux(&[1.0, 1.0], &[0.5, 2.0], &[1.0, 1.0], &cw);
        assert_eq!(rec.chi, 0b01);
        assert_eq!(rec.f_hat, vec![0.5, 1.0]);
        assert_eq!(rec.diffusion, vec![0.5, 0.0]);
    }

    #[test]
    fn entropy_flux_examples() {
        // chi = 0 keeps q_hat = q_star
        let cfg = SelectorConfig::default();
        let mut rec = esno_flux(&[2.0], &[3.0], &[0.5], &cfg);
        rec.q_star = 1.25;
        let q = interface_entropy_flux(&mut rec, &[1.0], &[2.0]);
        assert_eq!(q, 1.25);

        // Burgers (1, 2) with the first-order flux F^s = 0.75
        let burgers = SystemModel::burgers();
        let f_ec = ec2_flux(&burgers, &[1.0], &[2.0], Axis::X).unwrap();
        let mut rec = esno_flux(&f_ec[..1], &[0.75], &[1.0], &cfg);
        assert_eq!(rec.chi, 1);
        rec.q_star = entropy_flux_q2(&burgers, &[1.0], &[2.0], Axis::X).unwrap();
        let q = interface_entropy_flux(&mut rec, &[1.0], &[2.0]);
        assert!((q - 0.375).abs() < 1e-14);

        // consistency: equal states give q(u)
        let f = ec2_flux(&burgers, &[1.0], &[1.0], Axis::X).unwrap();
        let mut rec = esno_flux(&f[..1], &f[..1], &[0.0], &cfg);
        rec.q_star = entropy_flux_q2(&burgers, &[1.0], &[1.0], Axis::X).unwrap();
        let q = interface_entropy_flux(&mut rec, &[1.0], &[1.0]);
        assert!((q - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn dissipation_check_examples() {
        let cfg = SelectorConfig::default();
        let rec = esno_flux(&[2.0], &[3.0], &[0.5], &cfg);
        assert_eq!(entropy_dissipation_check(&rec, &[1.0], &[2.0]), 0.0);

        let burgers = SystemModel::burgers();
        let f_ec = ec2_flux(&burgers, &[1.0], &[2.0], Axis::X).unwrap();
        let rec = esno_flux(&f_ec[..1], &[0.75], &[1.0], &cfg);
        let d = entropy_dissipation_check(&rec, &[1.0], &[2.0]);
        assert!((d - 5.0 / 12.0).abs() < 1e-14);
        assert!(d > 0.0);
    }

    #[test]
    fn llf_gating_dissipates_on_random_scalar_pairs() {
        // With the Rusanov flux as F^s, selected interfaces always produce
        // non-negative [[v]] . (F* - F_hat) for scalar models.
        let burgers = SystemModel::burgers();
        let cfg = SelectorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let mut selected = 0usize;
        for _ in 0..5000 {
            let ul = rng.random_range(-3.0..3.0);
            let ur = rng.random_range(-3.0..3.0);
            let f_ec = ec2_flux(&burgers, &[ul], &[ur], Axis::X).unwrap();
            let alpha = ul.abs().max(ur.abs());
            let f_ns = 0.5 * (0.5 * ul * ul + 0.5 * ur * ur) - 0.5 * alpha * (ur - ul);
            let rec = esno_flux(&f_ec[..1], &[f_ns], &[ur - ul], &cfg);
            if rec.any_selected() {
                selected += 1;
                assert!(entropy_dissipation_check(&rec, &[ul], &[ur]) >= 0.0);
            }
        }
        assert!(selected > 1000, "gate never fired: {selected}");
    }

    #[test]
    fn selector_correctness_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..3000 {
            let m = rng.random_range(1..=4usize);
            let f_ec: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let f_ns: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let jump: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            for mode in [SelectorMode::Interface, SelectorMode::Componentwise] {
                let cfg = SelectorConfig { mode, ..SelectorConfig::default() };
                let rec = esno_flux(&f_ec, &f_ns, &jump, &cfg);
                for l in 0..m {
                    let expect = if rec.chi & (1 << l) != 0 { f_ns[l] } else { f_ec[l] };
                    assert_eq!(rec.f_hat[l], expect);
                    assert_eq!(rec.diffusion[l], f_ec[l] - rec.f_hat[l]);
                }
            }
        }
    }

    #[test]
    fn reduction_property() {
        // F^s identical to F* gives back F* with zero diffusion everywhere.
        let cfg = SelectorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let f: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let jump: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rec = esno_flux(&f, &f, &jump, &cfg);
            assert_eq!(rec.f_hat, f);
            assert!(rec.diffusion.iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn zero_tol_validation() {
        let cfg = SelectorConfig { zero_tol: -1.0, ..SelectorConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(SelectorConfig::default().validate().is_ok());
    }
}
