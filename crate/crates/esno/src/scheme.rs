//! Scheme selection and the "EC<m>-<FAMILY>-<n>" name grammar.

use crate::ecflux::EcOrder;
use crate::error::{Error, Result};
use crate::esflux::SelectorConfig;
use crate::reconstruction::{NsFamily, NsFluxConfig};

/// Full flux configuration: entropy-conservative order, non-oscillatory
/// family and the sign-selector settings. A scheme with both parts active
/// gates between them; with one part it runs that flux alone.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSchemeConfig {
    pub ec_order: Option<EcOrder>,
    pub ns: Option<NsFluxConfig>,
    pub selector: SelectorConfig,
}

impl FluxSchemeConfig {
    pub fn gated(&self) -> bool {
        self.ec_order.is_some() && self.ns.is_some()
    }

    /// Ghost layers required by the widest stencil of the combination.
    pub fn ghost_width(&self) -> usize {
        let ec = self.ec_order.map(|o| o.ghost_width()).unwrap_or(0);
        let ns = self.ns.map(|f| f.family.ghost_width()).unwrap_or(0);
        ec.max(ns).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ec_order.is_none() && self.ns.is_none() {
            return Err(Error::Config("scheme selects neither an EC nor a non-oscillatory flux".into()));
        }
        if let Some(ns) = &self.ns {
            ns.validate()?;
        }
        self.selector.validate()
    }

    /// Canonical name ("EC6-WENOJS-5", "ENO-3", "EC4").
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(ec) = self.ec_order {
            out.push_str(&format!("EC{}", ec.order()));
        }
        if let Some(ns) = &self.ns {
            if !out.is_empty() {
                out.push('-');
            }
            out.push_str(family_name(ns.family));
        }
        out
    }
}

fn family_name(family: NsFamily) -> &'static str {
    match family {
        NsFamily::Llf1 => "LLF-1",
        NsFamily::Eno2 => "ENO-2",
        NsFamily::Eno3 => "ENO-3",
        NsFamily::Weno3Js => "WENOJS-3",
        NsFamily::Weno5Js => "WENOJS-5",
        NsFamily::Weno3Z => "WENOZ-3",
        NsFamily::Weno5Z => "WENOZ-5",
    }
}

fn family_from(token: &str, order: usize) -> Option<NsFamily> {
    match (token, order) {
        ("LLF", 1) => Some(NsFamily::Llf1),
        ("ENO", 2) => Some(NsFamily::Eno2),
        ("ENO", 3) => Some(NsFamily::Eno3),
        ("WENOJS", 3) => Some(NsFamily::Weno3Js),
        ("WENOJS", 5) => Some(NsFamily::Weno5Js),
        ("WENOZ", 3) => Some(NsFamily::Weno3Z),
        ("WENOZ", 5) => Some(NsFamily::Weno5Z),
        _ => None,
    }
}

/// Parses scheme names: "EC<m>" alone is the pure entropy-conservative
/// scheme, "<FAMILY>-<n>" the pure non-oscillatory scheme, and
/// "EC<m>-<FAMILY>-<n>" (also written "EC-m-FAMILY-n") the gated
/// combination. Case-insensitive.
pub fn parse_scheme_name(name: &str) -> Result<FluxSchemeConfig> {
    let err = |reason: &str| Error::SchemeName { input: name.to_string(), reason: reason.to_string() };
    let upper = name.trim().to_ascii_uppercase();
    if upper.is_empty() {
        return Err(err("empty name"));
    }
    let toks: Vec<&str> = upper.split('-').collect();
    let mut idx = 0;
    let mut ec_order = None;
    if let Some(first) = toks.first() {
        if let Some(rest) = first.strip_prefix("EC") {
            let digits = if rest.is_empty() {
                // "EC-m-..." spelling
                idx = 1;
                toks.get(1).copied().ok_or_else(|| err("missing EC order"))?
            } else {
                rest
            };
            let m: usize = digits.parse().map_err(|_| err("EC order is not a number"))?;
            ec_order = Some(EcOrder::from_order(m).map_err(|_| err("EC order must be 2, 4 or 6"))?);
            idx += 1;
        }
    }
    let ns = if idx < toks.len() {
        let fam_tok = toks[idx];
        let ord_tok = toks.get(idx + 1).ok_or_else(|| err("family without an order"))?;
        if idx + 2 != toks.len() {
            return Err(err("trailing tokens after the family order"));
        }
        let order: usize = ord_tok.parse().map_err(|_| err("family order is not a number"))?;
        let family = family_from(fam_tok, order)
            .ok_or_else(|| err("unknown family/order combination"))?;
        Some(NsFluxConfig::new(family))
    } else {
        None
    };
    if ec_order.is_none() && ns.is_none() {
        return Err(err("neither an EC order nor a flux family"));
    }
    Ok(FluxSchemeConfig { ec_order, ns, selector: SelectorConfig::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let cfg = parse_scheme_name("EC6-WENOJS-5").unwrap();
        assert_eq!(cfg.ec_order, Some(EcOrder::Six));
        assert_eq!(cfg.ns.unwrap().family, NsFamily::Weno5Js);
        assert!(parse_scheme_name("EC6-WENOJS-5").unwrap().gated());

        let cfg = parse_scheme_name("ENO-3").unwrap();
        assert_eq!(cfg.ec_order, None);
        assert_eq!(cfg.ns.unwrap().family, NsFamily::Eno3);

        let cfg = parse_scheme_name("EC4-ENO-2").unwrap();
        assert_eq!(cfg.ec_order, Some(EcOrder::Four));
        assert_eq!(cfg.ns.unwrap().family, NsFamily::Eno2);

        // paper-style spelling and case-insensitivity
        let cfg = parse_scheme_name("ec-6-wenojs-5").unwrap();
        assert_eq!(cfg.render(), "EC6-WENOJS-5");

        let cfg = parse_scheme_name("EC4").unwrap();
        assert!(cfg.ns.is_none());
        assert_eq!(cfg.ec_order, Some(EcOrder::Four));
    }

    #[test]
    fn parse_render_roundtrip_all_valid_schemes() {
        let mut names = vec!["EC2".to_string(), "EC4".to_string(), "EC6".to_string()];
        for fam in NsFamily::ALL {
            names.push(family_name(fam).to_string());
            for ec in ["EC2", "EC4", "EC6"] {
                names.push(format!("{ec}-{}", family_name(fam)));
            }
        }
        for name in names {
            let cfg = parse_scheme_name(&name).unwrap();
            assert_eq!(cfg.render(), name);
            assert_eq!(parse_scheme_name(&cfg.render()).unwrap(), cfg);
        }
    }

    #[test]
    fn malformed_names_are_rejected() {
        for bad in ["", "EC3", "EC", "ENO", "ENO-5", "WENOJS-4", "EC4-ENO-3-X", "FOO-3", "EC4-ENO", "EC4-3"] {
            let e = parse_scheme_name(bad).unwrap_err();
            assert!(matches!(e, Error::SchemeName { .. }), "{bad}");
        }
    }

    #[test]
    fn ghost_widths() {
        assert_eq!(parse_scheme_name("EC2-LLF-1").unwrap().ghost_width(), 1);
        assert_eq!(parse_scheme_name("EC6-WENOJS-5").unwrap().ghost_width(), 3);
        assert_eq!(parse_scheme_name("EC6-ENO-2").unwrap().ghost_width(), 3);
        assert_eq!(parse_scheme_name("WENOJS-3").unwrap().ghost_width(), 2);
        assert_eq!(parse_scheme_name("EC2").unwrap().ghost_width(), 1);
    }
}
