//! Named Flex weights and overlap thresholds tuned per family of networks.

use crate::error::{invalid, Result};
use crate::fitness::FlexParams;
use crate::graph::TripleScope;
use crate::overlap::OverlapThresholds;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub flex: FlexParams,
    pub thresholds: OverlapThresholds,
}

const fn row(name: &'static str, w: [f64; 3], th: [f64; 3]) -> Preset {
    Preset {
        name,
        flex: FlexParams {
            alpha: w[0],
            beta: w[1],
            gamma: w[2],
            triples: TripleScope::Centered,
        },
        thresholds: OverlapThresholds {
            thr_tri: th[0],
            thr_nbr: th[1],
            thr_shared: th[2],
        },
    }
}

pub const PRESETS: &[Preset] = &[
    row("karate", [0.8, 0.3, 2.0], [0.3, 0.6, 0.25]),
    row("network-50", [0.8, 0.3, 2.0], [0.3, 0.6, 0.25]),
    row("network-100-500", [0.8, 0.3, 4.0], [0.3, 0.7, 0.25]),
    row("krebs", [0.8, 0.3, 4.0], [0.3, 0.7, 0.25]),
    row("noise", [0.5, 1.0, 4.0], [0.3, 0.7, 0.45]),
    row("football", [0.8, 0.6, 4.0], [0.3, 0.6, 0.25]),
    row("dolphins", [0.4, 0.3, 4.0], [0.3, 0.6, 0.25]),
];

pub fn preset(name: &str) -> Result<Preset> {
    match PRESETS.iter().find(|p| p.name == name) {
        Some(p) => Ok(*p),
        None => {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            invalid(format!(
                "unknown preset {name}; expected one of {}",
                names.join(", ")
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in PRESETS {
            p.flex.validate().unwrap();
            p.thresholds.validate().unwrap();
        }
        assert_eq!(preset("noise").unwrap().flex.beta, 1.0);
        assert!(preset("nope").is_err());
    }
}
