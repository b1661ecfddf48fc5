//! Run configuration shared by the subcommands.

use crate::error::CliError;
use serde::{Deserialize, Serialize};

/// The environment variable that overrides `--seed`.
pub const SEED_VAR: &str = "BILIP_SEED";

/// Settings echoed into every output so that a run can be repeated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
}

impl RunConfig {
    pub fn new(tolerance: f64, samples: usize, seed: u64) -> Result<Self, CliError> {
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(CliError::Input(format!("tolerance {tolerance} must be finite and non-negative")));
        }
        Ok(RunConfig {
            tolerance,
            samples,
            seed: resolve_seed(seed, std::env::var(SEED_VAR).ok().as_deref())?,
            window: None,
            profile: None,
            oracle: None,
        })
    }
}

/// The seed from the environment when set, otherwise the flag.
pub fn resolve_seed(flag: u64, env: Option<&str>) -> Result<u64, CliError> {
    match env {
        None => Ok(flag),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_VAR}={s:?} is not an unsigned integer"))),
    }
}

/// Parses "a,b" into an ordered pair.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("{a:?} is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("{b:?} is not a number"))?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(format!("{s:?} is not finite"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let c = RunConfig {
            tolerance: 1e-6,
            samples: 20_000,
            seed: 7,
            window: Some((-16.0, 16.0)),
            profile: Some("desk".into()),
            oracle: Some("coons".into()),
        };
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn environment_seed_wins() {
        assert_eq!(resolve_seed(3, None).unwrap(), 3);
        assert_eq!(resolve_seed(3, Some("11")).unwrap(), 11);
        assert!(resolve_seed(3, Some("x")).is_err());
    }

    #[test]
    fn pairs_parse() {
        assert_eq!(parse_pair("-16,16").unwrap(), (-16.0, 16.0));
        assert_eq!(parse_pair("0.02, 1").unwrap(), (0.02, 1.0));
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("a,1").is_err());
    }
}
