//! Selection of the EER routine used by bootstrap replicates, GA fitness and
//! the benchmark grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fast_eer::{eer_polytomous, PolytomousConfig};
use crate::rates::{eer_classic, eer_whole, EerError, EerResult};
use crate::scalar::Scalar;
use crate::scores::ScoreSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EerMethod {
    Polytomous(PolytomousConfig),
    Classic { steps: usize },
    Whole,
}

impl Default for EerMethod {
    fn default() -> Self {
        EerMethod::Polytomous(PolytomousConfig::default())
    }
}

impl EerMethod {
    pub fn compute<T: Scalar>(&self, set: &ScoreSet<T>) -> Result<EerResult<T>, EerError<T>> {
        match self {
            EerMethod::Polytomous(cfg) => eer_polytomous(set, cfg),
            EerMethod::Classic { steps } => eer_classic(set, *steps),
            EerMethod::Whole => eer_whole(set),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            EerMethod::Polytomous(cfg) => cfg.validate(),
            EerMethod::Classic { steps } if *steps < 2 => {
                Err(format!("classic steps must be >= 2, got {steps}"))
            }
            _ => Ok(()),
        }
    }

    /// Table label: `polyto_I_P`, `classic_N` or `whole`.
    pub fn label(&self) -> String {
        match self {
            EerMethod::Polytomous(cfg) => cfg.label(),
            EerMethod::Classic { steps } => format!("classic_{steps}"),
            EerMethod::Whole => "whole".to_string(),
        }
    }
}

impl fmt::Display for EerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses the table labels back: `whole`, `classic_100`, `polyto_5_0.01`.
impl FromStr for EerMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('_').collect();
        let bad = || format!("unrecognised method `{s}`");
        let m = match parts.as_slice() {
            ["whole"] => EerMethod::Whole,
            ["classic", n] => EerMethod::Classic { steps: n.parse().map_err(|_| bad())? },
            ["polyto", i, p] => EerMethod::Polytomous(PolytomousConfig::new(
                i.parse().map_err(|_| bad())?,
                p.parse().map_err(|_| bad())?,
            )),
            _ => return Err(bad()),
        };
        m.validate()?;
        Ok(m)
    }
}
