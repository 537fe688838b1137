//! Pocket scale: the right borders of the score ranges survey answers are
//! bucketed into.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper end of the 0–10 evaluation scale.
pub const SCALE_MAX: f64 = 10.0;

/// Ordered right borders `a_1 < … < a_n` of the score pockets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale")]
pub struct PocketScale {
    borders: Vec<f64>,
}

#[derive(Deserialize)]
struct RawScale {
    borders: Vec<f64>,
}

impl TryFrom<RawScale> for PocketScale {
    type Error = Error;

    fn try_from(raw: RawScale) -> Result<Self> {
        PocketScale::new(raw.borders)
    }
}

impl PocketScale {
    pub fn new(borders: Vec<f64>) -> Result<Self> {
        if borders.len() < 2 {
            return Err(Error::invariant(
                "pocket scale needs at least 2 borders",
                format!("got {}", borders.len()),
            ));
        }
        for &border in &borders {
            if !(border > 0.0 && border <= SCALE_MAX) {
                return Err(Error::invariant(
                    "pocket borders lie in (0, 10]",
                    format!("border {border}"),
                ));
            }
        }
        if let Some(w) = borders.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invariant(
                "pocket borders strictly increase",
                format!("{} is followed by {}", w[0], w[1]),
            ));
        }
        let last = borders[borders.len() - 1];
        if last != SCALE_MAX {
            return Err(Error::invariant(
                "last pocket border equals the scale maximum 10",
                format!("last border {last}"),
            ));
        }
        Ok(Self { borders })
    }

    pub fn borders(&self) -> &[f64] {
        &self.borders
    }

    /// Number of pockets `n`.
    pub fn len(&self) -> usize {
        self.borders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.borders.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.borders[self.borders.len() - 1]
    }
}

impl Default for PocketScale {
    /// Pockets `[0;1] [1;3] [3;5] [5;7.5] [7.5;10]`.
    fn default() -> Self {
        Self {
            borders: vec![1.0, 3.0, 5.0, 7.5, 10.0],
        }
    }
}
