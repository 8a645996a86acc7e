//! Validated scalar parameters shared by every module.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("genus must be at least 1")]
    ZeroGenus,
}

/// Prequantization level `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Level(u32);

impl Level {
    pub fn new(k: u32) -> Result<Self, ParamError> {
        if k == 0 {
            return Err(ParamError::ZeroLevel);
        }
        Ok(Level(k))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Level {
    type Error = ParamError;

    fn try_from(k: u32) -> Result<Self, Self::Error> {
        Level::new(k)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Genus of a closed Riemann surface, `g >= 1`.
///
/// Genus one is accepted by the Verlinde and theta modules; the graph modules
/// additionally require `g >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: u32) -> Result<Self, ParamError> {
        if g == 0 {
            return Err(ParamError::ZeroGenus);
        }
        Ok(Genus(g))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Genus {
    type Error = ParamError;

    fn try_from(g: u32) -> Result<Self, Self::Error> {
        Genus::new(g)
    }
}

impl fmt::Display for Genus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
