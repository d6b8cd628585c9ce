use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a node within one scenario. The gateway is always id 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const GATEWAY: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_gateway(self) -> bool {
        self == Self::GATEWAY
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for NodeId {
    fn from(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index fits in u32"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x_cm: f64,
    pub y_cm: f64,
}

impl Position {
    pub const fn new(x_cm: f64, y_cm: f64) -> Self {
        Position { x_cm, y_cm }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x_cm - other.x_cm).hypot(self.y_cm - other.y_cm)
    }
}

/// Rectangular sensing field with one corner at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    width_cm: f64,
    height_cm: f64,
}

impl Area {
    pub fn new(width_cm: f64, height_cm: f64) -> Result<Self> {
        if !(width_cm > 0.0 && width_cm.is_finite() && height_cm > 0.0 && height_cm.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "area must have positive finite sides, got {width_cm} x {height_cm}"
            )));
        }
        Ok(Area {
            width_cm,
            height_cm,
        })
    }

    pub fn width_cm(&self) -> f64 {
        self.width_cm
    }

    pub fn height_cm(&self) -> f64 {
        self.height_cm
    }

    pub fn contains(&self, p: &Position) -> bool {
        (0.0..=self.width_cm).contains(&p.x_cm) && (0.0..=self.height_cm).contains(&p.y_cm)
    }

    pub fn center(&self) -> Position {
        Position::new(self.width_cm / 2.0, self.height_cm / 2.0)
    }
}

impl Default for Area {
    fn default() -> Self {
        Area {
            width_cm: 800.0,
            height_cm: 500.0,
        }
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width_cm, self.height_cm)
    }
}
