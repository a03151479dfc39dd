//! The four-level vigilance scale and a small per-colour container.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Official vigilance colour, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VigilanceColour {
    Green,
    Yellow,
    Orange,
    Red,
}

impl VigilanceColour {
    pub const ALL: [VigilanceColour; 4] = [
        VigilanceColour::Green,
        VigilanceColour::Yellow,
        VigilanceColour::Orange,
        VigilanceColour::Red,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VigilanceColour::Green => "green",
            VigilanceColour::Yellow => "yellow",
            VigilanceColour::Orange => "orange",
            VigilanceColour::Red => "red",
        }
    }
}

impl fmt::Display for VigilanceColour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown vigilance colour {0:?} (expected green, yellow, orange or red)")]
pub struct UnknownColour(pub String);

impl FromStr for VigilanceColour {
    type Err = UnknownColour;

    /// Accepts the lowercase wire tokens only.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "green" => Ok(VigilanceColour::Green),
            "yellow" => Ok(VigilanceColour::Yellow),
            "orange" => Ok(VigilanceColour::Orange),
            "red" => Ok(VigilanceColour::Red),
            other => Err(UnknownColour(other.to_string())),
        }
    }
}

/// One value per vigilance colour, serialized as a map keyed by the
/// lowercase colour token.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerColour<T> {
    pub green: T,
    pub yellow: T,
    pub orange: T,
    pub red: T,
}

impl<T> PerColour<T> {
    pub fn new(green: T, yellow: T, orange: T, red: T) -> Self {
        Self {
            green,
            yellow,
            orange,
            red,
        }
    }

    pub fn from_fn(mut f: impl FnMut(VigilanceColour) -> T) -> Self {
        Self {
            green: f(VigilanceColour::Green),
            yellow: f(VigilanceColour::Yellow),
            orange: f(VigilanceColour::Orange),
            red: f(VigilanceColour::Red),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (VigilanceColour, &T)> {
        VigilanceColour::ALL.into_iter().map(move |c| (c, &self[c]))
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> PerColour<U> {
        PerColour::from_fn(|c| f(&self[c]))
    }
}

impl<T> Index<VigilanceColour> for PerColour<T> {
    type Output = T;

    fn index(&self, colour: VigilanceColour) -> &T {
        match colour {
            VigilanceColour::Green => &self.green,
            VigilanceColour::Yellow => &self.yellow,
            VigilanceColour::Orange => &self.orange,
            VigilanceColour::Red => &self.red,
        }
    }
}

impl<T> IndexMut<VigilanceColour> for PerColour<T> {
    fn index_mut(&mut self, colour: VigilanceColour) -> &mut T {
        match colour {
            VigilanceColour::Green => &mut self.green,
            VigilanceColour::Yellow => &mut self.yellow,
            VigilanceColour::Orange => &mut self.orange,
            VigilanceColour::Red => &mut self.red,
        }
    }
}
