//! Numeric abstractions shared by the probability and statistics code.
//!
//! Kneser–Ney probabilities only need field arithmetic over integer counts,
//! so they are available for any [`Scalar`], including exact rationals.
//! Anything involving logarithms or special functions needs [`Real`].

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num};

/// Field-like number that integer counts can be lifted into.
pub trait Scalar: Num + FromPrimitive + Copy + PartialOrd + Debug {
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count not representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + FromPrimitive + Copy + PartialOrd + Debug {}

/// floating point: f32 or f64
pub trait Real: Scalar + Float + Sum + Send + Sync {
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal not representable")
    }
}

impl<T> Real for T where T: Scalar + Float + Sum + Send + Sync {}

/// Base of the logarithm used to express surprisal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    /// bits
    #[default]
    Two,
    /// nats
    E,
}

impl LogBase {
    pub fn log<R: Real>(self, x: R) -> R {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }

    /// Multiplier taking a value in this base to the `target` base.
    pub fn factor_to(self, target: LogBase) -> f64 {
        match (self, target) {
            (LogBase::Two, LogBase::E) => std::f64::consts::LN_2,
            (LogBase::E, LogBase::Two) => 1.0 / std::f64::consts::LN_2,
            _ => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(format!("log base must be 2 or e, got {other:?}")),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

// Serialized as the number 2 or the string "e", matching the interchange format.
impl serde::Serialize for LogBase {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            LogBase::Two => s.serialize_u8(2),
            LogBase::E => s.serialize_str("e"),
        }
    }
}

impl<'de> serde::Deserialize<'de> for LogBase {
    fn deserialize<De: serde::Deserializer<'de>>(d: De) -> Result<Self, De::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) if n == 2.0 => Ok(LogBase::Two),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Num(n) => Err(serde::de::Error::custom(format!("log base must be 2 or \"e\", got {n}"))),
        }
    }
}
