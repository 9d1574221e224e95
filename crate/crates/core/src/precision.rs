use std::fmt;
use std::str::FromStr;

/// Working precision for the zero finder and the state expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    /// Double precision first, escalating to extended precision when a
    /// result fails validation.
    #[default]
    Auto,
    /// A fixed number of mantissa bits. 53 or less means plain `f64`.
    Bits(u32),
}

/// Mantissa bits of `f64`.
pub const DOUBLE_BITS: u32 = 53;

impl Precision {
    /// Extended working precision forced by this setting, if any.
    pub(crate) fn extended_bits(self, _k: u32) -> Option<usize> {
        match self {
            Precision::Bits(b) if b > DOUBLE_BITS => Some(b as usize),
            _ => None,
        }
    }

    /// First extended precision tried in automatic mode for degree `k`.
    pub(crate) fn default_bits(self, k: u32) -> usize {
        64 + 4 * k as usize
    }

    pub fn is_double_only(self) -> bool {
        matches!(self, Precision::Bits(b) if b <= DOUBLE_BITS)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Auto => f.write_str("auto"),
            Precision::Bits(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Precision::Auto);
        }
        match s.parse::<u32>() {
            Ok(b) if (24..=1 << 16).contains(&b) => Ok(Precision::Bits(b)),
            _ => Err(format!("precision must be `auto` or a bit count in 24..=65536, got {s:?}")),
        }
    }
}
