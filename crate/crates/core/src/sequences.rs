//! Digit-counting sequences used as product exponents.
//!
//! All generators are pure functions of a `u64` index. Block occurrences are
//! counted with overlaps (so `11` occurs twice in `111`), and the base-`b`
//! expansion of zero is the empty word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent sequence of a product `∏ R(n)^e(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExponentKind {
    /// `(-1)^{t_n}`
    #[serde(rename = "pm-t")]
    PmThue,
    /// `t_n`
    #[serde(rename = "t")]
    ZeroOneThue,
    /// `(-1)^{v_n}`
    #[serde(rename = "pm-v")]
    PmRudinShapiro,
    /// `v_n`
    #[serde(rename = "v")]
    ZeroOneRudinShapiro,
    /// constant 1
    #[serde(rename = "plain")]
    Plain,
}

impl ExponentKind {
    pub const ALL: [ExponentKind; 5] = [
        ExponentKind::PmThue,
        ExponentKind::ZeroOneThue,
        ExponentKind::PmRudinShapiro,
        ExponentKind::ZeroOneRudinShapiro,
        ExponentKind::Plain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExponentKind::PmThue => "pm-t",
            ExponentKind::ZeroOneThue => "t",
            ExponentKind::PmRudinShapiro => "pm-v",
            ExponentKind::ZeroOneRudinShapiro => "v",
            ExponentKind::Plain => "plain",
        }
    }

    /// ±1-valued kinds.
    pub fn is_signed(self) -> bool {
        matches!(self, ExponentKind::PmThue | ExponentKind::PmRudinShapiro)
    }

    /// Kinds whose products need equal root sums to converge.
    pub fn needs_full_convergence(self) -> bool {
        matches!(self, ExponentKind::ZeroOneThue | ExponentKind::ZeroOneRudinShapiro | ExponentKind::Plain)
    }
}

impl fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pm-t" | "pm-thue" | "pmt" => Ok(ExponentKind::PmThue),
            "t" | "thue" | "01-t" => Ok(ExponentKind::ZeroOneThue),
            "pm-v" | "pm-rs" | "pmv" => Ok(ExponentKind::PmRudinShapiro),
            "v" | "rs" | "01-v" => Ok(ExponentKind::ZeroOneRudinShapiro),
            "plain" | "1" => Ok(ExponentKind::Plain),
            other => Err(Error::input(format!("unknown exponent kind `{other}` (expected pm-t, t, pm-v, v or plain)"))),
        }
    }
}

/// Thue-Morse `t_n`: parity of the number of 1 bits of `n`.
#[inline]
pub fn thue_morse(n: u64) -> u8 {
    (n.count_ones() & 1) as u8
}

/// Rudin-Shapiro `v_n`: parity of the number of (overlapping) `11` blocks in
/// the binary expansion of `n`.
#[inline]
pub fn rudin_shapiro(n: u64) -> u8 {
    // each set bit of n & (n >> 1) marks one adjacent pair of ones
    ((n & (n >> 1)).count_ones() & 1) as u8
}

/// Parity of the number of overlapping occurrences of `word` in the base-`base`
/// digits of `n` (most significant digit first).
pub fn block_parity(word: &[u32], base: u32, n: u64) -> Result<u8> {
    if base < 2 {
        return Err(Error::input(format!("base must be at least 2, got {base}")));
    }
    if word.is_empty() {
        return Err(Error::input("block word must be nonempty"));
    }
    if let Some(d) = word.iter().find(|&&d| d >= base) {
        return Err(Error::input(format!("digit {d} is not valid in base {base}")));
    }
    let digits = digits_msb_first(n, base);
    if digits.len() < word.len() {
        return Ok(0);
    }
    let count = digits.windows(word.len()).filter(|w| *w == word).count();
    Ok((count & 1) as u8)
}

/// Parses a block word such as `"11"` or `"2"`; digits above 9 are written
/// as letters.
pub fn parse_word(word: &str) -> Result<Vec<u32>> {
    word.chars().map(|c| c.to_digit(36).ok_or_else(|| Error::input(format!("`{c}` is not a digit")))).collect()
}

fn digits_msb_first(mut n: u64, base: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(64);
    let b = u64::from(base);
    while n > 0 {
        out.push((n % b) as u32);
        n /= b;
    }
    out.reverse();
    out
}

/// Value of the exponent sequence at index `n`.
#[inline]
pub fn exponent(kind: ExponentKind, n: u64) -> i8 {
    match kind {
        ExponentKind::PmThue => 1 - 2 * thue_morse(n) as i8,
        ExponentKind::ZeroOneThue => thue_morse(n) as i8,
        ExponentKind::PmRudinShapiro => 1 - 2 * rudin_shapiro(n) as i8,
        ExponentKind::ZeroOneRudinShapiro => rudin_shapiro(n) as i8,
        ExponentKind::Plain => 1,
    }
}

/// `Σ_{0 ≤ k < count} exponent(kind, k)` for the ±1 kinds.
pub fn prefix_signed_sum(kind: ExponentKind, count: u64) -> Result<i64> {
    if !kind.is_signed() {
        return Err(Error::input(format!("prefix sums are defined for pm-t and pm-v, not {kind}")));
    }
    Ok((0..count).map(|k| i64::from(exponent(kind, k))).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_listing() {
        let first: Vec<u8> = (0..12).map(thue_morse).collect();
        assert_eq!(first, [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1]);
        assert_eq!(thue_morse(0), 0);
        assert_eq!(thue_morse(5), 0);
    }

    #[test]
    fn rudin_shapiro_small_values() {
        assert_eq!(rudin_shapiro(0), 0);
        assert_eq!(rudin_shapiro(3), 1);
        assert_eq!(rudin_shapiro(7), 0);
        let first: Vec<u8> = (0..4).map(rudin_shapiro).collect();
        assert_eq!(first, [0, 0, 0, 1]);
    }

    #[test]
    fn recurrences_hold_on_a_prefix() {
        for n in 0..1u64 << 16 {
            assert_eq!(thue_morse(2 * n), thue_morse(n));
            assert_eq!(thue_morse(2 * n + 1), 1 - thue_morse(n));
        }
        for n in 0..1u64 << 14 {
            assert_eq!(rudin_shapiro(2 * n), rudin_shapiro(n));
            assert_eq!(rudin_shapiro(4 * n + 1), rudin_shapiro(n));
            assert_eq!(rudin_shapiro(4 * n + 3), 1 - rudin_shapiro(2 * n + 1));
        }
    }

    #[test]
    fn block_parity_examples() {
        assert_eq!(block_parity(&[1], 2, 6).unwrap(), 0);
        assert_eq!(block_parity(&[2], 3, 5).unwrap(), 1);
        assert_eq!(block_parity(&[1, 1], 2, 7).unwrap(), 0);
        assert_eq!(block_parity(&[0], 2, 0).unwrap(), 0);
        for n in 0..4096 {
            assert_eq!(block_parity(&[1, 1], 2, n).unwrap(), rudin_shapiro(n));
        }
    }

    #[test]
    fn block_parity_rejects_bad_words() {
        assert!(block_parity(&[2], 2, 5).is_err());
        assert!(block_parity(&[], 2, 5).is_err());
        assert!(block_parity(&[0], 1, 5).is_err());
        assert_eq!(parse_word("12").unwrap(), vec![1, 2]);
        assert!(parse_word("1-").is_err());
    }

    #[test]
    fn exponent_values() {
        assert_eq!(exponent(ExponentKind::PmThue, 0), 1);
        assert_eq!(exponent(ExponentKind::PmThue, 1), -1);
        assert_eq!(exponent(ExponentKind::ZeroOneRudinShapiro, 3), 1);
        assert_eq!(exponent(ExponentKind::Plain, 12345), 1);
    }

    #[test]
    fn prefix_sums() {
        assert_eq!(prefix_signed_sum(ExponentKind::PmThue, 2).unwrap(), 0);
        for k in 1..=16 {
            assert_eq!(prefix_signed_sum(ExponentKind::PmThue, 1 << k).unwrap(), 0);
        }
        assert!(prefix_signed_sum(ExponentKind::Plain, 4).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExponentKind::ALL {
            assert_eq!(kind.name().parse::<ExponentKind>().unwrap(), kind);
        }
        assert!("w".parse::<ExponentKind>().is_err());
    }
}
