//! Fixed-width integer sorts and two's-complement value helpers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signedness {
    Signed,
    Unsigned,
}

/// A machine integer sort: bit width plus signedness.
///
/// Values of a sort are carried around as `u64` bit patterns masked to the
/// width. `to_int` / `from_int` convert between the bit pattern and the
/// mathematical value under the sort's signedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntSort {
    width: u32,
    signedness: Signedness,
}

impl IntSort {
    pub const I8: IntSort = IntSort { width: 8, signedness: Signedness::Signed };
    pub const I16: IntSort = IntSort { width: 16, signedness: Signedness::Signed };
    pub const I32: IntSort = IntSort { width: 32, signedness: Signedness::Signed };
    pub const I64: IntSort = IntSort { width: 64, signedness: Signedness::Signed };
    pub const U8: IntSort = IntSort { width: 8, signedness: Signedness::Unsigned };
    pub const U16: IntSort = IntSort { width: 16, signedness: Signedness::Unsigned };
    pub const U32: IntSort = IntSort { width: 32, signedness: Signedness::Unsigned };
    pub const U64: IntSort = IntSort { width: 64, signedness: Signedness::Unsigned };

    pub const ALL: [IntSort; 8] =
        [Self::I8, Self::I16, Self::I32, Self::I64, Self::U8, Self::U16, Self::U32, Self::U64];

    /// Returns `None` unless `width` is one of 8, 16, 32, 64.
    pub fn new(width: u32, signedness: Signedness) -> Option<IntSort> {
        matches!(width, 8 | 16 | 32 | 64).then_some(IntSort { width, signedness })
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn signedness(self) -> Signedness {
        self.signedness
    }

    pub fn is_signed(self) -> bool {
        self.signedness == Signedness::Signed
    }

    pub fn mask(self) -> u64 {
        mask(self.width)
    }

    pub fn min_value(self) -> i128 {
        match self.signedness {
            Signedness::Signed => -(1i128 << (self.width - 1)),
            Signedness::Unsigned => 0,
        }
    }

    pub fn max_value(self) -> i128 {
        match self.signedness {
            Signedness::Signed => (1i128 << (self.width - 1)) - 1,
            Signedness::Unsigned => (1i128 << self.width) - 1,
        }
    }

    /// `|D| = 2^width`, independent of signedness.
    pub fn domain_size(self) -> BigUint {
        BigUint::from(1u8) << self.width
    }

    pub fn contains(self, value: i128) -> bool {
        (self.min_value()..=self.max_value()).contains(&value)
    }

    /// Interprets a bit pattern under this sort.
    pub fn to_int(self, bits: u64) -> i128 {
        let bits = bits & self.mask();
        match self.signedness {
            Signedness::Unsigned => bits as i128,
            Signedness::Signed => sign_extend(bits, self.width) as i64 as i128,
        }
    }

    /// Bit pattern of `value`, or `None` when it is outside the sort's range.
    pub fn from_int(self, value: i128) -> Option<u64> {
        self.contains(value).then(|| self.wrap_int(value))
    }

    /// Bit pattern of `value` reduced modulo `2^width`.
    pub fn wrap_int(self, value: i128) -> u64 {
        (value as u128 as u64) & self.mask()
    }

    pub fn keyword(self) -> &'static str {
        match (self.signedness, self.width) {
            (Signedness::Signed, 8) => "i8",
            (Signedness::Signed, 16) => "i16",
            (Signedness::Signed, 32) => "i32",
            (Signedness::Signed, _) => "i64",
            (Signedness::Unsigned, 8) => "u8",
            (Signedness::Unsigned, 16) => "u16",
            (Signedness::Unsigned, 32) => "u32",
            (Signedness::Unsigned, _) => "u64",
        }
    }
}

impl fmt::Display for IntSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for IntSort {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntSort::ALL.into_iter().find(|sort| sort.keyword() == s).ok_or(())
    }
}

pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Sign-extends the low `width` bits of `bits` to 64 bits.
pub fn sign_extend(bits: u64, width: u32) -> u64 {
    if width >= 64 {
        return bits;
    }
    let bits = bits & mask(width);
    if bits >> (width - 1) & 1 == 1 {
        bits | !mask(width)
    } else {
        bits
    }
}
