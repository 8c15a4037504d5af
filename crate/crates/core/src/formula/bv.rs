//! Bit-vector primitives on `u64` bit patterns, following the QF_BV
//! semantics of SMT-LIB (division and remainder are total).

use crate::minilang::{mask, sign_extend};

fn msb(bits: u64, width: u32) -> bool {
    bits >> (width - 1) & 1 == 1
}

pub fn neg(width: u32, a: u64) -> u64 {
    a.wrapping_neg() & mask(width)
}

pub fn not(width: u32, a: u64) -> u64 {
    !a & mask(width)
}

pub fn add(width: u32, a: u64, b: u64) -> u64 {
    a.wrapping_add(b) & mask(width)
}

pub fn sub(width: u32, a: u64, b: u64) -> u64 {
    a.wrapping_sub(b) & mask(width)
}

pub fn mul(width: u32, a: u64, b: u64) -> u64 {
    a.wrapping_mul(b) & mask(width)
}

/// `bvudiv`: division by zero yields all ones.
pub fn udiv(width: u32, a: u64, b: u64) -> u64 {
    a.checked_div(b).unwrap_or(mask(width))
}

/// `bvurem`: remainder by zero yields the dividend.
pub fn urem(_width: u32, a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        a % b
    }
}

pub fn sdiv(width: u32, a: u64, b: u64) -> u64 {
    match (msb(a, width), msb(b, width)) {
        (false, false) => udiv(width, a, b),
        (true, false) => neg(width, udiv(width, neg(width, a), b)),
        (false, true) => neg(width, udiv(width, a, neg(width, b))),
        (true, true) => udiv(width, neg(width, a), neg(width, b)),
    }
}

/// `bvsrem`: the result takes the sign of the dividend.
pub fn srem(width: u32, a: u64, b: u64) -> u64 {
    match (msb(a, width), msb(b, width)) {
        (false, false) => urem(width, a, b),
        (true, false) => neg(width, urem(width, neg(width, a), b)),
        (false, true) => urem(width, a, neg(width, b)),
        (true, true) => neg(width, urem(width, neg(width, a), neg(width, b))),
    }
}

pub fn shl(width: u32, a: u64, b: u64) -> u64 {
    if b >= width as u64 {
        0
    } else {
        (a << b) & mask(width)
    }
}

pub fn lshr(width: u32, a: u64, b: u64) -> u64 {
    if b >= width as u64 {
        0
    } else {
        a >> b
    }
}

pub fn ashr(width: u32, a: u64, b: u64) -> u64 {
    let fill = if msb(a, width) { mask(width) } else { 0 };
    if b >= width as u64 {
        fill
    } else {
        ((sign_extend(a, width) as i64) >> b) as u64 & mask(width)
    }
}

pub fn ult(a: u64, b: u64) -> bool {
    a < b
}

pub fn ule(a: u64, b: u64) -> bool {
    a <= b
}

pub fn slt(width: u32, a: u64, b: u64) -> bool {
    (sign_extend(a, width) as i64) < (sign_extend(b, width) as i64)
}

pub fn sle(width: u32, a: u64, b: u64) -> bool {
    (sign_extend(a, width) as i64) <= (sign_extend(b, width) as i64)
}

pub fn zero_extend(to_width: u32, a: u64) -> u64 {
    a & mask(to_width)
}

pub fn sign_extend_to(from_width: u32, to_width: u32, a: u64) -> u64 {
    sign_extend(a, from_width) & mask(to_width)
}

pub fn extract(hi: u32, lo: u32, a: u64) -> u64 {
    (a >> lo) & mask(hi - lo + 1)
}
