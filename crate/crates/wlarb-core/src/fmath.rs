//! Minimal float helpers usable without `std`.
//!
//! All wavelengths handled by this crate sit in a narrow band around 1.3e3 nm
//! and every ratio fed to these helpers is far below 2^52, so truncating
//! casts are exact.

pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & 0x7FFF_FFFF_FFFF_FFFF)
}

pub(crate) fn floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

pub(crate) fn ceil(x: f64) -> f64 {
    -floor(-x)
}

/// Euclidean remainder of `x` by `m > 0`, in `[0, m)`.
pub(crate) fn rem_euclid(x: f64, m: f64) -> f64 {
    let mut r = x - floor(x / m) * m;
    if r < 0.0 {
        r += m;
    }
    if r >= m {
        r -= m;
    }
    r
}
