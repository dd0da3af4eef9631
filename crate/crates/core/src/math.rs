//! Float helpers that compile with or without `std`.
//!
//! With the `std` feature the intrinsic methods are used; without it the
//! same operations come from `libm`.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("csb-ewma-core requires either the `std` or the `libm` feature");

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ln()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::log(x)
    }
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ln_1p()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::log1p(x)
    }
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

/// `base^exp` by binary exponentiation. Used for the decay powers
/// `(1 - lambda)^t`, where `exp` can reach the run-length cap.
pub(crate) fn powi_u64(base: f64, mut exp: u64) -> f64 {
    let mut acc = 1.0f64;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}
