//! Exact rational scalar used by the capture statistics and all lattice
//! geometry.  `i128` numerators leave orders of magnitude of headroom over
//! the cross products that point-in-triangle tests form at the prime sizes
//! this crate sweeps (p well beyond 10^9 would still be safe).

use num_rational::Ratio;
use num_traits::ToPrimitive;

pub type Rat = Ratio<i128>;

/// Integer as a rational.
pub fn rint(v: impl Into<i128>) -> Rat {
    Ratio::from_integer(v.into())
}

/// `n / d` as an exact rational.
pub fn rat(n: impl Into<i128>, d: impl Into<i128>) -> Rat {
    Ratio::new(n.into(), d.into())
}

/// Rational to binary64, for comparisons against transcendental bounds
/// (which are only ever known in binary64 anyway).
pub fn rat_to_f64(x: Rat) -> f64 {
    x.to_f64()
        .unwrap_or_else(|| *x.numer() as f64 / *x.denom() as f64)
}

/// The *exact* rational value of a finite binary64 — every finite f64 is a
/// dyadic rational.  Used where a float-valued bound must be compared
/// against an exact area without a rounding story.
///
/// i128 holds dyadics with (reduced) exponents up to ±126, which covers the
/// bound magnitudes this crate compares (roughly 10⁻²² .. 10²²); anything
/// outside that panics rather than approximating.
pub fn rat_from_f64_exact(x: f64) -> Rat {
    assert!(x.is_finite(), "only finite values have a rational value");
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mut mant, mut e2) = if exp == 0 {
        (frac, -1074i64) // subnormal
    } else {
        (frac + (1i128 << 52), exp - 1075)
    };
    if mant == 0 {
        return Ratio::from_integer(0);
    }
    let tz = mant.trailing_zeros() as i64;
    mant >>= tz;
    e2 += tz;
    assert!(
        (-126..=(126 - 53)).contains(&e2),
        "{x:e} is a dyadic rational outside the i128-backed range"
    );
    let mant = sign * mant;
    if e2 >= 0 {
        Ratio::from_integer(mant << e2)
    } else {
        Ratio::new(mant, 1i128 << (-e2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trips_exactly() {
        for &x in &[
            0.5,
            -3.25,
            1.0 / 3.0,
            987654321.123,
            1e-6,
            1e13,
            2f64.powi(-70),
        ] {
            assert_eq!(rat_to_f64(rat_from_f64_exact(x)), x);
        }
    }

    #[test]
    #[should_panic(expected = "outside the i128-backed range")]
    fn f64_outside_dyadic_range_panics() {
        rat_from_f64_exact(1e-300);
    }

    #[test]
    fn exact_dyadic_values() {
        assert_eq!(rat_from_f64_exact(0.75), rat(3, 4));
        assert_eq!(rat_from_f64_exact(-2.0), rint(-2));
        assert_eq!(rat_from_f64_exact(0.0), rint(0));
    }
}
