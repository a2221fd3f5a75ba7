//! Elementary number-theoretic kernels: deterministic primality testing,
//! modular inverses (single and batched), and prime enumeration in
//! arithmetic progressions.
//!
//! Everything downstream leans on two workhorses:
//!
//! * [`InverseTable`] — all inverses mod p in one O(p) pass via the classic
//!   recurrence `inv[i] = -(p/i) * inv[p mod i] (mod p)`, so scans over
//!   (x, x̄) pairs never pay a per-element gcd.
//! * [`primes_in`] — primes in a half-open interval `(lo, hi]`, optionally
//!   restricted to a residue class.  Progressions are walked candidate by
//!   candidate under Miller–Rabin; the unrestricted case is sieved.

use crate::error::{Error, Result};
use num_integer::Integer;

/// Small primes used both to fast-path [`is_prime`] and as wheel for the
/// segmented sieve.
const SMALL_PRIMES: [u64; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

/// Miller–Rabin witnesses proven deterministic for every n < 3.3 * 10^24,
/// which covers the whole u64 range.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for any u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // n > 61^2 has no factor among SMALL_PRIMES at this point only if it is
    // worth the full test.
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of `x` mod the odd prime `p`, in `[1, p-1]`.
///
/// Errors with [`Error::ZeroResidue`] when `p | x`; the zero residue is the
/// one element of Z/p without an inverse.
pub fn mod_inverse(x: u64, p: u64) -> Result<u64> {
    debug_assert!(is_prime(p), "mod_inverse requires a prime modulus, got {p}");
    let a = x % p;
    if a == 0 {
        return Err(Error::ZeroResidue { x, p });
    }
    // Extended Euclid on (p, a); p prime and a nonzero force gcd 1.
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    Ok(t0.rem_euclid(p as i128) as u64)
}

/// All inverses modulo one odd prime, built in O(p).
///
/// Index 0 holds the sentinel 0 (the zero residue has no inverse); index i
/// holds i^{-1} mod p for 1 <= i < p.
#[derive(Debug, Clone)]
pub struct InverseTable {
    p: u64,
    inv: Vec<u32>,
}

impl InverseTable {
    pub fn new(p: u64) -> Self {
        assert!(
            (3..1 << 31).contains(&p) && is_prime(p),
            "InverseTable requires an odd prime 3 <= p < 2^31, got {p}"
        );
        let n = p as usize;
        let mut inv = vec![0u32; n];
        inv[1] = 1;
        for i in 2..n {
            // p = (p/i)*i + (p mod i)  =>  inv[i] = -(p/i) * inv[p mod i]
            let q = p / i as u64;
            let r = (p % i as u64) as usize;
            inv[i] = ((p - q * inv[r] as u64 % p) % p) as u32;
        }
        InverseTable { p, inv }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// x^{-1} mod p for x not divisible by p.
    #[inline]
    pub fn inv(&self, x: u64) -> u64 {
        let r = (x % self.p) as usize;
        debug_assert!(r != 0, "the zero residue has no inverse");
        self.inv[r] as u64
    }

    /// Raw table (index 0 is the sentinel 0).
    pub fn as_slice(&self) -> &[u32] {
        &self.inv
    }
}

/// A half-open prime search domain: primes q with `lo < q <= hi` and,
/// when `modulus > 1`, `q ≡ residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
    pub modulus: u64,
    pub residue: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64, modulus: u64, residue: u64) -> Self {
        assert!(modulus >= 1, "modulus must be >= 1");
        assert!(residue < modulus, "residue must lie in [0, modulus)");
        assert!(lo >= 2, "lo must be >= 2");
        PrimeRange {
            lo,
            hi,
            modulus,
            residue,
        }
    }

    /// Unrestricted primes in `(lo, hi]`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        Self::new(lo, hi, 1, 0)
    }
}

/// Ascending primes in the range.
///
/// With `gcd(residue, modulus) > 1` every member of the class shares that
/// factor, so no prime can appear — unless the residue itself is that prime,
/// in which case it is the class's one possible member.  Anything else is
/// reported as [`Error::NonCoprimeResidue`].
pub fn primes_in(range: &PrimeRange) -> Result<Vec<u64>> {
    let PrimeRange {
        lo,
        hi,
        modulus,
        residue,
    } = *range;
    assert!(
        modulus >= 1 && residue < modulus && lo >= 2,
        "malformed PrimeRange"
    );
    if hi <= lo {
        return Ok(Vec::new());
    }
    if modulus == 1 {
        return Ok(sieve_interval(lo, hi));
    }
    if residue.gcd(&modulus) > 1 {
        if is_prime(residue) {
            return Ok(if residue > lo && residue <= hi {
                vec![residue]
            } else {
                Vec::new()
            });
        }
        return Err(Error::NonCoprimeResidue { residue, modulus });
    }
    // Walk the progression; density 1/modulus makes trial enumeration with a
    // deterministic primality test the right tool.
    let first = {
        let base = lo + 1;
        base + (residue + modulus - base % modulus) % modulus
    };
    let mut out = Vec::new();
    let mut q = first;
    while q <= hi {
        if is_prime(q) {
            out.push(q);
        }
        q += modulus;
    }
    Ok(out)
}

/// All primes `<= limit`, ascending (simple sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `(lo, hi]` by a segmented sieve over the interval.
fn sieve_interval(lo: u64, hi: u64) -> Vec<u64> {
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let len = (hi - lo) as usize;
    // index i represents the value lo + 1 + i
    let mut composite = vec![false; len];
    for &b in &base {
        let mut m = ((lo / b + 1) * b).max(b * b);
        while m <= hi {
            composite[(m - lo - 1) as usize] = true;
            m += b;
        }
    }
    (0..len)
        .filter(|&i| !composite[i])
        .map(|i| lo + 1 + i as u64)
        .collect()
}
