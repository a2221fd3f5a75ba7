//! Cyclotomic polynomial coefficients and heights.
//!
//! The engine computes Φ_n exactly via Möbius inclusion–exclusion over the
//! divisors of the squarefree kernel: Φ_N = ∏_{d|N} (x^d − 1)^{μ(N/d)},
//! evaluated on a truncated power-series buffer.  Multiplying by (x^d − 1)
//! and dividing by it are both single strided passes (`f_m ← f_{m−d} − f_m`,
//! descending for a product, ascending for a quotient), so the whole
//! polynomial costs O(2^k · φ(N)) for a kernel with k prime factors.
//!
//! Only the first ⌈(φ+1)/2⌉ coefficients are ever computed; palindromy
//! (a(k) = a(φ−k) for n > 1) supplies the rest.  Ternary kernels pqr get a
//! dedicated path: the partial product
//! (x^p−1)(x^q−1)/((x−1)(x^{pq}−1)) is a ±1 pattern with period pq that can
//! be block-filled directly, leaving three strided passes plus a final
//! negation.  Height scans fuse the max-|coefficient| tracking into the last
//! pass, which is what makes exhaustive (p,q,r) sweeps affordable.
//!
//! All coefficient arithmetic is checked; anything leaving i64 reports
//! [`Error::Overflow`] instead of wrapping.

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, mod_inverse, primes_in, InverseTable, PrimeRange};

/// Prime factorization by trial division, ascending.  Fine for the
/// desk-scale inputs this library targets; not meant for cryptographic sizes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut d = 5u64;
    while d * d <= n {
        for p in [d, d + 2] {
            if n.is_multiple_of(p) {
                let mut e = 0;
                while n.is_multiple_of(p) {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Product of the distinct odd primes dividing n (1 if there are none).
/// Heights only depend on this: A(n) = A(kernel).
pub fn odd_squarefree_kernel(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .iter()
        .filter(|&&(p, _)| p != 2)
        .map(|&(p, _)| p)
        .product()
}

/// Euler's totient via the factorization.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// The full, exact coefficient vector of Φ_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSequence {
    pub n: u64,
    /// Odd squarefree kernel of n.
    pub kernel: u64,
    /// a_n(0) ..= a_n(φ(n)), exact.
    pub coeffs: Vec<i64>,
}

impl CoefficientSequence {
    /// φ(n), the degree of Φ_n.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// a_n(k), treating indices beyond the degree as 0.
    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// sparse series passes
// ---------------------------------------------------------------------------

fn checked_negate(f: &mut [i64]) -> Result<()> {
    for v in f.iter_mut() {
        *v = v.checked_neg().ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// Multiply the truncated series by (x^d − 1), in place.
/// For d ≥ len the x^d part falls off the end and this is a global negation.
fn sparse_mul(f: &mut [i64], d: usize) -> Result<()> {
    let len = f.len();
    if d >= len {
        return checked_negate(f);
    }
    for i in (d..len).rev() {
        f[i] = f[i - d].checked_sub(f[i]).ok_or(Error::Overflow)?;
    }
    checked_negate(&mut f[..d])
}

/// Divide the truncated series by (x^d − 1), in place: g_m = g_{m−d} − f_m,
/// ascending.  Exact as formal power series (the divisor has unit constant
/// term), and again a global negation when d ≥ len.
fn sparse_div(f: &mut [i64], d: usize) -> Result<()> {
    let len = f.len();
    let head = d.min(len);
    checked_negate(&mut f[..head])?;
    for i in head..len {
        f[i] = f[i - d].checked_sub(f[i]).ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// Division pass fused with max-|coefficient| tracking.  The series this is
/// used on still needs one trailing ×(x^{pqr}−1), which at half-buffer length
/// is a pure negation and does not move absolute values, so the running max
/// here is the height and `−g` the true coefficient.
fn div_track_max(f: &mut [i64], d: usize) -> Result<(u64, u64)> {
    let len = f.len();
    let head = d.min(len);
    let mut best = 0u64;
    let mut arg = 0u64;
    for (i, slot) in f.iter_mut().enumerate().take(head) {
        let g = slot.checked_neg().ok_or(Error::Overflow)?;
        *slot = g;
        if g.unsigned_abs() > best {
            best = g.unsigned_abs();
            arg = i as u64;
        }
    }
    for i in head..len {
        let g = f[i - d].checked_sub(f[i]).ok_or(Error::Overflow)?;
        f[i] = g;
        if g.unsigned_abs() > best {
            best = g.unsigned_abs();
            arg = i as u64;
        }
    }
    Ok((best, arg))
}

/// Division pass fused with a first-|coefficient|-≥-threshold scan; bails out
/// at the first hit (the buffer is scratch, a partial pass is fine).
/// Ascending order means the returned index is the smallest qualifying one
/// in the whole polynomial — a mirrored partner of any hit beyond φ/2 sits
/// at or before φ/2 and is seen first.
fn div_find_ge(f: &mut [i64], d: usize, threshold: u64) -> Result<Option<(u64, i64)>> {
    let len = f.len();
    let head = d.min(len);
    for (i, slot) in f.iter_mut().enumerate().take(head) {
        let g = slot.checked_neg().ok_or(Error::Overflow)?;
        *slot = g;
        if g.unsigned_abs() >= threshold {
            return Ok(Some((i as u64, -g)));
        }
    }
    for i in head..len {
        let g = f[i - d].checked_sub(f[i]).ok_or(Error::Overflow)?;
        f[i] = g;
        if g.unsigned_abs() >= threshold {
            return Ok(Some((i as u64, -g)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// kernel series construction
// ---------------------------------------------------------------------------

/// (x^p−1)(x^q−1)/((x−1)(x^{pq}−1)) has period-pq coefficients:
/// +1 on [k·pq, k·pq+p), −1 on [k·pq+q, k·pq+q+p), 0 elsewhere.
fn fill_s2(f: &mut [i64], p: usize, q: usize) {
    f.fill(0);
    let len = f.len();
    let period = p * q;
    let mut start = 0usize;
    while start < len {
        let hi = (start + p).min(len);
        f[start..hi].fill(1);
        let neg_lo = start + q;
        if neg_lo < len {
            let neg_hi = (neg_lo + p).min(len);
            f[neg_lo..neg_hi].fill(-1);
        }
        start += period;
    }
}

fn ternary_half_len(p: u64, q: u64, r: u64) -> usize {
    ((p - 1) * (q - 1) * (r - 1) / 2 + 1) as usize
}

/// Everything of the ternary pipeline except the last division and the final
/// negation: buffer sized to φ(pqr)/2 + 1, S2 block-filled, ×(x^r−1),
/// ÷(x^{pr}−1).
fn ternary_prefix_into(p: u64, q: u64, r: u64, buf: &mut Vec<i64>) -> Result<()> {
    debug_assert!(
        p < q && q < r && p >= 3 && is_prime(p) && is_prime(q) && is_prime(r),
        "ternary kernel needs odd primes p < q < r"
    );
    let half = ternary_half_len(p, q, r);
    buf.clear();
    buf.resize(half, 0);
    fill_s2(buf, p as usize, q as usize);
    sparse_mul(buf, r as usize)?;
    sparse_div(buf, (p * r) as usize)
}

/// Half-series of Φ_pqr for odd primes p < q < r, written into `buf`.
fn ternary_series_into(p: u64, q: u64, r: u64, buf: &mut Vec<i64>) -> Result<()> {
    ternary_prefix_into(p, q, r, buf)?;
    sparse_div(buf, (q * r) as usize)?;
    // ×(x^{pqr} − 1); pqr is far beyond the half buffer, so: negate.
    checked_negate(buf)
}

/// A(pqr) and its smallest attaining index, reusing `scratch` across calls.
/// This is the workhorse for triple sweeps: one block fill, three strided
/// passes, no second scan.
pub fn ternary_height_with(p: u64, q: u64, r: u64, scratch: &mut Vec<i64>) -> Result<(u64, u64)> {
    ternary_prefix_into(p, q, r, scratch)?;
    div_track_max(scratch, (q * r) as usize)
}

/// First index n with |a_pqr(n)| ≥ threshold, with the coefficient value,
/// or None.  Early-exits mid-pass on a hit.
pub fn ternary_coeff_at_least(
    p: u64,
    q: u64,
    r: u64,
    threshold: u64,
    scratch: &mut Vec<i64>,
) -> Result<Option<(u64, i64)>> {
    ternary_prefix_into(p, q, r, scratch)?;
    div_find_ge(scratch, (q * r) as usize, threshold)
}

/// Exponent-signed divisor list for ∏ (x^d − 1)^{μ(N/d)}, built by the
/// substitution recursion Φ_{mp}(x) = Φ_m(x^p)/Φ_m(x) and executed in
/// (largest-prime-stage, d) order so intermediates stay (inverse) cyclotomic
/// series of the prime-prefix products — empirically tame, and checked
/// arithmetic guards the rest.
fn generic_series_into(primes: &[u64], buf: &mut Vec<i64>) -> Result<()> {
    let phi: u64 = primes.iter().map(|&p| p - 1).product();
    let half = (phi / 2 + 1) as usize;
    buf.clear();
    buf.resize(half, 0);
    buf[0] = 1;

    let mut ops: Vec<(u64, bool)> = vec![(1, true)]; // (d, is_mul)
    for &p in primes {
        let mut next = Vec::with_capacity(ops.len() * 2);
        for &(d, mul) in &ops {
            next.push((d * p, mul));
            next.push((d, !mul));
        }
        ops = next;
    }
    let stage = |d: u64| {
        primes
            .iter()
            .rposition(|&p| d.is_multiple_of(p))
            .map_or(0, |i| i + 1)
    };
    ops.sort_by_key(|&(d, _)| (stage(d), d));

    for (d, mul) in ops {
        if mul {
            sparse_mul(buf, d as usize)?;
        } else {
            sparse_div(buf, d as usize)?;
        }
    }
    Ok(())
}

/// Half-series of Φ_N for an odd squarefree kernel N = ∏ primes (ascending,
/// len ≥ 1), dispatching ternary kernels to the fast path.
fn kernel_half_series_into(primes: &[u64], buf: &mut Vec<i64>) -> Result<()> {
    if primes.len() == 3 {
        ternary_series_into(primes[0], primes[1], primes[2], buf)
    } else {
        generic_series_into(primes, buf)
    }
}

// ---------------------------------------------------------------------------
// full coefficient sequences
// ---------------------------------------------------------------------------

/// Exact coefficients of Φ_n for n > 1.  Kernels with more than three odd
/// primes are refused here; use [`cyclotomic_coeffs_unbounded`] to opt into
/// the slower, larger cases.
pub fn cyclotomic_coeffs(n: u64) -> Result<CoefficientSequence> {
    coeffs_impl(n, false)
}

/// Like [`cyclotomic_coeffs`] but without the three-odd-prime cap.  Heights
/// and buffer sizes grow quickly with the number of kernel primes; the
/// caller owns the memory judgment.
pub fn cyclotomic_coeffs_unbounded(n: u64) -> Result<CoefficientSequence> {
    coeffs_impl(n, true)
}

fn coeffs_impl(n: u64, allow_large_kernel: bool) -> Result<CoefficientSequence> {
    assert!(n > 1, "Φ_n coefficients start at n = 2");
    let factors = factorize(n);
    let odd: Vec<u64> = factors
        .iter()
        .map(|&(p, _)| p)
        .filter(|&p| p != 2)
        .collect();

    if odd.is_empty() {
        // n = 2^a: Φ = x^{2^{a−1}} + 1.
        let half_deg = (n / 2) as usize;
        let mut coeffs = vec![0i64; half_deg + 1];
        coeffs[0] = 1;
        coeffs[half_deg] = 1;
        return Ok(CoefficientSequence {
            n,
            kernel: 1,
            coeffs,
        });
    }
    if odd.len() > 3 && !allow_large_kernel {
        return Err(Error::KernelTooLarge {
            n,
            factors: odd.len(),
        });
    }

    let kernel: u64 = odd.iter().product();
    let phi_kernel: u64 = odd.iter().map(|&p| p - 1).product();

    let mut half = Vec::new();
    kernel_half_series_into(&odd, &mut half)?;

    // Mirror to the full palindromic vector of Φ_kernel.
    let deg = phi_kernel as usize;
    let mut coeffs = vec![0i64; deg + 1];
    for (k, &v) in half.iter().enumerate() {
        coeffs[k] = v;
        coeffs[deg - k] = v;
    }

    // Φ_{2N}(x) = Φ_N(−x) for odd N ≥ 3.
    let even = n.is_multiple_of(2);
    if even {
        for (k, v) in coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }

    // Φ_n(x) = Φ_rad(n)(x^{n/rad(n)}).
    let rad = kernel * if even { 2 } else { 1 };
    let stretch = (n / rad) as usize;
    if stretch > 1 {
        let mut stretched = vec![0i64; deg * stretch + 1];
        for (k, &v) in coeffs.iter().enumerate() {
            stretched[k * stretch] = v;
        }
        coeffs = stretched;
    }

    Ok(CoefficientSequence { n, kernel, coeffs })
}

// ---------------------------------------------------------------------------
// the two-prime closed form
// ---------------------------------------------------------------------------

/// The unique non-negative pair with 1 + pq = ρp + σq; ρ is the inverse of p
/// mod q and σ the inverse of q mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryDecomposition {
    pub p: u64,
    pub q: u64,
    pub rho: u64,
    pub sigma: u64,
}

pub fn binary_decomposition(p: u64, q: u64) -> BinaryDecomposition {
    assert!(
        p < q && p >= 3 && is_prime(p) && is_prime(q),
        "need odd primes p < q"
    );
    let rho = mod_inverse(p, q).expect("p is invertible mod q");
    let sigma = mod_inverse(q, p).expect("q is invertible mod p");
    // ρp + σq ≡ 1 mod both primes and lies in (0, 2pq), hence equals 1 + pq.
    debug_assert_eq!(rho * p + sigma * q, 1 + p * q);
    BinaryDecomposition { p, q, rho, sigma }
}

/// a_pq(m) in O(log) time: with α₁ ∈ [0,q) solving α₁p ≡ m (mod q) and
/// β₁ ∈ [0,p) solving β₁q ≡ m (mod p), the coefficient is +1 when
/// m = α₁p + β₁q with α₁ < ρ, β₁ < σ; −1 when m = α₁p + β₁q − pq with
/// α₁ ≥ ρ, β₁ ≥ σ; otherwise 0.
pub fn binary_coefficient(p: u64, q: u64, m: u64) -> i64 {
    assert!(m < p * q, "index m must lie in [0, pq)");
    // ρ and σ double as the inverses needed to solve for α₁ and β₁.
    let BinaryDecomposition { rho, sigma, .. } = binary_decomposition(p, q);
    let alpha1 = ((m % q) as u128 * rho as u128 % q as u128) as u64;
    let beta1 = ((m % p) as u128 * sigma as u128 % p as u128) as u64;
    let s = alpha1 * p + beta1 * q;
    if s == m {
        if alpha1 < rho && beta1 < sigma {
            1
        } else {
            0
        }
    } else {
        debug_assert_eq!(s, m + p * q);
        if alpha1 >= rho && beta1 >= sigma {
            -1
        } else {
            0
        }
    }
}

// ---------------------------------------------------------------------------
// heights
// ---------------------------------------------------------------------------

/// A(n) together with where it is first attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeightRecord {
    pub n: u64,
    /// Odd squarefree kernel; A(n) = A(kernel).
    pub kernel: u64,
    /// The height A(n) = max |a_n(k)|.
    pub a: u64,
    /// Smallest k with |a_n(k)| = A(n).
    pub argmax_k: u64,
}

/// Height of Φ_n (n > 1), computed on the kernel half-series only.
pub fn height(n: u64) -> Result<HeightRecord> {
    height_impl(n, false)
}

/// Height without the three-odd-prime kernel cap.
pub fn height_unbounded(n: u64) -> Result<HeightRecord> {
    height_impl(n, true)
}

fn height_impl(n: u64, allow_large_kernel: bool) -> Result<HeightRecord> {
    assert!(n > 1, "heights start at n = 2");
    let odd: Vec<u64> = factorize(n)
        .iter()
        .map(|&(p, _)| p)
        .filter(|&p| p != 2)
        .collect();
    if odd.is_empty() {
        // Φ_{2^a} = x^{2^{a−1}} + 1.
        return Ok(HeightRecord {
            n,
            kernel: 1,
            a: 1,
            argmax_k: 0,
        });
    }
    if odd.len() > 3 && !allow_large_kernel {
        return Err(Error::KernelTooLarge {
            n,
            factors: odd.len(),
        });
    }
    let kernel: u64 = odd.iter().product();

    let (a, arg_kernel) = if odd.len() == 3 {
        let mut scratch = Vec::new();
        ternary_height_with(odd[0], odd[1], odd[2], &mut scratch)?
    } else {
        let mut half = Vec::new();
        kernel_half_series_into(&odd, &mut half)?;
        let mut best = 0u64;
        let mut arg = 0u64;
        for (k, &v) in half.iter().enumerate() {
            if v.unsigned_abs() > best {
                best = v.unsigned_abs();
                arg = k as u64;
            }
        }
        (best, arg)
    };

    // Sign flips (even n) keep indices; a stretch by s maps index k to k·s.
    let rad = kernel * if n.is_multiple_of(2) { 2 } else { 1 };
    Ok(HeightRecord {
        n,
        kernel,
        a,
        argmax_k: arg_kernel * (n / rad),
    })
}

// ---------------------------------------------------------------------------
// the ternary height bound
// ---------------------------------------------------------------------------

/// Data behind the inverse-based ternary bound
/// A(pqr) ≤ min(2a + b, p − b) < 3p/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TernaryBoundData {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub qbar: u64,
    pub rbar: u64,
    pub a: u64,
    pub b: u64,
    pub bound: u64,
}

pub fn bzdega_bound(p: u64, q: u64, r: u64) -> TernaryBoundData {
    assert!(
        p < q && q < r && p >= 3 && is_prime(p) && is_prime(q) && is_prime(r),
        "need odd primes p < q < r"
    );
    let qbar = mod_inverse(q, p).expect("q invertible mod p");
    let rbar = mod_inverse(r, p).expect("r invertible mod p");
    TernaryBoundData {
        p,
        q,
        r,
        qbar,
        rbar,
        a: bound_a(p, qbar, rbar),
        b: bound_b(p, qbar, rbar),
        bound: bound_from_inverses(p, qbar, rbar),
    }
}

fn bound_a(p: u64, qbar: u64, rbar: u64) -> u64 {
    qbar.min(rbar).min(p - qbar).min(p - rbar)
}

fn bound_b(p: u64, qbar: u64, rbar: u64) -> u64 {
    qbar.min(p - qbar).max(rbar.min(p - rbar))
}

fn bound_from_inverses(p: u64, qbar: u64, rbar: u64) -> u64 {
    let a = bound_a(p, qbar, rbar);
    let b = bound_b(p, qbar, rbar);
    (2 * a + b).min(p - b)
}

/// Bound as a function of r's residue class mod p alone (q fixed):
/// entry t holds the bound for any r ≡ t (mod p); entry 0 is unused.
/// This is what makes skip-filters in triple sweeps cheap.
pub(crate) fn class_bounds(p: u64, q: u64) -> Vec<u64> {
    let inv = InverseTable::new(p);
    let qbar = mod_inverse(q, p).expect("q invertible mod p");
    let mut out = vec![0u64; p as usize];
    for t in 1..p {
        out[t as usize] = bound_from_inverses(p, qbar, inv.inv(t));
    }
    out
}

// ---------------------------------------------------------------------------
// M(p;q)
// ---------------------------------------------------------------------------

/// How to run the finite M(p;q) procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpqMode {
    /// One prime representative r > q per invertible residue class mod pq
    /// (heights are class-invariant; `paranoid` double-samples each class to
    /// re-validate that, erroring on any mismatch).  `cap` bounds the
    /// candidates tried per class before giving up.
    ResidueClasses { paranoid: bool, cap: u64 },
    /// Maximum over all primes r ∈ (q, r_limit] — a lower bound only.
    Brute { r_limit: u64 },
}

impl MpqMode {
    pub fn residue_classes(paranoid: bool) -> Self {
        MpqMode::ResidueClasses {
            paranoid,
            cap: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpqReport {
    pub p: u64,
    pub q: u64,
    /// max A(pqr) over the searched r (exact in residue-class mode).
    pub value: u64,
    pub witness_r: u64,
    /// witness_r mod pq.
    pub witness_class: u64,
    /// true for brute mode: the search cannot certify a maximum.
    pub lower_bound_only: bool,
    /// heights actually evaluated.
    pub evaluated: u64,
    /// classes or candidates discarded by the height bound.
    pub skipped: u64,
}

pub fn m_pq(p: u64, q: u64, mode: MpqMode) -> Result<MpqReport> {
    assert!(
        p < q && p >= 3 && is_prime(p) && is_prime(q),
        "need odd primes p < q"
    );
    match mode {
        MpqMode::ResidueClasses { paranoid, cap } => m_pq_classes(p, q, paranoid, cap),
        MpqMode::Brute { r_limit } => m_pq_brute(p, q, r_limit),
    }
}

/// Smallest prime ≡ s (mod modulus) strictly above `above`, trying at most
/// `cap` candidates.
fn class_representative(modulus: u64, s: u64, above: u64, cap: u64) -> Result<u64> {
    let base = above + 1;
    let mut r = base + (s + modulus - base % modulus) % modulus;
    let mut tried = 0u64;
    while tried < cap {
        if is_prime(r) {
            return Ok(r);
        }
        r += modulus;
        tried += 1;
    }
    Err(Error::RepresentativeNotFound {
        residue: s,
        modulus,
        tried,
    })
}

fn m_pq_classes(p: u64, q: u64, paranoid: bool, cap: u64) -> Result<MpqReport> {
    let pq = p * q;
    let bounds = class_bounds(p, q);
    let mut scratch = Vec::new();
    let mut best = 0u64;
    let mut witness_r = 0u64;
    let mut witness_class = 0u64;
    let mut evaluated = 0u64;
    let mut skipped = 0u64;

    for s in 1..pq {
        if s % p == 0 || s % q == 0 {
            continue;
        }
        if bounds[(s % p) as usize] <= best {
            // No r in this class can beat the running max.
            skipped += 1;
            continue;
        }
        let r1 = class_representative(pq, s, q, cap)?;
        let (a1, _) = ternary_height_with(p, q, r1, &mut scratch)?;
        evaluated += 1;
        if paranoid {
            let r2 = class_representative(pq, s, r1, cap)?;
            let (a2, _) = ternary_height_with(p, q, r2, &mut scratch)?;
            evaluated += 1;
            if a1 != a2 {
                return Err(Error::InvarianceViolation {
                    p,
                    q,
                    class: s,
                    r1,
                    a1: a1 as i64,
                    r2,
                    a2: a2 as i64,
                });
            }
        }
        if a1 > best {
            best = a1;
            witness_r = r1;
            witness_class = s;
        }
    }

    Ok(MpqReport {
        p,
        q,
        value: best,
        witness_r,
        witness_class,
        lower_bound_only: false,
        evaluated,
        skipped,
    })
}

fn m_pq_brute(p: u64, q: u64, r_limit: u64) -> Result<MpqReport> {
    let bounds = class_bounds(p, q);
    let ceiling = *bounds.iter().max().unwrap();
    let candidates = primes_in(&PrimeRange::interval(q, r_limit))?;
    let mut scratch = Vec::new();
    let mut best = 0u64;
    let mut witness_r = 0u64;
    let mut evaluated = 0u64;
    let mut skipped = 0u64;

    for &r in &candidates {
        if bounds[(r % p) as usize] <= best {
            skipped += 1;
            continue;
        }
        let (a, _) = ternary_height_with(p, q, r, &mut scratch)?;
        evaluated += 1;
        if a > best {
            best = a;
            witness_r = r;
        }
        if best == ceiling {
            // The class bound is attained; no r anywhere can exceed it.
            skipped += candidates.len() as u64 - evaluated - skipped;
            break;
        }
    }

    Ok(MpqReport {
        p,
        q,
        value: best,
        witness_r,
        witness_class: if witness_r == 0 {
            0
        } else {
            witness_r % (p * q)
        },
        lower_bound_only: true,
        evaluated,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_and_phi() {
        assert_eq!(odd_squarefree_kernel(90), 15);
        assert_eq!(odd_squarefree_kernel(105), 105);
        assert_eq!(odd_squarefree_kernel(2), 1);
        assert_eq!(odd_squarefree_kernel(1), 1);
        assert_eq!(odd_squarefree_kernel(256), 1);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(105), 48);
        assert_eq!(euler_phi(9973), 9972);
    }

    #[test]
    fn prime_case_is_all_ones() {
        let c = cyclotomic_coeffs(7).unwrap();
        assert_eq!(c.coeffs, vec![1; 7]);
        assert_eq!(c.degree(), 6);
        assert_eq!(c.kernel, 7);
    }

    #[test]
    fn phi_15_matches_long_division() {
        // (x^15−1)(x−1)/((x^3−1)(x^5−1)) = 1 − x + x^3 − x^4 + x^5 − x^7 + x^8
        let c = cyclotomic_coeffs(15).unwrap();
        assert_eq!(c.coeffs, vec![1, -1, 0, 1, -1, 1, 0, -1, 1]);
    }

    #[test]
    fn phi_105_height_two() {
        let c = cyclotomic_coeffs(105).unwrap();
        assert_eq!(c.degree(), 48);
        assert_eq!(c.coeff(7), -2);
        assert_eq!(c.coeff(0), 1);
        // palindromy
        for k in 0..=c.degree() {
            assert_eq!(c.coeff(k), c.coeff(c.degree() - k));
        }
        let h = height(105).unwrap();
        assert_eq!((h.a, h.argmax_k, h.kernel), (2, 7, 105));
    }

    #[test]
    fn powers_of_two_and_doubling() {
        assert_eq!(cyclotomic_coeffs(2).unwrap().coeffs, vec![1, 1]);
        assert_eq!(cyclotomic_coeffs(8).unwrap().coeffs, vec![1, 0, 0, 0, 1]);
        // Φ_6 = x^2 − x + 1
        assert_eq!(cyclotomic_coeffs(6).unwrap().coeffs, vec![1, -1, 1]);
        // Φ_210(x) = Φ_105(−x): same height, same argmax index
        let h = height(210).unwrap();
        assert_eq!((h.a, h.argmax_k, h.kernel), (2, 7, 105));
    }

    #[test]
    fn stretch_cases() {
        // Φ_9 = x^6 + x^3 + 1
        assert_eq!(
            cyclotomic_coeffs(9).unwrap().coeffs,
            vec![1, 0, 0, 1, 0, 0, 1]
        );
        // Φ_12 = x^4 − x^2 + 1
        assert_eq!(cyclotomic_coeffs(12).unwrap().coeffs, vec![1, 0, -1, 0, 1]);
        // Φ_50(x) = Φ_25(−x) = x^20 − x^15 + x^10 − x^5 + 1 (kernel 5,
        // doubled, stretched by 5)
        let c = cyclotomic_coeffs(50).unwrap();
        assert_eq!(c.degree(), 20);
        let expect: Vec<i64> = (0..=20)
            .map(|k| {
                if k % 5 != 0 {
                    0
                } else if (k / 5) % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        assert_eq!(c.coeffs, expect);
    }

    #[test]
    fn evaluation_at_one() {
        // Φ_p(1) = p; squarefree with ≥ 2 prime factors gives 1.
        for n in [3u64, 5, 7, 11, 13] {
            let sum: i64 = cyclotomic_coeffs(n).unwrap().coeffs.iter().sum();
            assert_eq!(sum, n as i64);
        }
        for n in [15u64, 21, 33, 35, 105, 165, 195, 1155] {
            let sum: i64 = cyclotomic_coeffs_unbounded(n).unwrap().coeffs.iter().sum();
            assert_eq!(sum, 1, "Φ_{n}(1)");
        }
    }

    #[test]
    fn ternary_path_agrees_with_generic() {
        for (p, q, r) in [
            (3u64, 5, 7),
            (3, 5, 11),
            (3, 7, 13),
            (5, 7, 11),
            (5, 11, 13),
        ] {
            let mut fast = Vec::new();
            ternary_series_into(p, q, r, &mut fast).unwrap();
            let mut slow = Vec::new();
            generic_series_into(&[p, q, r], &mut slow).unwrap();
            assert_eq!(fast, slow, "ternary vs generic at ({p},{q},{r})");
        }
    }

    #[test]
    fn fused_scans_agree_with_full_series() {
        let mut scratch = Vec::new();
        for (p, q, r) in [(3u64, 5, 7), (3, 7, 11), (5, 7, 13), (7, 11, 13)] {
            let mut full = Vec::new();
            ternary_series_into(p, q, r, &mut full).unwrap();
            let mut best = 0u64;
            let mut arg = 0u64;
            for (k, &v) in full.iter().enumerate() {
                if v.unsigned_abs() > best {
                    best = v.unsigned_abs();
                    arg = k as u64;
                }
            }
            assert_eq!(
                ternary_height_with(p, q, r, &mut scratch).unwrap(),
                (best, arg)
            );
            // threshold scan: first index with |a| ≥ best
            let first = full.iter().position(|v| v.unsigned_abs() >= best).unwrap() as u64;
            let hit = ternary_coeff_at_least(p, q, r, best, &mut scratch)
                .unwrap()
                .unwrap();
            assert_eq!(hit.0, first);
            assert_eq!(hit.1, full[first as usize]);
            assert_eq!(
                ternary_coeff_at_least(p, q, r, best + 1, &mut scratch).unwrap(),
                None
            );
        }
    }

    #[test]
    fn four_prime_kernels_need_opt_in() {
        assert_eq!(
            cyclotomic_coeffs(1155),
            Err(Error::KernelTooLarge {
                n: 1155,
                factors: 4
            })
        );
        // A(1155) = 3 is a well-known table value.
        let h = height_unbounded(1155).unwrap();
        assert_eq!(h.a, 3);
        let c = cyclotomic_coeffs_unbounded(1155).unwrap();
        assert_eq!(c.coeffs.iter().map(|v| v.unsigned_abs()).max(), Some(3));
        assert_eq!(c.coeff(h.argmax_k as usize).unsigned_abs(), 3);
    }

    #[test]
    fn binary_decomposition_examples() {
        let d = binary_decomposition(3, 5);
        assert_eq!((d.rho, d.sigma), (2, 2));
        let d = binary_decomposition(3, 7);
        assert_eq!((d.rho, d.sigma), (5, 1));
        for (p, q) in [(3u64, 11), (5, 7), (11, 101), (13, 977)] {
            let d = binary_decomposition(p, q);
            assert_eq!(d.rho * p + d.sigma * q, 1 + p * q);
        }
    }

    #[test]
    fn binary_formula_matches_series() {
        for (p, q) in [(3u64, 5), (3, 7), (5, 7), (5, 11), (7, 11), (11, 13)] {
            let c = cyclotomic_coeffs(p * q).unwrap();
            for m in 0..p * q {
                assert_eq!(
                    binary_coefficient(p, q, m),
                    c.coeff(m as usize),
                    "a_{}({m})",
                    p * q
                );
            }
        }
        assert_eq!(binary_coefficient(3, 5, 0), 1);
        assert_eq!(binary_coefficient(3, 5, 7), -1);
    }

    #[test]
    fn small_heights_are_one() {
        for n in [3u64, 5, 15, 21, 33, 35, 51, 2, 4, 16, 6, 10, 12] {
            assert_eq!(height(n).unwrap().a, 1, "A({n})");
        }
    }

    #[test]
    fn bzdega_examples() {
        let d = bzdega_bound(3, 5, 7);
        assert_eq!((d.qbar, d.rbar, d.a, d.b, d.bound), (2, 1, 1, 1, 2));
        // A ≤ bound and bound < 3p/4 on a spread of triples.
        let mut scratch = Vec::new();
        for (p, q, r) in [
            (3u64, 5, 7),
            (5, 7, 11),
            (7, 11, 13),
            (11, 13, 17),
            (13, 17, 19),
        ] {
            let d = bzdega_bound(p, q, r);
            assert!(4 * d.bound < 3 * p, "bound < 3p/4 at ({p},{q},{r})");
            let (a, _) = ternary_height_with(p, q, r, &mut scratch).unwrap();
            assert!(a <= d.bound, "A({p}·{q}·{r}) = {a} > {}", d.bound);
        }
    }

    #[test]
    fn class_bounds_match_direct() {
        let bounds = class_bounds(11, 37);
        for r in [41u64, 43, 47, 53, 59, 61, 67] {
            let d = bzdega_bound(11, 37, r);
            assert_eq!(bounds[(r % 11) as usize], d.bound);
        }
    }

    #[test]
    fn mpq_three_five() {
        let by_class = m_pq(3, 5, MpqMode::residue_classes(true)).unwrap();
        assert_eq!(by_class.value, 2);
        assert!(!by_class.lower_bound_only);
        let brute = m_pq(3, 5, MpqMode::Brute { r_limit: 100 }).unwrap();
        assert_eq!(brute.value, 2);
        assert!(brute.lower_bound_only);
    }

    #[test]
    #[ignore = "diagnostic probe"]
    fn mpq_probe() {
        let rep = m_pq(11, 37, MpqMode::residue_classes(false)).unwrap();
        println!(
            "residue-classes: M(11;37) = {} witness r={} class={} evaluated={} skipped={}",
            rep.value, rep.witness_r, rep.witness_class, rep.evaluated, rep.skipped
        );
        for limit in [2000u64, 4000, 8000, 16000] {
            let b = m_pq(11, 37, MpqMode::Brute { r_limit: limit }).unwrap();
            println!("brute {limit}: {} witness {}", b.value, b.witness_r);
        }
        // which q ≡ 4 (mod 11) certifies a ±7 coefficient, and at what r?
        let mut scratch = Vec::new();
        for q in primes_in(&PrimeRange::new(11, 550, 11, 4)).unwrap() {
            let bounds = class_bounds(11, q);
            let mut found = None;
            for r in primes_in(&PrimeRange::interval(q, 10_000)).unwrap() {
                if bounds[(r % 11) as usize] < 7 {
                    continue;
                }
                if let Some((n, v)) = ternary_coeff_at_least(11, q, r, 7, &mut scratch).unwrap() {
                    found = Some((r, n, v));
                    break;
                }
            }
            println!("q = {q}: {found:?}");
        }
    }

    #[test]
    fn mpq_eleven_thirtyseven() {
        // 37 ≡ 4 (mod 11) puts it in a coefficient-7 class eventually, but
        // 37 itself sits below the (unknown) threshold: the exhaustive
        // residue-class scan and deep brute runs agree on 6.  The first
        // q ≡ 4 (mod 11) with a ±7 coefficient is 59 (at r = 421).
        let rep = m_pq(11, 37, MpqMode::Brute { r_limit: 2000 }).unwrap();
        assert_eq!(rep.value, 6);
        let by_class = m_pq(11, 37, MpqMode::residue_classes(false)).unwrap();
        assert_eq!(by_class.value, 6);
        // the witness really achieves it
        let mut scratch = Vec::new();
        let (a, _) = ternary_height_with(11, 37, rep.witness_r, &mut scratch).unwrap();
        assert_eq!(a, 6);
        let (a59, _) = ternary_height_with(11, 59, 421, &mut scratch).unwrap();
        assert_eq!(a59, 7);
    }

    #[test]
    fn mpq_seven_stays_at_four() {
        for q in [11u64, 13] {
            let rep = m_pq(7, q, MpqMode::residue_classes(false)).unwrap();
            assert!(rep.value <= 4, "M(7;{q}) = {} > 4", rep.value);
        }
    }

    #[test]
    fn class_representative_examples() {
        assert_eq!(class_representative(15, 7, 5, 100).unwrap(), 7);
        assert_eq!(class_representative(15, 7, 7, 100).unwrap(), 37);
        assert!(matches!(
            class_representative(15, 6, 5, 100),
            Err(Error::RepresentativeNotFound { .. })
        ));
    }

    #[test]
    fn residue_class_height_invariance_spot() {
        // Same class mod pq, both > q: heights agree.
        let mut scratch = Vec::new();
        let (a1, _) = ternary_height_with(3, 5, 7, &mut scratch).unwrap();
        let (a2, _) = ternary_height_with(3, 5, 37, &mut scratch).unwrap();
        let (a3, _) = ternary_height_with(3, 5, 67, &mut scratch).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(a2, a3);
    }
}
