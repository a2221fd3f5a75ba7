//! The inverse-pair sets behind large ternary coefficients: construction,
//! cardinality and min/max statistics with their proven envelopes, coefficient
//! certificates, and the density estimate for primes q that break the
//! classical (p+1)/2 barrier.
//!
//! For an odd prime p, the minus set collects residues β ∈ [1,(p−3)/2] with
//! p ≤ β + 2β̄ + 1 and β > β̄; the plus set those with β + β̄ ≥ p and β̄ ≤ 2β.
//! Each member β certifies coefficients ±(p − β) in some Φ_pqr with
//! q ≡ β (mod p), which is what the certificate search exploits.

use crate::cyclotomic::{class_bounds, cyclotomic_coeffs, ternary_coeff_at_least};
use crate::error::{Error, Result};
use crate::numtheory::{is_prime, primes_in, InverseTable, PrimeRange};
use crate::par;
use crate::rat::{rat, rat_from_f64_exact, rint, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// One inverse pair (β, β̄) together with which inequality system admitted it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeiterPoint {
    pub beta: u64,
    pub betabar: u64,
    pub side: Side,
}

/// Both sets for one prime, each sorted by β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeiterSets {
    pub p: u64,
    pub minus: Vec<BeiterPoint>,
    pub plus: Vec<BeiterPoint>,
}

impl BeiterSets {
    pub fn count_minus(&self) -> usize {
        self.minus.len()
    }

    pub fn count_plus(&self) -> usize {
        self.plus.len()
    }

    pub fn count_union(&self) -> usize {
        // The sides are provably disjoint, so the union is a plain sum.
        self.minus.len() + self.plus.len()
    }

    /// β values of both sides merged, ascending.
    pub fn union_betas(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .minus
            .iter()
            .chain(self.plus.iter())
            .map(|pt| pt.beta)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn min_beta(&self) -> Option<u64> {
        self.union_betas().first().copied()
    }

    pub fn max_beta(&self) -> Option<u64> {
        self.union_betas().last().copied()
    }

    /// All points, minus side first, each side sorted by β.
    pub fn iter(&self) -> impl Iterator<Item = &BeiterPoint> {
        self.minus.iter().chain(self.plus.iter())
    }
}

/// Exact enumeration by a single β scan against the inverse table; O(p).
pub fn beiter_sets(p: u64) -> BeiterSets {
    assert!(p >= 3 && is_prime(p), "need an odd prime, got {p}");
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    if p >= 5 {
        let inv = InverseTable::new(p);
        for beta in 1..=(p - 3) / 2 {
            let bar = inv.inv(beta);
            if p <= beta + 2 * bar + 1 && beta > bar {
                minus.push(BeiterPoint {
                    beta,
                    betabar: bar,
                    side: Side::Minus,
                });
            } else if beta + bar >= p && bar <= 2 * beta {
                plus.push(BeiterPoint {
                    beta,
                    betabar: bar,
                    side: Side::Plus,
                });
            }
        }
    }
    BeiterSets { p, minus, plus }
}

// ---------------------------------------------------------------------------
// cardinalities vs the p/48, p/24, p/16 law
// ---------------------------------------------------------------------------

/// One |count − center| ≤ C·p^{3/4}·log p comparison, kept exact: the
/// binary64 bound is interpreted as the dyadic rational it is.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityCheck {
    pub center: Rat,
    pub residual: Rat,
    pub bound: f64,
    /// bound − residual, exact; positive means the inequality holds with room.
    pub margin: Rat,
    pub ok: bool,
}

fn cardinality_side(count: u64, center: Rat, bound: f64) -> CardinalityCheck {
    let residual = {
        let d = rint(count as i128) - center;
        if d < rint(0) {
            -d
        } else {
            d
        }
    };
    let margin = rat_from_f64_exact(bound) - residual;
    CardinalityCheck {
        center,
        residual,
        bound,
        ok: margin >= rint(0),
        margin,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityReport {
    pub p: u64,
    pub count_minus: u64,
    pub count_plus: u64,
    pub count_union: u64,
    pub minus: CardinalityCheck,
    pub plus: CardinalityCheck,
    pub union: CardinalityCheck,
}

impl CardinalityReport {
    pub fn all_ok(&self) -> bool {
        self.minus.ok && self.plus.ok && self.union.ok
    }
}

/// Counts against |#B₋ − p/48|, |#B₊ − p/24|, |#B − p/16| with constants
/// 12, 12, 24 (natural log).
pub fn cardinality_check(p: u64) -> CardinalityReport {
    let sets = beiter_sets(p);
    let (cm, cp) = (sets.count_minus() as u64, sets.count_plus() as u64);
    let envelope = (p as f64).powf(0.75) * (p as f64).ln();
    CardinalityReport {
        p,
        count_minus: cm,
        count_plus: cp,
        count_union: cm + cp,
        minus: cardinality_side(cm, rat(p as i128, 48), 12.0 * envelope),
        plus: cardinality_side(cp, rat(p as i128, 24), 12.0 * envelope),
        union: cardinality_side(cm + cp, rat(p as i128, 16), 24.0 * envelope),
    }
}

// ---------------------------------------------------------------------------
// min/max capture statistics
// ---------------------------------------------------------------------------

/// Extremal β per side and over the union, as exact rationals.  An empty set
/// contributes its sentinel — p/3 for a min, p/2 for a max — and the union
/// statistics use the sentinel only when the *union* is empty (taking
/// min/max over sentinels instead would misreport the one-sided-empty case:
/// at p = 13 the union minimum is 5, not the 13/3 an empty minus side would
/// inject).
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureStats {
    pub p: u64,
    /// m₋(p)
    pub min_minus: Rat,
    /// m₊(p)
    pub min_plus: Rat,
    /// m±(p), over the union
    pub min_union: Rat,
    /// M₋(p)
    pub max_minus: Rat,
    /// M₊(p)
    pub max_plus: Rat,
    /// M±(p), over the union
    pub max_union: Rat,
}

pub fn capture_stats(p: u64) -> CaptureStats {
    let sets = beiter_sets(p);
    capture_stats_of(&sets)
}

pub fn capture_stats_of(sets: &BeiterSets) -> CaptureStats {
    let p = sets.p;
    let min_sentinel = rat(p as i128, 3);
    let max_sentinel = rat(p as i128, 2);
    let side = |pts: &[BeiterPoint]| -> (Rat, Rat) {
        match (pts.first(), pts.last()) {
            (Some(a), Some(b)) => (rint(a.beta as i128), rint(b.beta as i128)),
            _ => (min_sentinel, max_sentinel),
        }
    };
    let (min_minus, max_minus) = side(&sets.minus);
    let (min_plus, max_plus) = side(&sets.plus);
    let (min_union, max_union) = match (sets.min_beta(), sets.max_beta()) {
        (Some(lo), Some(hi)) => (rint(lo as i128), rint(hi as i128)),
        _ => (min_sentinel, max_sentinel),
    };
    CaptureStats {
        p,
        min_minus,
        min_plus,
        min_union,
        max_minus,
        max_plus,
        max_union,
    }
}

/// The capture-statistics envelope: five two-sided inequalities (hard), the
/// exact (p−3)/2 clauses for p ≥ 11, and four empirical margins reported as
/// soft flags (they are observations at scale, not theorems).
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureBoundsReport {
    pub p: u64,
    pub stats: CaptureStats,
    /// p/3 ≤ m₋ ≤ p/3 + 4.25 p^{3/4} log p
    pub min_minus_ok: bool,
    /// p/3 ≤ m₊ ≤ p/3 + 3 p^{3/4} log p
    pub min_plus_ok: bool,
    /// p/3 ≤ m± ≤ p/3 + 3 p^{3/4} log p
    pub min_union_ok: bool,
    /// p/2 − 3 √p log²p ≤ M₊ ≤ p/2
    pub max_plus_ok: bool,
    /// p/2 − 6 √p log²p ≤ M₋ ≤ p/2
    pub max_minus_ok: bool,
    /// p ≥ 11: M₊ = (p−3)/2 when p ≡ 1 (mod 3), M₋ = (p−3)/2 when p ≡ 2.
    pub exact_mod3: Option<bool>,
    /// p ≥ 11: M± = (p−3)/2.
    pub exact_union_max: Option<bool>,
    /// m₋ ≤ p/3 + 6√p (observed far beyond this range)
    pub soft_min_minus: bool,
    /// m₊ ≤ p/3 + 4√p
    pub soft_min_plus: bool,
    /// M₋ ≥ p/2 − 4 log p
    pub soft_max_minus: bool,
    /// M₊ ≥ p/2 − 2 log p
    pub soft_max_plus: bool,
}

impl CaptureBoundsReport {
    pub fn all_hard(&self) -> bool {
        self.min_minus_ok
            && self.min_plus_ok
            && self.min_union_ok
            && self.max_plus_ok
            && self.max_minus_ok
            && self.exact_mod3.unwrap_or(true)
            && self.exact_union_max.unwrap_or(true)
    }

    pub fn all_soft(&self) -> bool {
        self.soft_min_minus && self.soft_min_plus && self.soft_max_minus && self.soft_max_plus
    }
}

pub fn verify_capture_bounds(p: u64) -> CaptureBoundsReport {
    let stats = capture_stats(p);
    let pf = p as f64;
    let third = rat(p as i128, 3);
    let half = rat(p as i128, 2);
    let quarter_pow = pf.powf(0.75) * pf.ln();
    let sqrt_log2 = pf.sqrt() * pf.ln() * pf.ln();

    let min_ok = |m: &Rat, c: f64| -> bool {
        &third <= m && *m <= third + rat_from_f64_exact(c * quarter_pow)
    };
    let max_ok =
        |m: &Rat, c: f64| -> bool { half - rat_from_f64_exact(c * sqrt_log2) <= *m && *m <= half };

    let exact_val = rint(((p - 3) / 2) as i128);
    let (exact_mod3, exact_union_max) = if p >= 11 {
        let mod3 = match p % 3 {
            1 => stats.max_plus == exact_val,
            2 => stats.max_minus == exact_val,
            _ => unreachable!("p is an odd prime > 3"),
        };
        (Some(mod3), Some(stats.max_union == exact_val))
    } else {
        (None, None)
    };

    CaptureBoundsReport {
        p,
        min_minus_ok: min_ok(&stats.min_minus, 4.25),
        min_plus_ok: min_ok(&stats.min_plus, 3.0),
        min_union_ok: min_ok(&stats.min_union, 3.0),
        max_plus_ok: max_ok(&stats.max_plus, 3.0),
        max_minus_ok: max_ok(&stats.max_minus, 6.0),
        exact_mod3,
        exact_union_max,
        soft_min_minus: stats.min_minus <= third + rat_from_f64_exact(6.0 * pf.sqrt()),
        soft_min_plus: stats.min_plus <= third + rat_from_f64_exact(4.0 * pf.sqrt()),
        soft_max_minus: stats.max_minus >= half - rat_from_f64_exact(4.0 * pf.ln()),
        soft_max_plus: stats.max_plus >= half - rat_from_f64_exact(2.0 * pf.ln()),
        stats,
    }
}

// ---------------------------------------------------------------------------
// the coefficient lower bound and its certificates
// ---------------------------------------------------------------------------

/// p − min B(p), the guaranteed ternary coefficient magnitude for p ≥ 11;
/// always exceeds (p+1)/2.
pub fn beiter_lower_bound(p: u64) -> Result<u64> {
    let sets = beiter_sets(p);
    let min = sets.min_beta().ok_or(Error::EmptyBeiterSet { p })?;
    let value = p - min;
    // min B(p) ≤ (p−3)/2 forces value ≥ (p+3)/2.
    assert!(2 * value > p + 1);
    Ok(value)
}

/// A concrete coefficient witness: |a_pqr(n)| ≥ p − β > (p+1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    /// Coefficient index.
    pub n: u64,
    /// a_pqr(n).
    pub value: i64,
    /// The class q mod p that produced the certificate.
    pub beta: u64,
}

impl Certificate {
    /// Recompute a_pqr(n) through the full coefficient pipeline and compare.
    pub fn recheck(&self) -> Result<bool> {
        let seq = cyclotomic_coeffs(self.p * self.q * self.r)?;
        Ok(seq.coeff(self.n as usize) == self.value)
    }
}

/// A completed search with nothing found.  Says nothing about larger limits:
/// the q-threshold beyond which every class member certifies is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotFoundReport {
    pub p: u64,
    pub q_limit: u64,
    pub r_limit: u64,
    /// β classes that were searched (empty for p < 11).
    pub betas: Vec<u64>,
    /// (q, r) pairs that survived the height-bound filter and were scanned.
    pub pairs_scanned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Certificate),
    NotFound(NotFoundReport),
}

/// Hunt for a coefficient of magnitude ≥ p − β.  Classes β ∈ B(p) are tried
/// in increasing order (the minimal β first — other classes may certify
/// sooner since per-class thresholds are unknown); within a class, primes
/// q ≡ β (mod p) ascend to q_limit and primes r ∈ (q, r_limit] ascend, with
/// r classes whose height bound cannot reach the target skipped outright.
/// The first hit in (β, q, r, n) order wins, independent of worker count.
pub fn find_counterexample(p: u64, q_limit: u64, r_limit: u64) -> Result<SearchOutcome> {
    assert!(p >= 3 && is_prime(p), "need an odd prime, got {p}");
    let sets = beiter_sets(p);
    let betas = sets.union_betas();
    let mut pairs_scanned = 0u64;

    for &beta in &betas {
        let target = p - beta;
        let qs = primes_in(&PrimeRange::new(p, q_limit, p, beta))?;
        for &q in &qs {
            let bounds = class_bounds(p, q);
            let rs: Vec<u64> = primes_in(&PrimeRange::interval(q, r_limit))?
                .into_iter()
                .filter(|&r| bounds[(r % p) as usize] >= target)
                .collect();
            pairs_scanned += rs.len() as u64;
            let hit = par::find_first_with_scratch(&rs, 32, Vec::new, |scratch, &r| {
                match ternary_coeff_at_least(p, q, r, target, scratch) {
                    Ok(Some((n, value))) => Some(Ok((r, n, value))),
                    Ok(None) => None,
                    Err(e) => Some(Err(e)),
                }
            });
            if let Some(hit) = hit {
                let (r, n, value) = hit?;
                return Ok(SearchOutcome::Found(Certificate {
                    p,
                    q,
                    r,
                    n,
                    value,
                    beta,
                }));
            }
        }
    }

    Ok(SearchOutcome::NotFound(NotFoundReport {
        p,
        q_limit,
        r_limit,
        betas,
        pairs_scanned,
    }))
}

// ---------------------------------------------------------------------------
// density of breaking q
// ---------------------------------------------------------------------------

/// Outcome for one prime q: did some r ≤ r_limit push A(pqr) past (p+1)/2?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaQ {
    pub q: u64,
    pub exceeded: bool,
    /// First r that did it (0 when none).
    pub witness_r: u64,
    pub witness_n: u64,
    pub witness_value: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub p: u64,
    pub q_max: u64,
    pub r_limit: u64,
    pub per_q: Vec<DeltaQ>,
    pub hits: usize,
    pub total: usize,
    /// hits / total — a brute lower estimate of the density.
    pub empirical: Rat,
    /// #B(p) / (p−1), the provable floor.
    pub rigorous: Rat,
}

/// Fraction of primes q ∈ (p, q_max] whose brute M(p;q) scan to r_limit
/// exceeds (p+1)/2, next to the rigorous floor #B(p)/(p−1).
pub fn delta_lower_estimate(p: u64, q_max: u64, r_limit: u64) -> Result<DeltaReport> {
    assert!(p >= 3 && is_prime(p), "need an odd prime, got {p}");
    let sets = beiter_sets(p);
    let qs = primes_in(&PrimeRange::interval(p, q_max))?;
    // A(pqr) > (p+1)/2 for integers means |a| ≥ (p+3)/2.
    let threshold = (p + 3) / 2;

    let rows: Result<Vec<DeltaQ>> = par::map_with_scratch(
        &qs,
        || (Vec::new(), Vec::new()),
        |(scratch, rs), &q| -> Result<DeltaQ> {
            let bounds = class_bounds(p, q);
            rs.clear();
            rs.extend(
                primes_in(&PrimeRange::interval(q, r_limit))?
                    .into_iter()
                    .filter(|&r| bounds[(r % p) as usize] >= threshold),
            );
            for &r in rs.iter() {
                if let Some((n, value)) = ternary_coeff_at_least(p, q, r, threshold, scratch)? {
                    return Ok(DeltaQ {
                        q,
                        exceeded: true,
                        witness_r: r,
                        witness_n: n,
                        witness_value: value,
                    });
                }
            }
            Ok(DeltaQ {
                q,
                exceeded: false,
                witness_r: 0,
                witness_n: 0,
                witness_value: 0,
            })
        },
    )
    .into_iter()
    .collect();
    let per_q = rows?;

    let hits = per_q.iter().filter(|row| row.exceeded).count();
    let total = per_q.len();
    Ok(DeltaReport {
        p,
        q_max,
        r_limit,
        hits,
        total,
        empirical: if total == 0 {
            rint(0)
        } else {
            rat(hits as i128, total as i128)
        },
        rigorous: rat(sets.count_union() as i128, (p - 1) as i128),
        per_q,
    })
}
