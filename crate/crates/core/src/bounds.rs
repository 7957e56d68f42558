//! Size-bound calculators for networks compiled from CPWL functions, plus
//! the prior-work comparators used to put them side by side.
//!
//! All values are exact big integers. Width and hidden-neuron bounds can
//! exceed machine integers for the component-count variants, so
//! [`BoundTriple`] carries `BigUint`s.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Layer, width, and hidden-neuron bounds for one parameter choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTriple {
    pub layers: u64,
    pub max_width: BigUint,
    pub hidden: BigUint,
}

impl BoundTriple {
    /// Component-wise comparison against realized network statistics.
    pub fn admits(&self, stats: &crate::relunet::NetStats) -> bool {
        (stats.depth as u64) <= self.layers
            && BigUint::from(stats.max_width) <= self.max_width
            && BigUint::from(stats.hidden_neurons) <= self.hidden
    }
}

/// `ceil(log2 x)` for `x >= 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if x <= &BigUint::one() {
        0
    } else {
        (x - 1u32).bits()
    }
}

fn ceil_3_halves(k: &BigUint) -> BigUint {
    (3u32 * k + 1u32) / 2u32
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// Bounds over the piece count alone: `l = 2 ceil(log2 q) + 1`,
/// `w = [q>1] ceil(3q/2) q`, and
/// `h = (3 2^cq + 2 cq - 3) q + 3 2^cq - 2 cq - 3` with `cq = ceil(log2 q)`.
/// An affine instance (`q = 1`) costs nothing: `(1, 0, 0)`.
pub fn piece_bounds(q: u64) -> BoundTriple {
    assert!(q >= 1, "piece count must be positive");
    let qb = BigUint::from(q);
    let cq = ceil_log2(&qb);
    let width = if q > 1 {
        ceil_3_halves(&qb) * &qb
    } else {
        BigUint::zero()
    };
    let h = hidden_formula(cq, &qb, cq);
    BoundTriple {
        layers: 2 * cq + 1,
        max_width: width,
        hidden: h,
    }
}

/// Bounds over both the component count `k` and piece count `q`; requires
/// `1 <= k <= q`. Always no worse than [`piece_bounds`] at the same `q`.
pub fn component_piece_bounds(k: &BigUint, q: &BigUint) -> Result<BoundTriple> {
    if k.is_zero() || q.is_zero() {
        return Err(Error::InvalidArgs("k and q must be positive"));
    }
    if k > q {
        return Err(Error::InvalidArgs("k must not exceed q"));
    }
    let ck = ceil_log2(k);
    let cq = ceil_log2(q);
    let width = if k > &BigUint::one() {
        ceil_3_halves(k) * q
    } else {
        BigUint::zero()
    };
    Ok(BoundTriple {
        layers: cq + ck + 1,
        max_width: width,
        hidden: hidden_formula(ck, q, cq),
    })
}

/// [`component_piece_bounds`] over machine integers.
pub fn component_piece_bounds_u64(k: u64, q: u64) -> Result<BoundTriple> {
    component_piece_bounds(&BigUint::from(k), &BigUint::from(q))
}

/// `(3 2^ck + 2 ck - 3) q + 3 2^cq - 2 ck - 3`; nonnegative for all valid
/// inputs, computed through signed integers to keep that obvious.
fn hidden_formula(ck: u64, q: &BigUint, cq: u64) -> BigUint {
    let three = BigInt::from(3);
    let per_piece = &three * BigInt::from(pow2(ck)) + BigInt::from(2 * ck) - &three;
    let total = per_piece * BigInt::from(q.clone()) + &three * BigInt::from(pow2(cq))
        - BigInt::from(2 * ck)
        - &three;
    total.to_biguint().expect("hidden bound is nonnegative")
}

/// `phi(n, k) = min(sum_{i=0..n} C(k(k-1)/2, i), k!)`: an upper bound on
/// the minimal piece count of any CPWL function with `k` distinct
/// components on `R^n`.
pub fn phi(n: u64, k: u64) -> BigUint {
    assert!(n >= 1 && k >= 1, "phi needs n >= 1, k >= 1");
    let pairs = k * (k - 1) / 2;
    let mut cells = BigUint::zero();
    for i in 0..=n.min(pairs) {
        cells += binomial(pairs, i);
    }
    let fact = factorial(k);
    cells.min(fact)
}

/// Bounds over the component count alone: [`component_piece_bounds`] at
/// `q = phi(n, k)`.
pub fn component_bounds(n: u64, k: u64) -> BoundTriple {
    let q = phi(n, k);
    component_piece_bounds(&BigUint::from(k), &q).expect("k <= phi(n, k)")
}

/// Prior neuron-count bound in terms of `n`, `k`, `q`:
/// `n 2^(kq + (n+1)(k-n-1))` when `k >= n+1`, else `n 2^(kq)`.
pub fn prior_bound_he(n: u64, k: u64, q: u64) -> BigUint {
    let mut exponent = k
        .checked_mul(q)
        .expect("exponent fits in u64 at desk scale");
    if k > n {
        exponent += (n + 1) * (k - n - 1);
    }
    BigUint::from(n) << usize::try_from(exponent).expect("exponent fits usize")
}

/// Prior width bound times full layer count:
/// `k^(2n^2 + 3n + 1) (ceil(log2(n+1)) + 1)`.
pub fn prior_bound_hertrich(n: u64, k: u64) -> BigUint {
    let e = 2 * n * n + 3 * n + 1;
    let depth = ceil_log2(&BigUint::from(n + 1)) + 1;
    BigUint::from(k).pow(u32::try_from(e).expect("exponent fits u32")) * depth
}

pub fn factorial(k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=k {
        acc *= i;
    }
    acc
}

/// Exact `C(top, pick)`.
pub fn binomial(top: u64, pick: u64) -> BigUint {
    if pick > top {
        return BigUint::zero();
    }
    let pick = pick.min(top - pick);
    let mut acc = BigUint::one();
    for i in 0..pick {
        acc = acc * (top - i) / (i + 1);
    }
    acc
}

/// Realized cost of the max-min assembly, computed from the piece count and
/// the active-set sizes: layer count, a width upper bound, and the exact
/// hidden-neuron count of the construction.
pub fn assembly_cost(active_sizes: &[u64]) -> (u64, u64, u64) {
    let q = active_sizes.len() as u64;
    let l_of = |m: u64| crate::builders::ceil_log2_u64(m) + 1;
    let w_of = |m: u64| if m > 1 { (3 * m).div_ceil(2) } else { 0 };
    let deepest = active_sizes.iter().map(|&m| l_of(m)).max().unwrap_or(1);
    let layers = l_of(q) + deepest - 1;
    let width_v: u64 = active_sizes.iter().map(|&m| w_of(m).max(2)).sum();
    let width = width_v.max(w_of(q));
    let hidden: u64 = crate::builders::r_sequence(q)
        + active_sizes
            .iter()
            .map(|&m| crate::builders::r_sequence(m) + 2 * (deepest - l_of(m)))
            .sum::<u64>();
    (layers, width, hidden)
}
