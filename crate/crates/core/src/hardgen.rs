//! Hard instances for dictionary look-up with `k` mismatches.
//!
//! Strings of length `d` are cut into `k` blocks of length `b = d / k`.
//!
//! * *Query strings* (the set `Q`) have `k/2` blocks with one set bit and
//!   `k/2` blocks with two set bits.
//! * *Base strings* have exactly one set bit in every block. A dictionary is
//!   obtained from them by Bernoulli selection followed by pruning of close
//!   pairs.
//!
//! Everything that counts is evaluated with arbitrary precision integers and
//! rationals; `f64` only shows up in `alpha` and in display helpers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::strings::{Symbol, SymbolString};

/// Enumerations larger than this are refused unless a larger limit is
/// passed explicitly.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardgenError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("string does not have the required block shape: {0}")]
    Shape(String),
    #[error("enumeration of {count} strings exceeds the limit {limit}")]
    TooLarge { count: BigUint, limit: u64 },
}

fn param<T>(msg: impl Into<String>) -> Result<T, HardgenError> {
    Err(HardgenError::Param(msg.into()))
}

/// `k` blocks of length `b = d / k`, with `k` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockParams {
    k: usize,
    d: usize,
}

impl BlockParams {
    pub fn new(k: usize, d: usize) -> Result<Self, HardgenError> {
        if k < 2 || k % 2 != 0 {
            return param(format!("k must be even and at least 2, got {k}"));
        }
        if d % k != 0 {
            return param(format!("k = {k} does not divide d = {d}"));
        }
        if d / k < 2 {
            return param(format!("block length d/k = {} must be at least 2", d / k));
        }
        Ok(BlockParams { k, d })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Block length `d / k`.
    pub fn b(&self) -> usize {
        self.d / self.k
    }
}

/// A binary string of length `d` interpreted block-wise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockString {
    words: Vec<u64>,
    params: BlockParams,
}

impl BlockString {
    pub fn zeros(params: BlockParams) -> Self {
        BlockString {
            words: vec![0; params.d.div_ceil(64)],
            params,
        }
    }

    pub fn from_bits(params: BlockParams, bits: &[bool]) -> Result<Self, HardgenError> {
        if bits.len() != params.d {
            return Err(HardgenError::Shape(format!(
                "expected {} bits, got {}",
                params.d,
                bits.len()
            )));
        }
        let mut s = BlockString::zeros(params);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i);
            }
        }
        Ok(s)
    }

    pub fn from_symbols(params: BlockParams, x: &[Symbol]) -> Result<Self, HardgenError> {
        let bits = x
            .iter()
            .map(|s| match s {
                Symbol::Zero => Ok(false),
                Symbol::One => Ok(true),
                other => Err(HardgenError::Shape(format!("non-binary symbol {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        BlockString::from_bits(params, &bits)
    }

    pub fn params(&self) -> BlockParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.params.d
    }

    pub fn is_empty(&self) -> bool {
        self.params.d == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Element-wise sum modulo 2.
    pub fn xor(&self, other: &BlockString) -> BlockString {
        BlockString {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            params: self.params,
        }
    }

    /// Number of positions set in `self` but not in `other`.
    pub fn count_and_not(&self, other: &BlockString) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn count_and(&self, other: &BlockString) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn hamming(&self, other: &BlockString) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn block_popcounts(&self) -> Vec<usize> {
        let b = self.params.b();
        (0..self.params.k)
            .map(|blk| (blk * b..(blk + 1) * b).filter(|&i| self.get(i)).count())
            .collect()
    }

    pub fn is_query_shape(&self) -> bool {
        let counts = self.block_popcounts();
        let ones = counts.iter().filter(|&&c| c == 1).count();
        let twos = counts.iter().filter(|&&c| c == 2).count();
        ones == self.params.k / 2 && twos == self.params.k / 2
    }

    pub fn is_base_shape(&self) -> bool {
        self.block_popcounts().iter().all(|&c| c == 1)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.params.d).map(|i| self.get(i))
    }

    pub fn to_symbol_string(&self) -> SymbolString {
        SymbolString::from_bits(self.bits())
    }
}

/// Lexicographic on the bit sequence, `0 < 1`.
impl Ord for BlockString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits().cmp(other.bits())
    }
}

impl PartialOrd for BlockString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BlockString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, k)` for signed arguments; zero outside `0 <= k <= n`.
fn binomial_i(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as usize, k as usize)
    }
}

fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

fn to_rational(x: BigUint) -> BigRational {
    BigRational::from_integer(x.into())
}

fn check_limit(count: BigUint, limit: u64) -> Result<(), HardgenError> {
    if count > BigUint::from(limit) {
        Err(HardgenError::TooLarge { count, limit })
    } else {
        Ok(())
    }
}

/// Number of distinct query strings: `C(k, k/2) b^{k/2} C(b, 2)^{k/2}`.
pub fn count_queries_distinct(p: BlockParams) -> BigUint {
    let h = p.k / 2;
    binomial(p.k, h) * pow(p.b(), h) * num_traits::pow(binomial(p.b(), 2), h)
}

/// The size formula `C(k, k/2) (d/k)^k (d/k - 1)^{k/2}`.
///
/// It counts generation sequences (pick the double blocks, one bit per
/// block, then one extra bit per double block), so every distinct string is
/// produced `2^{k/2}` times.
pub fn count_queries_formula(p: BlockParams) -> BigUint {
    binomial(p.k, p.k / 2) * pow(p.b(), p.k) * pow(p.b() - 1, p.k / 2)
}

pub fn count_base_strings(p: BlockParams) -> BigUint {
    pow(p.b(), p.k)
}

pub fn enumerate_queries(p: BlockParams) -> Result<Vec<BlockString>, HardgenError> {
    enumerate_queries_limited(p, DEFAULT_ENUMERATION_LIMIT)
}

/// All query strings, sorted lexicographically.
pub fn enumerate_queries_limited(
    p: BlockParams,
    limit: u64,
) -> Result<Vec<BlockString>, HardgenError> {
    check_limit(count_queries_distinct(p), limit)?;
    let b = p.b();
    let mut block_choices: Vec<Vec<usize>> = vec![Vec::new(), Vec::new(), Vec::new()];
    for i in 0..b {
        block_choices[1].push(1 << i);
        for j in i + 1..b {
            block_choices[2].push((1 << i) | (1 << j));
        }
    }
    let mut out = Vec::new();
    let mut pattern = vec![0u64; p.k];
    fill_blocks(
        p,
        0,
        p.k / 2,
        p.k / 2,
        &block_choices,
        &mut pattern,
        &mut out,
    );
    out.sort();
    Ok(out)
}

fn fill_blocks(
    p: BlockParams,
    blk: usize,
    ones_left: usize,
    twos_left: usize,
    choices: &[Vec<usize>],
    pattern: &mut [u64],
    out: &mut Vec<BlockString>,
) {
    if blk == p.k {
        out.push(from_block_masks(p, pattern));
        return;
    }
    for (weight, left) in [(1usize, ones_left), (2, twos_left)] {
        if left == 0 {
            continue;
        }
        for &mask in &choices[weight] {
            pattern[blk] = mask as u64;
            let (o, t) = if weight == 1 {
                (ones_left - 1, twos_left)
            } else {
                (ones_left, twos_left - 1)
            };
            fill_blocks(p, blk + 1, o, t, choices, pattern, out);
        }
    }
}

/// Builds a string from per-block masks; bit `i` of a mask is position `i`
/// inside the block.
fn from_block_masks(p: BlockParams, masks: &[u64]) -> BlockString {
    let b = p.b();
    let mut s = BlockString::zeros(p);
    for (blk, &m) in masks.iter().enumerate() {
        for i in 0..b {
            if m >> i & 1 == 1 {
                s.set(blk * b + i);
            }
        }
    }
    s
}

pub fn enumerate_base_strings(p: BlockParams) -> Result<Vec<BlockString>, HardgenError> {
    enumerate_base_strings_limited(p, DEFAULT_ENUMERATION_LIMIT)
}

/// All `b^k` strings with one set bit per block, sorted lexicographically.
pub fn enumerate_base_strings_limited(
    p: BlockParams,
    limit: u64,
) -> Result<Vec<BlockString>, HardgenError> {
    check_limit(count_base_strings(p), limit)?;
    let b = p.b();
    let total = b.pow(p.k as u32);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; p.k];
    for _ in 0..total {
        let mut s = BlockString::zeros(p);
        for (blk, &pos) in digits.iter().enumerate() {
            s.set(blk * b + pos);
        }
        out.push(s);
        for digit in digits.iter_mut().rev() {
            *digit += 1;
            if *digit < b {
                break;
            }
            *digit = 0;
        }
    }
    out.sort();
    Ok(out)
}

/// `log_{d/k}(log2 n / k)`, all logarithms base 2.
pub fn compute_alpha(n: u128, k: usize, d: usize) -> Result<f64, HardgenError> {
    if n < 2 {
        return param("n must be at least 2");
    }
    if k < 1 {
        return param("k must be at least 1");
    }
    if d <= k {
        return param(format!("base d/k must exceed 1 (d = {d}, k = {k})"));
    }
    let log_n = (n as f64).log2();
    Ok((log_n.log2() - (k as f64).log2()) / ((d as f64).log2() - (k as f64).log2()))
}

/// `max(0, floor(k (1/4 - alpha)))`, capped at `k - 1`.
pub fn prune_radius_for(k: usize, alpha: f64) -> usize {
    let x = k as f64 * (0.25 - alpha);
    // guard against values such as 0.9999999999 for an exact integer
    let r = (x + 1e-9).floor();
    if r <= 0.0 {
        0
    } else {
        (r as usize).min(k.saturating_sub(1))
    }
}

/// `1 / sum_{i=0}^{radius} C(d, i)`.
pub fn compute_select_prob(
    _k: usize,
    d: usize,
    radius: usize,
) -> Result<BigRational, HardgenError> {
    if radius > d {
        return param(format!("radius {radius} exceeds d = {d}"));
    }
    let ball: BigUint = (0..=radius).map(|i| binomial(d, i)).sum();
    Ok(BigRational::new(1.into(), ball.into()))
}

/// Parameters of the randomized dictionary construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryConfig {
    pub params: BlockParams,
    /// Probability of keeping a base string in the first filtering step.
    pub select_prob: Ratio<u64>,
    /// Pairs at Hamming distance `<= prune_radius` are both deleted.
    pub prune_radius: usize,
    pub seed: u64,
}

impl DictionaryConfig {
    /// Derives the prune radius from `alpha` and the selection probability
    /// from that radius. `n` is the total dictionary length used for `alpha`.
    pub fn from_alpha(params: BlockParams, n: u128, seed: u64) -> Result<Self, HardgenError> {
        let alpha = compute_alpha(n, params.k, params.d)?;
        let prune_radius = prune_radius_for(params.k, alpha);
        let p = compute_select_prob(params.k, params.d, prune_radius)?;
        let select_prob = match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(a), Some(b)) => Ratio::new(a, b),
            _ => return param("selection probability does not fit in 64-bit rational"),
        };
        Ok(DictionaryConfig {
            params,
            select_prob,
            prune_radius,
            seed,
        })
    }

    pub fn validate(&self) -> Result<(), HardgenError> {
        let p = self.select_prob;
        if *p.numer() == 0 || p.numer() > p.denom() {
            return param(format!("selection probability {p} must be in (0, 1]"));
        }
        if self.prune_radius > self.params.d {
            return param(format!(
                "prune radius {} exceeds d = {}",
                self.prune_radius, self.params.d
            ));
        }
        Ok(())
    }
}

/// Bernoulli draw for the base string at `index`: the ChaCha8 stream
/// `index` under key `seed` draws `u` uniform in `[0, den)`, and the string
/// is kept when `u < num`.
pub fn bernoulli_keep(seed: u64, index: u64, prob: Ratio<u64>) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.gen_range(0..*prob.denom()) < *prob.numer()
}

pub fn generate_dictionary(cfg: &DictionaryConfig) -> Result<Vec<BlockString>, HardgenError> {
    generate_dictionary_limited(cfg, DEFAULT_ENUMERATION_LIMIT)
}

/// Selection then pruning. Base strings are indexed in lexicographic order;
/// the output is sorted the same way.
pub fn generate_dictionary_limited(
    cfg: &DictionaryConfig,
    limit: u64,
) -> Result<Vec<BlockString>, HardgenError> {
    cfg.validate()?;
    let base = enumerate_base_strings_limited(cfg.params, limit)?;
    let selected: Vec<BlockString> = base
        .into_iter()
        .enumerate()
        .filter(|(i, _)| bernoulli_keep(cfg.seed, *i as u64, cfg.select_prob))
        .map(|(_, s)| s)
        .collect();
    let mut doomed = vec![false; selected.len()];
    for i in 0..selected.len() {
        for j in i + 1..selected.len() {
            if selected[i].hamming(&selected[j]) <= cfg.prune_radius {
                doomed[i] = true;
                doomed[j] = true;
            }
        }
    }
    Ok(selected
        .into_iter()
        .zip(doomed)
        .filter(|(_, d)| !d)
        .map(|(s, _)| s)
        .collect())
}

/// A Hamming ball; the regions of the stabbing instance are balls of
/// radius `k` around dictionary strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HammingBall {
    pub center: BlockString,
    pub radius: usize,
}

impl HammingBall {
    pub fn new(center: BlockString, radius: usize) -> Result<Self, HardgenError> {
        if radius > center.len() {
            return param(format!("radius {radius} exceeds d = {}", center.len()));
        }
        Ok(HammingBall { center, radius })
    }

    pub fn contains(&self, x: &BlockString) -> bool {
        self.center.hamming(x) <= self.radius
    }
}

fn require_query(p: &BlockString) -> Result<(), HardgenError> {
    if p.is_query_shape() {
        Ok(())
    } else {
        Err(HardgenError::Shape(format!("{p} is not a query string")))
    }
}

fn require_base(s: &BlockString) -> Result<(), HardgenError> {
    if s.is_base_shape() {
        Ok(())
    } else {
        Err(HardgenError::Shape(format!("{s} is not a base string")))
    }
}

/// Number of base strings at Hamming distance exactly `delta` from the
/// query string `query`.
///
/// Splitting the blocks of a base string `S` by how they meet `query`:
/// `x-` single blocks with a different bit, `y-` double blocks missing the
/// bit of `S`, and `y+ = k/2 - y-` double blocks containing it. Then
/// `delta = 2 x- + 2 y- + k/2`, and each `(x-, y-)` contributes
/// `C(k/2, x-) C(k/2, y-) (b-1)^{x-} (b-2)^{y-} 2^{y+}`.
pub fn count_within_ball_closed_form(
    query: &BlockString,
    delta: usize,
) -> Result<BigUint, HardgenError> {
    require_query(query)?;
    let p = query.params();
    let half = p.k / 2;
    let b = p.b();
    if delta < half || (delta - half) % 2 != 0 {
        return Ok(BigUint::zero());
    }
    let excess = (delta - half) / 2;
    let mut total = BigUint::zero();
    for x_minus in 0..=excess.min(half) {
        let y_minus = excess - x_minus;
        if y_minus > half {
            continue;
        }
        let y_plus = half - y_minus;
        total += binomial(half, x_minus)
            * binomial(half, y_minus)
            * pow(b - 1, x_minus)
            * pow(b - 2, y_minus)
            * pow(2, y_plus);
    }
    Ok(total)
}

/// Base strings within distance `radius` of `center`, by enumeration.
pub fn count_within_ball_brute(center: &BlockString, radius: usize) -> Result<u64, HardgenError> {
    count_within_ball_brute_limited(center, radius, DEFAULT_ENUMERATION_LIMIT)
}

pub fn count_within_ball_brute_limited(
    center: &BlockString,
    radius: usize,
    limit: u64,
) -> Result<u64, HardgenError> {
    let base = enumerate_base_strings_limited(center.params(), limit)?;
    Ok(base.iter().filter(|s| s.hamming(center) <= radius).count() as u64)
}

/// Query strings within distance `radius` of both `s1` and `s2`.
pub fn intersection_count_brute(
    s1: &BlockString,
    s2: &BlockString,
    radius: usize,
) -> Result<u64, HardgenError> {
    let profile = intersection_profile(s1, s2, radius, &enumerate_queries(s1.params())?)?;
    Ok(profile.values().sum())
}

/// Counts of query strings in both balls, keyed by `(delta1, delta2)`, the
/// distances to `s1` and `s2`.
pub fn intersection_profile(
    s1: &BlockString,
    s2: &BlockString,
    radius: usize,
    queries: &[BlockString],
) -> Result<BTreeMap<(usize, usize), u64>, HardgenError> {
    require_base(s1)?;
    require_base(s2)?;
    let mut out = BTreeMap::new();
    for q in queries {
        let (d1, d2) = (q.hamming(s1), q.hamming(s2));
        if d1 <= radius && d2 <= radius {
            *out.entry((d1, d2)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// The three structural facts about `P xor S1` for a query string `query`
/// and base strings `s1`, `s2` with `hamming(s1, s2) = 2z`:
///
/// 1. `P xor S1` has `delta1` set bits;
/// 2. exactly `z + (delta1 - delta2)/2` set bits of `S1 xor S2` are also set
///    in `P xor S1`;
/// 3. exactly `delta1/2 - k/4` positions are set in `S1` but not in `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorStructure {
    pub popcount_matches: bool,
    pub shared_bits_match: bool,
    pub s1_only_matches: bool,
}

impl XorStructure {
    pub fn all(&self) -> bool {
        self.popcount_matches && self.shared_bits_match && self.s1_only_matches
    }
}

pub fn xor_structure(
    query: &BlockString,
    s1: &BlockString,
    s2: &BlockString,
) -> Result<XorStructure, HardgenError> {
    require_query(query)?;
    require_base(s1)?;
    require_base(s2)?;
    let k = query.params().k as i64;
    let d1 = query.hamming(s1) as i64;
    let d2 = query.hamming(s2) as i64;
    let two_z = s1.hamming(s2) as i64;
    let ps1 = query.xor(s1);
    let s1s2 = s1.xor(s2);
    Ok(XorStructure {
        popcount_matches: ps1.popcount() as i64 == d1,
        shared_bits_match: 2 * ps1.count_and(&s1s2) as i64 == two_z + (d1 - d2),
        s1_only_matches: 4 * s1.count_and_not(query) as i64 == 2 * d1 - k,
    })
}

/// One summand `A_w B_w C_w D_w` of the intersection bound, or zero when an
/// exponent or binomial argument is invalid (negative or fractional).
fn intersection_term(z: i64, delta1: i64, delta2: i64, w: i64, p: BlockParams) -> BigUint {
    let k = p.k as i64;
    // (delta1 - delta2)/2, delta1/2 - k/4 and delta2/2 + k/4 must be integers
    if (delta1 - delta2) % 2 != 0 || (2 * delta1 - k) % 4 != 0 || (2 * delta2 + k) % 4 != 0 {
        return BigUint::zero();
    }
    let a = binomial_i(2 * z, z + (delta1 - delta2) / 2);
    let b = binomial_i(k, (2 * delta1 - k) / 4 - w);
    let c = binomial_i(k, k / 2);
    let exp = (2 * delta2 + k) / 4 - (z - w);
    if exp < 0 {
        return BigUint::zero();
    }
    a * b * c * pow(p.b(), exp as usize)
}

/// Upper bound on the number of query strings at distance `delta1` from
/// `S1` and `delta2` from `S2`, where `hamming(S1, S2) = 2z`:
///
/// `sum_{w=0}^{min(z + (delta1-delta2)/2, delta1/2 - k/4)} A_w B_w C_w D_w`
/// with `A_w = C(2z, z + (delta1-delta2)/2)`, `B_w = C(k, delta1/2 - k/4 - w)`,
/// `C_w = C(k, k/2)` and `D_w = (d/k)^{delta2/2 + k/4 - (z - w)}`.
pub fn intersection_upper_bound(
    z: usize,
    delta1: usize,
    delta2: usize,
    p: BlockParams,
) -> Result<BigUint, HardgenError> {
    if delta1 > p.k || delta2 > p.k {
        return param(format!(
            "distances ({delta1}, {delta2}) must not exceed k = {}",
            p.k
        ));
    }
    let (z, d1, d2, k) = (z as i64, delta1 as i64, delta2 as i64, p.k as i64);
    if (d1 - d2) % 2 != 0 || (2 * d1 - k) % 4 != 0 {
        return Ok(BigUint::zero());
    }
    let hi = (z + (d1 - d2) / 2).min((2 * d1 - k) / 4);
    Ok((0..=hi).map(|w| intersection_term(z, d1, d2, w, p)).sum())
}

/// The `w` maximizing the summand at `delta1 = delta2 = k`. Ties go to the
/// smallest `w`. Requires `4 | k`.
pub fn argmax_w(z: usize, p: BlockParams) -> Result<usize, HardgenError> {
    if p.k % 4 != 0 {
        return param(format!("k = {} must be divisible by 4", p.k));
    }
    let k = p.k as i64;
    let hi = z.min(p.k / 4) as i64;
    let mut best = (BigUint::zero(), 0usize);
    for w in 0..=hi {
        let t = intersection_term(z as i64, k, k, w, p);
        if w == 0 || t > best.0 {
            best = (t, w as usize);
        }
    }
    Ok(best.1)
}

/// `(d/k) (k/4 - w) / (w + 1 + 3k/4)`: the ratio of consecutive summands
/// at `delta1 = delta2 = k`.
pub fn consecutive_term_ratio(w: usize, p: BlockParams) -> BigRational {
    let k = p.k as i64;
    let w = w as i64;
    BigRational::new(
        (p.b() as i64 * (k - 4 * w)).into(),
        (4 * w + 4 + 3 * k).into(),
    )
}

/// Numeric evaluation of the lower-bound quantities for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// Total dictionary length.
    pub n: u128,
    pub k: usize,
    pub d: usize,
    pub alpha: f64,
    pub prune_radius: usize,
    pub p_alpha: BigRational,
    /// Number of distinct query strings.
    pub queries: BigUint,
    /// `p_alpha 2^{k/4} C(k, k/4) (b-2)^{k/4}`; needs `4 | k`.
    pub t_lower: Option<BigRational>,
    /// `k^2 (k/4) C(k/8, k/16) C(k, 3k/16) C(k, k/2) b^{3k/4}`; needs `16 | k`.
    pub v_upper_times_q: Option<BigRational>,
    /// `t_lower / v_upper = t_lower |Q| / (v_upper |Q|)`.
    pub space_ratio: Option<BigRational>,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: &Option<BigRational>| match x {
            Some(v) => format!("{} (~{:.6e})", v, v.to_f64().unwrap_or(f64::NAN)),
            None => "undefined".to_string(),
        };
        writeln!(f, "n = {}, k = {}, d = {}", self.n, self.k, self.d)?;
        writeln!(f, "alpha = {:.6}", self.alpha)?;
        writeln!(f, "prune radius = {}", self.prune_radius)?;
        writeln!(f, "p_alpha = {}", self.p_alpha)?;
        writeln!(f, "|Q| = {}", self.queries)?;
        writeln!(f, "t_lower = {}", show(&self.t_lower))?;
        writeln!(f, "v_upper*|Q| = {}", show(&self.v_upper_times_q))?;
        write!(f, "t/v = {}", show(&self.space_ratio))
    }
}

pub fn evaluate_bounds(n: u128, p: BlockParams) -> Result<BoundsReport, HardgenError> {
    let alpha = compute_alpha(n, p.k, p.d)?;
    evaluate_bounds_inner(n, p, alpha, prune_radius_for(p.k, alpha))
}

/// Like [`evaluate_bounds`] with an explicit prune radius.
pub fn evaluate_bounds_with_radius(
    n: u128,
    p: BlockParams,
    radius: usize,
) -> Result<BoundsReport, HardgenError> {
    let alpha = compute_alpha(n, p.k, p.d)?;
    evaluate_bounds_inner(n, p, alpha, radius)
}

fn evaluate_bounds_inner(
    n: u128,
    p: BlockParams,
    alpha: f64,
    prune_radius: usize,
) -> Result<BoundsReport, HardgenError> {
    let k = p.k;
    let p_alpha = compute_select_prob(k, p.d, prune_radius)?;
    let queries = count_queries_distinct(p);
    let t_lower = (k % 4 == 0).then(|| {
        &p_alpha * to_rational(pow(2, k / 4) * binomial(k, k / 4) * pow(p.b() - 2, k / 4))
    });
    let v_upper_times_q = (k % 16 == 0).then(|| {
        to_rational(
            pow(k, 2)
                * BigUint::from(k / 4)
                * binomial(k / 8, k / 16)
                * binomial(k, 3 * k / 16)
                * binomial(k, k / 2)
                * pow(p.b(), 3 * k / 4),
        )
    });
    let space_ratio = match (&t_lower, &v_upper_times_q) {
        (Some(t), Some(vq)) => Some(t * to_rational(queries.clone()) / vq),
        _ => None,
    };
    Ok(BoundsReport {
        n,
        k,
        d: p.d,
        alpha,
        prune_radius,
        p_alpha,
        queries,
        t_lower,
        v_upper_times_q,
        space_ratio,
    })
}

/// Checks `(n/k)^k <= C(n, k) <= (n e / k)^k` exactly, using the rational
/// lower bound `2.718281828` for `e` on the right.
pub fn binom_bounds_check(n: usize, k: usize) -> Result<bool, HardgenError> {
    if !(n > k && k > 0) {
        return param(format!("need n > k > 0, got n = {n}, k = {k}"));
    }
    let c = binomial(n, k);
    let kk = pow(k, k);
    let nk = pow(n, k);
    let lower = nk <= &c * &kk;
    let e_num = pow(2_718_281_828, k);
    let e_den = pow(1_000_000_000, k);
    let upper = &c * &kk * e_den <= nk * e_num;
    Ok(lower && upper)
}

/// Reduced rational from a `numerator/denominator` string, an integer
/// or a decimal such as `0.25`.
pub fn parse_probability(text: &str) -> Result<Ratio<u64>, HardgenError> {
    let bad = || HardgenError::Param(format!("cannot parse probability {text:?}"));
    let r = if let Some((a, b)) = text.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else if let Some((int, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(digits);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Ratio::new(int * den + frac, den)
    } else {
        Ratio::from_integer(text.trim().parse().map_err(|_| bad())?)
    };
    let g = r.numer().gcd(r.denom());
    Ok(Ratio::new_raw(r.numer() / g, r.denom() / g))
}
