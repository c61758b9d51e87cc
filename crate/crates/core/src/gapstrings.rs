//! Gap strings over `{$, #}` that separate dictionary strings in the
//! reduced text.
//!
//! * Mismatch mode: a length-`2d` string whose prefix and suffix of every
//!   length `i` with `ceil(3d/2) <= i < 2d` are at Hamming distance at
//!   least `floor(d/2) + 1`. Found by search and always certified by
//!   [`verify_gap`].
//! * Edit mode: the fixed string `$^d #^d`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::strings::{hamming_unchecked, Symbol, SymbolString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GapError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("bad gap string shape: {0}")]
    Shape(String),
    #[error("no gap string for d = {d} found by {strategy} within budget {budget}")]
    NotFound {
        d: usize,
        strategy: SearchStrategy,
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapMode {
    Mismatch,
    Edit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStrategy {
    /// Lexicographic scan of `{$,#}^{2d}` with `$ < #`.
    Exhaustive,
    /// Independent uniform candidates from a seeded ChaCha8 stream.
    RandomRetry,
    /// Consecutive seeds of [`kwise_bits`] with independence `2 ceil(log2 d)`.
    KWise,
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStrategy::Exhaustive => "exhaustive",
            SearchStrategy::RandomRetry => "random",
            SearchStrategy::KWise => "kwise",
        })
    }
}

impl std::str::FromStr for SearchStrategy {
    type Err = GapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(SearchStrategy::Exhaustive),
            "random" => Ok(SearchStrategy::RandomRetry),
            "kwise" => Ok(SearchStrategy::KWise),
            other => Err(GapError::Param(format!("unknown strategy {other:?}"))),
        }
    }
}

/// A gap string of length `2d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapString {
    symbols: SymbolString,
    d: usize,
    mode: GapMode,
}

impl GapString {
    /// A mismatch-mode gap, rejected unless it passes [`verify_gap`].
    pub fn mismatch(symbols: SymbolString, d: usize) -> Result<Self, GapError> {
        if !verify_gap(&symbols, d)? {
            return Err(GapError::Shape(format!(
                "{symbols} fails the prefix/suffix distance property for d = {d}"
            )));
        }
        Ok(GapString {
            symbols,
            d,
            mode: GapMode::Mismatch,
        })
    }

    /// A mismatch-mode gap that only has its shape checked. Meant for
    /// negative controls; the reduction is not guaranteed to work with it.
    pub fn unverified(symbols: SymbolString, d: usize) -> Result<Self, GapError> {
        check_shape(&symbols, d)?;
        Ok(GapString {
            symbols,
            d,
            mode: GapMode::Mismatch,
        })
    }

    pub fn symbols(&self) -> &SymbolString {
        &self.symbols
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mode(&self) -> GapMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for GapString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.fmt(f)
    }
}

fn check_shape(g: &[Symbol], d: usize) -> Result<(), GapError> {
    if g.len() != 2 * d {
        return Err(GapError::Shape(format!(
            "length {} is not 2d = {}",
            g.len(),
            2 * d
        )));
    }
    if let Some(bad) = g.iter().find(|s| !s.is_gap()) {
        return Err(GapError::Shape(format!("symbol {bad} is not $ or #")));
    }
    Ok(())
}

/// `$^d #^d`.
pub fn edit_gap(d: usize) -> Result<GapString, GapError> {
    if d < 1 {
        return Err(GapError::Param("d must be at least 1".into()));
    }
    let mut symbols = SymbolString::repeat(Symbol::Dollar, d);
    symbols.extend_from(&SymbolString::repeat(Symbol::Hash, d));
    Ok(GapString {
        symbols,
        d,
        mode: GapMode::Edit,
    })
}

/// The first prefix length `i` at which a gap candidate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapViolation {
    /// Prefix/suffix length.
    pub offset: usize,
    pub distance: usize,
    pub required: usize,
}

impl fmt::Display for GapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i={}: prefix/suffix distance {} < {}",
            self.offset, self.distance, self.required
        )
    }
}

/// Prefix lengths checked for a given `d`: `ceil(3d/2) ..= 2d - 1`.
pub fn checked_offsets(d: usize) -> std::ops::RangeInclusive<usize> {
    (3 * d).div_ceil(2)..=(2 * d).saturating_sub(1)
}

pub fn required_distance(d: usize) -> usize {
    d / 2 + 1
}

pub fn find_gap_violation(g: &[Symbol], d: usize) -> Result<Option<GapViolation>, GapError> {
    check_shape(g, d)?;
    Ok(first_violation(g, d))
}

fn first_violation(g: &[Symbol], d: usize) -> Option<GapViolation> {
    let required = required_distance(d);
    checked_offsets(d).find_map(|i| {
        let distance = hamming_unchecked(&g[..i], &g[2 * d - i..]);
        (distance < required).then_some(GapViolation {
            offset: i,
            distance,
            required,
        })
    })
}

/// True iff every checked prefix/suffix pair is far enough apart.
pub fn verify_gap(g: &[Symbol], d: usize) -> Result<bool, GapError> {
    Ok(find_gap_violation(g, d)?.is_none())
}

/// Irreducible polynomials over GF(2) of degree 1..=16, bit `i` is the
/// coefficient of `x^i`.
const IRREDUCIBLE: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// Arithmetic in GF(2^m).
#[derive(Debug, Clone, Copy)]
struct BinaryField {
    m: u32,
    modulus: u32,
}

impl BinaryField {
    fn with_size_at_least(count: usize) -> Result<Self, GapError> {
        let m = (count.max(2).next_power_of_two().trailing_zeros()).max(1);
        if m as usize >= IRREDUCIBLE.len() {
            return Err(GapError::Param(format!(
                "field for {count} points is too large"
            )));
        }
        Ok(BinaryField {
            m,
            modulus: IRREDUCIBLE[m as usize],
        })
    }

    fn mask(&self) -> u32 {
        (1u32 << self.m) - 1
    }

    fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.m & 1 == 1 {
                a ^= self.modulus;
            }
        }
        acc
    }
}

/// Bit sequence in which any `independence` positions are jointly uniform
/// over the choice of seed.
///
/// Bit `j` is the low bit of `c_0 + c_1 j + ... + c_{t-1} j^{t-1}` evaluated
/// in GF(2^m), the smallest binary field with at least `count` elements.
/// When `t * m <= 64` the coefficients are consecutive `m`-bit fields of the
/// seed, so enumerating seeds `0..2^{tm}` enumerates every polynomial once;
/// otherwise they are drawn from a ChaCha8 stream keyed by the seed.
pub fn kwise_bits(seed: u64, independence: usize, count: usize) -> Result<Vec<bool>, GapError> {
    if independence < 1 || count < 1 {
        return Err(GapError::Param(
            "independence and count must be >= 1".into(),
        ));
    }
    let field = BinaryField::with_size_at_least(count)?;
    let coeffs = kwise_coefficients(seed, independence, field);
    Ok((0..count as u32)
        .map(|x| {
            // Horner
            let v = coeffs
                .iter()
                .rev()
                .fold(0u32, |acc, &c| field.mul(acc, x) ^ c);
            v & 1 == 1
        })
        .collect())
}

fn kwise_coefficients(seed: u64, t: usize, field: BinaryField) -> Vec<u32> {
    let m = field.m as usize;
    if t * m <= 64 {
        (0..t)
            .map(|i| (seed.checked_shr((i * m) as u32).unwrap_or(0) as u32) & field.mask())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..t).map(|_| rng.gen::<u32>() & field.mask()).collect()
    }
}

fn bits_to_gap(bits: impl IntoIterator<Item = bool>) -> SymbolString {
    bits.into_iter()
        .map(|b| if b { Symbol::Hash } else { Symbol::Dollar })
        .collect()
}

/// `2 ceil(log2 d)`, at least 1.
pub fn gap_independence(d: usize) -> usize {
    (2 * d.next_power_of_two().trailing_zeros() as usize).max(1)
}

/// Searches for a mismatch-mode gap string. At most `budget` candidates are
/// examined; the returned string always passes [`verify_gap`].
pub fn mismatch_gap(
    d: usize,
    strategy: SearchStrategy,
    seed: u64,
    budget: u64,
) -> Result<GapString, GapError> {
    if d < 2 {
        return Err(GapError::Param("mismatch gap needs d >= 2".into()));
    }
    let len = 2 * d;
    let not_found = GapError::NotFound {
        d,
        strategy,
        budget,
    };
    let accept = |g: SymbolString| first_violation(&g, d).is_none().then_some(g);
    let found = match strategy {
        SearchStrategy::Exhaustive => {
            if len > 62 {
                return Err(GapError::Param(format!(
                    "exhaustive search over 2^{len} strings is not supported"
                )));
            }
            let space = 1u64 << len;
            (0..space.min(budget))
                .find_map(|v| accept(bits_to_gap((0..len).map(|i| v >> (len - 1 - i) & 1 == 1))))
        }
        SearchStrategy::RandomRetry => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..budget).find_map(|_| accept(bits_to_gap((0..len).map(|_| rng.gen::<bool>()))))
        }
        SearchStrategy::KWise => {
            let t = gap_independence(d);
            let mut found = None;
            for i in 0..budget {
                let bits = kwise_bits(seed.wrapping_add(i), t, len)?;
                if let Some(g) = accept(bits_to_gap(bits)) {
                    found = Some(g);
                    break;
                }
            }
            found
        }
    };
    let symbols = found.ok_or(not_found)?;
    Ok(GapString {
        symbols,
        d,
        mode: GapMode::Mismatch,
    })
}

/// Exhaustive search for `2d <= 24`, otherwise k-wise seed enumeration
/// with a budget of `2^20` seeds.
pub fn default_mismatch_gap(d: usize) -> Result<GapString, GapError> {
    if 2 * d <= 24 {
        mismatch_gap(d, SearchStrategy::Exhaustive, 0, u64::MAX)
    } else {
        mismatch_gap(d, SearchStrategy::KWise, 0, 1 << 20)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn g(s: &str) -> SymbolString {
        s.parse().unwrap()
    }

    #[test]
    fn edit_gap_shape() {
        assert_eq!(edit_gap(2).unwrap().to_string(), "$$##");
        assert_eq!(edit_gap(1).unwrap().to_string(), "$#");
        assert_eq!(edit_gap(4).unwrap().to_string(), "$$$$####");
        assert_eq!(edit_gap(4).unwrap().mode(), GapMode::Edit);
        assert!(edit_gap(0).is_err());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_gap(&g("$#$#"), 2).unwrap());
        assert!(!verify_gap(&g("$$##"), 2).unwrap());
        assert!(verify_gap(&g("$$##$$##"), 4).unwrap());
        assert_eq!(
            find_gap_violation(&g("$$##"), 2).unwrap(),
            Some(GapViolation {
                offset: 3,
                distance: 1,
                required: 2
            })
        );
        assert!(verify_gap(&g("$#$"), 2).is_err());
        assert!(verify_gap(&g("$#0#"), 2).is_err());
    }

    #[test]
    fn offsets_for_odd_d() {
        assert_eq!(checked_offsets(3), 5..=5);
        assert_eq!(checked_offsets(5), 8..=9);
        assert_eq!(required_distance(5), 3);
    }

    /// Independent scan: every string in lexicographic order, first passing one.
    fn first_passing(d: usize) -> Option<String> {
        let mut all: Vec<String> = (0..1u32 << (2 * d))
            .map(|v| {
                (0..2 * d)
                    .map(|i| if v >> i & 1 == 1 { '#' } else { '$' })
                    .collect()
            })
            .collect();
        let key = |s: &String| s.replace('$', "0").replace('#', "1");
        all.sort_by_key(key);
        all.into_iter().find(|s| {
            let x = g(s);
            checked_offsets(d).all(|i| {
                x[..i]
                    .iter()
                    .zip(&x[2 * d - i..])
                    .filter(|(a, b)| a != b)
                    .count()
                    > d / 2
            })
        })
    }

    #[test]
    fn exhaustive_returns_first_lexicographic() {
        let got = mismatch_gap(2, SearchStrategy::Exhaustive, 0, u64::MAX).unwrap();
        assert_eq!(got.to_string(), "$$#$");
        for d in [2, 3, 4, 5, 6] {
            let got = mismatch_gap(d, SearchStrategy::Exhaustive, 0, u64::MAX)
                .map(|g| g.to_string())
                .ok();
            assert_eq!(got, first_passing(d), "d = {d}");
        }
    }

    #[test]
    fn all_strategies_certify() {
        for d in [2usize, 4, 8] {
            for strategy in [
                SearchStrategy::Exhaustive,
                SearchStrategy::RandomRetry,
                SearchStrategy::KWise,
            ] {
                let a = mismatch_gap(d, strategy, 5, 1 << 20).unwrap();
                assert!(verify_gap(a.symbols(), d).unwrap());
                assert_eq!(a, mismatch_gap(d, strategy, 5, 1 << 20).unwrap());
            }
        }
        assert!(default_mismatch_gap(16).is_ok());
    }

    #[test]
    fn zero_budget_is_not_found() {
        assert!(matches!(
            mismatch_gap(2, SearchStrategy::RandomRetry, 1, 0),
            Err(GapError::NotFound { .. })
        ));
        assert!(mismatch_gap(1, SearchStrategy::Exhaustive, 0, 10).is_err());
    }

    #[test]
    fn mismatch_constructor_checks_property() {
        assert!(GapString::mismatch(g("$#$#"), 2).is_ok());
        assert!(GapString::mismatch(g("$$##"), 2).is_err());
        assert!(GapString::unverified(g("$$##"), 2).is_ok());
        assert!(GapString::unverified(g("$$#"), 2).is_err());
    }

    fn irreducible(poly: u32) -> bool {
        let deg = 31 - poly.leading_zeros();
        let rem = |mut a: u32, b: u32| {
            let db = 31 - b.leading_zeros();
            while a != 0 && 31 - a.leading_zeros() >= db {
                a ^= b << (31 - a.leading_zeros() - db);
            }
            a
        };
        (2u32..1 << (deg / 2 + 1))
            .filter(|&f| 31 - f.leading_zeros() <= deg / 2)
            .all(|f| rem(poly, f) != 0)
    }

    #[test]
    fn field_moduli_are_irreducible() {
        for (m, &p) in IRREDUCIBLE.iter().enumerate().skip(1) {
            assert_eq!(31 - p.leading_zeros(), m as u32);
            assert!(irreducible(p), "degree {m}");
        }
    }

    #[test]
    fn field_multiplication_has_inverses() {
        for m in 1..=8u32 {
            let f = BinaryField {
                m,
                modulus: IRREDUCIBLE[m as usize],
            };
            for a in 1..1u32 << m {
                assert!((1..1u32 << m).any(|b| f.mul(a, b) == 1), "m {m} a {a}");
            }
        }
    }

    #[test]
    fn kwise_zero_seed_is_zero() {
        assert!(kwise_bits(0, 3, 8).unwrap().iter().all(|&b| !b));
        assert!(kwise_bits(0, 1, 0).is_err());
    }

    /// Over every seed of the packed range, each tuple of `t` positions sees
    /// every bit pattern equally often.
    fn assert_t_wise_uniform(t: usize, count: usize) {
        let m = BinaryField::with_size_at_least(count).unwrap().m as usize;
        let seeds = 1u64 << (t * m);
        let rows: Vec<Vec<bool>> = (0..seeds)
            .map(|s| kwise_bits(s, t, count).unwrap())
            .collect();
        let mut positions: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..t {
            positions = positions
                .into_iter()
                .flat_map(|p| {
                    let start = p.last().map_or(0, |&x| x + 1);
                    (start..count).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        for pos in positions {
            let mut hist: HashMap<Vec<bool>, u64> = HashMap::new();
            for row in &rows {
                *hist
                    .entry(pos.iter().map(|&i| row[i]).collect())
                    .or_default() += 1;
            }
            assert_eq!(hist.len(), 1 << t, "positions {pos:?}");
            assert!(hist.values().all(|&c| c == seeds >> t), "positions {pos:?}");
        }
    }

    #[test]
    fn kwise_uniformity_exhaustive() {
        assert_t_wise_uniform(1, 4);
        assert_t_wise_uniform(2, 4);
        assert_t_wise_uniform(3, 8);
        assert_t_wise_uniform(2, 16);
    }

    #[test]
    fn independence_parameter() {
        assert_eq!(gap_independence(2), 2);
        assert_eq!(gap_independence(4), 4);
        assert_eq!(gap_independence(5), 6);
        assert_eq!(gap_independence(8), 6);
    }
}
