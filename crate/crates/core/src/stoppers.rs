//! The stoppers transform: turns binary strings of length `2^q` into
//! strings over `{0, 1, c_1, .., c_q}` whose pairwise edit distance equals
//! the Hamming distance of the originals.
//!
//! `tau(X) = tau(X_1) S_q tau(X_2)` where `X_1`, `X_2` are the halves of
//! `X` and `S_q` is the stopper `c_q` repeated `6 * 2^q` times. The result
//! has length `d * (1 + 6 log2 d)`.

use thiserror::Error;

use crate::strings::{Symbol, SymbolString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoppersError {
    #[error("stopper level must be at least 1, got {0}")]
    InvalidLevel(u32),
    #[error("input is empty")]
    EmptyInput,
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("non-binary symbol {symbol} at position {position}")]
    NonBinarySymbol { position: usize, symbol: Symbol },
    #[error("strings have different lengths ({0} and {1})")]
    MixedLengths(usize, usize),
}

/// Parameters of one transform application: input length `2^q`, and
/// whether zero padding was needed to reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformParams {
    pub q: u32,
    pub pad_applied: bool,
}

impl TransformParams {
    pub fn input_len(&self) -> usize {
        1 << self.q
    }

    pub fn output_len(&self) -> usize {
        transformed_len(self.input_len())
    }
}

/// `d * (1 + 6 log2 d)` for a power of two `d`.
pub fn transformed_len(d: usize) -> usize {
    debug_assert!(d.is_power_of_two());
    d * (1 + 6 * d.trailing_zeros() as usize)
}

pub fn stopper_len(level: u32) -> usize {
    6usize << level
}

/// `c_level` repeated `6 * 2^level` times.
pub fn stopper(level: u32) -> Result<SymbolString, StoppersError> {
    if level < 1 {
        return Err(StoppersError::InvalidLevel(level));
    }
    Ok(SymbolString::repeat(
        Symbol::Stopper(level),
        stopper_len(level),
    ))
}

fn check_binary(x: &[Symbol]) -> Result<(), StoppersError> {
    match x.iter().position(|s| !s.is_binary()) {
        Some(position) => Err(StoppersError::NonBinarySymbol {
            position,
            symbol: x[position],
        }),
        None => Ok(()),
    }
}

/// Appends zeros up to the next power of two.
pub fn pad_to_power_of_two(x: &SymbolString) -> Result<SymbolString, StoppersError> {
    if x.is_empty() {
        return Err(StoppersError::EmptyInput);
    }
    check_binary(x)?;
    Ok(pad_binary(x, x.len().next_power_of_two()))
}

fn pad_binary(x: &SymbolString, target: usize) -> SymbolString {
    let mut out = x.clone();
    for _ in x.len()..target {
        out.push(Symbol::Zero);
    }
    out
}

/// Applies the transform to a binary string whose length is a power of two.
pub fn stoppers_transform(x: &[Symbol]) -> Result<SymbolString, StoppersError> {
    if !x.len().is_power_of_two() {
        return Err(StoppersError::NotPowerOfTwo(x.len()));
    }
    check_binary(x)?;
    let mut out = Vec::with_capacity(transformed_len(x.len()));
    transform_into(x, &mut out);
    Ok(SymbolString::new(out))
}

fn transform_into(x: &[Symbol], out: &mut Vec<Symbol>) {
    if x.len() == 1 {
        out.push(x[0]);
        return;
    }
    let level = x.len().trailing_zeros();
    let (left, right) = x.split_at(x.len() / 2);
    transform_into(left, out);
    out.extend(std::iter::repeat_n(Symbol::Stopper(level), stopper_len(level)));
    transform_into(right, out);
}

/// Pads every string to one common power of two and transforms each.
///
/// Returns the transformed strings in input order together with the
/// parameters that were used.
pub fn transform_set(
    xs: &[SymbolString],
) -> Result<(Vec<SymbolString>, Option<TransformParams>), StoppersError> {
    let Some(first) = xs.first() else {
        return Ok((Vec::new(), None));
    };
    let d = first.len();
    if d == 0 {
        return Err(StoppersError::EmptyInput);
    }
    for x in xs {
        if x.len() != d {
            return Err(StoppersError::MixedLengths(d, x.len()));
        }
        check_binary(x)?;
    }
    let target = d.next_power_of_two();
    let params = TransformParams {
        q: target.trailing_zeros(),
        pad_applied: target != d,
    };
    let out = xs
        .iter()
        .map(|x| stoppers_transform(&pad_binary(x, target)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((out, Some(params)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::{edit_distance, hamming};

    fn s(x: &str) -> SymbolString {
        x.parse().unwrap()
    }

    fn all_binary(d: usize) -> Vec<SymbolString> {
        (0..1u32 << d)
            .map(|v| SymbolString::from_bits((0..d).map(|i| v >> (d - 1 - i) & 1 == 1)))
            .collect()
    }

    /// Maximal runs of one symbol, as (symbol, length).
    fn runs(x: &[Symbol]) -> Vec<(Symbol, usize)> {
        let mut out: Vec<(Symbol, usize)> = Vec::new();
        for &c in x {
            match out.last_mut() {
                Some((sym, n)) if *sym == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    #[test]
    fn stopper_lengths() {
        assert_eq!(
            stopper(1).unwrap(),
            SymbolString::repeat(Symbol::Stopper(1), 12)
        );
        assert_eq!(
            stopper(2).unwrap(),
            SymbolString::repeat(Symbol::Stopper(2), 24)
        );
        assert_eq!(stopper(0), Err(StoppersError::InvalidLevel(0)));
    }

    #[test]
    fn padding() {
        assert_eq!(pad_to_power_of_two(&s("101")).unwrap(), s("1010"));
        assert_eq!(pad_to_power_of_two(&s("10")).unwrap(), s("10"));
        assert_eq!(pad_to_power_of_two(&s("10110")).unwrap(), s("10110000"));
        assert_eq!(pad_to_power_of_two(&s("")), Err(StoppersError::EmptyInput));
        assert!(matches!(
            pad_to_power_of_two(&s("1$")),
            Err(StoppersError::NonBinarySymbol { position: 1, .. })
        ));
    }

    #[test]
    fn padding_keeps_hamming() {
        for x in all_binary(5) {
            for y in all_binary(5).iter().step_by(7) {
                let (px, py) = (
                    pad_to_power_of_two(&x).unwrap(),
                    pad_to_power_of_two(y).unwrap(),
                );
                assert_eq!(hamming(&px, &py).unwrap(), hamming(&x, y).unwrap());
            }
        }
    }

    #[test]
    fn small_unrolls() {
        assert_eq!(stoppers_transform(&s("0")).unwrap(), s("0"));
        let mut expect = vec![Symbol::Zero];
        expect.extend(vec![Symbol::Stopper(1); 12]);
        expect.push(Symbol::One);
        let t = stoppers_transform(&s("01")).unwrap();
        assert_eq!(t.symbols(), expect.as_slice());
        assert_eq!(t.len(), 14);
        assert_eq!(stoppers_transform(&s("01101001")).unwrap().len(), 152);
    }

    #[test]
    fn transform_errors() {
        assert_eq!(
            stoppers_transform(&s("011")),
            Err(StoppersError::NotPowerOfTwo(3))
        );
        assert!(matches!(
            stoppers_transform(&s("0 c1")),
            Err(StoppersError::NonBinarySymbol { position: 1, .. })
        ));
    }

    #[test]
    fn length_recurrence_matches_closed_form() {
        // L(0) = 1, L(q) = 2 L(q-1) + 6 * 2^q
        let mut len = 1usize;
        for q in 0..12u32 {
            if q > 0 {
                len = 2 * len + 6 * (1 << q);
            }
            assert_eq!(transformed_len(1 << q), len, "q = {q}");
        }
    }

    #[test]
    fn binary_subsequence_is_the_input() {
        for x in all_binary(4) {
            let t = stoppers_transform(&x).unwrap();
            let bits: Vec<Symbol> = t.iter().copied().filter(|c| c.is_binary()).collect();
            assert_eq!(bits.as_slice(), x.symbols());
        }
    }

    #[test]
    fn stopper_run_structure() {
        for q in 1..=6u32 {
            let d = 1usize << q;
            let x = SymbolString::from_bits((0..d).map(|i| i % 3 == 0));
            let t = stoppers_transform(&x).unwrap();
            let r = runs(&t);
            for level in 1..=q {
                let of_level: Vec<usize> = r
                    .iter()
                    .filter(|(c, _)| *c == Symbol::Stopper(level))
                    .map(|&(_, n)| n)
                    .collect();
                assert_eq!(of_level.len(), 1 << (q - level));
                assert!(of_level.iter().all(|&n| n == stopper_len(level)));
            }
        }
    }

    #[test]
    fn edit_equals_hamming_exhaustive_small() {
        for d in [1usize, 2, 4] {
            let xs = all_binary(d);
            let ts: Vec<_> = xs.iter().map(|x| stoppers_transform(x).unwrap()).collect();
            for i in 0..xs.len() {
                for j in 0..xs.len() {
                    assert_eq!(
                        edit_distance(&ts[i], &ts[j]),
                        hamming(&xs[i], &xs[j]).unwrap(),
                        "{} vs {}",
                        xs[i],
                        xs[j]
                    );
                }
            }
        }
    }

    #[test]
    fn injective_on_small_inputs() {
        let ts: std::collections::BTreeSet<_> = all_binary(8)
            .iter()
            .map(|x| stoppers_transform(x).unwrap())
            .collect();
        assert_eq!(ts.len(), 256);
    }

    #[test]
    fn set_transform() {
        let (out, params) = transform_set(&[s("01"), s("10")]).unwrap();
        assert_eq!(out[0], stoppers_transform(&s("01")).unwrap());
        assert_eq!(out[1], stoppers_transform(&s("10")).unwrap());
        assert_eq!(edit_distance(&out[0], &out[1]), 2);
        assert_eq!(
            params,
            Some(TransformParams {
                q: 1,
                pad_applied: false
            })
        );

        let (empty, p) = transform_set(&[]).unwrap();
        assert!(empty.is_empty() && p.is_none());

        let (padded, p) = transform_set(&[s("101"), s("001")]).unwrap();
        assert_eq!(p.unwrap().input_len(), 4);
        assert!(p.unwrap().pad_applied);
        assert_eq!(padded[0].len(), transformed_len(4));
        assert_eq!(edit_distance(&padded[0], &padded[1]), 1);

        assert_eq!(
            transform_set(&[s("01"), s("011")]),
            Err(StoppersError::MixedLengths(2, 3))
        );
    }
}
