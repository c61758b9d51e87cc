//! Extended-alphabet strings, Hamming and edit distance, and alignments.
//!
//! Symbols cover the binary alphabet, the level-tagged stopper symbols
//! `c1, c2, ...`, the two gap symbols `$` and `#`, and free-form letters.
//!
//! The text encoding used by every file format is either *compact*
//! (`"01$#"`, only when every symbol is one of `0 1 $ #`) or *token* form
//! (`"0 c3 1 l97"`, space separated).

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("alignment shape {al_left}x{al_right} does not match strings {left}x{right}")]
    ShapeMismatch {
        al_left: usize,
        al_right: usize,
        left: usize,
        right: usize,
    },
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("cannot parse symbol string: {0}")]
    Parse(String),
}

/// One symbol of the extended alphabet.
///
/// The derived order is `0 < 1 < c_i < $ < # < letters`, which fixes the
/// lexicographic order used by every enumeration in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    /// Stopper symbol `c_level`; level is always >= 1.
    Stopper(u32),
    Dollar,
    Hash,
    /// Free-form letter, used for examples such as `aabcab`.
    Letter(u32),
}

impl Symbol {
    pub fn bit(b: bool) -> Symbol {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, Symbol::Zero | Symbol::One)
    }

    pub fn is_gap(self) -> bool {
        matches!(self, Symbol::Dollar | Symbol::Hash)
    }

    fn compact_char(self) -> Option<char> {
        match self {
            Symbol::Zero => Some('0'),
            Symbol::One => Some('1'),
            Symbol::Dollar => Some('$'),
            Symbol::Hash => Some('#'),
            _ => None,
        }
    }

    fn from_compact_char(c: char) -> Option<Symbol> {
        match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            '$' => Some(Symbol::Dollar),
            '#' => Some(Symbol::Hash),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Stopper(i) => write!(f, "c{i}"),
            Symbol::Letter(code) => write!(f, "l{code}"),
            other => write!(f, "{}", other.compact_char().unwrap()),
        }
    }
}

impl FromStr for Symbol {
    type Err = StringsError;

    fn from_str(tok: &str) -> Result<Self, Self::Err> {
        let mut chars = tok.chars();
        if let (Some(c), None) = (chars.next(), chars.clone().next()) {
            if let Some(s) = Symbol::from_compact_char(c) {
                return Ok(s);
            }
        }
        let number = |rest: &str| -> Result<u32, StringsError> {
            if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(StringsError::Parse(format!("bad token {tok:?}")));
            }
            rest.parse()
                .map_err(|_| StringsError::Parse(format!("bad token {tok:?}")))
        };
        if let Some(rest) = tok.strip_prefix('c') {
            let level = number(rest)?;
            if level == 0 {
                return Err(StringsError::Parse("stopper level must be >= 1".into()));
            }
            return Ok(Symbol::Stopper(level));
        }
        if let Some(rest) = tok.strip_prefix('l') {
            return Ok(Symbol::Letter(number(rest)?));
        }
        Err(StringsError::Parse(format!("unknown token {tok:?}")))
    }
}

/// An owned sequence of [`Symbol`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolString(Vec<Symbol>);

impl SymbolString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        SymbolString(symbols)
    }

    pub fn repeat(symbol: Symbol, n: usize) -> Self {
        SymbolString(vec![symbol; n])
    }

    /// Binary string from an iterator of bits.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        SymbolString(bits.into_iter().map(Symbol::bit).collect())
    }

    /// Maps each byte of `s` to `Letter(byte)`. Handy for textbook examples.
    pub fn from_letters(s: &str) -> Self {
        SymbolString(s.bytes().map(|b| Symbol::Letter(b as u32)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &SymbolString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a SymbolString>>(parts: I) -> Self {
        let mut out = Vec::new();
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        SymbolString(out)
    }

    pub fn substring(&self, start: usize, end: usize) -> SymbolString {
        SymbolString(self.0[start..end].to_vec())
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|s| s.is_binary())
    }

    pub fn contains_gap_symbol(&self) -> bool {
        self.0.iter().any(|s| s.is_gap())
    }

    /// True when the compact encoding can represent the string.
    pub fn is_compact_encodable(&self) -> bool {
        self.0.iter().all(|s| s.compact_char().is_some())
    }

    pub fn to_compact(&self) -> Option<String> {
        self.0.iter().map(|s| s.compact_char()).collect()
    }

    pub fn to_tokens(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&s.to_string());
        }
        out
    }

    pub fn parse_compact(s: &str) -> Result<Self, StringsError> {
        s.chars()
            .map(|c| {
                Symbol::from_compact_char(c)
                    .ok_or_else(|| StringsError::Parse(format!("bad compact char {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SymbolString)
    }

    pub fn parse_tokens(s: &str) -> Result<Self, StringsError> {
        s.split_whitespace()
            .map(Symbol::from_str)
            .collect::<Result<Vec<_>, _>>()
            .map(SymbolString)
    }
}

impl Deref for SymbolString {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for SymbolString {
    fn from(v: Vec<Symbol>) -> Self {
        SymbolString(v)
    }
}

impl FromIterator<Symbol> for SymbolString {
    fn from_iter<T: IntoIterator<Item = Symbol>>(iter: T) -> Self {
        SymbolString(iter.into_iter().collect())
    }
}

/// Compact form when possible, token form otherwise.
impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_compact() {
            Some(c) => f.write_str(&c),
            None => f.write_str(&self.to_tokens()),
        }
    }
}

/// Accepts either encoding: text made only of `0 1 $ #` characters is
/// compact, anything else is split on whitespace into tokens.
impl FromStr for SymbolString {
    type Err = StringsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.chars().all(|c| Symbol::from_compact_char(c).is_some()) {
            SymbolString::parse_compact(s)
        } else {
            SymbolString::parse_tokens(s)
        }
    }
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming(a: &[Symbol], b: &[Symbol]) -> Result<usize, StringsError> {
    if a.len() != b.len() {
        return Err(StringsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(hamming_unchecked(a, b))
}

#[inline]
pub(crate) fn hamming_unchecked(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Unit-cost Levenshtein distance (substitution, insertion, deletion).
pub fn edit_distance(a: &[Symbol], b: &[Symbol]) -> usize {
    // keep the row over the shorter string
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &y) in short.iter().enumerate() {
            let sub = diag + usize::from(x != y);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[short.len()]
}

/// Edit distance if it is at most `limit`, computed on the diagonal band
/// `|i - j| <= limit`. Any alignment of cost `<= limit` stays inside that
/// band, so the answer is exact whenever it is `Some`.
pub fn edit_distance_bounded(a: &[Symbol], b: &[Symbol], limit: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > limit {
        return None;
    }
    const INF: usize = usize::MAX / 2;
    let width = 2 * limit + 1;
    // band[i][off] holds D[i][j] with j = i + off - limit
    let mut prev = vec![INF; width];
    let mut cur = vec![INF; width];
    for off in 0..width {
        let j = off as isize - limit as isize;
        if (0..=m as isize).contains(&j) {
            prev[off] = j as usize;
        }
    }
    for i in 1..=n {
        cur.fill(INF);
        for off in 0..width {
            let j = i as isize + off as isize - limit as isize;
            if j < 0 || j > m as isize {
                continue;
            }
            let j = j as usize;
            let mut best = INF;
            if j == 0 {
                best = i;
            } else {
                // diagonal D[i-1][j-1] sits at the same offset in the previous row
                best = best.min(prev[off] + usize::from(a[i - 1] != b[j - 1]));
                if off > 0 {
                    best = best.min(cur[off - 1] + 1);
                }
            }
            if off + 1 < width {
                best = best.min(prev[off + 1] + 1);
            }
            cur[off] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let off = (m as isize - n as isize + limit as isize) as usize;
    let d = prev[off];
    (d <= limit).then_some(d)
}

/// A monotone, non-crossing partial matching between the positions of two
/// strings. Positions are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    left_len: usize,
    right_len: usize,
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(
        left_len: usize,
        right_len: usize,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self, StringsError> {
        for &(i, j) in &pairs {
            if i >= left_len || j >= right_len {
                return Err(StringsError::InvalidAlignment(format!(
                    "pair ({i}, {j}) out of range"
                )));
            }
        }
        for w in pairs.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(StringsError::InvalidAlignment(format!(
                    "pairs {:?} and {:?} cross or repeat a position",
                    w[0], w[1]
                )));
            }
        }
        Ok(Alignment {
            left_len,
            right_len,
            pairs,
        })
    }

    pub fn identity(len: usize) -> Self {
        Alignment {
            left_len: len,
            right_len: len,
            pairs: (0..len).map(|i| (i, i)).collect(),
        }
    }

    pub fn empty(left_len: usize, right_len: usize) -> Self {
        Alignment {
            left_len,
            right_len,
            pairs: Vec::new(),
        }
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn right_len(&self) -> usize {
        self.right_len
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Unpaired positions on both sides plus paired positions holding
/// different symbols.
pub fn alignment_cost(al: &Alignment, a: &[Symbol], b: &[Symbol]) -> Result<usize, StringsError> {
    if al.left_len != a.len() || al.right_len != b.len() {
        return Err(StringsError::ShapeMismatch {
            al_left: al.left_len,
            al_right: al.right_len,
            left: a.len(),
            right: b.len(),
        });
    }
    let paired = al.pairs.len();
    let mismatched = al.pairs.iter().filter(|&&(i, j)| a[i] != b[j]).count();
    Ok((a.len() - paired) + (b.len() - paired) + mismatched)
}

/// An alignment whose cost equals [`edit_distance`].
///
/// Traceback prefers, in order: match/substitute, delete from `a`, insert
/// from `b`.
pub fn optimal_alignment(a: &[Symbol], b: &[Symbol]) -> Alignment {
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut table = vec![0usize; (n + 1) * w];
    for j in 0..=m {
        table[j] = j;
    }
    for i in 1..=n {
        table[i * w] = i;
        for j in 1..=m {
            let sub = table[(i - 1) * w + j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let del = table[(i - 1) * w + j] + 1;
            let ins = table[i * w + j - 1] + 1;
            table[i * w + j] = sub.min(del).min(ins);
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = table[i * w + j];
        if i > 0 && j > 0 && here == table[(i - 1) * w + j - 1] + usize::from(a[i - 1] != b[j - 1])
        {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if i > 0 && here == table[(i - 1) * w + j] + 1 {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    Alignment {
        left_len: n,
        right_len: m,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> SymbolString {
        x.parse().unwrap()
    }

    fn letters(x: &str) -> SymbolString {
        SymbolString::from_letters(x)
    }

    /// Every non-crossing partial matching of `n` and `m` positions.
    fn all_alignments(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
        fn rec(
            i: usize,
            j: usize,
            n: usize,
            m: usize,
            cur: &mut Vec<(usize, usize)>,
            out: &mut Vec<Vec<(usize, usize)>>,
        ) {
            out.push(cur.clone());
            for ii in i..n {
                for jj in j..m {
                    cur.push((ii, jj));
                    rec(ii + 1, jj + 1, n, m, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(0, 0, n, m, &mut Vec::new(), &mut out);
        out
    }

    fn brute_edit(a: &[Symbol], b: &[Symbol]) -> usize {
        all_alignments(a.len(), b.len())
            .into_iter()
            .map(|p| alignment_cost(&Alignment::new(a.len(), b.len(), p).unwrap(), a, b).unwrap())
            .min()
            .unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&s("0101"), &s("0101")).unwrap(), 0);
        assert_eq!(hamming(&s("10"), &s("01")).unwrap(), 2);
        assert_eq!(hamming(&letters("aabcab"), &letters("aacccc")).unwrap(), 3);
        assert_eq!(
            hamming(&s("0"), &s("01")),
            Err(StringsError::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&s("0110"), &s("0110")), 0);
        assert_eq!(edit_distance(&letters(""), &letters("ab")), 2);
        assert_eq!(edit_distance(&letters("aabcab"), &letters("aacccc")), 3);
        assert_eq!(
            brute_edit(&letters("aabcab"), &letters("aacccc")),
            3,
            "exhaustive alignment oracle"
        );
    }

    #[test]
    fn figure_alignment_costs_seven() {
        let t = letters("aabcab");
        let s = letters("aacccc");
        let al = Alignment::new(6, 6, vec![(0, 1), (2, 3), (3, 5)]).unwrap();
        assert_eq!(alignment_cost(&al, &t, &s).unwrap(), 7);
    }

    #[test]
    fn trivial_alignment_costs() {
        let x = s("0110");
        assert_eq!(alignment_cost(&Alignment::identity(4), &x, &x).unwrap(), 0);
        assert_eq!(
            alignment_cost(&Alignment::empty(3, 4), &s("010"), &s("0110")).unwrap(),
            7
        );
        assert!(matches!(
            alignment_cost(&Alignment::empty(3, 3), &s("010"), &s("0110")),
            Err(StringsError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn alignment_rejects_crossing_and_out_of_range() {
        assert!(Alignment::new(3, 3, vec![(0, 1), (1, 0)]).is_err());
        assert!(Alignment::new(3, 3, vec![(0, 1), (0, 2)]).is_err());
        assert!(Alignment::new(3, 3, vec![(3, 0)]).is_err());
    }

    #[test]
    fn optimal_alignment_examples() {
        let x = letters("abcab");
        assert_eq!(optimal_alignment(&x, &x), Alignment::identity(5));

        let al = optimal_alignment(&letters("ab"), &letters("b"));
        assert_eq!(al.pairs(), &[(1, 0)]);
        assert_eq!(
            alignment_cost(&al, &letters("ab"), &letters("b")).unwrap(),
            1
        );

        let (a, b) = (letters("aabcab"), letters("aacccc"));
        assert_eq!(
            alignment_cost(&optimal_alignment(&a, &b), &a, &b).unwrap(),
            3
        );
    }

    #[test]
    fn stoppers_of_different_levels_differ() {
        assert_ne!(Symbol::Stopper(1), Symbol::Stopper(2));
        assert_eq!(hamming(&s("c1 c2"), &s("c2 c1")).unwrap(), 2);
    }

    #[test]
    fn encoding_forms() {
        let x = s("01$#");
        assert_eq!(x.to_string(), "01$#");
        let y = s("0 c3 1 l97 $");
        assert_eq!(y.len(), 5);
        assert_eq!(y[1], Symbol::Stopper(3));
        assert_eq!(y.to_string(), "0 c3 1 l97 $");
        assert_eq!(s("").len(), 0);
        assert!("c0".parse::<SymbolString>().is_err());
        assert!("0 x1".parse::<SymbolString>().is_err());
        assert!("c".parse::<SymbolString>().is_err());
        // token form of a compact-encodable string parses to the same thing
        assert_eq!(s("0 1 $ #"), x);
    }

    fn sym3() -> impl Strategy<Value = Symbol> {
        prop_oneof![
            Just(Symbol::Zero),
            Just(Symbol::One),
            Just(Symbol::Stopper(1))
        ]
    }

    fn any_symbol() -> impl Strategy<Value = Symbol> {
        prop_oneof![
            Just(Symbol::Zero),
            Just(Symbol::One),
            Just(Symbol::Dollar),
            Just(Symbol::Hash),
            (1u32..6).prop_map(Symbol::Stopper),
            (0u32..200).prop_map(Symbol::Letter),
        ]
    }

    fn small(max: usize) -> impl Strategy<Value = SymbolString> {
        prop::collection::vec(sym3(), 0..=max).prop_map(SymbolString::new)
    }

    proptest! {
        #[test]
        fn edit_matches_exhaustive_alignments(a in small(6), b in small(6)) {
            prop_assert_eq!(edit_distance(&a, &b), brute_edit(&a, &b));
        }

        #[test]
        fn edit_distance_metric_laws(a in small(10), b in small(10), c in small(10)) {
            let ab = edit_distance(&a, &b);
            prop_assert_eq!(ab, edit_distance(&b, &a));
            prop_assert!(ab <= a.len().max(b.len()));
            prop_assert!(ab >= a.len().abs_diff(b.len()));
            prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
        }

        #[test]
        fn edit_at_most_hamming(pairs in prop::collection::vec((sym3(), sym3()), 0..16)) {
            let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            prop_assert!(edit_distance(&a, &b) <= hamming(&a, &b).unwrap());
        }

        #[test]
        fn optimal_alignment_is_optimal(a in small(12), b in small(12)) {
            let al = optimal_alignment(&a, &b);
            prop_assert_eq!(alignment_cost(&al, &a, &b).unwrap(), edit_distance(&a, &b));
        }

        #[test]
        fn banded_agrees_with_full(a in small(14), b in small(14), limit in 0usize..16) {
            let full = edit_distance(&a, &b);
            let banded = edit_distance_bounded(&a, &b, limit);
            prop_assert_eq!(banded, (full <= limit).then_some(full));
        }

        #[test]
        fn encoding_round_trips(v in prop::collection::vec(any_symbol(), 0..20)) {
            let x = SymbolString::new(v);
            let text = x.to_string();
            prop_assert_eq!(text.parse::<SymbolString>().unwrap(), x.clone());
            prop_assert_eq!(SymbolString::parse_tokens(&x.to_tokens()).unwrap(), x);
        }
    }
}
