//! Reference solvers for dictionary look-up and text search, plus a trie
//! that branches on mismatches.
//!
//! Positions in reported results are 1-based; dictionary indices are
//! 1-based as well.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::reduction::{Instance, MatchAnswer, Mode};
use crate::strings::{edit_distance, hamming_unchecked, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("query has length {got}, dictionary strings have length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("pattern of length {pattern} is longer than text of length {text}")]
    PatternTooLong { pattern: usize, text: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_visited: u64,
    pub dp_cells: u64,
    pub wall_time: Duration,
}

/// Scans every dictionary string. Hamming distances are computed in full,
/// so the cost does not depend on `k`.
pub fn dict_lookup_brute(
    dict: &Instance,
    q: &[Symbol],
    k: usize,
    mode: Mode,
) -> Result<Vec<MatchAnswer>, SolverError> {
    Ok(dict_lookup_brute_with_stats(dict, q, k, mode)?.0)
}

pub fn dict_lookup_brute_with_stats(
    dict: &Instance,
    q: &[Symbol],
    k: usize,
    mode: Mode,
) -> Result<(Vec<MatchAnswer>, SearchStats), SolverError> {
    let started = Instant::now();
    if mode == Mode::Hamming && q.len() != dict.d() {
        return Err(SolverError::LengthMismatch {
            expected: dict.d(),
            got: q.len(),
        });
    }
    let mut stats = SearchStats::default();
    let mut out = Vec::new();
    for (i, s) in dict.strings().iter().enumerate() {
        stats.nodes_visited += 1;
        let distance = match mode {
            Mode::Hamming => {
                stats.dp_cells += s.len() as u64;
                hamming_unchecked(q, s)
            }
            Mode::Edit => {
                stats.dp_cells += ((q.len() + 1) * (s.len() + 1)) as u64;
                edit_distance(q, s)
            }
        };
        if distance <= k {
            out.push(MatchAnswer::new(i + 1, distance));
        }
    }
    stats.wall_time = started.elapsed();
    Ok((out, stats))
}

/// All 1-based starts `s` where the window of `t` at `s` is within Hamming
/// distance `k` of `p`, with that distance.
pub fn text_search_hamming(
    t: &[Symbol],
    p: &[Symbol],
    k: usize,
) -> Result<Vec<(usize, usize)>, SolverError> {
    if p.len() > t.len() {
        return Err(SolverError::PatternTooLong {
            pattern: p.len(),
            text: t.len(),
        });
    }
    Ok((0..=t.len() - p.len())
        .filter_map(|i| {
            let mut dist = 0;
            for (a, b) in t[i..i + p.len()].iter().zip(p) {
                if a != b {
                    dist += 1;
                    if dist > k {
                        return None;
                    }
                }
            }
            Some((i + 1, dist))
        })
        .collect())
}

/// One end position reported by [`text_search_edit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EditHit {
    /// 1-based inclusive end of the substring.
    pub end: usize,
    pub distance: usize,
    /// Smallest 1-based start achieving `distance`. Equals `end + 1` when
    /// the best substring is empty.
    pub start: usize,
}

/// For every end position `j` of `t`, the minimum edit distance between `p`
/// and a substring of `t` ending at `j`, reported when it is at most `k`.
pub fn text_search_edit(t: &[Symbol], p: &[Symbol], k: usize) -> Vec<EditHit> {
    text_search_edit_with_stats(t, p, k).0
}

pub fn text_search_edit_with_stats(
    t: &[Symbol],
    p: &[Symbol],
    k: usize,
) -> (Vec<EditHit>, SearchStats) {
    let started = Instant::now();
    let m = p.len();
    // column j holds (cost, 1-based start) for prefixes of p against
    // substrings of t ending at j
    let mut prev: Vec<(usize, usize)> = (0..=m).map(|i| (i, 1)).collect();
    let mut cur = vec![(0usize, 0usize); m + 1];
    let mut hits = Vec::new();
    for (j, &tc) in t.iter().enumerate() {
        cur[0] = (0, j + 2);
        for i in 1..=m {
            let (dc, ds) = prev[i - 1];
            let diag = (dc + usize::from(p[i - 1] != tc), ds);
            let up = (cur[i - 1].0 + 1, cur[i - 1].1);
            let left = (prev[i].0 + 1, prev[i].1);
            cur[i] = diag.min(up).min(left);
        }
        let (distance, start) = cur[m];
        if distance <= k {
            hits.push(EditHit {
                end: j + 1,
                distance,
                start,
            });
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let stats = SearchStats {
        nodes_visited: 0,
        dp_cells: (t.len() * (m + 1)) as u64,
        wall_time: started.elapsed(),
    };
    (hits, stats)
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<Symbol, usize>,
    terminals: Vec<usize>,
}

/// Uncompressed trie over equal-length dictionary strings.
#[derive(Debug, Clone)]
pub struct TrieIndex {
    nodes: Vec<TrieNode>,
    depth: usize,
}

impl TrieIndex {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Children of a node in symbol order, as node ids. The root is node 0.
    pub fn children(&self, node: usize) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.nodes[node].children.iter().map(|(&s, &c)| (s, c))
    }

    /// 1-based dictionary indices ending at `node`.
    pub fn terminals(&self, node: usize) -> &[usize] {
        &self.nodes[node].terminals
    }
}

pub fn trie_build(dict: &Instance) -> TrieIndex {
    let mut nodes = vec![TrieNode::default()];
    for (i, s) in dict.strings().iter().enumerate() {
        let mut at = 0;
        for &c in s.iter() {
            at = match nodes[at].children.get(&c) {
                Some(&next) => next,
                None => {
                    nodes.push(TrieNode::default());
                    let id = nodes.len() - 1;
                    nodes[at].children.insert(c, id);
                    id
                }
            };
        }
        nodes[at].terminals.push(i + 1);
    }
    TrieIndex {
        nodes,
        depth: dict.d(),
    }
}

/// Depth-first search that follows a mismatching edge only while the
/// remaining error budget allows it.
pub fn trie_lookup(
    idx: &TrieIndex,
    q: &[Symbol],
    k: usize,
) -> Result<(Vec<MatchAnswer>, SearchStats), SolverError> {
    if q.len() != idx.depth {
        return Err(SolverError::LengthMismatch {
            expected: idx.depth,
            got: q.len(),
        });
    }
    let started = Instant::now();
    let mut stats = SearchStats::default();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, 0usize, 0usize)];
    while let Some((node, depth, errors)) = stack.pop() {
        stats.nodes_visited += 1;
        if depth == q.len() {
            out.extend(
                idx.nodes[node]
                    .terminals
                    .iter()
                    .map(|&i| MatchAnswer::new(i, errors)),
            );
            continue;
        }
        for (&c, &child) in idx.nodes[node].children.iter().rev() {
            let e = errors + usize::from(c != q[depth]);
            if e <= k {
                stack.push((child, depth + 1, e));
            }
        }
    }
    out.sort();
    stats.wall_time = started.elapsed();
    Ok((out, stats))
}

/// Every substring of `t` as `(start, end, distance)` with 1-based inclusive
/// bounds, empty substrings included as `end = start - 1`. Quadratic; meant
/// as an oracle.
pub fn all_substring_distances(t: &[Symbol], p: &[Symbol]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for s in 0..=t.len() {
        for e in s..=t.len() {
            out.push((s + 1, e, edit_distance(&t[s..e], p)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::SymbolString;
    use proptest::prelude::*;

    fn s(x: &str) -> SymbolString {
        x.parse().unwrap()
    }

    fn l(x: &str) -> SymbolString {
        SymbolString::from_letters(x)
    }

    fn dict(xs: &[&str]) -> Instance {
        let strings: Vec<_> = xs.iter().map(|x| s(x)).collect();
        let d = strings[0].len();
        Instance::new(strings, d, 0, Mode::Hamming).unwrap()
    }

    fn pairs(a: &[MatchAnswer]) -> Vec<(usize, usize)> {
        a.iter().map(|m| (m.dict_index, m.distance)).collect()
    }

    #[test]
    fn brute_lookup_examples() {
        let dd = dict(&["0000", "1111", "0011"]);
        let got = dict_lookup_brute(&dd, &s("0001"), 1, Mode::Hamming).unwrap();
        assert_eq!(pairs(&got), vec![(1, 1), (3, 1)]);
        assert!(dict_lookup_brute(&dd, &s("0001"), 0, Mode::Hamming)
            .unwrap()
            .is_empty());
        let got = dict_lookup_brute(&dd, &s("1111"), 0, Mode::Hamming).unwrap();
        assert_eq!(pairs(&got), vec![(2, 0)]);
        assert_eq!(
            dict_lookup_brute(&dd, &s("000"), 1, Mode::Hamming),
            Err(SolverError::LengthMismatch {
                expected: 4,
                got: 3
            })
        );
        let got = dict_lookup_brute(&dd, &s("000"), 1, Mode::Edit).unwrap();
        assert_eq!(pairs(&got), vec![(1, 1)]);
    }

    #[test]
    fn hamming_search_examples() {
        assert_eq!(
            text_search_hamming(&l("ababab"), &l("aaa"), 1).unwrap(),
            vec![(1, 1), (3, 1)]
        );
        assert_eq!(
            text_search_hamming(&l("abc"), &l("abc"), 0).unwrap(),
            vec![(1, 0)]
        );
        assert_eq!(
            text_search_hamming(&l("abcd"), &l("xy"), 2).unwrap().len(),
            3
        );
        assert_eq!(
            text_search_hamming(&l("ab"), &l("abc"), 0),
            Err(SolverError::PatternTooLong {
                pattern: 3,
                text: 2
            })
        );
    }

    #[test]
    fn edit_search_examples() {
        assert_eq!(
            text_search_edit(&l("abcabc"), &l("bca"), 0),
            vec![EditHit {
                end: 4,
                distance: 0,
                start: 2
            }]
        );
        let hits = text_search_edit(&l("aaaa"), &l("b"), 1);
        assert_eq!(
            hits.iter().map(|h| (h.end, h.distance)).collect::<Vec<_>>(),
            vec![(1, 1), (2, 1), (3, 1), (4, 1)]
        );
        assert_eq!(hits[2].start, 3);
        let empty = text_search_edit(&l("ab"), &l(""), 0);
        assert_eq!(
            empty.iter().map(|h| (h.end, h.start)).collect::<Vec<_>>(),
            vec![(1, 2), (2, 3)]
        );
    }

    #[test]
    fn trie_structure() {
        let t = trie_build(&dict(&["00", "01"]));
        let root: Vec<_> = t.children(0).collect();
        assert_eq!(root.len(), 1);
        assert_eq!(root[0].0, Symbol::Zero);
        let below: Vec<_> = t.children(root[0].1).map(|(c, _)| c).collect();
        assert_eq!(below, vec![Symbol::Zero, Symbol::One]);

        let empty = Instance::new(vec![], 4, 0, Mode::Hamming).unwrap();
        assert_eq!(trie_build(&empty).node_count(), 1);

        assert_eq!(
            trie_build(&dict(&["0000", "1111", "0011"])).node_count(),
            11
        );
    }

    #[test]
    fn trie_duplicates_and_exact() {
        let dd = dict(&["0101", "0101", "1100"]);
        let t = trie_build(&dd);
        let (got, stats) = trie_lookup(&t, &s("0101"), 0).unwrap();
        assert_eq!(pairs(&got), vec![(1, 0), (2, 0)]);
        assert!(stats.nodes_visited <= 5);
        assert!(trie_lookup(&t, &s("01"), 0).is_err());
    }

    fn bits(len: usize) -> impl Strategy<Value = SymbolString> {
        proptest::collection::vec(any::<bool>(), len).prop_map(SymbolString::from_bits)
    }

    fn abc(max: usize) -> impl Strategy<Value = SymbolString> {
        proptest::collection::vec(0u32..3, 0..=max)
            .prop_map(|v| v.into_iter().map(|c| Symbol::Letter(97 + c)).collect())
    }

    proptest! {
        #[test]
        fn trie_matches_brute(
            (d, strings, q) in (1usize..=8).prop_flat_map(|d| (
                Just(d),
                proptest::collection::vec(bits(d), 0..12),
                bits(d),
            )),
            k in 0usize..5,
        ) {
            let inst = Instance::new(strings, d, 0, Mode::Hamming).unwrap();
            let brute = dict_lookup_brute(&inst, &q, k, Mode::Hamming).unwrap();
            let (trie, _) = trie_lookup(&trie_build(&inst), &q, k).unwrap();
            prop_assert_eq!(pairs(&brute), pairs(&trie));
        }

        #[test]
        fn trie_nodes_monotone_in_k(
            (d, strings, q) in (1usize..=8).prop_flat_map(|d| (
                Just(d),
                proptest::collection::vec(bits(d), 1..12),
                bits(d),
            )),
        ) {
            let inst = Instance::new(strings, d, 0, Mode::Hamming).unwrap();
            let t = trie_build(&inst);
            prop_assert!(t.node_count() <= d * inst.strings().len() + 1);
            let visited: Vec<u64> = (0..=d)
                .map(|k| trie_lookup(&t, &q, k).unwrap().1.nodes_visited)
                .collect();
            prop_assert!(visited[0] <= d as u64 + 1);
            prop_assert!(visited.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn hamming_search_matches_recount(t in abc(10), p in abc(4), k in 0usize..4) {
            prop_assume!(p.len() <= t.len());
            let got = text_search_hamming(&t, &p, k).unwrap();
            let mut expect = Vec::new();
            for i in 0..=t.len() - p.len() {
                let dist = (0..p.len()).filter(|&j| t[i + j] != p[j]).count();
                if dist <= k {
                    expect.push((i + 1, dist));
                }
            }
            prop_assert_eq!(got, expect);
        }

        #[test]
        fn edit_search_matches_substring_oracle(t in abc(10), p in abc(5), k in 0usize..6) {
            let got = text_search_edit(&t, &p, k);
            let all = all_substring_distances(&t, &p);
            let mut expect = Vec::new();
            for end in 1..=t.len() {
                // starts range over 1..=end+1; the last is the empty substring
                let best = all
                    .iter()
                    .filter(|&&(_, e, _)| e == end)
                    .map(|&(s, _, dist)| (dist, s))
                    .min()
                    .unwrap();
                if best.0 <= k {
                    expect.push(EditHit { end, distance: best.0, start: best.1 });
                }
            }
            prop_assert_eq!(got, expect);
        }
    }
}
