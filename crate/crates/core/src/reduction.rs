//! Dictionary look-up reduced to text indexing.
//!
//! The dictionary `S_1, .., S_m` (each of length `d`) becomes the text
//! `G S_1 G S_2 G .. S_m G` and a query `Q` becomes the pattern `G Q G`,
//! where `G` is a gap string of length `2d`. The text has length
//! `3n + 2d` with `n = m d`, and `S_i` starts at `(3(i-1)+2)d + 1`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gapstrings::{default_mismatch_gap, edit_gap, GapError, GapMode, GapString};
use crate::solvers::{text_search_edit, text_search_hamming, SolverError};
use crate::stoppers::{transform_set, transformed_len, StoppersError};
use crate::strings::{edit_distance, hamming_unchecked, optimal_alignment, Symbol, SymbolString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("alphabet clash: {0}")]
    AlphabetClash(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty set")]
    EmptySet,
    #[error("text search reported a window at misaligned offset {start} (distance {distance})")]
    Misaligned { start: usize, distance: usize },
    #[error("window {start}..{end} at distance {distance} certifies no dictionary string")]
    Uncertified {
        start: usize,
        end: usize,
        distance: usize,
    },
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Stoppers(#[from] StoppersError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Hamming,
    Edit,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Hamming => "hamming",
            Mode::Edit => "edit",
        })
    }
}

impl FromStr for Mode {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hamming" => Ok(Mode::Hamming),
            "edit" => Ok(Mode::Edit),
            other => Err(ReductionError::Param(format!("unknown mode {other:?}"))),
        }
    }
}

/// A dictionary of equal-length strings with its distance budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    strings: Vec<SymbolString>,
    d: usize,
    k: usize,
    mode: Mode,
}

impl Instance {
    /// Checks that every string has length `d`, that `k < d`, that no string
    /// uses `$` or `#`, and that Hamming-mode strings carry no stoppers.
    pub fn new(
        strings: Vec<SymbolString>,
        d: usize,
        k: usize,
        mode: Mode,
    ) -> Result<Self, ReductionError> {
        if d < 1 {
            return Err(ReductionError::Param("d must be at least 1".into()));
        }
        if k >= d {
            return Err(ReductionError::Param(format!(
                "need k < d, got k = {k}, d = {d}"
            )));
        }
        for (i, s) in strings.iter().enumerate() {
            if s.len() != d {
                return Err(ReductionError::LengthMismatch {
                    expected: d,
                    got: s.len(),
                });
            }
            check_alphabet(s, mode).map_err(|e| match e {
                ReductionError::AlphabetClash(m) => {
                    ReductionError::AlphabetClash(format!("string {}: {m}", i + 1))
                }
                other => other,
            })?;
        }
        Ok(Instance {
            strings,
            d,
            k,
            mode,
        })
    }

    pub fn strings(&self) -> &[SymbolString] {
        &self.strings
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// Total length `n` of the dictionary.
    pub fn total_len(&self) -> usize {
        self.strings.len() * self.d
    }
}

fn check_alphabet(s: &[Symbol], mode: Mode) -> Result<(), ReductionError> {
    if let Some(c) = s.iter().find(|c| c.is_gap()) {
        return Err(ReductionError::AlphabetClash(format!(
            "uses gap symbol {c}"
        )));
    }
    if mode == Mode::Hamming {
        if let Some(c) = s.iter().find(|c| matches!(c, Symbol::Stopper(_))) {
            return Err(ReductionError::AlphabetClash(format!(
                "stopper {c} in a Hamming-mode string"
            )));
        }
    }
    Ok(())
}

/// One answer of a dictionary look-up. Ordered by index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchAnswer {
    /// 1-based.
    pub dict_index: usize,
    pub distance: usize,
    /// 1-based inclusive text window that produced the answer, if any.
    pub evidence: Option<(usize, usize)>,
}

impl MatchAnswer {
    pub fn new(dict_index: usize, distance: usize) -> Self {
        MatchAnswer {
            dict_index,
            distance,
            evidence: None,
        }
    }
}

impl fmt::Display for MatchAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.dict_index, self.distance)
    }
}

/// The reduced text with its gap and the 1-based start of every `S_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextArtifact {
    text: SymbolString,
    gap: GapString,
    d: usize,
    layout: Vec<(usize, usize)>,
}

impl TextArtifact {
    pub fn text(&self) -> &SymbolString {
        &self.text
    }

    pub fn gap(&self) -> &GapString {
        &self.gap
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `(i, start)` pairs, both 1-based.
    pub fn layout(&self) -> &[(usize, usize)] {
        &self.layout
    }

    pub fn block_count(&self) -> usize {
        self.layout.len()
    }

    /// The dictionary string `S_i`, 1-based.
    pub fn block(&self, i: usize) -> &[Symbol] {
        let start = self.layout[i - 1].1 - 1;
        &self.text[start..start + self.d]
    }

    pub fn mode(&self) -> Mode {
        match self.gap.mode() {
            GapMode::Mismatch => Mode::Hamming,
            GapMode::Edit => Mode::Edit,
        }
    }

    /// Rebuilds an artifact from a text and gap, checking that the text has
    /// the `G S_1 G .. S_m G` shape.
    pub fn from_parts(text: SymbolString, gap: GapString) -> Result<Self, ReductionError> {
        let d = gap.d();
        let period = 3 * d;
        if text.len() < 2 * d || (text.len() - 2 * d) % period != 0 {
            return Err(ReductionError::Param(format!(
                "text length {} is not 3n + 2d for d = {d}",
                text.len()
            )));
        }
        let count = (text.len() - 2 * d) / period;
        for i in 0..=count {
            if text[i * period..i * period + 2 * d] != gap.symbols()[..] {
                return Err(ReductionError::Param(format!("gap copy {} differs", i + 1)));
            }
        }
        let layout = (1..=count).map(|i| (i, block_start(i, d))).collect();
        Ok(TextArtifact {
            text,
            gap,
            d,
            layout,
        })
    }
}

/// 1-based start of `S_i` in the text.
pub fn block_start(i: usize, d: usize) -> usize {
    (3 * (i - 1) + 2) * d + 1
}

/// Builds the text with the instance's default gap: a searched mismatch gap
/// in Hamming mode, `$^d #^d` in Edit mode.
pub fn build_text(dict: &Instance) -> Result<TextArtifact, ReductionError> {
    let gap = match dict.mode {
        Mode::Hamming => default_mismatch_gap(dict.d)?,
        Mode::Edit => edit_gap(dict.d)?,
    };
    build_text_with_gap(dict, gap, 0.0)
}

/// Builds the text with a supplied gap, requiring `(1 + epsilon) k < d`.
pub fn build_text_with_gap(
    dict: &Instance,
    gap: GapString,
    epsilon: f64,
) -> Result<TextArtifact, ReductionError> {
    if dict.is_empty() {
        return Err(ReductionError::EmptySet);
    }
    if gap.d() != dict.d {
        return Err(ReductionError::LengthMismatch {
            expected: 2 * dict.d,
            got: gap.len(),
        });
    }
    if !(0.0..1.0).contains(&epsilon) || (1.0 + epsilon) * dict.k as f64 >= dict.d as f64 {
        return Err(ReductionError::Param(format!(
            "need (1 + eps) k < d with 0 <= eps < 1, got eps = {epsilon}, k = {}, d = {}",
            dict.k, dict.d
        )));
    }
    let mut text = gap.symbols().clone();
    for s in &dict.strings {
        text.extend_from(s);
        text.extend_from(gap.symbols());
    }
    let layout = (1..=dict.len())
        .map(|i| (i, block_start(i, dict.d)))
        .collect();
    Ok(TextArtifact {
        text,
        gap,
        d: dict.d,
        layout,
    })
}

/// `G Q G`.
pub fn wrap_query(q: &[Symbol], g: &GapString) -> Result<SymbolString, ReductionError> {
    if q.len() != g.d() {
        return Err(ReductionError::LengthMismatch {
            expected: g.d(),
            got: q.len(),
        });
    }
    if let Some(c) = q.iter().find(|c| c.is_gap()) {
        return Err(ReductionError::AlphabetClash(format!(
            "query uses gap symbol {c}"
        )));
    }
    let mut out = g.symbols().clone();
    out.extend_from(&SymbolString::new(q.to_vec()));
    out.extend_from(g.symbols());
    Ok(out)
}

/// Answers a dictionary look-up by searching the reduced text.
///
/// Hamming mode accepts only windows at layout offsets; any other hit is an
/// error. Edit mode maps each reported window to the dictionary string that
/// the window's middle part overlaps and reports the recomputed
/// `ED(q, S_j)`.
pub fn dict_lookup_via_text(
    art: &TextArtifact,
    q: &[Symbol],
    k: usize,
    mode: Mode,
) -> Result<Vec<MatchAnswer>, ReductionError> {
    let d = art.d;
    if k >= d {
        return Err(ReductionError::Param(format!(
            "need k < d, got k = {k}, d = {d}"
        )));
    }
    let pattern = wrap_query(q, &art.gap)?;
    match mode {
        Mode::Hamming => {
            let mut out = Vec::new();
            for (start, distance) in text_search_hamming(&art.text, &pattern, k)? {
                if (start - 1) % (3 * d) != 0 {
                    return Err(ReductionError::Misaligned { start, distance });
                }
                let index = (start - 1) / (3 * d) + 1;
                out.push(MatchAnswer {
                    dict_index: index,
                    distance,
                    evidence: Some((start, start + pattern.len() - 1)),
                });
            }
            Ok(out)
        }
        Mode::Edit => {
            let mut best: Vec<Option<MatchAnswer>> = vec![None; art.block_count()];
            let mut window_dist: Vec<usize> = vec![usize::MAX; art.block_count()];
            for hit in text_search_edit(&art.text, &pattern, k) {
                let window = &art.text[hit.start - 1..hit.end];
                let (index, distance) = certify_window(art, q, &pattern, window, hit.start)
                    .filter(|&(_, dist)| dist <= hit.distance)
                    .ok_or(ReductionError::Uncertified {
                        start: hit.start,
                        end: hit.end,
                        distance: hit.distance,
                    })?;
                if hit.distance < window_dist[index - 1] {
                    window_dist[index - 1] = hit.distance;
                    best[index - 1] = Some(MatchAnswer {
                        dict_index: index,
                        distance,
                        evidence: Some((hit.start, hit.end)),
                    });
                }
            }
            Ok(best.into_iter().flatten().collect())
        }
    }
}

/// Locates the middle part `M` of a window (the text between the last
/// position aligned to the left `G` and the first aligned to the right
/// `G`) and returns the dictionary string closest to `q` among the blocks
/// whose start lies within `d` of `M`'s start.
fn certify_window(
    art: &TextArtifact,
    q: &[Symbol],
    pattern: &[Symbol],
    window: &[Symbol],
    window_start: usize,
) -> Option<(usize, usize)> {
    let d = art.d;
    let al = optimal_alignment(pattern, window);
    let m_start = al
        .pairs()
        .iter()
        .rev()
        .find(|&&(i, _)| i < 2 * d)
        .map(|&(_, j)| j + 1)
        .unwrap_or(0);
    let m_start = window_start + m_start;
    art.layout
        .iter()
        .filter(|&&(_, start)| start.abs_diff(m_start) <= d)
        .map(|&(i, _)| (i, edit_distance(q, art.block(i))))
        .min_by_key(|&(i, dist)| (dist, i))
}

/// Outcome of checking every misaligned window in a Hamming-mode text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetReport {
    pub windows_checked: usize,
    /// First misaligned window within distance `k`: 1-based start and
    /// distance.
    pub violation: Option<(usize, usize)>,
}

impl OffsetReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks every length-`5d` window of the text against `G Q G`.
pub fn offset_exclusion_report(
    art: &TextArtifact,
    q: &[Symbol],
    k: usize,
) -> Result<OffsetReport, ReductionError> {
    if art.mode() != Mode::Hamming {
        return Err(ReductionError::Param(
            "offset exclusion needs a Hamming-mode artifact".into(),
        ));
    }
    let pattern = wrap_query(q, &art.gap)?;
    let period = 3 * art.d;
    let mut report = OffsetReport {
        windows_checked: 0,
        violation: None,
    };
    for (s, w) in art.text.windows(pattern.len()).enumerate() {
        report.windows_checked += 1;
        if s % period == 0 || report.violation.is_some() {
            continue;
        }
        let dist = hamming_unchecked(w, &pattern);
        if dist <= k {
            report.violation = Some((s + 1, dist));
        }
    }
    Ok(report)
}

/// True iff no misaligned window is within Hamming distance `k` of `G Q G`.
pub fn verify_offset_exclusion(
    art: &TextArtifact,
    q: &[Symbol],
    k: usize,
) -> Result<bool, ReductionError> {
    Ok(offset_exclusion_report(art, q, k)?.holds())
}

/// True iff every substring `T'` with `ED(G Q G, T') <= k` is matched by a
/// dictionary string `S` with `ED(q, S) <= ED(G Q G, T')`.
///
/// The minimum of `ED(G Q G, T')` over all substrings is computed with the
/// free-start DP, so the check is exact.
pub fn verify_edit_offsets(
    art: &TextArtifact,
    q: &[Symbol],
    k: usize,
) -> Result<bool, ReductionError> {
    if art.mode() != Mode::Edit {
        return Err(ReductionError::Param(
            "edit offsets need an Edit-mode artifact".into(),
        ));
    }
    let pattern = wrap_query(q, &art.gap)?;
    let Some(window_min) = text_search_edit(&art.text, &pattern, k)
        .iter()
        .map(|h| h.distance)
        .min()
    else {
        return Ok(true);
    };
    let dict_min = (1..=art.block_count())
        .map(|i| edit_distance(q, art.block(i)))
        .min()
        .unwrap_or(usize::MAX);
    Ok(dict_min <= window_min)
}

/// Applies the stoppers transform to a binary Hamming-mode instance. The
/// result is an Edit-mode instance with the same `k` whose pairwise edit
/// distances equal the original Hamming distances.
pub fn transform_instance(dict: &Instance) -> Result<Instance, ReductionError> {
    if dict.mode != Mode::Hamming {
        return Err(ReductionError::Param(
            "instance is already in Edit mode".into(),
        ));
    }
    if let Some(s) = dict.strings.iter().find(|s| !s.is_binary()) {
        return Err(ReductionError::AlphabetClash(format!("{s} is not binary")));
    }
    let (strings, _) = transform_set(&dict.strings)?;
    let d = transformed_len(dict.d.next_power_of_two());
    Instance::new(strings, d, dict.k, Mode::Edit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosestPair {
    /// 1-based.
    pub red_index: usize,
    /// 1-based.
    pub blue_index: usize,
    pub distance: usize,
}

/// Exhaustive minimum over all red/blue pairs, ties to the smallest
/// `(red_index, blue_index)`.
pub fn bichromatic_closest_pair(
    red: &[SymbolString],
    blue: &[SymbolString],
    mode: Mode,
) -> Result<ClosestPair, ReductionError> {
    if red.is_empty() || blue.is_empty() {
        return Err(ReductionError::EmptySet);
    }
    let mut best: Option<ClosestPair> = None;
    for (r, x) in red.iter().enumerate() {
        for (b, y) in blue.iter().enumerate() {
            let distance = match mode {
                Mode::Hamming => {
                    if x.len() != y.len() {
                        return Err(ReductionError::LengthMismatch {
                            expected: x.len(),
                            got: y.len(),
                        });
                    }
                    hamming_unchecked(x, y)
                }
                Mode::Edit => edit_distance(x, y),
            };
            if best.is_none_or(|p| distance < p.distance) {
                best = Some(ClosestPair {
                    red_index: r + 1,
                    blue_index: b + 1,
                    distance,
                });
            }
        }
    }
    Ok(best.expect("nonempty sets"))
}

/// Splits the red set into consecutive groups of `group_size`, solves each
/// group separately and keeps the best, with indices into the full red set.
pub fn bichromatic_closest_pair_grouped(
    red: &[SymbolString],
    blue: &[SymbolString],
    mode: Mode,
    group_size: usize,
) -> Result<ClosestPair, ReductionError> {
    if group_size == 0 {
        return Err(ReductionError::Param("group size must be positive".into()));
    }
    if red.is_empty() {
        return Err(ReductionError::EmptySet);
    }
    let mut best: Option<ClosestPair> = None;
    for (g, chunk) in red.chunks(group_size).enumerate() {
        let mut p = bichromatic_closest_pair(chunk, blue, mode)?;
        p.red_index += g * group_size;
        if best.is_none_or(|b| p.distance < b.distance) {
            best = Some(p);
        }
    }
    Ok(best.expect("nonempty red set"))
}
