//! Corpus BLEU and TER over pre-tokenized sequences.
//!
//! Both follow the defaults of the usual reference implementation: BLEU with
//! orders 1..4 and exponential smoothing, TER with greedy block shifts. One
//! difference: orders for which the corpus has no n-grams at all are left out
//! of the geometric mean instead of zeroing the score.

use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;

use super::ReflexError;

pub const MAX_ORDER: usize = 4;
/// Longest block considered for a shift.
pub const MAX_SHIFT_SIZE: usize = 10;
/// Farthest a block may move, in tokens.
pub const MAX_SHIFT_DIST: usize = 50;

fn check<T>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<(), ReflexError> {
    if hyps.len() != refs.len() {
        return Err(ReflexError::LengthMismatch {
            hypotheses: hyps.len(),
            references: refs.len(),
        });
    }
    if refs.is_empty() {
        return Err(ReflexError::EmptyReferences);
    }
    Ok(())
}

/// Sufficient statistics for corpus BLEU. Adding two of these is the same as
/// computing them over the concatenated corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    pub correct: [usize; MAX_ORDER],
    pub total: [usize; MAX_ORDER],
}

impl std::ops::Add for BleuStats {
    type Output = BleuStats;
    fn add(mut self, o: BleuStats) -> BleuStats {
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
        for n in 0..MAX_ORDER {
            self.correct[n] += o.correct[n];
            self.total[n] += o.total[n];
        }
        self
    }
}

fn ngram_counts<T: Eq + Hash>(toks: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

impl BleuStats {
    pub fn sentence<T: Eq + Hash>(hyp: &[T], reference: &[T]) -> BleuStats {
        let mut s = BleuStats {
            hyp_len: hyp.len(),
            ref_len: reference.len(),
            ..BleuStats::default()
        };
        for n in 1..=MAX_ORDER {
            let h = ngram_counts(hyp, n);
            let r = ngram_counts(reference, n);
            s.total[n - 1] = hyp.len().saturating_sub(n - 1);
            s.correct[n - 1] = h
                .iter()
                .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
                .sum();
        }
        s
    }

    /// Score in [0, 100].
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut smooth = 1.0;
        let mut order = 0;
        for n in 0..MAX_ORDER {
            if self.total[n] == 0 {
                // no hypothesis is long enough for this order: average over
                // the lower orders only, so bleu(h, h) is 100 for short h
                break;
            }
            order += 1;
            let p = if self.correct[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.total[n] as f64)
            } else {
                self.correct[n] as f64 / self.total[n] as f64
            };
            log_sum += p.ln();
        }
        let bp = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        100.0 * bp * (log_sum / order as f64).exp()
    }
}

pub fn bleu_stats<T: Eq + Hash + Sync>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<BleuStats, ReflexError> {
    check(hyps, refs)?;
    Ok(hyps
        .par_iter()
        .zip(refs)
        .map(|(h, r)| BleuStats::sentence(h, r))
        .reduce(BleuStats::default, |a, b| a + b))
}

pub fn bleu<T: Eq + Hash + Sync>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<f64, ReflexError> {
    Ok(bleu_stats(hyps, refs)?.score())
}

/// Edits and reference length for one pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TerStats {
    pub shifts: usize,
    pub edits: usize,
    pub ref_len: usize,
}

impl std::ops::Add for TerStats {
    type Output = TerStats;
    fn add(self, o: TerStats) -> TerStats {
        TerStats {
            shifts: self.shifts + o.shifts,
            edits: self.edits + o.edits,
            ref_len: self.ref_len + o.ref_len,
        }
    }
}

impl TerStats {
    /// Total edits (shifts included) per reference token, as a percentage.
    /// An empty reference side scores 0 against an empty hypothesis and 100
    /// otherwise.
    pub fn score(&self) -> f64 {
        let total = self.shifts + self.edits;
        if self.ref_len == 0 {
            return if total == 0 { 0.0 } else { 100.0 };
        }
        100.0 * total as f64 / self.ref_len as f64
    }
}

pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `toks` with the block `[start, start+len)` moved so that it begins at
/// index `to` of the remaining sequence.
fn shifted<T: Clone>(toks: &[T], start: usize, len: usize, to: usize) -> Vec<T> {
    let mut rest: Vec<T> = Vec::with_capacity(toks.len());
    rest.extend_from_slice(&toks[..start]);
    rest.extend_from_slice(&toks[start + len..]);
    let mut out = Vec::with_capacity(toks.len());
    out.extend_from_slice(&rest[..to]);
    out.extend_from_slice(&toks[start..start + len]);
    out.extend_from_slice(&rest[to..]);
    out
}

/// Greedy shift search followed by Levenshtein distance. Each round tries
/// every block move and applies the one giving the smallest distance, as
/// long as it improves on the current one; the first candidate in
/// (start, length, destination) order wins ties.
pub fn ter_sentence<T: PartialEq + Clone>(hyp: &[T], reference: &[T]) -> TerStats {
    let mut cur = hyp.to_vec();
    let mut dist = levenshtein(&cur, reference);
    let mut shifts = 0;
    while dist > 0 {
        let mut best: Option<(usize, Vec<T>)> = None;
        let n = cur.len();
        for start in 0..n {
            for len in 1..=MAX_SHIFT_SIZE.min(n - start) {
                for to in 0..=(n - len) {
                    if to == start || to.abs_diff(start) > MAX_SHIFT_DIST {
                        continue;
                    }
                    let cand = shifted(&cur, start, len, to);
                    let d = levenshtein(&cand, reference);
                    if d < best.as_ref().map_or(dist, |b| b.0) {
                        best = Some((d, cand));
                    }
                }
            }
        }
        match best {
            Some((d, cand)) => {
                cur = cand;
                dist = d;
                shifts += 1;
            }
            None => break,
        }
    }
    TerStats {
        shifts,
        edits: dist,
        ref_len: reference.len(),
    }
}

pub fn ter_stats<T: PartialEq + Clone + Sync>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<TerStats, ReflexError> {
    check(hyps, refs)?;
    Ok(hyps
        .par_iter()
        .zip(refs)
        .map(|(h, r)| ter_sentence(h, r))
        .reduce(TerStats::default, |a, b| a + b))
}

pub fn ter<T: PartialEq + Clone + Sync>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<f64, ReflexError> {
    Ok(ter_stats(hyps, refs)?.score())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn bleu_hand_cases() {
        let b = bleu(&[v("abcd")], &[v("abcde")]).unwrap();
        // every precision is 1; only the brevity penalty exp(1 - 5/4) applies
        assert!((b - 100.0 * (-0.25f64).exp()).abs() < 1e-9);
        assert!((b - 77.880).abs() < 1e-3);
        assert_eq!(bleu(&[v("abcde")], &[v("abcde")]).unwrap(), 100.0);
        assert_eq!(bleu(&[v(""), v("")], &[v("ab"), v("c")]).unwrap(), 0.0);
        // too short for 3- and 4-grams: mean of the first two orders
        assert_eq!(bleu(&[v("ab")], &[v("ab")]).unwrap(), 100.0);
        let b = bleu(&[v("ab")], &[v("ac")]).unwrap();
        let p = [0.5f64, 1.0 / (2.0 * 1.0)];
        let want = 100.0 * (p.iter().map(|x| x.ln()).sum::<f64>() / 2.0).exp();
        assert!((b - want).abs() < 1e-9, "{b} vs {want}");
    }

    #[test]
    fn bleu_exp_smoothing() {
        // 1-grams 3/4, 2-grams 1/3, 3-grams 0/2, 4-grams 0/1
        let b = bleu(&[v("abxc")], &[v("abyc")]).unwrap();
        let p = [0.75f64, 1.0 / 3.0, 1.0 / (2.0 * 2.0), 1.0 / (4.0 * 1.0)];
        let want = 100.0 * (p.iter().map(|x| x.ln()).sum::<f64>() / 4.0).exp();
        assert!((b - want).abs() < 1e-9, "{b} vs {want}");
    }

    #[test]
    fn errors() {
        assert!(matches!(bleu::<char>(&[], &[]), Err(ReflexError::EmptyReferences)));
        assert!(matches!(
            ter(&[v("a")], &[v("a"), v("b")]),
            Err(ReflexError::LengthMismatch { hypotheses: 1, references: 2 })
        ));
    }

    #[test]
    fn ter_hand_cases() {
        assert_eq!(ter(&[v("abcd")], &[v("abcd")]).unwrap(), 0.0);
        assert_eq!(ter(&[v("a")], &[v("ab")]).unwrap(), 50.0);
        let s = ter_sentence(&v("cdab"), &v("abcd"));
        assert_eq!((s.shifts, s.edits), (1, 0));
        assert_eq!(s.score(), 25.0);
    }

    #[test]
    fn shift_moves_block() {
        assert_eq!(shifted(&v("abcde"), 1, 2, 0), v("bcade"));
        assert_eq!(shifted(&v("abcde"), 0, 2, 3), v("cdeab"));
        assert_eq!(shifted(&v("abcde"), 3, 1, 1), v("adbce"));
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein(&v("kitten"), &v("sitting")), 3);
        assert_eq!(levenshtein(&v(""), &v("abc")), 3);
        assert_eq!(levenshtein(&v("abc"), &v("")), 3);
    }
}
