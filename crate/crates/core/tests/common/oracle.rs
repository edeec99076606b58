//! Naive BLEU and TER written from the metric definitions, and the random
//! corpora they are checked on (five symbols, sentences of 1 to 6 tokens).

use jambu::reflex::metrics::MAX_SHIFT_SIZE;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TRIALS: usize = 2000;

pub type Corpus = Vec<Vec<u8>>;

pub fn random_corpus(rng: &mut ChaCha8Rng) -> (Corpus, Corpus) {
    let n = rng.gen_range(1..=5);
    let gen = |rng: &mut ChaCha8Rng, min: usize| -> Vec<u8> {
        let len = rng.gen_range(min..=6);
        (0..len).map(|_| rng.gen_range(0..5u8)).collect()
    };
    // hypotheses may be empty now and then; references are never empty
    let hyps = (0..n).map(|_| if rng.gen_bool(0.05) { vec![] } else { gen(rng, 1) }).collect();
    let refs = (0..n).map(|_| gen(rng, 1)).collect();
    (hyps, refs)
}

/// BLEU straight from the definition: count each n-gram by scanning, clip by
/// the reference count, smooth zero orders with 1/(2^k * total).
pub fn oracle_bleu(hyps: &Corpus, refs: &Corpus) -> f64 {
    fn count(seq: &[u8], gram: &[u8]) -> usize {
        (0..seq.len()).filter(|&i| seq[i..].starts_with(gram)).count()
    }
    let hyp_len: usize = hyps.iter().map(Vec::len).sum();
    let ref_len: usize = refs.iter().map(Vec::len).sum();
    if hyp_len == 0 {
        return 0.0;
    }
    let mut logs = Vec::new();
    let mut k = 0;
    for n in 1..=4usize {
        let mut correct = 0usize;
        let mut total = 0usize;
        for (h, r) in hyps.iter().zip(refs) {
            if h.len() < n {
                continue;
            }
            total += h.len() - n + 1;
            let mut distinct: Vec<&[u8]> = h.windows(n).collect();
            distinct.sort();
            distinct.dedup();
            for g in distinct {
                correct += count(h, g).min(count(r, g));
            }
        }
        if total == 0 {
            break;
        }
        let p = if correct == 0 {
            k += 1;
            1.0 / (2f64.powi(k) * total as f64)
        } else {
            correct as f64 / total as f64
        };
        logs.push(p.ln());
    }
    let bp = if hyp_len < ref_len { (1.0 - ref_len as f64 / hyp_len as f64).exp() } else { 1.0 };
    100.0 * bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}

/// Edit distance over a full table.
pub fn oracle_lev(a: &[u8], b: &[u8]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in t[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
        }
    }
    t[a.len()][b.len()]
}

/// Greedy TER: each round, look at every block move in (start, len, dest)
/// order and keep the first one with the strictly lowest distance below the
/// current one. Writes the moved sequence with Vec::drain/splice rather
/// than slicing.
pub fn oracle_ter_sentence(hyp: &[u8], reference: &[u8]) -> (usize, usize) {
    let mut cur = hyp.to_vec();
    let mut shifts = 0;
    loop {
        let here = oracle_lev(&cur, reference);
        if here == 0 {
            return (shifts, 0);
        }
        let mut best: Option<(usize, Vec<u8>)> = None;
        for start in 0..cur.len() {
            for len in 1..=MAX_SHIFT_SIZE {
                if start + len > cur.len() {
                    break;
                }
                for dest in 0..=cur.len() - len {
                    if dest == start {
                        continue;
                    }
                    let mut rest = cur.clone();
                    let block: Vec<u8> = rest.drain(start..start + len).collect();
                    rest.splice(dest..dest, block);
                    let d = oracle_lev(&rest, reference);
                    let bar = best.as_ref().map(|b| b.0).unwrap_or(here);
                    if d < bar {
                        best = Some((d, rest));
                    }
                }
            }
        }
        match best {
            Some((_, next)) => {
                cur = next;
                shifts += 1;
            }
            None => return (shifts, here),
        }
    }
}

pub fn oracle_ter(hyps: &Corpus, refs: &Corpus) -> f64 {
    let mut edits = 0;
    let mut len = 0;
    for (h, r) in hyps.iter().zip(refs) {
        let (s, e) = oracle_ter_sentence(h, r);
        edits += s + e;
        len += r.len();
    }
    100.0 * edits as f64 / len as f64
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}
