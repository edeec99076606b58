//! Unicode helpers shared by every module.
//!
//! All comparisons in the crate are made on NFC text. Folding (used by the
//! optional diacritic-insensitive search) decomposes to NFD and drops
//! combining marks.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Returns `s` in NFC, borrowing-free.
pub fn nfc(s: &str) -> String {
    if is_nfc(s) {
        s.to_owned()
    } else {
        s.nfc().collect()
    }
}

/// Normalizes in place, avoiding a reallocation when already NFC.
pub fn nfc_in_place(s: &mut String) {
    if !is_nfc(s) {
        *s = s.nfc().collect();
    }
}

pub fn nfc_opt(s: &mut Option<String>) {
    match s {
        Some(v) if v.is_empty() => *s = None,
        Some(v) => nfc_in_place(v),
        None => {}
    }
}

/// Lowercased NFC key used for case-insensitive substring matching.
pub fn search_key(s: &str) -> String {
    nfc(&s.to_lowercase())
}

/// Lowercased key with all combining marks removed (`ā` matches `a`).
pub fn folded_key(s: &str) -> String {
    s.to_lowercase()
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .nfc()
        .collect()
}

/// Char index of the first occurrence of `needle` in `haystack`.
pub fn char_find(haystack: &str, needle: &str) -> Option<usize> {
    haystack
        .find(needle)
        .map(|byte| haystack[..byte].chars().count())
}
