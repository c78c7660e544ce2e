//! Tokenization shared by retrieval, annotation, keyword extraction and
//! embedding training.
//!
//! A token is a maximal run of alphanumeric characters. Offsets are character
//! offsets (not byte offsets) into the source text.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub start: usize,
    pub end: usize,
    /// Lowercased token text.
    pub text: String,
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut pos = 0;
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            if current.is_empty() {
                start = pos;
            }
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(Token {
                start,
                end: pos,
                text: std::mem::take(&mut current),
            });
        }
        pos += 1;
    }
    if !current.is_empty() {
        tokens.push(Token {
            start,
            end: pos,
            text: current,
        });
    }
    tokens
}

/// Lowercased token texts only.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.text).collect()
}

/// Canonical lowercase form of a phrase: its tokens joined by single spaces.
pub fn normalize_phrase(phrase: &str) -> String {
    words(phrase).join(" ")
}

/// Substring of `text` between two character offsets.
pub fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

const STOPWORDS: &[&str] = &[
    "a", "about", "after", "again", "against", "all", "also", "an", "and", "any", "are", "as",
    "at", "be", "been", "before", "being", "but", "by", "can", "could", "did", "do", "does",
    "down", "during", "each", "for", "from", "had", "has", "have", "he", "her", "his", "how",
    "i", "if", "in", "into", "is", "it", "its", "just", "more", "most", "no", "not", "of", "off",
    "on", "once", "only", "or", "other", "our", "out", "over", "said", "says", "she", "so",
    "some", "than", "that", "the", "their", "them", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "up", "very", "was", "we", "were", "what", "when",
    "where", "which", "while", "who", "why", "will", "with", "would", "you", "your",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}
