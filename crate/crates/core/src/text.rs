//! Whitespace tokens and rule-based sentence segmentation.

/// Number of whitespace-separated tokens.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Pluggable sentence boundary detection.
pub trait SentenceSplitter: Send + Sync {
    fn split(&self, text: &str) -> Vec<String>;
}

/// Splits on terminal punctuation (`.`, `!`, `?`) followed by whitespace,
/// skipping known abbreviations, single-letter initials and boundaries where
/// the next word starts lowercase.
#[derive(Debug, Clone, Default)]
pub struct RuleSplitter;

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "gen", "col", "lt", "sgt", "capt", "gov", "sen",
    "rep", "rev", "hon", "pres", "inc", "ltd", "co", "corp", "vs", "etc", "e.g", "i.e", "cf", "al", "approx", "no",
    "nos", "vol", "fig", "figs", "ed", "eds", "u.s", "u.k", "u.n", "jan", "feb", "mar", "apr", "jun", "jul", "aug",
    "sep", "sept", "oct", "nov", "dec", "a.m", "p.m",
];

const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']'];

impl RuleSplitter {
    fn is_abbreviation(token: &str) -> bool {
        let word = token
            .trim_start_matches(|c: char| !c.is_alphanumeric())
            .trim_end_matches('.')
            .to_lowercase();
        if word.chars().count() == 1 && word.chars().all(char::is_alphabetic) {
            return true;
        }
        ABBREVIATIONS.contains(&word.as_str())
    }
}

impl SentenceSplitter for RuleSplitter {
    fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut sentences = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (_, c) = chars[i];
            if matches!(c, '.' | '!' | '?') {
                let mut end = i + 1;
                while end < chars.len() && (matches!(chars[end].1, '.' | '!' | '?') || CLOSERS.contains(&chars[end].1)) {
                    end += 1;
                }
                let followed_by_space = end < chars.len() && chars[end].1.is_whitespace();
                if followed_by_space {
                    let mut next = end;
                    while next < chars.len() && chars[next].1.is_whitespace() {
                        next += 1;
                    }
                    let next_char = chars.get(next).map(|(_, ch)| *ch);
                    let byte_end = chars.get(end).map(|(b, _)| *b).unwrap_or(text.len());
                    let token_start = text[..chars[i].0].rfind(char::is_whitespace).map(|p| p + 1).unwrap_or(0);
                    let token = &text[token_start..chars[i].0 + c.len_utf8()];
                    let abbreviation = c == '.' && Self::is_abbreviation(token);
                    let lowercase_next = next_char.is_some_and(char::is_lowercase);
                    if !abbreviation && !lowercase_next && next_char.is_some() {
                        let sentence = text[start..byte_end].trim();
                        if !sentence.is_empty() {
                            sentences.push(sentence.to_string());
                        }
                        start = chars[next].0;
                        i = next;
                        continue;
                    }
                }
                i = end;
                continue;
            }
            i += 1;
        }
        let tail = text[start..].trim();
        if !tail.is_empty() {
            sentences.push(tail.to_string());
        }
        sentences
    }
}

/// Treats the input as already segmented, one sentence per line.
#[derive(Debug, Clone, Default)]
pub struct LineSplitter;

impl SentenceSplitter for LineSplitter {
    fn split(&self, text: &str) -> Vec<String> {
        text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
    }
}
