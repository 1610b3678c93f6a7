/// Punctuation characters that survive cleaning.
pub const KEPT_PUNCTUATION: &str = ".,;:!?'\"()-/&%$#@";

fn is_kept(c: char) -> bool {
    c.is_ascii_alphanumeric() || KEPT_PUNCTUATION.contains(c)
}

/// Reduce raw caption text to ASCII letters, digits, a fixed punctuation set
/// and single spaces.
///
/// Every other code point is deleted outright (it does not act as a word
/// separator). Runs of whitespace, line breaks included, become one space and
/// the result carries no leading or trailing space.
pub fn clean_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else if is_kept(c) {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}
