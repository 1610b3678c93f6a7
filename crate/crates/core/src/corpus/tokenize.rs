use super::clean::KEPT_PUNCTUATION;
use super::CorpusError;

/// Contraction suffixes split off as their own tokens, longest first.
const CLITICS: [&str; 7] = ["n't", "'ll", "'re", "'ve", "'s", "'d", "'m"];

const LEADING: &[char] = &['"', '\'', '('];
const TRAILING: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', ')'];
// split even in the middle of a word
const ALWAYS_SPLIT: &[char] = &[',', ';', '!', '?', '"', '(', ')'];

fn is_punct_only(token: &str) -> bool {
    token.chars().all(|c| KEPT_PUNCTUATION.contains(c))
}

fn is_clitic(token: &str) -> bool {
    CLITICS.contains(&token)
}

fn split_clitic(word: &str) -> (&str, Option<&str>) {
    for clitic in CLITICS {
        if let Some(stem) = word.strip_suffix(clitic) {
            if !stem.is_empty() && !stem.ends_with('\'') {
                return (stem, Some(clitic));
            }
        }
    }
    (word, None)
}

fn push_piece<'a>(piece: &'a str, out: &mut Vec<&'a str>) {
    let mut core = piece;
    // Leading quote/paren, unless the piece is a bare clitic like "'s".
    while let Some(c) = core.chars().next() {
        if LEADING.contains(&c) && !is_clitic(core.trim_end_matches(TRAILING)) {
            out.push(&core[..1]);
            core = &core[1..];
        } else {
            break;
        }
    }
    let mut trailing = Vec::new();
    while let Some(c) = core.chars().last() {
        if TRAILING.contains(&c) && !is_clitic(core) {
            let at = core.len() - 1;
            trailing.push(&core[at..]);
            core = &core[..at];
        } else {
            break;
        }
    }
    if !core.is_empty() {
        match split_clitic(core) {
            (stem, Some(clitic)) => {
                out.push(stem);
                out.push(clitic);
            }
            (word, None) => out.push(word),
        }
    }
    out.extend(trailing.into_iter().rev());
}

/// PTB-style word tokenization of already cleaned text.
///
/// Lowercases, splits on whitespace, detaches clause punctuation and English
/// clitics, then discards tokens made only of punctuation.
pub fn tokenize(text: &str) -> Result<Vec<String>, CorpusError> {
    let lowered = text.to_ascii_lowercase();
    let mut pieces = Vec::new();
    for chunk in lowered.split_whitespace() {
        for piece in chunk.split_inclusive(ALWAYS_SPLIT) {
            let (word, sep) = match piece.char_indices().last() {
                Some((i, c)) if ALWAYS_SPLIT.contains(&c) => (&piece[..i], Some(&piece[i..])),
                _ => (piece, None),
            };
            if !word.is_empty() {
                push_piece(word, &mut pieces);
            }
            pieces.extend(sep);
        }
    }
    let tokens: Vec<String> = pieces
        .into_iter()
        .filter(|t| !t.is_empty() && !is_punct_only(t))
        .map(str::to_owned)
        .collect();
    if tokens.is_empty() {
        return Err(CorpusError::EmptyAfterTokenization);
    }
    Ok(tokens)
}
