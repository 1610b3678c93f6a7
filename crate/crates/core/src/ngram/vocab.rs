use rustc_hash::FxHashMap;

pub type TokenId = u32;

pub const BOS: TokenId = 0;
pub const EOS: TokenId = 1;
pub const UNK: TokenId = 2;

pub const BOS_TOKEN: &str = "<s>";
pub const EOS_TOKEN: &str = "</s>";
pub const UNK_TOKEN: &str = "<unk>";

const RESERVED: [&str; 3] = [BOS_TOKEN, EOS_TOKEN, UNK_TOKEN];

/// String interner with the three reserved symbols at ids 0, 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    ids: FxHashMap<String, TokenId>,
    words: Vec<String>,
}

impl Default for Vocab {
    fn default() -> Self {
        let mut vocab = Self { ids: FxHashMap::default(), words: Vec::new() };
        for tok in RESERVED {
            vocab.intern(tok);
        }
        vocab
    }
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, token: &str) -> TokenId {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = TokenId::try_from(self.words.len()).expect("vocabulary exceeds u32 ids");
        self.words.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    pub fn get(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn word(&self, id: TokenId) -> &str {
        &self.words[id as usize]
    }

    /// Number of ids including the reserved symbols.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_special(id: TokenId) -> bool {
        id <= UNK
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub(crate) fn from_words(words: Vec<String>) -> Result<Self, String> {
        if words.len() < RESERVED.len() || words[..3] != RESERVED {
            return Err("reserved symbols missing from stored vocabulary".into());
        }
        let mut ids = FxHashMap::default();
        for (i, w) in words.iter().enumerate() {
            if ids.insert(w.clone(), i as TokenId).is_some() {
                return Err(format!("duplicate vocabulary entry {w:?}"));
            }
        }
        Ok(Self { ids, words })
    }
}
