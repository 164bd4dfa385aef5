use rustc_hash::FxHashMap;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// Interned token strings. `<unk>` is always id 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: FxHashMap<String, u32>,
}

impl Default for Vocab {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocab {
    pub const UNK_ID: u32 = 0;

    pub fn new() -> Self {
        let mut vocab = Vocab { tokens: Vec::new(), ids: FxHashMap::default() };
        vocab.intern(UNK);
        vocab
    }

    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = u32::try_from(self.tokens.len()).expect("vocabulary exceeds u32 ids");
        self.tokens.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Id of `token`, or the `<unk>` id for out-of-vocabulary tokens.
    pub fn id_or_unk(&self, token: &str) -> u32 {
        self.get(token).unwrap_or(Self::UNK_ID)
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.tokens.iter().enumerate().map(|(i, t)| (i as u32, t.as_str()))
    }

    /// Canonical ordering: `<unk>`, then `<s>` and `</s>` when present, then
    /// the remaining tokens sorted bytewise. Returns the new vocabulary and a
    /// map from old ids to new ids.
    pub fn canonicalize(&self) -> (Vocab, Vec<u32>) {
        let mut rest: Vec<&str> = self
            .tokens
            .iter()
            .map(String::as_str)
            .filter(|t| ![UNK, BOS, EOS].contains(t))
            .collect();
        rest.sort_unstable();
        let mut out = Vocab::new();
        for special in [BOS, EOS] {
            if self.contains(special) {
                out.intern(special);
            }
        }
        for t in rest {
            out.intern(t);
        }
        let remap = self.tokens.iter().map(|t| out.ids[t.as_str()]).collect();
        (out, remap)
    }
}
