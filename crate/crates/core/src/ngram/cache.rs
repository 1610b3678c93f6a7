//! Binary snapshot of a count table.
//!
//! Layout (little endian):
//!
//! ```text
//! magic "KNCT" | version u16 | order u8 | tag len u32 + utf8 bytes
//! vocab size u32 | per word: len u32 + utf8 bytes, in id order
//! n unigrams u64 | (id u32, count u64)*          sorted by id
//! n bigrams  u64 | (id u32, id u32, count u64)*  sorted
//! n trigrams u64 | (id u32 x3, count u64)*       sorted
//! ```
//!
//! Only raw counts are stored; derived statistics are recomputed on load.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rustc_hash::FxHashMap;

use super::table::NgramCountTable;
use super::vocab::{TokenId, Vocab};
use super::{CountSource, NgramError, Order};

const MAGIC: &[u8; 4] = b"KNCT";
const VERSION: u16 = 1;

fn bad(msg: impl Into<String>) -> NgramError {
    NgramError::Cache(msg.into())
}

fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_str<R: Read>(r: &mut R) -> Result<String, NgramError> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    let mut buf = vec![0; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| bad(e.to_string()))
}

impl NgramCountTable {
    /// Serialize raw counts. `tag` is an opaque label such as a dataset
    /// fingerprint, returned by [`NgramCountTable::read_cache`].
    pub fn write_cache<W: Write>(&self, mut w: W, tag: &str) -> Result<(), NgramError> {
        w.write_all(MAGIC)?;
        w.write_u16::<LittleEndian>(VERSION)?;
        w.write_u8(self.order().n() as u8)?;
        write_str(&mut w, tag)?;
        let words = self.vocab().words();
        w.write_u32::<LittleEndian>(words.len() as u32)?;
        for word in words {
            write_str(&mut w, word)?;
        }
        let unigrams: Vec<(usize, u64)> =
            self.unigrams.iter().copied().enumerate().filter(|&(_, c)| c > 0).collect();
        w.write_u64::<LittleEndian>(unigrams.len() as u64)?;
        for (id, c) in unigrams {
            w.write_u32::<LittleEndian>(id as u32)?;
            w.write_u64::<LittleEndian>(c)?;
        }
        let mut bigrams: Vec<_> = self.bigrams.iter().map(|(&k, &c)| (k, c)).collect();
        bigrams.sort_unstable();
        w.write_u64::<LittleEndian>(bigrams.len() as u64)?;
        for ((a, b), c) in bigrams {
            w.write_u32::<LittleEndian>(a)?;
            w.write_u32::<LittleEndian>(b)?;
            w.write_u64::<LittleEndian>(c)?;
        }
        let mut trigrams: Vec<_> = self.trigrams.iter().map(|(&k, &c)| (k, c)).collect();
        trigrams.sort_unstable();
        w.write_u64::<LittleEndian>(trigrams.len() as u64)?;
        for ((a, b, t), c) in trigrams {
            w.write_u32::<LittleEndian>(a)?;
            w.write_u32::<LittleEndian>(b)?;
            w.write_u32::<LittleEndian>(t)?;
            w.write_u64::<LittleEndian>(c)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`NgramCountTable::write_cache`]; returns the table and its tag.
    pub fn read_cache<R: Read>(mut r: R) -> Result<(Self, String), NgramError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a count cache"));
        }
        let version = r.read_u16::<LittleEndian>()?;
        if version != VERSION {
            return Err(bad(format!("unsupported cache version {version}")));
        }
        let order = Order::try_from(r.read_u8()? as usize)?;
        let tag = read_str(&mut r)?;
        let n_words = r.read_u32::<LittleEndian>()? as usize;
        let words = (0..n_words).map(|_| read_str(&mut r)).collect::<Result<Vec<_>, _>>()?;
        let vocab = Vocab::from_words(words).map_err(bad)?;
        let check = |id: u32| -> Result<TokenId, NgramError> {
            if (id as usize) < n_words {
                Ok(id)
            } else {
                Err(bad(format!("token id {id} outside vocabulary")))
            }
        };
        let mut unigrams = vec![0u64; n_words];
        for _ in 0..r.read_u64::<LittleEndian>()? {
            let id = check(r.read_u32::<LittleEndian>()?)?;
            unigrams[id as usize] = r.read_u64::<LittleEndian>()?;
        }
        let mut bigrams = FxHashMap::default();
        for _ in 0..r.read_u64::<LittleEndian>()? {
            let a = check(r.read_u32::<LittleEndian>()?)?;
            let b = check(r.read_u32::<LittleEndian>()?)?;
            bigrams.insert((a, b), r.read_u64::<LittleEndian>()?);
        }
        let mut trigrams = FxHashMap::default();
        for _ in 0..r.read_u64::<LittleEndian>()? {
            let a = check(r.read_u32::<LittleEndian>()?)?;
            let b = check(r.read_u32::<LittleEndian>()?)?;
            let t = check(r.read_u32::<LittleEndian>()?)?;
            trigrams.insert((a, b, t), r.read_u64::<LittleEndian>()?);
        }
        if order == Order::Bigram && !trigrams.is_empty() {
            return Err(bad("bigram cache carries trigram counts"));
        }
        Ok((Self::from_raw(order, vocab, unigrams, bigrams, trigrams), tag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::build_counts;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(lines in prop::collection::vec(prop::collection::vec("[a-e]{1,2}", 1..6), 1..12), tri in any::<bool>()) {
            let order = if tri { Order::Trigram } else { Order::Bigram };
            let table = build_counts(&lines, order);
            let mut buf = Vec::new();
            table.write_cache(&mut buf, "fp").unwrap();
            let (back, tag) = NgramCountTable::read_cache(buf.as_slice()).unwrap();
            prop_assert_eq!(tag, "fp");
            prop_assert_eq!(back, table);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(NgramCountTable::read_cache(&b"NOPE...."[..]), Err(NgramError::Cache(_))));
        let table = build_counts(&[vec!["a".to_string()]], Order::Bigram);
        let mut buf = Vec::new();
        table.write_cache(&mut buf, "").unwrap();
        buf.truncate(buf.len() - 3);
        assert!(NgramCountTable::read_cache(buf.as_slice()).is_err());
    }
}
