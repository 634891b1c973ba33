use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingProvider;
use crate::corpus::Document;
use crate::error::{Error, Result};

/// 64-bit FNV-1a over the length-prefixed tokens. Stable across platforms.
pub fn sentence_hash(tokens: &[String]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(&(tokens.len() as u64).to_le_bytes());
    for t in tokens {
        feed(&(t.len() as u64).to_le_bytes());
        feed(t.as_bytes());
    }
    h
}

/// Deterministic pseudo-embedding of a token sequence: `dim` values in the
/// open interval (-1, 1) drawn from ChaCha8 seeded with [`sentence_hash`].
pub fn test_embed(tokens: &[String], dim: usize) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(sentence_hash(tokens));
    (0..dim)
        .map(|_| loop {
            let v = 2.0 * rng.gen::<f64>() - 1.0;
            if v > -1.0 {
                break v;
            }
        })
        .collect()
}

/// Provider that embeds every sentence with [`test_embed`].
///
/// Token occurrences are the average of the token's own vector and its
/// sentence vector, so the same word gets different vectors in different
/// sentences.
#[derive(Clone, Copy, Debug)]
pub struct HashEmbedder {
    dim: usize,
}

impl HashEmbedder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashEmbedder { dim }
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sentence_rows(&self, doc: &Document) -> Result<Array2<f64>> {
        let mut rows = Array2::zeros((doc.sentences.len(), self.dim));
        for (mut row, s) in rows.outer_iter_mut().zip(&doc.sentences) {
            row.assign(&test_embed(s, self.dim));
        }
        Ok(rows)
    }

    fn embed_sentence(&self, tokens: &[String]) -> Result<Array1<f64>> {
        Ok(test_embed(tokens, self.dim))
    }

    fn embed_token(&self, doc: &Document, sentence: usize, token: usize) -> Result<Array1<f64>> {
        let s = doc
            .sentences
            .get(sentence)
            .ok_or_else(|| Error::Provider(format!("sentence {sentence} out of range")))?;
        let t = s
            .get(token)
            .ok_or_else(|| Error::Provider(format!("token {token} out of range")))?;
        let word = test_embed(std::slice::from_ref(t), self.dim);
        let context = test_embed(s, self.dim);
        Ok((word + context) * 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn empty_sentence_is_fixed() {
        let a = test_embed(&[], 16);
        let b = test_embed(&[], 16);
        assert_eq!(a, b);
        assert_eq!(sentence_hash(&[]), sentence_hash(&[]));
        // FNV-1a of eight zero bytes (the length prefix), computed independently.
        assert_eq!(sentence_hash(&[]), 0xa8c7_f832_281a_39c5_u64);
    }

    #[test]
    fn values_in_open_interval() {
        let v = test_embed(&toks("the quick brown fox"), 4096);
        assert!(v.iter().all(|x| *x > -1.0 && *x < 1.0));
    }

    #[test]
    fn token_boundaries_matter() {
        assert_ne!(
            sentence_hash(&toks("ab c")),
            sentence_hash(&toks("a bc"))
        );
    }

    #[test]
    fn no_collisions_on_ten_thousand_sentences() {
        let mut seen = HashSet::new();
        for i in 0..10_000 {
            let s = vec!["vote".to_string(), format!("w{i}"), "today".to_string()];
            let v = test_embed(&s, 8);
            let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
            assert!(seen.insert(key), "collision at {i}");
        }
    }

    #[test]
    fn one_token_difference_changes_vector() {
        let a = test_embed(&toks("we support the bill"), 32);
        let b = test_embed(&toks("we oppose the bill"), 32);
        assert_ne!(a, b);
    }
}
