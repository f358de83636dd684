use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Bidirectional lemma/index map with dense indices in first-insertion
/// order. Freezing pins the assignment; lookups on a frozen vocabulary never
/// allocate new indices.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    lemmas: Vec<String>,
    index: HashMap<String, usize>,
    frozen: bool,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.lemmas == other.lemmas && self.frozen == other.frozen
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    /// Index of `lemma`, inserting it if unseen. Fails once frozen.
    pub fn add(&mut self, lemma: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(lemma) {
            return Ok(i);
        }
        if self.frozen {
            return Err(Error::config(format!(
                "cannot add '{lemma}' to a frozen vocabulary"
            )));
        }
        let i = self.lemmas.len();
        self.lemmas.push(lemma.to_string());
        self.index.insert(lemma.to_string(), i);
        Ok(i)
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn index_of(&self, lemma: &str) -> Option<usize> {
        self.index.get(lemma).copied()
    }

    pub fn lemma(&self, index: usize) -> Option<&str> {
        self.lemmas.get(index).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.lemmas.iter().map(String::as_str)
    }

    /// One lemma per line; the line number is the index.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        for lemma in &self.lemmas {
            writeln!(out, "{lemma}")?;
        }
        Ok(())
    }

    /// Reads a lemma-per-line file into a frozen vocabulary.
    pub fn read_file(path: &Path) -> Result<Vocabulary> {
        let mut vocab = Vocabulary::new();
        for (idx, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let lemma = line?;
            let i = vocab.add(&lemma)?;
            if i != idx {
                return Err(Error::parse(
                    idx + 1,
                    format!("duplicate lemma '{lemma}' in vocabulary file"),
                ));
            }
        }
        vocab.freeze();
        Ok(vocab)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_follow_first_occurrence() {
        let mut v = Vocabulary::new();
        assert_eq!(v.add("b").unwrap(), 0);
        assert_eq!(v.add("a").unwrap(), 1);
        assert_eq!(v.add("b").unwrap(), 0);
        assert_eq!(v.lemma(1), Some("a"));
        assert_eq!(v.index_of("a"), Some(1));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn frozen_vocab_rejects_new_lemmas() {
        let mut v = Vocabulary::new();
        v.add("a").unwrap();
        v.freeze();
        assert_eq!(v.add("a").unwrap(), 0);
        assert!(v.add("b").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        let mut v = Vocabulary::new();
        v.add("walk").unwrap();
        v.add("run").unwrap();
        v.freeze();
        v.write_file(&path).unwrap();
        let back = Vocabulary::read_file(&path).unwrap();
        assert_eq!(back, v);
    }
}
