//! JSONL readers and writers for instances and raw sentences. One object per
//! line, UTF-8, LF line endings; blank lines are skipped.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::corpus::types::{Instance, Sentence};
use crate::error::{Error, Result};

/// Loads sense-tagged (or unlabeled) instances, preserving file order.
/// Malformed lines fail with their 1-based line number.
pub fn load_instances(path: &Path) -> Result<Vec<Instance>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: Instance = serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e))?;
        inst.validate().map_err(|msg| Error::parse(idx + 1, msg))?;
        out.push(inst);
    }
    Ok(out)
}

/// Streams the sentences of a raw corpus through `f` without holding the
/// corpus in memory.
pub fn for_each_sentence(path: &Path, mut f: impl FnMut(Sentence)) -> Result<()> {
    let reader = BufReader::new(File::open(path)?);
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let sent: Sentence = serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e))?;
        sent.validate().map_err(|msg| Error::parse(idx + 1, msg))?;
        f(sent);
    }
    Ok(())
}

pub fn load_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let mut out = Vec::new();
    for_each_sentence(path, |s| out.push(s))?;
    Ok(out)
}

pub fn write_instances(path: &Path, instances: &[Instance]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for inst in instances {
        serde_json::to_writer(&mut out, inst).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_sentences(path: &Path, sentences: &[Sentence]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for sent in sentences {
        serde_json::to_writer(&mut out, sent).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::Token;

    fn write_lines(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn empty_file_yields_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(&dir, "empty.jsonl", "");
        assert!(load_instances(&path).unwrap().is_empty());
    }

    #[test]
    fn well_formed_line_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let inst = Instance {
            id: "i1".into(),
            target_lemma: "bank".into(),
            target_index: 1,
            sense_id: Some("s1".into()),
            tokens: vec![
                Token::new("the", "DET"),
                Token::new("bank", "NOUN").with_head(0, "det"),
            ],
        };
        let path = dir.path().join("one.jsonl");
        write_instances(&path, std::slice::from_ref(&inst)).unwrap();
        let back = load_instances(&path).unwrap();
        assert_eq!(back, vec![inst]);
    }

    #[test]
    fn bad_head_index_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let good = r#"{"id":"a","target_lemma":"t","target_index":0,"sense_id":null,"tokens":[{"surface":"t","lemma":"t","pos":"N","head":null,"deprel":null}]}"#;
        let bad = r#"{"id":"b","target_lemma":"t","target_index":0,"sense_id":null,"tokens":[{"surface":"t","lemma":"t","pos":"N","head":5,"deprel":"x"}]}"#;
        let path = write_lines(&dir, "bad.jsonl", &format!("{good}\n{bad}\n"));
        match load_instances(&path).unwrap_err() {
            Error::ParseError { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("head index"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn target_index_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let bad = r#"{"id":"a","target_lemma":"t","target_index":3,"tokens":[{"surface":"t","lemma":"t","pos":"N"}]}"#;
        let path = write_lines(&dir, "bad.jsonl", &format!("{bad}\n"));
        assert!(matches!(
            load_instances(&path),
            Err(Error::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn sentences_stream_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let sents = vec![
            Sentence {
                tokens: vec![Token::new("a", "N"), Token::new("b", "N").with_head(0, "d")],
            },
            Sentence {
                tokens: vec![Token::new("c", "N")],
            },
        ];
        let path = dir.path().join("s.jsonl");
        write_sentences(&path, &sents).unwrap();
        assert_eq!(load_sentences(&path).unwrap(), sents);
    }
}
