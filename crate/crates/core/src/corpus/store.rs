//! On-disk layout for a built matrices directory:
//!
//! ```text
//! dir/
//!   A.txt  B.txt  C.txt  [D.txt]   text triplet format
//!   vocab_a.txt  vocab_b.txt       lemma per line, index = line number
//!   meta.json                      window, stoplist, row ids and labels
//! ```

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::build::CorpusMatrices;
use crate::corpus::types::Instance;
use crate::corpus::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::{read_sparse_file, write_sparse_file};

#[derive(Debug, Serialize, Deserialize)]
struct MatricesMeta {
    window: usize,
    pos_stoplist: BTreeSet<String>,
    has_global: bool,
    instance_ids: Vec<String>,
    sense_ids: Vec<Option<String>>,
    target_lemmas: Vec<String>,
}

/// A matrices directory loaded back into memory.
#[derive(Debug, Clone)]
pub struct MatricesDir {
    pub matrices: CorpusMatrices,
    pub instance_ids: Vec<String>,
    pub sense_ids: Vec<Option<String>>,
    pub target_lemmas: Vec<String>,
}

/// Writes matrices, vocabularies and row metadata for the instances the
/// rows were built from.
pub fn save_matrices_dir(
    dir: &Path,
    matrices: &CorpusMatrices,
    instances: &[Instance],
) -> Result<()> {
    if instances.len() != matrices.a.rows() {
        return Err(Error::config(format!(
            "{} instances do not match {} matrix rows",
            instances.len(),
            matrices.a.rows()
        )));
    }
    std::fs::create_dir_all(dir)?;
    write_sparse_file(&matrices.a, &dir.join("A.txt"))?;
    write_sparse_file(&matrices.b, &dir.join("B.txt"))?;
    write_sparse_file(&matrices.c_local, &dir.join("C.txt"))?;
    if let Some(d) = &matrices.d_global {
        write_sparse_file(d, &dir.join("D.txt"))?;
    }
    matrices.vocab_a.write_file(&dir.join("vocab_a.txt"))?;
    matrices.vocab_b.write_file(&dir.join("vocab_b.txt"))?;

    let meta = MatricesMeta {
        window: matrices.window,
        pos_stoplist: matrices.pos_stoplist.clone(),
        has_global: matrices.d_global.is_some(),
        instance_ids: instances.iter().map(|i| i.id.clone()).collect(),
        sense_ids: instances.iter().map(|i| i.sense_id.clone()).collect(),
        target_lemmas: instances.iter().map(|i| i.target_lemma.clone()).collect(),
    };
    let mut out = BufWriter::new(File::create(dir.join("meta.json"))?);
    serde_json::to_writer_pretty(&mut out, &meta).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_matrices_dir(dir: &Path) -> Result<MatricesDir> {
    let meta: MatricesMeta =
        serde_json::from_reader(BufReader::new(File::open(dir.join("meta.json"))?))
            .map_err(|e| Error::parse(1, format!("meta.json: {e}")))?;
    let a = read_sparse_file(&dir.join("A.txt"))?;
    let b = read_sparse_file(&dir.join("B.txt"))?;
    let c_local = read_sparse_file(&dir.join("C.txt"))?;
    let d_global = if meta.has_global {
        Some(read_sparse_file(&dir.join("D.txt"))?)
    } else {
        None
    };
    let vocab_a = Vocabulary::read_file(&dir.join("vocab_a.txt"))?;
    let vocab_b = Vocabulary::read_file(&dir.join("vocab_b.txt"))?;
    if meta.instance_ids.len() != a.rows() || meta.sense_ids.len() != a.rows() {
        return Err(Error::config(
            "meta.json row metadata does not match matrix A".to_string(),
        ));
    }
    Ok(MatricesDir {
        matrices: CorpusMatrices {
            a,
            b,
            c_local,
            d_global,
            vocab_a,
            vocab_b,
            window: meta.window,
            pos_stoplist: meta.pos_stoplist,
        },
        instance_ids: meta.instance_ids,
        sense_ids: meta.sense_ids,
        target_lemmas: meta.target_lemmas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build::{build_corpus_matrices, CorpusConfig};
    use crate::corpus::types::Token;

    #[test]
    fn directory_round_trip() {
        let instances: Vec<Instance> = (0..3)
            .map(|i| Instance {
                id: format!("i{i}"),
                target_lemma: "t".into(),
                target_index: 0,
                sense_id: Some(format!("s{}", i % 2)),
                tokens: vec![
                    Token::new("t", "N"),
                    Token::new("a", "N"),
                    Token::new(if i == 0 { "b" } else { "c" }, "N"),
                ],
            })
            .collect();
        let m = build_corpus_matrices(&instances, None, &CorpusConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_matrices_dir(dir.path(), &m, &instances).unwrap();
        let back = load_matrices_dir(dir.path()).unwrap();
        assert_eq!(back.matrices, m);
        assert_eq!(back.instance_ids, vec!["i0", "i1", "i2"]);
        assert_eq!(back.sense_ids[0], Some("s0".to_string()));
        assert_eq!(back.target_lemmas, vec!["t", "t", "t"]);
    }
}
