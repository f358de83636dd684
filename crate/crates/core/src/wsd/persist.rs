//! Model directory layout:
//!
//! ```text
//! modeldir/
//!   manifest.json        variant, k, window, sense ids, fallback sense
//!   sense_vectors.txt    |senses| x k, text triplet format
//!   fold_train.txt       H
//!   fold_test.txt        H (baseline1) or G (latent variants)
//!   vocab_a.txt          lemma per line
//!   vocab_b.txt          latent variants only
//! ```

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::{read_dense_file, write_dense_file, DenseMatrix};
use crate::wsd::{SenseModel, Variant};

#[derive(Debug, Serialize, Deserialize)]
struct ModelManifest {
    variant: Variant,
    k: usize,
    window: usize,
    sense_ids: Vec<String>,
    most_frequent_sense: String,
    pos_stoplist: BTreeSet<String>,
}

pub fn save_model(model: &SenseModel, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let manifest = ModelManifest {
        variant: model.variant,
        k: model.k,
        window: model.window,
        sense_ids: model.sense_ids.clone(),
        most_frequent_sense: model.most_frequent_sense.clone(),
        pos_stoplist: model.pos_stoplist.clone(),
    };
    let mut out = BufWriter::new(File::create(dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut out, &manifest).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;

    let mut values = Vec::with_capacity(model.sense_vectors.len() * model.k);
    for vec in &model.sense_vectors {
        values.extend_from_slice(vec);
    }
    let senses = DenseMatrix::new(model.sense_vectors.len(), model.k, values)?;
    write_dense_file(&senses, &dir.join("sense_vectors.txt"))?;
    write_dense_file(&model.fold_matrix_train, &dir.join("fold_train.txt"))?;
    write_dense_file(&model.fold_matrix_test, &dir.join("fold_test.txt"))?;
    model.vocab_a.write_file(&dir.join("vocab_a.txt"))?;
    if let Some(vb) = &model.vocab_b {
        vb.write_file(&dir.join("vocab_b.txt"))?;
    }
    Ok(())
}

pub fn load_model(dir: &Path) -> Result<SenseModel> {
    let manifest: ModelManifest =
        serde_json::from_reader(BufReader::new(File::open(dir.join("manifest.json"))?))
            .map_err(|e| Error::parse(1, format!("manifest.json: {e}")))?;
    let senses = read_dense_file(&dir.join("sense_vectors.txt"))?;
    if senses.rows() != manifest.sense_ids.len() || senses.cols() != manifest.k {
        return Err(Error::config(
            "sense_vectors.txt does not match the manifest".to_string(),
        ));
    }
    let sense_vectors = (0..senses.rows()).map(|i| senses.row(i).to_vec()).collect();
    let fold_matrix_train = read_dense_file(&dir.join("fold_train.txt"))?;
    let fold_matrix_test = read_dense_file(&dir.join("fold_test.txt"))?;
    let vocab_a = Vocabulary::read_file(&dir.join("vocab_a.txt"))?;
    let vocab_b = match manifest.variant {
        Variant::Baseline1 => None,
        Variant::LatentLocal | Variant::LatentGlobal => {
            Some(Vocabulary::read_file(&dir.join("vocab_b.txt"))?)
        }
    };
    Ok(SenseModel {
        variant: manifest.variant,
        k: manifest.k,
        window: manifest.window,
        sense_ids: manifest.sense_ids,
        sense_vectors,
        fold_matrix_train,
        fold_matrix_test,
        vocab_a,
        vocab_b,
        pos_stoplist: manifest.pos_stoplist,
        most_frequent_sense: manifest.most_frequent_sense,
    })
}
