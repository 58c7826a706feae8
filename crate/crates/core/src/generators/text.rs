//! Binary document-term matrices.
//!
//! Text is lowercased and split on every non-alphanumeric character. A term
//! enters the vocabulary when its document frequency over the pooled corpus
//! is at least `min_df` and it is not on the removal list; columns follow
//! the sorted vocabulary and hold term presence (0 or 1).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::{LabeledDataset, SampleMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub label: u8,
    pub text: String,
}

impl Document {
    pub fn new(label: u8, text: impl Into<String>) -> Self {
        Document {
            label,
            text: text.into(),
        }
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Term-presence rows with their labels and vocabulary.
///
/// Needs only one document per class; turn it into a test input with
/// [`DocTermMatrix::dataset`] or subsample it.
#[derive(Debug, Clone, PartialEq)]
pub struct DocTermMatrix {
    features: SampleMatrix,
    labels: Vec<u8>,
    vocabulary: Vec<String>,
}

impl DocTermMatrix {
    pub fn features(&self) -> &SampleMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// `(class-1 documents, class-0 documents)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|&&y| y == 1).count();
        (ones, self.labels.len() - ones)
    }

    pub fn dataset(&self) -> Result<LabeledDataset> {
        LabeledDataset::new(self.features.clone(), self.labels.clone())
    }
}

pub fn build_doc_term_matrix(corpus: &[Document], min_df: f64, remove_terms: &[String]) -> Result<DocTermMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(min_df > 0.0 && min_df <= 1.0) {
        return Err(Error::invalid("min_df", "must lie in (0, 1]"));
    }
    if let Some(doc) = corpus.iter().find(|d| d.label > 1) {
        return Err(Error::InvalidLabel(doc.label));
    }
    let ones = corpus.iter().filter(|d| d.label == 1).count();
    if ones == 0 || ones == corpus.len() {
        return Err(Error::SingleClass {
            n: ones,
            m: corpus.len() - ones,
        });
    }
    let removed: BTreeSet<String> = remove_terms.iter().map(|t| t.to_lowercase()).collect();
    let documents: Vec<BTreeSet<String>> = corpus.iter().map(|d| tokenize(&d.text).into_iter().collect()).collect();

    let mut frequency: BTreeMap<&str, usize> = BTreeMap::new();
    for terms in &documents {
        for t in terms {
            *frequency.entry(t.as_str()).or_default() += 1;
        }
    }
    let total = corpus.len() as f64;
    // relative slack absorbs min_df values such as 0.05 that are not exact in binary
    let vocabulary: Vec<String> = frequency
        .into_iter()
        .filter(|&(t, df)| df as f64 >= min_df * total * (1.0 - 1e-12) && !removed.contains(t))
        .map(|(t, _)| t.to_string())
        .collect();
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }

    let mut data = Vec::with_capacity(corpus.len() * vocabulary.len());
    for terms in &documents {
        data.extend(vocabulary.iter().map(|t| if terms.contains(t) { 1.0 } else { 0.0 }));
    }
    Ok(DocTermMatrix {
        features: SampleMatrix::new(corpus.len(), vocabulary.len(), data)?,
        labels: corpus.iter().map(|d| d.label).collect(),
        vocabulary,
    })
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn sorted_entries(dir: &Path, want_dirs: bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_error(dir))? {
        let path = entry.map_err(io_error(dir))?.path();
        if path.is_dir() == want_dirs {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Every file of `class1_dir` as a label-1 document and every file of
/// `class0_dir` as a label-0 document, in file-name order.
pub fn load_corpus_dirs(class1_dir: &Path, class0_dir: &Path) -> Result<Vec<Document>> {
    let mut corpus = Vec::new();
    for (dir, label) in [(class1_dir, 1u8), (class0_dir, 0u8)] {
        for path in sorted_entries(dir, false)? {
            let bytes = fs::read(&path).map_err(io_error(&path))?;
            corpus.push(Document::new(label, String::from_utf8_lossy(&bytes)));
        }
    }
    Ok(corpus)
}

/// `label,text` records; a first record whose label is not `0` or `1` is a header.
pub fn load_corpus_csv(path: &Path) -> Result<Vec<Document>> {
    let parse_error = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| parse_error(e.to_string()))?;
    let mut corpus = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_error(format!(
                "record {} has {} fields, expected 2",
                i + 1,
                record.len()
            )));
        }
        let label = match record[0].trim() {
            "1" => 1,
            "0" => 0,
            _ if i == 0 => continue,
            other => {
                return Err(parse_error(format!(
                    "record {}: label {other:?} is neither 0 nor 1",
                    i + 1
                )))
            }
        };
        corpus.push(Document::new(label, &record[1]));
    }
    Ok(corpus)
}

/// A two-column CSV file, or a directory holding exactly two class
/// subdirectories; the subdirectory that sorts first is class 1.
pub fn load_corpus(path: &Path) -> Result<Vec<Document>> {
    if !path.is_dir() {
        return load_corpus_csv(path);
    }
    let dirs = sorted_entries(path, true)?;
    if dirs.len() != 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("expected two class subdirectories, found {}", dirs.len()),
        });
    }
    load_corpus_dirs(&dirs[0], &dirs[1])
}
