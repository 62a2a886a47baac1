use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use image::ImageFormat;
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::scoring::Label;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub path: PathBuf,
    /// Ground truth, `None` for unlabeled corpora.
    pub label: Option<Label>,
}

/// A set of image files sharing a source tag (model or dataset name).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub source_tag: String,
    /// Files found during ingestion that were not readable images.
    pub skipped: Vec<PathBuf>,
}

impl Corpus {
    /// Builds a corpus from explicit paths, sorted and de-duplicated.
    pub fn from_paths(paths: impl IntoIterator<Item = PathBuf>, label: Option<Label>, source_tag: &str) -> Self {
        let mut paths: Vec<_> = paths.into_iter().collect();
        paths.sort();
        paths.dedup();
        Corpus {
            entries: paths.into_iter().map(|path| CorpusEntry { path, label }).collect(),
            source_tag: source_tag.to_string(),
            skipped: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Concatenation of labeled corpora, re-sorted by path.
    pub fn merge(parts: &[Corpus], source_tag: &str) -> Corpus {
        let mut entries: Vec<_> = parts.iter().flat_map(|c| c.entries.iter().cloned()).collect();
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        entries.dedup_by(|a, b| a.path == b.path);
        Corpus {
            entries,
            source_tag: source_tag.to_string(),
            skipped: parts.iter().flat_map(|c| c.skipped.iter().cloned()).collect(),
        }
    }
}

/// Sniffs the first bytes of a file for a supported image signature.
pub fn sniff_image(path: &Path) -> std::io::Result<bool> {
    let mut head = Vec::with_capacity(32);
    File::open(path)?.take(32).read_to_end(&mut head)?;
    Ok(matches!(
        image::guess_format(&head),
        Ok(ImageFormat::Png | ImageFormat::Jpeg | ImageFormat::Bmp)
    ))
}

/// Recursively collects PNG/JPEG/BMP files under `dir`, sorted by path.
///
/// Files are recognized by content signature, not extension. Anything
/// else is skipped and listed in [`Corpus::skipped`].
pub fn ingest_corpus(dir: &Path, label: Option<Label>, source_tag: &str) -> Result<Corpus> {
    let meta = std::fs::metadata(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    let mut skipped = Vec::new();
    let consider = |path: PathBuf, paths: &mut Vec<PathBuf>, skipped: &mut Vec<PathBuf>| match sniff_image(&path) {
        Ok(true) => paths.push(path),
        Ok(false) => {
            log::debug!("skipping non-image {}", path.display());
            skipped.push(path);
        }
        Err(e) => {
            log::warn!("skipping unreadable {}: {e}", path.display());
            skipped.push(path);
        }
    };
    if meta.is_file() {
        consider(dir.to_path_buf(), &mut paths, &mut skipped);
    } else {
        for entry in WalkDir::new(dir).sort_by_file_name() {
            match entry {
                Ok(e) if e.file_type().is_file() => consider(e.into_path(), &mut paths, &mut skipped),
                Ok(_) => {}
                Err(e) => {
                    log::warn!(
                        "skipping {}: {e}",
                        e.path().map(|p| p.display().to_string()).unwrap_or_default()
                    );
                    if let Some(p) = e.path() {
                        skipped.push(p.to_path_buf());
                    }
                }
            }
        }
    }
    if paths.is_empty() {
        return Err(Error::NoImagesFound(dir.to_path_buf()));
    }
    if !skipped.is_empty() {
        log::info!("{}: skipped {} non-image files", dir.display(), skipped.len());
    }
    let mut corpus = Corpus::from_paths(paths, label, source_tag);
    skipped.sort();
    corpus.skipped = skipped;
    Ok(corpus)
}
