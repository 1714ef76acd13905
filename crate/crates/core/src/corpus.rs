//! Ordered image collections with a content hash for provenance.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filters::registry::hex;
use crate::raster::{decode_image, ImageF};

const EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Named images in a fixed order. Pipelines aggregate in this order.
#[derive(Clone, Debug)]
pub struct Corpus {
    names: Vec<String>,
    images: Vec<ImageF>,
    hash: String,
    skipped: Vec<(String, String)>,
}

impl Corpus {
    /// Wraps in-memory images. The hash covers dimensions and sample bits.
    pub fn from_images(entries: Vec<(String, ImageF)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCorpus("no images given".into()));
        }
        let mut hasher = Sha256::new();
        for (name, img) in &entries {
            hasher.update(name.as_bytes());
            hasher.update([0]);
            for d in [img.width(), img.height(), img.channels()] {
                hasher.update((d as u64).to_le_bytes());
            }
            for v in img.data() {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        let (names, images) = entries.into_iter().unzip();
        Ok(Self {
            names,
            images,
            hash: hex(&hasher.finalize()),
            skipped: Vec::new(),
        })
    }

    /// Loads every PNG/JPEG file of `dir` in lexicographic file-name order.
    /// Undecodable files are skipped with a warning and listed in
    /// [`Corpus::skipped`]. The hash covers names and raw file bytes of the
    /// loaded images.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let read_err = |source| Error::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(read_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && has_image_extension(p))
            .collect();
        paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

        let mut hasher = Sha256::new();
        let mut names = Vec::new();
        let mut images = Vec::new();
        let mut skipped = Vec::new();
        for path in paths {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let bytes = std::fs::read(&path).map_err(|source| Error::Read {
                path: path.clone(),
                source,
            })?;
            match decode_image(&bytes) {
                Ok(img) => {
                    hasher.update(name.as_bytes());
                    hasher.update([0]);
                    hasher.update((bytes.len() as u64).to_le_bytes());
                    hasher.update(&bytes);
                    names.push(name);
                    images.push(img);
                }
                Err(e) => {
                    log::warn!("skipping {}: {e}", path.display());
                    skipped.push((name, e.to_string()));
                }
            }
        }
        if images.is_empty() {
            return Err(Error::EmptyCorpus(format!(
                "no decodable PNG or JPEG images in {}",
                dir.display()
            )));
        }
        Ok(Self {
            names,
            images,
            hash: hex(&hasher.finalize()),
            skipped,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn images(&self) -> &[ImageF] {
        &self.images
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ImageF)> {
        self.names.iter().map(String::as_str).zip(&self.images)
    }

    /// SHA-256 hex digest of the corpus content.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Files that were present but could not be decoded, with the reason.
    pub fn skipped(&self) -> &[(String, String)] {
        &self.skipped
    }
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::save_image;

    #[test]
    fn loads_in_name_order_and_skips_junk() {
        let dir = tempfile::tempdir().unwrap();
        let a = ImageF::filled(4, 3, 1, 0.25).unwrap();
        let b = ImageF::filled(5, 2, 3, 0.5).unwrap();
        save_image(&b, dir.path().join("b.png")).unwrap();
        save_image(&a, dir.path().join("a.png")).unwrap();
        std::fs::write(dir.path().join("c.png"), b"not a png").unwrap();
        std::fs::write(dir.path().join("notes.txt"), b"hello").unwrap();

        let corpus = Corpus::load_dir(dir.path()).unwrap();
        assert_eq!(corpus.names(), ["a.png", "b.png"]);
        assert_eq!(corpus.images()[1].dims(), (5, 2));
        assert_eq!(corpus.skipped().len(), 1);
        assert_eq!(corpus.hash().len(), 64);
        assert_eq!(Corpus::load_dir(dir.path()).unwrap().hash(), corpus.hash());
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(Corpus::load_dir(dir.path()), Err(Error::EmptyCorpus(_))));
        assert!(Corpus::from_images(Vec::new()).is_err());
    }

    #[test]
    fn in_memory_hash_depends_on_content() {
        let a = ImageF::filled(4, 4, 1, 0.25).unwrap();
        let b = ImageF::filled(4, 4, 1, 0.5).unwrap();
        let h1 = Corpus::from_images(vec![("x".into(), a.clone())]).unwrap();
        let h2 = Corpus::from_images(vec![("x".into(), b)]).unwrap();
        let h3 = Corpus::from_images(vec![("x".into(), a)]).unwrap();
        assert_ne!(h1.hash(), h2.hash());
        assert_eq!(h1.hash(), h3.hash());
    }
}
