use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{load_silhouette, BinaryShape, LoadOptions};

/// How class labels are encoded in a dataset directory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Flat directory; the label is the leading run of letters in the file
    /// name (`horse-03.png`, `hand2.pgm`).
    #[default]
    Tari56,
    /// One subdirectory per class.
    Kimia99,
    /// Flat directory plus a `labels.csv` of `file,label` lines.
    FlatLabeled,
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tari56" => Ok(Layout::Tari56),
            "kimia99" => Ok(Layout::Kimia99),
            "flat-labeled" => Ok(Layout::FlatLabeled),
            _ => Err(Error::Invalid(format!("unknown layout {s}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub id: String,
    pub label: String,
    pub shape: BinaryShape,
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub name: String,
    pub samples: Vec<Sample>,
    /// Files that could not be decoded, with the reason.
    pub errors: Vec<(PathBuf, String)>,
}

impl Dataset {
    pub fn labels(&self) -> BTreeSet<&str> {
        self.samples.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn class_size(&self, label: &str) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    /// Writes every sample as PNG using the given layout.
    pub fn save(&self, dir: &Path, layout: Layout) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut csv = String::new();
        for s in &self.samples {
            let stem = s.id.rsplit('/').next().unwrap_or(&s.id);
            let rel = match layout {
                Layout::Kimia99 => PathBuf::from(&s.label).join(format!("{stem}.png")),
                Layout::Tari56 => PathBuf::from(format!("{stem}.png")),
                Layout::FlatLabeled => {
                    let name = format!("{}.png", s.id.replace('/', "_"));
                    csv.push_str(&format!("{name},{}\n", s.label));
                    PathBuf::from(name)
                }
            };
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            s.shape.to_gray().save(&path).map_err(|e| Error::Decode(e.to_string()))?;
        }
        if layout == Layout::FlatLabeled {
            fs::write(dir.join("labels.csv"), csv)?;
        }
        Ok(())
    }
}

fn is_image(p: &Path) -> bool {
    matches!(
        p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("png" | "pgm" | "pbm" | "ppm" | "bmp")
    )
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    v.sort();
    Ok(v)
}

fn prefix_label(stem: &str) -> String {
    stem.chars().take_while(|c| c.is_alphabetic()).collect::<String>().to_lowercase()
}

/// Loads every silhouette below `dir`. Files that fail to decode are
/// recorded in [`Dataset::errors`] and skipped.
pub fn load_dataset(dir: &Path, layout: Layout, opts: &LoadOptions) -> Result<Dataset> {
    let mut files: Vec<(PathBuf, String, String)> = Vec::new();
    match layout {
        Layout::Tari56 => {
            for p in sorted_entries(dir)?.into_iter().filter(|p| is_image(p)) {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                files.push((p, prefix_label(&stem), stem));
            }
        }
        Layout::Kimia99 => {
            for sub in sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()) {
                let label = sub.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                for p in sorted_entries(&sub)?.into_iter().filter(|p| is_image(p)) {
                    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                    files.push((p.clone(), label.clone(), format!("{label}/{stem}")));
                }
            }
        }
        Layout::FlatLabeled => {
            let text = fs::read_to_string(dir.join("labels.csv"))?;
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                let (file, label) = line
                    .split_once(',')
                    .ok_or_else(|| Error::Invalid(format!("labels.csv line without comma: {line}")))?;
                let p = dir.join(file.trim());
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                files.push((p, label.trim().to_string(), stem));
            }
        }
    }
    let mut ds = Dataset { name: dir.display().to_string(), ..Default::default() };
    for (path, label, id) in files {
        if label.is_empty() {
            ds.errors.push((path, "empty label".into()));
            continue;
        }
        let loaded = fs::read(&path).map_err(Error::from).and_then(|b| load_silhouette(&b, opts));
        match loaded {
            Ok(mut shape) => {
                shape.set_source_id(id.clone());
                ds.samples.push(Sample { id, label, shape });
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                ds.errors.push((path, e.to_string()));
            }
        }
    }
    if ds.samples.is_empty() {
        return Err(Error::EmptyDataset(dir.to_path_buf()));
    }
    Ok(ds)
}
