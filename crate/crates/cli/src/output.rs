use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Version tag written as the first line of every result CSV.
pub const CSV_VERSION: &str = "# qlslab-csv v1";

/// Output directory. Every file written through it is echoed on stdout.
pub struct Output {
    root: PathBuf,
}

impl Output {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write(&self, rel: impl AsRef<Path>, contents: &str) -> Result<PathBuf> {
        let path = self.path(rel);
        write_file(&path, contents)?;
        println!("{}", path.display());
        Ok(path)
    }

    /// CSV with the version comment line and the given header.
    pub fn write_csv<R: serde::Serialize>(
        &self,
        rel: impl AsRef<Path>,
        rows: impl IntoIterator<Item = R>,
    ) -> Result<PathBuf> {
        self.write(rel, &csv_string(rows)?)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    // Write-then-rename so an interrupted sweep never leaves a torn file.
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn csv_string<R: serde::Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    Ok(format!("{CSV_VERSION}\n{body}"))
}

/// Read a CSV written by [`csv_string`]; comment lines are skipped.
pub fn read_csv<R: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    rdr.deserialize()
        .map(|r| r.with_context(|| format!("parsing {}", path.display())))
        .collect()
}
