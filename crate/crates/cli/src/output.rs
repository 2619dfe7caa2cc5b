//! Canonical CSV, 16-bit PNG images and the hash manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Manifest file name inside every output directory.
pub const MANIFEST: &str = "manifest.sha256";

/// Float text with 9 significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        "0.00000000e0".into()
    } else {
        format!("{v:.8e}")
    }
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(usize),
    B(bool),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::F(v) => out.push_str(&fmt_f64(*v)),
            Cell::I(v) => write!(out, "{v}").unwrap(),
            Cell::U(v) => write!(out, "{v}").unwrap(),
            Cell::B(v) => out.push_str(if *v { "1" } else { "0" }),
            // Strings never carry separators; quote-free CSV keeps the bytes canonical.
            Cell::S(s) => out.extend(s.chars().map(|c| if c == ',' || c == '\n' || c == '\r' { ';' } else { c })),
        }
    }
}

/// Header plus rows rendered in canonical form.
#[derive(Clone, Debug, Default)]
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Table { text, columns: header.len() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            c.render(&mut self.text);
        }
        self.text.push('\n');
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }
}

/// Grayscale raster stored bottom-up in the scene grid order (`iy·nx + ix`).
#[derive(Clone, Debug)]
pub struct Raster {
    pub nx: usize,
    pub ny: usize,
    pub levels: Vec<u16>,
}

impl Raster {
    /// Linear map of `v ∈ [lo, hi]` onto `[0, 65535]`; NaN maps to 0.
    pub fn scaled(nx: usize, ny: usize, values: &[f64], lo: f64, hi: f64) -> Self {
        let span = hi - lo;
        let levels = values
            .iter()
            .map(|&v| {
                if v.is_nan() || !(span > 0.0) {
                    0
                } else {
                    (((v - lo) / span).clamp(0.0, 1.0) * 65535.0).round() as u16
                }
            })
            .collect();
        Raster { nx, ny, levels }
    }
}

/// Writes artifacts into a staging directory and records their hashes.
#[derive(Debug)]
pub struct Sink {
    root: PathBuf,
    entries: Vec<(String, String)>,
}

impl Sink {
    pub fn new(root: PathBuf) -> Result<Self> {
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Sink { root, entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, rel: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        Ok(path)
    }

    fn record(&mut self, rel: &str, bytes: &[u8]) {
        self.entries.push((rel.to_string(), hex::encode(Sha256::digest(bytes))));
    }

    pub fn csv(&mut self, rel: &str, table: &Table) -> Result<()> {
        let path = self.path_for(rel)?;
        fs::write(&path, table.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        self.record(rel, table.as_bytes());
        Ok(())
    }

    /// 16-bit grayscale PNG with the top image row at the largest y, plus a colormap sidecar.
    pub fn png(&mut self, rel: &str, raster: &Raster, colormap: &[(u16, &str)]) -> Result<()> {
        let path = self.path_for(rel)?;
        let (w, h) = (raster.nx as u32, raster.ny as u32);
        let img = ImageBuffer::from_fn(w, h, |x, y| {
            let iy = raster.ny - 1 - y as usize;
            Luma([raster.levels[iy * raster.nx + x as usize]])
        });
        let mut bytes = Vec::new();
        image::DynamicImage::ImageLuma16(img)
            .write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)
            .map_err(|e| CliError::Image { path: path.clone(), message: e.to_string() })?;
        fs::write(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        self.record(rel, &bytes);
        let mut note = Table::new(&["level", "meaning"]);
        for (level, meaning) in colormap {
            note.row(vec![Cell::U(*level as usize), (*meaning).into()]);
        }
        let stem = rel.strip_suffix(".png").unwrap_or(rel);
        self.csv(&format!("{stem}.colormap.csv"), &note)
    }

    /// Write the manifest (`<sha256>  <path>` per artifact, sorted by path).
    pub fn finish(mut self) -> Result<Vec<(String, String)>> {
        self.entries.sort();
        let mut text = String::new();
        for (rel, hash) in &self.entries {
            writeln!(text, "{hash}  {rel}").unwrap();
        }
        let path = self.root.join(MANIFEST);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(self.entries)
    }
}
