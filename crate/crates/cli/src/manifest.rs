//! Output directory management: every run writes a manifest recording the
//! config hash, version, wall time and every emitted file, and every CSV
//! carries a trailing manifest cross-reference comment.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct RunWriter {
    dir: PathBuf,
    config_hash: u64,
    command: String,
    started: Instant,
    files: Vec<String>,
}

impl RunWriter {
    pub fn new(dir: &Path, command: &str, config_hash: u64) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash,
            command: command.to_string(),
            started: Instant::now(),
            files: Vec::new(),
        })
    }

    fn trailer(&self) -> String {
        format!("# manifest: manifest.txt config_hash={:016x}\n", self.config_hash)
    }

    /// Write a CSV artifact: header row, data rows, trailing manifest
    /// comment line.
    pub fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> std::io::Result<()> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        writeln!(f, "{header}")?;
        for r in rows {
            writeln!(f, "{r}")?;
        }
        f.write_all(self.trailer().as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Two-column plot data for gnuplot.
    pub fn write_plot(&mut self, name: &str, points: &[(f64, f64)]) -> std::io::Result<()> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        for (x, y) in points {
            writeln!(f, "{x:.12e} {y:.12e}")?;
        }
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_raw(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Write manifest.txt and return the artifact list.
    pub fn finish(self) -> std::io::Result<Vec<String>> {
        let mut f = fs::File::create(self.dir.join("manifest.txt"))?;
        writeln!(f, "command={}", self.command)?;
        writeln!(f, "config_hash={:016x}", self.config_hash)?;
        writeln!(f, "version={}", env!("CARGO_PKG_VERSION"))?;
        writeln!(f, "wall_ms={}", self.started.elapsed().as_millis())?;
        for file in &self.files {
            writeln!(f, "file={file}")?;
        }
        Ok(self.files)
    }
}
