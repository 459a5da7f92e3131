use crate::commands::RunError;
use fracmass::fields::LatticeField;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Collects the artifacts of one run under a directory and echoes the summary to stdout.
pub struct Sink {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError { context: format!("writing {}", path.display()), message: e.to_string() }
}

impl Sink {
    pub fn new(dir: PathBuf) -> Result<Sink, RunError> {
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Sink { dir, written: Vec::new() })
    }

    pub fn line(&mut self, text: String) {
        println!("{text}");
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>), RunError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(f)))
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), RunError> {
        let (path, w) = self.create(&format!("{name}.csv"))?;
        let mut out = csv::Writer::from_writer(w);
        for r in rows {
            out.serialize(r).map_err(|e| io_err(&path, e))?;
        }
        out.flush().map_err(|e| io_err(&path, e))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let (path, mut w) = self.create(&format!("{name}.json"))?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(&path, e))?;
        writeln!(w).map_err(|e| io_err(&path, e))
    }

    pub fn binary(&mut self, name: &str, n: usize, eps: f64, field: &LatticeField) -> Result<(), RunError> {
        let (path, w) = self.create(&format!("{name}.bin"))?;
        fracmass::io::write_binary(w, n, eps, field).map_err(|e| io_err(&path, e))
    }
}
