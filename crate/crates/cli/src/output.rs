use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

/// One run: the output directory, the resolved config, and the files
/// written so far.
pub struct RunContext {
    pub out_dir: PathBuf,
    pub subcommand: String,
    /// Resolved `(key, value)` pairs, flags and defaults included.
    pub config: Vec<(String, String)>,
    pub workers: usize,
    started: Instant,
    started_unix: u64,
    outputs: Vec<String>,
}

impl RunContext {
    pub fn new(out_dir: &Path, subcommand: &str, config: Vec<(String, String)>, workers: usize) -> std::io::Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            config,
            workers,
            started: Instant::now(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            outputs: Vec::new(),
        })
    }

    fn header<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# liouville {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# created_unix = {}", self.started_unix)?;
        writeln!(w, "# subcommand = {}", self.subcommand)?;
        for (k, v) in &self.config {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }

    /// Writes `name` as '#' metadata lines followed by whatever `body`
    /// produces.
    pub fn write_file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> liouville::Result<()>,
    ) -> liouville::Result<()> {
        let mut w = BufWriter::new(File::create(self.out_dir.join(name))?);
        self.header(&mut w)?;
        body(&mut w)?;
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_manifest(&self, status: &str, convergence: Value) -> std::io::Result<()> {
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let manifest = json!({
            "subcommand": self.subcommand,
            "version": env!("CARGO_PKG_VERSION"),
            "arch": std::env::consts::ARCH,
            "started_unix": self.started_unix,
            "wall_seconds": self.started.elapsed().as_secs_f64(),
            "workers": self.workers,
            "status": status,
            "config": config,
            "outputs": self.outputs,
            "convergence": convergence,
        });
        let mut w = BufWriter::new(File::create(self.out_dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()
    }
}

/// Strips the '#' header of a CSV written by [`RunContext::write_file`].
pub fn csv_body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}
