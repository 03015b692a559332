pub mod jitter;
pub mod reconstruct;
pub mod report;
pub mod simulate;
pub mod sweep;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::config::Loaded;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub struct Context {
    pub loaded: Loaded,
    pub seed: u64,
    pub out: PathBuf,
    pub svg: bool,
}

impl Context {
    pub fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::start(command, &self.loaded.raw, self.seed)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}
