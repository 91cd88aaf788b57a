// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Artifact writing. Every file carries the config hash and master seed;
//! floats are printed with 17 significant digits so replays are
//! byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::config::ResolvedConfig;
use crate::error::CliResult;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutputContext {
    dir: PathBuf,
    pub config_json: serde_json::Value,
    pub config_hash: String,
    pub master_seed: u64,
    pub experiment: String,
}

impl OutputContext {
    pub fn new(cfg: &ResolvedConfig) -> CliResult<OutputContext> {
        let mut config_json = serde_json::to_value(cfg).expect("config serializes");
        // the destination directory is not part of the experiment identity:
        // artifacts must be byte-identical wherever they are written
        if let Some(map) = config_json.as_object_mut() {
            map.remove("output_dir");
        }
        let canonical = serde_json::to_string(&config_json).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let config_hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        std::fs::create_dir_all(&cfg.output_dir)?;
        Ok(OutputContext {
            dir: cfg.output_dir.clone(),
            config_json,
            config_hash,
            master_seed: cfg.master_seed,
            experiment: cfg.experiment.clone(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// CSV writer primed with the provenance header.
    pub fn csv_writer(&self, name: &str) -> CliResult<BufWriter<File>> {
        let mut w = BufWriter::new(File::create(self.path(name))?);
        writeln!(w, "# experiment: {}", self.experiment)?;
        writeln!(w, "# config_hash: {}", self.config_hash)?;
        writeln!(w, "# master_seed: {}", self.master_seed)?;
        Ok(w)
    }

    /// JSON artifact with the resolved config and seeds embedded.
    pub fn write_json(&self, name: &str, body: serde_json::Value) -> CliResult<()> {
        let wrapped = serde_json::json!({
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "master_seed": self.master_seed,
            "config": self.config_json,
            "results": body,
        });
        let mut w = BufWriter::new(File::create(self.path(name))?);
        serde_json::to_writer_pretty(&mut w, &wrapped)
            .map_err(|e| crate::error::CliError::Config(format!("json write: {e}")))?;
        writeln!(w)?;
        Ok(())
    }
}
