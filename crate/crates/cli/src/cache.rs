//! On-disk report cache keyed by a SHA-256 of the engine version and the
//! request. Each entry stores a checksum of its body; entries that fail the
//! checksum or do not parse are discarded and recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::report::Report;

pub const CACHE_ENV: &str = "SHAOMEGA_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// Result of a lookup.
#[derive(Debug)]
pub enum Lookup {
    Hit(Report),
    Miss,
    /// The entry existed but was unreadable; it has been removed.
    Corrupt(String),
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Key for a request; the engine version is part of it, so upgrades miss.
    pub fn key(command: &str, args: &str, scenario_hash: Option<&str>, budget: u128) -> String {
        digest(&format!(
            "shaomega-cache/1\nengine={}\ncommand={command}\nargs={args}\nscenario={}\nbudget={budget}\n",
            shaomega_core::ENGINE_VERSION,
            scenario_hash.unwrap_or("-")
        ))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.report"))
    }

    pub fn get(&self, key: &str) -> Lookup {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(e.to_string()),
        };
        let parsed = text
            .split_once('\n')
            .and_then(|(head, body)| Some((head.strip_prefix("checksum=")?, body)))
            .filter(|(sum, body)| *sum == digest(body))
            .and_then(|(_, body)| Report::from_machine(body));
        match parsed {
            Some(r) => Lookup::Hit(r),
            None => {
                let _ = fs::remove_file(&path);
                Lookup::Corrupt(format!("{} failed its checksum", path.display()))
            }
        }
    }

    pub fn put(&self, key: &str, report: &Report) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let body = report.to_machine();
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, format!("checksum={}\n{body}", digest(&body)))?;
        fs::rename(tmp, self.path(key))
    }
}
