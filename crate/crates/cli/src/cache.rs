//! Append-only result cache in a flat text file.
//!
//! Each line is `TAG<TAB>KEY<TAB>JSON`. Lines with another tag are ignored,
//! malformed lines are skipped with a warning, and each record is written
//! with a single `write_all` on a file opened in append mode.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

pub const VERSION_TAG: &str = env!("CARGO_PKG_VERSION");

pub struct Cache {
    path: PathBuf,
    entries: HashMap<String, Value>,
    file: Option<File>,
    pub hits: usize,
    pub misses: usize,
    pub ignored: usize,
}

impl Cache {
    /// Load `path`, warning on `warn` about corrupt lines or an unwritable file.
    pub fn open(path: &Path, warn: &mut dyn Write) -> Cache {
        let mut entries = HashMap::new();
        let mut ignored = 0;
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for (n, line) in text.lines().enumerate() {
                    if line.is_empty() {
                        continue;
                    }
                    let mut fields = line.splitn(3, '\t');
                    let (Some(tag), Some(key), Some(json)) =
                        (fields.next(), fields.next(), fields.next())
                    else {
                        let _ = writeln!(
                            warn,
                            "warning: cache {}: line {} is corrupt, skipped",
                            path.display(),
                            n + 1
                        );
                        continue;
                    };
                    if tag != VERSION_TAG {
                        ignored += 1;
                        continue;
                    }
                    match serde_json::from_str::<Value>(json) {
                        Ok(v) => {
                            entries.insert(key.to_string(), v);
                        }
                        Err(_) => {
                            let _ = writeln!(
                                warn,
                                "warning: cache {}: line {} is corrupt, skipped",
                                path.display(),
                                n + 1
                            );
                        }
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => {
                let _ = writeln!(
                    warn,
                    "warning: cache {}: cannot read ({e}), starting empty",
                    path.display()
                );
            }
        }
        let file = match OpenOptions::new().create(true).append(true).open(path) {
            Ok(f) => Some(f),
            Err(e) => {
                let _ = writeln!(
                    warn,
                    "warning: cache {}: not writable ({e}), continuing uncached",
                    path.display()
                );
                None
            }
        };
        Cache {
            path: path.to_path_buf(),
            entries,
            file,
            hits: 0,
            misses: 0,
            ignored,
        }
    }

    pub fn get(&mut self, key: &str) -> Option<Value> {
        let v = self.entries.get(key).cloned();
        match v {
            Some(_) => self.hits += 1,
            None => self.misses += 1,
        }
        v
    }

    pub fn put(&mut self, key: &str, value: &Value, warn: &mut dyn Write) {
        let Some(file) = self.file.as_mut() else {
            return;
        };
        let line = format!(
            "{VERSION_TAG}\t{key}\t{}\n",
            serde_json::to_string(value).expect("json")
        );
        if let Err(e) = file.write_all(line.as_bytes()) {
            let _ = writeln!(
                warn,
                "warning: cache {}: write failed ({e})",
                self.path.display()
            );
            self.file = None;
            return;
        }
        self.entries.insert(key.to_string(), value.clone());
    }
}
