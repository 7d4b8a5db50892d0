use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use snf_core::{Error, Result};

use crate::Common;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    result: &'a T,
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Hash over the command, the flags that affect results, the input digest
/// and any command-specific settings.
pub fn meta(command: &'static str, common: &Common, input: Option<&[u8]>, extra: &impl Serialize) -> Meta {
    #[derive(Serialize)]
    struct Config<'a, E: Serialize> {
        command: &'a str,
        common: &'a Common,
        input_sha256: Option<String>,
        extra: &'a E,
    }
    let config = Config {
        command,
        common,
        input_sha256: input.map(sha256_hex),
        extra,
    };
    let text = serde_json::to_string(&config).expect("config serializes");
    Meta {
        version: VERSION,
        command,
        seed: common.seed,
        config_hash: sha256_hex(text.as_bytes())[..16].to_string(),
    }
}

pub fn json<T: Serialize>(meta: &Meta, result: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { meta, result })?;
    s.push('\n');
    Ok(s)
}

/// Comment line carrying the metadata, placed above the CSV header.
pub fn csv_preamble(meta: &Meta) -> String {
    format!(
        "# snf {} command={} seed={} config={}\n",
        meta.version, meta.command, meta.seed, meta.config_hash
    )
}

pub fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidParameter {
        name: "path",
        reason: format!("{}: {e}", path.display()),
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_error(path, e))
}
