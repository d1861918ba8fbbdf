//! CSV metadata headers.
//!
//! Every CSV file starts with a single comment line
//!
//! ```text
//! # meta: key=value key=value ...
//! ```
//!
//! carrying what is needed to re-run the computation: keyboard fingerprint,
//! seed, generator identity and crate version. Values must not contain
//! whitespace; spaces are replaced by underscores.

use std::fmt::Display;
use std::io::{self, Write};

use crate::rng::PRNG_ID;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    fields: Vec<(String, String)>,
}

impl Meta {
    /// Empty metadata, apart from the generator and crate version.
    pub fn new() -> Self {
        Meta::default().with("prng", PRNG_ID).with("version", format!("monkeyzipf-{}", crate::VERSION))
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        let value = value.to_string().split_whitespace().collect::<Vec<_>>().join("_");
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_header<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write!(w, "# meta:")?;
        for (k, v) in &self.fields {
            write!(w, " {k}={v}")?;
        }
        writeln!(w)
    }

    /// Parses a `# meta:` line back into fields.
    pub fn parse_header(line: &str) -> Option<Meta> {
        let rest = line.strip_prefix("# meta:")?;
        let fields = rest
            .split_whitespace()
            .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect();
        Some(Meta { fields })
    }
}
