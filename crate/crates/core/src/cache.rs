//! On-disk cache for enumerations and denominator tables.
//!
//! Files are named by the SHA-256 of the query key and written atomically
//! (temporary file in the same directory, then rename).
//!
//! * word lists, `<key>.words`: one word per line, `digits<TAB>continuant`,
//!   e.g. `1,2,1\t7`
//! * denominator tables, `<key>.table`: a header line `N count` followed by
//!   run-length lines `<bit> <length>` covering slots `0..=N`

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::continuant::Word;
use crate::error::{Error, Result};
use crate::semigroup::{denominator_set, enumerate_bounded, DenominatorTable, EnumerationQuery};

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "CONTINUANT_CACHE";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: Some(dir.into()) }
    }

    /// `$CONTINUANT_CACHE` if set and nonempty, else `dir`.
    pub fn from_env_or(dir: Option<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Cache::at(v),
            _ => Cache { dir },
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, query: &EnumerationQuery, ext: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.{ext}", sha256_hex(query.key().as_bytes()))))
    }

    /// Words of the query with their continuants, from the cache when present.
    pub fn words(&self, query: &EnumerationQuery) -> Result<Vec<(Word, BigUint)>> {
        let path = self.path(query, "words");
        if let Some(p) = path.as_ref().filter(|p| p.exists()) {
            log::debug!("cache hit {}", p.display());
            let f = fs::File::open(p).map_err(|e| Error::io(p, e))?;
            return read_words(BufReader::new(f));
        }
        let words: Vec<_> = enumerate_bounded(query).collect();
        if let Some(p) = path {
            let mut buf = Vec::new();
            write_words(&words, &mut buf).map_err(|e| Error::io(&p, e))?;
            write_atomic(&p, &buf)?;
        }
        Ok(words)
    }

    /// Denominator table of the query, from the cache when present.
    pub fn denominators(&self, query: &EnumerationQuery) -> Result<DenominatorTable> {
        let path = self.path(query, "table");
        if let Some(p) = path.as_ref().filter(|p| p.exists()) {
            log::debug!("cache hit {}", p.display());
            let f = fs::File::open(p).map_err(|e| Error::io(p, e))?;
            return read_table(BufReader::new(f));
        }
        let table = denominator_set(query)?;
        if let Some(p) = path {
            let mut buf = Vec::new();
            write_table(&table, &mut buf).map_err(|e| Error::io(&p, e))?;
            write_atomic(&p, &buf)?;
        }
        Ok(table)
    }
}

pub fn write_words<W: Write>(words: &[(Word, BigUint)], mut out: W) -> std::io::Result<()> {
    for (w, c) in words {
        writeln!(out, "{w}\t{c}")?;
    }
    Ok(())
}

pub fn read_words<R: BufRead>(input: R) -> Result<Vec<(Word, BigUint)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let (w, c) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("word line {}: missing tab", i + 1)))?;
        let c: BigUint = c.parse().map_err(|_| Error::Parse(format!("word line {}: bad continuant", i + 1)))?;
        out.push((w.parse()?, c));
    }
    Ok(out)
}

pub fn write_table<W: Write>(table: &DenominatorTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", table.bound(), table.count())?;
    let bits = table.membership();
    let mut i = 0;
    while i < bits.len() {
        let b = bits[i];
        let run = bits[i..].iter().take_while(|&&x| x == b).count();
        writeln!(out, "{} {run}", u8::from(b))?;
        i += run;
    }
    Ok(())
}

pub fn read_table<R: BufRead>(input: R) -> Result<DenominatorTable> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty table".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let mut parts = header.split_whitespace().map(str::parse::<u64>);
    let (Some(Ok(n)), Some(Ok(count)), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse(format!("bad table header {header:?}")));
    };
    let mut membership = Vec::with_capacity(n as usize + 1);
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let (bit, len) = line
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad run {line:?}")))?;
        let bit = match bit {
            "0" => false,
            "1" => true,
            _ => return Err(Error::Parse(format!("bad bit in {line:?}"))),
        };
        let len: usize = len.parse().map_err(|_| Error::Parse(format!("bad run length in {line:?}")))?;
        membership.extend(std::iter::repeat(bit).take(len));
    }
    let table = DenominatorTable::from_membership(n, membership)?;
    if table.count() != count {
        return Err(Error::Parse(format!("table header says {count} members, runs give {}", table.count())));
    }
    Ok(table)
}
