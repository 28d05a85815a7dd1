//! Versioned CSV interchange format for archives.
//!
//! ```text
//! ITEQD-ARCHIVE v1
//! tool,<name and version>
//! config_hash,<hex>
//! dims,<d>
//! lower,<l0>,...,<l(d-1)>
//! upper,<u0>,...
//! bins,<b0>,...
//! genome_len,<n>
//! evaluations,<count>
//! seed,<seed>
//! cells,<occupied count>
//! index,b0..b(d-1),performance,g0..g(n-1)
//! <flat index>,<descriptor...>,<performance>,<genome...>
//! ```
//!
//! Floats are written with 17 significant digits, so reading a file back
//! reproduces every value bit for bit. Records are sorted by flat index.

use std::io::{BufRead, Write};

use super::{ArchiveGrid, Elite, Genome, GridSpec};
use crate::error::{Error, Result};

pub const ARCHIVE_HEADER: &str = "ITEQD-ARCHIVE v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveMeta {
    pub tool: String,
    pub config_hash: String,
    pub genome_len: usize,
    pub evaluations: u64,
    pub seed: u64,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn join_f64(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

pub fn write_archive<W: Write>(grid: &ArchiveGrid, meta: &ArchiveMeta, mut out: W) -> Result<()> {
    let spec = grid.spec();
    let bins: Vec<String> = spec.bins().iter().map(|b| b.to_string()).collect();
    writeln!(out, "{ARCHIVE_HEADER}")?;
    writeln!(out, "tool,{}", meta.tool)?;
    writeln!(out, "config_hash,{}", meta.config_hash)?;
    writeln!(out, "dims,{}", spec.dims())?;
    writeln!(out, "lower,{}", join_f64(spec.lower()))?;
    writeln!(out, "upper,{}", join_f64(spec.upper()))?;
    writeln!(out, "bins,{}", bins.join(","))?;
    writeln!(out, "genome_len,{}", meta.genome_len)?;
    writeln!(out, "evaluations,{}", meta.evaluations)?;
    writeln!(out, "seed,{}", meta.seed)?;
    writeln!(out, "cells,{}", grid.len())?;
    let mut columns = vec!["index".to_string()];
    columns.extend((0..spec.dims()).map(|d| format!("b{d}")));
    columns.push("performance".into());
    columns.extend((0..meta.genome_len).map(|g| format!("g{g}")));
    writeln!(out, "{}", columns.join(","))?;
    for (index, elite) in grid.sorted() {
        if elite.genome.len() != meta.genome_len {
            return Err(Error::Format {
                line: 0,
                message: format!("cell {index} has genome length {}, expected {}", elite.genome.len(), meta.genome_len),
            });
        }
        writeln!(out, "{index},{},{},{}", join_f64(&elite.descriptor), fmt_f64(elite.performance), join_f64(elite.genome.params()))?;
    }
    Ok(())
}

struct LineReader<R> {
    inner: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> LineReader<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        self.buf.clear();
        if self.inner.read_line(&mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        Ok(Some(self.buf.trim_end_matches(['\n', '\r']).to_string()))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Format { line: self.line_no, message: message.into() }
    }

    fn field(&mut self, key: &str) -> Result<Vec<String>> {
        let next = self.line_no + 1;
        let line =
            self.next_line()?.ok_or_else(|| Error::Format { line: next, message: format!("unexpected end of file, expected `{key}`") })?;
        let mut parts = line.split(',').map(str::to_string);
        match parts.next() {
            Some(k) if k == key => Ok(parts.collect()),
            other => Err(self.err(format!("expected `{key}`, found `{}`", other.unwrap_or_default()))),
        }
    }

    fn single<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let values = self.field(key)?;
        match values.as_slice() {
            [v] => v.parse().map_err(|_| self.err(format!("bad value for `{key}`: `{v}`"))),
            _ => Err(self.err(format!("`{key}` expects exactly one value"))),
        }
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str, len: usize) -> Result<Vec<T>> {
        let values = self.field(key)?;
        if values.len() != len {
            return Err(self.err(format!("`{key}` expects {len} values, found {}", values.len())));
        }
        values.iter().map(|v| v.parse().map_err(|_| self.err(format!("bad value for `{key}`: `{v}`")))).collect()
    }
}

pub fn read_archive<R: BufRead>(input: R) -> Result<(ArchiveGrid, ArchiveMeta)> {
    let mut r = LineReader { inner: input, line_no: 0, buf: String::new() };
    match r.next_line()?.as_deref() {
        Some(ARCHIVE_HEADER) => {}
        Some(other) => {
            let msg = format!("unsupported header `{other}`, expected `{ARCHIVE_HEADER}`");
            return Err(r.err(msg));
        }
        None => return Err(r.err("empty file")),
    }
    let tool = r.field("tool")?.join(",");
    let config_hash = r.field("config_hash")?.join(",");
    let dims: usize = r.single("dims")?;
    let lower = r.list("lower", dims)?;
    let upper = r.list("upper", dims)?;
    let bins = r.list("bins", dims)?;
    let spec = GridSpec::new(lower, upper, bins).map_err(|e| r.err(e.to_string()))?;
    let genome_len: usize = r.single("genome_len")?;
    let evaluations: u64 = r.single("evaluations")?;
    let seed: u64 = r.single("seed")?;
    let cells: usize = r.single("cells")?;
    let columns = r.field("index")?;
    if columns.len() != dims + 1 + genome_len {
        return Err(r.err("column header does not match dims and genome_len"));
    }

    let mut grid = ArchiveGrid::new(spec);
    let width = 2 + dims + genome_len;
    while let Some(line) = r.next_line()? {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != width {
            let msg = format!("record has {} fields, expected {width}", parts.len());
            return Err(r.err(msg));
        }
        let index: u64 = parts[0].parse().map_err(|_| r.err("bad cell index"))?;
        let nums: Vec<f64> =
            parts[1..].iter().map(|p| p.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| r.err("bad number"))?;
        let descriptor = nums[..dims].to_vec();
        let performance = nums[dims];
        let genome = Genome::new(nums[dims + 1..].to_vec()).map_err(|e| r.err(e.to_string()))?;
        let expected = grid.spec().flat_index(&descriptor).map_err(|e| r.err(e.to_string()))?;
        if expected != index {
            let msg = format!("descriptor maps to cell {expected}, record says {index}");
            return Err(r.err(msg));
        }
        if grid.get(index).is_some() {
            return Err(r.err(format!("duplicate cell {index}")));
        }
        grid.try_insert(Elite { genome, descriptor, performance }).map_err(|e| r.err(e.to_string()))?;
    }
    if grid.len() != cells {
        return Err(r.err(format!("header announces {cells} cells, found {}", grid.len())));
    }
    Ok((grid, ArchiveMeta { tool, config_hash, genome_len, evaluations, seed }))
}
