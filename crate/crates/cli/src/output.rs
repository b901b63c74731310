//! Tabular output. Both formats carry the run metadata ahead of the data and print every
//! float as `{:.16e}` (17 significant digits), so a re-parse recovers the exact `f64`.
//!
//! CSV: `# key = value` comment lines, one header row, then data rows; an undefined value
//! is an empty field. JSONL: a first line `{"meta": {...}, "columns": [...]}`, then one object
//! per row with `null` for undefined values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::error::{CliError, CliResult};

/// Overrides the directory of every output file.
pub const OUTPUT_DIR_ENV: &str = "ROTOR_PAIR_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "pass" } else { "fail" }.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(meta: Vec<(String, String)>, columns: &[&str]) -> Self {
        Self { meta, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn write(&self, out: &mut impl Write, format: Format) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_csv(&self, out: &mut impl Write) -> CliResult<()> {
        let io = |e| CliError::Output(format!("write failed: {e}"));
        for (k, v) in &self.meta {
            writeln!(out, "# {k} = {v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => fmt_float(*x),
                Cell::Text(s) => s.clone(),
                Cell::Missing => String::new(),
            }))?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    fn write_jsonl(&self, out: &mut impl Write) -> CliResult<()> {
        let io = |e| CliError::Output(format!("write failed: {e}"));
        let json = |s: &str| serde_json::to_string(s).expect("strings serialize");
        let meta: Vec<String> =
            self.meta.iter().map(|(k, v)| format!("{}:{}", json(k), json(v))).collect();
        let cols: Vec<String> = self.columns.iter().map(|c| json(c)).collect();
        writeln!(out, "{{\"meta\":{{{}}},\"columns\":[{}]}}", meta.join(","), cols.join(","))
            .map_err(io)?;
        for row in &self.rows {
            let fields: Vec<String> = cols
                .iter()
                .zip(row)
                .map(|(k, c)| match c {
                    Cell::Num(x) if x.is_finite() => format!("{k}:{}", fmt_float(*x)),
                    Cell::Text(s) => format!("{k}:{}", json(s)),
                    _ => format!("{k}:null"),
                })
                .collect();
            writeln!(out, "{{{}}}", fields.join(",")).map_err(io)?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path, format: Format) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        }
        let mut out = BufWriter::new(File::create(path).map_err(CliError::io(path))?);
        self.write(&mut out, format)?;
        out.flush().map_err(CliError::io(path))
    }

    pub fn read_file(path: &Path, format: Format) -> CliResult<Self> {
        let file = File::open(path).map_err(CliError::io(path))?;
        match format {
            Format::Csv => Self::read_csv(BufReader::new(file)),
            Format::Jsonl => Self::read_jsonl(BufReader::new(file)),
        }
    }

    pub fn read_csv(input: impl BufRead) -> CliResult<Self> {
        let mut meta = Vec::new();
        let mut body = String::new();
        for line in input.lines() {
            let line = line.map_err(|e| CliError::Output(e.to_string()))?;
            match line.strip_prefix("# ") {
                Some(m) if body.is_empty() => {
                    let (k, v) = m.split_once(" = ").unwrap_or((m, ""));
                    meta.push((k.to_string(), v.to_string()));
                }
                _ => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push(rec.iter().map(parse_cell).collect::<CliResult<Vec<_>>>()?);
        }
        Ok(Table { meta, columns, rows })
    }

    pub fn read_jsonl(input: impl BufRead) -> CliResult<Self> {
        let bad = |m: &str| CliError::Output(format!("malformed jsonl: {m}"));
        let mut lines = input.lines();
        let first = lines.next().ok_or_else(|| bad("empty file"))?.map_err(|e| bad(&e.to_string()))?;
        let head: serde_json::Value = serde_json::from_str(&first).map_err(|e| bad(&e.to_string()))?;
        let columns: Vec<String> = head["columns"]
            .as_array()
            .ok_or_else(|| bad("missing columns"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("column names must be strings")))
            .collect::<CliResult<_>>()?;
        let meta = head["meta"]
            .as_object()
            .ok_or_else(|| bad("missing meta"))?
            .iter()
            .map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_string()))
            .collect();
        let mut rows = Vec::new();
        for line in lines {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| bad(&e.to_string()))?;
            let row = columns
                .iter()
                .map(|c| match &v[c] {
                    serde_json::Value::Null => Ok(Cell::Missing),
                    serde_json::Value::String(s) => Ok(Cell::Text(s.clone())),
                    x => x.as_f64().map(Cell::Num).ok_or_else(|| bad(&format!("non-number in {c}"))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { meta, columns, rows })
    }
}

/// Empty is missing; anything that is not a number is text.
fn parse_cell(s: &str) -> CliResult<Cell> {
    if s.is_empty() {
        return Ok(Cell::Missing);
    }
    Ok(s.parse::<f64>().map_or_else(|_| Cell::Text(s.to_string()), Cell::Num))
}

/// Output location: the explicit path (flag, then config) or `<stem>.<ext>`, moved into
/// `$ROTOR_PAIR_OUTPUT_DIR` when that is set.
pub fn resolve_path(explicit: Option<&Path>, stem: &str, format: Format, env_dir: Option<&Path>) -> PathBuf {
    let path = explicit
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", format.extension())));
    match env_dir {
        Some(dir) => dir.join(path.file_name().unwrap_or(path.as_os_str())),
        None => path,
    }
}

/// `dir/name.ext` becomes `dir/name.<tag>.ext`.
pub fn tagged_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec![("eps".into(), "0.1".into())], &["t", "x", "k", "check"]);
        t.push(vec![0.0.into(), (1.0 / 3.0).into(), Cell::Missing, true.into()]);
        t.push(vec![0.1.into(), 2f64.sqrt().into(), f64::MIN_POSITIVE.into(), "a, b".into()]);
        t
    }

    #[test]
    fn floats_print_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = sample();
        t.rows[1][1] = std::f64::consts::PI.into();
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# eps = 0.1\nt,x,k,check\n"));
        assert_eq!(Table::read_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn jsonl_round_trip_is_exact() {
        let mut t = sample();
        t.rows[1][1] = (1e-300 / 7.0).into();
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Jsonl).unwrap();
        assert_eq!(Table::read_jsonl(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn env_dir_replaces_only_the_directory() {
        let p = resolve_path(Some(Path::new("runs/a.csv")), "simulate", Format::Csv, Some(Path::new("/tmp/x")));
        assert_eq!(p, PathBuf::from("/tmp/x/a.csv"));
        let p = resolve_path(None, "simulate", Format::Jsonl, None);
        assert_eq!(p, PathBuf::from("simulate.jsonl"));
        assert_eq!(tagged_path(Path::new("d/run.csv"), "eps-001"), PathBuf::from("d/run.eps-001.csv"));
    }
}
