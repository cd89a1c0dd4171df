//! CSV and plot-data emission with fixed 12-significant-digit formatting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::CliError;

pub const SIG_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, switching to exponent notation
/// outside `[1e-5, 1e12)`. Trailing zeros are dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIG_DIGITS as i32).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(if b { "true" } else { "false" }.into())
    }
}

/// Resolved parameters echoed into the header comment.
#[derive(Clone, Debug, Default)]
pub struct ConfigEcho(Vec<(String, String)>);

impl ConfigEcho {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.set(key, fmt_num(value))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }
}

/// A CSV table with a versioned schema name.
#[derive(Clone, Debug)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Self {
            schema: schema.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.schema);
        self.rows.push(row);
    }

    pub fn to_csv(&self, echo: &ConfigEcho, reproducible: bool) -> String {
        let mut out = format!(
            "# scatgate {} schema={} {}\n",
            env!("CARGO_PKG_VERSION"),
            self.schema,
            echo.render()
        );
        if !reproducible {
            out.push_str(&format!("# generated unix={}\n", unix_now()));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Whitespace-separated numeric columns with a leading comment naming them.
pub fn emit_plot_data(columns: &[&str], rows: &[Vec<f64>]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("plot data needs at least one row".into()));
    }
    if columns.len() < 2 {
        return Err(CliError::Config("plot data needs at least two columns".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(CliError::Config(format!(
            "plot row {bad} has {} values, expected {}",
            rows[bad].len(),
            columns.len()
        )));
    }
    let mut out = format!("# {}\n", columns.join(" "));
    for r in rows {
        out.push_str(&r.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Checks that `path` can be created: its parent directory exists.
pub fn check_writable(path: &Path) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(CliError::Config(format!("output directory {} does not exist", parent.display())));
    }
    if path.is_dir() {
        return Err(CliError::Config(format!("output path {} is a directory", path.display())));
    }
    Ok(())
}

/// Writes all files through temporaries in the target directories and
/// renames them into place only once every temporary is complete.
pub fn write_atomic(files: &[(PathBuf, String)]) -> Result<(), CliError> {
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (path, contents) in files {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
        let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        });
        staged.push((tmp, path.clone()));
        if let Err(e) = res {
            cleanup(&staged);
            return Err(CliError::Io(format!("{}: {e}", path.display())));
        }
    }
    for (k, (tmp, path)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, path) {
            cleanup(&staged[k..]);
            return Err(CliError::Io(format!("{}: {e}", path.display())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.95), "0.95");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_num(9.9999999999996), "10");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1e12), "1e12");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo/1", &["u", "c"]);
        t.push(vec![0.5.into(), (1.0 / 3.0).into()]);
        let mut echo = ConfigEcho::new();
        echo.set("N", 25).num("J", 1.0);
        let csv = t.to_csv(&echo, true);
        let expected = format!("# scatgate {} schema=demo/1 N=25 J=1\nu,c\n0.5,0.333333333333\n", env!("CARGO_PKG_VERSION"));
        assert_eq!(csv, expected);
        assert!(t.to_csv(&echo, false).contains("# generated unix="));
    }

    #[test]
    fn plot_data_rules() {
        assert!(emit_plot_data(&["u", "c"], &[]).is_err());
        assert!(emit_plot_data(&["u", "c"], &[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(emit_plot_data(&["u"], &[vec![1.0]]).is_err());
        assert_eq!(emit_plot_data(&["u", "c"], &[vec![1.0, 0.25]]).unwrap(), "# u c\n1 0.25\n");
    }
}
