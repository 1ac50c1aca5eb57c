//! CSV output: `.` decimal separator, six significant digits, LF endings,
//! header always present. Written to a temporary file and renamed into
//! place so a failed run never leaves a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "CVCLONE_OUT_DIR";

/// Six significant digits with trailing zeros kept (`0.666667`, `1.00000`,
/// `-4.30000`); scientific notation (`1.00000e6`) outside `[1e-5, 1e6)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..6).contains(&exp) {
        format!("{x:.prec$}", prec = (5 - exp) as usize)
    } else {
        sci
    }
}

pub fn fmt_flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Assembles a CSV document from a header and numeric rows.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let cells: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Where a command's CSV goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    /// `-` means stdout; no path means `<default_name>` in `$CVCLONE_OUT_DIR`
    /// (or the working directory).
    pub fn resolve(out: Option<&str>, default_name: &str) -> Self {
        match out {
            Some("-") => Sink::Stdout,
            Some(path) => Sink::File(PathBuf::from(path)),
            None => {
                let dir = std::env::var_os(OUT_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("."));
                Sink::File(dir.join(default_name))
            }
        }
    }

    pub fn write(&self, contents: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
        match self {
            Sink::Stdout => Ok(stdout.write_all(contents.as_bytes())?),
            Sink::File(path) => write_atomic(path, contents),
        }
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
