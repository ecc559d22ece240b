use std::io::Write;
use std::path::{Path, PathBuf};

use crate::args::Format;
use crate::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "CORRCONV_OUT_DIR";

/// Twelve significant digits, lowercase exponent; `-0` prints as `0`.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Re-reads a formatted number so JSON carries exactly the CSV value.
pub fn json_num(x: f64) -> serde_json::Value {
    let v: f64 = fmt_num(x).parse().expect("formatted float parses");
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// `--out`, else `$CORRCONV_OUT_DIR/<command>.<ext>` for file formats, else stdout.
pub fn destination(out: Option<PathBuf>, command: &str, format: Format) -> Destination {
    if let Some(path) = out {
        return Destination::File(path);
    }
    if format != Format::Text {
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
            return Destination::File(Path::new(&dir).join(format!("{command}.{}", format.extension())));
        }
    }
    Destination::Stdout
}

pub fn emit(dest: &Destination, body: &[u8]) -> CliResult<()> {
    match dest {
        Destination::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
        Destination::File(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(format!("csv encoding failed: {e}")))
}

pub fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("json value serializes");
    s.push(b'\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(fmt_num(2.0 / 9.0), "2.22222222222e-1");
        assert_eq!(fmt_num(-0.0), "0.00000000000e0");
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-1.5e-12), "-1.50000000000e-12");
    }

    #[test]
    fn json_matches_formatted_value() {
        let x = 0.1360000000004321;
        let j = json_num(x).as_f64().unwrap();
        assert_eq!(fmt_num(j), fmt_num(x));
    }
}
