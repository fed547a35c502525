use std::io::Write;
use std::path::{Path, PathBuf};

use qms_core::majorization::MAJORIZATION_TOL;
use qms_core::simplex::FEASIBILITY_TOL;

use crate::error::CliError;

/// Relative `--out` paths are resolved against this directory when set.
pub const OUT_DIR_VAR: &str = "QMS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunInfo {
    pub command: &'static str,
    pub seed: u64,
    pub tol: f64,
}

/// Comment block opening every CSV file.
pub fn header(info: &RunInfo) -> String {
    format!(
        "# qms {}\n# command: {}\n# seed: {}\n# tol: {:e}\n# majorization_tol: {:e}\n# feasibility_tol: {:e}\n",
        env!("CARGO_PKG_VERSION"),
        info.command,
        info.seed,
        info.tol,
        MAJORIZATION_TOL,
        FEASIBILITY_TOL,
    )
}

/// Quotes a CSV field when it contains a separator or quote.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn resolve(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if out.is_relative() => Path::new(&dir).join(out),
        _ => out.to_path_buf(),
    }
}

/// Writes the whole document in one go: to stdout, or to a temporary file
/// beside `out` that is then renamed over it.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(out) = out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        return Ok(stdout.flush()?);
    };
    let path = resolve(out);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| CliError::Output(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_only_when_needed() {
        assert_eq!(field("icosahedron"), "icosahedron");
        assert_eq!(field("sigma_x, sigma_y"), "\"sigma_x, sigma_y\"");
        assert_eq!(field("a\"b"), "\"a\"\"b\"");
    }

    #[test]
    fn header_records_run() {
        let h = header(&RunInfo {
            command: "bound",
            seed: 42,
            tol: 1e-7,
        });
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# seed: 42\n") && h.contains("# tol: 1e-7\n"));
    }
}
