//! Plain CSV writer: header row of column names, floats as `{:.16e}`, LF line endings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use stark_readout::Dataset;

use crate::error::CliError;

pub fn render(ds: &Dataset) -> String {
    let mut out = ds.columns.join(",");
    out.push('\n');
    for row in &ds.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `./out/<command>-<unix seconds>.csv` unless an explicit path was given.
pub fn base_path(command: &str, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            PathBuf::from("out").join(format!("{command}-{secs}.csv"))
        }
    }
}

/// `dir/name.csv` becomes `dir/name-suffix.csv`.
pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = match base.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    base.with_file_name(file)
}

pub fn write(ds: &Dataset, path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(render(ds).as_bytes()).map_err(io)?;
    log::info!("wrote {} rows to {}", ds.rows.len(), path.display());
    Ok(())
}

/// Writes one dataset to `base`, or several to `base` with `-<dataset name>` inserted.
pub fn write_all(sets: &[Dataset], base: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for ds in sets {
        let path = if sets.len() == 1 { base.to_path_buf() } else { with_suffix(base, &ds.name) };
        write(ds, &path)?;
        paths.push(path);
    }
    Ok(paths)
}
