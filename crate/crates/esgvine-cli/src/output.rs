//! Output-file helpers. Every file this pipeline writes starts with a
//! `# config_digest=<hex>` comment so downstream tooling can trace any
//! table to the exact run settings; readers here skip such comments.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::Path;

use crate::errors::CliError;

/// Writes a pre-rendered CSV body under the digest comment.
pub fn write_table(path: &Path, digest: &str, body: &str) -> Result<(), CliError> {
    let mut text = format!("# config_digest={digest}\n");
    text.push_str(body);
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A CSV writer positioned after the digest comment line.
pub fn csv_writer(path: &Path, digest: &str) -> Result<csv::Writer<File>, CliError> {
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "# config_digest={digest}").map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn flush(mut w: csv::Writer<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e.into()))
}

/// Reads a CSV written by an earlier stage; `context` names the stage
/// to run when the file is missing.
pub fn read_csv(
    path: &Path,
    context: &str,
) -> Result<(Vec<String>, Vec<csv::StringRecord>), CliError> {
    if !path.exists() {
        return Err(CliError::Data(format!("{} not found; {context}", path.display())));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = rdr
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok((headers, rows))
}
