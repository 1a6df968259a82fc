use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::failure::Failure;

pub const SCHEMA_VERSION: &str = "1.0";
pub const SCHEMA_MAJOR: u32 = 1;

/// Accepts `"1"` or `"1.x"`, rejects other majors.
pub fn check_schema(version: &str) -> Result<(), Failure> {
    let major = version
        .split('.')
        .next()
        .and_then(|m| m.parse::<u32>().ok());
    match major {
        Some(SCHEMA_MAJOR) => Ok(()),
        _ => Err(Failure::Invalid(format!(
            "unsupported schema_version '{version}' (this build reads major {SCHEMA_MAJOR})"
        ))),
    }
}

pub fn ensure_finite(what: &str, values: &[f64]) -> Result<(), Failure> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Failure::Numerical(format!(
            "{what} contains non-finite value {v}"
        ))),
        None => Ok(()),
    }
}

/// Header line plus one row per entry, floats as `%.12e`.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String, Failure> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        ensure_finite("csv row", &row)?;
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Invalid(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_majors() {
        assert!(check_schema("1.0").is_ok());
        assert!(check_schema("1.7").is_ok());
        assert!(check_schema("2.0").is_err());
        assert!(check_schema("x").is_err());
    }

    #[test]
    fn csv_rejects_nan() {
        assert_eq!(
            csv(&["a", "b"], [vec![1.0, -0.5]]).unwrap(),
            "a,b\n1.000000000000e0,-5.000000000000e-1\n"
        );
        assert!(csv(&["a"], [vec![f64::NAN]]).is_err());
    }

    #[test]
    fn atomic_write_leaves_nothing_on_failure() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "x\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x\n");
        let missing = dir.path().join("no/such/out.csv");
        assert!(matches!(
            write_atomic(&missing, "x"),
            Err(Failure::Invalid(_))
        ));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
