use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult, Outcome};

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub source: String,
    pub id: String,
    pub passed: bool,
    pub summary: String,
}

/// JSON outputs under `path`, or `path` itself if it is a file.
fn inputs(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    Ok(out)
}

/// Verdict rows of one output document. Documents without verdicts
/// (trajectory sidecars, manifests) contribute nothing.
pub fn rows(source: &str, doc: &Value) -> Vec<Row> {
    let Some(list) = doc.get("verdicts").and_then(Value::as_array) else {
        return Vec::new();
    };
    list.iter()
        .map(|v| Row {
            source: source.to_string(),
            id: v.get("id").and_then(Value::as_str).unwrap_or("?").to_string(),
            passed: v.get("passed").and_then(Value::as_bool).unwrap_or(false),
            summary: v.get("summary").and_then(Value::as_str).unwrap_or("").to_string(),
        })
        .collect()
}

pub fn run(path: &Path) -> CliResult<(Outcome, Vec<Row>, String)> {
    let mut all = Vec::new();
    for file in inputs(path)? {
        let text = std::fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
        let doc: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
        let name = file
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        all.extend(rows(&name, &doc));
    }
    if all.is_empty() {
        return Err(CliError::Config(format!("no verdicts found under {}", path.display())));
    }
    let width = all.iter().map(|r| r.source.len()).max().unwrap_or(0);
    let mut text = String::new();
    for r in &all {
        text.push_str(&format!(
            "{:<4}  {:<width$}  {:<14}  {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.source,
            r.id,
            r.summary
        ));
    }
    let passed = all.iter().filter(|r| r.passed).count();
    text.push_str(&format!("{passed} of {} passed\n", all.len()));
    Ok((Outcome::from_passed(passed == all.len()), all, text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rows_from_documents() {
        let doc = json!({"verdicts": [
            {"id": "a", "passed": true, "summary": "ok"},
            {"id": "b", "passed": false, "summary": "bad"}
        ]});
        let r = rows("x.json", &doc);
        assert_eq!(r.len(), 2);
        assert!(r[0].passed && !r[1].passed);
        assert!(rows("m.json", &json!({"command": "simulate"})).is_empty());
    }

    #[test]
    fn directory_report() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("a.json"),
            r#"{"verdicts":[{"id":"q","passed":true,"summary":"s"}]}"#,
        )
        .unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let (outcome, rows, text) = run(dir.path()).unwrap();
        assert_eq!((outcome, rows.len()), (Outcome::Pass, 1));
        assert!(text.contains("1 of 1 passed"));
        std::fs::write(dir.path().join("b.json"), r#"{"verdicts":[{"id":"r","passed":false}]}"#).unwrap();
        assert_eq!(run(dir.path()).unwrap().0, Outcome::Fail);
        let empty = tempfile::tempdir().unwrap();
        assert!(run(empty.path()).is_err());
    }
}
