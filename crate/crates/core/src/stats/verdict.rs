use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// One line for the table.
    pub summary: String,
    pub details: Value,
    pub seconds: f64,
}

/// A collection of verdicts with shared metadata.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub metadata: Value,
    pub verdicts: Vec<Verdict>,
}

impl VerdictDocument {
    pub fn new(metadata: Value) -> Self {
        Self {
            metadata,
            verdicts: Vec::new(),
        }
    }

    pub fn push(&mut self, verdict: Verdict) {
        self.verdicts.push(verdict);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "metadata": self.metadata,
            "passed": self.passed(),
            "verdicts": self.verdicts,
        })
    }

    pub fn table(&self) -> String {
        let width = self.verdicts.iter().map(|v| v.name.len()).max().unwrap_or(0);
        let id_width = self.verdicts.iter().map(|v| v.id.len()).max().unwrap_or(0).max(3);
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&format!(
                "{} {:>id_width$}  {:width$}  {}  ({:.1}s)\n",
                if v.passed { "PASS" } else { "FAIL" },
                v.id,
                v.name,
                v.summary,
                v.seconds
            ));
        }
        let failed = self.verdicts.iter().filter(|v| !v.passed).count();
        out.push_str(&format!(
            "{} of {} passed\n",
            self.verdicts.len() - failed,
            self.verdicts.len()
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_and_json() {
        let mut doc = VerdictDocument::new(json!({"seed": 1}));
        doc.push(Verdict {
            id: "1".into(),
            name: "a".into(),
            passed: true,
            summary: "ok".into(),
            details: Value::Null,
            seconds: 0.0,
        });
        assert!(doc.passed());
        doc.push(Verdict {
            id: "2".into(),
            name: "bb".into(),
            passed: false,
            summary: "slope -0.6".into(),
            details: json!({"slope": -0.6}),
            seconds: 1.25,
        });
        assert!(!doc.passed());
        let t = doc.table();
        assert!(t.starts_with("PASS   1  a   ok"));
        assert!(t.contains("FAIL   2  bb  slope -0.6  (1.2s)") || t.contains("FAIL   2  bb  slope -0.6  (1.3s)"));
        assert!(t.ends_with("1 of 2 passed\n"));
        let back: VerdictDocument = serde_json::from_value(json!({
            "metadata": doc.metadata,
            "verdicts": doc.to_json()["verdicts"],
        }))
        .unwrap();
        assert_eq!(back, doc);
    }
}
