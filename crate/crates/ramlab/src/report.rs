//! Deterministic JSON reports. Objects are emitted with keys in insertion
//! order and no timing or environment data, so a fixed (input, version)
//! pair always produces byte-identical output.

use serde_json::{json, Map, Value as Json};

pub const TOOL_NAME: &str = "ramlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One re-checked witness entry: the claim in words, the witness data, and
/// the verdict of re-running the check from the data alone.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessEntry {
    pub claim: String,
    pub data: Json,
    pub recheck: bool,
}

impl WitnessEntry {
    pub fn to_json(&self) -> Json {
        json!({
            "claim": self.claim,
            "data": self.data,
            "recheck": if self.recheck { "pass" } else { "fail" },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub task: Json,
    pub result: Json,
    pub verification: Vec<WitnessEntry>,
}

impl Report {
    pub fn new(task: Json, result: Json) -> Report {
        Report { task, result, verification: Vec::new() }
    }

    pub fn add_witness(&mut self, claim: impl Into<String>, data: Json, recheck: bool) {
        self.verification.push(WitnessEntry { claim: claim.into(), data, recheck });
    }

    pub fn all_verified(&self) -> bool {
        self.verification.iter().all(|w| w.recheck)
    }

    pub fn to_json(&self) -> Json {
        let mut obj = Map::new();
        obj.insert(
            "tool".into(),
            json!({ "name": TOOL_NAME, "version": TOOL_VERSION }),
        );
        obj.insert("task".into(), self.task.clone());
        obj.insert("result".into(), self.result.clone());
        obj.insert(
            "verification".into(),
            Json::Array(self.verification.iter().map(WitnessEntry::to_json).collect()),
        );
        obj.insert("all_verified".into(), Json::Bool(self.all_verified()));
        // timings are deliberately not recorded: reports must be
        // byte-deterministic for a fixed input and version
        obj.insert("timings".into(), Json::Null);
        Json::Object(obj)
    }

    /// The canonical on-disk / on-stdout form: pretty JSON plus a trailing
    /// newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }
}
