use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub label: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(label: impl Into<String>, bytes: &[u8]) -> InputDigest {
        let digest = Sha256::digest(bytes);
        InputDigest { label: label.into(), sha256: digest.iter().map(|b| format!("{b:02x}")).collect() }
    }
}

/// A computed value, tagged with the operation that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Item {
    pub name: String,
    pub op: String,
    pub text: String,
    pub value: Value,
}

/// Two independent computations of the same quantity.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub left_op: String,
    pub left: String,
    pub right_op: String,
    pub right: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub name: String,
    pub steps: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub results: Vec<Item>,
    pub checks: Vec<Check>,
    pub traces: Vec<Trace>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(argv: &[String]) -> Report {
        Report { command: argv.join(" "), ..Report::default() }
    }

    pub fn input(&mut self, label: impl Into<String>, bytes: &[u8]) {
        self.inputs.push(InputDigest::of(label, bytes));
    }

    pub fn result(&mut self, name: impl Into<String>, op: &str, text: impl Into<String>, value: impl Serialize) {
        self.results.push(Item {
            name: name.into(),
            op: op.to_string(),
            text: text.into(),
            value: serde_json::to_value(value).expect("report values serialize"),
        });
    }

    /// Records a comparison and returns whether it passed.
    pub fn check<T: PartialEq + ToString>(
        &mut self,
        name: impl Into<String>,
        (left_op, left): (&str, T),
        (right_op, right): (&str, T),
    ) -> bool {
        let pass = left == right;
        self.checks.push(Check {
            name: name.into(),
            left_op: left_op.to_string(),
            left: left.to_string(),
            right_op: right_op.to_string(),
            right: right.to_string(),
            pass,
        });
        pass
    }

    pub fn trace(&mut self, name: impl Into<String>, steps: Vec<String>) {
        self.traces.push(Trace { name: name.into(), steps });
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if !self.inputs.is_empty() {
            out.push_str("inputs:\n");
            for i in &self.inputs {
                out.push_str(&format!("  {}  sha256:{}\n", i.label, i.sha256));
            }
        }
        if !self.results.is_empty() {
            out.push_str("results:\n");
            for r in &self.results {
                out.push_str(&format!("  {} = {}  [{}]\n", r.name, r.text, r.op));
            }
        }
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                out.push_str(&format!(
                    "  {}  {}: {} [{}] vs {} [{}]\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.left,
                    c.left_op,
                    c.right,
                    c.right_op
                ));
            }
            out.push_str(&format!("  {} of {} checks passed\n", self.checks.len() - self.failed_checks(), self.checks.len()));
        }
        if !self.traces.is_empty() {
            out.push_str("traces:\n");
            for t in &self.traces {
                out.push_str(&format!("  {}:\n", t.name));
                for (i, s) in t.steps.iter().enumerate() {
                    out.push_str(&format!("    {}. {s}\n", i + 1));
                }
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("warnings:\n");
            for w in &self.warnings {
                out.push_str(&format!("  {w}\n"));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
