use std::fmt::Write;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact form for summaries.
pub fn short(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:.6e}")
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn pass_fail(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

/// Aligned `key  value` lines.
#[derive(Default)]
pub struct Block {
    out: String,
}

impl Block {
    pub const WIDTH: usize = 34;

    pub fn new(title: &str) -> Self {
        let mut b = Self::default();
        b.heading(title);
        b
    }

    pub fn heading(&mut self, title: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let _ = writeln!(self.out, "== {title} ==");
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{key:<width$} {value}", width = Self::WIDTH);
    }

    pub fn line(&mut self, text: &str) {
        self.out.push_str(text);
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
