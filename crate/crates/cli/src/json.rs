//! Minimal JSON writer with a fixed key order and 9 significant digits.

use translates::numfmt::format_sig;

const DIGITS: usize = 9;

/// A JSON number, or the string `"-inf"`.
pub fn num(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else if x.is_finite() {
        format_sig(x, DIGITS)
    } else {
        "null".to_string()
    }
}

pub fn nums(xs: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = xs.into_iter().map(num).collect();
    format!("[{}]", items.join(","))
}

pub fn string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Object builder; keys keep insertion order.
#[derive(Default)]
pub struct Object(Vec<(&'static str, String)>);

impl Object {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn raw(mut self, key: &'static str, value: String) -> Self {
        self.0.push((key, value));
        self
    }

    pub fn num(self, key: &'static str, x: f64) -> Self {
        self.raw(key, num(x))
    }

    pub fn nums(self, key: &'static str, xs: impl IntoIterator<Item = f64>) -> Self {
        self.raw(key, nums(xs))
    }

    pub fn bool(self, key: &'static str, b: bool) -> Self {
        self.raw(key, b.to_string())
    }

    pub fn render(&self) -> String {
        let fields: Vec<String> = self.0.iter().map(|(k, v)| format!("{}:{v}", string(k))).collect();
        format!("{{{}}}", fields.join(","))
    }
}
