//! Deterministic text emission shared by report writers.
//!
//! All floating-point values in emitted reports, behavior files and CSV
//! tables use a fixed 12-significant-digit decimal format.  The format is
//! stable under a write→parse→write cycle: parsing one of these strings and
//! re-formatting the resulting `f64` reproduces the string byte-for-byte,
//! which is what makes emitted files round-trip with zero diff.

/// Format a float with 12 significant digits.
///
/// Finite values use plain decimal notation when the exponent is moderate
/// and scientific notation otherwise; `-0.0` is normalised to `0`; NaN and
/// infinities spell out as `NaN` / `Inf` / `-Inf` (never emitted by healthy
/// runs, but kept unambiguous for honest failure reports).
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-4..12).contains(&exp) {
        // 12 significant digits in plain notation.
        let decimals = (11 - exp).max(0) as usize;
        let t = format!("{x:.decimals$}");
        trim_trailing_zeros(&t)
    } else {
        let t = format!("{x:.11e}");
        trim_exp_zeros(&t)
    };
    s
}

fn trim_trailing_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

fn trim_exp_zeros(s: &str) -> String {
    // "1.23450000000e-5" -> "1.2345e-5"
    match s.split_once('e') {
        Some((mant, exp)) => format!("{}e{}", trim_trailing_zeros(mant), exp),
        None => s.to_string(),
    }
}

/// Escape a string for inclusion in a JSON document.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Tiny ordered JSON builder: emits objects with fields in insertion order
/// and floats via [`fmt12`], giving byte-deterministic reports.
#[derive(Debug, Default)]
pub struct JsonObj {
    fields: Vec<(String, String)>,
}

impl JsonObj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn raw(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn str(self, key: &str, value: &str) -> Self {
        let v = format!("\"{}\"", json_escape(value));
        self.raw(key, v)
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        let v = fmt12(value);
        self.raw(key, v)
    }

    pub fn int(self, key: &str, value: i64) -> Self {
        self.raw(key, value.to_string())
    }

    pub fn bool(self, key: &str, value: bool) -> Self {
        self.raw(key, if value { "true" } else { "false" })
    }

    /// Render with 2-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        self.render_indent(0) + "\n"
    }

    pub fn render_indent(&self, level: usize) -> String {
        let pad = "  ".repeat(level + 1);
        let close = "  ".repeat(level);
        if self.fields.is_empty() {
            return "{}".to_string();
        }
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{pad}\"{}\": {v}", json_escape(k)))
            .collect();
        format!("{{\n{}\n{close}}}", body.join(",\n"))
    }
}

/// Render a JSON array of pre-rendered items (one per line, indented).
pub fn json_array(items: &[String], level: usize) -> String {
    if items.is_empty() {
        return "[]".to_string();
    }
    let pad = "  ".repeat(level + 1);
    let close = "  ".repeat(level);
    let body: Vec<String> = items.iter().map(|it| format!("{pad}{it}")).collect();
    format!("[\n{}\n{close}]", body.join(",\n"))
}

/// Render a flat JSON array of numbers on one line.
pub fn json_num_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| fmt12(*x)).collect();
    format!("[{}]", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_idempotent() {
        for &x in &[
            0.0,
            1.0,
            -1.0,
            3.0_f64.sqrt() * 1.5,
            0.401923788646684,
            2.598076211353316,
            1.0 / 3.0,
            -0.9417399277466141,
            1.23456789e-7,
            6.02214076e23,
            f64::MIN_POSITIVE,
        ] {
            let s1 = fmt12(x);
            let y: f64 = s1.parse().unwrap();
            let s2 = fmt12(y);
            assert_eq!(s1, s2, "format of {x} not stable: {s1} vs {s2}");
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(2.598076211353316), "2.59807621135");
        assert_eq!(fmt12(3.0), "3");
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(-0.0), "0");
    }

    #[test]
    fn object_rendering_is_ordered() {
        let o = JsonObj::new().int("b", 1).num("a", 0.25).str("c", "x\"y");
        let s = o.render();
        let ib = s.find("\"b\"").unwrap();
        let ia = s.find("\"a\"").unwrap();
        assert!(ib < ia);
        assert!(s.contains("\"c\": \"x\\\"y\""));
    }
}
