//! Numbers written as small arithmetic expressions over `pi`.
//!
//! Grammar: `expr := term (('*' | '/') term)*`, `term := ['-' | '+'] (float | 'pi')`.
//! So `pi/2`, `-2*pi/3` and `0.25` are accepted; `+`/`-` between terms are not.

use std::f64::consts::PI;

pub fn parse_number(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty number".into());
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = s.as_str();
    loop {
        let end = rest
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '*' || c == '/')
            .map_or(rest.len(), |(i, _)| i);
        let term = parse_term(&rest[..end]).ok_or_else(|| format!("cannot parse number `{text}`"))?;
        match op {
            '*' => value *= term,
            _ => value /= term,
        }
        if end == rest.len() {
            break;
        }
        op = rest[end..].chars().next().unwrap();
        rest = &rest[end + 1..];
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("number `{text}` is not finite"))
    }
}

fn parse_term(t: &str) -> Option<f64> {
    let (sign, body) = match t.as_bytes().first()? {
        b'-' => (-1.0, &t[1..]),
        b'+' => (1.0, &t[1..]),
        _ => (1.0, t),
    };
    if body.eq_ignore_ascii_case("pi") {
        return Some(sign * PI);
    }
    // reject words like "inf"/"nan" that str::parse accepts
    if !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    body.parse::<f64>().ok().map(|v| sign * v)
}
