//! Output helpers: 17-significant-digit floats for JSON and CSV.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

pub const CONVENTIONS: &str = "units hbar = m = omega = 1; sigma is a variance; \
Gaussian tomogram density (2 pi sigma)^(-1/2) exp(-(X - Xbar)^2 / (2 sigma)); \
coins: rho[n][n'] = (p1 - 1/2) - i (p2 - 1/2) for n < n', rho[n][n] = p3";

/// `{:.16e}`: 17 significant digits, enough for an exact round trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            w.write_all(fmt_f64(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(io::Error::other)
}

/// Writes to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        let j = to_json(&serde_json::json!({"x": 0.1, "n": 3})).unwrap();
        assert_eq!(j, "{\"n\":3,\"x\":1.0000000000000001e-1}\n");
        let back: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }
}
