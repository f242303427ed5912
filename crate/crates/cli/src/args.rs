//! Parsers for the small command-line value languages.

use tomrep::states::StateSpec;
use tomrep::tomography::ReferenceFrame;

/// `circle:k`, or one or more `mu,nu` pairs separated by `;`.
pub fn parse_frames(s: &str) -> Result<Vec<ReferenceFrame>, String> {
    let s = s.trim();
    if let Some(k) = s.strip_prefix("circle:") {
        let k: usize = k.trim().parse().map_err(|_| format!("bad frame count in '{s}'"))?;
        if k == 0 {
            return Err("circle:k needs k >= 1".into());
        }
        return Ok(ReferenceFrame::circle(k));
    }
    s.split(';')
        .map(|pair| {
            let v = parse_list(pair)?;
            if v.len() != 2 {
                return Err(format!("frame '{pair}' must be 'mu,nu'"));
            }
            let f = ReferenceFrame::new(v[0], v[1]);
            f.validate().map_err(|e| e.to_string())?;
            Ok(f)
        })
        .collect()
}

/// `a:b:n`: n equally spaced points from a to b inclusive.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{s}' must be 'start:stop:count'"));
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| format!("bad start in '{s}'"))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| format!("bad stop in '{s}'"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| format!("bad count in '{s}'"))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(format!("grid '{s}' is empty or not finite"));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { b } else { a + h * k as f64 }).collect())
}

/// Comma-separated reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        })
        .collect()
}

pub fn parse_state(s: &str) -> Result<StateSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("state specification: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames() {
        let c = parse_frames("circle:8").unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!((c[0].mu, c[0].nu), (1.0, 0.0));
        let f = parse_frames("1,0;0.5,-2").unwrap();
        assert_eq!((f[1].mu, f[1].nu), (0.5, -2.0));
        assert!(parse_frames("0,0").is_err());
        assert!(parse_frames("circle:x").is_err());
        assert!(parse_frames("1").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_range("-4:4:201").unwrap();
        assert_eq!(r.len(), 201);
        assert_eq!((r[0], r[100], r[200]), (-4.0, 0.0, 4.0));
        assert_eq!(parse_range("2:3:1").unwrap(), vec![2.0]);
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("1:2:0").is_err());
    }

    #[test]
    fn states() {
        assert!(parse_state(r#"{"type":"fock","n":1}"#).is_ok());
        assert!(parse_state(r#"{"type":"fock""#).is_err());
    }
}
