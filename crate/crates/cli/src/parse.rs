//! Parsers for the `--z` and `--region` flag values.

use diracspec::birman_schwinger::Rect;
use diracspec::Complex64;

/// Parses `a+bi`, `a-bi`, `bi`, `a` (exponents allowed, `j` accepted).
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}; expected a+bi");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coeff = |u: &str| -> Result<f64, String> {
        match u {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => u.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, coeff(&body[k..])?)),
        None => Ok(Complex64::new(0.0, coeff(body)?)),
    }
}

/// Parses `re_min,re_max,im_min,im_max`.
pub fn region(s: &str) -> Result<Rect, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("cannot parse region {s:?}; expected re_min,re_max,im_min,im_max"))?;
    if parts.len() != 4 {
        return Err(format!("region needs four numbers, got {}", parts.len()));
    }
    Rect::new(parts[0], parts[1], parts[2], parts[3]).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(complex("0+2i").unwrap(), c(0.0, 2.0));
        assert_eq!(complex("1.5-0.25i").unwrap(), c(1.5, -0.25));
        assert_eq!(complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(complex("-2e-3+1e+2i").unwrap(), c(-2e-3, 100.0));
        assert_eq!(complex(" 1 + 2 i ").unwrap(), c(1.0, 2.0));
        assert_eq!(complex("0.5i").unwrap(), c(0.0, 0.5));
        assert!(complex("1+2k").is_err());
        assert!(complex("").is_err());
    }

    #[test]
    fn region_forms() {
        let r = region("-0.5,0.5,0.5,1.5").unwrap();
        assert_eq!((r.re_min, r.re_max, r.im_min, r.im_max), (-0.5, 0.5, 0.5, 1.5));
        assert!(region("1,0,0,1").is_err());
        assert!(region("0,1,0").is_err());
    }
}
