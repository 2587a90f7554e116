//! Parsers for command-line values.

use hillspec::potential::Polynomial;
use hillspec::Complex64;

/// `3`, `-2.5`, `2+1i`, `1-2i`, `10i`, `-i`, `1e-3+2e2i`.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse `{text}` as a complex number (e.g. 2, 1.5-2i, 3i)");
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// `a..b` with `a < b`.
pub fn range(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a range `min..max`, got `{text}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("`{a}` is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("`{b}` is not a number"))?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(format!("range `{text}` must be finite"));
    }
    if a >= b {
        return Err(format!("empty range `{text}`: need min < max"));
    }
    Ok((a, b))
}

/// `poly:c_n,...,c_1,c_0`, highest power first.
pub fn polynomial(text: &str) -> Result<Polynomial, String> {
    let body = text
        .trim()
        .strip_prefix("poly:")
        .ok_or_else(|| format!("expected `poly:c_n,...,c_0`, got `{text}`"))?;
    let coeffs = body.split(',').map(complex).collect::<Result<Vec<_>, _>>()?;
    Ok(Polynomial::new(coeffs))
}
