//! JSON form of a potential spec.
//!
//! ```text
//! {
//!   "kind": "zero" | "constant" | "fourier" | "polynomial_piece" | "samples" | "b_family",
//!   "params": { ... kind specific ... },
//!   "grid_n": 256,                      // optional, even, >= 16
//!   "extension_mode": "half_period",    // optional
//!   "id": "name",                       // optional
//!   "header": { ... }                   // optional, ignored on input
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Polynomial coefficients are listed
//! from the highest power down. Every kind accepts an optional
//! `"offset": [re, im]` param added to the potential. Unknown keys are
//! rejected.

use super::{ExtensionMode, Polynomial, PotentialKind, PotentialSpec, Span, DEFAULT_GRID_N};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    grid_n: Option<usize>,
    #[serde(default)]
    extension_mode: Option<ExtensionMode>,
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    header: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OffsetOnly {
    #[serde(default)]
    offset: Option<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    value: Complex64,
    #[serde(default)]
    offset: Option<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierParams {
    #[serde(default)]
    a0: Option<Complex64>,
    #[serde(default)]
    cos: Vec<Complex64>,
    #[serde(default)]
    sin: Vec<Complex64>,
    #[serde(default)]
    offset: Option<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyParams {
    coeffs: Vec<Complex64>,
    #[serde(default)]
    span: Option<Span>,
    #[serde(default)]
    tail_re: Option<Vec<f64>>,
    #[serde(default)]
    tail_im: Option<Vec<f64>>,
    #[serde(default)]
    offset: Option<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleParams {
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(default)]
    offset: Option<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BFamilyParams {
    q2: Vec<Complex64>,
    #[serde(default)]
    span: Option<Span>,
    #[serde(default)]
    tail_re: Option<Vec<f64>>,
    #[serde(default)]
    tail_im: Option<Vec<f64>>,
    #[serde(default)]
    offset: Option<Complex64>,
}

fn params<T: DeserializeOwned>(raw: &Option<Value>) -> Result<T> {
    let v = raw.clone().unwrap_or_else(|| json!({}));
    serde_json::from_value(v).map_err(|e| Error::validation("params", e.to_string()))
}

fn zip_parts(re: &[f64], im: &[f64], field: &str) -> Result<Vec<Complex64>> {
    if re.len() != im.len() {
        return Err(Error::validation(
            field,
            format!("re has {} entries but im has {}", re.len(), im.len()),
        ));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

fn tail(re: &Option<Vec<f64>>, im: &Option<Vec<f64>>) -> Result<Option<Vec<Complex64>>> {
    match (re, im) {
        (None, None) => Ok(None),
        (Some(r), None) => Ok(Some(zip_parts(r, &vec![0.0; r.len()], "params.tail_im")?)),
        (Some(r), Some(i)) => Ok(Some(zip_parts(r, i, "params.tail_im")?)),
        (None, Some(_)) => Err(Error::validation("params.tail_re", "tail_im given without tail_re")),
    }
}

pub(super) fn from_value(value: &Value) -> Result<PotentialSpec> {
    let raw: RawSpec =
        serde_json::from_value(value.clone()).map_err(|e| Error::validation("spec", e.to_string()))?;
    let (mut spec, offset) = match raw.kind.as_str() {
        "zero" => {
            let p: OffsetOnly = params(&raw.params)?;
            (PotentialSpec::zero(), p.offset)
        }
        "constant" => {
            let p: ConstantParams = params(&raw.params)?;
            (PotentialSpec::constant(p.value), p.offset)
        }
        "fourier" => {
            let p: FourierParams = params(&raw.params)?;
            let a0 = p.a0.unwrap_or_default();
            (PotentialSpec::fourier(a0, p.cos, p.sin), p.offset)
        }
        "polynomial_piece" => {
            let p: PolyParams = params(&raw.params)?;
            let mut s =
                PotentialSpec::polynomial_piece(Polynomial::new(p.coeffs), p.span.unwrap_or_default());
            if let Some(t) = tail(&p.tail_re, &p.tail_im)? {
                s = s.with_tail(t);
            }
            (s, p.offset)
        }
        "samples" => {
            let p: SampleParams = params(&raw.params)?;
            let values = zip_parts(&p.re, &p.im, "params.im")?;
            let n = values.len().saturating_sub(1);
            if let Some(g) = raw.grid_n {
                if g != n {
                    return Err(Error::validation(
                        "params.re",
                        format!("expected grid_n + 1 = {} samples, got {}", g + 1, values.len()),
                    ));
                }
            }
            let s = PotentialSpec {
                grid_n: n,
                ..PotentialSpec::from_kind(PotentialKind::Samples(values))
            };
            (s, p.offset)
        }
        "b_family" => {
            let p: BFamilyParams = params(&raw.params)?;
            let span = p.span.unwrap_or_default();
            let q2 = Polynomial::new(p.q2);
            let even = q2.add(&q2.reflect(span.length()));
            if even.max_coeff() > 1e-12 * q2.max_coeff().max(1.0) {
                return Err(Error::validation(
                    "params.q2",
                    format!("q2 must be antisymmetric about {}", span.length() / 2.0),
                ));
            }
            let mut s = PotentialSpec::b_family(q2, span);
            if let Some(t) = tail(&p.tail_re, &p.tail_im)? {
                s = s.with_tail(t);
            }
            (s, p.offset)
        }
        other => {
            return Err(Error::validation(
                "kind",
                format!("unknown kind `{other}` (expected zero, constant, fourier, polynomial_piece, samples, b_family)"),
            ))
        }
    };
    if !matches!(spec.kind, PotentialKind::Samples(_)) {
        spec.grid_n = raw.grid_n.unwrap_or(DEFAULT_GRID_N);
    }
    if let Some(mode) = raw.extension_mode {
        spec.extension_mode = mode;
    }
    if let Some(o) = offset {
        spec.offset = o;
    }
    spec.id = raw.id;
    spec.validate()?;
    Ok(spec)
}

fn pair(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn pairs(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(pair).collect())
}

pub(super) fn to_value(spec: &PotentialSpec) -> Value {
    let mut params = match &spec.kind {
        PotentialKind::Zero => json!({}),
        PotentialKind::Constant(c) => json!({ "value": pair(*c) }),
        PotentialKind::Fourier { a0, cos, sin } => {
            json!({ "a0": pair(*a0), "cos": pairs(cos), "sin": pairs(sin) })
        }
        PotentialKind::PolynomialPiece { poly, span } => {
            json!({ "coeffs": pairs(poly.coeffs()), "span": span })
        }
        PotentialKind::Samples(v) => json!({
            "re": v.iter().map(|c| c.re).collect::<Vec<_>>(),
            "im": v.iter().map(|c| c.im).collect::<Vec<_>>(),
        }),
        PotentialKind::BFamily { q2, span, .. } => {
            json!({ "q2": pairs(q2.coeffs()), "span": span })
        }
    };
    let obj = params.as_object_mut().expect("params is an object");
    if let Some(t) = &spec.tail {
        obj.insert("tail_re".into(), json!(t.iter().map(|c| c.re).collect::<Vec<_>>()));
        obj.insert("tail_im".into(), json!(t.iter().map(|c| c.im).collect::<Vec<_>>()));
    }
    if spec.offset != Complex64::new(0.0, 0.0) {
        obj.insert("offset".into(), pair(spec.offset));
    }
    let mut out = json!({
        "kind": spec.kind.name(),
        "params": params,
        "grid_n": spec.grid_n,
        "extension_mode": spec.extension_mode,
    });
    if let Some(id) = &spec.id {
        out["id"] = json!(id);
    }
    out
}
