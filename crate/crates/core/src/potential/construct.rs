use super::{ExtensionMode, Polynomial, PotentialSpec, Span};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A constructed potential together with any input fixes that were applied.
#[derive(Clone, Debug)]
pub struct Construction {
    pub potential: PotentialSpec,
    pub warnings: Vec<String>,
}

fn odd_part(q2: &Polynomial, center2: f64, warnings: &mut Vec<String>) -> Polynomial {
    let reflected = q2.reflect(center2);
    let even = q2.add(&reflected);
    let scale = q2.max_coeff().max(1.0);
    if even.max_coeff() <= 1e-12 * scale {
        return q2.clone();
    }
    warnings.push(format!(
        "q2 = {q2} is not antisymmetric about {}; replaced by its odd part",
        center2 / 2.0
    ));
    q2.add(&reflected.scale(Complex64::new(-1.0, 0.0)))
        .scale(Complex64::new(0.5, 0.0))
}

/// Builds `q = (∫_{1/2}^{x} q2)^2 + q2` on `[0, 1/2]`, extended to `[1/2, 1]`
/// by `mode`, so that the half-interval condition holds by construction.
///
/// `q2` should satisfy `q2(1/2 - x) = -q2(x)`; otherwise its odd part is used
/// and a warning is recorded.
pub fn construct_from_q2(
    q2: &Polynomial,
    mode: ExtensionMode,
    tail: Option<Vec<Complex64>>,
) -> Result<Construction> {
    if mode == ExtensionMode::ExplicitTail && tail.is_none() {
        return Err(Error::validation(
            "tail",
            "extension_mode explicit_tail requires tail samples on [1/2, 1]",
        ));
    }
    let mut warnings = Vec::new();
    let q2 = odd_part(q2, 0.5, &mut warnings);
    let mut potential = PotentialSpec::b_family(q2, Span::Half).with_extension(mode);
    if let Some(t) = tail {
        potential = potential.with_tail(t);
    }
    potential.validate()?;
    Ok(Construction {
        potential,
        warnings,
    })
}

/// Unit-interval analog: `q = (∫_{1}^{x} q2)^2 + q2` on `[0, 1]` with
/// `q2(1 - x) = -q2(x)`.
pub fn construct_from_q2_unit(q2: &Polynomial) -> Result<Construction> {
    let mut warnings = Vec::new();
    let q2 = odd_part(q2, 1.0, &mut warnings);
    let potential = PotentialSpec::b_family(q2, Span::Unit);
    potential.validate()?;
    Ok(Construction {
        potential,
        warnings,
    })
}
