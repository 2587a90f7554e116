use super::{Eigenvalue, ProblemTag, SearchRegion};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Result of [`find_eigenvalues`](super::find_eigenvalues).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub tag: ProblemTag,
    /// The region actually searched (after any dilation).
    pub region: SearchRegion,
    /// Ordered by real part, then imaginary part.
    pub eigenvalues: Vec<Eigenvalue>,
    pub winding_total: i64,
    pub refined_total: i64,
    /// Boxes that could not be resolved.
    pub unresolved: Vec<SearchRegion>,
}

pub const CSV_COLUMNS: &str = "tag,re_mu,im_mu,algebraic_order,geometric_multiplicity,char_residual,monodromy_residual,is_lowest";

impl SpectrumReport {
    /// Every zero counted on the outer contour was refined.
    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty() && self.winding_total == self.refined_total
    }

    pub fn has_near_double(&self) -> bool {
        self.eigenvalues.iter().any(|e| e.near_double)
    }

    pub fn mus(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.mu).collect()
    }

    /// CSV rows with the header row; empty cells for fields that do not
    /// apply to the tag.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for e in &self.eigenvalues {
            let gm = e.geometric_multiplicity.map(|g| g.to_string()).unwrap_or_default();
            let mr = e.monodromy_residual.map(|m| format!("{m:.6e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:.15e},{:.15e},{},{},{:.6e},{},{}",
                e.tag, e.mu.re, e.mu.im, e.algebraic_order, gm, e.char_residual, mr, e.is_lowest
            );
        }
        out
    }
}
