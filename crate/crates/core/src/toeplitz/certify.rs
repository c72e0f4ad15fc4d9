use serde::Serialize;

use super::diagnostics::{proof_diagnostics, ProofDiagnostics};
use super::{
    isometry_defect, phi_blocks_from_colligation, toeplitz_truncate, DefectAtOrder, Result, ToeplitzTruncation,
};
use crate::colligation::{Colligation, StructureReport};
use crate::function::{boundary_modulus_test, Point2, PointGrid};

/// Resolution of the torus grid used to refute innerness.
pub const CERTIFY_GRID: usize = 64;
/// Truncation orders at which the windowed isometry defect is reported.
pub const DEFECT_ORDERS: [usize; 3] = [8, 16, 24];
const DEFECT_WINDOW: usize = 4;
const HEADLINE_ORDER: usize = 16;
const HEADLINE_WINDOW: usize = 8;
const DIAGNOSTIC_LAGS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerVerdict {
    /// Isometric, structured, both diagonal blocks strictly stable.
    Certified,
    /// `|tau_V|` visibly departs from 1 on the torus.
    Refuted,
    /// Structural hypotheses fail and sampling does not refute.
    InconclusiveByStructure,
}

impl InnerVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            InnerVerdict::Certified => "certified",
            InnerVerdict::Refuted => "refuted",
            InnerVerdict::InconclusiveByStructure => "inconclusive-by-structure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyEvidence {
    pub structure: StructureReport,
    pub radii: [f64; 2],
    pub boundary_deviation: Option<f64>,
    pub boundary_argmax: Option<Point2>,
    /// Set when the transfer function could not be evaluated on the grid.
    pub boundary_error: Option<String>,
    /// Defect at `M = 16`, window 8.
    pub isometry_defect: f64,
    pub isometry_defect_by_m: Vec<DefectAtOrder>,
    /// Only for structured colligations.
    pub diagnostics: Option<ProofDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub verdict: InnerVerdict,
    /// Boundary sampling passed at `10 * tol`.
    pub inner_by_sampling: bool,
    pub summary: String,
    pub evidence: CertifyEvidence,
}

fn truncation(v: &Colligation, m: usize, structured: bool, tol: f64) -> Result<ToeplitzTruncation> {
    if structured {
        phi_blocks_from_colligation(v, m, tol)
    } else {
        toeplitz_truncate(&v.taylor_2d(m - 1, m - 1)?, m)
    }
}

/// Three-valued innerness decision for a two-variable colligation.
///
/// `Certified` is sound: it is only returned when the structural
/// hypotheses hold. Otherwise the transfer function is sampled on a
/// `64 x 64` torus grid and `Refuted` is returned when the modulus deviates
/// from 1 by more than `10 * tol`.
pub fn certify_inner(v: &Colligation, tol: f64) -> Result<CertifyReport> {
    let structure = v.structure_report(tol)?;
    let structured = structure.lower_left_zero;
    let hypotheses = structure.is_isometry && structured && structure.c0dot[0] && structure.c0dot[1];

    let (boundary_deviation, boundary_argmax, boundary_error) =
        match boundary_modulus_test(v, &PointGrid::torus2(CERTIFY_GRID), 10.0 * tol) {
            Ok(r) => (Some(r.max_deviation), Some(r.argmax), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
    let inner_by_sampling = boundary_deviation.is_some_and(|d| d <= 10.0 * tol);

    let mut isometry_defect_by_m = Vec::with_capacity(DEFECT_ORDERS.len());
    for m in DEFECT_ORDERS {
        let defect = isometry_defect(&truncation(v, m, structured, tol)?, DEFECT_WINDOW)?;
        isometry_defect_by_m.push(DefectAtOrder { order: m, window: DEFECT_WINDOW, defect });
    }
    let headline = isometry_defect(&truncation(v, HEADLINE_ORDER, structured, tol)?, HEADLINE_WINDOW)?;
    let diagnostics = if structured { Some(proof_diagnostics(v, DIAGNOSTIC_LAGS, tol)?) } else { None };

    let verdict = if hypotheses {
        InnerVerdict::Certified
    } else if boundary_deviation.is_some() && !inner_by_sampling {
        InnerVerdict::Refuted
    } else {
        InnerVerdict::InconclusiveByStructure
    };
    let summary = match (verdict, inner_by_sampling) {
        (InnerVerdict::Certified, _) => "inner by certificate".to_string(),
        (InnerVerdict::Refuted, _) => "not inner: boundary modulus deviates from 1".to_string(),
        (_, true) => "inner by sampling, not by certificate".to_string(),
        (_, false) => "undecided: structural hypotheses fail and boundary sampling was not possible".to_string(),
    };
    let radii = structure.c0dot_blocks;
    Ok(CertifyReport {
        verdict,
        inner_by_sampling,
        summary,
        evidence: CertifyEvidence {
            structure,
            radii,
            boundary_deviation,
            boundary_argmax,
            boundary_error,
            isometry_defect: headline,
            isometry_defect_by_m,
            diagnostics,
        },
    })
}
