//! Cross-checks of the printed closed forms against the Lyapunov oracle.
//! Discrepancies are findings and are reported, never corrected.

use std::fmt;

use nalgebra::Matrix2;

use super::formulas::{
    covariance_at, find_zero_cross_z, paper_covariance_generalz, paper_covariance_z0, paper_temperature,
    paper_zero_cross_z,
};
use super::SteadyError;
use crate::algebra::{rat, rational_from_f64, Rational};
use crate::catalog::LinearModelParams;

pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AuditValue {
    Scalar(f64),
    Matrix(Matrix2<f64>),
}

impl AuditValue {
    fn max_abs_diff(&self, other: &AuditValue) -> f64 {
        match (self, other) {
            (AuditValue::Scalar(a), AuditValue::Scalar(b)) => (a - b).abs(),
            (AuditValue::Matrix(a), AuditValue::Matrix(b)) => (a - b).abs().max(),
            _ => f64::INFINITY,
        }
    }
}

/// Twelve decimals, without a sign on values that round to zero.
fn fixed12(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

impl fmt::Display for AuditValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditValue::Scalar(x) => f.write_str(&fixed12(*x)),
            AuditValue::Matrix(m) => write!(
                f,
                "[[{}, {}], [{}, {}]]",
                fixed12(m[(0, 0)]),
                fixed12(m[(0, 1)]),
                fixed12(m[(1, 0)]),
                fixed12(m[(1, 1)])
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditStatus {
    Match,
    Discrepant,
}

impl fmt::Display for AuditStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            AuditStatus::Match => "Match",
            AuditStatus::Discrepant => "Discrepant",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditVerdict {
    pub item: String,
    pub paper_value: AuditValue,
    pub oracle_value: AuditValue,
    pub difference: f64,
    pub status: AuditStatus,
    pub tolerance: f64,
}

impl AuditVerdict {
    pub fn new(item: impl Into<String>, paper_value: AuditValue, oracle_value: AuditValue, tolerance: f64) -> Self {
        let difference = paper_value.max_abs_diff(&oracle_value);
        let status = if difference <= tolerance {
            AuditStatus::Match
        } else {
            AuditStatus::Discrepant
        };
        AuditVerdict {
            item: item.into(),
            paper_value,
            oracle_value,
            difference,
            status,
            tolerance,
        }
    }
}

/// Verdicts, in fixed order, for: the boxed `z = 0` covariance; the
/// general-`z` moments at `z ∈ {0, γ/4, −γ/4, printed z*}`; the printed
/// `z*`; and the printed temperature.
pub fn audit_paper_formulas(params: &LinearModelParams) -> Result<Vec<AuditVerdict>, SteadyError> {
    params.validate().map_err(|e| SteadyError::Parameters(e.to_string()))?;
    let mut out = Vec::new();
    let at_zero = params.with_z(rat(0, 1));

    out.push(AuditVerdict::new(
        "boxed covariance at z = 0",
        AuditValue::Matrix(paper_covariance_z0(&at_zero)?),
        AuditValue::Matrix(covariance_at(params, 0.0)?),
        AUDIT_TOLERANCE,
    ));

    let paper_z = paper_zero_cross_z(params);
    let quarter = &params.gamma / rat(4, 1);
    let paper_z_exact = rational_from_f64(paper_z).expect("finite");
    let zs: [(String, Rational); 4] = [
        ("0".into(), rat(0, 1)),
        ("gamma/4".into(), quarter.clone()),
        ("-gamma/4".into(), -quarter),
        ("printed z*".into(), paper_z_exact),
    ];
    for (label, z) in zs {
        let p = params.with_z(z);
        let zf = crate::algebra::rational_to_f64(&p.z);
        out.push(AuditVerdict::new(
            format!("general-z covariance at z = {label}"),
            AuditValue::Matrix(paper_covariance_generalz(&p)?.as_matrix()),
            AuditValue::Matrix(covariance_at(params, zf)?),
            AUDIT_TOLERANCE,
        ));
    }

    let oracle = find_zero_cross_z(params)?;
    out.push(AuditVerdict::new(
        "zero-correlation z*",
        AuditValue::Scalar(paper_z),
        AuditValue::Scalar(oracle.z_star),
        AUDIT_TOLERANCE,
    ));
    out.push(AuditVerdict::new(
        "temperature k_B T at z*",
        AuditValue::Scalar(paper_temperature(params)),
        AuditValue::Scalar(oracle.kbt),
        AUDIT_TOLERANCE,
    ));
    Ok(out)
}

/// One point of the `z = 0` parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub params: LinearModelParams,
    pub difference: f64,
}

/// Compares the boxed `z = 0` covariance with the Lyapunov solution over
/// `m, ω, γ, ε, s ∈ values`, keeping only stable drift matrices.
pub fn zero_z_grid_check(values: &[Rational]) -> Result<Vec<GridPoint>, SteadyError> {
    let mut out = Vec::new();
    for m in values {
        for omega in values {
            for gamma in values {
                for epsilon in values {
                    for s in values {
                        let params = LinearModelParams::new(
                            m.clone(),
                            omega.clone(),
                            gamma.clone(),
                            epsilon.clone(),
                            s.clone(),
                            rat(0, 1),
                        );
                        if !super::is_hurwitz(&params.drift_matrix()) {
                            continue;
                        }
                        let paper = paper_covariance_z0(&params)?;
                        let oracle = covariance_at(&params, 0.0)?;
                        out.push(GridPoint {
                            difference: (paper - oracle).abs().max(),
                            params,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
