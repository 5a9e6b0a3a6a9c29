//! Admissible parameters `(a, b)` and the scalar constants derived from them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance used when the two equivalent region tests are compared.
pub const REGION_TOLERANCE: f64 = 1e-12;

/// A validated parameter pair of the Larsson family.
///
/// `a` is the contraction ratio of one construction step and `b` the gap kept
/// free at both ends of every interval. Valid pairs satisfy `1/4 < a`,
/// `3a + 2b < 1` and `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    a: f64,
    b: f64,
}

impl Params {
    /// Validates `(a, b)` against the growth and geometric conditions.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "non-finite input a={a}, b={b}"
            )));
        }
        if a <= 0.25 {
            return Err(Error::InvalidParams(format!(
                "growth condition a > 1/4 violated (a = {a})"
            )));
        }
        let s = 3.0 * a + 2.0 * b;
        if 1.0 - s <= REGION_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "geometric condition 3a + 2b < 1 violated (3a + 2b = {s:.2})"
            )));
        }
        if b <= 0.0 {
            return Err(Error::InvalidParams(format!("b > 0 required (b = {b})")));
        }
        Ok(Self { a, b })
    }

    /// Builds a pair without the growth condition `a > 1/4`.
    ///
    /// Only the geometric constraints needed for the construction to make sense
    /// (`0 < a`, `b > 0`, `3a + 2b < 1`) are enforced. Used for control runs
    /// outside the family, where the difference set is expected to vanish.
    pub fn new_unchecked_growth(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && 3.0 * a + 2.0 * b < 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < a, 0 < b, 3a + 2b < 1 (a = {a}, b = {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Range of the uniform offsets, `(1 - 3a - 2b) / 2`.
    pub fn t(&self) -> f64 {
        (1.0 - 3.0 * self.a - 2.0 * self.b) / 2.0
    }

    /// Fixed point offset `c = 2b / (1 - a)` of the outer lines.
    pub fn c(&self) -> f64 {
        2.0 * self.b / (1.0 - self.a)
    }

    /// Shift `1/2 + a/2 - b` separating the outer offspring densities from the
    /// central one.
    pub fn side_shift(&self) -> f64 {
        0.5 + self.a / 2.0 - self.b
    }

    pub fn derive(&self) -> DerivedConstants {
        derive(self)
    }

    pub fn classify(&self) -> Result<RegionClass> {
        classify(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivedConstants {
    pub t: f64,
    pub c: f64,
    pub four_a: f64,
    /// Sum of the similarity dimensions of two independent copies,
    /// `2 log 2 / log(1/a)`.
    pub dim_sum: f64,
    /// First removal gap `v1 - u1 = 2ac - t`; negative exactly in the simple case.
    pub rho1: f64,
}

pub fn derive(p: &Params) -> DerivedConstants {
    let t = p.t();
    let c = p.c();
    DerivedConstants {
        t,
        c,
        four_a: 4.0 * p.a,
        dim_sum: 2.0 * std::f64::consts::LN_2 / (1.0 / p.a).ln(),
        rho1: 2.0 * p.a * c - t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    Invalid,
    Simple,
    General,
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionClass::Invalid => "Invalid",
            RegionClass::Simple => "Simple",
            RegionClass::General => "General",
        };
        f.write_str(s)
    }
}

/// `1 - 4a - 2b + 3a^2 - 6ab`; positive exactly in the simple region.
pub fn region_polynomial(a: f64, b: f64) -> f64 {
    1.0 - 4.0 * a - 2.0 * b + 3.0 * a * a - 6.0 * a * b
}

/// `(1 - 3a - 2b) / (4a) - c`; positive exactly in the simple region.
pub fn region_margin(a: f64, b: f64) -> f64 {
    (1.0 - 3.0 * a - 2.0 * b) / (4.0 * a) - 2.0 * b / (1.0 - a)
}

/// Classifies a parameter pair as simple or general.
///
/// Both the polynomial test and the `c` test are evaluated. They are
/// algebraically equivalent (`polynomial = 4a(1 - a) * margin`), so a sign
/// disagreement outside [`REGION_TOLERANCE`] is reported as an internal
/// inconsistency. The boundary itself is classified as general.
pub fn classify(p: &Params) -> Result<RegionClass> {
    classify_raw(p.a, p.b)
}

pub(crate) fn classify_raw(a: f64, b: f64) -> Result<RegionClass> {
    decide(a, b, region_polynomial(a, b), region_margin(a, b))
}

fn decide(a: f64, b: f64, poly: f64, margin: f64) -> Result<RegionClass> {
    let poly_simple = poly > 0.0;
    let margin_simple = margin > 0.0;
    if poly_simple != margin_simple && poly.abs().max(margin.abs()) > REGION_TOLERANCE {
        return Err(Error::InternalInconsistency(format!(
            "region tests disagree at (a={a}, b={b}): polynomial {poly:e}, c-margin {margin:e}"
        )));
    }
    Ok(if poly_simple && margin_simple {
        RegionClass::Simple
    } else {
        RegionClass::General
    })
}

/// Classifies any pair of reals, returning `Invalid` outside the family.
pub fn classify_point(a: f64, b: f64) -> Result<RegionClass> {
    match Params::new(a, b) {
        Ok(p) => classify(&p),
        Err(Error::InvalidParams(_)) => Ok(RegionClass::Invalid),
        Err(e) => Err(e),
    }
}

/// The curve `1 - 4a - 2b + 3a^2 - 6ab = 0` solved for `b`.
pub fn region_boundary_b(a: f64) -> f64 {
    (1.0 - a) * (1.0 - 3.0 * a) / (2.0 * (1.0 + 3.0 * a))
}
