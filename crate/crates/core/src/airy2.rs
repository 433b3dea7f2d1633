//! The Airy₂ process: Tracy–Widom GUE marginal, extended-kernel joint law,
//! and the grouped path-integral form.

use alloc::vec::Vec;

use crate::engine::{ExtendedProblem, Flavor, PathProblem};
use crate::error::{Error, Result};
use crate::fredholm::{fredholm_det, DetResult};
use crate::quadrature::GridParams;

/// Same shape and rules as [`crate::airy1::FddQuery`].
pub type Airy2Query = crate::airy1::FddQuery;

/// Largest query length accepted by [`fdd_grouped_airy2`].
pub const GROUPED_MAX_POINTS: usize = 3;

/// `F_GUE(x) = det(I − P_x K_Ai P_x)`.
pub fn marginal_cdf_gue(x: f64, params: &GridParams) -> Result<DetResult> {
    if !x.is_finite() {
        return Err(Error::Domain("marginal level must be finite".into()));
    }
    let p = PathProblem {
        flavor: Flavor::Airy2,
        g0: x,
        steps: Vec::new(),
        conj_factor: 0.0,
    };
    fredholm_det(&p, params)
}

/// Joint CDF from the extended Airy kernel.
pub fn fdd_extended_airy2(q: &Airy2Query, params: &GridParams) -> Result<DetResult> {
    q.validate()?;
    fredholm_det(&ExtendedProblem::new(Flavor::Airy2, &q.times, &q.levels)?, params)
}

/// Joint CDF from the grouped path-integral formula
/// `det(I − K_Ai + P̄ e^{(t₁−t₂)H} P̄ ⋯ P̄ e^{(tₙ−t₁)H} K_Ai)`.
pub fn fdd_grouped_airy2(q: &Airy2Query, params: &GridParams) -> Result<DetResult> {
    q.validate()?;
    if q.len() > GROUPED_MAX_POINTS {
        return Err(Error::CostGuard(alloc::format!(
            "grouped Airy2 formula limited to {} points, got {}",
            GROUPED_MAX_POINTS,
            q.len()
        )));
    }
    let mut p = PathProblem::projections(Flavor::Airy2, &q.times, &q.levels)?;
    p.conj_factor = 0.0;
    fredholm_det(&p, params)
}
