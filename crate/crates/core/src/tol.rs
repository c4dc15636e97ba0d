//! Centralized numeric tolerances.
//!
//! Every tolerance used by the library lives here, either as a field of
//! [`Tolerances`] or as a named constant, so that no module carries its
//! own ad-hoc thresholds.

/// Default comparison tolerances for derived floating-point quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance.
    pub abs: f64,
    /// Relative tolerance (scaled by the larger magnitude).
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-10,
            rel: 1e-8,
        }
    }
}

impl Tolerances {
    /// True when `a` and `b` agree within `abs + rel * max(|a|, |b|)`.
    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

/// Below this side length (in the unit-curvature model) angle formulas
/// switch to half-angle formulations to avoid cancellation.
pub const SMALL_SIDE_THRESHOLD: f64 = 1e-4;

/// Relative tolerance for matching lengths of glued edges.
pub const EDGE_MATCH_REL: f64 = 1e-9;

/// Slack added to `2 * pi` in the vertex-angle upper-bound check.
pub const ALEXANDROV_SLACK: f64 = 1e-9;

/// A vertex counts as conical when its singular curvature exceeds this.
pub const CONICAL_EPS: f64 = 1e-9;

/// Acceptable magnitude for the discrete Gauss-Bonnet residual on
/// exactly constructed inputs.
pub const GAUSS_BONNET_TOL: f64 = 1e-8;
