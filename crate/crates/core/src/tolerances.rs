use serde::{Deserialize, Serialize};

/// Numerical thresholds shared across the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative deviation allowed in the tantrix norm.
    pub tantrix_tol: f64,
    /// Closure tolerance as a fraction of curve length.
    pub closure_rel: f64,
    /// Below this value of |r' x r''| torsion is flagged undefined.
    pub kappa_floor: f64,
    /// Longest straight run tolerated when torsion is requested strictly.
    pub straight_run_max: usize,
    /// Parallel-transport residual (rad per unit time).
    pub pt_tol: f64,
    /// Angular tolerance for cyclicity checks (rad).
    pub angle_tol: f64,
    /// Allowed deviation of a half-sequence rotation from pi (rad).
    pub area_tol: f64,
    /// Allowed polar angle at the final sample of a DoG path (rad).
    pub pole_return_tol: f64,
    /// Allowed off-diagonal magnitude of a z-basis DoG gate.
    pub offdiag_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tantrix_tol: 1e-6,
            closure_rel: 1e-4,
            kappa_floor: 1e-9,
            straight_run_max: 2000,
            pt_tol: 1e-6,
            angle_tol: 1e-6,
            area_tol: 1e-3,
            pole_return_tol: 1e-4,
            offdiag_tol: 1e-3,
        }
    }
}

impl Tolerances {
    /// Absolute closure tolerance for a curve of the given length.
    pub fn closure_tol(&self, length: f64) -> f64 {
        self.closure_rel * length
    }
}
