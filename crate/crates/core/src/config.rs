use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and caps shared by the solvers and checkers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub bisect_tol: f64,
    pub feas_tol: f64,
    pub dykstra_max_iter: usize,
    pub dykstra_residual_tol: f64,
    pub strict_pos_tol: f64,
    pub seed: u64,
    pub level_cap: usize,
    /// Bisection tolerance of the unitization gauge.
    pub unitization_bisect_tol: f64,
    /// Feasibility slack of the unitization gauge.
    pub unitization_feas_tol: f64,
    /// Bracket the maximal gauge with a barrier method before bisecting;
    /// when off, bisection relies on Dykstra probes alone.
    pub interior_point: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            bisect_tol: 1e-6,
            feas_tol: 1e-7,
            dykstra_max_iter: 5000,
            dykstra_residual_tol: 1e-9,
            strict_pos_tol: 1e-10,
            seed: 0,
            level_cap: 3,
            unitization_bisect_tol: 1e-7,
            unitization_feas_tol: 1e-9,
            interior_point: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("bisect_tol", self.bisect_tol),
            ("feas_tol", self.feas_tol),
            ("dykstra_residual_tol", self.dykstra_residual_tol),
            ("strict_pos_tol", self.strict_pos_tol),
            ("unitization_bisect_tol", self.unitization_bisect_tol),
            ("unitization_feas_tol", self.unitization_feas_tol),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.dykstra_max_iter == 0 {
            return Err(Error::InvalidArgument("dykstra_max_iter must be at least 1".into()));
        }
        if self.level_cap == 0 {
            return Err(Error::InvalidArgument("level_cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses a JSON override; absent fields keep their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_override() {
        let cfg = SolverConfig::from_json(r#"{"bisect_tol": 1e-4, "seed": 9}"#).unwrap();
        assert_eq!(cfg.bisect_tol, 1e-4);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.feas_tol, 1e-7);
    }

    #[test]
    fn rejects_bad_fields() {
        let err = SolverConfig::from_json(r#"{"bisect_tol": "x"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "bisect_tol"));
        assert!(SolverConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"feas_tol": 0}"#).is_err());
        assert!(SolverConfig::from_json(r#"{"level_cap": 0}"#).is_err());
    }
}
