//! The concrete gauge ν, the hermitian gauge h, the order-unit gauge ν_e and
//! the gauge-induced norm, plus [`ConcreteGauge`] wiring them into the law
//! checkers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::laws::GaugeFamily;
use crate::linalg::{self, ComplexMatrix, C64};
use crate::maxgauge;
use crate::space::{sample_element_with, LevelElement, OperatorSpace, SampleMode};

fn eig_of_real_part(z: &LevelElement) -> linalg::HermitianEig {
    linalg::hermitian_eig(&z.real_part()).expect("real part is Hermitian by construction")
}

/// `ν(z) = ‖(Re z)₊‖ = max(λ_max(Re z), 0)`.
pub fn gauge_nu(z: &LevelElement) -> f64 {
    eig_of_real_part(z).max().max(0.0)
}

/// `h(z) = ‖Re z‖`.
pub fn gauge_h(z: &LevelElement) -> f64 {
    let eig = eig_of_real_part(z);
    eig.max().abs().max(eig.min().abs())
}

/// `ν_{2n}([[0, 2z], [0, 0]])`, which is the operator norm of `z`.
pub fn gauge_norm(z: &LevelElement) -> f64 {
    gauge_nu(&z.corner(C64::new(2.0, 0.0)))
}

/// `max(λ_max(E^{-1/2} Re(z) E^{-1/2}), 0)` with `E = e ⊗ I_n`; `e` is the
/// designated unit, or the ambient identity when none is designated.
pub fn gauge_nu_e(space: &OperatorSpace, z: &LevelElement) -> Result<f64> {
    let d = space.ambient_dim();
    if z.ambient_dim() != d || z.space_dim() != space.dim() {
        return Err(Error::SpaceMismatch(format!(
            "element of a {}-dimensional space in M_{}, space is {}-dimensional in M_{d}",
            z.space_dim(),
            z.ambient_dim(),
            space.dim()
        )));
    }
    let re = z.real_part();
    let Some(e) = space.designated_unit() else {
        return Ok(linalg::lambda_max(&re)?.max(0.0));
    };
    let root = linalg::inverse_sqrt(e, 0.0)?;
    let k = ComplexMatrix::identity(z.level()).kron(&root);
    let scaled = &(&k * &re) * &k;
    Ok(linalg::lambda_max(&scaled)?.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeKind {
    Nu,
    H,
    NuE,
    NuMax,
}

impl GaugeKind {
    pub const ALL: [GaugeKind; 4] = [GaugeKind::Nu, GaugeKind::H, GaugeKind::NuE, GaugeKind::NuMax];

    pub fn name(self) -> &'static str {
        match self {
            GaugeKind::Nu => "nu",
            GaugeKind::H => "h",
            GaugeKind::NuE => "nu-e",
            GaugeKind::NuMax => "nu-max",
        }
    }
}

impl fmt::Display for GaugeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GaugeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown gauge `{s}` (expected nu, h, nu-e or nu-max)")))
    }
}

/// One of the four gauges bound to a space.
#[derive(Clone, Debug)]
pub struct ConcreteGauge<'a> {
    pub space: &'a OperatorSpace,
    pub kind: GaugeKind,
    pub cfg: SolverConfig,
}

impl<'a> ConcreteGauge<'a> {
    pub fn new(space: &'a OperatorSpace, kind: GaugeKind, cfg: SolverConfig) -> Self {
        Self { space, kind, cfg }
    }

    pub fn eval(&self, z: &LevelElement) -> Result<f64> {
        match self.kind {
            GaugeKind::Nu => Ok(gauge_nu(z)),
            GaugeKind::H => Ok(gauge_h(z)),
            GaugeKind::NuE => gauge_nu_e(self.space, z),
            GaugeKind::NuMax => Ok(maxgauge::nu_max(self.space, z, &self.cfg)?.value),
        }
    }
}

/// Mix of generic samples and ± accretive samples, so that cone boundaries
/// are exercised too.
pub(crate) fn mixed_sample(space: &OperatorSpace, level: usize, rng: &mut ChaCha8Rng) -> Result<LevelElement> {
    let roll: f64 = rng.random();
    let mode = if roll < 0.6 { SampleMode::Generic } else { SampleMode::Accretive };
    let z = match sample_element_with(space, level, rng, mode) {
        Ok(z) => z,
        Err(Error::SamplingExhausted { .. }) => sample_element_with(space, level, rng, SampleMode::Generic)?,
        Err(e) => return Err(e),
    };
    Ok(if roll >= 0.8 { z.neg() } else { z })
}

impl GaugeFamily for ConcreteGauge<'_> {
    type Elem = LevelElement;

    fn name(&self) -> String {
        self.kind.name().to_string()
    }

    fn gauge(&self, z: &LevelElement) -> Result<f64> {
        self.eval(z)
    }

    fn sample(&self, level: usize, rng: &mut ChaCha8Rng) -> Result<LevelElement> {
        mixed_sample(self.space, level, rng)
    }

    fn add(&self, a: &LevelElement, b: &LevelElement) -> Result<LevelElement> {
        a.add(b)
    }

    fn scale(&self, a: &LevelElement, c: C64) -> LevelElement {
        a.scale(c)
    }

    fn compress(&self, a: &LevelElement, y: &ComplexMatrix, x: &ComplexMatrix) -> Result<LevelElement> {
        a.compress(y, x)
    }

    fn direct_sum(&self, a: &LevelElement, b: &LevelElement) -> Result<LevelElement> {
        a.direct_sum(b)
    }

    fn norm(&self, a: &LevelElement) -> f64 {
        linalg::spectral_norm(a.realized())
    }

    fn level(&self, a: &LevelElement) -> usize {
        a.level()
    }

    fn is_seminorm(&self) -> bool {
        self.kind == GaugeKind::H
    }

    fn level_cap(&self) -> usize {
        self.cfg.level_cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE, ZERO};
    use crate::space::{build_space, sample_element};

    fn degenerate_line() -> OperatorSpace {
        OperatorSpace::real_diagonal(&[&[-2.0, 0.0, 1.0]], None).unwrap()
    }

    #[test]
    fn nu_h_norm_on_the_degenerate_diagonal_example() {
        let s = degenerate_line();
        let x = s.element(1, vec![ONE]).unwrap();
        assert_eq!(gauge_nu(&x), 1.0);
        assert_eq!(gauge_h(&x), 2.0);
        assert!((gauge_norm(&x) - 2.0).abs() < 1e-12);
        assert_eq!(gauge_nu_e(&s, &x).unwrap(), 1.0);
        assert_eq!(gauge_h(&x.scale(I)), 0.0);
    }

    #[test]
    fn nu_simple_cases() {
        let e12 = ComplexMatrix::unit(2, 2, 0, 1);
        let s = build_space(vec![ComplexMatrix::identity(2), e12], None).unwrap();
        let minus_id = s.element(1, vec![-ONE, ZERO]).unwrap();
        assert_eq!(gauge_nu(&minus_id), 0.0);
        let nil = s.element(1, vec![ZERO, C64::new(2.0, 0.0)]).unwrap();
        assert!((gauge_nu(&nil) - 1.0).abs() < 1e-12);
        let id = s.element(1, vec![ONE, ZERO]).unwrap();
        assert!((gauge_norm(&id) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nu_e_with_designated_unit() {
        let s = OperatorSpace::real_diagonal(
            &[&[-2.0, 0.0, 1.0], &[1.0, 1.0, 1.0]],
            Some(vec![ZERO, ONE]),
        )
        .unwrap();
        let x = s.element(1, vec![ONE, ZERO]).unwrap();
        assert_eq!(gauge_nu_e(&s, &x).unwrap(), 1.0);
        let e = s.element(1, vec![ZERO, ONE]).unwrap();
        assert!((gauge_nu_e(&s, &e).unwrap() - 1.0).abs() < 1e-12);
        // A non-identity unit rescales the real part.
        let s2 = OperatorSpace::real_diagonal(&[&[2.0, 4.0], &[1.0, 0.0]], Some(vec![ONE, ZERO])).unwrap();
        let z = s2.element(1, vec![ZERO, ONE]).unwrap();
        assert!((gauge_nu_e(&s2, &z).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nu_e_rejects_foreign_elements() {
        let s = degenerate_line();
        let other = OperatorSpace::real_diagonal(&[&[1.0, 0.0]], None).unwrap();
        let z = other.element(1, vec![ONE]).unwrap();
        assert!(matches!(gauge_nu_e(&s, &z), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn h_is_max_of_nu_pm_and_norm_is_spectral() {
        for (j, s) in crate::space::standard_spaces(3).iter().enumerate() {
            for seed in 0..20u64 {
                let z = sample_element(s, 1 + (seed as usize % 3), seed * 7 + j as u64, SampleMode::Generic).unwrap();
                let h = gauge_h(&z);
                assert!((h - gauge_nu(&z).max(gauge_nu(&z.neg()))).abs() <= 1e-10 * (1.0 + h));
                let n = linalg::spectral_norm(z.realized());
                assert!((gauge_norm(&z) - n).abs() <= 1e-9 * (1.0 + n));
            }
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in GaugeKind::ALL {
            assert_eq!(k.name().parse::<GaugeKind>().unwrap(), k);
        }
        assert!("mu".parse::<GaugeKind>().is_err());
    }
}
