//! Deterministic sampling of complex evaluation points.
//!
//! All randomized checks draw their points from a [`Sampler`] seeded
//! explicitly, so every run with the same seed evaluates at exactly the
//! same points. Points avoid the origin: annulus points have modulus in
//! [0.5, 2], box points have both real and imaginary part in +-[0.5, 2].

use crate::expr::Assignment;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded generator of complex sample points and assignments.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    /// Sampler with a fixed seed.
    pub fn from_seed(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Complex point with modulus uniform in [0.5, 2] and uniform angle.
    pub fn annulus(&mut self) -> Complex64 {
        let modulus = self.rng.random_range(0.5..=2.0);
        let angle = self.rng.random_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(modulus, angle)
    }

    /// Complex point with real and imaginary parts each drawn from
    /// +-[0.5, 2].
    pub fn box_point(&mut self) -> Complex64 {
        Complex64::new(self.signed_band(), self.signed_band())
    }

    /// Real positive point in [0.5, 2], as a complex value.
    pub fn positive_real(&mut self) -> Complex64 {
        Complex64::new(self.rng.random_range(0.5..=2.0), 0.0)
    }

    fn signed_band(&mut self) -> f64 {
        let magnitude = self.rng.random_range(0.5..=2.0);
        if self.rng.random_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    }

    /// Assignment binding each name to a fresh annulus point.
    pub fn annulus_assignment(&mut self, names: &[&str]) -> Assignment {
        let mut at = Assignment::new();
        for name in names {
            at.set(name, self.annulus());
        }
        at
    }

    /// Assignment binding each name to a fresh box point.
    pub fn box_assignment(&mut self, names: &[&str]) -> Assignment {
        let mut at = Assignment::new();
        for name in names {
            at.set(name, self.box_point());
        }
        at
    }

    /// Assignment binding each name to a fresh positive real point.
    pub fn positive_real_assignment(&mut self, names: &[&str]) -> Assignment {
        let mut at = Assignment::new();
        for name in names {
            at.set(name, self.positive_real());
        }
        at
    }

    /// `count` annulus assignments over the same names.
    pub fn annulus_assignments(&mut self, names: &[&str], count: usize) -> Vec<Assignment> {
        (0..count).map(|_| self.annulus_assignment(names)).collect()
    }

    /// `count` box assignments over the same names.
    pub fn box_assignments(&mut self, names: &[&str], count: usize) -> Vec<Assignment> {
        (0..count).map(|_| self.box_assignment(names)).collect()
    }

    /// `count` positive real assignments over the same names.
    pub fn positive_real_assignments(
        &mut self,
        names: &[&str],
        count: usize,
    ) -> Vec<Assignment> {
        (0..count).map(|_| self.positive_real_assignment(names)).collect()
    }
}
