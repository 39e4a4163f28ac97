//! Seeded random fields.
//!
//! Every coefficient draws from its own stream keyed by `(seed, k, m, comp)`, so the low modes
//! of a field agree across resolutions.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::Domain;
use crate::field::VelocityField;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream key for one coefficient.
pub fn mode_seed(seed: u64, kx: i64, ky: i64, m: usize, comp: usize) -> u64 {
    let mut h = splitmix(seed);
    for v in [kx as u64, ky as u64, m as u64, comp as u64] {
        h = splitmix(h ^ v);
    }
    h
}

/// Standard complex Gaussian for one coefficient.
pub fn mode_gaussian(seed: u64, kx: i64, ky: i64, m: usize, comp: usize) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, kx, ky, m, comp));
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Real random field inside the dealiasing mask with coefficient scale `weight(lambda(k, m))`.
pub fn spectral_random(domain: &Domain, seed: u64, weight: impl Fn(f64) -> f64) -> VelocityField {
    let mut v = VelocityField::zeros(domain);
    let (nm, plane) = (domain.nmodes(), domain.plane());
    for comp in 0..2 {
        for m in 0..nm {
            let label = domain.basis().label(m);
            for p in 0..plane {
                if !domain.in_mask(p) {
                    continue;
                }
                let (kx, ky) = domain.k_of(p);
                let canonical = ky > 0 || (ky == 0 && kx >= 0);
                let (ckx, cky) = if canonical { (kx, ky) } else { (-kx, -ky) };
                let mut g = mode_gaussian(seed, ckx, cky, label, comp);
                if kx == 0 && ky == 0 {
                    g = Complex64::new(g.re * std::f64::consts::SQRT_2, 0.0);
                } else if !canonical {
                    g = g.conj();
                }
                let i = v.idx(comp, m, p);
                v.coeffs_mut()[i] = g * weight(domain.lambda(p, m));
            }
        }
    }
    v
}

/// Smooth random field with coefficients decaying like `(1 + lambda)^(-gamma)`.
pub fn smooth_field(domain: &Domain, seed: u64, gamma: f64) -> VelocityField {
    spectral_random(domain, seed, |l| (1.0 + l).powf(-gamma))
}
