//! Seeded sampling of random timelike phase points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::SpacetimeModel;
use crate::phase::PhasePoint;
use crate::{Mat4, Result, Vec3, Vec4};

/// Largest `s > 0` such that `(1, s·dir)` is null, or `None` if every multiple is timelike.
pub fn null_scale(g: &Mat4, dir: &Vec3) -> Option<f64> {
    let a: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| g[(i + 1, j + 1)] * dir[i] * dir[j]).sum();
    let b: f64 = 2.0 * (0..3).map(|i| g[(0, i + 1)] * dir[i]).sum::<f64>();
    let c = g[(0, 0)];
    if a <= 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let s = (-b + disc.sqrt()) / (2.0 * a);
    (s > 0.0).then_some(s)
}

/// A velocity along `dir` at fraction `speed` (in (0, 1)) of the null limit.
pub fn timelike_velocity(g: &Mat4, dir: &Vec3, speed: f64) -> Option<Vec3> {
    let n = dir.norm();
    if n == 0.0 {
        return Some(Vec3::zeros());
    }
    let d = dir / n;
    null_scale(g, &d).map(|s| d * (s * speed))
}

/// Seeded generator of timelike phase points from a position sampler.
pub struct PointSampler {
    rng: ChaCha8Rng,
    pub max_speed: f64,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed), max_speed: 0.9 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Random direction on the unit sphere.
    pub fn direction(&mut self) -> Vec3 {
        loop {
            let d = Vec3::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
            let n = d.norm();
            if n > 1e-3 && n <= 1.0 {
                return d / n;
            }
        }
    }

    /// A timelike phase point above `x` with random direction and speed fraction.
    pub fn point_at(&mut self, model: &SpacetimeModel, x: Vec4) -> Result<PhasePoint> {
        let g = model.metric_at(&x)?;
        loop {
            let d = self.direction();
            let s = self.uniform(0.0, self.max_speed);
            if let Some(v) = timelike_velocity(&g, &d, s) {
                if let Ok(p) = PhasePoint::new(model, x, v) {
                    return Ok(p);
                }
            }
        }
    }

    /// `n` points with positions drawn from `pos`.
    pub fn points<F>(&mut self, model: &SpacetimeModel, n: usize, mut pos: F) -> Result<Vec<PhasePoint>>
    where
        F: FnMut(&mut Self) -> Vec4,
    {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x = pos(self);
            if model.metric_at(&x).is_err() {
                continue;
            }
            out.push(self.point_at(model, x)?);
        }
        Ok(out)
    }
}
