//! Calibrated relative-norm noise on measurement sets.
//!
//! For each wavenumber node `k_j` and sign `σ` the `L×3` block
//! `F = (E^∞(σx̂_l, k_j))_l` is replaced by
//! `F + δ‖F‖ (R₁ + iR₂)/‖R₁ + iR₂‖` with Frobenius norms and standard normal
//! `R₁, R₂`. Each block draws from its own ChaCha8 stream selected by
//! `2j + σ`, seeded by [`NoiseSpec::seed`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::forward::{MeasurementSet, Sign};
use crate::geometry::CVec3;
use crate::par::{map_range, Execution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(invalid(format!("noise level must be finite and >= 0, got {delta}")));
        }
        Ok(NoiseSpec { delta, seed })
    }
}

pub fn add_noise(ms: &MeasurementSet, spec: &NoiseSpec) -> Result<MeasurementSet> {
    add_noise_with(ms, spec, Execution::default())
}

pub fn add_noise_with(ms: &MeasurementSet, spec: &NoiseSpec, exec: Execution) -> Result<MeasurementSet> {
    let spec = NoiseSpec::new(spec.delta, spec.seed)?;
    let mut out = ms.clone();
    if spec.delta == 0.0 {
        return Ok(out);
    }
    let n = ms.grid().count();
    let lcount = ms.directions().len();

    // Perturbations per (j, σ) block, each a column over l.
    let perturbations = map_range(2 * n, exec, |b| {
        let (j, sign) = (b / 2, Sign::BOTH[b % 2]);
        let block: Vec<CVec3> = (0..lcount).map(|l| ms.sample(l, sign, j)).collect();
        block_perturbation(&block, spec.delta, spec.seed, b as u64)
    });

    let samples = out.samples_mut();
    for (b, pert) in perturbations.into_iter().enumerate() {
        let (j, sign) = (b / 2, Sign::BOTH[b % 2]);
        for (l, p) in pert.into_iter().enumerate() {
            let idx = (l * 2 + sign.index()) * n + j;
            samples[idx] += p;
        }
    }
    Ok(out)
}

fn block_perturbation(block: &[CVec3], delta: f64, seed: u64, stream: u64) -> Vec<CVec3> {
    let f_norm = block.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if f_norm == 0.0 {
        return vec![CVec3::ZERO; block.len()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect() };
    let re = draw(3 * block.len());
    let im = draw(3 * block.len());
    let r_norm = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    let scale = delta * f_norm / r_norm;
    (0..block.len())
        .map(|l| {
            CVec3(std::array::from_fn(|c| {
                Complex64::new(re[3 * l + c], im[3 * l + c]) * scale
            }))
        })
        .collect()
}

/// `‖F^δ − F‖ / ‖F‖` for block `(j, σ)`; `None` when `‖F‖ = 0`.
pub fn block_relative_error(clean: &MeasurementSet, noisy: &MeasurementSet, j: usize, sign: Sign) -> Option<f64> {
    let l = clean.directions().len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..l {
        let a = clean.sample(i, sign, j);
        let b = noisy.sample(i, sign, j);
        num += (b - a).norm_sqr();
        den += a.norm_sqr();
    }
    (den > 0.0).then(|| (num / den).sqrt())
}
