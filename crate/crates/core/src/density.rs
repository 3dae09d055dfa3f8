//! Grid-based density evolution: densities sampled on a uniform grid,
//! n-fold convolution through zero-padded FFTs, discrete CDFs, and the
//! first-passage distribution of the accumulated harvested power.

use crate::error::{domain, Error, Result};
use crate::quadrature::compensated_sum;
use crate::stats::HarvestedPowerDistribution;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

/// Default number of grid intervals `H`.
pub const DEFAULT_INTERVALS: usize = 1 << 16;
/// Default FFT length `J_FFT`.
pub const DEFAULT_FFT_SIZE: usize = 1 << 17;
/// Largest tolerated probability of circular wrap-around in a convolution.
pub const ALIAS_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of a discrete mass from one.
pub const MASS_TOLERANCE: f64 = 1e-6;
/// Largest probability mass a discretization may leave outside its grid.
pub const OVERFLOW_TOLERANCE: f64 = 1e-4;

/// Uniform grid `lower + j G`, `j = 0..=H`, with `G = (upper - lower) / H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    pub intervals: usize,
    pub fft_size: usize,
}

impl GridSpec {
    pub fn new(lower: f64, upper: f64, intervals: usize, fft_size: usize) -> Result<Self> {
        let g = Self { lower, upper, intervals, fft_size };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return domain(format!("grid needs lower < upper, got [{}, {}]", self.lower, self.upper));
        }
        if self.intervals < 2 {
            return domain("grid needs at least two intervals");
        }
        if !self.fft_size.is_power_of_two() || self.fft_size <= self.intervals + 1 {
            return domain(format!(
                "FFT size {} must be a power of two larger than {} nodes",
                self.fft_size,
                self.intervals + 1
            ));
        }
        Ok(())
    }

    /// `G`, the node spacing.
    pub fn resolution(&self) -> f64 {
        (self.upper - self.lower) / self.intervals as f64
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn node(&self, j: usize) -> f64 {
        self.lower + self.resolution() * j as f64
    }

    /// Index of the largest node not above `x`, if any.
    pub fn index_at_or_below(&self, x: f64) -> Option<usize> {
        if x < self.lower {
            return None;
        }
        let g = self.resolution();
        let mut j = ((x - self.lower) / g).floor() as usize;
        while j > 0 && self.node(j) > x {
            j -= 1;
        }
        while j < self.intervals && self.node(j + 1) <= x {
            j += 1;
        }
        Some(j.min(self.intervals))
    }

    /// Same spacing and size, shifted to start at `lower`.
    fn shifted(&self, lower: f64) -> GridSpec {
        GridSpec { lower, upper: lower + (self.upper - self.lower), ..*self }
    }
}

/// Grid for the sum of `n` IID blocks with the given single-block moments:
/// `[0, n mean + 10 sqrt(n var)]`, `H = 2^16`, `J_FFT = 2^17`.
pub fn default_grid(single_mean: f64, single_var: f64, n: usize) -> Result<GridSpec> {
    default_grid_with(single_mean, single_var, n, DEFAULT_INTERVALS)
}

/// [`default_grid`] with a custom number of intervals.
pub fn default_grid_with(single_mean: f64, single_var: f64, n: usize, intervals: usize) -> Result<GridSpec> {
    if !(single_mean > 0.0 && single_mean.is_finite()) || !(single_var >= 0.0 && single_var.is_finite()) || n == 0 {
        return domain("default grid needs a positive mean, non-negative variance and n >= 1");
    }
    let nf = n as f64;
    let upper = nf * single_mean + 10.0 * (nf * single_var).sqrt();
    let fft_size = (2 * intervals).max(DEFAULT_FFT_SIZE).next_power_of_two();
    GridSpec::new(0.0, upper, intervals, fft_size)
}

/// Density samples on a [`GridSpec`]; `sum(values) * G` is one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedDensity {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DiscretizedDensity {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.nodes() {
            return domain(format!("expected {} values, got {}", grid.nodes(), values.len()));
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return domain("density values must be finite and non-negative");
        }
        Ok(Self { grid, values })
    }

    /// Unit point mass at node `k`.
    pub fn point_mass(grid: GridSpec, k: usize) -> Result<Self> {
        grid.validate()?;
        if k > grid.intervals {
            return domain("point mass outside the grid");
        }
        let mut values = vec![0.0; grid.nodes()];
        values[k] = 1.0 / grid.resolution();
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum(values) * G`.
    pub fn mass(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.grid.resolution()
    }

    /// Per-node probabilities `values * G`.
    pub fn probabilities(&self) -> Vec<f64> {
        let g = self.grid.resolution();
        self.values.iter().map(|v| v * g).collect()
    }

    pub fn mean(&self) -> f64 {
        let g = self.grid.resolution();
        compensated_sum(self.values.iter().enumerate().map(|(j, v)| v * g * self.grid.node(j))) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let g = self.grid.resolution();
        let mu = self.mean();
        compensated_sum(self.values.iter().enumerate().map(|(j, v)| v * g * (self.grid.node(j) - mu).powi(2)))
            / self.mass()
    }

    fn normalized(mut self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::SupportOverflow("no probability mass on the grid".into()));
        }
        self.values.iter_mut().for_each(|v| *v /= m);
        Ok(self)
    }
}

/// Samples a density function at the grid nodes and renormalizes. Fails
/// when the discrete mass falls short of one by more than 1e-4.
pub fn discretize_fn(density: impl Fn(f64) -> f64, grid: GridSpec) -> Result<DiscretizedDensity> {
    grid.validate()?;
    let values: Vec<f64> = (0..grid.nodes()).map(|j| density(grid.node(j)).max(0.0)).collect();
    let d = DiscretizedDensity::new(grid, values)?;
    let missing = 1.0 - d.mass();
    if missing > OVERFLOW_TOLERANCE {
        return Err(Error::SupportOverflow(format!("mass {missing:.3e} outside the grid")));
    }
    d.normalized()
}

/// Samples the harvested-power distribution on the grid, depositing each
/// atom as `mass / G` at its nearest node, then renormalizes.
pub fn discretize(dist: &HarvestedPowerDistribution, grid: GridSpec) -> Result<DiscretizedDensity> {
    grid.validate()?;
    let g = grid.resolution();
    let mut values: Vec<f64> = (0..grid.nodes()).map(|j| dist.pdf(grid.node(j)).density).collect();
    let top = dist.harvester().max_output();
    let mut outside = (1.0 - dist.cdf(grid.upper + 0.5 * g)).max(0.0) + dist.cdf_left(grid.lower - 0.5 * g);
    for (at, mass) in [(0.0, dist.atom_at_zero()), (top, dist.atom_at_max())] {
        if mass == 0.0 {
            continue;
        }
        let k = ((at - grid.lower) / g).round();
        if k >= 0.0 && k <= grid.intervals as f64 {
            values[k as usize] += mass / g;
        } else if k < 0.0 {
            // Atoms below the grid are not included in the cdf-based tally.
            outside += mass;
        }
    }
    if outside > OVERFLOW_TOLERANCE {
        return Err(Error::SupportOverflow(format!("mass {outside:.3e} outside [{}, {}]", grid.lower, grid.upper)));
    }
    DiscretizedDensity::new(grid, values)?.normalized()
}

/// Discrete CDF `F[j] = sum_{i <= j} f[i] G`.
pub fn cdf_from_density(d: &DiscretizedDensity) -> Vec<f64> {
    let g = d.grid.resolution();
    let mut acc = 0.0;
    let mut comp = 0.0;
    d.values
        .iter()
        .map(|&v| {
            let x = v * g;
            let t = acc + x;
            comp += if acc >= x { (acc - t) + x } else { (x - t) + acc };
            acc = t;
            acc + comp
        })
        .collect()
}

fn log_mgf(probs: &[f64], s: f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for (j, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            max = max.max(p.ln() + s * j as f64);
        }
    }
    let sum: f64 = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(j, &p)| (p.ln() + s * j as f64 - max).exp())
        .sum();
    max + sum.ln()
}

/// Chernoff bound on `P(I_1 + ... + I_k >= limit)` for independent node
/// indices with the given (normalized) probability vectors.
pub fn wraparound_bound(factors: &[(&[f64], usize)], limit: usize) -> f64 {
    let objective = |ln_s: f64| {
        let s = ln_s.exp();
        factors.iter().map(|(p, n)| *n as f64 * log_mgf(p, s)).sum::<f64>() - s * limit as f64
    };
    // Golden-section search over ln s.
    let (mut a, mut b) = (-30.0f64, 8.0f64);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..120 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    fc.min(fd).min(0.0).exp()
}

fn normalized_probs(d: &DiscretizedDensity) -> Vec<f64> {
    let p = d.probabilities();
    let total: f64 = p.iter().sum();
    p.iter().map(|x| x / total).collect()
}

fn check_alias(factors: &[(&DiscretizedDensity, usize)], fft_size: usize) -> Result<()> {
    let span: usize = factors.iter().map(|(d, n)| d.grid.intervals * n).sum();
    if fft_size > span {
        return Ok(());
    }
    let probs: Vec<Vec<f64>> = factors.iter().map(|(d, _)| normalized_probs(d)).collect();
    let args: Vec<(&[f64], usize)> = probs.iter().zip(factors).map(|(p, (_, n))| (p.as_slice(), *n)).collect();
    let bound = wraparound_bound(&args, fft_size);
    if bound > ALIAS_TOLERANCE {
        return Err(Error::Aliasing(format!(
            "FFT size {fft_size} below the {} nodes needed and wrap-around mass may reach {bound:.3e}",
            span + 1
        )));
    }
    Ok(())
}

struct Transformer {
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
    len: usize,
}

impl Transformer {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len), len }
    }

    fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        buf
    }

    fn inverse_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }
}

fn complex_pow(z: Complex64, mut n: usize) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

fn finish(grid: GridSpec, probs: Vec<f64>) -> Result<DiscretizedDensity> {
    let g = grid.resolution();
    let kept = &probs[..grid.nodes()];
    let mass = compensated_sum(kept.iter().map(|p| p.max(0.0)));
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::SupportOverflow(format!(
            "convolution keeps mass {mass:.9} on the grid; widen the grid"
        )));
    }
    DiscretizedDensity::new(grid, kept.iter().map(|p| p.max(0.0) / g).collect())
}

/// Density of the sum of two independent variables on a shared grid shape.
pub fn convolve(a: &DiscretizedDensity, b: &DiscretizedDensity) -> Result<DiscretizedDensity> {
    let (ga, gb) = (a.grid, b.grid);
    if ga.intervals != gb.intervals || ga.fft_size != gb.fft_size || (ga.resolution() - gb.resolution()).abs() > 1e-12 * ga.resolution() {
        return domain("convolved densities must share grid spacing, size and FFT length");
    }
    check_alias(&[(a, 1), (b, 1)], ga.fft_size)?;
    let t = Transformer::new(ga.fft_size);
    let fa = t.forward_real(&a.probabilities());
    let fb = t.forward_real(&b.probabilities());
    let prod = fa.into_iter().zip(fb).map(|(x, y)| x * y).collect();
    finish(ga.shifted(ga.lower + gb.lower), t.inverse_real(prod))
}

/// Density of the sum of `n` IID copies, on a grid of the same shape
/// starting at `n * lower`.
pub fn convolve_n(d: &DiscretizedDensity, n: usize) -> Result<DiscretizedDensity> {
    let grid = d.grid;
    match n {
        0 => DiscretizedDensity::point_mass(grid.shifted(0.0), 0),
        1 => Ok(d.clone()),
        _ => {
            check_alias(&[(d, n)], grid.fft_size)?;
            let t = Transformer::new(grid.fft_size);
            let f = t.forward_real(&d.probabilities());
            let prod = f.into_iter().map(|z| complex_pow(z, n)).collect();
            finish(grid.shifted(grid.lower * n as f64), t.inverse_real(prod))
        }
    }
}

/// Direct `O(H^2)` convolution truncated to the grid; a reference for
/// [`convolve`].
pub fn convolve_direct(a: &DiscretizedDensity, b: &DiscretizedDensity) -> Result<DiscretizedDensity> {
    let grid = a.grid;
    let (pa, pb) = (a.probabilities(), b.probabilities());
    let mut out = vec![0.0; grid.nodes()];
    for (i, &x) in pa.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in pb.iter().enumerate().take(grid.nodes() - i) {
            out[i + j] += x * y;
        }
    }
    let g = grid.resolution();
    DiscretizedDensity::new(grid.shifted(a.grid.lower + b.grid.lower), out.into_iter().map(|p| p / g).collect())
}

/// Repeated [`convolve_direct`].
pub fn convolve_n_direct(d: &DiscretizedDensity, n: usize) -> Result<DiscretizedDensity> {
    if n == 0 {
        return DiscretizedDensity::point_mass(d.grid.shifted(0.0), 0);
    }
    let mut acc = d.clone();
    for _ in 1..n {
        acc = convolve_direct(&acc, d)?;
    }
    Ok(acc)
}

/// Distribution of the first block index `N*` at which the accumulated
/// harvested power exceeds a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstPassage {
    /// `pmf[n] = P(N* = n)`; index 0 is unused and zero.
    pub pmf: Vec<f64>,
    /// `P(N* > n_max)`, the probability not covered by `pmf`.
    pub residual: f64,
    pub threshold_index: Option<usize>,
}

impl FirstPassage {
    pub fn n_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// True when more than 1e-4 of the probability lies beyond `n_max`.
    pub fn is_truncated(&self) -> bool {
        self.residual >= OVERFLOW_TOLERANCE
    }
}

struct PassageStepper {
    transform: Option<Transformer>,
    kernel: Vec<Complex64>,
    probs: Vec<f64>,
    alive: Vec<f64>,
    keep: usize,
}

impl PassageStepper {
    fn new(single: &DiscretizedDensity, keep: usize) -> Self {
        let probs: Vec<f64> = single.probabilities()[..keep].to_vec();
        let mut alive = vec![0.0; keep];
        alive[0] = 1.0;
        let len = (2 * keep).next_power_of_two();
        let (transform, kernel) = if keep > 64 {
            let t = Transformer::new(len);
            let k = t.forward_real(&probs);
            (Some(t), k)
        } else {
            (None, Vec::new())
        };
        Self { transform, kernel, probs, alive, keep }
    }

    fn mass(&self) -> f64 {
        compensated_sum(self.alive.iter().copied())
    }

    /// Advances one block; returns the probability of crossing in it.
    fn step(&mut self) -> f64 {
        let before = self.mass();
        let next: Vec<f64> = match &self.transform {
            Some(t) => {
                let f = t.forward_real(&self.alive);
                let prod = f.into_iter().zip(&self.kernel).map(|(x, y)| x * y).collect();
                t.inverse_real(prod).into_iter().take(self.keep).map(|v| v.max(0.0)).collect()
            }
            None => {
                let mut out = vec![0.0; self.keep];
                for (i, &a) in self.alive.iter().enumerate() {
                    for (j, &p) in self.probs.iter().enumerate().take(self.keep - i) {
                        out[i + j] += a * p;
                    }
                }
                out
            }
        };
        self.alive = next;
        (before - self.mass()).clamp(0.0, 1.0)
    }
}

fn passage_setup(single: &DiscretizedDensity, theta: f64) -> Result<Option<usize>> {
    let grid = single.grid;
    if grid.lower != 0.0 {
        return domain("first-passage analysis needs a grid starting at 0");
    }
    if theta > grid.upper {
        return domain(format!("threshold {theta} beyond the grid upper limit {}", grid.upper));
    }
    Ok(grid.index_at_or_below(theta))
}

/// `P(N* = n)` for `n = 1..=n_max`, where `N*` is the first block at which
/// the accumulated harvest exceeds `theta`.
pub fn first_passage_pmf(single: &DiscretizedDensity, theta: f64, n_max: usize) -> Result<FirstPassage> {
    if n_max == 0 {
        return domain("n_max must be at least one");
    }
    run_passage(single, theta, |n, _| n >= n_max)
}

/// Like [`first_passage_pmf`] but extends `n_max` until the uncovered
/// probability drops below `tol`, up to `cap` blocks.
pub fn first_passage_adaptive(single: &DiscretizedDensity, theta: f64, tol: f64, cap: usize) -> Result<FirstPassage> {
    run_passage(single, theta, |n, residual| residual < tol || n >= cap)
}

fn run_passage(single: &DiscretizedDensity, theta: f64, done: impl Fn(usize, f64) -> bool) -> Result<FirstPassage> {
    let j = passage_setup(single, theta)?;
    let mut pmf = vec![0.0];
    let Some(j) = j else {
        pmf.push(1.0);
        return Ok(FirstPassage { pmf, residual: 0.0, threshold_index: None });
    };
    let mut stepper = PassageStepper::new(single, j + 1);
    let mut residual = 1.0;
    loop {
        let p = if residual > 0.0 { stepper.step() } else { 0.0 };
        pmf.push(p);
        residual = stepper.mass();
        if done(pmf.len() - 1, residual) {
            break;
        }
    }
    Ok(FirstPassage { pmf, residual, threshold_index: Some(j) })
}

/// `E[N*]` from a first-passage PMF, with a bound on the truncation bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargingEstimate {
    pub mean_blocks: f64,
    pub residual: f64,
    /// `n_max * residual`.
    pub bias_bound: f64,
    pub truncated: bool,
}

pub fn expected_charging_blocks(fp: &FirstPassage) -> ChargingEstimate {
    let mean_blocks = compensated_sum(fp.pmf.iter().enumerate().map(|(n, p)| n as f64 * p));
    ChargingEstimate {
        mean_blocks,
        residual: fp.residual,
        bias_bound: fp.n_max() as f64 * fp.residual,
        truncated: fp.is_truncated(),
    }
}

/// Expected charging time in seconds for coherence time `coherence_s`.
pub fn expected_charging_time(fp: &FirstPassage, coherence_s: f64) -> f64 {
    expected_charging_blocks(fp).mean_blocks * coherence_s
}

/// Storage capacitor and packet parameters defining the charging threshold.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ChargingSpec {
    pub capacitance_uf: f64,
    pub voltage_v: f64,
    pub packet_duration_ms: f64,
    pub coherence_time_ms: f64,
}

impl Default for ChargingSpec {
    fn default() -> Self {
        Self { capacitance_uf: 10.0, voltage_v: 1.8, packet_duration_ms: 50.0, coherence_time_ms: 50.0 }
    }
}

impl ChargingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.capacitance_uf > 0.0 && self.voltage_v > 0.0 && self.packet_duration_ms > 0.0 && self.coherence_time_ms > 0.0) {
            return domain("capacitance, voltage, packet duration and coherence time must be positive");
        }
        Ok(())
    }

    /// `C V^2 / (2 T_p)` in mW (uF * V^2 / ms = mW).
    pub fn threshold_mw(&self) -> f64 {
        self.capacitance_uf * self.voltage_v * self.voltage_v / (2.0 * self.packet_duration_ms)
    }
}

/// Result of [`charging_analysis`].
#[derive(Debug, Clone)]
pub struct ChargingResult {
    pub threshold_mw: f64,
    pub grid: GridSpec,
    pub passage: FirstPassage,
    pub estimate: ChargingEstimate,
    pub expected_time_s: f64,
}

/// Expected number of blocks to charge the capacitor, by density evolution
/// on a single-block grid extended to cover the threshold.
pub fn charging_analysis(
    dist: &HarvestedPowerDistribution,
    spec: &ChargingSpec,
    intervals: usize,
    tol: f64,
    cap: usize,
) -> Result<ChargingResult> {
    spec.validate()?;
    let theta = spec.threshold_mw();
    let mean = dist.mean();
    let base = default_grid_with(mean, dist.variance(), 1, intervals)?;
    let grid = GridSpec { upper: base.upper.max(1.01 * theta), ..base };
    let single = discretize(dist, grid)?;
    let passage = first_passage_adaptive(&single, theta, tol, cap)?;
    let estimate = expected_charging_blocks(&passage);
    Ok(ChargingResult {
        threshold_mw: theta,
        grid,
        expected_time_s: estimate.mean_blocks * spec.coherence_time_ms / 1000.0,
        passage,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_discretization() {
        let grid = GridSpec::new(0.0, 2.0, 2000, 4096).unwrap();
        let d = discretize_fn(|x| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 }, grid).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-9);
        assert!(d.values()[..1000].iter().all(|&v| (v - 1.0).abs() < 1e-9));
        assert!(d.values()[1000..].iter().all(|&v| v == 0.0));
        let f = cdf_from_density(&d);
        assert!((f[499] - 0.5).abs() < 1e-9 && (f[2000] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overflow_detected() {
        let grid = GridSpec::new(0.0, 1.0, 100, 256).unwrap();
        assert!(matches!(discretize_fn(|_| 0.5, grid), Err(Error::SupportOverflow(_))));
    }

    #[test]
    fn identity_and_point_masses() {
        let grid = GridSpec::new(0.0, 10.0, 100, 256).unwrap();
        let d = DiscretizedDensity::point_mass(grid, 3).unwrap();
        assert_eq!(convolve_n(&d, 1).unwrap(), d);
        let f = cdf_from_density(&d);
        assert!(f[..3].iter().all(|&x| x == 0.0) && f[3..].iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn aliasing_rejected() {
        let grid = GridSpec::new(0.0, 1.0, 100, 128).unwrap();
        let d = discretize_fn(|x| if x >= 0.8 { 5.0 } else { 0.0 }, grid).unwrap();
        assert!(matches!(convolve_n(&d, 3), Err(Error::Aliasing(_))));
    }

    #[test]
    fn default_grid_values() {
        let g = default_grid(1.0, 1.0, 1).unwrap();
        assert_eq!((g.upper, g.intervals, g.fft_size), (11.0, 1 << 16, 1 << 17));
        assert_eq!(default_grid(1.0, 0.0, 4).unwrap().upper, 4.0);
    }

    #[test]
    fn threshold_units() {
        assert!((ChargingSpec::default().threshold_mw() - 0.324).abs() < 1e-15);
    }

    #[test]
    fn deterministic_accumulation() {
        let grid = GridSpec::new(0.0, 10.0, 1000, 2048).unwrap();
        let d = DiscretizedDensity::point_mass(grid, 100).unwrap();
        let fp = first_passage_pmf(&d, 2.5, 6).unwrap();
        assert!((fp.pmf[3] - 1.0).abs() < 1e-12);
        assert!((expected_charging_blocks(&fp).mean_blocks - 3.0).abs() < 1e-10);
        let fp = first_passage_pmf(&d, 0.0 - 1e-9, 3).unwrap();
        assert_eq!(fp.pmf[1], 1.0);
    }
}
