//! Closed-form statistics of the harvested power `p(P_R)` under Nakagami
//! fading: the mixed distribution of the piecewise-linear model, outage
//! probability, and expected harvested power for every model.

use crate::channel::{FadingChannel, LinkBudget, ReceivedPower};
use crate::error::{domain, Result};
use crate::harvester::{ConstantLinear, ConstantLinearConstant, Harvester, PiecewiseLinear};
use crate::quadrature::{compensated_sum, integrate, QuadOptions};
use crate::special::reg_upper_diff_unchecked;

/// Value of the mixed density at a point: the continuous part and any
/// point mass located exactly there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfValue {
    pub density: f64,
    pub atom: f64,
}

/// Distribution of `p~(P_R)` for a piecewise-linear harvester: an atom at 0
/// (input below sensitivity), an atom at `v_M` (saturation), and a density on
/// each segment image `(v_{m-1}, v_m]`.
#[derive(Debug, Clone)]
pub struct HarvestedPowerDistribution {
    h: PiecewiseLinear,
    rp: ReceivedPower,
    xi: Vec<f64>,
    top_atom: f64,
}

impl HarvestedPowerDistribution {
    pub fn new(h: &PiecewiseLinear, rp: ReceivedPower) -> Self {
        let xi = h.supports().iter().map(|&b| rp.cdf(b)).collect();
        let top_atom = rp.sf(h.saturation_mw());
        Self { h: h.clone(), rp, xi, top_atom }
    }

    pub fn harvester(&self) -> &PiecewiseLinear {
        &self.h
    }

    pub fn received_power(&self) -> &ReceivedPower {
        &self.rp
    }

    /// `xi_m = F_{P_R}(b_m)` for `m = 0..=M`.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Probability of zero harvested power.
    pub fn atom_at_zero(&self) -> f64 {
        self.xi[0]
    }

    /// Probability of harvesting exactly the plateau `v_M`.
    pub fn atom_at_max(&self) -> f64 {
        self.top_atom
    }

    /// Probability carried by the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        compensated_sum(self.xi.windows(2).map(|w| w[1] - w[0]))
    }

    fn segment_arg(&self, m: usize, x: f64) -> f64 {
        let (b, v, l) = (self.h.supports(), self.h.images(), self.h.slopes());
        b[m - 1] + (x - v[m - 1]) / l[m - 1]
    }

    pub fn pdf(&self, x: f64) -> PdfValue {
        let v = self.h.images();
        let top = v[v.len() - 1];
        let atom = if x == 0.0 {
            self.atom_at_zero()
        } else if x == top {
            self.atom_at_max()
        } else {
            0.0
        };
        if x <= 0.0 || x > top {
            return PdfValue { density: 0.0, atom };
        }
        let m = v.partition_point(|&vi| vi < x);
        let l = self.h.slopes()[m - 1];
        PdfValue { density: self.rp.pdf(self.segment_arg(m, x)) / l, atom }
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        let v = self.h.images();
        if x < 0.0 {
            return 0.0;
        }
        if x >= v[v.len() - 1] {
            return 1.0;
        }
        let m = v.partition_point(|&vi| vi <= x);
        if v[m - 1] == x {
            return self.xi[m - 1];
        }
        self.rp.cdf(self.segment_arg(m, x))
    }

    /// Left limit `P(p~(P_R) < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let v = self.h.images();
        if x <= 0.0 {
            return 0.0;
        }
        if x > v[v.len() - 1] {
            return 1.0;
        }
        if x == v[v.len() - 1] {
            return 1.0 - self.top_atom;
        }
        self.cdf(x)
    }

    pub fn mean(&self) -> f64 {
        expected_power_piecewise(&self.rp, &self.h)
    }

    pub fn second_moment(&self) -> f64 {
        second_moment_piecewise(&self.rp, &self.h)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        (self.second_moment() - m * m).max(0.0)
    }
}

/// Probability that the received power does not exceed the sensitivity.
pub fn sensitivity_outage(link: &LinkBudget, ch: &FadingChannel, sensitivity_mw: f64) -> Result<f64> {
    if !(sensitivity_mw > 0.0) {
        return domain("sensitivity must be positive");
    }
    Ok(ReceivedPower::new(link, ch)?.cdf(sensitivity_mw))
}

/// `int_a^b x^i f_{P_R}(x) dx`, with `b = +inf` allowed.
pub fn partial_moment(rp: &ReceivedPower, order: u32, a: f64, b: f64) -> f64 {
    let m = rp.shape();
    let theta = rp.scale();
    let mut factor = 1.0;
    for k in 0..order {
        factor *= (m + k as f64) * theta;
    }
    let za = a.max(0.0) / theta;
    let zb = if b.is_infinite() { f64::INFINITY } else { b.max(0.0) / theta };
    factor * reg_upper_diff_unchecked(m + order as f64, za, zb)
}

pub fn expected_power_linear(rp: &ReceivedPower, eta: f64) -> f64 {
    eta * rp.mean()
}

pub fn expected_power_cl(rp: &ReceivedPower, model: &ConstantLinear) -> f64 {
    let s = model.sensitivity_mw;
    model.eta * (partial_moment(rp, 1, s, f64::INFINITY) - s * partial_moment(rp, 0, s, f64::INFINITY))
}

pub fn expected_power_clc(rp: &ReceivedPower, model: &ConstantLinearConstant) -> f64 {
    let (s, t) = (model.sensitivity_mw, model.saturation_mw);
    model.eta
        * compensated_sum([
            partial_moment(rp, 1, s, t),
            -s * partial_moment(rp, 0, s, t),
            (t - s) * rp.sf(t),
        ])
}

/// Expected output of the piecewise-linear model, summing the incomplete
/// gamma moments of every segment plus the saturation atom.
pub fn expected_power_piecewise(rp: &ReceivedPower, h: &PiecewiseLinear) -> f64 {
    let (b, v, l) = (h.supports(), h.images(), h.slopes());
    let last = b.len() - 1;
    let terms = (1..=last)
        .flat_map(|j| {
            let m1 = partial_moment(rp, 1, b[j - 1], b[j]);
            let m0 = partial_moment(rp, 0, b[j - 1], b[j]);
            [l[j - 1] * m1, (v[j - 1] - l[j - 1] * b[j - 1]) * m0]
        })
        .chain(std::iter::once(v[last] * rp.sf(b[last])));
    compensated_sum(terms)
}

/// `E[p~(P_R)^2]` for the piecewise-linear model.
pub fn second_moment_piecewise(rp: &ReceivedPower, h: &PiecewiseLinear) -> f64 {
    let (b, v, l) = (h.supports(), h.images(), h.slopes());
    let last = b.len() - 1;
    let terms = (1..=last)
        .flat_map(|j| {
            let (s, c) = (l[j - 1], v[j - 1] - l[j - 1] * b[j - 1]);
            [
                s * s * partial_moment(rp, 2, b[j - 1], b[j]),
                2.0 * s * c * partial_moment(rp, 1, b[j - 1], b[j]),
                c * c * partial_moment(rp, 0, b[j - 1], b[j]),
            ]
        })
        .chain(std::iter::once(v[last] * v[last] * rp.sf(b[last])));
    compensated_sum(terms)
}

/// Expected energy over `blocks` coherence blocks of `packet_ms` each, in
/// mW * ms (microjoules).
pub fn expected_energy(mean_power_mw: f64, blocks: usize, packet_ms: f64) -> f64 {
    blocks as f64 * packet_ms * mean_power_mw
}

/// Survival level at which [`expected_power_numeric`] truncates the
/// integration range.
pub const TAIL_TRUNCATION: f64 = 1e-100;

/// `E[p(P_R)]` by adaptive quadrature over `[0, x*]` with
/// `F_{P_R}(x*) = 1 - 1e-100`, splitting at the model's breakpoints.
pub fn expected_power_numeric<H: Harvester + ?Sized>(rp: &ReceivedPower, p: &H, rel_tol: f64) -> Result<f64> {
    moment_numeric(rp, p, 1, rel_tol)
}

/// `E[p(P_R)^order]` by adaptive quadrature.
pub fn moment_numeric<H: Harvester + ?Sized>(rp: &ReceivedPower, p: &H, order: i32, rel_tol: f64) -> Result<f64> {
    let upper = rp.upper_quantile(TAIL_TRUNCATION);
    let mut cuts: Vec<f64> = p.breakpoints().into_iter().filter(|&x| x < upper).collect();
    cuts.push(((rp.shape() - 1.0) * rp.scale()).max(0.0));
    let opts = QuadOptions { rel_tol, abs_tol: 1e-300, max_intervals: 100_000 };
    let r = integrate(|x| p.power(x).powi(order) * rp.pdf(x), 0.0, upper, &cuts, opts)?;
    Ok(r.value)
}
