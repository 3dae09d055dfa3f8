use super::{Harvester, HarvesterCurve, InvertibleHarvester};
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// Placement of support points when sampling a known harvesting function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    UniformLinear,
    UniformDb,
    /// The measured points themselves; only meaningful with a curve, see
    /// [`PiecewiseLinear::from_curve`].
    Datapoints,
}

/// Piecewise-linear harvester through supports `b_0 < ... < b_M` with images
/// `0 = v_0 < ... < v_M`; zero below `b_0` and flat above `b_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    b: Vec<f64>,
    v: Vec<f64>,
    l: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(supports: Vec<f64>, images: Vec<f64>) -> Result<Self> {
        if supports.len() != images.len() || supports.len() < 2 {
            return Err(Error::InvalidCurve("need matching supports and images, at least two".into()));
        }
        if !(supports[0] > 0.0) {
            return Err(Error::InvalidCurve("first support must be positive".into()));
        }
        if images[0] != 0.0 {
            return Err(Error::InvalidCurve("first image must be zero".into()));
        }
        for m in 1..supports.len() {
            if !(supports[m] > supports[m - 1]) {
                return Err(Error::InvalidCurve(format!("supports not strictly increasing at {m}")));
            }
            if !(images[m] > images[m - 1]) {
                return Err(Error::InvalidCurve(format!("images not strictly increasing at {m}")));
            }
        }
        let l = supports
            .windows(2)
            .zip(images.windows(2))
            .map(|(b, v)| (v[1] - v[0]) / (b[1] - b[0]))
            .collect();
        Ok(Self { b: supports, v: images, l })
    }

    /// Interpolates the measured datapoints directly. Runs of equal outputs
    /// keep only their first point.
    pub fn from_curve(curve: &HarvesterCurve) -> Result<Self> {
        let mut b = Vec::with_capacity(curve.len());
        let mut v: Vec<f64> = Vec::with_capacity(curve.len());
        for &(x, y) in curve.points() {
            if let Some(&last) = v.last() {
                if y == last {
                    continue;
                }
            }
            b.push(x);
            v.push(y);
        }
        Self::new(b, v)
    }

    /// Samples `p` at `segments + 1` supports between `sensitivity` and
    /// `saturation`.
    pub fn from_function<H: Harvester + ?Sized>(
        p: &H,
        sensitivity: f64,
        saturation: f64,
        segments: usize,
        spacing: Spacing,
    ) -> Result<Self> {
        if segments == 0 {
            return domain("at least one segment is required");
        }
        if !(sensitivity > 0.0 && saturation > sensitivity) {
            return domain("need 0 < sensitivity < saturation");
        }
        let m = segments as f64;
        let mut b: Vec<f64> = match spacing {
            Spacing::UniformLinear => {
                let step = (saturation - sensitivity) / m;
                (0..=segments).map(|i| sensitivity + step * i as f64).collect()
            }
            Spacing::UniformDb => {
                let (lo, hi) = (sensitivity.log10(), saturation.log10());
                (0..=segments).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / m)).collect()
            }
            Spacing::Datapoints => return domain("datapoint spacing needs a measured curve, not a function"),
        };
        b[0] = sensitivity;
        b[segments] = saturation;
        let mut v: Vec<f64> = b.iter().map(|&x| p.power(x)).collect();
        v[0] = 0.0;
        Self::new(b, v)
    }

    pub fn supports(&self) -> &[f64] {
        &self.b
    }

    pub fn images(&self) -> &[f64] {
        &self.v
    }

    pub fn slopes(&self) -> &[f64] {
        &self.l
    }

    pub fn segments(&self) -> usize {
        self.l.len()
    }

    pub fn sensitivity_mw(&self) -> f64 {
        self.b[0]
    }

    pub fn saturation_mw(&self) -> f64 {
        self.b[self.b.len() - 1]
    }

    pub fn max_output(&self) -> f64 {
        self.v[self.v.len() - 1]
    }

    /// Index `m` of the segment `(b_{m-1}, b_m]` containing `x`, for
    /// `b_0 < x <= b_M`.
    pub fn segment_of(&self, x: f64) -> usize {
        self.b.partition_point(|&bi| bi < x)
    }

    /// The unique `x` in `[b_0, b_M]` with `p(x) = y`, for `y` in `[0, v_M]`.
    pub fn inverse_checked(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y <= self.max_output()) {
            return domain(format!("target {y} outside [0, {}]", self.max_output()));
        }
        let m = self.v.partition_point(|&vi| vi < y);
        if self.v[m] == y {
            return Ok(self.b[m]);
        }
        Ok(self.b[m - 1] + (y - self.v[m - 1]) / self.l[m - 1])
    }
}

impl Harvester for PiecewiseLinear {
    fn power(&self, x: f64) -> f64 {
        if x <= self.b[0] {
            return 0.0;
        }
        let last = self.b.len() - 1;
        if x >= self.b[last] {
            return self.v[last];
        }
        let m = self.segment_of(x);
        if self.b[m] == x {
            return self.v[m];
        }
        self.l[m - 1] * (x - self.b[m - 1]) + self.v[m - 1]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.b.clone()
    }
}

impl InvertibleHarvester for PiecewiseLinear {
    fn plateau(&self) -> f64 {
        self.max_output()
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        self.inverse_checked(y).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_segment() -> PiecewiseLinear {
        PiecewiseLinear::new(vec![1.0, 2.0, 4.0], vec![0.0, 0.5, 1.5]).unwrap()
    }

    #[test]
    fn nodes_and_tails() {
        let h = two_segment();
        for (b, v) in h.supports().iter().zip(h.images()) {
            assert_eq!(h.power(*b), *v);
        }
        assert_eq!(h.power(0.3), 0.0);
        assert_eq!(h.power(100.0), 1.5);
        assert_eq!(h.power(1.5), 0.25);
        assert_eq!(h.slopes(), &[0.5, 0.5]);
    }

    #[test]
    fn single_segment() {
        let h = PiecewiseLinear::new(vec![0.5, 3.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(h.segments(), 1);
        assert!((h.power(1.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_on_nodes_and_midpoints() {
        let h = two_segment();
        assert_eq!(h.inverse_checked(0.0).unwrap(), 1.0);
        assert_eq!(h.inverse_checked(0.5).unwrap(), 2.0);
        assert_eq!(h.inverse_checked(1.5).unwrap(), 4.0);
        assert!((h.inverse_checked(0.75).unwrap() - 2.5).abs() < 1e-15);
        assert!(h.inverse_checked(1.6).is_err());
        assert!(h.inverse_checked(-0.1).is_err());
    }

    #[test]
    fn equal_outputs_merge_and_decreasing_rejected() {
        let c = HarvesterCurve::new(vec![(1.0, 0.0), (2.0, 0.5), (3.0, 0.5), (4.0, 0.7)]).unwrap();
        let h = PiecewiseLinear::from_curve(&c).unwrap();
        assert_eq!(h.supports(), &[1.0, 2.0, 4.0]);
        assert!(PiecewiseLinear::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.5, 0.4]).is_err());
    }

    #[test]
    fn uniform_linear_spacing() {
        let lin = |x: f64| if x <= 1.0 { 0.0 } else { 0.5 * (x - 1.0) };
        let h = PiecewiseLinear::from_function(&lin, 1.0, 12.7, 1170, Spacing::UniformLinear).unwrap();
        let step = 11.7 / 1170.0;
        for w in h.supports().windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }
}
