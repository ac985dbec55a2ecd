//! Profiles on a 1D grid and the measures taken from them: thickness,
//! density overshoot, temperature anisotropy, scaling exponents and L1 errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Freemol,
    Dsmc,
    Fvm,
    /// Exact Euler Riemann solution.
    Riemann,
}

/// Units of the `x` and `t` stamps of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `x / lambda_1` and `t / tau_1`.
    Reference,
    /// Metres and seconds.
    Si,
    /// Whatever scaling the problem was posed in (e.g. the Sod tube).
    Problem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rho,
    U,
    Tn,
    Tx,
    Ttot,
}

/// Per-cell sample statistics of a particle profile.
///
/// Standard errors are those of the cell estimates, computed from the
/// sampled moments; `samples` is the number of particle samples per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub samples: Vec<f64>,
    pub rho_se: Vec<f64>,
    pub u_se: Vec<f64>,
    pub tn_se: Vec<f64>,
    pub tx_se: Vec<f64>,
}

/// Macroscopic fields on a grid at one time.
///
/// Missing values (e.g. empty DSMC cells) are stored as NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub tn: Vec<f64>,
    pub tx: Vec<f64>,
    pub ttot: Vec<f64>,
    pub t: f64,
    pub units: Units,
    pub source: Source,
    pub stats: Option<SampleStats>,
}

/// `(Tx + 2 Tn) / 3`.
pub fn total_temperature(tx: f64, tn: f64) -> f64 {
    (tx + 2.0 * tn) / 3.0
}

impl Profile {
    /// Builds a profile, filling `ttot` from `tx` and `tn`.
    pub fn new(
        x: Vec<f64>,
        rho: Vec<f64>,
        u: Vec<f64>,
        tn: Vec<f64>,
        tx: Vec<f64>,
        t: f64,
        units: Units,
        source: Source,
    ) -> Result<Self> {
        let ttot = tx.iter().zip(&tn).map(|(&a, &b)| total_temperature(a, b)).collect();
        let p = Profile {
            x,
            rho,
            u,
            tn,
            tx,
            ttot,
            t,
            units,
            source,
            stats: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if n == 0 {
            return Err(Error::Precondition("profile has no points".into()));
        }
        let lens = [
            self.rho.len(),
            self.u.len(),
            self.tn.len(),
            self.tx.len(),
            self.ttot.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Precondition(format!(
                "profile field lengths {lens:?} differ from grid length {n}"
            )));
        }
        if let Some(s) = &self.stats {
            let lens = [
                s.samples.len(),
                s.rho_se.len(),
                s.u_se.len(),
                s.tn_se.len(),
                s.tx_se.len(),
            ];
            if lens.iter().any(|&l| l != n) {
                return Err(Error::Precondition("sample statistics length mismatch".into()));
            }
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("profile grid is not strictly increasing".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn field(&self, f: Field) -> &[f64] {
        match f {
            Field::Rho => &self.rho,
            Field::U => &self.u,
            Field::Tn => &self.tn,
            Field::Tx => &self.tx,
            Field::Ttot => &self.ttot,
        }
    }

    /// Standard error of a field, if the profile carries sample statistics.
    pub fn field_se(&self, f: Field) -> Option<Vec<f64>> {
        let s = self.stats.as_ref()?;
        Some(match f {
            Field::Rho => s.rho_se.clone(),
            Field::U => s.u_se.clone(),
            Field::Tn => s.tn_se.clone(),
            Field::Tx => s.tx_se.clone(),
            Field::Ttot => s
                .tx_se
                .iter()
                .zip(&s.tn_se)
                .map(|(a, b)| (a * a + 4.0 * b * b).sqrt() / 3.0)
                .collect(),
        })
    }

    /// Rescales the grid and time stamp, e.g. for a change of units.
    pub fn rescaled(&self, x_scale: f64, t_scale: f64, units: Units) -> Profile {
        Profile {
            x: self.x.iter().map(|v| v * x_scale).collect(),
            t: self.t * t_scale,
            units,
            ..self.clone()
        }
    }

    /// Linear interpolation of a field at `x`; NaN outside the grid.
    pub fn interpolate(&self, f: Field, x: f64) -> f64 {
        let xs = &self.x;
        let ys = self.field(f);
        if x < xs[0] || x > xs[xs.len() - 1] {
            return f64::NAN;
        }
        let i = xs.partition_point(|&v| v <= x);
        if i == 0 {
            return ys[0];
        }
        if i == xs.len() {
            return ys[xs.len() - 1];
        }
        let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        ys[i - 1] + w * (ys[i] - ys[i - 1])
    }
}

/// Far-field densities used to normalise `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateaus {
    pub left: f64,
    pub right: f64,
}

impl Plateaus {
    /// Means over the outer 10% of cells on each side (at least one cell),
    /// skipping missing values.
    pub fn estimate(p: &Profile) -> Result<Self> {
        let n = p.len();
        let k = (n / 10).max(1);
        let mean = |vals: &[f64]| {
            let good: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
            if good.is_empty() {
                None
            } else {
                Some(good.iter().sum::<f64>() / good.len() as f64)
            }
        };
        match (mean(&p.rho[..k]), mean(&p.rho[n - k..])) {
            (Some(left), Some(right)) => Ok(Plateaus { left, right }),
            _ => Err(Error::Diagnostic("no density samples in a far-field plateau".into())),
        }
    }

    pub fn low(&self) -> f64 {
        self.left.min(self.right)
    }

    pub fn high(&self) -> f64 {
        self.left.max(self.right)
    }

    /// `rho* = (rho - rho_low) / (rho_high - rho_low)`.
    pub fn normalise(&self, rho: f64) -> f64 {
        (rho - self.low()) / (self.high() - self.low())
    }
}

/// Options for [`thickness_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThicknessOptions {
    /// Far-field densities; estimated from the profile when absent.
    pub plateaus: Option<Plateaus>,
    /// Hysteresis half-width in `rho*` for counting 0.5 crossings. Noisy
    /// profiles need a band of a few standard errors so that scatter around
    /// 0.5 is not read as several crossings.
    pub band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thickness {
    /// `|x(0.2) - x(0.8)| / 0.6`
    pub d: f64,
    pub x_02: f64,
    pub x_05: f64,
    pub x_08: f64,
    /// Fewer than two grid points lie strictly between the 0.2 and 0.8 crossings.
    pub under_resolved: bool,
    pub plateaus: Plateaus,
}

/// Hysteresis band of three times the larger `rho*` scatter in the outer
/// 10% of cells on either side; zero for smooth profiles.
pub fn noise_band(p: &Profile, plateaus: &Plateaus) -> f64 {
    let n = p.len();
    let k = (n / 10).max(2).min(n);
    let sd = |vals: &[f64]| {
        let v: Vec<f64> = vals
            .iter()
            .filter(|r| r.is_finite())
            .map(|&r| plateaus.normalise(r))
            .collect();
        if v.len() < 2 {
            return 0.0;
        }
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    3.0 * sd(&p.rho[..k]).max(sd(&p.rho[n - k..]))
}

/// Thickness with plateaus estimated from the profile and no hysteresis.
pub fn thickness(p: &Profile) -> Result<Thickness> {
    thickness_with(p, ThicknessOptions::default())
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        0.5 * (x0 + x1)
    } else {
        x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    }
}

/// Thickness of a density transition from the 0.2 and 0.8 crossings of `rho*`.
///
/// The 0.5 crossing must be unique; from it the profile is walked outward to
/// the first 0.2 crossing on the low side and the first 0.8 crossing on the
/// high side, so overshoot lobes beyond the band never contribute.
pub fn thickness_with(p: &Profile, opts: ThicknessOptions) -> Result<Thickness> {
    p.validate()?;
    let plateaus = match opts.plateaus {
        Some(pl) => pl,
        None => Plateaus::estimate(p)?,
    };
    let span = plateaus.high() - plateaus.low();
    if !(span > 1e-12 * plateaus.high().abs()) {
        return Err(Error::Diagnostic(format!(
            "far-field densities do not differ ({} vs {})",
            plateaus.left, plateaus.right
        )));
    }
    // Orient so that y rises from 0 (left) to 1 (right).
    let rising = plateaus.right > plateaus.left;
    let pts: Vec<(f64, f64)> =
        p.x.iter()
            .zip(&p.rho)
            .filter(|(_, r)| r.is_finite())
            .map(|(&x, &r)| {
                let s = plateaus.normalise(r);
                (x, if rising { s } else { 1.0 - s })
            })
            .collect();
    if pts.len() < 2 {
        return Err(Error::Diagnostic("fewer than two density samples".into()));
    }

    // Crossings of 0.5 with a hysteresis band: a crossing is an excursion
    // from below 0.5 - band to above 0.5 + band (or the reverse).
    let band = opts.band.max(0.0);
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    let mut state: Option<bool> = None; // Some(true) = last seen above the band
    let mut last_below = None;
    let mut last_above = None;
    for (i, &(_, y)) in pts.iter().enumerate() {
        let above = if y > 0.5 + band || (band == 0.0 && y >= 0.5) {
            Some(true)
        } else if y < 0.5 - band {
            Some(false)
        } else {
            None
        };
        let Some(a) = above else { continue };
        if let Some(prev) = state {
            if prev != a {
                // Locate the 0.5 crossing between the two anchor points.
                let start = if a { last_below } else { last_above }.unwrap();
                let j = (start..i)
                    .find(|&j| (pts[j].1 - 0.5) * (pts[j + 1].1 - 0.5) <= 0.0 && pts[j].1 != pts[j + 1].1)
                    .unwrap_or(start);
                let (x0, y0) = pts[j];
                let (x1, y1) = pts[j + 1];
                candidates.push((j, crossing(x0, y0, x1, y1, 0.5)));
            }
        }
        state = Some(a);
        if a {
            last_above = Some(i);
        } else {
            last_below = Some(i);
        }
    }
    let (j, x_05) = match candidates.len() {
        0 => return Err(Error::Diagnostic("normalised density never crosses 0.5".into())),
        1 => candidates[0],
        _ => {
            return Err(Error::Ambiguous {
                candidates: candidates.iter().map(|c| c.1).collect(),
            })
        }
    };

    // Walk left (towards y = 0) and right (towards y = 1) from the crossing
    // interval [j, j + 1].
    let mut x_lo = None;
    for k in (0..=j).rev() {
        if pts[k].1 <= 0.2 {
            let (x0, y0) = pts[k];
            let (x1, y1) = pts[k + 1];
            x_lo = Some(crossing(x0, y0, x1, y1, 0.2));
            break;
        }
    }
    let mut x_hi = None;
    for k in j + 1..pts.len() {
        if pts[k].1 >= 0.8 {
            let (x0, y0) = pts[k - 1];
            let (x1, y1) = pts[k];
            x_hi = Some(crossing(x0, y0, x1, y1, 0.8));
            break;
        }
    }
    let (Some(x_lo), Some(x_hi)) = (x_lo, x_hi) else {
        return Err(Error::Diagnostic(
            "normalised density does not reach both 0.2 and 0.8".into(),
        ));
    };
    let (x_02, x_08) = if rising { (x_lo, x_hi) } else { (x_hi, x_lo) };
    let inside =
        p.x.iter()
            .filter(|&&x| x > x_02.min(x_08) && x < x_02.max(x_08))
            .count();
    Ok(Thickness {
        d: (x_02 - x_08).abs() / 0.6,
        x_02,
        x_05,
        x_08,
        under_resolved: inside < 2,
        plateaus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overshoot {
    /// `max(rho*) - 1`, floored at zero.
    pub max_over: f64,
    /// `-min(rho*)`, floored at zero.
    pub max_under: f64,
}

/// Density overshoot and undershoot relative to the far-field plateaus.
pub fn overshoot(p: &Profile, plateaus: Option<Plateaus>) -> Result<Overshoot> {
    p.validate()?;
    let pl = match plateaus {
        Some(pl) => pl,
        None => Plateaus::estimate(p)?,
    };
    if !(pl.high() > pl.low()) {
        return Err(Error::Diagnostic("far-field densities do not differ".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &r in p.rho.iter().filter(|r| r.is_finite()) {
        let s = pl.normalise(r);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(Overshoot {
        max_over: (hi - 1.0).max(0.0),
        max_under: (-lo).max(0.0),
    })
}

/// Largest `Tx - Tn` over the profile (missing cells skipped).
pub fn anisotropy_max(p: &Profile) -> f64 {
    p.tx.iter()
        .zip(&p.tn)
        .map(|(a, b)| a - b)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub slope: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub intercept: f64,
}

/// Least-squares slope of `ln d` against `ln t`.
pub fn scaling_exponent(series: &[(f64, f64)]) -> Result<Exponent> {
    if series.len() < 5 {
        return Err(Error::Precondition(format!(
            "scaling exponent needs at least 5 points, got {}",
            series.len()
        )));
    }
    if let Some(bad) = series.iter().find(|(t, d)| !(*t > 0.0 && *d > 0.0)) {
        return Err(Error::Precondition(format!(
            "scaling exponent needs positive (t, d), got {bad:?}"
        )));
    }
    let n = series.len() as f64;
    let pts: Vec<(f64, f64)> = series.iter().map(|(t, d)| (t.ln(), d.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Precondition("scaling exponent needs distinct times".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(Exponent {
        slope,
        stderr,
        intercept,
    })
}

/// `erf^-1(0.6)`: an error-function profile of width `w` has
/// `d = 2 erf^-1(0.6) w / 0.6`.
const ERFINV_06: f64 = 0.595_116_081_449_994_8;

/// Error-function fit of a density transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErfFit {
    pub centre: f64,
    /// `w` in `rho* = (1 + erf((x - centre) / w)) / 2`.
    pub width: f64,
    /// Thickness of the fitted curve, same definition as [`Thickness::d`].
    pub d: f64,
    pub d_se: f64,
    /// Reduced chi-square of the fit.
    pub chi2: f64,
}

/// Thickness from a weighted least-squares fit of an error function to `rho*`.
///
/// Meant for weak transitions where scatter swamps the 0.2/0.8 crossings.
/// Cells are weighted by their density standard errors when the profile
/// carries them. The standard error of `d` is scaled up by the reduced
/// chi-square when that exceeds one.
pub fn erf_thickness(p: &Profile, plateaus: Plateaus) -> Result<ErfFit> {
    p.validate()?;
    let span = plateaus.high() - plateaus.low();
    if !(span > 1e-12 * plateaus.high().abs()) {
        return Err(Error::Diagnostic("far-field densities do not differ".into()));
    }
    let sign = if plateaus.right > plateaus.left { 1.0 } else { -1.0 };
    let se = p.field_se(Field::Rho);
    let pts: Vec<(f64, f64, f64)> = (0..p.len())
        .filter_map(|i| {
            let w = match &se {
                Some(s) if s[i] > 0.0 => span / s[i],
                Some(_) => return None,
                None => 1.0,
            };
            (p.rho[i].is_finite() && w.is_finite()).then(|| (p.x[i], plateaus.normalise(p.rho[i]), w))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::Diagnostic(format!(
            "only {} usable cells for an erf fit",
            pts.len()
        )));
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let model = |x: f64, c: f64, w: f64| 0.5 * (1.0 + sign * libm::erf((x - c) / w));
    let cost = |c: f64, w: f64| -> f64 { pts.iter().map(|&(x, y, wt)| ((y - model(x, c, w)) * wt).powi(2)).sum() };

    // Coarse scan, then damped Gauss-Newton.
    let (x_lo, x_hi) = (pts[0].0, pts[pts.len() - 1].0);
    let extent = x_hi - x_lo;
    let min_w = extent / pts.len() as f64 * 0.25;
    let (mut c, mut w) = (0.5 * (x_lo + x_hi), 0.1 * extent);
    let mut best = f64::INFINITY;
    for i in 0..=60 {
        let ci = x_lo + extent * (0.1 + 0.8 * i as f64 / 60.0);
        for j in 0..=60 {
            let wj = min_w * (extent / min_w).powf(j as f64 / 60.0);
            let f = cost(ci, wj);
            if f < best {
                (best, c, w) = (f, ci, wj);
            }
        }
    }
    let normal_eqs = |c: f64, w: f64| {
        let (mut a, mut g) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(x, y, wt) in &pts {
            let z = (x - c) / w;
            let e = (-z * z).exp() * sign / (sqrt_pi * w);
            let jac = [-e * wt, -e * z * wt];
            let r = (y - model(x, c, w)) * wt;
            for k in 0..2 {
                g[k] += jac[k] * r;
                for l in 0..2 {
                    a[k][l] += jac[k] * jac[l];
                }
            }
        }
        (a, g)
    };
    let mut damping = 1e-3;
    for _ in 0..200 {
        let (a, g) = normal_eqs(c, w);
        let m = [
            [a[0][0] * (1.0 + damping), a[0][1]],
            [a[1][0], a[1][1] * (1.0 + damping)],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.abs() > 0.0) {
            break;
        }
        let dc = (m[1][1] * g[0] - m[0][1] * g[1]) / det;
        let dw = (m[0][0] * g[1] - m[1][0] * g[0]) / det;
        let (nc, nw) = (c + dc, w + dw);
        let f = if nw > 0.0 { cost(nc, nw) } else { f64::INFINITY };
        if f <= best {
            let done = (best - f) <= 1e-15 * best.max(f64::MIN_POSITIVE)
                && dc.abs() <= 1e-12 * extent
                && dw.abs() <= 1e-12 * w;
            (best, c, w) = (f, nc, nw);
            damping = (damping * 0.3).max(1e-12);
            if done {
                break;
            }
        } else {
            damping *= 10.0;
            if damping > 1e12 {
                break;
            }
        }
    }
    let (a, _) = normal_eqs(c, w);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let chi2 = best / (pts.len() - 2) as f64;
    let var_w = a[0][0] / det * chi2.max(1.0);
    let to_d = 2.0 * ERFINV_06 / 0.6;
    Ok(ErfFit {
        centre: c,
        width: w,
        d: to_d * w,
        d_se: to_d * var_w.max(0.0).sqrt(),
        chi2,
    })
}

/// Widths of the cells around each grid point (midpoint rule).
fn cell_widths(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let lo = if i == 0 {
                x[0] - 0.5 * (x[1] - x[0])
            } else {
                0.5 * (x[i - 1] + x[i])
            };
            let hi = if i == n - 1 {
                x[n - 1] + 0.5 * (x[n - 1] - x[n - 2])
            } else {
                0.5 * (x[i] + x[i + 1])
            };
            hi - lo
        })
        .collect()
}

/// Width-weighted mean absolute difference between a field and `reference(x)`.
pub fn l1_error_fn(p: &Profile, field: Field, reference: impl Fn(f64) -> f64) -> Result<f64> {
    p.validate()?;
    let w = cell_widths(&p.x);
    let (mut num, mut den) = (0.0, 0.0);
    for ((&x, &v), &wi) in p.x.iter().zip(p.field(field)).zip(&w) {
        if !v.is_finite() {
            continue;
        }
        let r = reference(x);
        if !r.is_finite() {
            return Err(Error::Domain(format!("reference undefined at x = {x}")));
        }
        num += (v - r).abs() * wi;
        den += wi;
    }
    if den == 0.0 {
        return Err(Error::Diagnostic("no valid samples for the L1 error".into()));
    }
    Ok(num / den)
}

/// L1 difference against another profile, interpolated onto `p`'s grid.
pub fn l1_error(p: &Profile, reference: &Profile, field: Field) -> Result<f64> {
    reference.validate()?;
    if p.units != reference.units {
        return Err(Error::Domain("profiles use different units".into()));
    }
    let (lo, hi) = (reference.x[0], reference.x[reference.len() - 1]);
    let tol = 1e-12 * (hi - lo).abs().max(1.0);
    if p.x[0] < lo - tol || p.x[p.len() - 1] > hi + tol {
        return Err(Error::Domain(format!(
            "profile grid [{}, {}] extends beyond the reference [{lo}, {hi}]",
            p.x[0],
            p.x[p.len() - 1]
        )));
    }
    l1_error_fn(p, field, |x| reference.interpolate(field, x.clamp(lo, hi)))
}

/// Largest `|a - b| / sqrt(se_a^2 + se_b^2)` over cells where both profiles
/// carry data. Both profiles must share the grid and carry sample statistics.
pub fn max_normalised_difference(a: &Profile, b: &Profile, field: Field) -> Result<f64> {
    if a.x != b.x {
        return Err(Error::Domain("profiles are on different grids".into()));
    }
    let (Some(sa), Some(sb)) = (a.field_se(field), b.field_se(field)) else {
        return Err(Error::Precondition("profiles carry no sample statistics".into()));
    };
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        let (va, vb) = (a.field(field)[i], b.field(field)[i]);
        let se = (sa[i] * sa[i] + sb[i] * sb[i]).sqrt();
        if va.is_finite() && vb.is_finite() && se > 0.0 {
            worst = worst.max((va - vb).abs() / se);
        }
    }
    Ok(worst)
}
