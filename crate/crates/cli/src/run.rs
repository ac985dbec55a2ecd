//! Dispatch of a resolved experiment to the solvers.

use kinflow::diagnostics::{
    anisotropy_max, noise_band, overshoot, thickness_with, Plateaus, Profile, Source, ThicknessOptions, Units,
};
use kinflow::dsmc::run_unsteady;
use kinflow::freemol::profile_on_grid;
use kinflow::fvm::{self, Boundary, Grid1D};
use kinflow::riemann::exact_riemann;
use kinflow::Result;

use crate::config::{Case, Regime, Resolved};

/// One row of `diagnostics.csv`; NaN marks a measure that could not be taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub thickness: f64,
    pub overshoot: f64,
    pub undershoot: f64,
    pub tx_minus_tn_max: f64,
}

impl Resolved {
    pub fn units(&self) -> Units {
        if self.scales.is_some() {
            Units::Reference
        } else {
            Units::Problem
        }
    }

    /// Location of the initial jump in output units.
    pub fn jump_position(&self) -> f64 {
        if self.config.case == Case::Sod {
            0.5
        } else {
            0.0
        }
    }

    pub fn plateaus(&self) -> Plateaus {
        Plateaus {
            left: self.ic.left.rho,
            right: self.ic.right.rho,
        }
    }

    fn output_grid(&self) -> Vec<f64> {
        let g = self.grid;
        let n = g.points;
        (0..n)
            .map(|i| g.x_min + (g.x_max - g.x_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Runs the experiment and returns one profile per sample time.
pub fn run_profiles(r: &Resolved) -> Result<Vec<Profile>> {
    let (xs, ts) = r.unit_lengths();
    let units = r.units();
    let times = &r.config.sample_times;
    match r.regime() {
        Regime::Freemol => {
            let x0 = r.jump_position();
            let grid: Vec<f64> = r.output_grid().iter().map(|x| x - x0).collect();
            times
                .iter()
                .map(|&t| {
                    let mut p = profile_on_grid(&r.ic, &r.gm, &grid, t, (xs, ts), units)?;
                    p.x.iter_mut().for_each(|x| *x += x0);
                    Ok(p)
                })
                .collect()
        }
        Regime::Riemann => {
            let fan = exact_riemann(&r.ic.left, &r.ic.right, &r.gm)?;
            let x0 = r.jump_position();
            let grid = r.output_grid();
            times
                .iter()
                .map(|&t| {
                    let states: Vec<_> = grid.iter().map(|&x| fan.sample((x - x0) * xs / (t * ts))).collect();
                    let temp: Vec<f64> = states.iter().map(|s| s.temperature).collect();
                    Profile::new(
                        grid.clone(),
                        states.iter().map(|s| s.rho).collect(),
                        states.iter().map(|s| s.u).collect(),
                        temp.clone(),
                        temp,
                        t,
                        units,
                        Source::Riemann,
                    )
                })
                .collect()
        }
        Regime::Fvm => {
            let g = r.grid;
            let scheme = r.scheme.expect("fvm scheme resolved");
            let mut grid = Grid1D::riemann(
                g.points,
                g.x_min * xs,
                g.x_max * xs,
                r.jump_position() * xs,
                r.ic.left,
                r.ic.right,
                (Boundary::ZeroGradient, Boundary::ZeroGradient),
                &r.gm,
            )?;
            let si_times: Vec<f64> = times.iter().map(|t| t * ts).collect();
            let out = fvm::run(&mut grid, &scheme, &r.gm, &si_times, Units::Si, r.max_steps)?;
            Ok(out.into_iter().map(|p| p.rescaled(1.0 / xs, 1.0 / ts, units)).collect())
        }
        Regime::Dsmc => {
            let cfg = r.dsmc.as_ref().expect("dsmc config resolved");
            Ok(run_unsteady(cfg, &r.gm)?.profiles)
        }
    }
}

/// Measures of one profile against the initial far-field densities.
///
/// Thickness uses the 0.2/0.8 crossings with a hysteresis band set by the
/// far-field scatter; it is NaN when the 0.5 crossing is not unique.
pub fn diagnostics_row(p: &Profile, plateaus: Plateaus) -> DiagnosticsRow {
    let band = noise_band(p, &plateaus);
    let thickness = thickness_with(
        p,
        ThicknessOptions {
            plateaus: Some(plateaus),
            band,
        },
    )
    .map_or(f64::NAN, |t| t.d);
    let (over, under) = overshoot(p, Some(plateaus)).map_or((f64::NAN, f64::NAN), |o| (o.max_over, o.max_under));
    let aniso = anisotropy_max(p);
    DiagnosticsRow {
        t: p.t,
        thickness,
        overshoot: over,
        undershoot: under,
        tx_minus_tn_max: if aniso.is_finite() { aniso } else { f64::NAN },
    }
}
