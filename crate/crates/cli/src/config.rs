//! Experiment configuration: TOML parsing, defaults and validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use kinflow::diagnostics::Source;
use kinflow::dsmc::{BinSpec, DsmcConfig};
use kinflow::fluxes::GksParams;
use kinflow::freemol::DiscontinuityIC;
use kinflow::fvm::{FluxKind, Limiter, SchemeConfig};
use kinflow::gas::{GasModel, GasState, ReferenceScales};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Contact,
    Shock,
    Sod,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Freemol,
    Dsmc,
    Fvm,
    Riemann,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Freemol => "freemol",
            Regime::Dsmc => "dsmc",
            Regime::Fvm => "fvm",
            Regime::Riemann => "riemann",
        }
    }

    pub fn source(self) -> Source {
        match self {
            Regime::Freemol => Source::Freemol,
            Regime::Dsmc => Source::Dsmc,
            Regime::Fvm => Source::Fvm,
            Regime::Riemann => Source::Riemann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GasPreset {
    Argon,
    Ideal,
}

/// Gas constants; unset fields come from the preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub preset: GasPreset,
    pub r: Option<f64>,
    pub gamma: Option<f64>,
    pub mass: Option<f64>,
    pub d_ref: Option<f64>,
    pub t_ref: Option<f64>,
    pub omega: Option<f64>,
    pub mu_ref: Option<f64>,
}

/// Left (upstream) state of contact and shock cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub rho: f64,
    pub temperature: f64,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        ReferenceSection {
            rho: 1e-4,
            temperature: 273.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSection {
    pub left_rho: f64,
    pub left_u: f64,
    pub left_temperature: f64,
    pub right_rho: f64,
    pub right_u: f64,
    pub right_temperature: f64,
}

/// Output grid for `freemol` and `riemann`; cell count and extent for `fvm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DsmcSection {
    pub half_length: f64,
    pub cells_per_lambda: f64,
    pub particles_per_cell: f64,
    pub dt: f64,
    pub replicas: usize,
    pub collisions: bool,
    pub bin_width: f64,
    pub bin_growth: f64,
}

impl Default for DsmcSection {
    fn default() -> Self {
        DsmcSection {
            half_length: 60.0,
            cells_per_lambda: 3.0,
            particles_per_cell: 100.0,
            dt: 0.1,
            replicas: 16,
            collisions: true,
            bin_width: 1.0,
            bin_growth: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FvmSection {
    pub flux: FluxKind,
    pub limiter: Limiter,
    pub cfl: f64,
    pub c_jump: f64,
    pub max_steps: usize,
}

impl Default for FvmSection {
    fn default() -> Self {
        FvmSection {
            flux: FluxKind::Godunov,
            limiter: Limiter::None,
            cfl: 0.5,
            c_jump: GksParams::default().c_jump,
            max_steps: 1_000_000,
        }
    }
}

/// A resolved experiment. Serialising it gives a file that parses back to
/// the same experiment, which is what the run manifest stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: Case,
    pub regime: Option<Regime>,
    /// `T_right / T_left` for a contact, upstream Mach number for a shock.
    pub strength: Option<f64>,
    pub sample_times: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: String,
    pub gas: Option<GasSection>,
    pub reference: Option<ReferenceSection>,
    pub custom: Option<CustomSection>,
    pub grid: Option<GridSection>,
    pub dsmc: Option<DsmcSection>,
    pub fvm: Option<FvmSection>,
}

fn default_seed() -> u64 {
    1
}

fn default_output() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(key: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError(format!("invalid value for `{key}`: {msg}"))
}

/// A run manifest: the resolved config sits under `[config]`.
#[derive(Deserialize)]
struct ManifestDoc {
    config: ExperimentConfig,
}

/// Parses a config file, or the `[config]` table of a run manifest.
///
/// Unknown keys and type mismatches are rejected with the offending key
/// and its line. The result is resolved (all defaults filled in) but not
/// yet checked against a regime; see [`ExperimentConfig::resolve`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
    let cfg: ExperimentConfig = if table.contains_key("manifest") {
        toml::from_str::<ManifestDoc>(text)
            .map_err(|e| ConfigError(e.to_string()))?
            .config
    } else {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?
    };
    Ok(cfg.with_defaults())
}

impl ExperimentConfig {
    /// Fills every optional section with its default.
    pub fn with_defaults(mut self) -> Self {
        let sod = self.case == Case::Sod;
        if self.gas.is_none() {
            self.gas = Some(GasSection {
                preset: if sod { GasPreset::Ideal } else { GasPreset::Argon },
                r: None,
                gamma: None,
                mass: None,
                d_ref: None,
                t_ref: None,
                omega: None,
                mu_ref: None,
            });
        }
        if let Some(g) = &mut self.gas {
            let base = match g.preset {
                GasPreset::Argon => GasModel::argon(),
                GasPreset::Ideal => GasModel::ideal(1.4, 1.0),
            };
            g.r.get_or_insert(base.r);
            g.gamma.get_or_insert(base.gamma);
            g.mass.get_or_insert(base.mass);
            g.d_ref.get_or_insert(base.d_ref);
            g.t_ref.get_or_insert(base.t_ref);
            g.omega.get_or_insert(base.omega);
            if g.mu_ref.is_none() {
                let mut gm = self_gas(g);
                gm.mu_ref = match g.preset {
                    GasPreset::Argon => gm.vhs_reference_viscosity(),
                    GasPreset::Ideal => 0.0,
                };
                g.mu_ref = Some(gm.mu_ref);
            }
        }
        if matches!(self.case, Case::Contact | Case::Shock) && self.reference.is_none() {
            self.reference = Some(ReferenceSection::default());
        }
        if self.grid.is_none() {
            self.grid = Some(if sod {
                GridSection {
                    x_min: 0.0,
                    x_max: 1.0,
                    points: 400,
                }
            } else {
                GridSection {
                    x_min: -20.0,
                    x_max: 20.0,
                    points: 401,
                }
            });
        }
        if self.regime == Some(Regime::Dsmc) && self.dsmc.is_none() {
            self.dsmc = Some(DsmcSection::default());
        }
        if self.regime == Some(Regime::Fvm) && self.fvm.is_none() {
            self.fvm = Some(FvmSection::default());
        }
        self
    }

    /// Fixes the regime (from the subcommand) and validates everything the
    /// run will use.
    pub fn resolve(mut self, regime: Regime) -> Result<Resolved, ConfigError> {
        if let Some(r) = self.regime {
            if r != regime {
                return Err(invalid(
                    "regime",
                    format!(
                        "config asks for `{}` but the `{}` command was run",
                        r.name(),
                        regime.name()
                    ),
                ));
            }
        }
        self.regime = Some(regime);
        let cfg = self.with_defaults();
        let gm = self_gas(cfg.gas.as_ref().expect("defaults filled"));
        gm.validate().map_err(|e| invalid("gas", e))?;

        if cfg.sample_times.is_empty() {
            return Err(invalid("sample_times", "at least one time is required"));
        }
        if cfg.sample_times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(invalid("sample_times", "times must be positive"));
        }
        if cfg.sample_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("sample_times", "times must increase strictly"));
        }

        let strength = || cfg.strength.ok_or_else(|| ConfigError("missing key `strength`".into()));
        let ic = match cfg.case {
            Case::Contact => {
                let s = strength()?;
                if !(s > 0.0) || !s.is_finite() {
                    return Err(invalid(
                        "strength",
                        format!("temperature ratio must be positive, got {s}"),
                    ));
                }
                let r = cfg.reference.expect("defaults filled");
                DiscontinuityIC::contact(r.rho, r.temperature, s).map_err(|e| invalid("reference", e))?
            }
            Case::Shock => {
                let s = strength()?;
                if !(s > 1.0) || !s.is_finite() {
                    return Err(invalid("strength", format!("shock Mach number must exceed 1, got {s}")));
                }
                let r = cfg.reference.expect("defaults filled");
                DiscontinuityIC::shock(r.rho, r.temperature, s, &gm).map_err(|e| invalid("reference", e))?
            }
            Case::Sod => {
                let left = GasState::from_pressure(1.0, 0.0, 1.0, &gm).map_err(|e| invalid("gas", e))?;
                let right = GasState::from_pressure(0.125, 0.0, 0.1, &gm).map_err(|e| invalid("gas", e))?;
                DiscontinuityIC::generic(left, right).map_err(|e| invalid("case", e))?
            }
            Case::Custom => {
                let c = cfg
                    .custom
                    .ok_or_else(|| ConfigError("missing section `[custom]`".into()))?;
                let left =
                    GasState::new(c.left_rho, c.left_u, c.left_temperature).map_err(|e| invalid("custom.left", e))?;
                let right = GasState::new(c.right_rho, c.right_u, c.right_temperature)
                    .map_err(|e| invalid("custom.right", e))?;
                DiscontinuityIC::generic(left, right).map_err(|e| invalid("custom", e))?
            }
        };
        if cfg.case == Case::Sod && cfg.strength.is_some() {
            return Err(invalid("strength", "the sod case has no strength"));
        }
        if cfg.case == Case::Custom && cfg.strength.is_some() {
            return Err(invalid("strength", "custom cases take their states from `[custom]`"));
        }

        let grid = cfg.grid.expect("defaults filled");
        let min_points = if regime == Regime::Fvm { 4 } else { 2 };
        if !(grid.x_max > grid.x_min) || grid.points < min_points {
            return Err(invalid(
                "grid",
                format!("need x_min < x_max and at least {min_points} points"),
            ));
        }

        // Sod is posed in its own units; the others in mean free paths and
        // collision times of the left state.
        let scales = if cfg.case == Case::Sod {
            None
        } else {
            Some(ReferenceScales::of(&ic.left, &gm))
        };

        let mut dsmc = None;
        if regime == Regime::Dsmc {
            if cfg.case == Case::Sod {
                return Err(invalid("case", "the sod case is not available for dsmc"));
            }
            let d = cfg.dsmc.expect("defaults filled");
            let mut dc = DsmcConfig::new(ic, cfg.sample_times.clone());
            dc.half_length = d.half_length;
            dc.cells_per_lambda = d.cells_per_lambda;
            dc.particles_per_cell = d.particles_per_cell;
            dc.dt = d.dt;
            dc.replicas = d.replicas;
            dc.seed = cfg.seed;
            dc.collisions = d.collisions;
            dc.bins = BinSpec {
                width: d.bin_width,
                growth: d.bin_growth,
            };
            dc.validate(&gm).map_err(|e| invalid("dsmc", e))?;
            dsmc = Some(dc);
        }
        let mut scheme = None;
        let mut max_steps = 0;
        if regime == Regime::Fvm {
            let f = cfg.fvm.expect("defaults filled");
            let s = SchemeConfig {
                flux: f.flux,
                limiter: f.limiter,
                cfl: f.cfl,
                gks: GksParams { c_jump: f.c_jump },
            };
            s.validate().map_err(|e| invalid("fvm", e))?;
            if f.flux == FluxKind::Gks && gm.mu_ref == 0.0 && f.c_jump == 0.0 {
                return Err(invalid(
                    "fvm.c_jump",
                    "an inviscid gas with c_jump = 0 gives a zero collision time",
                ));
            }
            scheme = Some(s);
            max_steps = f.max_steps;
        }
        Ok(Resolved {
            gm,
            ic,
            scales,
            dsmc,
            scheme,
            max_steps,
            grid,
            config: cfg,
        })
    }
}

fn self_gas(g: &GasSection) -> GasModel {
    GasModel {
        r: g.r.unwrap_or(f64::NAN),
        gamma: g.gamma.unwrap_or(f64::NAN),
        mass: g.mass.unwrap_or(f64::NAN),
        d_ref: g.d_ref.unwrap_or(f64::NAN),
        t_ref: g.t_ref.unwrap_or(f64::NAN),
        omega: g.omega.unwrap_or(f64::NAN),
        mu_ref: g.mu_ref.unwrap_or(0.0),
    }
}

/// Everything a run needs, validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub gm: GasModel,
    pub ic: DiscontinuityIC,
    /// `None` for the sod case, which is posed in its own units.
    pub scales: Option<ReferenceScales>,
    pub dsmc: Option<DsmcConfig>,
    pub scheme: Option<SchemeConfig>,
    pub max_steps: usize,
    pub grid: GridSection,
    pub config: ExperimentConfig,
}

impl Resolved {
    pub fn regime(&self) -> Regime {
        self.config.regime.expect("resolved")
    }

    /// Metres per unit of `x` and seconds per unit of `t`.
    pub fn unit_lengths(&self) -> (f64, f64) {
        self.scales.map_or((1.0, 1.0), |s| (s.mean_free_path, s.collision_time))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "case = \"contact\"\nstrength = 8.0\nsample_times = [0.25, 0.5, 1.0]\n";

    #[test]
    fn minimal_contact_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.gas.as_ref().unwrap().preset, GasPreset::Argon);
        let r = cfg.resolve(Regime::Freemol).unwrap();
        assert_eq!(r.gm, GasModel::argon());
        assert!((r.ic.temperature_ratio() - 8.0).abs() < 1e-12);
        assert!(r.scales.is_some());
    }

    #[test]
    fn resolved_config_round_trips() {
        let r = parse_config(MINIMAL).unwrap().resolve(Regime::Dsmc).unwrap();
        let text = toml::to_string(&r.config).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, r.config);
    }

    #[test]
    fn subsonic_shock_is_rejected() {
        let text = "case = \"shock\"\nstrength = 0.5\nsample_times = [1.0]\n";
        let err = parse_config(text).unwrap().resolve(Regime::Freemol).unwrap_err();
        assert!(err.0.contains("strength") && err.0.contains("exceed 1"), "{err}");
    }

    #[test]
    fn unknown_keys_are_named_with_their_line() {
        let err = parse_config(&format!("{MINIMAL}foo = 3\n")).unwrap_err();
        assert!(err.0.contains("foo"), "{err}");
        assert!(err.0.contains("line 4"), "{err}");
        let err = parse_config(&format!("{MINIMAL}[dsmc]\nreplicas = 2\nbogus = true\n")).unwrap_err();
        assert!(err.0.contains("bogus"), "{err}");
    }

    #[test]
    fn type_mismatch_and_missing_keys() {
        let err = parse_config("case = \"contact\"\nstrength = \"high\"\nsample_times = [1.0]\n").unwrap_err();
        assert!(err.0.contains("strength"), "{err}");
        assert!(parse_config("strength = 2.0\nsample_times = [1.0]\n")
            .unwrap_err()
            .0
            .contains("case"));
        let err = parse_config("case = \"contact\"\nsample_times = [1.0]\n")
            .unwrap()
            .resolve(Regime::Freemol)
            .unwrap_err();
        assert!(err.0.contains("strength"));
    }

    #[test]
    fn regime_conflicts_and_bad_sections() {
        let text = format!("regime = \"dsmc\"\n{MINIMAL}");
        assert!(parse_config(&text).unwrap().resolve(Regime::Fvm).is_err());
        let sod = "case = \"sod\"\nsample_times = [0.2]\n";
        assert!(parse_config(sod).unwrap().resolve(Regime::Dsmc).is_err());
        let r = parse_config(sod).unwrap().resolve(Regime::Fvm).unwrap();
        assert_eq!(r.grid.points, 400);
        assert!(r.scales.is_none());
        let bad_dt = format!("{MINIMAL}[dsmc]\ndt = 0.5\n");
        assert!(parse_config(&bad_dt).unwrap().resolve(Regime::Dsmc).is_err());
        let decreasing = "case = \"contact\"\nstrength = 2.0\nsample_times = [1.0, 0.5]\n";
        assert!(parse_config(decreasing).unwrap().resolve(Regime::Freemol).is_err());
    }

    #[test]
    fn custom_case_reads_its_states() {
        let text = "case = \"custom\"\nsample_times = [1.0]\n[custom]\nleft_rho = 1e-4\nleft_u = 100.0\nleft_temperature = 300.0\nright_rho = 2e-4\nright_u = 0.0\nright_temperature = 300.0\n";
        let r = parse_config(text).unwrap().resolve(Regime::Riemann).unwrap();
        assert_eq!(r.ic.left.u, 100.0);
        assert!(parse_config("case = \"custom\"\nsample_times = [1.0]\n")
            .unwrap()
            .resolve(Regime::Riemann)
            .is_err());
    }
}
