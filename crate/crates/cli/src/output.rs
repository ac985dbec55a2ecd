//! CSV and manifest files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use kinflow::diagnostics::{Plateaus, Profile, Source, Units};

use crate::config::ExperimentConfig;
use crate::run::DiagnosticsRow;

pub const PROFILE_HEADER: &str = "x_over_lambda1,rho,rho_star,U,Tn,Tx,Ttot";
pub const DIAGNOSTICS_HEADER: &str = "t_over_tau1,thickness,overshoot,undershoot,Tx_minus_Tn_max";
pub const MANIFEST: &str = "manifest.toml";
pub const DIAGNOSTICS: &str = "diagnostics.csv";

/// 17 significant digits; missing values become empty cells.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn profile_file_name(index: usize) -> String {
    format!("profile_{index:03}.csv")
}

pub fn profile_csv(p: &Profile, plateaus: &Plateaus) -> String {
    let mut s = String::with_capacity(128 * (p.len() + 1));
    s.push_str(PROFILE_HEADER);
    s.push('\n');
    for i in 0..p.len() {
        let cells = [
            p.x[i],
            p.rho[i],
            plateaus.normalise(p.rho[i]),
            p.u[i],
            p.tn[i],
            p.tx[i],
            p.ttot[i],
        ];
        let row: Vec<String> = cells.iter().map(|&v| num(v)).collect();
        writeln!(s, "{}", row.join(",")).expect("writing to a string");
    }
    s
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in rows {
        let cells = [r.t, r.thickness, r.overshoot, r.undershoot, r.tx_minus_tn_max];
        let row: Vec<String> = cells.iter().map(|&v| num(v)).collect();
        writeln!(s, "{}", row.join(",")).expect("writing to a string");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub file: String,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestInfo {
    pub kinflow_version: String,
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub diagnostics: String,
    pub profiles: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest: ManifestInfo,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Reads a profile CSV written by [`profile_csv`].
pub fn read_profile_csv(text: &str, t: f64, units: Units, source: Source) -> Result<Profile, String> {
    let mut lines = text.lines();
    if lines.next() != Some(PROFILE_HEADER) {
        return Err(format!("expected header `{PROFILE_HEADER}`"));
    }
    let mut cols: [Vec<f64>; 7] = Default::default();
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 7 {
            return Err(format!("line {}: expected 7 columns, got {}", k + 2, cells.len()));
        }
        for (col, cell) in cols.iter_mut().zip(cells) {
            let v = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse::<f64>()
                    .map_err(|e| format!("line {}: `{cell}`: {e}", k + 2))?
            };
            col.push(v);
        }
    }
    let [x, rho, _, u, tn, tx, ttot] = cols;
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
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_and_missing_cells_are_empty() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(num(f64::NAN), "");
    }

    #[test]
    fn profile_csv_round_trips() {
        let p = Profile::new(
            vec![-1.0, 0.0, 1.0],
            vec![2.0, f64::NAN, 1.0],
            vec![0.0, 0.1, 0.2],
            vec![300.0, 310.0, 320.0],
            vec![301.0, 311.0, 321.0],
            1.0,
            Units::Reference,
            Source::Dsmc,
        )
        .unwrap();
        let pl = Plateaus { left: 2.0, right: 1.0 };
        let text = profile_csv(&p, &pl);
        assert!(text.starts_with(PROFILE_HEADER));
        assert!(text.lines().nth(2).unwrap().contains(",,"));
        let back = read_profile_csv(&text, 1.0, Units::Reference, Source::Dsmc).unwrap();
        assert_eq!(back.x, p.x);
        assert!(back.rho[1].is_nan());
        assert_eq!(back.tx, p.tx);
        assert_eq!(profile_csv(&back, &pl), text);
        assert!(read_profile_csv("a,b\n", 1.0, Units::Reference, Source::Dsmc).is_err());
    }
}
