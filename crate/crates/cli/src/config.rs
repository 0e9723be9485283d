//! Run configuration: TOML file sections, flag overrides, validation and hashing.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use cutofflab::verify::{Preset, Tolerances};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Warping function and ball volumes of a model manifold.
    Geometry,
    /// Cut-off functions over a sweep of plateau radii.
    Cutoff,
    /// Logarithmic gradient bound for `Δω = ω / r^alpha` over a sweep of inner radii.
    Lyau,
    /// Porous-medium or fast-diffusion run from a bump.
    Diffusion,
    /// Acceptance suite with JSON and Markdown reports.
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Geometry => "geometry",
            Command::Cutoff => "cutoff",
            Command::Lyau => "lyau",
            Command::Diffusion => "diffusion",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Full,
    Flat,
}

/// Parameters accepted on the command line and in config sections; all optional.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Curvature decay exponent, in [-2, 2].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Curvature scale, >= 0.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Manifold dimension, in [2, 64].
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Support-to-plateau radius ratio, > 1.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Comma-separated radii.
    #[arg(long = "R", global = true, value_delimiter = ',')]
    #[serde(rename = "R")]
    pub radii: Option<Vec<f64>>,
    /// Diffusion exponent, in (0, 10] and not 1.
    #[arg(long, global = true)]
    pub m: Option<f64>,
    /// Grid intervals or mesh cells.
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    /// Time step.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Outer radius of the diffusion mesh.
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    /// Height of the initial bump.
    #[arg(long, global = true)]
    pub amplitude: Option<f64>,
    /// Radius of the initial bump.
    #[arg(long, global = true)]
    pub width: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Acceptance preset.
    #[arg(long, global = true, value_enum)]
    #[serde(skip)]
    pub preset: Option<PresetArg>,
    #[serde(rename = "preset")]
    #[arg(skip)]
    pub preset_name: Option<String>,
}

/// Tolerance overrides for the acceptance suite.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct TolFlags {
    #[arg(long = "tol-warping", global = true)]
    pub warping: Option<f64>,
    #[arg(long = "tol-sinh", global = true)]
    pub sinh: Option<f64>,
    #[arg(long = "tol-sturm", global = true)]
    pub sturm: Option<f64>,
    #[arg(long = "tol-power", global = true)]
    pub power: Option<f64>,
    #[arg(long = "tol-bessel", global = true)]
    pub bessel: Option<f64>,
    #[arg(long = "tol-spread", global = true)]
    pub spread: Option<f64>,
    #[arg(long = "tol-decay", global = true)]
    pub decay: Option<f64>,
    #[arg(long = "tol-cutoff", global = true)]
    pub cutoff: Option<f64>,
    #[arg(long = "tol-sandwich", global = true)]
    pub sandwich: Option<f64>,
    #[arg(long = "tol-theta", global = true)]
    pub theta: Option<f64>,
    #[arg(long = "tol-mass", global = true)]
    pub mass: Option<f64>,
    #[arg(long = "tol-identical", global = true)]
    pub identical: Option<f64>,
    #[arg(long = "tol-order-allowance", global = true)]
    pub order_allowance: Option<f64>,
}

impl TolFlags {
    fn apply(&self, t: &mut Tolerances) {
        let pairs = [
            (self.warping, &mut t.warping),
            (self.sinh, &mut t.sinh),
            (self.sturm, &mut t.sturm),
            (self.power, &mut t.power),
            (self.bessel, &mut t.bessel),
            (self.spread, &mut t.spread),
            (self.decay, &mut t.decay),
            (self.cutoff, &mut t.cutoff),
            (self.sandwich, &mut t.sandwich),
            (self.theta, &mut t.theta),
            (self.mass, &mut t.mass),
            (self.identical, &mut t.identical),
            (self.order_allowance, &mut t.order_allowance),
        ];
        for (flag, slot) in pairs {
            if let Some(v) = flag {
                *slot = v;
            }
        }
    }
}

/// Contents of a config file: shared keys at the top, one section per subcommand.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub geometry: Params,
    pub cutoff: Params,
    pub lyau: Params,
    pub diffusion: Params,
    #[serde(rename = "verify-all")]
    pub verify_all: Params,
    pub tolerances: Option<Tolerances>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    fn section(&self, cmd: Command) -> &Params {
        match cmd {
            Command::Geometry => &self.geometry,
            Command::Cutoff => &self.cutoff,
            Command::Lyau => &self.lyau,
            Command::Diffusion => &self.diffusion,
            Command::VerifyAll => &self.verify_all,
        }
    }
}

/// Fully resolved parameters of one run; serialized for the hash and `config.toml`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub seed: u64,
    pub alpha: f64,
    pub kappa: f64,
    pub d: usize,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub radii: Vec<f64>,
    pub m: f64,
    pub grid_n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub r_max: f64,
    pub amplitude: f64,
    pub width: f64,
    pub preset: Preset,
    pub tolerances: Tolerances,
}

fn defaults(cmd: Command) -> RunConfig {
    let (alpha, kappa, gamma, radii) = match cmd {
        Command::Lyau => (1.0, 1.0, 2.0, vec![2.0, 4.0, 8.0, 16.0]),
        Command::Diffusion => (0.0, 0.0, 2.0, vec![4.0, 8.0]),
        _ => (2.0, 1.0, 1.5, vec![1.0, 2.0, 4.0, 8.0, 16.0]),
    };
    RunConfig {
        subcommand: cmd.name().into(),
        seed: cutofflab::verify::SuiteConfig::default().seed,
        alpha,
        kappa,
        d: 3,
        gamma,
        radii,
        m: 2.0,
        grid_n: if cmd == Command::Diffusion { 200 } else { 2000 },
        dt: 0.01,
        horizon: 1.0,
        r_max: 8.0,
        amplitude: 1.0,
        width: 1.0,
        preset: Preset::Full,
        tolerances: Tolerances::default(),
    }
}

fn overlay(cfg: &mut RunConfig, p: &Params) -> Result<(), CliError> {
    macro_rules! take {
        ($($f:ident),*) => {$(if let Some(v) = p.$f.clone() { cfg.$f = v; })*};
    }
    take!(alpha, kappa, d, gamma, radii, m, grid_n, dt, horizon, r_max, amplitude, width, seed);
    if let Some(pr) = p.preset {
        cfg.preset = match pr {
            PresetArg::Full => Preset::Full,
            PresetArg::Flat => Preset::Flat,
        };
    }
    if let Some(name) = &p.preset_name {
        cfg.preset = match name.as_str() {
            "full" => Preset::Full,
            "flat" => Preset::Flat,
            other => return Err(CliError::Config(format!("preset must be one of full, flat; got {other:?}"))),
        };
    }
    Ok(())
}

/// Defaults, then the config file (shared keys, then the subcommand section), then flags.
pub fn resolve(cmd: Command, file: &FileConfig, flags: &Params, tol: &TolFlags) -> Result<RunConfig, CliError> {
    let mut cfg = defaults(cmd);
    if let Some(s) = file.seed {
        cfg.seed = s;
    }
    if let Some(t) = file.tolerances {
        cfg.tolerances = t;
    }
    overlay(&mut cfg, file.section(cmd))?;
    overlay(&mut cfg, flags)?;
    tol.apply(&mut cfg.tolerances);
    validate(&cfg, cmd)?;
    Ok(cfg)
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64, range: &str) -> Result<(), CliError> {
    if v.is_finite() && v >= lo && v <= hi {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} = {v} is outside the allowed range {range}")))
    }
}

pub fn validate(cfg: &RunConfig, cmd: Command) -> Result<(), CliError> {
    in_range("alpha", cfg.alpha, -2.0, 2.0, "[-2, 2]")?;
    in_range("kappa", cfg.kappa, 0.0, 1e6, "[0, 1e6]")?;
    in_range("d", cfg.d as f64, 2.0, 64.0, "{2, ..., 64}")?;
    in_range("grid-n", cfg.grid_n as f64, 16.0, 1e7, "{16, ..., 10^7}")?;
    if !(cfg.gamma > 1.0 && cfg.gamma <= 1e3) {
        return Err(CliError::Config(format!("gamma = {} is outside the allowed range (1, 1000]", cfg.gamma)));
    }
    if cfg.radii.is_empty() || cfg.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(CliError::Config(format!("R = {:?} must be a non-empty list of positive radii", cfg.radii)));
    }
    for (name, v) in [("dt", cfg.dt), ("horizon", cfg.horizon), ("r-max", cfg.r_max), ("amplitude", cfg.amplitude), ("width", cfg.width)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("{name} = {v} is outside the allowed range (0, inf)")));
        }
    }
    if cmd == Command::Diffusion {
        if !(cfg.m > 0.0 && cfg.m <= 10.0) || cfg.m == 1.0 {
            return Err(CliError::Config(format!("m = {} is outside the allowed range (0, 1) or (1, 10]", cfg.m)));
        }
        if cfg.width >= cfg.r_max {
            return Err(CliError::Config(format!("width = {} must be below r-max = {}", cfg.width, cfg.r_max)));
        }
    }
    Ok(())
}

impl RunConfig {
    /// SHA-256 of the canonical JSON form, in hex.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn suite(&self) -> cutofflab::verify::SuiteConfig {
        cutofflab::verify::SuiteConfig {
            seed: self.seed,
            preset: self.preset,
            tol: self.tolerances,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_sections() {
        let file: FileConfig = toml::from_str("seed = 5\n[cutoff]\nalpha = 1.0\ngamma = 3.0\n[tolerances]\nspread = 5.0\n").unwrap();
        let flags = Params {
            gamma: Some(2.5),
            ..Params::default()
        };
        let cfg = resolve(Command::Cutoff, &file, &flags, &TolFlags::default()).unwrap();
        assert_eq!((cfg.seed, cfg.alpha, cfg.gamma), (5, 1.0, 2.5));
        assert_eq!(cfg.tolerances.spread, 5.0);
        assert_eq!(cfg.tolerances.power, Tolerances::default().power);
    }

    #[test]
    fn out_of_range_alpha_names_the_range() {
        let flags = Params {
            alpha: Some(3.0),
            ..Params::default()
        };
        let err = resolve(Command::Geometry, &FileConfig::default(), &flags, &TolFlags::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("[-2, 2]"));
    }

    #[test]
    fn unit_exponent_is_rejected_for_diffusion() {
        let flags = Params {
            m: Some(1.0),
            ..Params::default()
        };
        assert!(resolve(Command::Diffusion, &FileConfig::default(), &flags, &TolFlags::default()).is_err());
        assert!(resolve(Command::Geometry, &FileConfig::default(), &flags, &TolFlags::default()).is_ok());
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = defaults(Command::Cutoff);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.tolerances.theta = 1e-9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_and_presets_are_config_errors() {
        assert!(toml::from_str::<FileConfig>("[cutoff]\nbeta = 1.0\n").is_err());
        let file: FileConfig = toml::from_str("[verify-all]\npreset = \"round\"\n").unwrap();
        assert!(resolve(Command::VerifyAll, &file, &Params::default(), &TolFlags::default()).is_err());
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let cfg = defaults(Command::Diffusion);
        let text = cfg.to_toml();
        assert!(text.contains("subcommand = \"diffusion\""));
        assert!(text.contains("[tolerances]"));
    }
}
