//! Run configuration: defaults, a flat `key=value` file, and flag overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qpc_core::{CocycleParams, PotentialFn, GOLDEN_OMEGA};
use qpc_induction::Mode;
use thiserror::Error;

/// Version string embedded in every output.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Errors surfaced to the command line.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration values; exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    /// A computation or I/O step failed; exit code 1.
    #[error("{0}")]
    Run(String),
}

impl CliError {
    /// Process exit code for this error.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Run(_) => 1,
        }
    }
}

/// Which schedule the construction uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeName {
    /// Paper constants.
    Paper,
    /// Toy schedule.
    Toy,
}

/// Every knob of a run. Keys in files and flags share the names listed in
/// [`RunConfig::KEYS`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Coupling `λ`.
    pub lambda: f64,
    /// Single energy for `probe`, `induct`, `orbit` and `operator-eigs`.
    pub energy: Option<f64>,
    /// Lower end of the energy grid; defaults to the critical window.
    pub e_min: Option<f64>,
    /// Upper end of the energy grid; defaults to the critical window.
    pub e_max: Option<f64>,
    /// Number of grid energies.
    pub e_grid: usize,
    /// `golden` or a decimal in `[0, 1)`.
    pub omega: String,
    /// `cos` or a path to a file of `k a_k b_k` lines.
    pub potential: String,
    /// Diophantine constant `κ`.
    pub kappa: f64,
    /// Diophantine exponent `τ`.
    pub tau: f64,
    /// Main size: orbit length, truncation size, or number of scales,
    /// depending on the command.
    pub n: Option<usize>,
    /// Phase samples per energy.
    pub samples: Option<usize>,
    /// Seed for the starting phase of `orbit`.
    pub seed: u64,
    /// Schedule of the construction.
    pub mode: ModeName,
    /// `K_0` of the toy schedule.
    pub toy_k0: u64,
    /// Growth exponent of the toy schedule.
    pub toy_growth: f64,
    /// Probe grid per arc.
    pub grid: usize,
    /// Starting phase; drawn from `seed` when absent.
    pub theta0: Option<f64>,
    /// Starting slope of `orbit`; `λ^{3/4}` when absent.
    pub r0: Option<f64>,
    /// Truncation size for density-of-states evaluations.
    pub trunc: usize,
    /// Output path; standard output when absent.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda: 100.0,
            energy: None,
            e_min: None,
            e_max: None,
            e_grid: 200,
            omega: "golden".into(),
            potential: "cos".into(),
            kappa: 0.38,
            tau: 1.0,
            n: None,
            samples: None,
            seed: 0,
            mode: ModeName::Toy,
            toy_k0: 4,
            toy_growth: 1.5,
            grid: 2000,
            theta0: None,
            r0: None,
            trunc: 2000,
            out: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse {key}={value}")))
}

impl RunConfig {
    /// Recognised keys, in the order they are written back.
    pub const KEYS: [&'static str; 20] = [
        "lambda", "energy", "e-min", "e-max", "e-grid", "omega", "potential", "kappa", "tau", "n", "samples", "seed",
        "mode", "toy-k0", "toy-growth", "grid", "theta0", "r0", "trunc", "out",
    ];

    /// Set one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "lambda" => self.lambda = parse(key, v)?,
            "energy" => self.energy = Some(parse(key, v)?),
            "e-min" => self.e_min = Some(parse(key, v)?),
            "e-max" => self.e_max = Some(parse(key, v)?),
            "e-grid" => self.e_grid = parse(key, v)?,
            "omega" => self.omega = v.to_string(),
            "potential" => self.potential = v.to_string(),
            "kappa" => self.kappa = parse(key, v)?,
            "tau" => self.tau = parse(key, v)?,
            "n" => self.n = Some(parse(key, v)?),
            "samples" => self.samples = Some(parse(key, v)?),
            "seed" => self.seed = parse(key, v)?,
            "mode" => {
                self.mode = match v {
                    "paper" => ModeName::Paper,
                    "toy" => ModeName::Toy,
                    _ => return Err(CliError::Usage(format!("mode must be paper or toy, got {v}"))),
                }
            }
            "toy-k0" => self.toy_k0 = parse(key, v)?,
            "toy-growth" => self.toy_growth = parse(key, v)?,
            "grid" => self.grid = parse(key, v)?,
            "theta0" => self.theta0 = Some(parse(key, v)?),
            "r0" => self.r0 = Some(parse(key, v)?),
            "trunc" => self.trunc = parse(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err(CliError::Usage(format!("unknown key {key}"))),
        }
        Ok(())
    }

    /// Apply a flat `key=value` text. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// The configuration as ordered key/value pairs. Unset optional keys
    /// and the output path are omitted, so that the same run written to a
    /// different place embeds the same text.
    #[must_use]
    pub fn entries(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k, v);
            }
        };
        let f = |x: f64| Some(format!("{x:?}"));
        put("lambda", f(self.lambda));
        put("energy", self.energy.and_then(f));
        put("e-min", self.e_min.and_then(f));
        put("e-max", self.e_max.and_then(f));
        put("e-grid", Some(self.e_grid.to_string()));
        put("omega", Some(self.omega.clone()));
        put("potential", Some(self.potential.clone()));
        put("kappa", f(self.kappa));
        put("tau", f(self.tau));
        put("n", self.n.map(|x| x.to_string()));
        put("samples", self.samples.map(|x| x.to_string()));
        put("seed", Some(self.seed.to_string()));
        put(
            "mode",
            Some(match self.mode {
                ModeName::Paper => "paper".into(),
                ModeName::Toy => "toy".into(),
            }),
        );
        put("toy-k0", Some(self.toy_k0.to_string()));
        put("toy-growth", f(self.toy_growth));
        put("grid", Some(self.grid.to_string()));
        put("theta0", self.theta0.and_then(f));
        put("r0", self.r0.and_then(f));
        put("trunc", Some(self.trunc.to_string()));
        m
    }

    /// `key=value` lines in the order of [`Self::KEYS`].
    #[must_use]
    pub fn to_text(&self) -> String {
        let e = self.entries();
        Self::KEYS
            .iter()
            .filter_map(|k| e.get(k).map(|v| format!("{k}={v}\n")))
            .collect()
    }

    /// `ω` as a number.
    pub fn omega_value(&self) -> Result<f64, CliError> {
        if self.omega == "golden" {
            Ok(GOLDEN_OMEGA)
        } else {
            parse("omega", &self.omega)
        }
    }

    fn potential_fn(&self) -> Result<PotentialFn, CliError> {
        if self.potential == "cos" {
            return Ok(PotentialFn::cosine());
        }
        let text = std::fs::read_to_string(&self.potential)
            .map_err(|e| CliError::Usage(format!("cannot read potential file {}: {e}", self.potential)))?;
        PotentialFn::parse_fourier(&text).map_err(|e| CliError::Usage(format!("potential file {}: {e}", self.potential)))
    }

    /// Validated cocycle parameters at energy `energy` (or `0` when unset).
    pub fn params(&self) -> Result<CocycleParams, CliError> {
        CocycleParams::new(
            self.lambda,
            self.energy.unwrap_or(0.0),
            self.omega_value()?,
            self.potential_fn()?,
            self.kappa,
            self.tau,
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }

    /// The construction schedule.
    #[must_use]
    pub fn induction_mode(&self) -> Mode {
        match self.mode {
            ModeName::Paper => Mode::PaperConstants,
            ModeName::Toy => Mode::Toy {
                k0: self.toy_k0,
                growth: self.toy_growth,
            },
        }
    }

    /// `n`, or `default` when unset; zero is a usage error.
    pub fn n_or(&self, default: usize) -> Result<usize, CliError> {
        match self.n {
            Some(0) => Err(CliError::Usage("--n must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }

    /// `samples`, or `default` when unset; zero is a usage error.
    pub fn samples_or(&self, default: usize) -> Result<usize, CliError> {
        match self.samples {
            Some(0) => Err(CliError::Usage("--samples must be at least 1".into())),
            Some(s) => Ok(s),
            None => Ok(default),
        }
    }

    /// The single energy, required by some commands.
    pub fn single_energy(&self) -> Result<f64, CliError> {
        self.energy.ok_or_else(|| CliError::Usage("--energy is required".into()))
    }

    /// `e_grid` equispaced energies over `[e_min, e_max]`, which default to
    /// the window `[λ f_min − 2λ^{3/4}, λ f_max + 2λ^{3/4}]`.
    pub fn energy_grid(&self, params: &CocycleParams) -> Result<Vec<f64>, CliError> {
        let (lo, hi) = params.energy_window();
        let lo = self.e_min.unwrap_or(lo);
        let hi = self.e_max.unwrap_or(hi);
        if self.e_grid == 0 {
            return Err(CliError::Usage("--e-grid must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(CliError::Usage(format!("energy range [{lo}, {hi}] is empty")));
        }
        if self.e_grid == 1 {
            return Ok(vec![0.5 * (lo + hi)]);
        }
        let step = (hi - lo) / (self.e_grid - 1) as f64;
        Ok((0..self.e_grid).map(|i| lo + i as f64 * step).collect())
    }
}
