//! Flat `[section]` / `key = value` run configuration.
//!
//! Grammar: one `key = value` per line; `[name]` opens a section; text after
//! `#` is a comment; blank lines are ignored. Every key belongs to a section.
//! Lists are comma-separated. Unknown sections or keys are rejected with the
//! offending line number. Overrides `section.key=value` are applied after the
//! file and take precedence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrator::{init_random_divfree, init_taylor_green, SchemeOrder, SimParams};
use crate::nonlinearity::{ClipMode, ClipPolicy, DampingParams, EXP_ARG_LIMIT};
use crate::spectral::{max_trunc_radius, Grid, SpectralVectorField};

const KNOWN: &[(&str, &[&str])] = &[
    ("grid", &["n_points", "box_scale", "trunc_radius"]),
    ("sim", &["nu", "dt", "t_end", "output_every", "scheme_order"]),
    ("damping", &["a", "b", "r", "v_max", "clip_mode"]),
    ("initial", &["kind", "amplitude", "seed", "cutoff", "path"]),
    ("output", &["directory", "snapshot_every"]),
    ("stability", &["delta_kind", "delta_rel", "delta_seed"]),
    ("decay", &["kappa"]),
    ("sweep", &["r_values", "trunc_radii"]),
    ("verify", &["energy_tol"]),
];

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub n_points: usize,
    pub box_scale: f64,
    pub trunc_radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    TaylorGreen { amplitude: f64 },
    Random { seed: u64, cutoff: f64, amplitude: f64 },
    Snapshot { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaKind {
    /// `delta = delta_rel·u0`.
    Scaled,
    /// Random divergence-free field with `‖delta‖ = delta_rel·‖u0‖`.
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityConfig {
    pub delta_kind: DeltaKind,
    pub delta_rel: f64,
    pub delta_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub r_values: Vec<f64>,
    /// Empty means the grid's own radius only.
    pub trunc_radii: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub sim: SimParams,
    pub initial: InitialCondition,
    pub output_dir: PathBuf,
    pub stability: StabilityConfig,
    pub kappa: f64,
    pub sweep: SweepConfig,
    pub energy_tol: f64,
}

struct Entry {
    value: String,
    line: Option<usize>,
}

struct Table {
    entries: BTreeMap<(String, String), Entry>,
}

impl Table {
    fn take(&mut self, section: &str, key: &str) -> Option<Entry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn parse<T: FromStr>(&mut self, section: &str, key: &str, default: Option<T>) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(section, key) {
            Some(e) => e.value.parse::<T>().map_err(|err| Error::Config {
                line: e.line,
                message: format!("{section}.{key}: cannot parse `{}`: {err}", e.value),
            }),
            None => default.ok_or_else(|| Error::Config {
                line: None,
                message: format!("missing required key {section}.{key}"),
            }),
        }
    }

    fn list(&mut self, section: &str, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        let Some(e) = self.take(section, key) else {
            return Ok(default);
        };
        e.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|err| Error::Config {
                    line: e.line,
                    message: format!("{section}.{key}: cannot parse `{s}`: {err}"),
                })
            })
            .collect()
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .and_then(|e| e.line)
    }
}

fn check_known(section: &str, key: &str, line: Option<usize>) -> Result<()> {
    let keys = KNOWN
        .iter()
        .find(|(s, _)| *s == section)
        .map(|(_, k)| *k)
        .ok_or_else(|| Error::Config {
            line,
            message: format!("unknown section `{section}`"),
        })?;
    if !keys.contains(&key) {
        return Err(Error::Config {
            line,
            message: format!("unknown key `{key}` in section [{section}]"),
        });
    }
    Ok(())
}

fn tokenize(text: &str, overrides: &[String]) -> Result<Table> {
    let mut entries = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Config {
                line: Some(line),
                message: format!("malformed section header `{content}`"),
            })?;
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line: Some(line),
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let sec = section.clone().ok_or_else(|| Error::Config {
            line: Some(line),
            message: "key outside of any [section]".into(),
        })?;
        let key = key.trim().to_string();
        check_known(&sec, &key, Some(line))?;
        let prev = entries.insert(
            (sec.clone(), key.clone()),
            Entry {
                value: value.trim().to_string(),
                line: Some(line),
            },
        );
        if prev.is_some() {
            return Err(Error::Config {
                line: Some(line),
                message: format!("duplicate key {sec}.{key}"),
            });
        }
    }
    for ov in overrides {
        let (path, value) = ov.split_once('=').ok_or_else(|| Error::Config {
            line: None,
            message: format!("override `{ov}` is not of the form section.key=value"),
        })?;
        let (sec, key) = path.trim().split_once('.').ok_or_else(|| Error::Config {
            line: None,
            message: format!("override key `{path}` is not of the form section.key"),
        })?;
        check_known(sec, key, None)?;
        entries.insert(
            (sec.to_string(), key.to_string()),
            Entry {
                value: value.trim().to_string(),
                line: None,
            },
        );
    }
    Ok(Table { entries })
}

fn invalid(line: Option<usize>, e: Error) -> Error {
    Error::Config {
        line,
        message: e.to_string(),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

/// Like [`parse_config`], with `section.key=value` overrides applied on top.
pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut t = tokenize(text, overrides)?;

    let n_points: usize = t.parse("grid", "n_points", None)?;
    let box_scale: f64 = t.parse("grid", "box_scale", Some(1.0))?;
    let radius_line = t.line_of("grid", "trunc_radius");
    let trunc_radius: f64 = t.parse("grid", "trunc_radius", Some(max_trunc_radius(n_points, box_scale)))?;
    Grid::new(n_points, box_scale, trunc_radius).map_err(|e| invalid(radius_line, e))?;

    let nu: f64 = t.parse("sim", "nu", Some(1.0))?;
    let dt: f64 = t.parse("sim", "dt", Some(1e-3))?;
    let t_end: f64 = t.parse("sim", "t_end", Some(1.0))?;
    let output_every: usize = t.parse("sim", "output_every", Some(10))?;
    let order_line = t.line_of("sim", "scheme_order");
    let order: u8 = t.parse("sim", "scheme_order", Some(2))?;
    let scheme_order = SchemeOrder::try_from(order).map_err(|e| invalid(order_line, e))?;

    let dline = t.line_of("damping", "a").or(t.line_of("damping", "b")).or(t.line_of("damping", "r"));
    let a: f64 = t.parse("damping", "a", Some(1.0))?;
    let b: f64 = t.parse("damping", "b", Some(1.0))?;
    let r: f64 = t.parse("damping", "r", Some(4.0))?;
    let damping = DampingParams::new(a, b, r).map_err(|e| invalid(dline, e))?;
    let vline = t.line_of("damping", "v_max");
    let v_max: f64 = t.parse("damping", "v_max", Some((EXP_ARG_LIMIT / b).powf(1.0 / r)))?;
    let mline = t.line_of("damping", "clip_mode");
    let mode = match t.take("damping", "clip_mode") {
        None => ClipMode::Saturate,
        Some(e) => match e.value.as_str() {
            "saturate" => ClipMode::Saturate,
            "error" => ClipMode::Error,
            other => {
                return Err(Error::Config {
                    line: mline,
                    message: format!("damping.clip_mode must be `saturate` or `error`, got `{other}`"),
                })
            }
        },
    };
    let clip = ClipPolicy::new(v_max, mode, &damping).map_err(|e| invalid(vline, e))?;

    let snapshot_every: usize = t.parse("output", "snapshot_every", Some(0))?;
    let output_dir: PathBuf = t.parse("output", "directory", Some(PathBuf::from("out")))?;
    let sim = SimParams {
        nu,
        damping,
        clip,
        dt,
        t_end,
        output_every,
        scheme_order,
        snapshot_every,
    };
    sim.validate().map_err(|e| invalid(None, e))?;

    let kline = t.line_of("initial", "kind");
    let kind: String = t.parse("initial", "kind", Some("taylor_green".to_string()))?;
    let initial = match kind.as_str() {
        "taylor_green" => InitialCondition::TaylorGreen {
            amplitude: t.parse("initial", "amplitude", Some(1.0))?,
        },
        "random" => InitialCondition::Random {
            seed: t.parse("initial", "seed", Some(0))?,
            cutoff: t.parse("initial", "cutoff", Some(trunc_radius))?,
            amplitude: t.parse("initial", "amplitude", Some(1.0))?,
        },
        "snapshot" => InitialCondition::Snapshot {
            path: t.parse("initial", "path", None)?,
        },
        other => {
            return Err(Error::Config {
                line: kline,
                message: format!("initial.kind must be taylor_green, random or snapshot, got `{other}`"),
            })
        }
    };
    for key in ["amplitude", "seed", "cutoff", "path"] {
        if let Some(e) = t.take("initial", key) {
            return Err(Error::Config {
                line: e.line,
                message: format!("initial.{key} does not apply to kind `{kind}`"),
            });
        }
    }

    let dkline = t.line_of("stability", "delta_kind");
    let delta_kind = match t.parse("stability", "delta_kind", Some("scaled".to_string()))?.as_str() {
        "scaled" => DeltaKind::Scaled,
        "random" => DeltaKind::Random,
        other => {
            return Err(Error::Config {
                line: dkline,
                message: format!("stability.delta_kind must be scaled or random, got `{other}`"),
            })
        }
    };
    let stability = StabilityConfig {
        delta_kind,
        delta_rel: t.parse("stability", "delta_rel", Some(1e-3))?,
        delta_seed: t.parse("stability", "delta_seed", Some(1))?,
    };
    let kappa_line = t.line_of("decay", "kappa");
    let kappa: f64 = t.parse("decay", "kappa", Some(1.0))?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Config {
            line: kappa_line,
            message: format!("decay.kappa must be > 0, got {kappa}"),
        });
    }
    let sweep = SweepConfig {
        r_values: t.list("sweep", "r_values", vec![2.0, 7.0 / 3.0, 3.0, 4.0])?,
        trunc_radii: t.list("sweep", "trunc_radii", Vec::new())?,
    };
    for r in &sweep.r_values {
        DampingParams::new(a, b, *r).map_err(|e| invalid(None, e))?;
    }
    for radius in &sweep.trunc_radii {
        Grid::new(n_points, box_scale, *radius).map_err(|e| invalid(None, e))?;
    }
    let energy_tol: f64 = t.parse("verify", "energy_tol", Some(1e-4))?;

    Ok(RunConfig {
        grid: GridConfig {
            n_points,
            box_scale,
            trunc_radius,
        },
        sim,
        initial,
        output_dir,
        stability,
        kappa,
        sweep,
        energy_tol,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn make_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n_points, self.grid.box_scale, self.grid.trunc_radius)
    }

    /// Initial field; snapshot files are read through the snapshot format.
    pub fn initial_field(&self, grid: &Grid) -> Result<SpectralVectorField> {
        match &self.initial {
            InitialCondition::TaylorGreen { amplitude } => init_taylor_green(grid, *amplitude),
            InitialCondition::Random {
                seed,
                cutoff,
                amplitude,
            } => init_random_divfree(grid, *seed, *cutoff, *amplitude),
            InitialCondition::Snapshot { path } => {
                let (_, field) = super::snapshot::read_snapshot(path)?;
                if !field.grid().same_as(grid) {
                    return Err(Error::GridMismatch);
                }
                Ok(field)
            }
        }
    }

    /// Canonical text with every default spelled out; parses back to `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let p = &self.sim;
        let _ = writeln!(s, "[grid]");
        let _ = writeln!(s, "n_points = {}", self.grid.n_points);
        let _ = writeln!(s, "box_scale = {:?}", self.grid.box_scale);
        let _ = writeln!(s, "trunc_radius = {:?}", self.grid.trunc_radius);
        let _ = writeln!(s, "[sim]");
        let _ = writeln!(s, "nu = {:?}", p.nu);
        let _ = writeln!(s, "dt = {:?}", p.dt);
        let _ = writeln!(s, "t_end = {:?}", p.t_end);
        let _ = writeln!(s, "output_every = {}", p.output_every);
        let _ = writeln!(s, "scheme_order = {}", u8::from(p.scheme_order));
        let _ = writeln!(s, "[damping]");
        let _ = writeln!(s, "a = {:?}", p.damping.a);
        let _ = writeln!(s, "b = {:?}", p.damping.b);
        let _ = writeln!(s, "r = {:?}", p.damping.r);
        let _ = writeln!(s, "v_max = {:?}", p.clip.v_max);
        let mode = match p.clip.mode {
            ClipMode::Saturate => "saturate",
            ClipMode::Error => "error",
        };
        let _ = writeln!(s, "clip_mode = {mode}");
        let _ = writeln!(s, "[initial]");
        match &self.initial {
            InitialCondition::TaylorGreen { amplitude } => {
                let _ = writeln!(s, "kind = taylor_green");
                let _ = writeln!(s, "amplitude = {amplitude:?}");
            }
            InitialCondition::Random {
                seed,
                cutoff,
                amplitude,
            } => {
                let _ = writeln!(s, "kind = random");
                let _ = writeln!(s, "seed = {seed}");
                let _ = writeln!(s, "cutoff = {cutoff:?}");
                let _ = writeln!(s, "amplitude = {amplitude:?}");
            }
            InitialCondition::Snapshot { path } => {
                let _ = writeln!(s, "kind = snapshot");
                let _ = writeln!(s, "path = {}", path.display());
            }
        }
        let _ = writeln!(s, "[output]");
        let _ = writeln!(s, "directory = {}", self.output_dir.display());
        let _ = writeln!(s, "snapshot_every = {}", p.snapshot_every);
        let _ = writeln!(s, "[stability]");
        let kind = match self.stability.delta_kind {
            DeltaKind::Scaled => "scaled",
            DeltaKind::Random => "random",
        };
        let _ = writeln!(s, "delta_kind = {kind}");
        let _ = writeln!(s, "delta_rel = {:?}", self.stability.delta_rel);
        let _ = writeln!(s, "delta_seed = {}", self.stability.delta_seed);
        let _ = writeln!(s, "[decay]");
        let _ = writeln!(s, "kappa = {:?}", self.kappa);
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "r_values = {}", join(&self.sweep.r_values));
        let _ = writeln!(s, "trunc_radii = {}", join(&self.sweep.trunc_radii));
        let _ = writeln!(s, "[verify]");
        let _ = writeln!(s, "energy_tol = {:?}", self.energy_tol);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nn_points = 16\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.sim.nu, 1.0);
        assert_eq!((c.sim.damping.a, c.sim.damping.b, c.sim.damping.r), (1.0, 1.0, 4.0));
        assert_eq!(c.grid.trunc_radius, 16.0 / 3.0);
        let echo = c.echo();
        for needle in ["nu = 1.0", "a = 1.0", "b = 1.0", "r = 4.0", "clip_mode = saturate"] {
            assert!(echo.contains(needle), "{needle} missing from echo");
        }
        assert_eq!(parse_config(&echo).unwrap(), c);
    }

    #[test]
    fn radius_beyond_bound_names_it() {
        let err = parse_config("[grid]\nn_points = 8\ntrunc_radius = 3.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("dealiasing bound"), "{msg}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config("[grid]\nn_points = 8\n[sim]\nviscosity = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("viscosity") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn overrides_take_precedence() {
        let c = parse_config_with(MINIMAL, &["sim.nu=0.5".into(), "damping.r=2".into()]).unwrap();
        assert_eq!(c.sim.nu, 0.5);
        assert_eq!(c.sim.damping.r, 2.0);
        assert!(parse_config_with(MINIMAL, &["sim.bogus=1".into()]).is_err());
    }

    #[test]
    fn random_initial_condition() {
        let c = parse_config("[grid]\nn_points = 8\n[initial]\nkind = random\nseed = 3\n").unwrap();
        assert_eq!(
            c.initial,
            InitialCondition::Random {
                seed: 3,
                cutoff: 8.0 / 3.0,
                amplitude: 1.0
            }
        );
        let g = c.make_grid().unwrap();
        c.initial_field(&g).unwrap().validate_state().unwrap();
    }

    #[test]
    fn misplaced_initial_key_rejected() {
        assert!(parse_config("[grid]\nn_points = 8\n[initial]\nseed = 3\n").is_err());
    }

    #[test]
    fn missing_grid_size_is_an_error() {
        assert!(parse_config("[sim]\nnu = 1\n").is_err());
    }
}
