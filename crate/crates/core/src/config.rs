//! Solver configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` starts a comment. Vectors are whitespace-separated numbers.
//!
//! ```text
//! [grid]
//! lower = -1 -1
//! upper = 1 1
//! n = 70 70
//! [physics]
//! kappa = 10
//! [time]
//! dt0 = 0.05
//! dt_ratio = 10        # optional, default 10
//! t_final = 20         # optional, default kappa * longest edge
//! steps = 102          # optional, fixes the step count
//! [stopping]
//! kind = fixed         # fixed | ub | residual
//! tol = 0.01
//! check_every = 10
//! [refraction]
//! kind = gaussian      # uniform | gaussian | luneburg | raster
//! amplitude = 0.1
//! center = 0 0
//! width = 0.3
//! [incident]
//! kind = plane         # plane | image_pair
//! direction = 1 0
//! [output]
//! path = out.oftf
//! format = oftf        # oftf | csv
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::error::{OftError, Result};
use crate::grid::{Grid, RefractionField};
use crate::helmholtz::IncidentField;
use crate::paraxial::StoppingRule;
use crate::raster::load_raster_refraction;
use crate::schedule::TimeStepSchedule;

#[derive(Debug, Clone, PartialEq)]
pub enum RefractionSpec {
    Uniform {
        beta0: f64,
    },
    /// `β = 1 + amplitude · e^{-|x - c|²/width²}`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// `β = 2 - (r/R)²` inside the sphere, 1 outside.
    Luneburg {
        center: Vec<f64>,
        radius: f64,
    },
    /// 8-bit PGM stretched over a 2D domain.
    Raster {
        path: PathBuf,
        amplitude: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum IncidentSpec {
    Plane { direction: Vec<f64> },
    ImagePair { direction: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Oftf,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n: Vec<usize>,
    pub kappa: f64,
    pub dt0: f64,
    pub dt_ratio: f64,
    /// `None` means `κ · L_max`.
    pub t_final: Option<f64>,
    pub steps: Option<usize>,
    pub stopping: StoppingRule,
    pub refraction: RefractionSpec,
    pub incident: IncidentSpec,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

fn cfg_err<T>(field: &str, message: impl Into<String>) -> Result<T> {
    Err(OftError::Config {
        field: field.to_string(),
        message: message.into(),
    })
}

struct Table {
    entries: BTreeMap<String, (String, usize)>,
}

impl Table {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(v, _)| v)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        match self.take(key) {
            Some(v) => Ok(v),
            None => cfg_err(key, "missing"),
        }
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| parse_real(key, &v)).transpose()
    }

    fn req_real(&mut self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        parse_real(key, &v)
    }

    fn reals(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|v| v.split_whitespace().map(|t| parse_real(key, t)).collect())
            .transpose()
    }

    fn req_reals(&mut self, key: &str) -> Result<Vec<f64>> {
        match self.reals(key)? {
            Some(v) => Ok(v),
            None => cfg_err(key, "missing"),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|v| {
                v.parse::<usize>()
                    .or_else(|_| cfg_err(key, format!("`{v}` is not a non-negative integer")))
            })
            .transpose()
    }
}

fn parse_real(key: &str, text: &str) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => cfg_err(key, format!("`{text}` is not a finite number")),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        cfg_err(key, format!("must be positive (got {v})"))
    }
}

impl SolverConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut table = Table {
            entries: BTreeMap::new(),
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return cfg_err(
                    &format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                );
            };
            if section.is_empty() {
                return cfg_err(k.trim(), "key appears before any [section]");
            }
            let key = format!("{section}.{}", k.trim());
            if table
                .entries
                .insert(key.clone(), (v.trim().to_string(), lineno + 1))
                .is_some()
            {
                return cfg_err(&key, "given twice");
            }
        }
        let cfg = Self::from_table(&mut table)?;
        if let Some((k, (_, line))) = table.entries.iter().next() {
            return cfg_err(k, format!("unknown key on line {line}"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn from_table(t: &mut Table) -> Result<Self> {
        let lower = t.req_reals("grid.lower")?;
        let upper = t.req_reals("grid.upper")?;
        let n = t
            .required("grid.n")?
            .split_whitespace()
            .map(|v| {
                v.parse::<usize>()
                    .or_else(|_| cfg_err("grid.n", format!("`{v}` is not a point count")))
            })
            .collect::<Result<Vec<_>>>()?;
        let kappa = t.req_real("physics.kappa")?;
        let dt0 = t.req_real("time.dt0")?;
        let dt_ratio = t.real("time.dt_ratio")?.unwrap_or(10.0);
        let t_final = t.real("time.t_final")?;
        let steps = t.count("time.steps")?;
        let kind = t.take("stopping.kind").unwrap_or_else(|| "fixed".into());
        let tol = t.real("stopping.tol")?;
        let check_every = t.count("stopping.check_every")?;
        let need_tol = |tol: Option<f64>| match tol {
            Some(v) => Ok(v),
            None => cfg_err("stopping.tol", format!("required for kind = {kind}")),
        };
        let stopping = match kind.as_str() {
            "fixed" => StoppingRule::FixedSchedule,
            "ub" => StoppingRule::UbThreshold { tol: need_tol(tol)? },
            "residual" => StoppingRule::ResidualThreshold {
                tol: need_tol(tol)?,
                check_every: check_every.unwrap_or(10),
            },
            other => return cfg_err("stopping.kind", format!("unknown kind `{other}`")),
        };
        let dim = lower.len();
        let rkind = t.take("refraction.kind").unwrap_or_else(|| "uniform".into());
        let refraction = match rkind.as_str() {
            "uniform" => RefractionSpec::Uniform {
                beta0: t.real("refraction.beta0")?.unwrap_or(1.0),
            },
            "gaussian" => RefractionSpec::Gaussian {
                center: t.reals("refraction.center")?.unwrap_or_else(|| vec![0.0; dim]),
                width: t.req_real("refraction.width")?,
                amplitude: t.req_real("refraction.amplitude")?,
            },
            "luneburg" => RefractionSpec::Luneburg {
                center: t.reals("refraction.center")?.unwrap_or_else(|| vec![0.0; dim]),
                radius: t.real("refraction.radius")?.unwrap_or(1.0),
            },
            "raster" => RefractionSpec::Raster {
                path: PathBuf::from(t.required("refraction.path")?),
                amplitude: t.req_real("refraction.amplitude")?,
            },
            other => return cfg_err("refraction.kind", format!("unknown kind `{other}`")),
        };
        let ikind = t.take("incident.kind").unwrap_or_else(|| "plane".into());
        let direction = t.reals("incident.direction")?.unwrap_or_else(|| {
            let mut d = vec![0.0; dim];
            if let Some(first) = d.first_mut() {
                *first = 1.0;
            }
            d
        });
        let incident = match ikind.as_str() {
            "plane" => IncidentSpec::Plane { direction },
            "image_pair" => IncidentSpec::ImagePair { direction },
            other => return cfg_err("incident.kind", format!("unknown kind `{other}`")),
        };
        let output_path = PathBuf::from(t.take("output.path").unwrap_or_else(|| "out.oftf".into()));
        let output_format = match t.take("output.format").as_deref().unwrap_or("oftf") {
            "oftf" => OutputFormat::Oftf,
            "csv" => OutputFormat::Csv,
            other => return cfg_err("output.format", format!("unknown format `{other}`")),
        };
        Ok(SolverConfig {
            lower,
            upper,
            n,
            kappa,
            dt0,
            dt_ratio,
            t_final,
            steps,
            stopping,
            refraction,
            incident,
            output_path,
            output_format,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.lower.len();
        if !(1..=3).contains(&dim) {
            return cfg_err("grid.lower", format!("dimension must be 1, 2 or 3 (got {dim})"));
        }
        if self.upper.len() != dim {
            return cfg_err("grid.upper", format!("expected {dim} values"));
        }
        if self.n.len() != dim {
            return cfg_err("grid.n", format!("expected {dim} values"));
        }
        for d in 0..dim {
            if !(self.upper[d] > self.lower[d]) {
                return cfg_err("grid.upper", format!("axis {} has upper <= lower", d + 1));
            }
            if self.n[d] < 3 {
                return cfg_err("grid.n", format!("axis {} needs at least 3 points", d + 1));
            }
        }
        positive("physics.kappa", self.kappa)?;
        positive("time.dt0", self.dt0)?;
        if !(self.dt_ratio > 1.0) {
            return cfg_err("time.dt_ratio", "must exceed 1");
        }
        if let Some(t) = self.t_final {
            positive("time.t_final", t)?;
        }
        if self.steps == Some(0) {
            return cfg_err("time.steps", "must be at least 1");
        }
        match self.stopping {
            StoppingRule::UbThreshold { tol } | StoppingRule::ResidualThreshold { tol, .. } if !(tol > 0.0) => {
                return cfg_err("stopping.tol", "must be positive")
            }
            StoppingRule::ResidualThreshold { check_every: 0, .. } => {
                return cfg_err("stopping.check_every", "must be at least 1")
            }
            _ => {}
        }
        match &self.refraction {
            RefractionSpec::Uniform { beta0 } => {
                positive("refraction.beta0", *beta0)?;
            }
            RefractionSpec::Gaussian {
                center,
                width,
                amplitude,
            } => {
                if center.len() != dim {
                    return cfg_err("refraction.center", format!("expected {dim} values"));
                }
                positive("refraction.width", *width)?;
                if !(*amplitude > -1.0) {
                    return cfg_err("refraction.amplitude", "must exceed -1 so beta stays positive");
                }
            }
            RefractionSpec::Luneburg { center, radius } => {
                if center.len() != dim {
                    return cfg_err("refraction.center", format!("expected {dim} values"));
                }
                positive("refraction.radius", *radius)?;
            }
            RefractionSpec::Raster { amplitude, .. } => {
                if dim != 2 {
                    return cfg_err("refraction.kind", "raster refraction needs a 2D grid");
                }
                if !(*amplitude >= 0.0) {
                    return cfg_err("refraction.amplitude", "must be non-negative");
                }
            }
        }
        let (IncidentSpec::Plane { direction } | IncidentSpec::ImagePair { direction }) = &self.incident;
        if direction.len() != dim {
            return cfg_err("incident.direction", format!("expected {dim} values"));
        }
        if direction.iter().all(|c| *c == 0.0) {
            return cfg_err("incident.direction", "must be nonzero");
        }
        if self.output_format == OutputFormat::Csv && dim == 3 {
            return cfg_err("output.format", "csv output supports 1D and 2D grids");
        }
        if matches!(self.incident, IncidentSpec::ImagePair { .. }) && dim != 3 {
            return cfg_err("incident.kind", "image_pair needs a 3D grid");
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(&self.lower, &self.upper, &self.n)
    }

    /// `T` defaults to `κ · L_max`.
    pub fn t_final_or_default(&self) -> Result<f64> {
        match self.t_final {
            Some(t) => Ok(t),
            None => Ok(self.kappa * self.grid()?.max_edge()),
        }
    }

    pub fn schedule(&self) -> Result<TimeStepSchedule> {
        let t = self.t_final_or_default()?;
        let dt_t = self.dt_ratio * self.dt0;
        match self.steps {
            Some(s) => TimeStepSchedule::with_steps(self.dt0, dt_t, t, s),
            None => TimeStepSchedule::build(self.dt0, dt_t, t),
        }
    }

    pub fn refraction(&self, grid: &Grid) -> Result<RefractionField> {
        let dist2 = |p: &[f64], c: &[f64]| c.iter().enumerate().map(|(d, c)| (p[d] - c).powi(2)).sum::<f64>();
        match &self.refraction {
            RefractionSpec::Uniform { beta0 } => RefractionField::uniform(grid, *beta0),
            RefractionSpec::Gaussian {
                center,
                width,
                amplitude,
            } => RefractionField::from_fn(grid, |p| {
                1.0 + amplitude * (-dist2(p, center) / (width * width)).exp()
            }),
            RefractionSpec::Luneburg { center, radius } => RefractionField::from_fn(grid, |p| {
                let r2 = dist2(p, center) / (radius * radius);
                if r2 <= 1.0 {
                    2.0 - r2
                } else {
                    1.0
                }
            }),
            RefractionSpec::Raster { path, amplitude } => load_raster_refraction(path, *amplitude, grid),
        }
    }

    pub fn incident(&self) -> Result<IncidentField> {
        match &self.incident {
            IncidentSpec::Plane { direction } => IncidentField::plane_along(direction, self.kappa),
            IncidentSpec::ImagePair { direction } => IncidentField::image_pair_along(direction, self.kappa),
        }
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for SolverConfig {
    /// Canonical form; `parse(to_string())` reproduces the config exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(
            s,
            "[grid]\nlower = {}\nupper = {}\nn = {}",
            join(&self.lower),
            join(&self.upper),
            join(&self.n)
        )?;
        writeln!(s, "[physics]\nkappa = {}", self.kappa)?;
        writeln!(s, "[time]\ndt0 = {}\ndt_ratio = {}", self.dt0, self.dt_ratio)?;
        if let Some(t) = self.t_final {
            writeln!(s, "t_final = {t}")?;
        }
        if let Some(n) = self.steps {
            writeln!(s, "steps = {n}")?;
        }
        match self.stopping {
            StoppingRule::FixedSchedule => writeln!(s, "[stopping]\nkind = fixed")?,
            StoppingRule::UbThreshold { tol } => writeln!(s, "[stopping]\nkind = ub\ntol = {tol}")?,
            StoppingRule::ResidualThreshold { tol, check_every } => writeln!(
                s,
                "[stopping]\nkind = residual\ntol = {tol}\ncheck_every = {check_every}"
            )?,
        }
        match &self.refraction {
            RefractionSpec::Uniform { beta0 } => writeln!(s, "[refraction]\nkind = uniform\nbeta0 = {beta0}")?,
            RefractionSpec::Gaussian {
                center,
                width,
                amplitude,
            } => writeln!(
                s,
                "[refraction]\nkind = gaussian\ncenter = {}\nwidth = {width}\namplitude = {amplitude}",
                join(center)
            )?,
            RefractionSpec::Luneburg { center, radius } => writeln!(
                s,
                "[refraction]\nkind = luneburg\ncenter = {}\nradius = {radius}",
                join(center)
            )?,
            RefractionSpec::Raster { path, amplitude } => writeln!(
                s,
                "[refraction]\nkind = raster\npath = {}\namplitude = {amplitude}",
                path.display()
            )?,
        }
        match &self.incident {
            IncidentSpec::Plane { direction } => {
                writeln!(s, "[incident]\nkind = plane\ndirection = {}", join(direction))?
            }
            IncidentSpec::ImagePair { direction } => {
                writeln!(s, "[incident]\nkind = image_pair\ndirection = {}", join(direction))?
            }
        }
        let format = match self.output_format {
            OutputFormat::Oftf => "oftf",
            OutputFormat::Csv => "csv",
        };
        write!(
            s,
            "[output]\npath = {}\nformat = {format}\n",
            self.output_path.display()
        )?;
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# 2D bump
[grid]
lower = -1 -1
upper = 1 1
n = 41 41
[physics]
kappa = 15.7
[time]
dt0 = 0.05
[stopping]
kind = residual
tol = 1e-2
[refraction]
kind = gaussian
width = 0.3
amplitude = 0.1
[incident]
direction = 1 0
[output]
path = bump.csv
format = csv
";

    #[test]
    fn parses_with_defaults() {
        let c = SolverConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.dt_ratio, 10.0);
        assert!((c.t_final_or_default().unwrap() - 31.4).abs() < 1e-12);
        assert_eq!(
            c.stopping,
            StoppingRule::ResidualThreshold {
                tol: 1e-2,
                check_every: 10
            }
        );
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn round_trip() {
        let c = SolverConfig::parse(SAMPLE).unwrap();
        let again = SolverConfig::parse(&c.to_string()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_string(), again.to_string());
    }

    #[test]
    fn errors_name_the_field() {
        let field_of = |text: &str| match SolverConfig::parse(text) {
            Err(OftError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(field_of(&SAMPLE.replace("kappa = 15.7", "kappa = -1")), "physics.kappa");
        assert_eq!(field_of(&SAMPLE.replace("n = 41 41", "n = 41 2")), "grid.n");
        assert_eq!(field_of(&SAMPLE.replace("dt0 = 0.05", "")), "time.dt0");
        assert_eq!(
            field_of(&SAMPLE.replace("format = csv", "format = csv\ncolour = red")),
            "output.colour"
        );
        assert_eq!(
            field_of(&SAMPLE.replace("kind = residual", "kind = sometimes")),
            "stopping.kind"
        );
    }
}
