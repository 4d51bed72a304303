//! Run configuration: a sectioned plain-text file of `key = value` lines.
//!
//! Physics parameters never travel on command-line flags; a run is fully
//! described by its config file, which is diffable and echoed into the run
//! manifest. Unknown sections or keys are rejected with the offending line
//! number; invariant violations name the key (and its line) rather than
//! just failing.
//!
//! ```text
//! # reference run
//! [grid]
//! box_length = 16.0
//! num_points = 1024
//!
//! [data]
//! family = geodesic_bump      # geodesic_bump | twist_bump | constant
//! q = 0, 0, 1
//! amplitude = 3.141592653589793
//! support_radius = 1.0
//!
//! [solver]
//! eps = 1e-2
//! t_final = 1.0
//! dt = 1e-3
//! ```
//!
//! Defaults fill every omitted key except `grid.box_length`,
//! `grid.num_points`, `data.family`, `solver.eps` and `solver.t_final`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HwmError, Result};
use crate::grid::SpectralGrid;
use crate::initial::{DataFamily, InitialDataSpec};
use crate::solver::{Integrator, PicardParams, SolverConfig};
use crate::sweep::SweepPlan;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub box_length: f64,
    pub num_points: usize,
    pub data: InitialDataSpec,
    pub solver: SolverConfig,
    pub tail_cutoffs: Vec<f64>,
    pub far_field_radius: f64,
    pub sweep_eps_ladder: Vec<f64>,
    pub sweep_windows: usize,
    pub time_reg_cutoff: f64,
    pub output_dir: String,
    pub seed: u64,
}

impl RunConfig {
    pub fn grid(&self) -> Result<std::sync::Arc<SpectralGrid>> {
        SpectralGrid::new(self.box_length, self.num_points)
    }

    pub fn sweep_plan(&self) -> SweepPlan {
        SweepPlan {
            eps_ladder: self.sweep_eps_ladder.clone(),
            base: self.solver,
            data: self.data,
            box_length: self.box_length,
            num_points: self.num_points,
            windows: self.sweep_windows,
            time_reg_cutoff: self.time_reg_cutoff,
        }
    }

    /// Canonical text form; `parse_config_str(cfg.to_text())` reproduces
    /// the config exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[grid]");
        let _ = writeln!(s, "box_length = {}", self.box_length);
        let _ = writeln!(s, "num_points = {}", self.num_points);
        let _ = writeln!(s, "\n[data]");
        let family = match self.data.family {
            DataFamily::GeodesicBump => "geodesic_bump",
            DataFamily::TwistBump => "twist_bump",
            DataFamily::Constant => "constant",
        };
        let _ = writeln!(s, "family = {family}");
        let _ = writeln!(
            s,
            "q = {}, {}, {}",
            self.data.q[0], self.data.q[1], self.data.q[2]
        );
        let _ = writeln!(s, "amplitude = {}", self.data.amplitude);
        let _ = writeln!(s, "support_radius = {}", self.data.support_radius);
        let _ = writeln!(s, "center = {}", self.data.center);
        let _ = writeln!(s, "bump_order = {}", self.data.bump_order);
        let _ = writeln!(s, "\n[solver]");
        let _ = writeln!(s, "eps = {}", self.solver.eps);
        let _ = writeln!(s, "t_final = {}", self.solver.t_final);
        let _ = writeln!(s, "dt = {}", self.solver.dt);
        let _ = writeln!(s, "output_stride = {}", self.solver.output_stride);
        let integrator = match self.solver.integrator {
            Integrator::EtdRk2 => "etd_rk2",
            Integrator::Ifrk4 => "ifrk4",
        };
        let _ = writeln!(s, "integrator = {integrator}");
        let _ = writeln!(s, "project_to_sphere = {}", self.solver.project_to_sphere);
        let _ = writeln!(s, "dealias = {}", self.solver.dealias);
        let _ = writeln!(s, "\n[picard]");
        let _ = writeln!(s, "max_iters = {}", self.solver.picard.max_iters);
        let _ = writeln!(s, "t_loc = {}", self.solver.picard.t_loc);
        let _ = writeln!(s, "duhamel_substeps = {}", self.solver.picard.duhamel_substeps);
        let _ = writeln!(s, "\n[diagnostics]");
        let cuts: Vec<String> = self.tail_cutoffs.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "tail_cutoffs = {}", cuts.join(", "));
        let _ = writeln!(s, "far_field_radius = {}", self.far_field_radius);
        let _ = writeln!(s, "\n[sweep]");
        let ladder: Vec<String> = self.sweep_eps_ladder.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "eps_ladder = {}", ladder.join(", "));
        let _ = writeln!(s, "windows = {}", self.sweep_windows);
        let _ = writeln!(s, "time_reg_cutoff = {}", self.time_reg_cutoff);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output_dir);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

/// Raw parse table: (section, key) → (value, line).
struct RawConfig {
    entries: HashMap<(String, String), (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let known_sections = [
            "grid",
            "data",
            "solver",
            "picard",
            "diagnostics",
            "sweep",
            "output",
        ];
        let mut entries = HashMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(p) => &raw_line[..p],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| HwmError::config(Some(line_no), "unterminated section header"))?
                    .trim()
                    .to_string();
                if !known_sections.contains(&name.as_str()) {
                    return Err(HwmError::config(
                        Some(line_no),
                        format!("unknown section [{name}]"),
                    ));
                }
                section = Some(name);
                continue;
            }
            let sec = section.clone().ok_or_else(|| {
                HwmError::config(Some(line_no), "key before any [section] header")
            })?;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HwmError::config(Some(line_no), format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(HwmError::config(Some(line_no), "empty key"));
            }
            if entries
                .insert((sec.clone(), key.clone()), (value, line_no))
                .is_some()
            {
                return Err(HwmError::config(
                    Some(line_no),
                    format!("duplicate key {sec}.{key}"),
                ));
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, sec: &str, key: &str) -> Option<(String, usize)> {
        self.entries.remove(&(sec.to_string(), key.to_string()))
    }

    fn finish(self) -> Result<()> {
        if let Some(((sec, key), (_, line))) = self.entries.into_iter().next() {
            return Err(HwmError::config(
                Some(line),
                format!("unknown key {sec}.{key}"),
            ));
        }
        Ok(())
    }
}

fn parse_f64(sec: &str, key: &str, v: &str, line: usize) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| HwmError::config(Some(line), format!("{sec}.{key}: `{v}` is not a number")))
}

fn parse_usize(sec: &str, key: &str, v: &str, line: usize) -> Result<usize> {
    v.parse::<usize>().map_err(|_| {
        HwmError::config(
            Some(line),
            format!("{sec}.{key}: `{v}` is not a nonnegative integer"),
        )
    })
}

fn parse_bool(sec: &str, key: &str, v: &str, line: usize) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(HwmError::config(
            Some(line),
            format!("{sec}.{key}: `{v}` is not `true` or `false`"),
        )),
    }
}

fn parse_f64_list(sec: &str, key: &str, v: &str, line: usize) -> Result<Vec<f64>> {
    v.split(',')
        .map(|p| parse_f64(sec, key, p.trim(), line))
        .collect()
}

/// Parse and fully validate a config from text. The error is always the
/// first problem found, with its line number where one exists.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut raw = RawConfig::parse(text)?;

    // required keys
    let req = |raw: &mut RawConfig, sec: &str, key: &str| -> Result<(String, usize)> {
        raw.take(sec, key)
            .ok_or_else(|| HwmError::config(None, format!("missing required key {sec}.{key}")))
    };

    let (v, l) = req(&mut raw, "grid", "box_length")?;
    let box_length = parse_f64("grid", "box_length", &v, l)?;
    let (v, l) = req(&mut raw, "grid", "num_points")?;
    let num_points = parse_usize("grid", "num_points", &v, l)?;

    let (v, family_line) = req(&mut raw, "data", "family")?;
    let family = match v.as_str() {
        "geodesic_bump" => DataFamily::GeodesicBump,
        "twist_bump" => DataFamily::TwistBump,
        "constant" => DataFamily::Constant,
        other => {
            return Err(HwmError::config(
                Some(family_line),
                format!("data.family: unknown family `{other}`"),
            ))
        }
    };

    let mut data = InitialDataSpec {
        family,
        q: [0.0, 0.0, 1.0],
        amplitude: std::f64::consts::PI,
        support_radius: 1.0,
        center: 0.0,
        bump_order: 8,
    };
    let mut q_line = family_line;
    if let Some((v, l)) = raw.take("data", "q") {
        let parts = parse_f64_list("data", "q", &v, l)?;
        if parts.len() != 3 {
            return Err(HwmError::config(
                Some(l),
                "data.q must have exactly 3 components",
            ));
        }
        data.q = [parts[0], parts[1], parts[2]];
        q_line = l;
    }
    let mut support_line = family_line;
    if let Some((v, l)) = raw.take("data", "amplitude") {
        data.amplitude = parse_f64("data", "amplitude", &v, l)?;
    }
    if let Some((v, l)) = raw.take("data", "support_radius") {
        data.support_radius = parse_f64("data", "support_radius", &v, l)?;
        support_line = l;
    }
    if let Some((v, l)) = raw.take("data", "center") {
        data.center = parse_f64("data", "center", &v, l)?;
    }
    if let Some((v, l)) = raw.take("data", "bump_order") {
        data.bump_order = parse_usize("data", "bump_order", &v, l)? as u32;
    }

    let (v, eps_line) = req(&mut raw, "solver", "eps")?;
    let eps = parse_f64("solver", "eps", &v, eps_line)?;
    let (v, l) = req(&mut raw, "solver", "t_final")?;
    let t_final = parse_f64("solver", "t_final", &v, l)?;

    let mut solver = SolverConfig::new(eps, t_final, 1e-3);
    solver.output_stride = 10;
    solver.picard = PicardParams::default();
    let mut dt_line = l;
    if let Some((v, l)) = raw.take("solver", "dt") {
        solver.dt = parse_f64("solver", "dt", &v, l)?;
        dt_line = l;
    }
    if let Some((v, l)) = raw.take("solver", "output_stride") {
        solver.output_stride = parse_usize("solver", "output_stride", &v, l)?;
    }
    if let Some((v, l)) = raw.take("solver", "integrator") {
        solver.integrator = match v.as_str() {
            "etd_rk2" => Integrator::EtdRk2,
            "ifrk4" => Integrator::Ifrk4,
            other => {
                return Err(HwmError::config(
                    Some(l),
                    format!("solver.integrator: unknown integrator `{other}`"),
                ))
            }
        };
    }
    if let Some((v, l)) = raw.take("solver", "project_to_sphere") {
        solver.project_to_sphere = parse_bool("solver", "project_to_sphere", &v, l)?;
    }
    if let Some((v, l)) = raw.take("solver", "dealias") {
        solver.dealias = parse_bool("solver", "dealias", &v, l)?;
    }
    if let Some((v, l)) = raw.take("picard", "max_iters") {
        solver.picard.max_iters = parse_usize("picard", "max_iters", &v, l)?;
    }
    if let Some((v, l)) = raw.take("picard", "t_loc") {
        solver.picard.t_loc = parse_f64("picard", "t_loc", &v, l)?;
    }
    if let Some((v, l)) = raw.take("picard", "duhamel_substeps") {
        solver.picard.duhamel_substeps = parse_usize("picard", "duhamel_substeps", &v, l)?;
    }

    // canonical ladder, filtered to the grid's Nyquist range when defaulted
    let nyquist = std::f64::consts::PI * num_points as f64 / box_length;
    let mut tail_cutoffs: Vec<f64> = [8.0, 16.0, 32.0, 64.0]
        .into_iter()
        .filter(|&n| n <= nyquist)
        .collect();
    let mut tail_line = None;
    if let Some((v, l)) = raw.take("diagnostics", "tail_cutoffs") {
        tail_cutoffs = parse_f64_list("diagnostics", "tail_cutoffs", &v, l)?;
        tail_line = Some(l);
    }
    let mut far_field_radius = 2.0 * data.support_radius;
    let mut far_line = None;
    if let Some((v, l)) = raw.take("diagnostics", "far_field_radius") {
        far_field_radius = parse_f64("diagnostics", "far_field_radius", &v, l)?;
        far_line = Some(l);
    }

    let mut sweep_eps_ladder = vec![1e-1, 5e-2, 2.5e-2, 1.25e-2];
    let mut ladder_line = None;
    if let Some((v, l)) = raw.take("sweep", "eps_ladder") {
        sweep_eps_ladder = parse_f64_list("sweep", "eps_ladder", &v, l)?;
        ladder_line = Some(l);
    }
    let mut sweep_windows = 3;
    if let Some((v, l)) = raw.take("sweep", "windows") {
        sweep_windows = parse_usize("sweep", "windows", &v, l)?;
    }
    let mut time_reg_cutoff = 16.0;
    if let Some((v, l)) = raw.take("sweep", "time_reg_cutoff") {
        time_reg_cutoff = parse_f64("sweep", "time_reg_cutoff", &v, l)?;
    }

    let mut output_dir = String::from("hwm-run");
    if let Some((v, _)) = raw.take("output", "dir") {
        output_dir = v;
    }
    let mut seed = 42u64;
    if let Some((v, l)) = raw.take("output", "seed") {
        seed = parse_usize("output", "seed", &v, l)? as u64;
    }

    raw.finish()?;

    // module invariants, reported against the offending key
    let grid = SpectralGrid::new(box_length, num_points).map_err(|e| {
        HwmError::config(None, format!("grid.box_length/num_points: {e}"))
    })?;
    data.validate(&grid).map_err(|e| {
        let line = match e {
            HwmError::Domain(ref m) if m.contains("unit vector") => Some(q_line),
            HwmError::Domain(ref m) if m.contains("padding") => Some(support_line),
            _ => None,
        };
        HwmError::config(line, format!("data: {e}"))
    })?;
    solver.validate(&grid).map_err(|e| {
        let line = match e {
            HwmError::Domain(ref m) if m.contains("eps") => Some(eps_line),
            HwmError::Domain(ref m) if m.contains("dt") || m.contains("stability") => Some(dt_line),
            _ => None,
        };
        HwmError::config(line, format!("solver: {e}"))
    })?;
    for &n in &tail_cutoffs {
        if !(n > 0.0 && n <= grid.max_wavenumber()) {
            return Err(HwmError::config(
                tail_line,
                format!(
                    "diagnostics.tail_cutoffs: cutoff {n} outside (0, {}]",
                    grid.max_wavenumber()
                ),
            ));
        }
    }
    if !(far_field_radius > 0.0 && 2.0 * far_field_radius < box_length / 2.0) {
        return Err(HwmError::config(
            far_line,
            format!(
                "diagnostics.far_field_radius: {far_field_radius} must satisfy 0 < 2R < L/2 \
                 so the R, 1.5R, 2R probes stay in the box"
            ),
        ));
    }
    if !sweep_eps_ladder.windows(2).all(|w| w[1] < w[0]) || sweep_eps_ladder.iter().any(|&e| e <= 0.0)
    {
        return Err(HwmError::config(
            ladder_line,
            "sweep.eps_ladder must be strictly decreasing and positive",
        ));
    }

    Ok(RunConfig {
        box_length,
        num_points,
        data,
        solver,
        tail_cutoffs,
        far_field_radius,
        sweep_eps_ladder,
        sweep_windows,
        time_reg_cutoff,
        output_dir,
        seed,
    })
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config_str(&text)
}
