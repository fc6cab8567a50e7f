//! Job configuration: JSON in, defaults filled, echoed back out.
//!
//! Complex numbers are written as `[re, im]`. Every impedance is normalized
//! to `eta0`.

use std::path::Path;

use anyhow::{bail, Context};
use linewave::{AdmittanceDyadic, BasisStrategy, QuadratureConfig, RootSearchConfig, Sheet, StructureSpec, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Solve,
    Sweep,
    Field,
    Sw,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Solve => "solve",
            JobKind::Sweep => "sweep",
            JobKind::Field => "field",
            JobKind::Sw => "sw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Optional in the input; must agree with the subcommand when present.
    #[serde(default)]
    pub job: Option<JobKind>,
    pub structure: StructureConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Only rescales plot x-axes to meters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
}

/// One uniform sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    Isotropic { z: C64 },
    /// `z_zz zz + z_xx xx`.
    Axial { z_zz: C64, z_xx: C64 },
    /// Principal impedances along `u`, `v` rotated by `xi` from `z`, `x`.
    Rotated { z_u: C64, z_v: C64, xi: f64 },
}

impl SurfaceConfig {
    pub fn admittance(&self) -> linewave::Result<AdmittanceDyadic> {
        match *self {
            SurfaceConfig::Isotropic { z } => AdmittanceDyadic::isotropic(z),
            SurfaceConfig::Axial { z_zz, z_xx } => AdmittanceDyadic::axial(z_zz, z_xx),
            SurfaceConfig::Rotated { z_u, z_v, xi } => AdmittanceDyadic::rotated_axial(z_u, z_v, xi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureConfig {
    /// `z1` for `x < 0`, `z2` for `x > 0`.
    Isotropic { z1: C64, z2: C64 },
    /// Capacitive axial `x < 0` against inductive `j/sqrt3`.
    CapacitiveAxial { eps: f64 },
    /// Inductive axial `x < 0` against capacitive `-j sqrt3`.
    InductiveAxial { eps: f64 },
    /// Capacitive axial `x < 0` with axes rotated by `xi`, against `j/sqrt3`.
    RotatedCapacitive { eps: f64, xi: f64 },
    /// Arbitrary sheets on either side.
    Sheets { left: SurfaceConfig, right: SurfaceConfig },
    /// A single uniform plane; only meaningful for `sw`.
    Uniform { surface: SurfaceConfig },
}

impl StructureConfig {
    pub fn build(&self) -> anyhow::Result<StructureSpec> {
        let s = match self {
            StructureConfig::Isotropic { z1, z2 } => StructureSpec::isotropic(*z1, *z2)?,
            StructureConfig::CapacitiveAxial { eps } => StructureSpec::capacitive_axial(*eps)?,
            StructureConfig::InductiveAxial { eps } => StructureSpec::inductive_axial(*eps)?,
            StructureConfig::RotatedCapacitive { eps, xi } => StructureSpec::rotated_capacitive(*eps, *xi)?,
            StructureConfig::Sheets { left, right } => StructureSpec::new(left.admittance()?, right.admittance()?),
            StructureConfig::Uniform { .. } => bail!("a uniform plane has no line wave; use the sw job"),
        };
        if s.has_zero_contrast() {
            bail!("both half-planes are identical; no line wave exists");
        }
        Ok(s)
    }

    /// Sheets whose surface waves the `sw` job reports, labelled by side.
    pub fn planes(&self) -> anyhow::Result<Vec<(&'static str, AdmittanceDyadic)>> {
        if let StructureConfig::Uniform { surface } = self {
            return Ok(vec![("uniform", surface.admittance()?)]);
        }
        let s = self.build()?;
        Ok(vec![("left", s.y1), ("right", s.y2)])
    }

    /// Copy with the swept parameter set to `v`.
    pub fn with_param(&self, p: SweepParam, v: f64) -> anyhow::Result<Self> {
        use StructureConfig as S;
        use SweepParam as P;
        let mut out = self.clone();
        match (&mut out, p) {
            (S::Isotropic { z1, .. }, P::R1) => z1.re = v,
            (S::Isotropic { z1, .. }, P::X1) => z1.im = v,
            (S::Isotropic { z2, .. }, P::R2) => z2.re = v,
            (S::Isotropic { z2, .. }, P::X2) => z2.im = v,
            (S::Isotropic { z2, .. }, P::MinusX2) => z2.im = -v,
            (S::CapacitiveAxial { eps } | S::InductiveAxial { eps } | S::RotatedCapacitive { eps, .. }, P::Eps) => {
                *eps = v
            }
            (S::RotatedCapacitive { xi, .. }, P::Xi) => *xi = v,
            (_, P::N) => {}
            (s, p) => bail!("sweep parameter {} does not apply to structure kind {}", p.name(), s.kind()),
        }
        Ok(out)
    }

    fn kind(&self) -> &'static str {
        match self {
            StructureConfig::Isotropic { .. } => "isotropic",
            StructureConfig::CapacitiveAxial { .. } => "capacitive_axial",
            StructureConfig::InductiveAxial { .. } => "inductive_axial",
            StructureConfig::RotatedCapacitive { .. } => "rotated_capacitive",
            StructureConfig::Sheets { .. } => "sheets",
            StructureConfig::Uniform { .. } => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    ModeMatched,
    SurfaceMatched,
    FixedHalf,
    /// Uses `solver.a`.
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SheetChoice {
    Proper,
    Improper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_x: usize,
    pub n_z: usize,
    pub basis: BasisChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<C64>,
    pub sheet: SheetChoice,
    /// Initial guess; a negative imaginary part keeps the search below the axis.
    pub seed: C64,
    /// Half-widths `[d_beta, d_alpha]` of the search box.
    pub window: [f64; 2],
    pub tol: f64,
    /// Try a real-axis sign change first (bound modes).
    pub real_axis_first: bool,
    pub quad_rel_tol: f64,
    pub quad_max_levels: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let r = RootSearchConfig::default();
        let q = QuadratureConfig::default();
        Self {
            n_x: 8,
            n_z: 8,
            basis: BasisChoice::ModeMatched,
            a: None,
            sheet: SheetChoice::Proper,
            seed: r.seed,
            window: [r.window.0, r.window.1],
            tol: r.tol,
            real_axis_first: false,
            quad_rel_tol: q.rel_tol,
            quad_max_levels: q.max_levels,
        }
    }
}

impl SolverConfig {
    pub fn strategy(&self) -> anyhow::Result<BasisStrategy> {
        Ok(match (self.basis, self.a) {
            (BasisChoice::User, Some(a)) => BasisStrategy::UserValue(a),
            (BasisChoice::User, None) => bail!("solver.basis = \"user\" needs solver.a"),
            (_, Some(_)) => bail!("solver.a is only used with solver.basis = \"user\""),
            (BasisChoice::ModeMatched, None) => BasisStrategy::ModeMatched,
            (BasisChoice::SurfaceMatched, None) => BasisStrategy::SurfaceMatched,
            (BasisChoice::FixedHalf, None) => BasisStrategy::FixedHalf,
        })
    }

    pub fn sheet(&self) -> Sheet {
        match self.sheet {
            SheetChoice::Proper => Sheet::Proper,
            SheetChoice::Improper => Sheet::Improper,
        }
    }

    pub fn root_config(&self) -> RootSearchConfig {
        RootSearchConfig {
            window: (self.window[0], self.window[1]),
            tol: self.tol,
            real_axis_first: self.real_axis_first,
            ..RootSearchConfig::with_seed(self.seed)
        }
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig { rel_tol: self.quad_rel_tol, max_levels: self.quad_max_levels, ..Default::default() }
    }

    fn validate(&self) -> anyhow::Result<()> {
        self.strategy()?;
        self.root_config().validate().context("solver")?;
        self.quadrature().validate().context("solver")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// `Re z1` (isotropic).
    R1,
    /// `Im z1` (isotropic).
    X1,
    R2,
    X2,
    /// `-Im z2` (isotropic).
    MinusX2,
    Eps,
    Xi,
    /// Basis size, applied to both components.
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::R1 => "r1",
            SweepParam::X1 => "x1",
            SweepParam::R2 => "r2",
            SweepParam::X2 => "x2",
            SweepParam::MinusX2 => "minus_x2",
            SweepParam::Eps => "eps",
            SweepParam::Xi => "xi",
            SweepParam::N => "n",
        }
    }

    /// Axis label in normalized units.
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::R1 => "R1 (normalized)",
            SweepParam::X1 => "X1 (normalized)",
            SweepParam::R2 => "R2 (normalized)",
            SweepParam::X2 => "X2 (normalized)",
            SweepParam::MinusX2 => "-X2 (normalized)",
            SweepParam::Eps => "anisotropy eps",
            SweepParam::Xi => "rotation xi (rad)",
            SweepParam::N => "basis functions per component",
        }
    }
}

/// One curve of a sweep family; overrides the top-level structure and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub label: String,
    pub structure: StructureConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParam,
    /// Visited in the given order; each point seeds the next.
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    /// Range in free-space wavelengths.
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    /// Observation height; only `0` is supported.
    pub y: f64,
    /// Divide by `e_z` at the sample nearest the junction.
    pub normalize: bool,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { x_min: -1.0, x_max: 1.0, points: 81, y: 0.0, normalize: true }
    }
}

impl FieldConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.x_min];
        }
        (0..n).map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// File name prefix; defaults to the config file stem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { prefix: None, plot: true }
    }
}

/// Parses a config, reporting schema violations with their key path.
pub fn parse(text: &str) -> anyhow::Result<JobConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("config error at `{path}`: {}", e.into_inner())
    })
}

/// Reads, parses and checks a config for `kind`, filling every default.
pub fn load(path: &Path, kind: JobKind) -> anyhow::Result<JobConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse(&text)?;
    if let Some(k) = cfg.job {
        if k != kind {
            bail!("config is a `{}` job but the `{}` subcommand was given", k.name(), kind.name());
        }
    }
    cfg.job = Some(kind);
    if cfg.output.prefix.is_none() {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("linewave");
        cfg.output.prefix = Some(stem.to_string());
    }
    if kind == JobKind::Field && cfg.field.is_none() {
        cfg.field = Some(FieldConfig::default());
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &JobConfig) -> anyhow::Result<()> {
    let kind = cfg.job.unwrap_or(JobKind::Solve);
    match (kind, &cfg.sweep) {
        (JobKind::Sweep, None) => bail!("a sweep job needs a `sweep` block"),
        (JobKind::Sweep, Some(_)) => {}
        (k, Some(_)) => bail!("`sweep` block given for a `{}` job", k.name()),
        _ => {}
    }
    if kind == JobKind::Sw {
        if cfg.field.is_some() {
            bail!("`field` block given for an `sw` job");
        }
        cfg.structure.planes()?;
        return Ok(());
    }
    if kind == JobKind::Sweep && cfg.field.is_some() {
        bail!("`field` block given for a sweep job");
    }
    cfg.solver.validate()?;
    if let Some(sw) = &cfg.sweep {
        if sw.grid.is_empty() {
            bail!("sweep.grid is empty");
        }
        if sw.grid.iter().any(|v| !v.is_finite()) {
            bail!("sweep.grid has a non-finite value");
        }
        if sw.parameter == SweepParam::N && sw.grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
            bail!("sweep.grid for parameter n must hold positive integers");
        }
        let mut labels: Vec<&str> = sw.curves.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != sw.curves.len() {
            bail!("sweep.curves labels must be unique");
        }
        let structures: Vec<&StructureConfig> = if sw.curves.is_empty() {
            vec![&cfg.structure]
        } else {
            sw.curves.iter().map(|c| &c.structure).collect()
        };
        for s in structures {
            s.with_param(sw.parameter, sw.grid[0])?.build()?;
        }
    } else {
        cfg.structure.build()?;
    }
    if let Some(f) = &cfg.field {
        if f.y != 0.0 {
            bail!("field.y: only the plane y = 0 is supported");
        }
        if f.points == 0 || !(f.x_max >= f.x_min) {
            bail!("field: need points >= 1 and x_max >= x_min");
        }
    }
    if let Some(hz) = cfg.frequency_hz {
        if !(hz > 0.0 && hz.is_finite()) {
            bail!("frequency_hz must be positive");
        }
    }
    Ok(())
}

