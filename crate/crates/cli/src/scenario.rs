//! Scenario files: TOML with the sections documented in the README.

use std::path::{Path, PathBuf};

use ndarray::{Array3, Array5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use plateflow::spectral::{from_physical, plate_from_physical, plate_to_physical, read_field, read_plate, to_physical};
use plateflow::{PlateField, SolverConfig, SpectralField, TorusGrid};

use crate::error::CliError;
use crate::expr::{self, Expr, Var};

/// Largest accepted Fourier truncation per direction.
pub const MAX_MODES: usize = 65;
/// Largest accepted Chebyshev degree.
pub const MAX_DEGREE: usize = 128;

/// A number or a constant expression such as `"2*pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expression(String),
}

impl Scalar {
    fn value(&self, field: &str) -> Result<f64, CliError> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expression(s) => {
                let e = expr::parse(s).map_err(|e| CliError::Parse { field: field.into(), source: e })?;
                if [Var::T, Var::X1, Var::X2, Var::X3].iter().any(|&v| e.uses(v)) {
                    return Err(CliError::Config(format!("{field} must be a constant expression")));
                }
                Ok(e.eval([0.0; 4]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Domain {
    pub period_t: Scalar,
    pub period_x: Scalar,
}

impl Default for Domain {
    fn default() -> Self {
        Self { period_t: Scalar::Expression("2*pi".into()), period_x: Scalar::Expression("2*pi".into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub mu_f: f64,
    pub mu_s: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self { mu_f: 1.0, mu_s: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    pub n_t: usize,
    pub n_x: usize,
    pub n_z: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { n_t: 5, n_x: 5, n_z: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `f` is given on the reference slab.
    Reference,
    /// `f` is given on the deformed domain and pulled back every iteration.
    Eulerian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingSpec {
    pub f: [String; 3],
    pub g: String,
    pub h: String,
    pub f_file: Option<PathBuf>,
    pub g_file: Option<PathBuf>,
    pub h_file: Option<PathBuf>,
    /// Multiplies all data.
    pub amplitude: f64,
    pub frame: Frame,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        let zero = || "0".to_string();
        Self {
            f: [zero(), zero(), zero()],
            g: zero(),
            h: zero(),
            f_file: None,
            g_file: None,
            h_file: None,
            amplitude: 1.0,
            frame: Frame::Reference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub equation: f64,
    pub boundary: f64,
    pub picard: f64,
    pub max_iter: usize,
    pub eps0: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self { equation: c.tol_eq, boundary: c.tol_bc, picard: c.picard_tol, max_iter: c.max_iter, eps0: c.eps0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct Lattice {
    pub k_max: i64,
    pub xi_max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Validate {
    pub seed: u64,
    pub cases: usize,
}

impl Default for Validate {
    fn default() -> Self {
        Self { seed: 0, cases: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("plateflow-out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub domain: Domain,
    pub physics: Physics,
    pub truncation: Truncation,
    pub forcing: ForcingSpec,
    pub tolerances: Tolerances,
    pub scan: Lattice,
    pub resonance: Lattice,
    pub validate: Validate,
    /// Not part of the scenario identity, so left out of manifests and hashes.
    #[serde(skip_serializing)]
    pub output: Output,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            domain: Domain::default(),
            physics: Physics::default(),
            truncation: Truncation::default(),
            forcing: ForcingSpec::default(),
            tolerances: Tolerances::default(),
            scan: Lattice { k_max: 2000, xi_max: 40 },
            resonance: Lattice { k_max: 4, xi_max: 4 },
            validate: Validate::default(),
            output: Output::default(),
        }
    }
}


impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // relative data files are resolved against the scenario file
        let base = path.parent().unwrap_or(Path::new("."));
        for file in [&mut cfg.forcing.f_file, &mut cfg.forcing.g_file, &mut cfg.forcing.h_file].into_iter().flatten() {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        Ok(cfg)
    }

    /// Solver configuration after the truncation and parameter checks shared
    /// by every subcommand. `mu_s = 0` is only accepted by the symbol studies.
    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let t = &self.truncation;
        for (name, n) in [("n_t", t.n_t), ("n_x", t.n_x)] {
            if n > MAX_MODES {
                return Err(CliError::Config(format!("{name} = {n} exceeds the limit {MAX_MODES}")));
            }
        }
        if t.n_z > MAX_DEGREE {
            return Err(CliError::Config(format!("n_z = {} exceeds the limit {MAX_DEGREE}", t.n_z)));
        }
        if self.physics.mu_f <= 0.0 || self.physics.mu_s < 0.0 || !self.physics.mu_f.is_finite() || !self.physics.mu_s.is_finite() {
            return Err(CliError::Config("viscosities must satisfy mu_f > 0 and mu_s >= 0".into()));
        }
        let tol = &self.tolerances;
        let cfg = SolverConfig {
            period_t: self.domain.period_t.value("domain.period_t")?,
            period_x: self.domain.period_x.value("domain.period_x")?,
            mu_f: self.physics.mu_f,
            mu_s: self.physics.mu_s,
            n_t: t.n_t,
            n_x: t.n_x,
            n_z: t.n_z,
            tol_eq: tol.equation,
            tol_bc: tol.boundary,
            picard_tol: tol.picard,
            max_iter: tol.max_iter,
            eps0: tol.eps0,
            dealias: true,
        };
        cfg.grid().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Like [`Self::solver`] but also demands `mu_s > 0`, which the
    /// fluid-plate solvers need.
    pub fn damped_solver(&self) -> Result<SolverConfig, CliError> {
        let cfg = self.solver()?;
        if cfg.mu_s <= 0.0 {
            return Err(CliError::Config("mu_s = 0 is only allowed for multiplier-scan and resonance-report".into()));
        }
        Ok(cfg)
    }
}

/// A parsed expression with the periodicity checks applied.
pub fn checked_expression(field: &str, src: &str, cfg: &SolverConfig, plate: bool) -> Result<Expr, CliError> {
    let e = expr::parse(src).map_err(|source| CliError::Parse { field: field.into(), source })?;
    if plate && e.uses(Var::X3) {
        return Err(CliError::Config(format!("{field} lives on the plate and cannot depend on x3")));
    }
    for (var, idx, period) in [(Var::T, 0, cfg.period_t), (Var::X1, 1, cfg.period_x), (Var::X2, 2, cfg.period_x)] {
        if !e.uses(var) {
            continue;
        }
        // deterministic low-discrepancy probe points
        for i in 1..=16 {
            let frac = |a: f64| (a * i as f64).fract();
            let p = [frac(0.618_033_988_75) * cfg.period_t, frac(0.754_877_666_2) * cfg.period_x, frac(0.569_840_290_998) * cfg.period_x, frac(0.41)];
            let mut q = p;
            q[idx] += period;
            let (a, b) = (e.eval(p), e.eval(q));
            if !a.is_finite() || (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                let name = ["t", "x1", "x2"][idx];
                return Err(CliError::Periodicity { field: field.into(), variable: name.into(), period });
            }
        }
    }
    Ok(e)
}

/// Oversampled uniform grid: three samples per retained mode and direction.
fn sample_counts(grid: &TorusGrid) -> (usize, usize) {
    (3 * grid.n_t(), 3 * grid.n_x())
}

/// A sampled data field together with the largest deviation between the
/// samples and the truncated field at the sample points.
pub struct Sampled<T> {
    pub field: T,
    pub truncation_defect: f64,
}

pub fn sample_slab(exprs: &[Expr], grid: &TorusGrid, amplitude: f64) -> Sampled<SpectralField> {
    let (mt, mx) = sample_counts(grid);
    let nodes = grid.nodes().to_vec();
    let mut s = Array5::<Complex64>::zeros((mt, mx, mx, nodes.len(), exprs.len()));
    for ((it, i1, i2, j, c), v) in s.indexed_iter_mut() {
        let p = [
            grid.period_t() * it as f64 / mt as f64,
            grid.period_x() * i1 as f64 / mx as f64,
            grid.period_x() * i2 as f64 / mx as f64,
            nodes[j],
        ];
        *v = Complex64::new(amplitude * exprs[c].eval(p), 0.0);
    }
    let mut field = from_physical(&s, grid).expect("oversampled grid covers the modes");
    field.symmetrize();
    let back = to_physical(&field, mt, mx);
    let truncation_defect = back.iter().zip(s.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Sampled { field, truncation_defect }
}

pub fn sample_plate(e: &Expr, grid: &TorusGrid, amplitude: f64) -> Sampled<PlateField> {
    let (mt, mx) = sample_counts(grid);
    let s = Array3::from_shape_fn((mt, mx, mx), |(it, i1, i2)| {
        let p = [
            grid.period_t() * it as f64 / mt as f64,
            grid.period_x() * i1 as f64 / mx as f64,
            grid.period_x() * i2 as f64 / mx as f64,
            0.0,
        ];
        Complex64::new(amplitude * e.eval(p), 0.0)
    });
    let mut field = plate_from_physical(&s, grid).expect("oversampled grid covers the modes");
    field.symmetrize();
    let back = plate_to_physical(&field, mt, mx);
    let truncation_defect = back.iter().zip(s.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    Sampled { field, truncation_defect }
}

fn open(path: &Path) -> Result<std::io::BufReader<std::fs::File>, CliError> {
    std::fs::File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))
}

fn load_slab(path: &Path, grid: &TorusGrid, comps: usize, amplitude: f64) -> Result<SpectralField, CliError> {
    let f = read_field(&mut open(path)?, grid.period_t(), grid.period_x())
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if f.grid() != grid || f.components() != comps {
        return Err(CliError::Config(format!(
            "{}: field on {:?} with {} components does not match the scenario grid with {comps}",
            path.display(),
            f.grid(),
            f.components()
        )));
    }
    Ok(f.scaled(amplitude))
}

/// Data `(f, g, h)` of a scenario, each either sampled from expressions or
/// read from a coefficient container.
pub struct Data {
    pub f: SpectralField,
    pub g: SpectralField,
    pub h: PlateField,
    /// Expressions of `f`, kept for pulling back an Eulerian forcing.
    pub f_exprs: Option<[Expr; 3]>,
    pub truncation_defect: f64,
}

pub fn load_data(spec: &ForcingSpec, cfg: &SolverConfig) -> Result<Data, CliError> {
    let grid = cfg.grid().map_err(|e| CliError::Config(e.to_string()))?;
    let a = spec.amplitude;
    let mut defect = 0.0f64;
    let (f, f_exprs) = match &spec.f_file {
        Some(p) => (load_slab(p, &grid, 3, a)?, None),
        None => {
            let mut es = Vec::new();
            for (i, s) in spec.f.iter().enumerate() {
                es.push(checked_expression(&format!("forcing.f[{i}]"), s, cfg, false)?);
            }
            let s = sample_slab(&es, &grid, a);
            defect = defect.max(s.truncation_defect);
            let arr: [Expr; 3] = es.try_into().expect("three components");
            (s.field, Some(arr))
        }
    };
    let g = match &spec.g_file {
        Some(p) => load_slab(p, &grid, 1, a)?,
        None => {
            let e = checked_expression("forcing.g", &spec.g, cfg, false)?;
            let s = sample_slab(std::slice::from_ref(&e), &grid, a);
            defect = defect.max(s.truncation_defect);
            s.field
        }
    };
    let h = match &spec.h_file {
        Some(p) => read_plate(&mut open(p)?, &grid).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?.scaled(a),
        None => {
            let e = checked_expression("forcing.h", &spec.h, cfg, true)?;
            let s = sample_plate(&e, &grid, a);
            defect = defect.max(s.truncation_defect);
            s.field
        }
    };
    Ok(Data { f, g, h, f_exprs, truncation_defect: defect })
}
