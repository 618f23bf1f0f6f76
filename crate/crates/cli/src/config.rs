//! Experiment files.
//!
//! The format is flat TOML: a handful of `[section]` tables holding scalar
//! `key = value` pairs (arrays only for ladders and id lists). Sections:
//!
//! ```text
//! [experiment]      command, seed, ensemble, out
//! [model]           name (sch2 | ccf | sqg | linear), rate (linear only)
//! [grid]            n
//! [time]            dt, t_end, scheme (em | heun), sample_every
//! [regularization]  eps, cutoff_r, s, n_stop, blowup_factor
//! [noise]           k, decay (geometric | polynomial), ratio | exponent, s_max
//! [init]            kind (wave | random), amplitude, seed, modes
//! [verify]          estimates, resolutions, corpus_seed, per_level, levels,
//!                   threshold, noise_k, ratio, s, eps_list
//! [converge]        eps_ladder, dt_ladder
//! [stability]       delta, mode, shrink
//! ```
//!
//! `model.name`, `grid.n`, `time.dt` and `time.t_end` are required whenever a
//! `[model]` section is present; everything else has a default, and
//! [`to_manifest`] writes every value back out.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use toml::Spanned;

use saltflow::estimates::{LabConfig, Roughness, ESTIMATE_IDS};
use saltflow::models::ModelKind;
use saltflow::noise::Decay;
use saltflow::solver::{InitialCondition, SimConfig};
use saltflow::spectral::Grid;

/// A problem in an experiment file, with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    Converge,
    Stability,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Converge => "converge",
            Command::Stability => "stability",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "verify" => Command::Verify,
            "converge" => Command::Converge,
            "stability" => Command::Stability,
            other => {
                return Err(format!(
                    "unknown command `{other}` (expected simulate, verify, converge or stability)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySpec {
    /// Ids to run, in order; `all` expands to every id.
    pub estimates: Vec<String>,
    pub lab: LabConfig,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            estimates: vec!["all".into()],
            lab: LabConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergeSpec {
    pub eps_ladder: Vec<f64>,
    pub dt_ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySpec {
    pub delta: f64,
    pub mode: [i64; 2],
    /// The second run uses `delta / shrink`.
    pub shrink: f64,
}

impl Default for StabilitySpec {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            mode: [3, 0],
            shrink: 10.0,
        }
    }
}

/// Everything an invocation needs. Ensemble member `i` runs with seed
/// `seed + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub seed: u64,
    pub ensemble: usize,
    pub out: PathBuf,
    pub sim: Option<SimConfig>,
    pub verify: VerifySpec,
    pub converge: ConvergeSpec,
    pub stability: StabilitySpec,
}

impl ExperimentSpec {
    /// Simulation parameters for the commands that integrate trajectories.
    pub fn sim(&self) -> Result<&SimConfig, ConfigError> {
        self.sim.as_ref().ok_or_else(|| ConfigError {
            line: None,
            message: format!(
                "`{}` needs a [model] section with name, plus grid.n, time.dt and time.t_end",
                self.command.name()
            ),
        })
    }

    /// Configuration of ensemble member `i`.
    pub fn member(&self, i: usize) -> Result<SimConfig, ConfigError> {
        let mut c = self.sim()?.clone();
        c.seed = self.seed + i as u64;
        Ok(c)
    }

    /// Checks what the chosen command needs beyond a well-formed file.
    pub fn check_command(&self) -> Result<(), ConfigError> {
        let fail = |message: String| Err(ConfigError { line: None, message });
        match self.command {
            Command::Verify => Ok(()),
            Command::Simulate | Command::Stability => self.sim().map(|_| ()),
            Command::Converge => {
                self.sim()?;
                let (e, d) = (self.converge.eps_ladder.len(), self.converge.dt_ladder.len());
                if e == 0 && d == 0 {
                    return fail("converge needs converge.eps_ladder or converge.dt_ladder".into());
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    fn get(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Float(f) => f,
        }
    }
}

type Field<T> = Option<Spanned<T>>;

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFile {
    experiment: Option<RawExperiment>,
    model: Option<Spanned<RawModel>>,
    grid: Option<RawGrid>,
    time: Option<RawTime>,
    regularization: Option<RawRegularization>,
    noise: Option<RawNoise>,
    init: Option<RawInit>,
    verify: Option<RawVerify>,
    converge: Option<RawConverge>,
    stability: Option<RawStability>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    command: Field<String>,
    seed: Field<u64>,
    ensemble: Field<usize>,
    out: Field<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Field<String>,
    rate: Field<Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Field<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    dt: Field<Num>,
    t_end: Field<Num>,
    scheme: Field<String>,
    sample_every: Field<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegularization {
    eps: Field<Num>,
    cutoff_r: Field<Num>,
    s: Field<Num>,
    n_stop: Field<Num>,
    blowup_factor: Field<Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    k: Field<usize>,
    decay: Field<String>,
    ratio: Field<Num>,
    exponent: Field<Num>,
    s_max: Field<Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    kind: Field<String>,
    amplitude: Field<Num>,
    seed: Field<u64>,
    modes: Field<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    estimates: Field<Vec<String>>,
    resolutions: Field<Vec<usize>>,
    corpus_seed: Field<u64>,
    per_level: Field<usize>,
    levels: Field<Vec<String>>,
    threshold: Field<Num>,
    noise_k: Field<usize>,
    ratio: Field<Num>,
    s: Field<Num>,
    eps_list: Field<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConverge {
    eps_ladder: Field<Vec<Num>>,
    dt_ladder: Field<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStability {
    delta: Field<Num>,
    mode: Field<Vec<i64>>,
    shrink: Field<Num>,
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn at(&self, span: Range<usize>) -> usize {
        self.0[..span.start.min(self.0.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: Range<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError {
            line: Some(self.at(span)),
            message: message.into(),
        })
    }
}

fn val<T: Clone>(f: &Field<T>) -> Option<T> {
    f.as_ref().map(|s| s.get_ref().clone())
}

fn num(f: &Field<Num>) -> Option<f64> {
    f.as_ref().map(|s| s.get_ref().get())
}

fn nums(f: &Field<Vec<Num>>) -> Option<Vec<f64>> {
    f.as_ref().map(|s| s.get_ref().iter().map(|n| n.get()).collect())
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let lines = Lines(text);
    let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| lines.at(s)),
        message: e.message().trim().to_string(),
    })?;
    let mut spec = ExperimentSpec {
        command: Command::Simulate,
        seed: 0,
        ensemble: 1,
        out: PathBuf::from("out"),
        sim: None,
        verify: VerifySpec::default(),
        converge: ConvergeSpec::default(),
        stability: StabilitySpec::default(),
    };
    if let Some(e) = &raw.experiment {
        if let Some(c) = &e.command {
            spec.command = c.get_ref().parse().or_else(|m| lines.err(c.span(), m))?;
        }
        if let Some(s) = &e.seed {
            if *s.get_ref() > i64::MAX as u64 / 2 {
                return lines.err(s.span(), "seed must be below 2^62");
            }
            spec.seed = *s.get_ref();
        }
        if let Some(n) = &e.ensemble {
            if *n.get_ref() == 0 {
                return lines.err(n.span(), "ensemble must be at least 1");
            }
            spec.ensemble = *n.get_ref();
        }
        if let Some(o) = val(&e.out) {
            spec.out = PathBuf::from(o);
        }
    }
    spec.sim = parse_sim(&raw, &lines, spec.seed)?;
    if let Some(v) = &raw.verify {
        parse_verify(v, &lines, &mut spec.verify)?;
    }
    if let Some(c) = &raw.converge {
        parse_converge(c, &lines, spec.sim.as_ref(), &mut spec.converge)?;
    }
    if let Some(st) = &raw.stability {
        parse_stability(st, &lines, spec.sim.as_ref(), &mut spec.stability)?;
    }
    Ok(spec)
}

type Setter<'a> = (Range<usize>, Box<dyn FnOnce(&mut SimConfig) -> Result<(), String> + 'a>);

fn parse_sim(raw: &RawFile, lines: &Lines, seed: u64) -> Result<Option<SimConfig>, ConfigError> {
    let Some(model) = &raw.model else {
        for (present, name) in [
            (raw.grid.is_some(), "grid"),
            (raw.time.is_some(), "time"),
            (raw.regularization.is_some(), "regularization"),
            (raw.noise.is_some(), "noise"),
            (raw.init.is_some(), "init"),
        ] {
            if present {
                return Err(ConfigError {
                    line: None,
                    message: format!("[{name}] given without a [model] section"),
                });
            }
        }
        return Ok(None);
    };
    let missing = |what: &str| ConfigError {
        line: Some(lines.at(model.span())),
        message: format!("missing required field `{what}`"),
    };
    let m = model.get_ref();
    let name = m.name.as_ref().ok_or_else(|| missing("model.name"))?;
    let mut kind: ModelKind = name
        .get_ref()
        .parse()
        .or_else(|e: saltflow::Error| lines.err(name.span(), e.to_string()))?;
    if let Some(r) = &m.rate {
        match kind {
            ModelKind::Linear { .. } => {
                kind = ModelKind::Linear {
                    rate: r.get_ref().get(),
                }
            }
            _ => return lines.err(r.span(), "model.rate applies to the linear model only"),
        }
    }
    let grid = raw.grid.as_ref();
    let time = raw.time.as_ref();
    let n = grid.and_then(|g| g.n.clone()).ok_or_else(|| missing("grid.n"))?;
    let dt = time.and_then(|t| t.dt.clone()).ok_or_else(|| missing("time.dt"))?;
    let t_end = time
        .and_then(|t| t.t_end.clone())
        .ok_or_else(|| missing("time.t_end"))?;

    // a valid base, then one field at a time so a failure names its line
    let mut cfg = SimConfig::new(kind, 64, 1e-3, 0.0);
    cfg.seed = seed;
    let mut setters: Vec<Setter> = Vec::new();
    let nv = *n.get_ref();
    setters.push((
        n.span(),
        Box::new(move |c| {
            Grid::new(c.model.dim().max(1), nv).map_err(|e| e.to_string())?;
            c.n = nv;
            Ok(())
        }),
    ));
    let dv = dt.get_ref().get();
    setters.push((
        dt.span(),
        Box::new(move |c| {
            c.dt = dv;
            Ok(())
        }),
    ));
    let tv = t_end.get_ref().get();
    setters.push((
        t_end.span(),
        Box::new(move |c| {
            c.t_end = tv;
            Ok(())
        }),
    ));
    if let Some(t) = time {
        if let Some(s) = &t.scheme {
            let v = s.get_ref().clone();
            setters.push((
                s.span(),
                Box::new(move |c| {
                    c.scheme = v.parse().map_err(|e: saltflow::Error| e.to_string())?;
                    Ok(())
                }),
            ));
        }
        if let Some(s) = &t.sample_every {
            let v = *s.get_ref();
            setters.push((
                s.span(),
                Box::new(move |c| {
                    c.sample_every = v;
                    Ok(())
                }),
            ));
        }
    }
    if let Some(r) = &raw.regularization {
        let floats: [(&Field<Num>, fn(&mut SimConfig, f64)); 5] = [
            (&r.eps, |c, v| c.eps = v),
            (&r.cutoff_r, |c, v| c.cutoff_r = v),
            (&r.n_stop, |c, v| c.n_stop = v),
            (&r.blowup_factor, |c, v| c.blowup_factor = v),
            (&r.s, |c, v| {
                // the noise regularity tracks s unless given explicitly
                c.s_max += v - c.s;
                c.s = v;
            }),
        ];
        for (f, set) in floats {
            if let Some(x) = f {
                let v = x.get_ref().get();
                setters.push((
                    x.span(),
                    Box::new(move |c| {
                        set(c, v);
                        Ok(())
                    }),
                ));
            }
        }
    }
    let mut noise_span = model.span();
    if let Some(nz) = &raw.noise {
        if let Some(k) = &nz.k {
            let v = *k.get_ref();
            noise_span = k.span();
            setters.push((
                k.span(),
                Box::new(move |c| {
                    c.noise_k = v;
                    Ok(())
                }),
            ));
        }
        let kind_name = val(&nz.decay).unwrap_or_else(|| "geometric".into());
        let span = nz.decay.as_ref().map(|d| d.span()).unwrap_or(model.span());
        let decay = match kind_name.as_str() {
            "geometric" => {
                if let Some(e) = &nz.exponent {
                    return lines.err(e.span(), "noise.exponent belongs to decay = \"polynomial\"");
                }
                Decay::Geometric {
                    ratio: num(&nz.ratio).unwrap_or(0.5),
                }
            }
            "polynomial" => {
                if let Some(r) = &nz.ratio {
                    return lines.err(r.span(), "noise.ratio belongs to decay = \"geometric\"");
                }
                Decay::Polynomial {
                    exponent: num(&nz.exponent).unwrap_or(2.0),
                }
            }
            other => {
                return lines.err(
                    span,
                    format!("unknown decay `{other}` (expected geometric or polynomial)"),
                )
            }
        };
        let span = nz
            .ratio
            .as_ref()
            .or(nz.exponent.as_ref())
            .map(|d| d.span())
            .unwrap_or(span);
        setters.push((
            span.clone(),
            Box::new(move |c| {
                c.decay = decay;
                Ok(())
            }),
        ));
        if let Some(x) = &nz.s_max {
            let v = x.get_ref().get();
            setters.push((
                x.span(),
                Box::new(move |c| {
                    c.s_max = v;
                    Ok(())
                }),
            ));
        }
    }
    let mut init_span = model.span();
    if let Some(i) = &raw.init {
        let kind_name = val(&i.kind).unwrap_or_else(|| "wave".into());
        let amplitude = num(&i.amplitude).unwrap_or(1.0);
        init_span = i
            .kind
            .as_ref()
            .map(|k| k.span())
            .or(i.amplitude.as_ref().map(|a| a.span()))
            .unwrap_or(model.span());
        let init = match kind_name.as_str() {
            "wave" => {
                if let Some(x) = i.seed.as_ref().map(|x| x.span()).or(i.modes.as_ref().map(|x| x.span())) {
                    return lines.err(x, "init.seed and init.modes belong to kind = \"random\"");
                }
                InitialCondition::Wave { amplitude }
            }
            "random" => InitialCondition::Random {
                amplitude,
                seed: val(&i.seed).unwrap_or(1),
                modes: val(&i.modes).unwrap_or(8),
            },
            other => {
                return lines.err(
                    init_span,
                    format!("unknown init kind `{other}` (expected wave or random)"),
                )
            }
        };
        setters.push((
            init_span.clone(),
            Box::new(move |c| {
                c.init = init;
                Ok(())
            }),
        ));
    }
    for (span, set) in setters {
        set(&mut cfg).or_else(|m| lines.err(span.clone(), m))?;
        cfg.validate().or_else(|e| lines.err(span, e.to_string()))?;
    }
    cfg.ops().or_else(|e| lines.err(noise_span, e.to_string()))?;
    cfg.initial_state().or_else(|e| lines.err(init_span, e.to_string()))?;
    Ok(Some(cfg))
}

fn parse_verify(v: &RawVerify, lines: &Lines, out: &mut VerifySpec) -> Result<(), ConfigError> {
    if let Some(e) = &v.estimates {
        if e.get_ref().is_empty() {
            return lines.err(e.span(), "verify.estimates is empty");
        }
        for id in e.get_ref() {
            if id != "all" && !ESTIMATE_IDS.contains(&id.as_str()) {
                return lines.err(
                    e.span(),
                    format!("unknown estimate `{id}`; valid ids: all, {}", ESTIMATE_IDS.join(", ")),
                );
            }
        }
        out.estimates = e.get_ref().clone();
    }
    let lab = &mut out.lab;
    if let Some(r) = &v.resolutions {
        if r.get_ref().len() < 2 {
            return lines.err(r.span(), "verify.resolutions needs at least two grids");
        }
        for &n in r.get_ref() {
            Grid::one_d(n).or_else(|e| lines.err(r.span(), e.to_string()))?;
        }
        lab.resolutions = r.get_ref().clone();
    }
    if let Some(s) = val(&v.corpus_seed) {
        lab.seed = s;
    }
    if let Some(p) = &v.per_level {
        if *p.get_ref() == 0 {
            return lines.err(p.span(), "verify.per_level must be at least 1");
        }
        lab.per_level = *p.get_ref();
    }
    if let Some(l) = &v.levels {
        lab.levels = l
            .get_ref()
            .iter()
            .map(|s| s.parse::<Roughness>())
            .collect::<Result<_, _>>()
            .or_else(|e| lines.err(l.span(), e.to_string()))?;
    }
    if let Some(t) = num(&v.threshold) {
        lab.threshold = t;
    }
    if let Some(k) = &v.noise_k {
        if *k.get_ref() == 0 {
            return lines.err(k.span(), "verify.noise_k must be at least 1");
        }
        lab.noise_k = *k.get_ref();
    }
    if let Some(r) = &v.ratio {
        let x = r.get_ref().get();
        if !(x > 0.0 && x < 1.0) {
            return lines.err(r.span(), format!("geometric ratio must lie in (0,1), got {x}"));
        }
        lab.decay = Decay::Geometric { ratio: x };
    }
    if let Some(s) = num(&v.s) {
        lab.s = s;
    }
    if let Some(e) = &v.eps_list {
        let list = nums(&v.eps_list).unwrap_or_default();
        if list.is_empty() || list.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
            return lines.err(e.span(), "verify.eps_list needs values in (0,1)");
        }
        lab.eps_list = list;
    }
    Ok(())
}

fn parse_converge(
    c: &RawConverge,
    lines: &Lines,
    sim: Option<&SimConfig>,
    out: &mut ConvergeSpec,
) -> Result<(), ConfigError> {
    for (field, target, what) in [
        (&c.eps_ladder, &mut out.eps_ladder, "eps_ladder"),
        (&c.dt_ladder, &mut out.dt_ladder, "dt_ladder"),
    ] {
        let Some(f) = field else { continue };
        let list = nums(field).unwrap_or_default();
        if list.len() < 3 {
            return lines.err(
                f.span(),
                format!("converge.{what} needs at least 3 rungs, got {}", list.len()),
            );
        }
        if list.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return lines.err(f.span(), format!("converge.{what} values must be positive"));
        }
        if what == "eps_ladder" && list.iter().any(|x| *x >= 1.0) {
            return lines.err(f.span(), "converge.eps_ladder values must lie in (0,1)");
        }
        if what == "dt_ladder" {
            let finest = list.iter().cloned().fold(f64::INFINITY, f64::min);
            for dt in &list {
                let r = dt / finest;
                if (r - r.round()).abs() > 1e-9 * r {
                    return lines.err(
                        f.span(),
                        format!("dt = {dt} is not a multiple of the finest step {finest}"),
                    );
                }
                if let Some(s) = sim {
                    let mut probe = s.clone();
                    probe.dt = *dt;
                    probe.steps().or_else(|e| lines.err(f.span(), e.to_string()))?;
                }
            }
        }
        *target = list;
    }
    Ok(())
}

fn parse_stability(
    st: &RawStability,
    lines: &Lines,
    sim: Option<&SimConfig>,
    out: &mut StabilitySpec,
) -> Result<(), ConfigError> {
    if let Some(d) = &st.delta {
        let x = d.get_ref().get();
        if !(x > 0.0 && x.is_finite()) {
            return lines.err(d.span(), "stability.delta must be positive");
        }
        out.delta = x;
    }
    if let Some(s) = &st.shrink {
        let x = s.get_ref().get();
        if !(x > 1.0) {
            return lines.err(s.span(), "stability.shrink must exceed 1");
        }
        out.shrink = x;
    }
    if let Some(m) = &st.mode {
        let v = m.get_ref();
        if v.len() != 2 {
            return lines.err(m.span(), "stability.mode needs two integers");
        }
        let mode = [v[0], v[1]];
        if mode == [0, 0] {
            return lines.err(m.span(), "stability.mode must be nonzero");
        }
        if let Some(s) = sim {
            let g = s.grid().map_err(|e| ConfigError {
                line: None,
                message: e.to_string(),
            })?;
            if mode[0].abs().max(mode[1].abs()) > g.dealias_max() || (g.dim() == 1 && mode[1] != 0) {
                return lines.err(
                    m.span(),
                    format!("stability.mode {mode:?} is not a resolved mode of grid {g}"),
                );
            }
        }
        out.mode = mode;
    }
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn list<T: std::fmt::Display>(v: &[T], quote: bool) -> String {
    let items: Vec<String> = v
        .iter()
        .map(|x| if quote { format!("\"{x}\"") } else { x.to_string() })
        .collect();
    format!("[{}]", items.join(", "))
}

fn flist(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(", "))
}

/// Serializes every field, defaults included, in the input grammar; floats
/// use the shortest representation that parses back to the same bits.
pub fn to_manifest(spec: &ExperimentSpec) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "[experiment]");
    let _ = writeln!(w, "command = \"{}\"", spec.command.name());
    let _ = writeln!(w, "seed = {}", spec.seed);
    let _ = writeln!(w, "ensemble = {}", spec.ensemble);
    let _ = writeln!(w, "out = {:?}", spec.out.to_string_lossy());
    if let Some(c) = &spec.sim {
        let _ = writeln!(w, "\n[model]\nname = \"{}\"", c.model.name());
        if let ModelKind::Linear { rate } = c.model {
            let _ = writeln!(w, "rate = {}", f(rate));
        }
        let _ = writeln!(w, "\n[grid]\nn = {}", c.n);
        let _ = writeln!(
            w,
            "\n[time]\ndt = {}\nt_end = {}\nscheme = \"{}\"\nsample_every = {}",
            f(c.dt),
            f(c.t_end),
            c.scheme,
            c.sample_every
        );
        let _ = writeln!(
            w,
            "\n[regularization]\neps = {}\ncutoff_r = {}\ns = {}\nn_stop = {}\nblowup_factor = {}",
            f(c.eps),
            f(c.cutoff_r),
            f(c.s),
            f(c.n_stop),
            f(c.blowup_factor)
        );
        let decay = match c.decay {
            Decay::Geometric { ratio } => format!("decay = \"geometric\"\nratio = {}", f(ratio)),
            Decay::Polynomial { exponent } => format!("decay = \"polynomial\"\nexponent = {}", f(exponent)),
        };
        let _ = writeln!(w, "\n[noise]\nk = {}\n{decay}\ns_max = {}", c.noise_k, f(c.s_max));
        let init = match c.init {
            InitialCondition::Wave { amplitude } => format!("kind = \"wave\"\namplitude = {}", f(amplitude)),
            InitialCondition::Random { amplitude, seed, modes } => {
                format!(
                    "kind = \"random\"\namplitude = {}\nseed = {seed}\nmodes = {modes}",
                    f(amplitude)
                )
            }
        };
        let _ = writeln!(w, "\n[init]\n{init}");
    }
    let v = &spec.verify;
    let lab = &v.lab;
    let _ = writeln!(w, "\n[verify]\nestimates = {}", list(&v.estimates, true));
    let _ = writeln!(w, "resolutions = {}", list(&lab.resolutions, false));
    let _ = writeln!(w, "corpus_seed = {}\nper_level = {}", lab.seed, lab.per_level);
    let _ = writeln!(w, "levels = {}", list(&lab.levels, true));
    let _ = writeln!(w, "threshold = {}\nnoise_k = {}", f(lab.threshold), lab.noise_k);
    let Decay::Geometric { ratio } = lab.decay else {
        unreachable!("the lab basis is always geometric")
    };
    let _ = writeln!(
        w,
        "ratio = {}\ns = {}\neps_list = {}",
        f(ratio),
        f(lab.s),
        flist(&lab.eps_list)
    );
    let c = &spec.converge;
    if !c.eps_ladder.is_empty() || !c.dt_ladder.is_empty() {
        let _ = writeln!(w, "\n[converge]");
        if !c.eps_ladder.is_empty() {
            let _ = writeln!(w, "eps_ladder = {}", flist(&c.eps_ladder));
        }
        if !c.dt_ladder.is_empty() {
            let _ = writeln!(w, "dt_ladder = {}", flist(&c.dt_ladder));
        }
    }
    let st = &spec.stability;
    let _ = writeln!(
        w,
        "\n[stability]\ndelta = {}\nmode = [{}, {}]\nshrink = {}",
        f(st.delta),
        st.mode[0],
        st.mode[1],
        f(st.shrink)
    );
    s
}
