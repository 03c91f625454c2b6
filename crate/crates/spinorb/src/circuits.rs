//! Reference states and named optical circuits.
//!
//! Three photon-pair (and triple, and quadruple) sources feed nine named
//! element pipelines. Each pipeline converts entanglement between one
//! pair of degrees of freedom into another:
//!
//! * `*-combine` pipelines take a polarization-entangled multi-path
//!   state and concentrate the entanglement onto fewer paths as a joint
//!   polarization-OAM state;
//! * `*-sort-pol` pipelines split such a state by polarization,
//!   leaving OAM entanglement between two paths;
//! * `*-sort-oam` pipelines split it by OAM (fork hologram), leaving
//!   polarization entanglement between two paths.
//!
//! Every named pipeline carries its exact expected output, so a run
//! reports a fidelity against a closed-form reference state. Pipelines
//! can also be read from a plain-text file, one element per line.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::elements::{apply_element, ElementSpec, Sign, TransferrerKind};
use crate::error::{Error, Result};
use crate::fock::{ModeLabel, ModeRegistry, Occupation, PhotonicState, Polarization};

const H: Polarization = Polarization::H;
const V: Polarization = Polarization::V;

/// Identifier of a closed-form reference state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateId {
    /// Two photons on two paths, polarization-entangled (symmetric Bell
    /// state), OAM 0.
    PsiPol,
    /// Two photons on two paths, all `H`, OAM-entangled.
    PsiOam,
    /// Two photons on two paths: polarization and OAM carry the same
    /// Bell correlation (`H` with `+l` or `V` with `-l` per term).
    PsiPrime,
    /// Two photons on one path, entangled between polarization and OAM.
    PsiPolOam,
    /// Three photons on three paths, polarization GHZ state, OAM 0.
    Ghz3,
    /// Three photons on one path: the GHZ correlation moved into
    /// polarization plus OAM.
    Ghz3Single,
    /// Three photons on two paths, all `H`, OAM GHZ correlation.
    Oam3,
    /// Three photons on two paths, polarization GHZ correlation, OAM 0.
    Pol3,
    /// Four photons on two paths from a double pair emission,
    /// polarization-correlated, OAM 0.
    Pol4,
    /// Four photons on one path: the double-pair correlation in
    /// polarization plus OAM.
    Psi4,
    /// Four photons on two paths, all `H`, OAM-correlated.
    Oam4,
}

impl StateId {
    /// Every defined reference state.
    pub const ALL: [StateId; 11] = [
        StateId::PsiPol,
        StateId::PsiOam,
        StateId::PsiPrime,
        StateId::PsiPolOam,
        StateId::Ghz3,
        StateId::Ghz3Single,
        StateId::Oam3,
        StateId::Pol3,
        StateId::Pol4,
        StateId::Psi4,
        StateId::Oam4,
    ];

    /// The canonical paths this state is defined on.
    pub fn paths(self) -> &'static [u32] {
        match self {
            StateId::Ghz3 | StateId::Ghz3Single | StateId::Oam3 | StateId::Pol3 => &[1, 2, 3],
            _ => &[1, 2],
        }
    }

    /// Total photon number.
    pub fn photon_number(self) -> u32 {
        match self {
            StateId::PsiPol | StateId::PsiOam | StateId::PsiPrime | StateId::PsiPolOam => 2,
            StateId::Ghz3 | StateId::Ghz3Single | StateId::Oam3 | StateId::Pol3 => 3,
            StateId::Pol4 | StateId::Psi4 | StateId::Oam4 => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            StateId::PsiPol => "PSI_POL",
            StateId::PsiOam => "PSI_OAM",
            StateId::PsiPrime => "PSI_PRIME",
            StateId::PsiPolOam => "PSI_POLOAM",
            StateId::Ghz3 => "GHZ3",
            StateId::Ghz3Single => "GHZ3_SINGLE",
            StateId::Oam3 => "OAM3",
            StateId::Pol3 => "POL3",
            StateId::Pol4 => "POL4",
            StateId::Psi4 => "PSI4",
            StateId::Oam4 => "OAM4",
        }
    }
}

impl std::fmt::Display for StateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        StateId::ALL
            .into_iter()
            .find(|id| id.name() == upper)
            .ok_or_else(|| Error::UnknownState(s.to_string()))
    }
}

/// One term of a reference state: modes with their photon counts.
type ModeCounts<'a> = &'a [(u32, Polarization, i32, u8)];

/// Builds a state from explicit occupation amplitudes (weights multiply
/// normalized occupation kets).
fn from_occupations(
    registry: &Arc<ModeRegistry>,
    terms: &[(f64, ModeCounts<'_>)],
) -> Result<PhotonicState> {
    let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    let mut photon_number = 0u32;
    for (k, (weight, modes)) in terms.iter().enumerate() {
        let mut occ = Occupation::empty(registry.num_modes());
        let mut total = 0u32;
        for &(path, pol, oam, n) in *modes {
            let index = registry.index_of(ModeLabel::new(path, pol, oam))?;
            for _ in 0..n {
                occ = occ.bumped(index);
            }
            total += n as u32;
        }
        if k == 0 {
            photon_number = total;
        } else if total != photon_number {
            return Err(Error::PhotonNumberMismatch {
                left: photon_number,
                right: total,
            });
        }
        amps.insert(occ, Complex64::new(*weight, 0.0));
    }
    Ok(PhotonicState::from_parts(
        Arc::clone(registry),
        photon_number,
        amps,
        1.0,
    ))
}

/// The closed-form reference state for `id` in a given registry.
///
/// The registry must contain the state's paths and, for states with OAM
/// content, the matching `±l` modes.
pub fn reference_state_in(registry: &Arc<ModeRegistry>, id: StateId) -> Result<PhotonicState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3.0f64.sqrt();
    let l = registry.l() as i32;
    match id {
        StateId::PsiPol => from_occupations(
            registry,
            &[
                (s, &[(1, H, 0, 1), (2, V, 0, 1)]),
                (s, &[(1, V, 0, 1), (2, H, 0, 1)]),
            ],
        ),
        StateId::PsiOam => from_occupations(
            registry,
            &[
                (s, &[(1, H, l, 1), (2, H, -l, 1)]),
                (s, &[(1, H, -l, 1), (2, H, l, 1)]),
            ],
        ),
        StateId::PsiPrime => from_occupations(
            registry,
            &[
                (s, &[(1, H, l, 1), (2, V, -l, 1)]),
                (s, &[(1, H, -l, 1), (2, V, l, 1)]),
            ],
        ),
        StateId::PsiPolOam => from_occupations(
            registry,
            &[
                (s, &[(1, H, l, 1), (1, V, -l, 1)]),
                (s, &[(1, V, l, 1), (1, H, -l, 1)]),
            ],
        ),
        StateId::Ghz3 => from_occupations(
            registry,
            &[
                (s, &[(1, H, 0, 1), (2, V, 0, 1), (3, V, 0, 1)]),
                (s, &[(1, V, 0, 1), (2, H, 0, 1), (3, H, 0, 1)]),
            ],
        ),
        StateId::Ghz3Single => from_occupations(
            registry,
            &[
                (s, &[(1, H, l, 1), (1, V, -l, 2)]),
                (s, &[(1, V, l, 2), (1, H, -l, 1)]),
            ],
        ),
        StateId::Oam3 => from_occupations(
            registry,
            &[
                (s, &[(1, H, l, 1), (2, H, -l, 2)]),
                (s, &[(1, H, -l, 1), (2, H, l, 2)]),
            ],
        ),
        StateId::Pol3 => from_occupations(
            registry,
            &[
                (s, &[(1, H, 0, 1), (2, V, 0, 2)]),
                (s, &[(1, V, 0, 2), (2, H, 0, 1)]),
            ],
        ),
        StateId::Pol4 => from_occupations(
            registry,
            &[
                (t, &[(1, H, 0, 2), (2, V, 0, 2)]),
                (t, &[(1, V, 0, 2), (2, H, 0, 2)]),
                (t, &[(1, H, 0, 1), (1, V, 0, 1), (2, H, 0, 1), (2, V, 0, 1)]),
            ],
        ),
        StateId::Psi4 => from_occupations(
            registry,
            &[
                (t, &[(1, H, l, 2), (1, V, -l, 2)]),
                (t, &[(1, V, l, 2), (1, H, -l, 2)]),
                (t, &[(1, H, l, 1), (1, V, l, 1), (1, H, -l, 1), (1, V, -l, 1)]),
            ],
        ),
        StateId::Oam4 => from_occupations(
            registry,
            &[
                (t, &[(1, H, l, 2), (2, H, -l, 2)]),
                (t, &[(1, H, -l, 2), (2, H, l, 2)]),
                (t, &[(1, H, l, 1), (1, H, -l, 1), (2, H, l, 1), (2, H, -l, 1)]),
            ],
        ),
    }
}

/// The reference state together with its canonical registry
/// (`include_zero_oam` on, OAM order `l`).
pub fn reference_state(id: StateId, l: u32) -> Result<(Arc<ModeRegistry>, PhotonicState)> {
    let registry = ModeRegistry::build(id.paths(), l, true)?;
    let state = reference_state_in(&registry, id)?;
    Ok((registry, state))
}

/// Applies one pair-emission step: the creation polynomial
/// `a†(a,H) a†(b,V) + a†(a,V) a†(b,H)` (unnormalized).
fn pair_emission(state: &PhotonicState, path_a: u32, path_b: u32) -> Result<PhotonicState> {
    let one = Complex64::new(1.0, 0.0);
    let t1 = state
        .apply_creation(ModeLabel::new(path_a, H, 0))?
        .apply_creation(ModeLabel::new(path_b, V, 0))?;
    let t2 = state
        .apply_creation(ModeLabel::new(path_a, V, 0))?
        .apply_creation(ModeLabel::new(path_b, H, 0))?;
    PhotonicState::superpose(&[(one, &t1), (one, &t2)])
}

/// Emits the source state for `id` by applying creation operators to the
/// vacuum (for the emission-defined states), falling back to the
/// closed-form reference for prepared states.
///
/// `PSI_POL` is one pair emission, `POL4` two successive pair emissions
/// (which is what fixes its three equal weights), `GHZ3` a three-fold
/// correlated emission.
pub fn source_in(registry: &Arc<ModeRegistry>, id: StateId) -> Result<PhotonicState> {
    let vacuum = PhotonicState::vacuum(Arc::clone(registry));
    match id {
        StateId::PsiPol => pair_emission(&vacuum, 1, 2)?.normalize(),
        StateId::Pol4 => pair_emission(&pair_emission(&vacuum, 1, 2)?, 1, 2)?.normalize(),
        StateId::Ghz3 => {
            let one = Complex64::new(1.0, 0.0);
            let t1 = vacuum
                .apply_creation(ModeLabel::new(1, H, 0))?
                .apply_creation(ModeLabel::new(2, V, 0))?
                .apply_creation(ModeLabel::new(3, V, 0))?;
            let t2 = vacuum
                .apply_creation(ModeLabel::new(1, V, 0))?
                .apply_creation(ModeLabel::new(2, H, 0))?
                .apply_creation(ModeLabel::new(3, H, 0))?;
            PhotonicState::superpose(&[(one, &t1), (one, &t2)])?.normalize()
        }
        other => reference_state_in(registry, other),
    }
}

/// An element sequence with its source and (optionally) the state it is
/// expected to produce.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub name: String,
    pub description: String,
    pub source: StateId,
    pub expected: Option<StateId>,
    pub elements: Vec<ElementSpec>,
    /// All paths the registry must contain, ascending.
    pub paths: Vec<u32>,
}

/// The paths an element touches.
fn element_paths(spec: &ElementSpec) -> Vec<u32> {
    match spec {
        ElementSpec::Hwp { path, .. }
        | ElementSpec::Qwp { path, .. }
        | ElementSpec::Polarizer { path, .. }
        | ElementSpec::QPlate { path }
        | ElementSpec::OamImprint { path, .. }
        | ElementSpec::SlitMask { path, .. }
        | ElementSpec::Transferrer { path, .. } => vec![*path],
        ElementSpec::Pbs { path_a, path_b } => vec![*path_a, *path_b],
        ElementSpec::ForkHologram {
            input,
            port_plus,
            port_minus,
        } => vec![*input, *port_plus, *port_minus],
        ElementSpec::PathMergeLens { output } => vec![*output],
    }
}

/// Assembles a pipeline, collecting the registry paths from the source,
/// the expected state and every element.
pub fn pipeline_from_elements(
    name: impl Into<String>,
    description: impl Into<String>,
    elements: Vec<ElementSpec>,
    source: StateId,
    expected: Option<StateId>,
) -> Pipeline {
    let mut paths: std::collections::BTreeSet<u32> = source.paths().iter().copied().collect();
    if let Some(id) = expected {
        paths.extend(id.paths().iter().copied());
    }
    for spec in &elements {
        paths.extend(element_paths(spec));
    }
    Pipeline {
        name: name.into(),
        description: description.into(),
        source,
        expected,
        elements,
        paths: paths.into_iter().collect(),
    }
}

/// Names of all built-in pipelines.
pub fn pipeline_names() -> [&'static str; 9] {
    [
        "pair-combine",
        "pair-sort-pol",
        "pair-sort-oam",
        "triple-combine",
        "triple-sort-pol",
        "triple-sort-oam",
        "quad-combine",
        "quad-sort-pol",
        "quad-sort-oam",
    ]
}

fn transfer(path: u32) -> ElementSpec {
    ElementSpec::Transferrer {
        path,
        kind: TransferrerKind::QPlate {
            success_probability: 1.0,
        },
    }
}

fn hwp45(path: u32) -> ElementSpec {
    ElementSpec::Hwp {
        path,
        theta_deg: 45.0,
    }
}

const PBS12: ElementSpec = ElementSpec::Pbs {
    path_a: 1,
    path_b: 2,
};

const FORK12: ElementSpec = ElementSpec::ForkHologram {
    input: 1,
    port_plus: 1,
    port_minus: 2,
};

/// A built-in pipeline by name.
pub fn named_pipeline(name: &str) -> Result<Pipeline> {
    let (description, source, expected, elements): (&str, StateId, StateId, Vec<ElementSpec>) =
        match name {
            "pair-combine" => (
                "move a photon pair's polarization entanglement onto one path \
                 as a joint polarization-OAM state",
                StateId::PsiPol,
                StateId::PsiPolOam,
                vec![transfer(1), transfer(2), hwp45(2), PBS12],
            ),
            "pair-sort-pol" => (
                "split the one-path pair state by polarization, leaving OAM \
                 entanglement between two paths",
                StateId::PsiPolOam,
                StateId::PsiOam,
                vec![PBS12, hwp45(2)],
            ),
            "pair-sort-oam" => (
                "split the one-path pair state by OAM, leaving polarization \
                 entanglement between two paths",
                StateId::PsiPolOam,
                StateId::PsiPol,
                vec![FORK12],
            ),
            "triple-combine" => (
                "move a three-photon GHZ correlation onto one path as a joint \
                 polarization-OAM state",
                StateId::Ghz3,
                StateId::Ghz3Single,
                vec![
                    transfer(1),
                    transfer(2),
                    transfer(3),
                    hwp45(2),
                    hwp45(3),
                    ElementSpec::PathMergeLens { output: 1 },
                ],
            ),
            "triple-sort-pol" => (
                "split the one-path triple state by polarization, leaving an \
                 OAM GHZ correlation between two paths",
                StateId::Ghz3Single,
                StateId::Oam3,
                vec![PBS12, hwp45(2)],
            ),
            "triple-sort-oam" => (
                "split the one-path triple state by OAM, leaving a \
                 polarization GHZ correlation between two paths",
                StateId::Ghz3Single,
                StateId::Pol3,
                vec![FORK12],
            ),
            "quad-combine" => (
                "imprint opposite OAM on the two arms of a double pair \
                 emission and merge them onto one path",
                StateId::Pol4,
                StateId::Psi4,
                vec![
                    ElementSpec::OamImprint {
                        path: 1,
                        sign: Sign::Plus,
                    },
                    ElementSpec::OamImprint {
                        path: 2,
                        sign: Sign::Minus,
                    },
                    ElementSpec::PathMergeLens { output: 1 },
                ],
            ),
            "quad-sort-pol" => (
                "split the one-path four-photon state by polarization, \
                 leaving OAM correlations between two paths",
                StateId::Psi4,
                StateId::Oam4,
                vec![PBS12, hwp45(2)],
            ),
            "quad-sort-oam" => (
                "split the one-path four-photon state by OAM, recovering the \
                 polarization-correlated double pair",
                StateId::Psi4,
                StateId::Pol4,
                vec![FORK12],
            ),
            other => return Err(Error::UnknownPipeline(other.to_string())),
        };
    Ok(pipeline_from_elements(
        name,
        description,
        elements,
        source,
        Some(expected),
    ))
}

/// Everything a pipeline run produces.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub registry: Arc<ModeRegistry>,
    /// The source state fed into the first element.
    pub input: PhotonicState,
    /// The (normalized) state after the last element.
    pub output: PhotonicState,
    /// Product of all element success probabilities.
    pub probability: f64,
    pub expected: Option<PhotonicState>,
    /// Overlap `|<expected|output>|^2`, when an expected state is set.
    pub fidelity: Option<f64>,
}

/// Runs a pipeline at OAM order `l`.
///
/// Element errors are wrapped with the 1-based element position; a
/// post-selection that destroys the state entirely reports which element
/// did it.
pub fn run_pipeline(pipeline: &Pipeline, l: u32) -> Result<PipelineRun> {
    let registry = ModeRegistry::build(&pipeline.paths, l, true)?;
    let input = source_in(&registry, pipeline.source)?;
    let mut state = input.clone();
    let mut probability = 1.0;
    for (position, spec) in pipeline.elements.iter().enumerate() {
        let (next, p) = apply_element(&state, spec).map_err(|source| Error::ElementFailed {
            index: position + 1,
            element: spec.to_string(),
            source: Box::new(source),
        })?;
        if next.is_zero() {
            return Err(Error::Annihilated {
                index: position + 1,
                element: spec.to_string(),
            });
        }
        probability *= p;
        state = next;
    }
    let expected = match pipeline.expected {
        Some(id) => Some(reference_state_in(&registry, id)?),
        None => None,
    };
    let fidelity = match &expected {
        Some(reference) => Some(state.fidelity(reference)?),
        None => None,
    };
    Ok(PipelineRun {
        registry,
        input,
        output: state,
        probability,
        expected,
        fidelity,
    })
}

/// Parses a pipeline file: one element per line, `kind key=value ...`,
/// `#` comments, case-insensitive kinds.
///
/// ```text
/// transfer path=1 kind=qplate
/// hwp path=2 theta=45          # flip H and V
/// pbs path=1 out=2
/// imprint path=1 l=+1
/// fork path=1 out=1,2
/// mask path=2 gamma=-45
/// polarizer path=1 dir=d+
/// merge out=1
/// ```
///
/// `l=` shifts are validated against the registry OAM order `l`.
pub fn parse_pipeline(text: &str, l: u32) -> Result<Vec<ElementSpec>> {
    let mut specs = Vec::new();
    for (offset, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let spec = parse_line(line, l).map_err(|message| Error::PipelineParse {
            line: offset + 1,
            message,
        })?;
        specs.push(spec);
    }
    Ok(specs)
}

type ParseResult<T> = std::result::Result<T, String>;

struct Args(BTreeMap<String, String>);

impl Args {
    fn take(&mut self, key: &str) -> ParseResult<String> {
        self.0
            .remove(key)
            .ok_or_else(|| format!("missing key `{key}`"))
    }

    fn take_u32(&mut self, key: &str) -> ParseResult<u32> {
        let v = self.take(key)?;
        v.parse().map_err(|_| format!("`{key}` wants an unsigned integer, found `{v}`"))
    }

    fn take_f64(&mut self, key: &str) -> ParseResult<f64> {
        let v = self.take(key)?;
        v.parse().map_err(|_| format!("`{key}` wants a number, found `{v}`"))
    }

    fn finish(self) -> ParseResult<()> {
        match self.0.into_keys().next() {
            Some(key) => Err(format!("unexpected key `{key}`")),
            None => Ok(()),
        }
    }
}

fn parse_line(line: &str, l: u32) -> ParseResult<ElementSpec> {
    let mut parts = line.split_whitespace();
    let kind = parts
        .next()
        .expect("caller skips blank lines")
        .to_ascii_lowercase();
    let mut map = BTreeMap::new();
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{part}`"))?;
        if map
            .insert(key.to_ascii_lowercase(), value.to_string())
            .is_some()
        {
            return Err(format!("duplicate key `{key}`"));
        }
    }
    let mut args = Args(map);
    let spec = match kind.as_str() {
        "hwp" => ElementSpec::Hwp {
            path: args.take_u32("path")?,
            theta_deg: args.take_f64("theta")?,
        },
        "qwp" => ElementSpec::Qwp {
            path: args.take_u32("path")?,
            theta_deg: args.take_f64("theta")?,
        },
        "pbs" => ElementSpec::Pbs {
            path_a: args.take_u32("path")?,
            path_b: args.take_u32("out")?,
        },
        "polarizer" => {
            let path = args.take_u32("path")?;
            let dir = args.take("dir")?;
            let direction = dir.parse().map_err(|_| {
                format!("`dir` wants one of h, v, d+, d-, l, r, found `{dir}`")
            })?;
            ElementSpec::Polarizer { path, direction }
        }
        "qplate" => ElementSpec::QPlate {
            path: args.take_u32("path")?,
        },
        "imprint" => {
            let path = args.take_u32("path")?;
            let raw = args.take("l")?;
            let shift: i64 = raw
                .parse()
                .map_err(|_| format!("`l` wants a signed integer, found `{raw}`"))?;
            if shift.unsigned_abs() != u64::from(l) || shift == 0 {
                return Err(format!(
                    "imprint shift must be +{l} or -{l} to stay on the mode grid, found {raw}"
                ));
            }
            let sign = if shift > 0 { Sign::Plus } else { Sign::Minus };
            ElementSpec::OamImprint { path, sign }
        }
        "fork" => {
            let input = args.take_u32("path")?;
            let out = args.take("out")?;
            let (a, b) = out
                .split_once(',')
                .ok_or_else(|| format!("`out` wants two paths like `1,2`, found `{out}`"))?;
            let port_plus = a
                .trim()
                .parse()
                .map_err(|_| format!("`out` wants unsigned integers, found `{a}`"))?;
            let port_minus = b
                .trim()
                .parse()
                .map_err(|_| format!("`out` wants unsigned integers, found `{b}`"))?;
            ElementSpec::ForkHologram {
                input,
                port_plus,
                port_minus,
            }
        }
        "mask" => ElementSpec::SlitMask {
            path: args.take_u32("path")?,
            gamma_deg: args.take_f64("gamma")?,
        },
        "transfer" => {
            let path = args.take_u32("path")?;
            let kind_value = args.take("kind")?.to_ascii_lowercase();
            let kind = match kind_value.as_str() {
                "qplate" => {
                    let success_probability = match args.0.remove("p") {
                        Some(v) => v
                            .parse()
                            .map_err(|_| format!("`p` wants a number, found `{v}`"))?,
                        None => 1.0,
                    };
                    TransferrerKind::QPlate {
                        success_probability,
                    }
                }
                "slm" => {
                    if args.0.contains_key("p") {
                        return Err(
                            "`p` applies only to kind=qplate; the slm success rate is fixed"
                                .to_string(),
                        );
                    }
                    TransferrerKind::Slm
                }
                other => return Err(format!("`kind` wants qplate or slm, found `{other}`")),
            };
            ElementSpec::Transferrer { path, kind }
        }
        "merge" => {
            let output = if args.0.contains_key("out") {
                args.take_u32("out")?
            } else {
                args.take_u32("path")?
            };
            ElementSpec::PathMergeLens { output }
        }
        other => return Err(format!("unknown element `{other}`")),
    };
    args.finish()?;
    Ok(spec)
}
