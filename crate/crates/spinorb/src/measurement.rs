//! Counting experiments for the entanglement witness.
//!
//! The witness decomposition turns into ten detector settings: six joint
//! analyzer pairs (one per witness term) and four qubit-basis pairs used
//! for normalization. For the OAM encoding the analyzers are angular
//! double-slit masks: a mask rotated to `gamma` (degrees) transmits the
//! superposition `(|+l> + e^{i phase}|-l>)/sqrt(2)` with
//! `phase = 2 l gamma`, whose transverse intensity
//! `(1 + cos(2 l theta - phase))/(2 pi)` shows `2l` angular maxima. For
//! the polarization encoding they are ordinary polarization analyzers.
//!
//! [`sample_counts`] simulates the counting run with reproducible shot
//! noise: every setting draws from a binomial distribution on its own
//! deterministic stream of one seeded generator, so records are stable
//! across runs, platforms and setting reorderings. [`estimate_witness`]
//! reconstructs the witness value from counts alone, normalizing by the
//! summed basis rates exactly as a coincidence experiment would.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::fock::{outcome_probability, PhotonicState, PolState, Projector};
use crate::witness::{WitnessDof, WitnessOperator, TERM_PATTERN};

/// Mask phase (radians) for a mask rotated to `gamma_deg`, at OAM order
/// `l`: `phase = 2 l gamma` converted to radians.
pub fn phase_from_angle(gamma_deg: f64, l: u32) -> f64 {
    (2.0 * l as f64 * gamma_deg).to_radians()
}

/// Mask rotation (degrees) realizing a given phase at OAM order `l`.
pub fn angle_from_phase(phase: f64, l: u32) -> f64 {
    phase.to_degrees() / (2.0 * l as f64)
}

/// Angular intensity profile behind a mask-superposition state:
/// `(1 + cos(2 l theta - phase)) / (2 pi)`, normalized over a full turn.
pub fn angular_intensity(theta: f64, l: u32, phase: f64) -> f64 {
    (1.0 + (2.0 * l as f64 * theta - phase).cos()) / std::f64::consts::TAU
}

/// The `2l` angular positions in `[0, 2pi)` where the intensity peaks,
/// ascending.
pub fn intensity_maxima(l: u32, phase: f64) -> Vec<f64> {
    let base = phase.rem_euclid(std::f64::consts::TAU);
    let two_l = 2 * l as usize;
    (0..two_l)
        .map(|k| (base + std::f64::consts::TAU * k as f64) / (two_l as f64))
        .collect()
}

/// The physical analyzer placed on one path for one setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathAnalyzer {
    /// Angular double-slit mask rotated to `gamma_deg`.
    OamMask { gamma_deg: f64 },
    /// OAM sorter port transmitting `+l` (`plus`) or `-l`.
    OamBasis { plus: bool },
    /// Polarization analyzer.
    Pol(PolState),
}

impl std::fmt::Display for PathAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathAnalyzer::OamMask { gamma_deg } => write!(f, "mask at {gamma_deg}deg"),
            PathAnalyzer::OamBasis { plus } => {
                write!(f, "sorter port {}", if *plus { "+l" } else { "-l" })
            }
            PathAnalyzer::Pol(p) => write!(f, "polarization analyzer {p}"),
        }
    }
}

/// One detector setting: a joint analyzer pair with its label.
#[derive(Clone, Debug)]
pub struct MeasurementSetting {
    /// `W:<term>` for the six witness settings, `B:<pair>` for the four
    /// basis settings.
    pub label: String,
    pub analyzer_a: PathAnalyzer,
    pub analyzer_b: PathAnalyzer,
}

/// The six analyzers for one encoding, in term-state order
/// `[e0, e1, d+, d-, L, R]`.
fn analyzers_for(dof: WitnessDof, l: u32) -> [PathAnalyzer; 6] {
    match dof {
        WitnessDof::Oam => {
            let unit = 1.0 / l as f64;
            [
                PathAnalyzer::OamBasis { plus: true },
                PathAnalyzer::OamBasis { plus: false },
                PathAnalyzer::OamMask { gamma_deg: 0.0 },
                PathAnalyzer::OamMask {
                    gamma_deg: 90.0 * unit,
                },
                PathAnalyzer::OamMask {
                    gamma_deg: 45.0 * unit,
                },
                PathAnalyzer::OamMask {
                    gamma_deg: -45.0 * unit,
                },
            ]
        }
        WitnessDof::Polarization => [
            PathAnalyzer::Pol(PolState::H),
            PathAnalyzer::Pol(PolState::V),
            PathAnalyzer::Pol(PolState::DPlus),
            PathAnalyzer::Pol(PolState::DMinus),
            PathAnalyzer::Pol(PolState::L),
            PathAnalyzer::Pol(PolState::R),
        ],
    }
}

/// The full ten-setting protocol for a witness: its six terms followed by
/// the four qubit-basis normalization settings.
pub fn protocol_settings(witness: &WitnessOperator) -> Vec<MeasurementSetting> {
    let analyzers = analyzers_for(witness.dof(), witness.registry().l());
    let mut settings = Vec::with_capacity(10);
    for (term, (ia, ib, _)) in witness.terms().iter().zip(TERM_PATTERN) {
        settings.push(MeasurementSetting {
            label: format!("W:{}", term.label),
            analyzer_a: analyzers[ia],
            analyzer_b: analyzers[ib],
        });
    }
    for qa in 0..2 {
        for qb in 0..2 {
            settings.push(MeasurementSetting {
                label: format!("B:{}", witness.basis_label(qa, qb)),
                analyzer_a: analyzers[qa],
                analyzer_b: analyzers[qb],
            });
        }
    }
    settings
}

fn analyzer_projector(
    witness: &WitnessOperator,
    path: u32,
    analyzer: &PathAnalyzer,
) -> Result<Projector> {
    let registry = witness.registry();
    match analyzer {
        PathAnalyzer::OamMask { gamma_deg } => {
            Projector::oam_mask(registry, path, phase_from_angle(*gamma_deg, registry.l()))
        }
        PathAnalyzer::OamBasis { plus } => Projector::oam_basis(registry, path, *plus),
        PathAnalyzer::Pol(p) => Projector::polarization(registry, path, *p),
    }
}

/// Exact joint detection probability of one setting — built from the
/// physical analyzer descriptions, independently of the witness terms'
/// stored projectors.
pub fn setting_probability(
    state: &PhotonicState,
    witness: &WitnessOperator,
    setting: &MeasurementSetting,
) -> Result<f64> {
    let (path_a, path_b) = witness.paths();
    let joint = analyzer_projector(witness, path_a, &setting.analyzer_a)?
        .and(analyzer_projector(witness, path_b, &setting.analyzer_b)?)?;
    outcome_probability(state, &joint)
}

/// Counts observed at one setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountEntry {
    pub label: String,
    pub shots: u64,
    pub counts: u64,
}

/// A complete counting run: six witness settings, four basis settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    pub witness: Vec<CountEntry>,
    pub basis: Vec<CountEntry>,
    pub seed: u64,
}

impl CountRecord {
    /// Serializes as CSV with header `setting_label,shots,counts,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting_label,shots,counts,seed\n");
        for entry in self.witness.iter().chain(&self.basis) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                entry.label, entry.shots, entry.counts, self.seed
            ));
        }
        out
    }
}

/// Simulates the ten-setting counting run with `shots` trials per
/// setting.
///
/// Reproducible: setting `k` draws its binomial count from stream `k` of
/// a generator seeded with `seed`, so every setting's counts depend only
/// on `(seed, k, shots, probability)`.
pub fn sample_counts(
    state: &PhotonicState,
    witness: &WitnessOperator,
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    let settings = protocol_settings(witness);
    let mut entries = Vec::with_capacity(settings.len());
    for (k, setting) in settings.iter().enumerate() {
        let p = setting_probability(state, witness, setting)?.clamp(0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let counts = Binomial::new(shots, p)
            .expect("probability is clamped to [0, 1]")
            .sample(&mut rng);
        entries.push(CountEntry {
            label: setting.label.clone(),
            shots,
            counts,
        });
    }
    let basis = entries.split_off(6);
    Ok(CountRecord {
        witness: entries,
        basis,
        seed,
    })
}

/// Reconstructs the witness value from counts: each witness rate is
/// normalized by the summed basis rates (the coincidence rate), then the
/// signed sum of the six terms is taken.
pub fn estimate_witness(witness: &WitnessOperator, record: &CountRecord) -> Result<f64> {
    let settings = protocol_settings(witness);
    if record.witness.len() != 6 || record.basis.len() != 4 {
        return Err(Error::MissingSetting(format!(
            "expected 6 witness and 4 basis entries, found {} and {}",
            record.witness.len(),
            record.basis.len()
        )));
    }
    for (entry, setting) in record.witness.iter().chain(&record.basis).zip(&settings) {
        if entry.label != setting.label {
            return Err(Error::MissingSetting(setting.label.clone()));
        }
        if entry.shots == 0 {
            return Err(Error::InvalidParameter {
                element: format!("count record `{}`", entry.label),
                detail: "shots must be positive".to_string(),
            });
        }
    }
    let basis_rate: f64 = record
        .basis
        .iter()
        .map(|e| e.counts as f64 / e.shots as f64)
        .sum();
    if basis_rate <= 0.0 {
        return Err(Error::EmptyBasisCounts);
    }
    let mut value = 0.0;
    for (entry, term) in record.witness.iter().zip(witness.terms()) {
        let rate = entry.counts as f64 / entry.shots as f64;
        value += term.coefficient * rate / basis_rate;
    }
    Ok(value)
}

/// The counting estimator evaluated on exact probabilities instead of
/// sampled counts; equals the conditional witness expectation.
pub fn estimate_from_exact(witness: &WitnessOperator, state: &PhotonicState) -> Result<f64> {
    let settings = protocol_settings(witness);
    let probabilities: Vec<f64> = settings
        .iter()
        .map(|s| setting_probability(state, witness, s))
        .collect::<Result<_>>()?;
    let basis_rate: f64 = probabilities[6..].iter().sum();
    if basis_rate <= 1e-24 {
        return Err(Error::WitnessDomain(
            "the basis settings have zero total probability".to_string(),
        ));
    }
    let mut value = 0.0;
    for (p, term) in probabilities[..6].iter().zip(witness.terms()) {
        value += term.coefficient * p / basis_rate;
    }
    Ok(value)
}
