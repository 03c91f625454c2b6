//! Projective measurements on spatial paths.
//!
//! Detection is modelled path by path: a [`Projector`] carries, for each
//! measured path, an orthonormal span of single-photon states
//! ([`LocalState`]s over polarization and OAM on that path). Its action
//!
//! `Q_p = sum_k  b_{v_k}^dag |0_p><0_p| b_{v_k}`
//!
//! keeps exactly the components with *exactly one* photon on path `p`, and
//! that photon inside the span. A polarization analyzer is a span over all
//! OAM values at fixed polarization (it does not resolve OAM); an angular
//! slit mask is a span over both polarizations at a fixed OAM superposition
//! (it does not resolve polarization); a rank-one projector is a singleton
//! span.
//!
//! [`project`] returns the renormalized post-measurement state together
//! with the measurement probability, and folds that probability into the
//! state's cumulative success probability.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::state::NORM_SQR_TOLERANCE;
use super::{ModeLabel, ModeRegistry, PhotonicState, Polarization};

/// Named single-qubit polarization states on the Poincaré sphere.
///
/// Circular states fix the convention used throughout the crate:
/// `L = (H + iV)/sqrt(2)` and `R = (H - iV)/sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolState {
    H,
    V,
    /// Diagonal `(H + V)/sqrt(2)`.
    DPlus,
    /// Anti-diagonal `(H - V)/sqrt(2)`.
    DMinus,
    /// Left circular `(H + iV)/sqrt(2)`.
    L,
    /// Right circular `(H - iV)/sqrt(2)`.
    R,
}

impl PolState {
    /// Components `[c_H, c_V]` in the linear basis.
    pub fn components(self) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            PolState::H => [c(1.0, 0.0), c(0.0, 0.0)],
            PolState::V => [c(0.0, 0.0), c(1.0, 0.0)],
            PolState::DPlus => [c(s, 0.0), c(s, 0.0)],
            PolState::DMinus => [c(s, 0.0), c(-s, 0.0)],
            PolState::L => [c(s, 0.0), c(0.0, s)],
            PolState::R => [c(s, 0.0), c(0.0, -s)],
        }
    }
}

impl fmt::Display for PolState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolState::H => "H",
            PolState::V => "V",
            PolState::DPlus => "D+",
            PolState::DMinus => "D-",
            PolState::L => "L",
            PolState::R => "R",
        })
    }
}

impl FromStr for PolState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(PolState::H),
            "v" => Ok(PolState::V),
            "d+" | "dplus" => Ok(PolState::DPlus),
            "d-" | "dminus" => Ok(PolState::DMinus),
            "l" => Ok(PolState::L),
            "r" => Ok(PolState::R),
            other => Err(Error::UnknownState(format!("polarization `{other}`"))),
        }
    }
}

/// A single-photon state on one path: amplitudes over (polarization, OAM).
#[derive(Clone, Debug)]
pub struct LocalState {
    entries: Vec<(Polarization, i32, Complex64)>,
}

impl LocalState {
    /// Builds from raw entries, merging duplicates and dropping zeros.
    pub fn new(entries: Vec<(Polarization, i32, Complex64)>) -> Self {
        let mut merged: Vec<(Polarization, i32, Complex64)> = Vec::new();
        for (pol, oam, amp) in entries {
            if let Some(e) = merged.iter_mut().find(|(p, o, _)| *p == pol && *o == oam) {
                e.2 += amp;
            } else {
                merged.push((pol, oam, amp));
            }
        }
        merged.retain(|(_, _, amp)| amp.norm_sqr() > 0.0);
        Self { entries: merged }
    }

    /// The basis state with definite polarization and OAM.
    pub fn basis(pol: Polarization, oam: i32) -> Self {
        Self {
            entries: vec![(pol, oam, Complex64::new(1.0, 0.0))],
        }
    }

    /// A named polarization state at definite OAM.
    pub fn polarization(pol: PolState, oam: i32) -> Self {
        let [ch, cv] = pol.components();
        Self::new(vec![
            (Polarization::H, oam, ch),
            (Polarization::V, oam, cv),
        ])
    }

    /// A superposition over OAM values at definite polarization.
    pub fn oam_superposition(pol: Polarization, terms: &[(i32, Complex64)]) -> Self {
        Self::new(
            terms
                .iter()
                .map(|&(oam, amp)| (pol, oam, amp))
                .collect(),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, _, a)| a.norm_sqr()).sum()
    }

    /// Unit-norm copy; errors on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= NORM_SQR_TOLERANCE {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / n2.sqrt();
        Ok(Self {
            entries: self
                .entries
                .iter()
                .map(|&(p, o, a)| (p, o, a * inv))
                .collect(),
        })
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(p, o, a) in &self.entries {
            for &(q, u, b) in &other.entries {
                if p == q && o == u {
                    acc += a.conj() * b;
                }
            }
        }
        acc
    }

    /// Resolves to sparse registry-mode coordinates on a given path.
    pub fn mode_vector(
        &self,
        registry: &ModeRegistry,
        path: u32,
    ) -> Result<Vec<(usize, Complex64)>> {
        self.entries
            .iter()
            .map(|&(pol, oam, amp)| {
                registry
                    .index_of(ModeLabel::new(path, pol, oam))
                    .map(|idx| (idx, amp))
            })
            .collect()
    }
}

/// Maximum tolerated deviation from orthonormality inside a projector span.
const ORTHONORMALITY_TOLERANCE: f64 = 1e-9;

/// A product of per-path projectors, each selecting exactly one photon
/// inside an orthonormal span of local states.
#[derive(Clone, Debug)]
pub struct Projector {
    parts: Vec<(u32, Vec<LocalState>)>,
}

impl Projector {
    /// Builds from per-path spans. Span vectors are normalized; residual
    /// non-orthogonality beyond 1e-9 and duplicate paths are errors.
    pub fn new(parts: Vec<(u32, Vec<LocalState>)>) -> Result<Self> {
        let mut seen = Vec::new();
        let mut checked = Vec::with_capacity(parts.len());
        for (path, span) in parts {
            if seen.contains(&path) {
                return Err(Error::IdenticalPaths(path));
            }
            seen.push(path);
            if span.is_empty() {
                return Err(Error::ProjectorNotOrthonormal {
                    path,
                    detail: "empty span".to_string(),
                });
            }
            let span: Vec<LocalState> = span
                .iter()
                .map(|v| v.normalized())
                .collect::<Result<_>>()?;
            for i in 0..span.len() {
                for j in (i + 1)..span.len() {
                    let overlap = span[i].dot(&span[j]).norm();
                    if overlap > ORTHONORMALITY_TOLERANCE {
                        return Err(Error::ProjectorNotOrthonormal {
                            path,
                            detail: format!(
                                "span vectors {i} and {j} overlap with |<i|j>| = {overlap:.3e}"
                            ),
                        });
                    }
                }
            }
            checked.push((path, span));
        }
        Ok(Self { parts: checked })
    }

    /// Projector onto a single local state on one path.
    pub fn rank1(path: u32, state: LocalState) -> Result<Self> {
        Self::new(vec![(path, vec![state])])
    }

    /// Polarization analyzer on one path: fixed polarization, blind to OAM
    /// (span over every registered OAM value).
    pub fn polarization(registry: &ModeRegistry, path: u32, pol: PolState) -> Result<Self> {
        let span = registry
            .oam_values()
            .iter()
            .map(|&oam| LocalState::polarization(pol, oam))
            .collect();
        Self::new(vec![(path, span)])
    }

    /// OAM-state analyzer on one path: fixed OAM superposition, blind to
    /// polarization (span over both linear polarizations).
    pub fn oam_state(path: u32, terms: &[(i32, Complex64)]) -> Result<Self> {
        let span = Polarization::BOTH
            .iter()
            .map(|&pol| LocalState::oam_superposition(pol, terms))
            .collect();
        Self::new(vec![(path, span)])
    }

    /// Angular slit mask on one path: projects OAM onto
    /// `(|+l> + e^{i phase} |-l>)/sqrt(2)`, blind to polarization.
    pub fn oam_mask(registry: &ModeRegistry, path: u32, phase: f64) -> Result<Self> {
        let l = registry.l() as i32;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::oam_state(
            path,
            &[
                (l, Complex64::new(s, 0.0)),
                (-l, Complex64::from_polar(s, phase)),
            ],
        )
    }

    /// OAM basis analyzer on one path: definite `+l` or `-l`, blind to
    /// polarization.
    pub fn oam_basis(registry: &ModeRegistry, path: u32, plus: bool) -> Result<Self> {
        let l = registry.l() as i32;
        let oam = if plus { l } else { -l };
        Self::oam_state(path, &[(oam, Complex64::new(1.0, 0.0))])
    }

    /// The measured paths in declaration order.
    pub fn paths(&self) -> impl Iterator<Item = u32> + '_ {
        self.parts.iter().map(|(p, _)| *p)
    }

    pub(crate) fn parts(&self) -> &[(u32, Vec<LocalState>)] {
        &self.parts
    }

    /// Joins two projectors on disjoint path sets.
    pub fn and(self, other: Projector) -> Result<Self> {
        let mut parts = self.parts;
        parts.extend(other.parts);
        Self::new(parts)
    }
}

/// Applies a projector and renormalizes.
///
/// Returns the post-measurement state and the probability
/// `|Q psi|^2 / |psi|^2`; the state's success probability is multiplied by
/// that factor. A fully suppressed outcome returns the zero state with
/// probability `0.0` — callers decide whether that is fatal.
pub fn project(state: &PhotonicState, projector: &Projector) -> Result<(PhotonicState, f64)> {
    let input_norm_sqr = state.norm_sqr();
    if input_norm_sqr <= NORM_SQR_TOLERANCE {
        return Err(Error::ZeroNorm);
    }
    let mut current = state.clone();
    for (path, span) in projector.parts() {
        let mut next = current.zero_like();
        for local in span {
            let lowered = current.annihilate_local(*path, local)?;
            let cleared = lowered.strip_path_nonvacuum(*path)?;
            let raised = cleared.create_local(*path, local)?;
            next.add_assign(&raised);
        }
        next.prune();
        current = next;
        if current.is_zero() {
            break;
        }
    }
    let probability = current.norm_sqr() / input_norm_sqr;
    if probability <= NORM_SQR_TOLERANCE {
        let mut zero = state.zero_like();
        zero.set_success_probability(0.0);
        return Ok((zero, 0.0));
    }
    let mut out = current.normalize()?;
    out.set_success_probability(state.success_probability() * probability);
    Ok((out, probability))
}

/// Convenience: probability of a projective outcome without keeping the
/// post-measurement state.
pub fn outcome_probability(state: &PhotonicState, projector: &Projector) -> Result<f64> {
    project(state, projector).map(|(_, p)| p)
}
