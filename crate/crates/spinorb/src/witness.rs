//! Two-qubit entanglement witness for photon pairs.
//!
//! For two photons on distinct paths, a qubit is encoded either in OAM
//! (basis `|+l>`, `|-l>`; polarization is a spectator) or in polarization
//! (basis `|H>`, `|V>`; OAM is a spectator). The witness
//!
//! `W = 1/2 - |Psi+><Psi+|`,  `|Psi+> = (|01> + |10>)/sqrt(2)`
//!
//! has negative expectation only on entangled states; product states give
//! `<W> >= 0`, with minimum exactly 0. `W` decomposes into six local
//! projective measurements with coefficients `+-1/2`:
//!
//! `W = 1/2 (P_00 + P_11 - P_d+d+ - P_d-d- + P_LR + P_RL)`
//!
//! where `d+- = (|0> +- |1>)/sqrt(2)` and `L/R = (|0> +- i|1>)/sqrt(2)`.
//! Expectations are *conditioned on coincidence*: every probability is
//! divided by the probability that each witness path carries exactly one
//! photon inside the qubit space, matching how counting experiments
//! normalize by the sum of the four basis rates.
//!
//! [`separable_value`] gives the closed form of `<W>` on an arbitrary
//! product state, [`separable_components`] and
//! [`separable_components_trig`] give the six measured probabilities via
//! two independent algebraic routes, and [`min_separable`] minimizes the
//! closed form numerically over all product states.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    outcome_probability, LocalState, ModeLabel, ModeRegistry, PhotonicState, Polarization,
    Projector,
};

/// Which degree of freedom carries the witnessed qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessDof {
    /// Qubit in OAM (`|0> = |+l>`, `|1> = |-l>`), polarization spectator.
    Oam,
    /// Qubit in polarization (`|0> = |H>`, `|1> = |V>`), OAM spectator.
    Polarization,
}

impl WitnessDof {
    /// Display names of the two qubit basis states.
    pub fn basis_names(self) -> [&'static str; 2] {
        match self {
            WitnessDof::Oam => ["+l", "-l"],
            WitnessDof::Polarization => ["H", "V"],
        }
    }

    /// Display names of the six analyzer states, in term order
    /// `0, 1, d+, d-, L, R`.
    fn analyzer_names(self) -> [&'static str; 6] {
        match self {
            WitnessDof::Oam => ["+l", "-l", "d+", "d-", "L", "R"],
            WitnessDof::Polarization => ["H", "V", "D+", "D-", "L", "R"],
        }
    }
}

/// One measured term of the witness decomposition.
#[derive(Clone, Debug)]
pub struct WitnessTerm {
    /// `+0.5` or `-0.5`.
    pub coefficient: f64,
    /// Analyzer pair, e.g. `d+|d+` or `L|R`.
    pub label: String,
    /// Qubit-space analyzer state on the first path.
    pub qubit_a: [Complex64; 2],
    /// Qubit-space analyzer state on the second path.
    pub qubit_b: [Complex64; 2],
    /// The joint two-path projector realizing this term.
    pub projector: Projector,
}

/// Result of evaluating the witness on a state.
#[derive(Clone, Copy, Debug)]
pub struct WitnessExpectation {
    /// `<W>` conditioned on coincidence.
    pub value: f64,
    /// Probability that both witness paths carry exactly one photon
    /// inside the qubit space.
    pub coincidence_probability: f64,
}

/// The witness, bound to a registry, a qubit encoding and two paths.
#[derive(Clone, Debug)]
pub struct WitnessOperator {
    dof: WitnessDof,
    path_a: u32,
    path_b: u32,
    registry: Arc<ModeRegistry>,
    /// Coefficient of the identity in `W = 1/2 * 1 - |Psi+><Psi+|`; kept
    /// for reporting. The six-term signed sum needs no identity offset.
    pub identity_coefficient: f64,
    terms: Vec<WitnessTerm>,
}

/// The six analyzer pairs of the decomposition, as
/// (state index a, state index b, sign) over the analyzer list
/// `[e0, e1, d+, d-, L, R]`.
pub(crate) const TERM_PATTERN: [(usize, usize, f64); 6] = [
    (0, 0, 1.0),
    (1, 1, 1.0),
    (2, 2, -1.0),
    (3, 3, -1.0),
    (4, 5, 1.0),
    (5, 4, 1.0),
];

/// The six analyzer states in the qubit basis.
fn analyzer_states() -> [[Complex64; 2]; 6] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(s, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-s, 0.0)],
        [c(s, 0.0), c(0.0, s)],
        [c(s, 0.0), c(0.0, -s)],
    ]
}

/// Builds the witness for a qubit pair on `paths`, encoded in `dof`.
pub fn bell_witness(
    registry: &Arc<ModeRegistry>,
    dof: WitnessDof,
    paths: (u32, u32),
) -> Result<WitnessOperator> {
    let (path_a, path_b) = paths;
    if path_a == path_b {
        return Err(Error::IdenticalPaths(path_a));
    }
    registry.path_block(path_a)?;
    registry.path_block(path_b)?;
    let states = analyzer_states();
    let names = dof.analyzer_names();
    let mut terms = Vec::with_capacity(6);
    for (ia, ib, sign) in TERM_PATTERN {
        let qubit_a = states[ia];
        let qubit_b = states[ib];
        let projector = qubit_projector(registry, dof, path_a, qubit_a)?
            .and(qubit_projector(registry, dof, path_b, qubit_b)?)?;
        terms.push(WitnessTerm {
            coefficient: 0.5 * sign,
            label: format!("{}|{}", names[ia], names[ib]),
            qubit_a,
            qubit_b,
            projector,
        });
    }
    Ok(WitnessOperator {
        dof,
        path_a,
        path_b,
        registry: Arc::clone(registry),
        identity_coefficient: 0.5,
        terms,
    })
}

/// Projector selecting one qubit-space state on one path, blind to the
/// spectator degree of freedom.
fn qubit_projector(
    registry: &Arc<ModeRegistry>,
    dof: WitnessDof,
    path: u32,
    q: [Complex64; 2],
) -> Result<Projector> {
    match dof {
        WitnessDof::Oam => {
            let l = registry.l() as i32;
            Projector::oam_state(path, &[(l, q[0]), (-l, q[1])])
        }
        WitnessDof::Polarization => {
            let span = registry
                .oam_values()
                .iter()
                .map(|&oam| {
                    LocalState::new(vec![
                        (Polarization::H, oam, q[0]),
                        (Polarization::V, oam, q[1]),
                    ])
                })
                .collect();
            Projector::new(vec![(path, span)])
        }
    }
}

/// Coincidence amplitudes of a two-photon state, organized as
/// `c[qubit_a][spect_a][qubit_b][spect_b]`.
struct CoincidenceTensor {
    data: Vec<Complex64>,
    spect_dim: usize,
}

impl CoincidenceTensor {
    fn at(&self, qa: usize, sa: usize, qb: usize, sb: usize) -> Complex64 {
        let n = self.spect_dim;
        self.data[((qa * n + sa) * 2 + qb) * n + sb]
    }

    fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl WitnessOperator {
    pub fn dof(&self) -> WitnessDof {
        self.dof
    }

    pub fn paths(&self) -> (u32, u32) {
        (self.path_a, self.path_b)
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn terms(&self) -> &[WitnessTerm] {
        &self.terms
    }

    /// Projector for a joint qubit-basis outcome (used by the four
    /// normalization settings of the counting protocol).
    pub fn basis_projector(&self, qa: usize, qb: usize) -> Result<Projector> {
        let states = analyzer_states();
        qubit_projector(&self.registry, self.dof, self.path_a, states[qa])?
            .and(qubit_projector(&self.registry, self.dof, self.path_b, states[qb])?)
    }

    /// Label for a joint qubit-basis outcome, e.g. `+l|-l`.
    pub fn basis_label(&self, qa: usize, qb: usize) -> String {
        let names = self.dof.basis_names();
        format!("{}|{}", names[qa], names[qb])
    }

    fn mode(&self, path: u32, qubit: usize, spect: usize) -> ModeLabel {
        match self.dof {
            WitnessDof::Oam => {
                let l = self.registry.l() as i32;
                let oam = if qubit == 0 { l } else { -l };
                ModeLabel::new(path, Polarization::BOTH[spect], oam)
            }
            WitnessDof::Polarization => ModeLabel::new(
                path,
                Polarization::BOTH[qubit],
                self.registry.oam_values()[spect],
            ),
        }
    }

    fn coincidence_tensor(&self, state: &PhotonicState) -> Result<CoincidenceTensor> {
        if state.photon_number() != 2 {
            return Err(Error::WitnessDomain(format!(
                "needs exactly 2 photons, state carries {}",
                state.photon_number()
            )));
        }
        let spect_dim = match self.dof {
            WitnessDof::Oam => 2,
            WitnessDof::Polarization => self.registry.oam_values().len(),
        };
        let mut data = Vec::with_capacity(4 * spect_dim * spect_dim);
        for qa in 0..2 {
            for sa in 0..spect_dim {
                for qb in 0..2 {
                    for sb in 0..spect_dim {
                        let ma = self.mode(self.path_a, qa, sa);
                        let mb = self.mode(self.path_b, qb, sb);
                        data.push(state.basis_amplitude(&[ma, mb])?);
                    }
                }
            }
        }
        Ok(CoincidenceTensor { data, spect_dim })
    }

    /// Exact `<W>` conditioned on coincidence, via the coincidence
    /// amplitudes: `<W> = 1/2 - F/p_cc` with `F` the overlap with the
    /// target Bell state (spectators traced out).
    pub fn expectation(&self, state: &PhotonicState) -> Result<WitnessExpectation> {
        let norm_sqr = state.norm_sqr();
        if norm_sqr <= 1e-24 {
            return Err(Error::ZeroNorm);
        }
        let tensor = self.coincidence_tensor(state)?;
        let p_cc = tensor.norm_sqr() / norm_sqr;
        if p_cc <= 1e-24 {
            return Err(Error::WitnessDomain(
                "no coincidence amplitude between the witness paths".to_string(),
            ));
        }
        let mut overlap = 0.0;
        for sa in 0..tensor.spect_dim {
            for sb in 0..tensor.spect_dim {
                let sym = tensor.at(0, sa, 1, sb) + tensor.at(1, sa, 0, sb);
                overlap += sym.norm_sqr() / 2.0;
            }
        }
        let fidelity = overlap / norm_sqr;
        Ok(WitnessExpectation {
            value: 0.5 - fidelity / p_cc,
            coincidence_probability: p_cc,
        })
    }

    /// The six term probabilities conditioned on coincidence, in term
    /// order. Computed through the joint projectors — an independent
    /// route from [`Self::expectation`].
    pub fn component_probabilities(&self, state: &PhotonicState) -> Result<Vec<f64>> {
        let norm_sqr = state.norm_sqr();
        if norm_sqr <= 1e-24 {
            return Err(Error::ZeroNorm);
        }
        let tensor = self.coincidence_tensor(state)?;
        let p_cc = tensor.norm_sqr() / norm_sqr;
        if p_cc <= 1e-24 {
            return Err(Error::WitnessDomain(
                "no coincidence amplitude between the witness paths".to_string(),
            ));
        }
        self.terms
            .iter()
            .map(|term| Ok(outcome_probability(state, &term.projector)? / p_cc))
            .collect()
    }

    /// Signed sum `sum_i coef_i p_i` over conditional probabilities: the
    /// witness expectation as a counting experiment reconstructs it.
    pub fn expectation_from_components(&self, components: &[f64]) -> f64 {
        self.terms
            .iter()
            .zip(components)
            .map(|(t, p)| t.coefficient * p)
            .sum()
    }

    /// Max absolute entry of `(1/2 - |Psi+><Psi+|) - sum_i coef_i P_i` as
    /// 4x4 qubit-space matrices: zero (to rounding) iff the stored
    /// decomposition reproduces the witness operator.
    pub fn decomposition_deviation(&self) -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = [
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let mut direct = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, di) in direct.iter_mut().enumerate() {
            for (j, d) in di.iter_mut().enumerate() {
                let identity = if i == j { 0.5 } else { 0.0 };
                *d = Complex64::new(identity, 0.0) - psi_plus[i] * psi_plus[j].conj();
            }
        }
        let mut summed = [[Complex64::new(0.0, 0.0); 4]; 4];
        for term in &self.terms {
            let joint: Vec<Complex64> = (0..4)
                .map(|i| term.qubit_a[i / 2] * term.qubit_b[i % 2])
                .collect();
            for (i, si) in summed.iter_mut().enumerate() {
                for (j, sv) in si.iter_mut().enumerate() {
                    *sv += term.coefficient * joint[i] * joint[j].conj();
                }
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((direct[i][j] - summed[i][j]).norm());
            }
        }
        worst
    }
}

/// Parameters of a normalized two-qubit product state
/// `(a|0> + b e^{i phi1}|1>) (x) (c|0> + d e^{i phi2}|1>)`.
#[derive(Clone, Copy, Debug)]
pub struct SeparableParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl SeparableParams {
    /// Parameterizes the amplitudes on the unit circle:
    /// `a = cos(alpha), b = sin(alpha), c = cos(beta), d = sin(beta)`,
    /// so normalization holds by construction.
    pub fn from_angles(alpha: f64, beta: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            a: alpha.cos(),
            b: alpha.sin(),
            c: beta.cos(),
            d: beta.sin(),
            phi1,
            phi2,
        }
    }

    fn validate(&self) -> Result<()> {
        let na = self.a * self.a + self.b * self.b;
        let nb = self.c * self.c + self.d * self.d;
        if (na - 1.0).abs() > 1e-9 || (nb - 1.0).abs() > 1e-9 {
            return Err(Error::SeparableConstraint(format!(
                "a^2+b^2 = {na}, c^2+d^2 = {nb}"
            )));
        }
        Ok(())
    }

    /// First qubit as a complex vector.
    fn qubit_a(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.a, 0.0),
            Complex64::from_polar(self.b, self.phi1),
        ]
    }

    /// Second qubit as a complex vector.
    fn qubit_b(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.c, 0.0),
            Complex64::from_polar(self.d, self.phi2),
        ]
    }
}

/// Closed-form witness expectation on a product state:
/// `<W> = 1/2 [a^2 c^2 + b^2 d^2 - 2abcd cos(phi1 - phi2)] >= 0`.
pub fn separable_value(params: &SeparableParams) -> Result<f64> {
    params.validate()?;
    let SeparableParams {
        a, b, c, d, phi1, phi2, ..
    } = *params;
    Ok(0.5 * (a * a * c * c + b * b * d * d - 2.0 * a * b * c * d * (phi1 - phi2).cos()))
}

/// The same closed form, parameterized directly by the phase difference.
pub fn separable_value_phase_diff(a: f64, b: f64, c: f64, d: f64, delta: f64) -> Result<f64> {
    separable_value(&SeparableParams {
        a,
        b,
        c,
        d,
        phi1: delta,
        phi2: 0.0,
    })
}

/// The six witness-term probabilities on a product state, computed from
/// the joint analyzer amplitudes `<analyzer_a|q_a><analyzer_b|q_b>`.
pub fn separable_components(params: &SeparableParams) -> Result<[f64; 6]> {
    params.validate()?;
    let qa = params.qubit_a();
    let qb = params.qubit_b();
    let states = analyzer_states();
    let project = |analyzer: [Complex64; 2], q: [Complex64; 2]| {
        analyzer[0].conj() * q[0] + analyzer[1].conj() * q[1]
    };
    let mut out = [0.0; 6];
    for (k, (ia, ib, _)) in TERM_PATTERN.iter().enumerate() {
        out[k] = (project(states[*ia], qa) * project(states[*ib], qb)).norm_sqr();
    }
    Ok(out)
}

/// The six witness-term probabilities on a product state, via the fully
/// expanded trigonometric forms — an independent route from
/// [`separable_components`].
pub fn separable_components_trig(params: &SeparableParams) -> Result<[f64; 6]> {
    params.validate()?;
    let SeparableParams {
        a, b, c, d, phi1, phi2, ..
    } = *params;
    let (ab, cd) = (a * b, c * d);
    let (c1, c2) = (phi1.cos(), phi2.cos());
    let (s1, s2) = (phi1.sin(), phi2.sin());
    Ok([
        a * a * c * c,
        b * b * d * d,
        0.25 * (1.0 + 2.0 * ab * c1 + 2.0 * cd * c2 + 4.0 * ab * cd * c1 * c2),
        0.25 * (1.0 - 2.0 * ab * c1 - 2.0 * cd * c2 + 4.0 * ab * cd * c1 * c2),
        0.25 * (1.0 + 2.0 * ab * s1 - 2.0 * cd * s2 - 4.0 * ab * cd * s1 * s2),
        0.25 * (1.0 - 2.0 * ab * s1 + 2.0 * cd * s2 - 4.0 * ab * cd * s1 * s2),
    ])
}

/// Builds the physical two-photon product state described by `params`,
/// with the qubit in `dof` and the spectator in a fixed reference state.
pub fn product_state(
    registry: &Arc<ModeRegistry>,
    dof: WitnessDof,
    paths: (u32, u32),
    params: &SeparableParams,
) -> Result<PhotonicState> {
    params.validate()?;
    let spectator_oam = if registry.oam_values().contains(&0) {
        0
    } else {
        registry.oam_values()[0]
    };
    let l = registry.l() as i32;
    let local = |q: [Complex64; 2]| -> LocalState {
        match dof {
            WitnessDof::Oam => LocalState::new(vec![
                (Polarization::H, l, q[0]),
                (Polarization::H, -l, q[1]),
            ]),
            WitnessDof::Polarization => LocalState::new(vec![
                (Polarization::H, spectator_oam, q[0]),
                (Polarization::V, spectator_oam, q[1]),
            ]),
        }
    };
    let vacuum = PhotonicState::vacuum(Arc::clone(registry));
    let (path_a, path_b) = paths;
    let one = vacuum.create_local(path_a, &local(params.qubit_a()))?;
    one.create_local(path_b, &local(params.qubit_b()))
}

/// Result of minimizing `<W>` over product states.
#[derive(Clone, Copy, Debug)]
pub struct MinSeparableResult {
    pub params: SeparableParams,
    /// Minimal `<W>` over all product states (0 up to solver tolerance).
    pub value: f64,
    /// The minimizing angles `(alpha, beta, phi1, phi2)`.
    pub angles: [f64; 4],
}

/// Minimizes the closed-form product-state expectation over
/// `(alpha, beta, phi1, phi2)`.
///
/// The search uses the canonical qubit parameterization: amplitude
/// angles in `[0, pi/2]` (so `a, b, c, d >= 0`) with the phases carrying
/// all signs — every product state has such a representative, and it is
/// the one on which the optimality conditions `a c = b d` and
/// `phi1 = phi2` read off directly.
///
/// Deterministic: a full grid scan keeps the first strict optimum in
/// scan order, then a bounded simplex refinement is accepted only if it
/// improves the grid optimum by more than 1e-12. The witness is flat in a
/// phase whenever one amplitude vanishes, so an unguarded local search
/// could wander along the floor; the guard pins the reported minimizer.
pub fn min_separable() -> MinSeparableResult {
    let objective = |x: &[f64; 4]| {
        separable_value(&SeparableParams::from_angles(x[0], x[1], x[2], x[3]))
            .expect("angle parameterization is always normalized")
    };
    const AMP_GRID: usize = 32;
    const PHASE_GRID: usize = 32;
    let amp_step = std::f64::consts::FRAC_PI_2 / AMP_GRID as f64;
    let phase_step = std::f64::consts::TAU / PHASE_GRID as f64;
    let mut best_x = [0.0; 4];
    let mut best = f64::INFINITY;
    for ia in 0..=AMP_GRID {
        for ib in 0..=AMP_GRID {
            for i1 in 0..PHASE_GRID {
                for i2 in 0..PHASE_GRID {
                    let x = [
                        ia as f64 * amp_step,
                        ib as f64 * amp_step,
                        i1 as f64 * phase_step,
                        i2 as f64 * phase_step,
                    ];
                    let v = objective(&x);
                    if v < best {
                        best = v;
                        best_x = x;
                    }
                }
            }
        }
    }
    let (refined_x, refined) = nelder_mead(&objective, best_x, 0.05, 500, 1e-10);
    let (x, value) = if refined < best - 1e-12 {
        (refined_x, refined)
    } else {
        (best_x, best)
    };
    MinSeparableResult {
        params: SeparableParams::from_angles(x[0], x[1], x[2], x[3]),
        value,
        angles: x,
    }
}

/// Standard downhill-simplex minimization in four dimensions
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
fn nelder_mead(
    f: &dyn Fn(&[f64; 4]) -> f64,
    start: [f64; 4],
    scale: f64,
    max_iter: usize,
    ftol: f64,
) -> ([f64; 4], f64) {
    let mut simplex: Vec<([f64; 4], f64)> = Vec::with_capacity(5);
    simplex.push((start, f(&start)));
    for k in 0..4 {
        let mut x = start;
        x[k] += scale;
        simplex.push((x, f(&x)));
    }
    let combine = |p: &[f64; 4], q: &[f64; 4], t: f64| {
        let mut r = [0.0; 4];
        for k in 0..4 {
            r[k] = p[k] + t * (q[k] - p[k]);
        }
        r
    };
    for _ in 0..max_iter {
        simplex.sort_by(|u, v| u.1.total_cmp(&v.1));
        if simplex[4].1 - simplex[0].1 < ftol {
            break;
        }
        let mut centroid = [0.0; 4];
        for (x, _) in &simplex[..4] {
            for k in 0..4 {
                centroid[k] += x[k] / 4.0;
            }
        }
        let reflected = combine(&centroid, &simplex[4].0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &simplex[4].0, -2.0);
            let fe = f(&expanded);
            simplex[4] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[3].1 {
            simplex[4] = (reflected, fr);
        } else {
            let contracted = combine(&centroid, &simplex[4].0, 0.5);
            let fc = f(&contracted);
            if fc < simplex[4].1 {
                simplex[4] = (contracted, fc);
            } else {
                let lowest = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk = combine(&lowest, &entry.0, 0.5);
                    *entry = (shrunk, f(&shrunk));
                }
            }
        }
    }
    simplex.sort_by(|u, v| u.1.total_cmp(&v.1));
    simplex[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const H: Polarization = Polarization::H;
    const V: Polarization = Polarization::V;

    fn reg2() -> Arc<ModeRegistry> {
        ModeRegistry::build(&[1, 2], 1, true).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_photon(
        reg: &Arc<ModeRegistry>,
        m1: (u32, Polarization, i32),
        m2: (u32, Polarization, i32),
    ) -> PhotonicState {
        PhotonicState::vacuum(Arc::clone(reg))
            .apply_creation(ModeLabel::new(m1.0, m1.1, m1.2))
            .unwrap()
            .apply_creation(ModeLabel::new(m2.0, m2.1, m2.2))
            .unwrap()
    }

    fn oam_bell(reg: &Arc<ModeRegistry>) -> PhotonicState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t1 = two_photon(reg, (1, H, 1), (2, H, -1));
        let t2 = two_photon(reg, (1, H, -1), (2, H, 1));
        PhotonicState::superpose(&[(c(s, 0.0), &t1), (c(s, 0.0), &t2)]).unwrap()
    }

    fn pol_bell(reg: &Arc<ModeRegistry>) -> PhotonicState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t1 = two_photon(reg, (1, H, 0), (2, V, 0));
        let t2 = two_photon(reg, (1, V, 0), (2, H, 0));
        PhotonicState::superpose(&[(c(s, 0.0), &t1), (c(s, 0.0), &t2)]).unwrap()
    }

    #[test]
    fn decomposition_matches_the_operator_for_both_encodings() {
        let reg = reg2();
        for dof in [WitnessDof::Oam, WitnessDof::Polarization] {
            let w = bell_witness(&reg, dof, (1, 2)).unwrap();
            assert!(
                w.decomposition_deviation() < 1e-12,
                "{dof:?} decomposition deviates"
            );
        }
    }

    /// Negative control: corrupting one term must be loudly visible, or
    /// the deviation check proves nothing.
    #[test]
    fn corrupted_decomposition_is_detected() {
        let reg = reg2();
        let mut w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        w.terms[0].coefficient = -w.terms[0].coefficient;
        assert!(w.decomposition_deviation() > 0.4);
    }

    #[test]
    fn bell_state_reaches_the_witness_floor() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        let e = w.expectation(&oam_bell(&reg)).unwrap();
        assert!((e.value + 0.5).abs() < 1e-12);
        assert!((e.coincidence_probability - 1.0).abs() < 1e-12);

        let w = bell_witness(&reg, WitnessDof::Polarization, (1, 2)).unwrap();
        let e = w.expectation(&pol_bell(&reg)).unwrap();
        assert!((e.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_state_components_follow_the_interference_pattern() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        let comps = w.component_probabilities(&oam_bell(&reg)).unwrap();
        let expect = [0.0, 0.0, 0.5, 0.5, 0.0, 0.0];
        for (i, (got, want)) in comps.iter().zip(expect).enumerate() {
            assert!(
                (got - want).abs() < 1e-12,
                "component {i} ({}): {got} vs {want}",
                w.terms()[i].label
            );
        }
        assert!((w.expectation_from_components(&comps) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn basis_product_state_sits_exactly_on_the_boundary() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        // |+l, -l>: classically correlated, not entangled.
        let state = two_photon(&reg, (1, H, 1), (2, H, -1));
        let comps = w.component_probabilities(&state).unwrap();
        let expect = [0.0, 0.0, 0.25, 0.25, 0.25, 0.25];
        for (got, want) in comps.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
        let e = w.expectation(&state).unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn aligned_product_state_maximizes_the_witness() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Polarization, (1, 2)).unwrap();
        let state = two_photon(&reg, (1, H, 0), (2, H, 0));
        let e = w.expectation(&state).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectators_do_not_shift_the_expectation() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        // Same OAM Bell pair, but the second photon is vertical.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t1 = two_photon(&reg, (1, H, 1), (2, V, -1));
        let t2 = two_photon(&reg, (1, H, -1), (2, V, 1));
        let mixed_pol =
            PhotonicState::superpose(&[(c(s, 0.0), &t1), (c(s, 0.0), &t2)]).unwrap();
        let e = w.expectation(&mixed_pol).unwrap();
        assert!((e.value + 0.5).abs() < 1e-12);
        let comps = w.component_probabilities(&mixed_pol).unwrap();
        assert!((w.expectation_from_components(&comps) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn witness_rejects_states_outside_its_domain() {
        let reg = reg2();
        let w = bell_witness(&reg, WitnessDof::Oam, (1, 2)).unwrap();
        // Wrong photon number.
        let single = PhotonicState::vacuum(Arc::clone(&reg))
            .apply_creation(ModeLabel::new(1, H, 1))
            .unwrap();
        assert!(matches!(
            w.expectation(&single),
            Err(Error::WitnessDomain(_))
        ));
        // Two photons, but both on one path: no coincidence.
        let bunched = two_photon(&reg, (1, H, 1), (1, H, -1));
        assert!(matches!(
            w.expectation(&bunched),
            Err(Error::WitnessDomain(_))
        ));
        // Identical paths rejected at construction.
        assert!(matches!(
            bell_witness(&reg, WitnessDof::Oam, (2, 2)),
            Err(Error::IdenticalPaths(2))
        ));
    }

    #[test]
    fn product_states_match_the_closed_form_through_the_full_stack() {
        let reg = reg2();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for dof in [WitnessDof::Oam, WitnessDof::Polarization] {
            let w = bell_witness(&reg, dof, (1, 2)).unwrap();
            for _ in 0..200 {
                let params = SeparableParams::from_angles(
                    rng.random::<f64>() * std::f64::consts::TAU,
                    rng.random::<f64>() * std::f64::consts::TAU,
                    rng.random::<f64>() * std::f64::consts::TAU,
                    rng.random::<f64>() * std::f64::consts::TAU,
                );
                let state = product_state(&reg, dof, (1, 2), &params).unwrap();
                let closed = separable_value(&params).unwrap();
                let e = w.expectation(&state).unwrap();
                assert!((e.value - closed).abs() < 1e-12);
                assert!(closed >= -1e-12, "witness dipped below the product floor");
                let comps = w.component_probabilities(&state).unwrap();
                let via_terms = w.expectation_from_components(&comps);
                assert!((via_terms - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn the_two_component_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let params = SeparableParams::from_angles(
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::TAU,
            );
            let amp = separable_components(&params).unwrap();
            let trig = separable_components_trig(&params).unwrap();
            for k in 0..6 {
                assert!(
                    (amp[k] - trig[k]).abs() < 1e-12,
                    "component {k}: {} vs {}",
                    amp[k],
                    trig[k]
                );
            }
            // And the signed sum reproduces the closed form on both routes.
            let value = separable_value(&params).unwrap();
            let signed: f64 = TERM_PATTERN
                .iter()
                .zip(amp)
                .map(|((_, _, sign), p)| 0.5 * sign * p)
                .sum();
            assert!((signed - value).abs() < 1e-12);
        }
    }

    #[test]
    fn denormalized_parameters_are_rejected() {
        let params = SeparableParams {
            a: 1.0,
            b: 0.3,
            c: 1.0,
            d: 0.0,
            phi1: 0.0,
            phi2: 0.0,
        };
        assert!(matches!(
            separable_value(&params),
            Err(Error::SeparableConstraint(_))
        ));
    }

    #[test]
    fn minimizer_finds_the_floor_at_a_phase_matched_point() {
        let result = min_separable();
        assert!(result.value.abs() < 1e-9, "minimum {}", result.value);
        let p = result.params;
        // The reported minimizer satisfies the analytic optimality
        // conditions: equal cross products and matched phases (the phase
        // condition is trivial at the boundary where a product vanishes).
        assert!((p.a * p.c - p.b * p.d).abs() < 1e-6);
        let phase_matched = ((p.phi1 - p.phi2).rem_euclid(std::f64::consts::TAU)).min(
            std::f64::consts::TAU - (p.phi1 - p.phi2).rem_euclid(std::f64::consts::TAU),
        );
        assert!(phase_matched < 1e-6 || (p.a * p.b * p.c * p.d).abs() < 1e-12);
    }

    #[test]
    fn simplex_refinement_solves_an_offset_quadratic() {
        let f = |x: &[f64; 4]| {
            (x[0] - 1.0).powi(2)
                + 2.0 * (x[1] + 0.5).powi(2)
                + (x[2] - 0.25).powi(2)
                + (x[3]).powi(2)
        };
        let (x, v) = nelder_mead(&f, [0.0; 4], 0.5, 500, 1e-14);
        assert!(v < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4);
        assert!((x[1] + 0.5).abs() < 1e-4);
    }
}
