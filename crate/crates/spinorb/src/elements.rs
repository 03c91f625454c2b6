//! Optical elements as exact single-photon maps, lifted to any photon
//! number.
//!
//! Every element is specified by an [`ElementSpec`] and applied with
//! [`apply_element`], which returns the output state together with the
//! element's success probability:
//!
//! * unitary elements (wave plates, polarizing beam splitters, q-plates,
//!   OAM imprints) report probability `1`;
//! * filtering elements (polarizers, slit masks, fork holograms) absorb
//!   part of the state; the output is renormalized and the transmitted
//!   fraction is reported and folded into the state's cumulative success
//!   probability;
//! * the polarization-to-OAM transferrer comes in two builds with
//!   different success accounting (see [`TransferrerKind`]).
//!
//! Conventions fixed here and used everywhere else: circular polarizations
//! are `L = (H + iV)/sqrt(2)` and `R = (H - iV)/sqrt(2)`; wave-plate
//! angles are fast-axis angles from horizontal, in degrees; the q-plate
//! exchanges circular polarization while shifting OAM by `±l`, where `l`
//! is the registry's OAM order.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    LocalState, ModeLabel, ModeMap, ModeRegistry, PhotonicState, PolState, Polarization,
    NORM_SQR_TOLERANCE,
};

/// Sign of an OAM shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The two physical builds of the polarization-to-OAM transferrer.
///
/// Both map a path whose photons all carry OAM 0 as
/// `alpha|H> + beta|V|  ->  (alpha|+l> + beta|-l>) (x) |H>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransferrerKind {
    /// Circular converter, q-plate, horizontal polarizer. The polarizer's
    /// natural transmission of 1/2 per photon can be recovered by a
    /// feed-forward loop, so the reported success probability is a
    /// configurable constant (default 1) rather than the raw transmission.
    QPlate { success_probability: f64 },
    /// Polarization-dependent OAM imprint, diagonal polarizer, half-wave
    /// plate at 22.5 degrees. The diagonal post-selection is intrinsic;
    /// its natural transmission of 1/2 per photon is reported as-is.
    Slm,
}

/// One optical element, fully parameterized.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementSpec {
    /// Half-wave plate on one path, fast axis at `theta_deg` from
    /// horizontal. Acts on polarization only.
    Hwp { path: u32, theta_deg: f64 },
    /// Quarter-wave plate on one path, fast axis at `theta_deg`.
    /// `Qwp(45)` maps `H -> R`; `Qwp(-45)` maps `H -> L`.
    Qwp { path: u32, theta_deg: f64 },
    /// Polarizing beam splitter between two paths: `H` keeps its path,
    /// `V` swaps paths. Blind to OAM.
    Pbs { path_a: u32, path_b: u32 },
    /// Linear filter transmitting one polarization state on one path.
    Polarizer { path: u32, direction: PolState },
    /// q-plate of order matching the registry: exchanges L/R circular
    /// polarization while shifting OAM by `-+l` within the registry's
    /// three OAM planes. Components that would leave the registry are
    /// hard errors.
    QPlate { path: u32 },
    /// Pure OAM shift by `+l` or `-l` on one path, polarization blind.
    OamImprint { path: u32, sign: Sign },
    /// Fork hologram: diffracts `+l` into `port_plus` and `-l` into
    /// `port_minus`, erasing OAM; the OAM-0 component of the input is
    /// absorbed (its loss shows up in the success probability).
    ForkHologram {
        input: u32,
        port_plus: u32,
        port_minus: u32,
    },
    /// Angular slit mask transmitting the OAM superposition
    /// `(|+l> + e^{i phase}|-l>)/sqrt(2)` with `phase = 2 l gamma_deg`
    /// (in degrees), blind to polarization.
    SlitMask { path: u32, gamma_deg: f64 },
    /// Polarization-to-OAM transferrer on one path; see
    /// [`TransferrerKind`]. Requires every photon on the path to carry
    /// OAM 0.
    Transferrer { path: u32, kind: TransferrerKind },
    /// Idealized lens system overlapping every path into `output`.
    /// Lossless by construction; interference between paths can still
    /// annihilate the state, which is reported as probability 0.
    PathMergeLens { output: u32 },
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementSpec::Hwp { path, theta_deg } => {
                write!(f, "half-wave plate(path={path}, theta={theta_deg}deg)")
            }
            ElementSpec::Qwp { path, theta_deg } => {
                write!(f, "quarter-wave plate(path={path}, theta={theta_deg}deg)")
            }
            ElementSpec::Pbs { path_a, path_b } => {
                write!(f, "polarizing beam splitter(paths={path_a},{path_b})")
            }
            ElementSpec::Polarizer { path, direction } => {
                write!(f, "polarizer(path={path}, direction={direction})")
            }
            ElementSpec::QPlate { path } => write!(f, "q-plate(path={path})"),
            ElementSpec::OamImprint { path, sign } => {
                write!(f, "oam-imprint(path={path}, shift={sign}l)")
            }
            ElementSpec::ForkHologram {
                input,
                port_plus,
                port_minus,
            } => write!(
                f,
                "fork-hologram(input={input}, ports={port_plus},{port_minus})"
            ),
            ElementSpec::SlitMask { path, gamma_deg } => {
                write!(f, "slit-mask(path={path}, gamma={gamma_deg}deg)")
            }
            ElementSpec::Transferrer { path, kind } => match kind {
                TransferrerKind::QPlate { .. } => {
                    write!(f, "transferrer(path={path}, kind=qplate)")
                }
                TransferrerKind::Slm => write!(f, "transferrer(path={path}, kind=slm)"),
            },
            ElementSpec::PathMergeLens { output } => write!(f, "merge-lens(output={output})"),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Applies one element; returns the output state and the element's
/// success probability. Lossless elements report probability 1; filters
/// renormalize and report the transmitted fraction, additionally folding
/// it into the state's success probability. A fully absorbed state comes
/// back as the zero state with probability 0.
pub fn apply_element(state: &PhotonicState, spec: &ElementSpec) -> Result<(PhotonicState, f64)> {
    let registry = state.registry().clone();
    match spec {
        ElementSpec::Hwp { path, theta_deg } => {
            let map = pol_block_map(
                &registry,
                *path,
                hwp_jones(theta_deg.to_radians()),
                "half-wave plate",
            )?;
            lossless(state, &map)
        }
        ElementSpec::Qwp { path, theta_deg } => {
            let map = pol_block_map(
                &registry,
                *path,
                qwp_jones(theta_deg.to_radians()),
                "quarter-wave plate",
            )?;
            lossless(state, &map)
        }
        ElementSpec::Pbs { path_a, path_b } => {
            let map = pbs_map(&registry, *path_a, *path_b)?;
            lossless(state, &map)
        }
        ElementSpec::Polarizer { path, direction } => {
            let map = polarizer_map(&registry, *path, *direction)?;
            filtered(state, &map)
        }
        ElementSpec::QPlate { path } => {
            let map = qplate_map(&registry, *path)?;
            lossless(state, &map)
        }
        ElementSpec::OamImprint { path, sign } => {
            let map = imprint_map(&registry, *path, *sign)?;
            lossless(state, &map)
        }
        ElementSpec::ForkHologram {
            input,
            port_plus,
            port_minus,
        } => {
            let map = fork_map(&registry, *input, *port_plus, *port_minus)?;
            filtered(state, &map)
        }
        ElementSpec::SlitMask { path, gamma_deg } => {
            let phase = crate::measurement::phase_from_angle(*gamma_deg, registry.l());
            let map = mask_map(&registry, *path, phase)?;
            filtered(state, &map)
        }
        ElementSpec::Transferrer { path, kind } => apply_transferrer(state, *path, *kind),
        ElementSpec::PathMergeLens { output } => {
            let map = merge_map(&registry, *output)?;
            let out = map.apply(state)?;
            if out.norm_sqr() <= NORM_SQR_TOLERANCE {
                let mut zero = state.zero_like();
                zero.set_success_probability(0.0);
                return Ok((zero, 0.0));
            }
            let mut out = out.normalize()?;
            out.set_success_probability(state.success_probability());
            Ok((out, 1.0))
        }
    }
}

fn lossless(state: &PhotonicState, map: &ModeMap) -> Result<(PhotonicState, f64)> {
    let out = map.apply(state)?;
    debug_assert!(
        (out.norm_sqr() - state.norm_sqr()).abs() <= 1e-9 * state.norm_sqr().max(1.0),
        "map `{}` marked lossless but changed the norm",
        map.label(),
    );
    Ok((out, 1.0))
}

fn filtered(state: &PhotonicState, map: &ModeMap) -> Result<(PhotonicState, f64)> {
    let before = state.norm_sqr();
    if before <= NORM_SQR_TOLERANCE {
        return Err(Error::ZeroNorm);
    }
    let raw = map.apply(state)?;
    let probability = raw.norm_sqr() / before;
    if probability <= NORM_SQR_TOLERANCE {
        let mut zero = state.zero_like();
        zero.set_success_probability(0.0);
        return Ok((zero, 0.0));
    }
    let mut out = raw.normalize()?;
    out.set_success_probability(state.success_probability() * probability);
    Ok((out, probability))
}

/// Jones matrix of a half-wave plate, fast axis at `theta` (radians).
fn hwp_jones(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = (2.0 * theta).sin_cos();
    [
        [c(co, 0.0), c(s, 0.0)],
        [c(s, 0.0), c(-co, 0.0)],
    ]
}

/// Jones matrix of a quarter-wave plate, fast axis at `theta` (radians),
/// with the overall phase fixed so that the fast axis is retarded by
/// `-pi/4` and the slow axis advanced by `+pi/4`.
fn qwp_jones(theta: f64) -> [[Complex64; 2]; 2] {
    let phase = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let (s, co) = theta.sin_cos();
    let (c2, s2, sc) = (co * co, s * s, s * co);
    let one_minus_i = c(1.0, -1.0);
    [
        [phase * c(c2, s2), phase * one_minus_i * sc],
        [phase * one_minus_i * sc, phase * c(s2, c2)],
    ]
}

/// Applies a 2x2 polarization matrix on every OAM plane of one path.
fn pol_block_map(
    registry: &std::sync::Arc<ModeRegistry>,
    path: u32,
    m: [[Complex64; 2]; 2],
    label: &str,
) -> Result<ModeMap> {
    let mut map = ModeMap::identity(registry, label);
    for &oam in registry.oam_values() {
        let ih = registry.index_of(ModeLabel::new(path, Polarization::H, oam))?;
        let iv = registry.index_of(ModeLabel::new(path, Polarization::V, oam))?;
        map.set_column(ih, sparse(&[(ih, m[0][0]), (iv, m[1][0])]));
        map.set_column(iv, sparse(&[(ih, m[0][1]), (iv, m[1][1])]));
    }
    Ok(map)
}

fn sparse(entries: &[(usize, Complex64)]) -> Vec<(usize, Complex64)> {
    entries
        .iter()
        .copied()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .collect()
}

fn pbs_map(registry: &std::sync::Arc<ModeRegistry>, a: u32, b: u32) -> Result<ModeMap> {
    if a == b {
        return Err(Error::IdenticalPaths(a));
    }
    let mut map = ModeMap::identity(registry, "polarizing beam splitter");
    for &oam in registry.oam_values() {
        let av = registry.index_of(ModeLabel::new(a, Polarization::V, oam))?;
        let bv = registry.index_of(ModeLabel::new(b, Polarization::V, oam))?;
        map.set_column(av, vec![(bv, c(1.0, 0.0))]);
        map.set_column(bv, vec![(av, c(1.0, 0.0))]);
    }
    Ok(map)
}

fn polarizer_map(
    registry: &std::sync::Arc<ModeRegistry>,
    path: u32,
    direction: PolState,
) -> Result<ModeMap> {
    let mut map = ModeMap::identity(registry, "polarizer");
    map.clear_path(path)?;
    for &oam in registry.oam_values() {
        let v = LocalState::polarization(direction, oam).mode_vector(registry, path)?;
        map.add_outer(&v, &v);
    }
    Ok(map)
}

fn qplate_map(registry: &std::sync::Arc<ModeRegistry>, path: u32) -> Result<ModeMap> {
    let l = registry.l() as i32;
    let mut map = ModeMap::identity(registry, "q-plate");
    map.clear_path(path)?;
    let lv = |pol: PolState, oam: i32| LocalState::polarization(pol, oam).mode_vector(registry, path);
    // Circular polarization flips while OAM moves opposite to the incoming
    // handedness; only transitions landing inside the registry's OAM planes
    // are representable, the other two are declared errors below.
    let pairs = [
        (PolState::R, l, PolState::L, 0),
        (PolState::L, -l, PolState::R, 0),
        (PolState::L, 0, PolState::R, l),
        (PolState::R, 0, PolState::L, -l),
    ];
    for (out_pol, out_oam, in_pol, in_oam) in pairs {
        map.add_outer(&lv(out_pol, out_oam)?, &lv(in_pol, in_oam)?);
    }
    map.forbid(format!("(path {path}, L, {:+})", l), lv(PolState::L, l)?);
    map.forbid(format!("(path {path}, R, {:+})", -l), lv(PolState::R, -l)?);
    Ok(map)
}

fn imprint_map(registry: &std::sync::Arc<ModeRegistry>, path: u32, sign: Sign) -> Result<ModeMap> {
    let l = registry.l() as i32;
    let shift = sign.factor() * l;
    let mut map = ModeMap::identity(registry, "oam-imprint");
    map.clear_path(path)?;
    for pol in Polarization::BOTH {
        let from_edge = LocalState::basis(pol, -shift).mode_vector(registry, path)?;
        let mid = LocalState::basis(pol, 0).mode_vector(registry, path)?;
        let to_edge = LocalState::basis(pol, shift).mode_vector(registry, path)?;
        map.add_outer(&mid, &from_edge);
        map.add_outer(&to_edge, &mid);
        map.forbid(
            format!("(path {path}, {pol}, {shift:+}) cannot shift further"),
            to_edge,
        );
    }
    Ok(map)
}

fn fork_map(
    registry: &std::sync::Arc<ModeRegistry>,
    input: u32,
    port_plus: u32,
    port_minus: u32,
) -> Result<ModeMap> {
    if port_plus == port_minus {
        return Err(Error::IdenticalPaths(port_plus));
    }
    let l = registry.l() as i32;
    let mut map = ModeMap::identity(registry, "fork-hologram");
    map.clear_path(input)?;
    for pol in Polarization::BOTH {
        let plus_in = LocalState::basis(pol, l).mode_vector(registry, input)?;
        let minus_in = LocalState::basis(pol, -l).mode_vector(registry, input)?;
        let plus_out = LocalState::basis(pol, 0).mode_vector(registry, port_plus)?;
        let minus_out = LocalState::basis(pol, 0).mode_vector(registry, port_minus)?;
        map.add_outer(&plus_out, &plus_in);
        map.add_outer(&minus_out, &minus_in);
        // The OAM-0 column of the input stays zero: that component is
        // diffracted out of both ports and absorbed.
    }
    for port in [port_plus, port_minus] {
        if port == input {
            continue;
        }
        for pol in Polarization::BOTH {
            map.forbid(
                format!("output port mode (path {port}, {pol}, 0) must start empty"),
                LocalState::basis(pol, 0).mode_vector(registry, port)?,
            );
        }
    }
    Ok(map)
}

fn mask_map(registry: &std::sync::Arc<ModeRegistry>, path: u32, phase: f64) -> Result<ModeMap> {
    let l = registry.l() as i32;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut map = ModeMap::identity(registry, "slit-mask");
    map.clear_path(path)?;
    for pol in Polarization::BOTH {
        let chi = LocalState::oam_superposition(
            pol,
            &[(l, c(s, 0.0)), (-l, Complex64::from_polar(s, phase))],
        )
        .mode_vector(registry, path)?;
        map.add_outer(&chi, &chi);
    }
    Ok(map)
}

fn merge_map(registry: &std::sync::Arc<ModeRegistry>, output: u32) -> Result<ModeMap> {
    registry.path_block(output)?;
    let mut map = ModeMap::identity(registry, "merge-lens");
    for (i, mode) in registry.modes().iter().enumerate() {
        if mode.path != output {
            let target = registry.index_of(ModeLabel::new(output, mode.pol, mode.oam))?;
            map.set_column(i, vec![(target, c(1.0, 0.0))]);
        }
    }
    Ok(map)
}

/// Errors unless every photon on `path` carries OAM 0.
fn check_oam_zero_input(state: &PhotonicState, path: u32) -> Result<()> {
    let registry = state.registry();
    for pol in Polarization::BOTH {
        for &oam in registry.oam_values() {
            if oam == 0 {
                continue;
            }
            let idx = registry.index_of(ModeLabel::new(path, pol, oam))?;
            if state.component_along(&[(idx, c(1.0, 0.0))]) > NORM_SQR_TOLERANCE {
                return Err(Error::NonZeroInputOam(path));
            }
        }
    }
    Ok(())
}

/// Circular converter: `H -> L`, `V -> R` exactly. Equals a quarter-wave
/// plate at -45 degrees followed by the fixed phase plate `diag(1, -i)`,
/// which removes the plate's residual relative phase.
fn circular_converter_jones() -> [[Complex64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(0.0, s), c(0.0, -s)]]
}

fn apply_transferrer(
    state: &PhotonicState,
    path: u32,
    kind: TransferrerKind,
) -> Result<(PhotonicState, f64)> {
    let label = ElementSpec::Transferrer { path, kind }.to_string();
    check_oam_zero_input(state, path)?;
    let registry = state.registry().clone();
    match kind {
        TransferrerKind::QPlate {
            success_probability,
        } => {
            if !(success_probability > 0.0 && success_probability <= 1.0) {
                return Err(Error::InvalidParameter {
                    element: label,
                    detail: format!(
                        "success probability must lie in (0, 1], got {success_probability}"
                    ),
                });
            }
            let converter =
                pol_block_map(&registry, path, circular_converter_jones(), "circular converter")?;
            let (s1, _) = lossless(state, &converter)?;
            let (s2, _) = lossless(&s1, &qplate_map(&registry, path)?)?;
            // The horizontal post-selection transmits 1/2 per photon on the
            // path; the declared success probability replaces that natural
            // transmission (heralded feed-forward recovers the other half).
            let (s3, _natural) = filtered(&s2, &polarizer_map(&registry, path, PolState::H)?)?;
            if s3.is_zero() {
                return Ok((s3, 0.0));
            }
            let mut out = s3;
            out.set_success_probability(state.success_probability() * success_probability);
            Ok((out, success_probability))
        }
        TransferrerKind::Slm => {
            let imprint = slm_imprint_map(&registry, path)?;
            let (s1, _) = lossless(state, &imprint)?;
            let (s2, probability) =
                filtered(&s1, &polarizer_map(&registry, path, PolState::DPlus)?)?;
            if s2.is_zero() {
                return Ok((s2, 0.0));
            }
            let hwp = pol_block_map(
                &registry,
                path,
                hwp_jones(22.5f64.to_radians()),
                "half-wave plate",
            )?;
            let (s3, _) = lossless(&s2, &hwp)?;
            Ok((s3, probability))
        }
    }
}

/// Polarization-dependent OAM imprint: `H` gains `+l`, `V` gains `-l`.
/// Defined only on the OAM-0 plane of the path.
fn slm_imprint_map(registry: &std::sync::Arc<ModeRegistry>, path: u32) -> Result<ModeMap> {
    let l = registry.l() as i32;
    let mut map = ModeMap::identity(registry, "polarization-dependent imprint");
    map.clear_path(path)?;
    let h0 = LocalState::basis(Polarization::H, 0).mode_vector(registry, path)?;
    let v0 = LocalState::basis(Polarization::V, 0).mode_vector(registry, path)?;
    let h_plus = LocalState::basis(Polarization::H, l).mode_vector(registry, path)?;
    let v_minus = LocalState::basis(Polarization::V, -l).mode_vector(registry, path)?;
    map.add_outer(&h_plus, &h0);
    map.add_outer(&v_minus, &v0);
    for pol in Polarization::BOTH {
        for oam in [l, -l] {
            map.forbid(
                format!("(path {path}, {pol}, {oam:+}) must start empty"),
                LocalState::basis(pol, oam).mode_vector(registry, path)?,
            );
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SparseVector;
    use proptest::prelude::*;
    use std::sync::Arc;

    const H: Polarization = Polarization::H;
    const V: Polarization = Polarization::V;

    fn reg2() -> Arc<ModeRegistry> {
        ModeRegistry::build(&[1, 2], 1, true).unwrap()
    }

    fn one_photon(reg: &Arc<ModeRegistry>, path: u32, pol: Polarization, oam: i32) -> PhotonicState {
        PhotonicState::vacuum(Arc::clone(reg))
            .apply_creation(ModeLabel::new(path, pol, oam))
            .unwrap()
    }

    fn amp(state: &PhotonicState, modes: &[(u32, Polarization, i32)]) -> Complex64 {
        let labels: Vec<ModeLabel> = modes
            .iter()
            .map(|&(p, pol, o)| ModeLabel::new(p, pol, o))
            .collect();
        state.basis_amplitude(&labels).unwrap()
    }

    #[test]
    fn half_wave_plate_at_45_swaps_linear_polarizations() {
        let reg = reg2();
        let state = one_photon(&reg, 1, H, 0);
        let (out, p) = apply_element(
            &state,
            &ElementSpec::Hwp {
                path: 1,
                theta_deg: 45.0,
            },
        )
        .unwrap();
        assert_eq!(p, 1.0);
        assert!((amp(&out, &[(1, V, 0)]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(amp(&out, &[(1, H, 0)]).norm() < 1e-12);
    }

    #[test]
    fn half_wave_plate_at_22_5_maps_diagonal_to_horizontal() {
        let reg = reg2();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hp = one_photon(&reg, 1, H, 0);
        let vp = one_photon(&reg, 1, V, 0);
        let diag =
            PhotonicState::superpose(&[(c(s, 0.0), &hp), (c(s, 0.0), &vp)]).unwrap();
        let (out, _) = apply_element(
            &diag,
            &ElementSpec::Hwp {
                path: 1,
                theta_deg: 22.5,
            },
        )
        .unwrap();
        assert!((amp(&out, &[(1, H, 0)]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(amp(&out, &[(1, V, 0)]).norm() < 1e-12);
    }

    #[test]
    fn quarter_wave_plate_at_45_makes_circular_states() {
        let reg = reg2();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = one_photon(&reg, 1, H, 0);
        // H through a quarter-wave plate at +45deg comes out right circular.
        let (out, _) = apply_element(
            &state,
            &ElementSpec::Qwp {
                path: 1,
                theta_deg: 45.0,
            },
        )
        .unwrap();
        assert!((amp(&out, &[(1, H, 0)]) - c(s, 0.0)).norm() < 1e-12);
        assert!((amp(&out, &[(1, V, 0)]) - c(0.0, -s)).norm() < 1e-12);
        // H at -45deg comes out left circular, V comes out i times right.
        let (out, _) = apply_element(
            &state,
            &ElementSpec::Qwp {
                path: 1,
                theta_deg: -45.0,
            },
        )
        .unwrap();
        assert!((amp(&out, &[(1, H, 0)]) - c(s, 0.0)).norm() < 1e-12);
        assert!((amp(&out, &[(1, V, 0)]) - c(0.0, s)).norm() < 1e-12);
        let v_state = one_photon(&reg, 1, V, 0);
        let (out, _) = apply_element(
            &v_state,
            &ElementSpec::Qwp {
                path: 1,
                theta_deg: -45.0,
            },
        )
        .unwrap();
        // i*R = (i*H + V)/sqrt(2)
        assert!((amp(&out, &[(1, H, 0)]) - c(0.0, s)).norm() < 1e-12);
        assert!((amp(&out, &[(1, V, 0)]) - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn beam_splitter_routes_by_polarization_and_keeps_oam() {
        let reg = reg2();
        for oam in [-1, 0, 1] {
            let h = one_photon(&reg, 1, H, oam);
            let (out, p) = apply_element(&h, &ElementSpec::Pbs { path_a: 1, path_b: 2 }).unwrap();
            assert_eq!(p, 1.0);
            assert!((amp(&out, &[(1, H, oam)]) - c(1.0, 0.0)).norm() < 1e-12);

            let v = one_photon(&reg, 1, V, oam);
            let (out, _) = apply_element(&v, &ElementSpec::Pbs { path_a: 1, path_b: 2 }).unwrap();
            assert!((amp(&out, &[(2, V, oam)]) - c(1.0, 0.0)).norm() < 1e-12);
            assert!(amp(&out, &[(1, V, oam)]).norm() < 1e-15);
        }
        assert!(matches!(
            apply_element(
                &one_photon(&reg, 1, H, 0),
                &ElementSpec::Pbs { path_a: 1, path_b: 1 }
            ),
            Err(Error::IdenticalPaths(1))
        ));
    }

    #[test]
    fn polarizer_transmits_the_matching_fraction() {
        let reg = reg2();
        let state = one_photon(&reg, 1, H, 0);
        let (out, p) = apply_element(
            &state,
            &ElementSpec::Polarizer {
                path: 1,
                direction: PolState::DPlus,
            },
        )
        .unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((out.success_probability() - 0.5).abs() < 1e-12);
        // A crossed polarizer then absorbs everything.
        let (dead, p) = apply_element(
            &out,
            &ElementSpec::Polarizer {
                path: 1,
                direction: PolState::DMinus,
            },
        )
        .unwrap();
        assert_eq!(p, 0.0);
        assert!(dead.is_zero());
        // Photons on other paths pass untouched.
        let elsewhere = one_photon(&reg, 2, V, 1);
        let (out, p) = apply_element(
            &elsewhere,
            &ElementSpec::Polarizer {
                path: 1,
                direction: PolState::H,
            },
        )
        .unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!((out.fidelity(&elsewhere).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qplate_exchanges_handedness_and_shifts_oam() {
        let reg = reg2();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Left circular at OAM 0 -> right circular at +l.
        let hp = one_photon(&reg, 1, H, 0);
        let vp = one_photon(&reg, 1, V, 0);
        let left = PhotonicState::superpose(&[(c(s, 0.0), &hp), (c(0.0, s), &vp)]).unwrap();
        let (out, p) = apply_element(&left, &ElementSpec::QPlate { path: 1 }).unwrap();
        assert_eq!(p, 1.0);
        // R at +l has components (1/sqrt2) H - (i/sqrt2) V.
        assert!((amp(&out, &[(1, H, 1)]) - c(s, 0.0)).norm() < 1e-12);
        assert!((amp(&out, &[(1, V, 1)]) - c(0.0, -s)).norm() < 1e-12);
        // Applying the q-plate twice returns to the start on its domain.
        let (back, _) = apply_element(&out, &ElementSpec::QPlate { path: 1 }).unwrap();
        assert!(back.fidelity(&left).unwrap() > 1.0 - 1e-12);
        // Left circular at +l has nowhere to go inside the registry.
        let hp1 = one_photon(&reg, 1, H, 1);
        let vp1 = one_photon(&reg, 1, V, 1);
        let stuck = PhotonicState::superpose(&[(c(s, 0.0), &hp1), (c(0.0, s), &vp1)]).unwrap();
        assert!(matches!(
            apply_element(&stuck, &ElementSpec::QPlate { path: 1 }),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn oam_imprint_shifts_within_the_registry_and_rejects_overflow() {
        let reg = reg2();
        let state = one_photon(&reg, 1, H, -1);
        let (out, _) = apply_element(
            &state,
            &ElementSpec::OamImprint {
                path: 1,
                sign: Sign::Plus,
            },
        )
        .unwrap();
        assert!((amp(&out, &[(1, H, 0)]) - c(1.0, 0.0)).norm() < 1e-12);
        let (out2, _) = apply_element(
            &out,
            &ElementSpec::OamImprint {
                path: 1,
                sign: Sign::Plus,
            },
        )
        .unwrap();
        assert!((amp(&out2, &[(1, H, 1)]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(
            apply_element(
                &out2,
                &ElementSpec::OamImprint {
                    path: 1,
                    sign: Sign::Plus,
                }
            ),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn fork_hologram_sorts_oam_into_ports_and_discards_zero() {
        let reg = reg2();
        let fork = ElementSpec::ForkHologram {
            input: 1,
            port_plus: 1,
            port_minus: 2,
        };
        let plus = one_photon(&reg, 1, V, 1);
        let (out, p) = apply_element(&plus, &fork).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!((amp(&out, &[(1, V, 0)]) - c(1.0, 0.0)).norm() < 1e-12);

        let minus = one_photon(&reg, 1, V, -1);
        let (out, _) = apply_element(&minus, &fork).unwrap();
        assert!((amp(&out, &[(2, V, 0)]) - c(1.0, 0.0)).norm() < 1e-12);

        // An OAM-0 component is absorbed and shows up in the probability.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p1 = one_photon(&reg, 1, H, 1);
        let z = one_photon(&reg, 1, H, 0);
        let mixed = PhotonicState::superpose(&[(c(s, 0.0), &p1), (c(s, 0.0), &z)]).unwrap();
        let (out, p) = apply_element(&mixed, &fork).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((amp(&out, &[(1, H, 0)]) - c(1.0, 0.0)).norm() < 1e-12);

        // Occupied output port on a distinct path is a declared conflict.
        let clash = one_photon(&reg, 2, H, 0)
            .apply_creation(ModeLabel::new(1, H, 1))
            .unwrap();
        assert!(matches!(
            apply_element(&clash, &fork),
            Err(Error::OutsideDomain { .. })
        ));
        // Identical ports cannot sort anything.
        assert!(matches!(
            apply_element(
                &plus,
                &ElementSpec::ForkHologram {
                    input: 1,
                    port_plus: 2,
                    port_minus: 2,
                }
            ),
            Err(Error::IdenticalPaths(2))
        ));
    }

    #[test]
    fn slit_mask_transmits_its_own_superposition_and_blocks_the_orthogonal_one() {
        let reg = reg2();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // gamma = 0 transmits (|+l> + |-l>)/sqrt(2).
        let plus = one_photon(&reg, 1, V, 1);
        let minus = one_photon(&reg, 1, V, -1);
        let aligned = PhotonicState::superpose(&[(c(s, 0.0), &plus), (c(s, 0.0), &minus)]).unwrap();
        let mask = ElementSpec::SlitMask {
            path: 1,
            gamma_deg: 0.0,
        };
        let (out, p) = apply_element(&aligned, &mask).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(out.fidelity(&aligned).unwrap() > 1.0 - 1e-12);
        // The orthogonal superposition (gamma' at 90deg for l=1) is blocked.
        let crossed =
            PhotonicState::superpose(&[(c(s, 0.0), &plus), (c(-s, 0.0), &minus)]).unwrap();
        let (dead, p) = apply_element(&crossed, &mask).unwrap();
        assert_eq!(p, 0.0);
        assert!(dead.is_zero());
        // A definite OAM state passes with probability 1/2.
        let (_, p) = apply_element(&plus, &mask).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // OAM 0 cannot pass an angular mask of this kind.
        let zero_oam = one_photon(&reg, 1, V, 0);
        let (_, p) = apply_element(&zero_oam, &mask).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn transferrer_moves_polarization_onto_oam() {
        let reg = reg2();
        let alpha = c(0.6, 0.0);
        let beta = c(0.0, 0.8);
        let hp = one_photon(&reg, 1, H, 0);
        let vp = one_photon(&reg, 1, V, 0);
        let input = PhotonicState::superpose(&[(alpha, &hp), (beta, &vp)]).unwrap();

        for (kind, want_p) in [
            (
                TransferrerKind::QPlate {
                    success_probability: 1.0,
                },
                1.0,
            ),
            (TransferrerKind::Slm, 0.5),
        ] {
            let (out, p) = apply_element(&input, &ElementSpec::Transferrer { path: 1, kind })
                .unwrap();
            assert!(
                (p - want_p).abs() < 1e-12,
                "{kind:?}: probability {p}, want {want_p}"
            );
            // Target: (alpha|+l> + beta|-l>) with horizontal polarization,
            // up to a global phase.
            let target_plus = one_photon(&reg, 1, H, 1);
            let target_minus = one_photon(&reg, 1, H, -1);
            let target =
                PhotonicState::superpose(&[(alpha, &target_plus), (beta, &target_minus)])
                    .unwrap();
            assert!(
                out.fidelity(&target).unwrap() > 1.0 - 1e-12,
                "{kind:?} missed the target state"
            );
            // Nothing remains vertical and nothing remains at OAM 0.
            assert!(amp(&out, &[(1, V, 1)]).norm() < 1e-12);
            assert!(amp(&out, &[(1, V, -1)]).norm() < 1e-12);
            assert!(amp(&out, &[(1, H, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn transferrer_rejects_input_carrying_oam() {
        let reg = reg2();
        let state = one_photon(&reg, 1, H, 1);
        for kind in [
            TransferrerKind::QPlate {
                success_probability: 1.0,
            },
            TransferrerKind::Slm,
        ] {
            assert!(matches!(
                apply_element(&state, &ElementSpec::Transferrer { path: 1, kind }),
                Err(Error::NonZeroInputOam(1))
            ));
        }
        // But OAM elsewhere is fine.
        let with_spectator = one_photon(&reg, 1, H, 0)
            .apply_creation(ModeLabel::new(2, H, 1))
            .unwrap();
        let (out, _) = apply_element(
            &with_spectator,
            &ElementSpec::Transferrer {
                path: 1,
                kind: TransferrerKind::Slm,
            },
        )
        .unwrap();
        assert!((amp(&out, &[(1, H, 1), (2, H, 1)]) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn transferrer_success_probability_is_configurable() {
        let reg = reg2();
        let input = one_photon(&reg, 1, H, 0);
        let (out, p) = apply_element(
            &input,
            &ElementSpec::Transferrer {
                path: 1,
                kind: TransferrerKind::QPlate {
                    success_probability: 0.25,
                },
            },
        )
        .unwrap();
        assert!((p - 0.25).abs() < 1e-12);
        assert!((out.success_probability() - 0.25).abs() < 1e-12);
        assert!(matches!(
            apply_element(
                &input,
                &ElementSpec::Transferrer {
                    path: 1,
                    kind: TransferrerKind::QPlate {
                        success_probability: 0.0,
                    },
                },
            ),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn merge_lens_overlaps_paths_and_reports_interference() {
        let reg = reg2();
        // Two photons on different paths, same internal state: they bunch.
        let two = PhotonicState::vacuum(Arc::clone(&reg))
            .apply_creation(ModeLabel::new(1, H, 1))
            .unwrap()
            .apply_creation(ModeLabel::new(2, H, 1))
            .unwrap();
        let (out, p) = apply_element(&two, &ElementSpec::PathMergeLens { output: 1 }).unwrap();
        assert_eq!(p, 1.0);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((amp(&out, &[(1, H, 1), (1, H, 1)]) - c(1.0, 0.0)).norm() < 1e-12);

        // An antisymmetric path superposition cancels itself at the lens.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = one_photon(&reg, 1, H, 0);
        let b = one_photon(&reg, 2, H, 0);
        let anti = PhotonicState::superpose(&[(c(s, 0.0), &a), (c(-s, 0.0), &b)]).unwrap();
        let (dead, p) = apply_element(&anti, &ElementSpec::PathMergeLens { output: 1 }).unwrap();
        assert_eq!(p, 0.0);
        assert!(dead.is_zero());
    }

    #[test]
    fn element_labels_read_naturally() {
        let spec = ElementSpec::Transferrer {
            path: 2,
            kind: TransferrerKind::Slm,
        };
        assert_eq!(spec.to_string(), "transferrer(path=2, kind=slm)");
        let spec = ElementSpec::OamImprint {
            path: 1,
            sign: Sign::Minus,
        };
        assert_eq!(spec.to_string(), "oam-imprint(path=1, shift=-l)");
    }

    fn full_basis(reg: &Arc<ModeRegistry>) -> Vec<SparseVector> {
        (0..reg.num_modes())
            .map(|i| vec![(i, c(1.0, 0.0))])
            .collect()
    }

    proptest! {
        /// Wave plates and beam splitters are unitary at every angle.
        #[test]
        fn wave_plates_are_unitary(theta in -360.0f64..360.0) {
            let reg = reg2();
            let basis = full_basis(&reg);
            let hwp = pol_block_map(&reg, 1, hwp_jones(theta.to_radians()), "hwp").unwrap();
            prop_assert!(hwp.isometry_deviation(&basis) < 1e-12);
            let qwp = pol_block_map(&reg, 2, qwp_jones(theta.to_radians()), "qwp").unwrap();
            prop_assert!(qwp.isometry_deviation(&basis) < 1e-12);
        }

        /// Filters only ever attenuate: reported probabilities stay in [0, 1].
        #[test]
        fn filter_probabilities_stay_physical(
            alpha in 0.0f64..std::f64::consts::TAU,
            gamma in -180.0f64..180.0,
        ) {
            let reg = reg2();
            let hp = one_photon(&reg, 1, H, 1);
            let vp = one_photon(&reg, 1, V, -1);
            let state = PhotonicState::superpose(&[
                (c(alpha.cos(), 0.0), &hp),
                (c(0.0, alpha.sin()), &vp),
            ]).unwrap();
            if state.norm_sqr() <= 1e-12 {
                return Ok(());
            }
            let state = state.normalize().unwrap();
            for spec in [
                ElementSpec::Polarizer { path: 1, direction: PolState::L },
                ElementSpec::SlitMask { path: 1, gamma_deg: gamma },
                ElementSpec::ForkHologram { input: 1, port_plus: 1, port_minus: 2 },
            ] {
                let (out, p) = apply_element(&state, &spec).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&p), "{spec}: p = {p}");
                if p > 0.0 {
                    prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
