//! Sparse second-quantized photon states.
//!
//! A [`PhotonicState`] with photon number `N` stores complex amplitudes on
//! occupation vectors (per-mode photon counts summing to `N`). Amplitudes
//! multiply *normalized* Fock kets `|n> = prod_m (a_m^dag)^{n_m} / sqrt(n_m!) |vac>`,
//! so the usual bosonic bookkeeping holds:
//!
//! * `a^dag |n> = sqrt(n + 1) |n + 1>` per mode, and `n`-fold creation into
//!   one mode yields norm `sqrt(n!)`;
//! * occupation vectors carry no memory of creation order.
//!
//! States are immutable values: every operation returns a new state, so
//! they can be shared freely across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{LocalState, ModeLabel, ModeRegistry};

/// Amplitudes with magnitude below this are dropped after each operation.
pub const AMPLITUDE_PRUNE_TOLERANCE: f64 = 1e-14;

/// Squared-norm threshold under which a component counts as absent.
pub(crate) const NORM_SQR_TOLERANCE: f64 = 1e-24;

/// Per-mode photon counts: the basis label of one Fock term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Box<[u8]>);

impl Occupation {
    pub(crate) fn empty(num_modes: usize) -> Self {
        Self(vec![0u8; num_modes].into_boxed_slice())
    }

    /// Photons in the mode at `index`.
    pub fn count(&self, index: usize) -> u8 {
        self.0[index]
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub(crate) fn counts(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn bumped(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        v[index] += 1;
        Self(v)
    }

    pub(crate) fn lowered(&self, index: usize) -> Self {
        debug_assert!(self.0[index] > 0);
        let mut v = self.0.clone();
        v[index] -= 1;
        Self(v)
    }

    /// Product of factorials of all counts, as a float.
    pub(crate) fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n as u64).product::<u64>() as f64)
            .product()
    }

    /// Human-readable label such as `(1,H,+1)x2 (2,V,-1)`.
    pub fn label(&self, registry: &ModeRegistry) -> String {
        let mut parts = Vec::new();
        for (i, &n) in self.0.iter().enumerate() {
            match n {
                0 => {}
                1 => parts.push(format!("{}", registry.mode_at(i))),
                _ => parts.push(format!("{}x{}", registry.mode_at(i), n)),
            }
        }
        if parts.is_empty() {
            "vacuum".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// A fixed-photon-number state: sparse amplitudes over occupations.
#[derive(Clone)]
pub struct PhotonicState {
    registry: Arc<ModeRegistry>,
    photon_number: u32,
    amps: BTreeMap<Occupation, Complex64>,
    success_probability: f64,
}

impl fmt::Debug for PhotonicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PhotonicState(N={}, p={}, {} terms)",
            self.photon_number,
            self.success_probability,
            self.amps.len()
        )
    }
}

impl PhotonicState {
    /// The vacuum: no photons, unit amplitude, success probability 1.
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(
            Occupation::empty(registry.num_modes()),
            Complex64::new(1.0, 0.0),
        );
        Self {
            registry,
            photon_number: 0,
            amps,
            success_probability: 1.0,
        }
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn photon_number(&self) -> u32 {
        self.photon_number
    }

    /// Product of the probabilities of every post-selection applied so far.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    /// Iterates over (occupation, amplitude) pairs in a stable order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (&Occupation, Complex64)> {
        self.amps.iter().map(|(occ, &amp)| (occ, amp))
    }

    /// Number of stored basis terms.
    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude on the occupation that puts one photon in each listed mode
    /// (repeats allowed; the list is an unordered multiset).
    pub fn basis_amplitude(&self, modes: &[ModeLabel]) -> Result<Complex64> {
        let mut occ = Occupation::empty(self.registry.num_modes());
        for &mode in modes {
            occ = occ.bumped(self.registry.index_of(mode)?);
        }
        Ok(self.amps.get(&occ).copied().unwrap_or(Complex64::new(0.0, 0.0)))
    }

    /// Adds one photon in `mode`; each amplitude gains the bosonic factor
    /// `sqrt(n_mode + 1)`.
    pub fn apply_creation(&self, mode: ModeLabel) -> Result<Self> {
        let idx = self.registry.index_of(mode)?;
        let amps = self
            .amps
            .iter()
            .map(|(occ, amp)| {
                let n = occ.count(idx) as f64;
                (occ.bumped(idx), amp * (n + 1.0).sqrt())
            })
            .collect();
        Ok(Self {
            registry: Arc::clone(&self.registry),
            photon_number: self.photon_number + 1,
            amps,
            success_probability: self.success_probability,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// True when every amplitude has been pruned away.
    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Rescales to unit norm. Errors on the zero state.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= NORM_SQR_TOLERANCE {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        let mut out = self.clone();
        for amp in out.amps.values_mut() {
            *amp *= inv;
        }
        Ok(out)
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    ///
    /// States of different photon number are orthogonal.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_registry(other)?;
        if self.photon_number != other.photon_number {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        // Iterate the smaller map, look up in the larger.
        let (small, large) = if self.amps.len() <= other.amps.len() {
            (&self.amps, &other.amps)
        } else {
            (&other.amps, &self.amps)
        };
        let swapped = self.amps.len() > other.amps.len();
        for (occ, amp) in small {
            if let Some(b) = large.get(occ) {
                acc += if swapped {
                    b.conj() * amp
                } else {
                    amp.conj() * b
                };
            }
        }
        Ok(acc)
    }

    /// `|<self|other>|^2` with both states normalized first.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let n2a = self.norm_sqr();
        let n2b = other.norm_sqr();
        if n2a <= NORM_SQR_TOLERANCE || n2b <= NORM_SQR_TOLERANCE {
            return Err(Error::ZeroNorm);
        }
        Ok(self.inner(other)?.norm_sqr() / (n2a * n2b))
    }

    /// Amplitude-wise linear combination of same-shape states.
    ///
    /// All terms must share the registry and photon number. The result's
    /// success probability is the minimum over the terms; disagreement
    /// beyond 1e-12 is logged, since mixing branches of different
    /// post-selection history is usually a modelling mistake.
    pub fn superpose(terms: &[(Complex64, &PhotonicState)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptySuperposition)?;
        let mut min_p = f64::INFINITY;
        let mut max_p = f64::NEG_INFINITY;
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (coeff, state) in terms {
            first.check_same_registry(state)?;
            if state.photon_number != first.photon_number {
                return Err(Error::PhotonNumberMismatch {
                    left: first.photon_number,
                    right: state.photon_number,
                });
            }
            min_p = min_p.min(state.success_probability);
            max_p = max_p.max(state.success_probability);
            for (occ, amp) in &state.amps {
                *amps
                    .entry(occ.clone())
                    .or_insert(Complex64::new(0.0, 0.0)) += coeff * amp;
            }
        }
        if max_p - min_p > 1e-12 {
            log::warn!(
                "superposing states with different success probabilities \
                 ({min_p} vs {max_p}); keeping the minimum"
            );
        }
        let mut out = Self {
            registry: Arc::clone(&first.registry),
            photon_number: first.photon_number,
            amps,
            success_probability: min_p,
        };
        out.prune();
        Ok(out)
    }

    pub(crate) fn check_same_registry(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.registry, &other.registry) || *self.registry == *other.registry {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    pub(crate) fn prune(&mut self) {
        self.amps.retain(|_, amp| amp.norm() >= AMPLITUDE_PRUNE_TOLERANCE);
    }

    pub(crate) fn zero_like(&self) -> Self {
        Self {
            registry: Arc::clone(&self.registry),
            photon_number: self.photon_number,
            amps: BTreeMap::new(),
            success_probability: self.success_probability,
        }
    }

    pub(crate) fn from_parts(
        registry: Arc<ModeRegistry>,
        photon_number: u32,
        amps: BTreeMap<Occupation, Complex64>,
        success_probability: f64,
    ) -> Self {
        Self {
            registry,
            photon_number,
            amps,
            success_probability,
        }
    }

    pub(crate) fn set_success_probability(&mut self, p: f64) {
        self.success_probability = p;
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        for (occ, amp) in &other.amps {
            *self
                .amps
                .entry(occ.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
    }

    /// Applies the annihilator `b_v = sum_m conj(v_m) a_m` of a single-photon
    /// state `v` living on `path`.
    pub(crate) fn annihilate_local(&self, path: u32, local: &LocalState) -> Result<Self> {
        let vec = local.mode_vector(&self.registry, path)?;
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            for &(idx, coeff) in &vec {
                let n = occ.count(idx);
                if n > 0 {
                    *amps
                        .entry(occ.lowered(idx))
                        .or_insert(Complex64::new(0.0, 0.0)) +=
                        amp * coeff.conj() * (n as f64).sqrt();
                }
            }
        }
        let mut out = Self {
            registry: Arc::clone(&self.registry),
            photon_number: self.photon_number.saturating_sub(1),
            amps,
            success_probability: self.success_probability,
        };
        out.prune();
        Ok(out)
    }

    /// Applies the creator `b_v^dag = sum_m v_m a_m^dag` of a single-photon
    /// state `v` living on `path`.
    pub(crate) fn create_local(&self, path: u32, local: &LocalState) -> Result<Self> {
        let vec = local.mode_vector(&self.registry, path)?;
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            for &(idx, coeff) in &vec {
                let n = occ.count(idx) as f64;
                *amps
                    .entry(occ.bumped(idx))
                    .or_insert(Complex64::new(0.0, 0.0)) += amp * coeff * (n + 1.0).sqrt();
            }
        }
        let mut out = Self {
            registry: Arc::clone(&self.registry),
            photon_number: self.photon_number + 1,
            amps,
            success_probability: self.success_probability,
        };
        out.prune();
        Ok(out)
    }

    /// Keeps only basis terms with zero photons on `path`.
    pub(crate) fn strip_path_nonvacuum(&self, path: u32) -> Result<Self> {
        let block = self.registry.path_block(path)?;
        let amps = self
            .amps
            .iter()
            .filter(|(occ, _)| occ.counts()[block.clone()].iter().all(|&n| n == 0))
            .map(|(occ, &amp)| (occ.clone(), amp))
            .collect();
        Ok(Self {
            registry: Arc::clone(&self.registry),
            photon_number: self.photon_number,
            amps,
            success_probability: self.success_probability,
        })
    }

    /// Squared norm of `b_w |self>` for a sparse single-photon vector `w`
    /// over mode indices: how much population sits along `w`.
    pub(crate) fn component_along(&self, w: &[(usize, Complex64)]) -> f64 {
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            for &(idx, coeff) in w {
                let n = occ.count(idx);
                if n > 0 {
                    *amps
                        .entry(occ.lowered(idx))
                        .or_insert(Complex64::new(0.0, 0.0)) +=
                        amp * coeff.conj() * (n as f64).sqrt();
                }
            }
        }
        amps.values().map(|a| a.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Polarization, Projector};

    fn reg2() -> Arc<ModeRegistry> {
        ModeRegistry::build(&[1, 2], 1, true).unwrap()
    }

    fn m(path: u32, pol: Polarization, oam: i32) -> ModeLabel {
        ModeLabel::new(path, pol, oam)
    }

    const H: Polarization = Polarization::H;
    const V: Polarization = Polarization::V;

    #[test]
    fn n_fold_creation_gives_sqrt_factorial_norm() {
        let reg = reg2();
        let mode = m(1, H, 0);
        let mut state = PhotonicState::vacuum(Arc::clone(&reg));
        for n in 1..=4u32 {
            state = state.apply_creation(mode).unwrap();
            let expect: f64 = (1..=n as u64).product::<u64>() as f64;
            assert!((state.norm_sqr() - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn creation_order_is_immaterial() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let ab = vac
            .apply_creation(m(1, H, 1))
            .unwrap()
            .apply_creation(m(2, V, -1))
            .unwrap();
        let ba = vac
            .apply_creation(m(2, V, -1))
            .unwrap()
            .apply_creation(m(1, H, 1))
            .unwrap();
        // Same occupation keys with bit-identical amplitudes.
        let a: Vec<_> = ab.amplitudes().collect();
        let b: Vec<_> = ba.amplitudes().collect();
        assert_eq!(a, b);
    }

    /// Oracle worked out by hand on a two-mode, two-photon space.
    ///
    /// Two photons in one mode through a 50/50 mixer
    /// `a^dag -> (a^dag + b^dag)/sqrt(2)`:
    ///   (a^dag)^2/sqrt(2) |vac>  ->  (|20> + sqrt(2)|11> + |02>)/2,
    /// and distinct photons through `a^dag -> (a^dag + b^dag)/sqrt(2)`,
    /// `b^dag -> (a^dag - b^dag)/sqrt(2)`:
    ///   |11>  ->  (|20> - |02>)/sqrt(2)   (the |11> term interferes away).
    #[test]
    fn two_mode_mixer_matches_hand_expansion() {
        use crate::fock::ModeMap;
        let reg = reg2();
        let a = m(1, H, 0);
        let b = m(2, H, 0);
        let ia = reg.index_of(a).unwrap();
        let ib = reg.index_of(b).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| Complex64::new(x, 0.0);

        let mut mixer = ModeMap::identity(&reg, "mixer");
        mixer.set_column(ia, vec![(ia, c(s)), (ib, c(s))]);
        mixer.set_column(ib, vec![(ia, c(s)), (ib, c(-s))]);

        // Two photons in one mode.
        let bunched = PhotonicState::vacuum(Arc::clone(&reg))
            .apply_creation(a)
            .unwrap()
            .apply_creation(a)
            .unwrap()
            .normalize()
            .unwrap();
        let out = mixer.apply(&bunched).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let amp20 = out.basis_amplitude(&[a, a]).unwrap();
        let amp11 = out.basis_amplitude(&[a, b]).unwrap();
        let amp02 = out.basis_amplitude(&[b, b]).unwrap();
        assert!((amp20 - c(0.5)).norm() < 1e-12);
        assert!((amp11 - c(s)).norm() < 1e-12);
        assert!((amp02 - c(0.5)).norm() < 1e-12);

        // Hong-Ou-Mandel: one photon in each mode, |11> cancels.
        let pair = PhotonicState::vacuum(Arc::clone(&reg))
            .apply_creation(a)
            .unwrap()
            .apply_creation(b)
            .unwrap();
        let out = mixer.apply(&pair).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(out.basis_amplitude(&[a, b]).unwrap().norm() < 1e-12);
        assert!((out.basis_amplitude(&[a, a]).unwrap() - c(s)).norm() < 1e-12);
        assert!((out.basis_amplitude(&[b, b]).unwrap() - c(-s)).norm() < 1e-12);
    }

    /// Oracle: <chi(0),chi(0) | Psi_OAM> = 1/sqrt(2), by hand:
    /// (1/2)(<l,l| + <l,-l| + <-l,l| + <-l,-l|) (|l,-l> + |-l,l>)/sqrt(2).
    #[test]
    fn inner_product_of_mask_product_with_bell_state() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let two = |p1: ModeLabel, p2: ModeLabel| {
            vac.apply_creation(p1).unwrap().apply_creation(p2).unwrap()
        };
        let half = Complex64::new(0.5, 0.0);
        let rt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

        let bell = PhotonicState::superpose(&[
            (rt2, &two(m(1, H, 1), m(2, H, -1))),
            (rt2, &two(m(1, H, -1), m(2, H, 1))),
        ])
        .unwrap();
        let mask_product = PhotonicState::superpose(&[
            (half, &two(m(1, H, 1), m(2, H, 1))),
            (half, &two(m(1, H, 1), m(2, H, -1))),
            (half, &two(m(1, H, -1), m(2, H, 1))),
            (half, &two(m(1, H, -1), m(2, H, -1))),
        ])
        .unwrap();
        let ip = mask_product.inner(&bell).unwrap();
        assert!((ip - rt2).norm() < 1e-12);
        assert!((mask_product.fidelity(&bell).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn superpose_rejects_shape_mismatches() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let one = vac.apply_creation(m(1, H, 0)).unwrap();
        let c = Complex64::new(1.0, 0.0);
        assert!(matches!(
            PhotonicState::superpose(&[(c, &vac), (c, &one)]),
            Err(Error::PhotonNumberMismatch { .. })
        ));
        let other_reg = ModeRegistry::build(&[1, 2], 2, true).unwrap();
        let other = PhotonicState::vacuum(other_reg);
        assert!(matches!(
            PhotonicState::superpose(&[(c, &vac), (c, &other)]),
            Err(Error::RegistryMismatch)
        ));
        assert!(matches!(
            PhotonicState::superpose(&[]),
            Err(Error::EmptySuperposition)
        ));
    }

    #[test]
    fn normalize_of_zero_state_fails() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let one = vac.apply_creation(m(1, H, 0)).unwrap();
        let c = Complex64::new(1.0, 0.0);
        let zero = PhotonicState::superpose(&[(c, &one), (-c, &one)]).unwrap();
        assert!(zero.is_zero());
        assert!(matches!(zero.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn tiny_amplitudes_are_pruned() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let a = vac.apply_creation(m(1, H, 0)).unwrap();
        let b = vac.apply_creation(m(2, H, 0)).unwrap();
        let s = PhotonicState::superpose(&[
            (Complex64::new(1.0, 0.0), &a),
            (Complex64::new(1e-15, 0.0), &b),
        ])
        .unwrap();
        assert_eq!(s.term_count(), 1);
    }

    #[test]
    fn success_probability_multiplies_across_projections() {
        let reg = reg2();
        let vac = PhotonicState::vacuum(Arc::clone(&reg));
        let rt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        // (|H,1> + |V,1>)/sqrt(2) x |H,2>
        let hh = vac
            .apply_creation(m(1, H, 0))
            .unwrap()
            .apply_creation(m(2, H, 0))
            .unwrap();
        let vh = vac
            .apply_creation(m(1, V, 0))
            .unwrap()
            .apply_creation(m(2, H, 0))
            .unwrap();
        let state = PhotonicState::superpose(&[(rt2, &hh), (rt2, &vh)]).unwrap();

        let p1 = Projector::rank1(1, LocalState::basis(H, 0)).unwrap();
        let p2 = Projector::rank1(2, LocalState::basis(H, 0)).unwrap();
        let (after1, q1) = crate::fock::project(&state, &p1).unwrap();
        let (after2, q2) = crate::fock::project(&after1, &p2).unwrap();
        assert!((q1 - 0.5).abs() < 1e-12);
        assert!((q2 - 1.0).abs() < 1e-12);
        assert!((after2.success_probability() - 0.5).abs() < 1e-12);
    }
}
