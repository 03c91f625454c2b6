//! Single-photon mode maps and their lift to many-photon states.
//!
//! A linear map `A` on the single-photon mode space extends to `N` photons
//! by substituting creation operators: `a_i^dag -> sum_j A_ji a_j^dag`.
//! [`ModeMap::apply`] performs that substitution exactly, expanding the
//! creation polynomial term by term, so bosonic interference (Hong-Ou-Mandel
//! style factors of `sqrt(2)`) falls out of the algebra rather than being
//! special-cased.
//!
//! A map may be unitary only on a *declared domain* (a subspace of the
//! single-photon space). The orthogonal complement of that domain is stored
//! as explicit vectors; applying the map to a state with population along
//! any of them is a hard error. This is how the registry's OAM truncation
//! stays honest: an element that would push a photon outside the registry
//! rejects the state instead of silently dropping amplitude.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::state::NORM_SQR_TOLERANCE;
use super::{ModeRegistry, Occupation, PhotonicState};

/// Sparse single-photon vector over registry mode indices.
pub type SparseVector = Vec<(usize, Complex64)>;

/// A linear single-photon map over the registry's modes.
#[derive(Clone, Debug)]
pub struct ModeMap {
    registry: Arc<ModeRegistry>,
    /// `columns[i]` lists `(j, A_ji)`: the image of mode `i`.
    columns: Vec<SparseVector>,
    /// Orthonormal vectors spanning the complement of the declared domain,
    /// each with a label for error messages.
    domain_complement: Vec<(String, SparseVector)>,
    label: String,
}

impl ModeMap {
    /// The identity map (total domain).
    pub fn identity(registry: &Arc<ModeRegistry>, label: &str) -> Self {
        let columns = (0..registry.num_modes())
            .map(|i| vec![(i, Complex64::new(1.0, 0.0))])
            .collect();
        Self {
            registry: Arc::clone(registry),
            columns,
            domain_complement: Vec::new(),
            label: label.to_string(),
        }
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Replaces the image of mode `from`. An empty column annihilates the
    /// component (used by lossy, post-selecting elements).
    pub fn set_column(&mut self, from: usize, entries: SparseVector) {
        self.columns[from] = entries;
    }

    /// Zeroes every column belonging to `path` (precursor to rebuilding a
    /// path-local block).
    pub fn clear_path(&mut self, path: u32) -> Result<()> {
        for i in self.registry.path_block(path)? {
            self.columns[i].clear();
        }
        Ok(())
    }

    /// Adds the rank-one block `|out><in|` to the matrix.
    pub fn add_outer(&mut self, out: &SparseVector, input: &SparseVector) {
        for &(i, vi) in input {
            let coeff = vi.conj();
            for &(j, wj) in out {
                push_entry(&mut self.columns[i], j, wj * coeff);
            }
        }
    }

    /// Declares a vector orthogonal to the map's domain; population along it
    /// makes `apply` fail with the given label in the message.
    pub fn forbid(&mut self, label: impl Into<String>, vector: SparseVector) {
        self.domain_complement.push((label.into(), vector));
    }

    /// Conjugate transpose. The declared domain complement is kept, which is
    /// correct whenever the map's image subspace equals its domain (true for
    /// the elements in this crate that use it).
    pub fn adjoint(&self) -> Self {
        let n = self.registry.num_modes();
        let mut columns: Vec<SparseVector> = vec![Vec::new(); n];
        for (i, col) in self.columns.iter().enumerate() {
            for &(j, a) in col {
                push_entry(&mut columns[j], i, a.conj());
            }
        }
        Self {
            registry: Arc::clone(&self.registry),
            columns,
            domain_complement: self.domain_complement.clone(),
            label: format!("{}^dag", self.label),
        }
    }

    /// Max deviation of `<u|A^dag A|v> - <u|v>` over the given domain
    /// vectors: zero (within float noise) iff the map is an isometry there.
    pub fn isometry_deviation(&self, domain: &[SparseVector]) -> f64 {
        let images: Vec<SparseVector> = domain.iter().map(|v| self.image_of(v)).collect();
        let mut worst: f64 = 0.0;
        for (i, u) in domain.iter().enumerate() {
            for (j, v) in domain.iter().enumerate() {
                let want = dot(u, v);
                let got = dot(&images[i], &images[j]);
                worst = worst.max((got - want).norm());
            }
        }
        worst
    }

    fn image_of(&self, v: &SparseVector) -> SparseVector {
        let mut out: BTreeMap<usize, Complex64> = BTreeMap::new();
        for &(i, vi) in v {
            for &(j, a) in &self.columns[i] {
                *out.entry(j).or_insert(Complex64::new(0.0, 0.0)) += a * vi;
            }
        }
        out.into_iter().collect()
    }

    /// Lifts the map to the state's photon number and applies it.
    ///
    /// Exact: iterates the creation-polynomial expansion photon by photon,
    /// carrying `sqrt(n+1)` bosonic factors. Errors if the state occupies
    /// the declared domain complement.
    pub fn apply(&self, state: &PhotonicState) -> Result<PhotonicState> {
        if !(Arc::ptr_eq(state.registry(), &self.registry)
            || **state.registry() == *self.registry)
        {
            return Err(Error::RegistryMismatch);
        }

        for (label, vector) in &self.domain_complement {
            if state.component_along(vector) > NORM_SQR_TOLERANCE {
                return Err(Error::OutsideDomain {
                    element: self.label.clone(),
                    detail: label.clone(),
                });
            }
        }

        let n_modes = self.registry.num_modes();
        let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in state.amplitudes() {
            // |n> = prod (a^dag)^{n_i} / sqrt(prod n_i!) |vac>; substitute
            // each a_i^dag by its image and expand.
            let seed = amp / occ.factorial_product().sqrt();
            let mut poly: BTreeMap<Occupation, Complex64> = BTreeMap::new();
            poly.insert(Occupation::empty(n_modes), seed);
            for (i, &count) in occ.counts().iter().enumerate() {
                for _ in 0..count {
                    let mut next: BTreeMap<Occupation, Complex64> = BTreeMap::new();
                    for (partial, p_amp) in &poly {
                        for &(j, a_ji) in &self.columns[i] {
                            let nj = partial.count(j) as f64;
                            *next
                                .entry(partial.bumped(j))
                                .or_insert(Complex64::new(0.0, 0.0)) +=
                                p_amp * a_ji * (nj + 1.0).sqrt();
                        }
                    }
                    poly = next;
                }
            }
            for (res, res_amp) in poly {
                *out.entry(res).or_insert(Complex64::new(0.0, 0.0)) += res_amp;
            }
        }
        let mut result = PhotonicState::from_parts(
            Arc::clone(state.registry()),
            state.photon_number(),
            out,
            state.success_probability(),
        );
        result.prune();
        Ok(result)
    }
}

fn push_entry(col: &mut SparseVector, index: usize, value: Complex64) {
    if let Some(entry) = col.iter_mut().find(|(j, _)| *j == index) {
        entry.1 += value;
    } else {
        col.push((index, value));
    }
}

fn dot(u: &SparseVector, v: &SparseVector) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(i, ui) in u {
        for &(j, vj) in v {
            if i == j {
                acc += ui.conj() * vj;
            }
        }
    }
    acc
}
