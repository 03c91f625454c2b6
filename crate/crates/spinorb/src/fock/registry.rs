//! Mode bookkeeping.
//!
//! A photon is labelled by the spatial path it travels, its polarization
//! and its orbital angular momentum (OAM). The [`ModeRegistry`] fixes, once
//! per simulation, which labels exist and in which order they are
//! enumerated; every state and every optical element refers back to it.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Linear polarization basis label. `H` sorts before `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    /// Both basis labels, in registry order.
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    /// The orthogonal label.
    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// One optical mode: (path, polarization, OAM quantum number).
///
/// The derived ordering (path, then polarization, then OAM) is exactly the
/// registry enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub path: u32,
    pub pol: Polarization,
    pub oam: i32,
}

impl ModeLabel {
    pub fn new(path: u32, pol: Polarization, oam: i32) -> Self {
        Self { path, pol, oam }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{:+})", self.path, self.pol, self.oam)
    }
}

/// Deterministic, total enumeration of the modes a simulation can occupy.
///
/// The OAM axis is deliberately truncated to the values reachable in a run:
/// `-l`, `+l` and (optionally) `0`. Anything an element would map outside
/// this set is a hard error at the element, never a silent truncation, so
/// the truncation cannot corrupt amplitudes.
///
/// Modes are ordered path-major, then `H` before `V`, then OAM ascending;
/// the order is stable across runs and processes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegistry {
    paths: Vec<u32>,
    oam_values: Vec<i32>,
    l: u32,
    modes: Vec<ModeLabel>,
}

impl ModeRegistry {
    /// Builds a registry over the given paths with OAM order `l >= 1`.
    ///
    /// `include_zero_oam` adds the OAM-0 plane needed by sources and by
    /// sorting elements that erase OAM.
    pub fn build(paths: &[u32], l: u32, include_zero_oam: bool) -> Result<Arc<Self>> {
        if paths.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        if l == 0 {
            return Err(Error::InvalidOamOrder(0));
        }
        let mut sorted = paths.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePath(w[0]));
            }
        }
        let oam_values = if include_zero_oam {
            vec![-(l as i32), 0, l as i32]
        } else {
            vec![-(l as i32), l as i32]
        };
        let mut modes = Vec::with_capacity(sorted.len() * 2 * oam_values.len());
        for &path in &sorted {
            for pol in Polarization::BOTH {
                for &oam in &oam_values {
                    modes.push(ModeLabel { path, pol, oam });
                }
            }
        }
        Ok(Arc::new(Self {
            paths: sorted,
            oam_values,
            l,
            modes,
        }))
    }

    /// Number of modes (paths x polarizations x OAM values).
    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    /// All modes in enumeration order.
    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    /// Registered path indices, ascending.
    pub fn paths(&self) -> &[u32] {
        &self.paths
    }

    /// Registered OAM values, ascending.
    pub fn oam_values(&self) -> &[i32] {
        &self.oam_values
    }

    /// The OAM order `l` the registry was built for.
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn contains_path(&self, path: u32) -> bool {
        self.paths.binary_search(&path).is_ok()
    }

    /// Index of a mode in enumeration order.
    pub fn index_of(&self, mode: ModeLabel) -> Result<usize> {
        // `modes` is sorted by the derived `ModeLabel` ordering.
        self.modes
            .binary_search(&mode)
            .map_err(|_| Error::UnregisteredMode(mode))
    }

    /// Mode label at a given index.
    pub fn mode_at(&self, index: usize) -> ModeLabel {
        self.modes[index]
    }

    /// Contiguous index range of all modes on one path.
    pub fn path_block(&self, path: u32) -> Result<Range<usize>> {
        let pos = self
            .paths
            .binary_search(&path)
            .map_err(|_| Error::UnregisteredPath(path))?;
        let block = 2 * self.oam_values.len();
        Ok(pos * block..(pos + 1) * block)
    }
}
