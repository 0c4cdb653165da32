//! Density matrices as finitely supported Hermitian PSD Fourier kernels,
//! their conjugation dynamics, trace densities, and eigendecomposition.
//!
//! A density matrix here is the kernel `ρ̂_{k,j}` of a nonnegative
//! trace-class operator restricted to a finite frequency set. Conjugating by
//! the flow multiplies each kernel entry by `e^{-i(|k|^2-|j|^2)t}`, and the
//! trace density `t_ρ` generalizes `|u|^2`: its space-time coefficients are
//! read off the kernel by grouping entries along chords.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Frequency, Submodule, MAX_DIM};
use crate::state::{CoefficientTable, FourierState};

/// Largest kernel support for the dense Hermitian eigensolve.
pub const MAX_EIGEN_SUPPORT: usize = 512;

/// Relative tolerance on negative eigenvalues before a kernel is rejected
/// as not positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Finitely supported Hermitian positive-semidefinite kernel
/// `(k, j) -> ρ̂_{k,j}` with its trace `Σ_k ρ̂_{k,k}` cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelJson", into = "KernelJson")]
pub struct DensityMatrix {
    dim: usize,
    kernel: BTreeMap<(Frequency, Frequency), Complex64>,
    trace: f64,
}

impl DensityMatrix {
    /// Projection kernel of a pure state: `ρ̂_{k,j} = a_k conj(a_j)`.
    pub fn from_pure(u: &FourierState) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::ZeroState);
        }
        let mut kernel = BTreeMap::new();
        for (k, ak) in u.modes() {
            for (j, aj) in u.modes() {
                kernel.insert((k.clone(), j.clone()), ak * aj.conj());
            }
        }
        Ok(Self::from_kernel(u.dim(), kernel))
    }

    /// Positive combination of pure kernels; weights must be positive. The
    /// states need not be orthogonal.
    pub fn from_mixture(terms: &[(f64, FourierState)]) -> Result<Self> {
        let dim = match terms.first() {
            Some((_, u)) => u.dim(),
            None => return Err(Error::EmptyMixture),
        };
        let mut kernel: BTreeMap<(Frequency, Frequency), Complex64> = BTreeMap::new();
        for (weight, u) in terms {
            if weight.is_nan() || *weight <= 0.0 {
                return Err(Error::NonPositiveWeight(*weight));
            }
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            for (k, ak) in u.modes() {
                for (j, aj) in u.modes() {
                    *kernel
                        .entry((k.clone(), j.clone()))
                        .or_insert(Complex64::new(0.0, 0.0)) += weight * ak * aj.conj();
                }
            }
        }
        Ok(Self::from_kernel(dim, kernel))
    }

    fn from_kernel(dim: usize, kernel: BTreeMap<(Frequency, Frequency), Complex64>) -> Self {
        let trace = kernel
            .iter()
            .filter(|((k, j), _)| k == j)
            .map(|(_, v)| v.re)
            .sum();
        DensityMatrix { dim, kernel, trace }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cached trace `Σ_k ρ̂_{k,k} = ‖t_ρ‖_{L^1}`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn kernel_len(&self) -> usize {
        self.kernel.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Frequency, Frequency), &Complex64)> {
        self.kernel.iter()
    }

    pub fn entry(&self, k: &Frequency, j: &Frequency) -> Complex64 {
        self.kernel
            .get(&(k.clone(), j.clone()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sorted union of row and column support frequencies.
    pub fn support(&self) -> Vec<Frequency> {
        let mut out: Vec<Frequency> = self
            .kernel
            .keys()
            .flat_map(|(k, j)| [k.clone(), j.clone()])
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Conjugation by the flow: `ρ̂_{k,j} -> ρ̂_{k,j} e^{-i(|k|^2-|j|^2)t}`.
    /// Trace, Hermitian symmetry and positivity are preserved; the motion is
    /// 2π-periodic in `t`.
    pub fn evolve(&self, t: f64) -> DensityMatrix {
        let kernel = self
            .kernel
            .iter()
            .map(|((k, j), v)| {
                let phase =
                    Complex64::from_polar(1.0, -((k.norm_sq() - j.norm_sq()) as f64) * t);
                ((k.clone(), j.clone()), v * phase)
            })
            .collect();
        Self::from_kernel(self.dim, kernel)
    }

    /// Space-time coefficients of the trace density: kernel entries grouped
    /// by chord, `b(l, s) = Σ_{k-j=l, |j|^2-|k|^2=s} ρ̂_{k,j}`.
    pub fn trace_density_table(&self) -> CoefficientTable {
        let mut table = CoefficientTable::empty(self.dim);
        for ((k, j), v) in &self.kernel {
            let l = k.sub_widened(j);
            let s = j.norm_sq() - k.norm_sq();
            table.accumulate(l, s, *v);
        }
        table
    }

    /// True iff every nonzero kernel entry has both frequencies in the
    /// submodule: the Fourier form of invariance under translations
    /// orthogonal to it.
    pub fn supported_on(&self, submodule: &Submodule) -> bool {
        self.kernel.iter().all(|((k, j), v)| {
            *v == Complex64::new(0.0, 0.0) || (submodule.contains(k) && submodule.contains(j))
        })
    }

    /// Largest deviation from Hermitian symmetry `ρ̂_{j,k} = conj(ρ̂_{k,j})`.
    pub fn hermitian_defect(&self) -> f64 {
        self.kernel
            .iter()
            .map(|((k, j), v)| (self.entry(j, k) - v.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the dense kernel matrix over the support.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (_, dense) = self.dense_kernel()?;
        let eig = dense.symmetric_eigen();
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Checks positivity within `PSD_TOLERANCE` relative to the trace.
    pub fn check_psd(&self) -> Result<()> {
        if self.kernel.is_empty() {
            return Ok(());
        }
        let min_eig = self.min_eigenvalue()?;
        let tolerance = -PSD_TOLERANCE * self.trace.abs();
        if min_eig < tolerance {
            return Err(Error::NotPositiveSemidefinite { min_eig, tolerance });
        }
        Ok(())
    }

    /// Spectral decomposition into weighted orthonormal states:
    /// eigenvalues in `[-PSD_TOLERANCE·trace, 0)` are clamped to zero and
    /// zero-weight directions are dropped, so
    /// `ρ̂ = Σ_n λ_n u_n ⊗ conj(u_n)` over the returned list.
    pub fn eigendecompose(&self) -> Result<Vec<(f64, FourierState)>> {
        let (support, dense) = self.dense_kernel()?;
        if support.is_empty() {
            return Ok(Vec::new());
        }
        let eig = dense.symmetric_eigen();
        let tolerance = -PSD_TOLERANCE * self.trace.abs();
        let mut out = Vec::new();
        for n in 0..support.len() {
            let lambda = eig.eigenvalues[n];
            if lambda < tolerance {
                return Err(Error::NotPositiveSemidefinite {
                    min_eig: lambda,
                    tolerance,
                });
            }
            let weight = lambda.max(0.0);
            if weight <= self.trace.abs() * 1e-12 {
                continue;
            }
            let modes = support
                .iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), eig.eigenvectors[(i, n)]))
                .collect();
            out.push((weight, FourierState::new(self.dim, modes)?));
        }
        // descending weights; the sort is stable, so ties keep the
        // deterministic eigensolver order
        out.sort_by(|(wa, _), (wb, _)| wb.partial_cmp(wa).unwrap());
        Ok(out)
    }

    fn dense_kernel(&self) -> Result<(Vec<Frequency>, DMatrix<Complex64>)> {
        let support = self.support();
        if support.len() > MAX_EIGEN_SUPPORT {
            return Err(Error::SupportTooLarge {
                size: support.len(),
                max: MAX_EIGEN_SUPPORT,
            });
        }
        let index: BTreeMap<&Frequency, usize> =
            support.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut dense = DMatrix::from_element(
            support.len(),
            support.len(),
            Complex64::new(0.0, 0.0),
        );
        for ((k, j), v) in &self.kernel {
            dense[(index[k], index[j])] = *v;
        }
        Ok((support, dense))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel serialization cannot fail")
    }

    /// Parses the triangular JSON format and validates Hermitian symmetry
    /// and positivity.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let rho: DensityMatrix = serde_json::from_str(text)?;
        rho.check_psd()?;
        Ok(rho)
    }
}

/// JSON form stores one triangle (`k >= j` lexicographically); the other
/// triangle is implied by Hermitian symmetry.
#[derive(Serialize, Deserialize)]
struct KernelJson {
    d: usize,
    entries: Vec<KernelEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct KernelEntryJson {
    k: Vec<i64>,
    j: Vec<i64>,
    re: f64,
    im: f64,
}

impl TryFrom<KernelJson> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: KernelJson) -> Result<Self> {
        if raw.d == 0 || raw.d > MAX_DIM {
            return Err(Error::BadDimension(raw.d));
        }
        let mut kernel = BTreeMap::new();
        for e in raw.entries {
            let k = Frequency::new(e.k)?;
            let j = Frequency::new(e.j)?;
            if k.dim() != raw.d || j.dim() != raw.d {
                return Err(Error::DimensionMismatch {
                    expected: raw.d,
                    got: k.dim().max(j.dim()),
                });
            }
            if k < j {
                return Err(Error::NotHermitian {
                    k: k.coords().to_vec(),
                    j: j.coords().to_vec(),
                });
            }
            if k == j && e.im != 0.0 {
                return Err(Error::NotHermitian {
                    k: k.coords().to_vec(),
                    j: j.coords().to_vec(),
                });
            }
            let v = Complex64::new(e.re, e.im);
            if kernel.insert((k.clone(), j.clone()), v).is_some() {
                return Err(Error::DuplicateFrequency(
                    k.coords().iter().chain(j.coords()).copied().collect(),
                ));
            }
            if k != j {
                kernel.insert((j, k), v.conj());
            }
        }
        Ok(DensityMatrix::from_kernel(raw.d, kernel))
    }
}

impl From<DensityMatrix> for KernelJson {
    fn from(rho: DensityMatrix) -> Self {
        KernelJson {
            d: rho.dim,
            entries: rho
                .kernel
                .iter()
                .filter(|((k, j), _)| k >= j)
                .map(|((k, j), v)| KernelEntryJson {
                    k: k.coords().to_vec(),
                    j: j.coords().to_vec(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }
}
