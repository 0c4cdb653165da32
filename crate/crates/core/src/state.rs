//! Finitely supported Fourier states, exact Schrödinger evolution, and the
//! space-time Fourier coefficients of the density `|e^{itΔ}u|^2`.
//!
//! A state is a finite trigonometric polynomial `u(x) = Σ a_k e^{ik·x}`;
//! the flow multiplies each amplitude by `e^{-i|k|^2 t}`, so evolution is
//! exact. The coefficients `b(l,s)` of the density are computed by two
//! independent routes: the defining double sum over support pairs, and the
//! chord-hyperplane route that groups origins `j` on the lattice hyperplane
//! of each chord `(l,s)`. The two must agree entrywise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ndarray::{ArrayD, Dimension};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{difference_set, Chord, Frequency, MAX_DIM};

/// A finitely supported map from frequencies `k in Z^d` to complex
/// amplitudes `a_k`, with the squared norm `Σ |a_k|^2` cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct FourierState {
    dim: usize,
    amplitudes: BTreeMap<Frequency, Complex64>,
    norm_sq: f64,
}

impl FourierState {
    /// Builds a state from distinct `(frequency, amplitude)` pairs. Zero
    /// amplitudes are dropped; duplicates and dimension mismatches are
    /// rejected.
    pub fn new(dim: usize, modes: Vec<(Frequency, Complex64)>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        let mut amplitudes = BTreeMap::new();
        for (k, a) in modes {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFiniteAmplitude(k.coords().to_vec()));
            }
            if amplitudes.contains_key(&k) {
                return Err(Error::DuplicateFrequency(k.coords().to_vec()));
            }
            if a != Complex64::new(0.0, 0.0) {
                amplitudes.insert(k, a);
            }
        }
        Ok(Self::from_map(dim, amplitudes))
    }

    pub(crate) fn from_map(dim: usize, amplitudes: BTreeMap<Frequency, Complex64>) -> Self {
        let norm_sq = amplitudes.values().map(|a| a.norm_sqr()).sum();
        FourierState {
            dim,
            amplitudes,
            norm_sq,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cached `‖u‖^2 = Σ |a_k|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    /// Support frequencies in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &Frequency> {
        self.amplitudes.keys()
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Frequency, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, k: &Frequency) -> Complex64 {
        self.amplitudes
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest coordinate magnitude over the support (0 for the zero state).
    pub fn max_coord(&self) -> i64 {
        self.amplitudes
            .keys()
            .map(|k| k.max_norm())
            .max()
            .unwrap_or(0)
    }

    /// Exact evolution under the flow: `a_k -> a_k e^{-i|k|^2 t}`. The
    /// support and the squared norm are unchanged; `t` is dimensionless
    /// torus time, 2π-periodic.
    pub fn evolve(&self, t: f64) -> FourierState {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, a)| {
                let phase = Complex64::from_polar(1.0, -(k.norm_sq() as f64) * t);
                (k.clone(), a * phase)
            })
            .collect();
        Self::from_map(self.dim, amplitudes)
    }

    /// Values `ψ(x_m, t)` on the uniform grid `x_m = 2π m / n`,
    /// `m in {0..n-1}^d`, by direct trigonometric summation.
    ///
    /// Requires `n >= 2·max|coordinate| + 1` so the support is not aliased.
    pub fn evaluate_grid(&self, t: f64, n: usize) -> Result<ArrayD<Complex64>> {
        let required = 2 * self.max_coord() as usize + 1;
        if n < required {
            return Err(Error::Aliasing { required, got: n });
        }
        let evolved: Vec<(&Frequency, Complex64)> = self
            .amplitudes
            .iter()
            .map(|(k, a)| {
                let phase = Complex64::from_polar(1.0, -(k.norm_sq() as f64) * t);
                (k, a * phase)
            })
            .collect();
        let shape: Vec<usize> = vec![n; self.dim];
        let step = std::f64::consts::TAU / n as f64;
        let mut grid = ArrayD::from_elem(shape.as_slice(), Complex64::new(0.0, 0.0));
        for (idx, slot) in grid.indexed_iter_mut() {
            let x: Vec<f64> = idx.slice().iter().map(|&m| m as f64 * step).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in &evolved {
                let angle: f64 = k
                    .coords()
                    .iter()
                    .zip(&x)
                    .map(|(&ki, &xi)| ki as f64 * xi)
                    .sum();
                acc += a * Complex64::from_polar(1.0, angle);
            }
            *slot = acc;
        }
        Ok(grid)
    }

    /// Coefficients of `|e^{itΔ}u|^2` by the defining double sum: every
    /// ordered support pair `(k, j)` contributes `a_k conj(a_j)` at
    /// `(k - j, |j|^2 - |k|^2)`. Pairs are visited in lexicographic order.
    pub fn density_table_bruteforce(&self) -> CoefficientTable {
        let mut table = CoefficientTable::empty(self.dim);
        for (k, ak) in &self.amplitudes {
            for (j, aj) in &self.amplitudes {
                let l = k.sub_widened(j);
                let s = j.norm_sq() - k.norm_sq();
                table.accumulate(l, s, ak * aj.conj());
            }
        }
        table
    }

    /// Coefficients of the density by the chord-hyperplane route:
    /// `b(0,0) = ‖u‖^2`, the other `l = 0` coefficients vanish, and for each
    /// candidate shift `l != 0` the coefficient at `(l, s)` sums
    /// `a_{j+l} conj(a_j)` over support origins `j` on the hyperplane of the
    /// chord `(l, s)`.
    pub fn density_table_hyperplane(&self) -> CoefficientTable {
        let mut table = CoefficientTable::empty(self.dim);
        if self.amplitudes.is_empty() {
            return table;
        }
        table.accumulate(
            Frequency::zero(self.dim).expect("dim checked"),
            0,
            Complex64::new(self.norm_sq, 0.0),
        );
        for l in difference_set(self.amplitudes.keys()) {
            // temporal frequencies realized by origins with both ends in the
            // support, via s = -|l|^2 - 2 l·j
            let mut temporal: Vec<i64> = Vec::new();
            for j in self.amplitudes.keys() {
                if self.has_shifted(j, &l) {
                    let s = -l.norm_sq() - 2 * l.dot(j);
                    if !temporal.contains(&s) {
                        temporal.push(s);
                    }
                }
            }
            temporal.sort_unstable();
            for s in temporal {
                let chord = Chord::new_widened(l.clone(), s);
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, aj) in &self.amplitudes {
                    if !chord.hyperplane_contains(j) {
                        continue;
                    }
                    if let Some(ak) = self.shifted_amplitude(j, &l) {
                        acc += ak * aj.conj();
                    }
                }
                table.accumulate(l.clone(), s, acc);
            }
        }
        table
    }

    fn has_shifted(&self, j: &Frequency, l: &Frequency) -> bool {
        self.shifted_amplitude(j, l).is_some()
    }

    /// Amplitude at `j + l`, where the sum may leave the public coordinate
    /// bound (in which case it is certainly outside the support).
    pub(crate) fn shifted_amplitude(&self, j: &Frequency, l: &Frequency) -> Option<Complex64> {
        let k = Frequency::from_coords_widened(
            j.coords()
                .iter()
                .zip(l.coords())
                .map(|(&a, &b)| a + b)
                .collect(),
        );
        self.amplitudes.get(&k).copied()
    }

    /// L^2 mass below and above the frequency window `[delta/h, r/h]`:
    /// `low = Σ_{|k| < delta/h} |a_k|^2`, `high = Σ_{|k| > r/h} |a_k|^2`
    /// with the Euclidean norm `|k|`.
    pub fn oscillation_profile(&self, h: f64, delta: f64, r: f64) -> OscillationProfile {
        assert!(h > 0.0 && delta > 0.0 && r > 0.0, "scales must be positive");
        let low_cut = (delta / h).powi(2);
        let high_cut = (r / h).powi(2);
        let mut low = 0.0;
        let mut high = 0.0;
        for (k, a) in &self.amplitudes {
            let nsq = k.norm_sq() as f64;
            if nsq < low_cut {
                low += a.norm_sqr();
            }
            if nsq > high_cut {
                high += a.norm_sqr();
            }
        }
        OscillationProfile {
            low_mass: low,
            high_mass: high,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Frequency-window masses reported by [`FourierState::oscillation_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationProfile {
    pub low_mass: f64,
    pub high_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    d: usize,
    modes: Vec<ModeJson>,
}

#[derive(Serialize, Deserialize)]
struct ModeJson {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

impl TryFrom<StateJson> for FourierState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let modes = raw
            .modes
            .into_iter()
            .map(|m| Ok((Frequency::new(m.k)?, Complex64::new(m.re, m.im))))
            .collect::<Result<Vec<_>>>()?;
        FourierState::new(raw.d, modes)
    }
}

impl From<FourierState> for StateJson {
    fn from(state: FourierState) -> Self {
        StateJson {
            d: state.dim,
            modes: state
                .amplitudes
                .iter()
                .map(|(k, a)| ModeJson {
                    k: k.coords().to_vec(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

/// A finitely supported map `(l, s) -> b(l, s)`: the space-time Fourier data
/// of a density. Keys are ordered lexicographically on `(l_1..l_d, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    dim: usize,
    entries: BTreeMap<(Frequency, i64), Complex64>,
}

impl CoefficientTable {
    pub fn empty(dim: usize) -> Self {
        CoefficientTable {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, l: &Frequency, s: i64) -> Complex64 {
        self.entries
            .get(&(l.clone(), s))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Frequency, i64), &Complex64)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &(Frequency, i64)> {
        self.entries.keys()
    }

    pub(crate) fn accumulate(&mut self, l: Frequency, s: i64, value: Complex64) {
        *self
            .entries
            .entry((l, s))
            .or_insert(Complex64::new(0.0, 0.0)) += value;
    }

    pub(crate) fn insert(&mut self, l: Frequency, s: i64, value: Complex64) {
        self.entries.insert((l, s), value);
    }

    /// Scaled sum of another table into this one (used for mixtures).
    pub fn add_scaled(&mut self, other: &CoefficientTable, weight: f64) {
        for ((l, s), v) in &other.entries {
            self.accumulate(l.clone(), *s, v * weight);
        }
    }

    /// Largest absolute difference against another table, over the union of
    /// their supports.
    pub fn max_abs_diff(&self, other: &CoefficientTable) -> f64 {
        let mut keys: Vec<&(Frequency, i64)> = self.entries.keys().collect();
        keys.extend(other.entries.keys());
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|(l, s)| (self.entry(l, *s) - other.entry(l, *s)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry
    /// `entry(-l, -s) = conj(entry(l, s))`.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|((l, s), v)| (self.entry(&l.negate(), -s) - v.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Restriction to the window `|l|_inf <= window_l`, `|s| <= window_s`.
    pub fn restrict(&self, window_l: i64, window_s: i64) -> CoefficientTable {
        let entries = self
            .entries
            .iter()
            .filter(|((l, s), _)| l.max_norm() <= window_l && s.abs() <= window_s)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        CoefficientTable {
            dim: self.dim,
            entries,
        }
    }

    /// CSV serialization: header `l_1,...,l_d,s,re,im`, rows in
    /// lexicographic key order, floats with 17 significant digits so the
    /// values round-trip bit-exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.dim {
            let _ = write!(out, "l_{i},");
        }
        out.push_str("s,re,im\n");
        for ((l, s), v) in &self.entries {
            for c in l.coords() {
                let _ = write!(out, "{c},");
            }
            let _ = writeln!(out, "{s},{:.16e},{:.16e}", v.re, v.im);
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Csv {
            line: 1,
            message: "missing header".into(),
        })?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[cols.len() - 3] != "s" {
            return Err(Error::Csv {
                line: 1,
                message: format!("unexpected header {header:?}"),
            });
        }
        let dim = cols.len() - 3;
        let mut table = CoefficientTable::empty(dim);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 3 {
                return Err(Error::Csv {
                    line: i + 1,
                    message: format!("expected {} fields, got {}", dim + 3, fields.len()),
                });
            }
            let parse_int = |f: &str| {
                f.parse::<i64>().map_err(|e| Error::Csv {
                    line: i + 1,
                    message: format!("bad integer {f:?}: {e}"),
                })
            };
            let parse_float = |f: &str| {
                f.parse::<f64>().map_err(|e| Error::Csv {
                    line: i + 1,
                    message: format!("bad float {f:?}: {e}"),
                })
            };
            let coords = fields[..dim]
                .iter()
                .map(|f| parse_int(f))
                .collect::<Result<Vec<i64>>>()?;
            let s = parse_int(fields[dim])?;
            let re = parse_float(fields[dim + 1])?;
            let im = parse_float(fields[dim + 2])?;
            table.insert(
                Frequency::from_coords_widened(coords),
                s,
                Complex64::new(re, im),
            );
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(coords: &[i64]) -> Frequency {
        Frequency::new(coords.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_mode_d1() -> FourierState {
        FourierState::new(1, vec![(f(&[0]), c(1.0, 0.0)), (f(&[1]), c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn make_state_constant() {
        let u = FourierState::new(1, vec![(f(&[0]), c(1.0, 0.0))]).unwrap();
        assert_eq!(u.norm_sq(), 1.0);
        assert_eq!(u.support_len(), 1);
    }

    #[test]
    fn make_state_two_modes_d2() {
        let u = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(1.0, 0.0)), (f(&[0, 1]), c(0.0, 1.0))],
        )
        .unwrap();
        assert_eq!(u.norm_sq(), 2.0);
    }

    #[test]
    fn make_state_duplicate_rejected() {
        let e = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(1.0, 0.0)), (f(&[1, 0]), c(2.0, 0.0))],
        )
        .unwrap_err();
        assert!(matches!(e, Error::DuplicateFrequency(_)));
    }

    #[test]
    fn make_state_drops_zero_amplitudes() {
        let u = FourierState::new(
            1,
            vec![(f(&[0]), c(1.0, 0.0)), (f(&[3]), c(0.0, 0.0))],
        )
        .unwrap();
        assert_eq!(u.support_len(), 1);
    }

    #[test]
    fn evolve_t_zero_is_identity() {
        let u = two_mode_d1();
        assert_eq!(u.evolve(0.0), u);
    }

    #[test]
    fn evolve_full_period_mode() {
        // |k|^2 = 2, t = π: phase e^{-2πi} = 1
        let u = FourierState::new(2, vec![(f(&[1, 1]), c(0.5, -0.25))]).unwrap();
        let v = u.evolve(std::f64::consts::PI);
        let diff = (v.amplitude(&f(&[1, 1])) - u.amplitude(&f(&[1, 1]))).norm();
        assert!(diff < 1e-12, "diff = {diff}");
    }

    #[test]
    fn evolve_relative_phase() {
        let u = two_mode_d1();
        let v = u.evolve(std::f64::consts::FRAC_PI_2);
        let ratio = v.amplitude(&f(&[1])) / v.amplitude(&f(&[0]));
        let expected = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_2);
        assert!((ratio - expected).norm() < 1e-12);
    }

    #[test]
    fn evolve_preserves_norm() {
        let u = FourierState::new(
            2,
            vec![
                (f(&[1, 0]), c(0.3, 0.7)),
                (f(&[0, 2]), c(-1.0, 0.1)),
                (f(&[-2, 1]), c(0.0, -0.4)),
            ],
        )
        .unwrap();
        for t in [0.0, 0.1, 1.0, std::f64::consts::PI, std::f64::consts::TAU] {
            let v = u.evolve(t);
            assert!((v.norm_sq() - u.norm_sq()).abs() <= 1e-12 * u.norm_sq());
        }
    }

    #[test]
    fn grid_constant_state() {
        let u = FourierState::new(2, vec![(f(&[0, 0]), c(1.0, 0.0))]).unwrap();
        let g = u.evaluate_grid(0.37, 5).unwrap();
        for v in g.iter() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_single_mode_quarter_turns() {
        let u = FourierState::new(1, vec![(f(&[1]), c(1.0, 0.0))]).unwrap();
        let g = u.evaluate_grid(0.0, 4).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (got, want) in g.iter().zip(expected) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_matches_term_summation_oracle() {
        let u = FourierState::new(
            1,
            vec![(f(&[-1]), c(0.5, 0.5)), (f(&[2]), c(-0.25, 1.0))],
        )
        .unwrap();
        let t = 0.8;
        let n = 7;
        let g = u.evaluate_grid(t, n).unwrap();
        for m in 0..n {
            let x = std::f64::consts::TAU * m as f64 / n as f64;
            // independent term-by-term sum
            let mut oracle = c(0.0, 0.0);
            for (k, a) in u.modes() {
                let k0 = k.coords()[0] as f64;
                oracle += a * Complex64::from_polar(1.0, k0 * x - k0 * k0 * t);
            }
            assert!((g[[m]] - oracle).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_aliasing_rejected() {
        let u = FourierState::new(1, vec![(f(&[3]), c(1.0, 0.0))]).unwrap();
        let e = u.evaluate_grid(0.0, 6).unwrap_err();
        assert!(matches!(e, Error::Aliasing { required: 7, got: 6 }));
    }

    #[test]
    fn bruteforce_single_mode() {
        let u = FourierState::new(2, vec![(f(&[3, -1]), c(0.0, 0.5))]).unwrap();
        let table = u.density_table_bruteforce();
        assert_eq!(table.len(), 1);
        let v = table.entry(&f(&[0, 0]), 0);
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bruteforce_two_modes_d1() {
        let table = two_mode_d1().density_table_bruteforce();
        assert_eq!(table.len(), 3);
        assert_eq!(table.entry(&f(&[0]), 0), c(2.0, 0.0));
        assert_eq!(table.entry(&f(&[1]), -1), c(1.0, 0.0));
        assert_eq!(table.entry(&f(&[-1]), 1), c(1.0, 0.0));
    }

    #[test]
    fn bruteforce_two_modes_d2_same_sphere() {
        let u = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(1.0, 0.0)), (f(&[0, 1]), c(1.0, 0.0))],
        )
        .unwrap();
        let table = u.density_table_bruteforce();
        assert_eq!(table.entry(&f(&[0, 0]), 0), c(2.0, 0.0));
        assert_eq!(table.entry(&f(&[1, -1]), 0), c(1.0, 0.0));
        assert_eq!(table.entry(&f(&[-1, 1]), 0), c(1.0, 0.0));
        assert_eq!(table.len(), 3);
    }

    #[test]
    fn hyperplane_route_single_mode() {
        let u = FourierState::new(2, vec![(f(&[3, -1]), c(0.0, 0.5))]).unwrap();
        let table = u.density_table_hyperplane();
        assert_eq!(table.len(), 1);
        assert!((table.entry(&f(&[0, 0]), 0) - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hyperplane_matches_bruteforce_two_modes() {
        let u = two_mode_d1();
        let a = u.density_table_bruteforce();
        let b = u.density_table_hyperplane();
        assert_eq!(a.max_abs_diff(&b), 0.0);
    }

    #[test]
    fn oscillation_profile_window() {
        // mode at |k| = 10 with h = 0.1: inside the window [0.5/h, 2/h]
        let u = FourierState::new(1, vec![(f(&[10]), c(1.0, 0.0))]).unwrap();
        let p = u.oscillation_profile(0.1, 0.5, 2.0);
        assert_eq!(p.low_mass, 0.0);
        assert_eq!(p.high_mass, 0.0);
    }

    #[test]
    fn oscillation_profile_constant_state() {
        let u = FourierState::new(1, vec![(f(&[0]), c(1.0, 0.0))]).unwrap();
        let p = u.oscillation_profile(0.1, 0.5, 2.0);
        assert_eq!(p.low_mass, u.norm_sq());
        assert_eq!(p.high_mass, 0.0);
    }

    #[test]
    fn oscillation_profile_filter_oracle() {
        let u = FourierState::new(
            2,
            vec![
                (f(&[0, 0]), c(0.5, 0.0)),
                (f(&[3, 4]), c(0.0, 1.0)),
                (f(&[20, 0]), c(-0.5, 0.5)),
            ],
        )
        .unwrap();
        let (h, delta, r) = (0.25, 2.0, 4.0);
        let p = u.oscillation_profile(h, delta, r);
        let mut low = 0.0;
        let mut high = 0.0;
        for (k, a) in u.modes() {
            let norm = (k.norm_sq() as f64).sqrt();
            if norm < delta / h {
                low += a.norm_sqr();
            }
            if norm > r / h {
                high += a.norm_sqr();
            }
        }
        assert_eq!(p.low_mass, low);
        assert_eq!(p.high_mass, high);
    }

    #[test]
    fn state_json_round_trip() {
        let u = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(0.25, -1.5)), (f(&[0, 1]), c(0.0, 1.0))],
        )
        .unwrap();
        let text = u.to_json_string();
        let v = FourierState::from_json_str(&text).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn state_json_duplicate_rejected() {
        let text = r#"{"d":1,"modes":[{"k":[1],"re":1.0,"im":0.0},{"k":[1],"re":2.0,"im":0.0}]}"#;
        assert!(FourierState::from_json_str(text).is_err());
    }

    #[test]
    fn table_csv_round_trip_is_bit_exact() {
        let u = FourierState::new(
            2,
            vec![
                (f(&[1, 0]), c(0.1234567890123456, -0.75)),
                (f(&[0, 1]), c(1.0 / 3.0, 2.0f64.sqrt())),
            ],
        )
        .unwrap();
        let table = u.density_table_hyperplane();
        let text = table.to_csv_string();
        assert!(text.starts_with("l_1,l_2,s,re,im\n"));
        let back = CoefficientTable::from_csv_str(&text).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn table_hermitian_defect_zero_for_density() {
        let u = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(0.3, 0.4)), (f(&[0, 1]), c(-0.2, 0.9))],
        )
        .unwrap();
        assert!(u.density_table_bruteforce().hermitian_defect() < 1e-15);
    }
}
