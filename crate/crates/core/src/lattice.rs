//! Exact integer geometry of the discrete paraboloid `{(k, -|k|^2) : k in Z^d}`.
//!
//! Everything here is computed in exact signed integer arithmetic: chords of
//! the paraboloid, the affine hyperplanes of chord origins, affine rank of
//! point sets, integer submodules of `Z^d` with exact membership tests, and
//! the resonance order of a direction. Inputs are bounded so that all
//! intermediate quantities fit comfortably in 64-bit integers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest allowed coordinate magnitude for a frequency vector. With
/// `d <= 8` this keeps `|k|^2`, `s` and every dot product used by the
/// hyperplane equation well inside `i64` range.
pub const MAX_COORD: i64 = 1 << 20;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// A lattice frequency vector `k` in `Z^d`.
///
/// Ordering is lexicographic on the coordinates, which fixes the iteration
/// order of every map keyed by frequencies and hence the summation order of
/// every floating-point accumulation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Frequency {
    coords: Vec<i64>,
}

impl TryFrom<Vec<i64>> for Frequency {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        Frequency::new(coords)
    }
}

impl From<Frequency> for Vec<i64> {
    fn from(f: Frequency) -> Self {
        f.coords
    }
}

impl Frequency {
    /// Builds a frequency vector, checking the dimension and coordinate
    /// bounds.
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::BadDimension(coords.len()));
        }
        for &c in &coords {
            if c.abs() > MAX_COORD {
                return Err(Error::MagnitudeBound(c));
            }
        }
        Ok(Frequency { coords })
    }

    /// Difference vectors of two bounded frequencies stay within twice the
    /// public bound; they are used as coefficient-table keys without
    /// round-tripping through `new`.
    pub(crate) fn from_coords_widened(coords: Vec<i64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.len() <= MAX_DIM);
        debug_assert!(coords.iter().all(|c| c.abs() <= 2 * MAX_COORD));
        Frequency { coords }
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Frequency::new(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Exact squared Euclidean norm `|k|^2`.
    pub fn norm_sq(&self) -> i64 {
        self.coords.iter().map(|&c| c * c).sum()
    }

    /// Exact dot product with another vector of the same dimension.
    pub fn dot(&self, other: &Frequency) -> i64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Frequency) -> Result<Self> {
        self.check_dim(other)?;
        Frequency::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Frequency) -> Result<Self> {
        self.check_dim(other)?;
        Frequency::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    pub(crate) fn sub_widened(&self, other: &Frequency) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Frequency::from_coords_widened(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    pub fn negate(&self) -> Self {
        Frequency {
            coords: self.coords.iter().map(|&c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: i64) -> Result<Self> {
        Frequency::new(self.coords.iter().map(|&c| c * factor).collect())
    }

    /// Max-norm `|k|_inf`.
    pub fn max_norm(&self) -> i64 {
        self.coords.iter().map(|&c| c.abs()).max().unwrap_or(0)
    }

    /// True when the coordinates have gcd 1 (the vector is primitive).
    pub fn is_primitive(&self) -> bool {
        let mut g: i64 = 0;
        for &c in &self.coords {
            g = gcd(g, c.abs());
        }
        g == 1
    }

    /// The primitive vector in the same direction (`k` divided by the gcd of
    /// its coordinates). The zero vector is returned unchanged.
    pub fn primitive_direction(&self) -> Self {
        let mut g: i64 = 0;
        for &c in &self.coords {
            g = gcd(g, c.abs());
        }
        if g <= 1 {
            return self.clone();
        }
        Frequency {
            coords: self.coords.iter().map(|&c| c / g).collect(),
        }
    }

    fn check_dim(&self, other: &Frequency) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A chord `(l, s)` of the discrete paraboloid: the difference of two
/// paraboloid points `(k, -|k|^2) - (j, -|j|^2)` with `l = k - j` nonzero and
/// `s = |j|^2 - |k|^2`.
///
/// The origins `j` of a chord form the lattice hyperplane
/// `2 l·j = -(s + |l|^2)`, stored here in cleared-denominator form so that
/// membership is an exact integer test.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chord {
    l: Frequency,
    s: i64,
}

impl Chord {
    /// Builds a chord from a spatial shift and temporal frequency; `l` must
    /// be nonzero.
    pub fn new(l: Frequency, s: i64) -> Result<Self> {
        if l.is_zero() {
            return Err(Error::ZeroChord);
        }
        Ok(Chord { l, s })
    }

    pub(crate) fn new_widened(l: Frequency, s: i64) -> Self {
        debug_assert!(!l.is_zero());
        Chord { l, s }
    }

    pub fn shift(&self) -> &Frequency {
        &self.l
    }

    pub fn temporal(&self) -> i64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    /// The chord of the ordered pair `(k, j)`: `l = k - j`,
    /// `s = |j|^2 - |k|^2`. Both forms of the temporal frequency
    /// (`|j|^2 - |k|^2` and `-|l|^2 - 2 l·j`) are computed and must agree.
    pub fn of_pair(k: &Frequency, j: &Frequency) -> Result<Self> {
        if k.dim() != j.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                got: j.dim(),
            });
        }
        if k == j {
            return Err(Error::ZeroChord);
        }
        let l = k.sub(j)?;
        let s = j.norm_sq() - k.norm_sq();
        debug_assert_eq!(s, -l.norm_sq() - 2 * l.dot(j));
        Ok(Chord { l, s })
    }

    /// Exact membership in the origin hyperplane: `2 l·j = -(s + |l|^2)`.
    pub fn hyperplane_contains(&self, j: &Frequency) -> bool {
        debug_assert_eq!(self.dim(), j.dim());
        2 * self.l.dot(j) == -(self.s + self.l.norm_sq())
    }

    /// All lattice points `j` with `|j|_inf <= radius` on the origin
    /// hyperplane, in lexicographic order.
    ///
    /// The pivot coordinate (last axis with a nonzero shift component) is
    /// solved from the hyperplane equation instead of scanned, so this route
    /// is independent of the brute-force box filter used to cross-check it.
    pub fn enumerate_hyperplane(&self, radius: i64) -> Result<Vec<Frequency>> {
        if !(0..=MAX_COORD).contains(&radius) {
            return Err(Error::MagnitudeBound(radius));
        }
        let d = self.dim();
        let pivot = self
            .l
            .coords()
            .iter()
            .rposition(|&c| c != 0)
            .expect("chord shift is nonzero");
        let rhs = -(self.s + self.l.norm_sq());
        let lp = self.l.coords()[pivot];

        let mut out = Vec::new();
        let mut free = vec![-radius; d.saturating_sub(1)];
        loop {
            // partial dot product over the free coordinates
            let mut partial = 0i64;
            let mut fi = 0;
            for axis in 0..d {
                if axis != pivot {
                    partial += self.l.coords()[axis] * free[fi];
                    fi += 1;
                }
            }
            let numer = rhs - 2 * partial;
            let denom = 2 * lp;
            if numer % denom == 0 {
                let solved = numer / denom;
                if solved.abs() <= radius {
                    let mut coords = Vec::with_capacity(d);
                    let mut fi = 0;
                    for axis in 0..d {
                        if axis == pivot {
                            coords.push(solved);
                        } else {
                            coords.push(free[fi]);
                            fi += 1;
                        }
                    }
                    out.push(Frequency { coords });
                }
            }
            // odometer over the free coordinates
            let mut carry = true;
            for slot in free.iter_mut().rev() {
                *slot += 1;
                if *slot <= radius {
                    carry = false;
                    break;
                }
                *slot = -radius;
            }
            if carry {
                break;
            }
        }
        out.sort();
        for j in &out {
            debug_assert!(self.hyperplane_contains(j));
        }
        Ok(out)
    }
}

/// Affine dimension of the span of a nonempty point list: the rank of the
/// difference vectors to the first point, in exact integer arithmetic.
pub fn affine_rank(points: &[Frequency]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointList)?;
    let d = first.dim();
    for p in &points[1..] {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
    }
    let refs: Vec<&Frequency> = points.iter().collect();
    Ok(affine_rank_of_refs(&refs))
}

/// Rank of the differences to the first point; dimensions already checked.
pub(crate) fn affine_rank_of_refs(points: &[&Frequency]) -> usize {
    let first = points[0];
    let d = first.dim();
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(points.len().saturating_sub(1));
    for p in &points[1..] {
        rows.push(
            p.coords()
                .iter()
                .zip(first.coords())
                .map(|(&a, &b)| i128::from(a) - i128::from(b))
                .collect(),
        );
    }
    integer_row_echelon(&mut rows, d)
}

/// Reduces `rows` to integer row echelon form by unimodular row operations
/// (swaps, negations, adding integer multiples) and returns the rank. The
/// surviving pivot rows generate the same lattice as the input rows.
fn integer_row_echelon(rows: &mut Vec<Vec<i128>>, d: usize) -> usize {
    let mut rank = 0;
    for col in 0..d {
        loop {
            // smallest nonzero entry in this column at or below `rank`
            let mut pivot: Option<usize> = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                if row[col] != 0
                    && pivot.is_none_or(|p| row[col].abs() < rows[p][col].abs())
                {
                    pivot = Some(i);
                }
            }
            let Some(p) = pivot else { break };
            rows.swap(rank, p);
            if rows[rank][col] < 0 {
                for v in rows[rank].iter_mut() {
                    *v = -*v;
                }
            }
            let head = rows[rank][col];
            let mut done = true;
            let (upper, lower) = rows.split_at_mut(rank + 1);
            let pivot_row = &upper[rank];
            for row in lower.iter_mut() {
                let q = row[col].div_euclid(head);
                if q != 0 {
                    for (r, p) in row.iter_mut().zip(pivot_row) {
                        *r -= q * *p;
                    }
                }
                if row[col] != 0 {
                    done = false;
                }
            }
            if done {
                rank += 1;
                break;
            }
        }
    }
    rows.truncate(rank);
    rank
}

/// Resonance order of an integer direction: `d - rank(Λ_k)` where
/// `Λ_k = {m in Z^d : m·k = 0}`. The order is 0 exactly for `k = 0` and 1
/// for every nonzero integer vector; rescaled frequency clusters are
/// classified through their primitive integer direction.
pub fn resonance_order(k: &Frequency) -> usize {
    let d = k.dim();
    d - orthogonal_complement_rank(k)
}

/// Rank of `{m in Z^d : m·k = 0}`, computed from an explicit generating set
/// of a finite-index sublattice (rank is insensitive to the index).
fn orthogonal_complement_rank(k: &Frequency) -> usize {
    let d = k.dim();
    let Some(pivot) = k.coords().iter().position(|&c| c != 0) else {
        return d; // k = 0: the whole lattice is orthogonal
    };
    let kp = i128::from(k.coords()[pivot]);
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(d - 1);
    for i in 0..d {
        if i == pivot {
            continue;
        }
        // kp * e_i - k_i * e_pivot is orthogonal to k
        let mut row = vec![0i128; d];
        row[i] = kp;
        row[pivot] = -i128::from(k.coords()[i]);
        rows.push(row);
    }
    integer_row_echelon(&mut rows, d)
}

/// An integer submodule of `Z^d` described by generators, with exact rank
/// and membership tests.
///
/// Internally the generators are reduced to an integer row echelon basis;
/// membership is decided by exact division against the pivots, so `v` lies
/// in the submodule iff it is an integer combination of the generators.
#[derive(Debug, Clone)]
pub struct Submodule {
    dim: usize,
    generators: Vec<Frequency>,
    basis: Vec<Vec<i128>>,
    rank: usize,
}

impl Submodule {
    pub fn from_generators(dim: usize, generators: Vec<Frequency>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        let mut rows: Vec<Vec<i128>> = generators
            .iter()
            .map(|g| g.coords().iter().map(|&c| i128::from(c)).collect())
            .collect();
        let rank = integer_row_echelon(&mut rows, dim);
        Ok(Submodule {
            dim,
            generators,
            basis: rows,
            rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Frequency] {
        &self.generators
    }

    /// Exact membership: `v` is an integer combination of the generators.
    pub fn contains(&self, v: &Frequency) -> bool {
        if v.dim() != self.dim {
            return false;
        }
        let mut residue: Vec<i128> = v.coords().iter().map(|&c| i128::from(c)).collect();
        for row in &self.basis {
            let col = row
                .iter()
                .position(|&c| c != 0)
                .expect("echelon rows are nonzero");
            if residue[col] == 0 {
                continue;
            }
            if residue[col] % row[col] != 0 {
                return false;
            }
            let q = residue[col] / row[col];
            for (r, b) in residue.iter_mut().zip(row) {
                *r -= q * b;
            }
        }
        residue.iter().all(|&c| c == 0)
    }
}

/// Sorted set of nonzero difference vectors `k - j` over ordered pairs of
/// distinct support frequencies: the candidate chord shifts of a state.
pub(crate) fn difference_set<'a, I>(support: I) -> BTreeSet<Frequency>
where
    I: IntoIterator<Item = &'a Frequency> + Clone,
{
    let mut out = BTreeSet::new();
    for k in support.clone() {
        for j in support.clone() {
            if k != j {
                out.insert(k.sub_widened(j));
            }
        }
    }
    out
}
