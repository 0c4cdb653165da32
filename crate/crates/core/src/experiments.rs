//! Sequence lab: generators of oscillating families of states, empirical
//! frequency-localization diagnostics, and windowed coefficient trends.
//!
//! The weak-* behaviour of the densities `|e^{itΔ}u_n|^2` is probed entirely
//! through character pairings, i.e. through the tables `b_{u_n}(l, s)`
//! restricted to a fixed window: entries that stay put indicate a candidate
//! limit, entries that leave every window indicate escaping oscillation.
//! Frequency localization at scale `1/h_n` is diagnosed with the low/high
//! window masses of each state, taking the supremum over the trailing half
//! of the index range as the empirical limsup.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{resonance_order, Frequency, MAX_DIM};
use crate::state::{CoefficientTable, FourierState};

/// Relative threshold under which an empirical limsup proxy counts as
/// vanished when flagging consistency with the oscillation condition.
pub const VANISH_TOLERANCE: f64 = 1e-9;

/// How amplitudes are assigned to the lattice points of a sphere
/// `{k : |k|^2 = λ}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeRule {
    /// Equal positive amplitudes `1/sqrt(count)`.
    Equal,
    /// Equal moduli with phases drawn from a seeded generator.
    RandomPhase { seed: u64 },
    /// Explicit amplitudes per point; the result is normalized.
    Explicit { modes: Vec<ExplicitMode> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitMode {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// Rule assigning the oscillation scale `h_n` to each index.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HRule {
    /// `h_n = 1/n` over the index values.
    InverseN,
    /// `h_n = 1/sqrt(λ_n)`; only meaningful for sphere sequences.
    InverseSqrtLambda,
    /// Explicit list, one value per index.
    Explicit(Vec<f64>),
}

/// The supported sequence constructions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `u_n` has the amplitudes of `profile` shifted by `n·direction`.
    ModulatedWave {
        profile: FourierState,
        direction: Frequency,
        n_start: usize,
        n_end: usize,
    },
    /// One sphere state per listed eigenvalue.
    SphereEigenfunctions {
        d: usize,
        lambdas: Vec<i64>,
        rule: AmplitudeRule,
    },
    /// Explicitly listed states.
    CustomList { states: Vec<FourierState> },
}

/// A sequence of states together with its oscillation scales.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub kind: SequenceKind,
    pub h_rule: HRule,
}

/// One realized element of a sequence.
#[derive(Debug, Clone)]
pub struct SequenceItem {
    pub index: usize,
    pub state: FourierState,
    pub h: f64,
}

impl SequenceSpec {
    /// Realizes the sequence: generates every state, assigns `h_n`, and
    /// checks that the norms stay uniformly bounded and the scales positive.
    pub fn generate(&self) -> Result<Vec<SequenceItem>> {
        let (indices, states): (Vec<usize>, Vec<FourierState>) = match &self.kind {
            SequenceKind::ModulatedWave {
                profile,
                direction,
                n_start,
                n_end,
            } => {
                if *n_start == 0 || n_end < n_start {
                    return Err(Error::SequenceTooShort {
                        required: 1,
                        got: 0,
                    });
                }
                let range: Vec<usize> = (*n_start..=*n_end).collect();
                let states = range
                    .iter()
                    .map(|&n| gen_modulated_wave(profile, direction, n))
                    .collect::<Result<Vec<_>>>()?;
                (range, states)
            }
            SequenceKind::SphereEigenfunctions { d, lambdas, rule } => {
                let states = lambdas
                    .iter()
                    .map(|&lambda| gen_sphere_state(*d, lambda, rule))
                    .collect::<Result<Vec<_>>>()?;
                ((1..=lambdas.len()).collect(), states)
            }
            SequenceKind::CustomList { states } => {
                ((1..=states.len()).collect(), states.clone())
            }
        };
        if states.is_empty() {
            return Err(Error::SequenceTooShort {
                required: 1,
                got: 0,
            });
        }
        let h_values = self.h_values(&indices)?;
        for &h in &h_values {
            if !h.is_finite() || h <= 0.0 {
                return Err(Error::BadOscillationScale(h));
            }
        }
        Ok(indices
            .into_iter()
            .zip(states)
            .zip(h_values)
            .map(|((index, state), h)| SequenceItem { index, state, h })
            .collect())
    }

    fn h_values(&self, indices: &[usize]) -> Result<Vec<f64>> {
        match &self.h_rule {
            HRule::InverseN => Ok(indices.iter().map(|&n| 1.0 / n as f64).collect()),
            HRule::InverseSqrtLambda => match &self.kind {
                SequenceKind::SphereEigenfunctions { lambdas, .. } => Ok(lambdas
                    .iter()
                    .map(|&lambda| 1.0 / (lambda.max(1) as f64).sqrt())
                    .collect()),
                _ => Err(Error::BadOscillationScale(f64::NAN)),
            },
            HRule::Explicit(values) => {
                if values.len() != indices.len() {
                    return Err(Error::HRuleLength {
                        required: indices.len(),
                        got: values.len(),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// Shifts the spectrum of a profile by `n` steps of a primitive direction:
/// the amplitude of `u_n` at `k + n·e` is the profile amplitude at `k`. The
/// norm is unchanged.
pub fn gen_modulated_wave(
    profile: &FourierState,
    direction: &Frequency,
    n: usize,
) -> Result<FourierState> {
    if !direction.is_primitive() {
        return Err(Error::NotPrimitiveDirection);
    }
    if profile.is_zero() {
        return Err(Error::ZeroState);
    }
    if direction.dim() != profile.dim() {
        return Err(Error::DimensionMismatch {
            expected: profile.dim(),
            got: direction.dim(),
        });
    }
    let shift = direction.scale(n as i64)?;
    let modes = profile
        .modes()
        .map(|(k, a)| Ok((k.add(&shift)?, *a)))
        .collect::<Result<Vec<_>>>()?;
    FourierState::new(profile.dim(), modes)
}

/// Builds the state supported exactly on `{k in Z^d : |k|^2 = λ}` with
/// amplitudes chosen by the rule, normalized to unit norm. Fails with the
/// nearest representable values when the sphere has no lattice point.
pub fn gen_sphere_state(d: usize, lambda: i64, rule: &AmplitudeRule) -> Result<FourierState> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::BadDimension(d));
    }
    let points = enumerate_sphere(d, lambda);
    if points.is_empty() {
        return Err(Error::EmptySphere {
            d,
            lambda,
            nearest: nearest_representable(d, lambda),
        });
    }
    let count = points.len() as f64;
    let modes: Vec<(Frequency, Complex64)> = match rule {
        AmplitudeRule::Equal => {
            let amp = Complex64::new(1.0 / count.sqrt(), 0.0);
            points.into_iter().map(|k| (k, amp)).collect()
        }
        AmplitudeRule::RandomPhase { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let modulus = 1.0 / count.sqrt();
            points
                .into_iter()
                .map(|k| {
                    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    (k, Complex64::from_polar(modulus, phase))
                })
                .collect()
        }
        AmplitudeRule::Explicit { modes } => {
            let mut out = Vec::with_capacity(modes.len());
            for m in modes {
                let k = Frequency::new(m.k.clone())?;
                if k.norm_sq() != lambda {
                    return Err(Error::NotEigenfunction {
                        first: lambda,
                        second: k.norm_sq(),
                    });
                }
                out.push((k, Complex64::new(m.re, m.im)));
            }
            out
        }
    };
    let state = FourierState::new(d, modes)?;
    if state.is_zero() {
        return Err(Error::ZeroState);
    }
    let scale = 1.0 / state.norm_sq().sqrt();
    let normalized = state
        .modes()
        .map(|(k, a)| (k.clone(), a * scale))
        .collect();
    FourierState::new(d, normalized)
}

/// All lattice points with `|k|^2 = lambda`, in lexicographic order.
fn enumerate_sphere(d: usize, lambda: i64) -> Vec<Frequency> {
    let mut out = Vec::new();
    if lambda < 0 {
        return out;
    }
    let mut coords = vec![0i64; d];
    sphere_recurse(d, lambda, 0, &mut coords, &mut out);
    out
}

fn sphere_recurse(
    d: usize,
    remaining: i64,
    axis: usize,
    coords: &mut Vec<i64>,
    out: &mut Vec<Frequency>,
) {
    if axis == d {
        if remaining == 0 {
            out.push(Frequency::new(coords.clone()).expect("sphere point in bounds"));
        }
        return;
    }
    let bound = (remaining as f64).sqrt() as i64 + 1;
    for c in -bound..=bound {
        let used = c * c;
        if used <= remaining {
            coords[axis] = c;
            sphere_recurse(d, remaining - used, axis + 1, coords, out);
        }
    }
    coords[axis] = 0;
}

fn is_representable(d: usize, lambda: i64) -> bool {
    if lambda < 0 {
        return false;
    }
    if d == 1 {
        let root = (lambda as f64).sqrt().round() as i64;
        return (root - 1..=root + 1).any(|r| r >= 0 && r * r == lambda);
    }
    let bound = (lambda as f64).sqrt() as i64 + 1;
    for c in 0..=bound {
        let used = c * c;
        if used <= lambda && is_representable(d - 1, lambda - used) {
            return true;
        }
    }
    false
}

fn nearest_representable(d: usize, lambda: i64) -> String {
    for offset in 1..=lambda.abs().max(4) {
        let mut found = Vec::new();
        if lambda - offset >= 0 && is_representable(d, lambda - offset) {
            found.push(lambda - offset);
        }
        if is_representable(d, lambda + offset) {
            found.push(lambda + offset);
        }
        if !found.is_empty() {
            return found
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
        }
    }
    "none in range".to_string()
}

/// Empirical localization report for one pair of window parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillationSupremum {
    pub parameter: f64,
    pub trailing_sup: f64,
}

/// Diagnostics for the frequency-localization condition: trailing-half
/// suprema of the low-frequency mass per `δ` and the high-frequency mass
/// per `R`, and whether the data is consistent with localization at scale
/// `1/h_n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub low_mass: Vec<OscillationSupremum>,
    pub high_mass: Vec<OscillationSupremum>,
    pub consistent: bool,
    pub trailing_start: usize,
}

/// Probes the localization condition on a realized sequence: for each `δ`
/// (sorted descending) and each `R` (sorted ascending) the supremum of the
/// corresponding window mass over the trailing half of the indices is
/// reported. The sequence is flagged consistent when both families of
/// suprema are nonincreasing toward the extreme parameter and vanish there
/// (relative to the largest norm).
pub fn condition_s_check(
    spec: &SequenceSpec,
    deltas: &[f64],
    rs: &[f64],
) -> Result<LocalizationReport> {
    let items = spec.generate()?;
    if items.len() < 2 {
        return Err(Error::SequenceTooShort {
            required: 2,
            got: items.len(),
        });
    }
    let trailing_start = items.len() / 2;
    let trailing = &items[trailing_start..];
    let norm_scale = items
        .iter()
        .map(|it| it.state.norm_sq())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut deltas_sorted = deltas.to_vec();
    deltas_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut rs_sorted = rs.to_vec();
    rs_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // any positive R works for the low-mass pass and vice versa; the probe
    // only reads the side it reports
    let low_mass: Vec<OscillationSupremum> = deltas_sorted
        .iter()
        .map(|&delta| OscillationSupremum {
            parameter: delta,
            trailing_sup: trailing
                .iter()
                .map(|it| it.state.oscillation_profile(it.h, delta, 1.0).low_mass)
                .fold(0.0, f64::max),
        })
        .collect();
    let high_mass: Vec<OscillationSupremum> = rs_sorted
        .iter()
        .map(|&r| OscillationSupremum {
            parameter: r,
            trailing_sup: trailing
                .iter()
                .map(|it| it.state.oscillation_profile(it.h, 1.0, r).high_mass)
                .fold(0.0, f64::max),
        })
        .collect();

    let consistent = vanishing_trend(&low_mass, norm_scale) && vanishing_trend(&high_mass, norm_scale);
    Ok(LocalizationReport {
        low_mass,
        high_mass,
        consistent,
        trailing_start: items[trailing_start].index,
    })
}

fn vanishing_trend(sups: &[OscillationSupremum], scale: f64) -> bool {
    if sups.is_empty() {
        return false;
    }
    let monotone = sups
        .windows(2)
        .all(|w| w[1].trailing_sup <= w[0].trailing_sup + 1e-12 * scale);
    let vanishes = sups.last().unwrap().trailing_sup <= VANISH_TOLERANCE * scale;
    monotone && vanishes
}

/// Mass of the modes whose direction has resonance order below `r`
/// (`1 <= r <= d`). The zero mode has order 0 and always counts; every
/// other integer mode has order 1, so `r = 1` isolates the zero-mode mass.
pub fn resonance_mass(u: &FourierState, r: usize) -> Result<f64> {
    if r == 0 || r > u.dim() {
        return Err(Error::ResonanceRange { r, d: u.dim() });
    }
    Ok(u.modes()
        .filter(|(k, _)| {
            let order = if k.is_zero() {
                0
            } else {
                resonance_order(&k.primitive_direction())
            };
            order < r
        })
        .map(|(_, a)| a.norm_sqr())
        .sum())
}

/// Partial `ℓ^q` sums over the window, one value per index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartialSumTrend {
    pub q: f64,
    pub values: Vec<f64>,
}

/// Windowed coefficient trend of a sequence: per-index tables restricted to
/// `|l|_inf <= window_l`, `|s| <= window_s`, partial `ℓ^q` sums, and the
/// largest pairwise entry gap over the trailing half of the indices.
#[derive(Debug, Clone)]
pub struct TrendReport {
    pub window_l: i64,
    pub window_s: i64,
    pub indices: Vec<usize>,
    pub per_index: Vec<CoefficientTable>,
    pub partial_sums: Vec<PartialSumTrend>,
    pub convergence_gap: BTreeMap<(Frequency, i64), f64>,
    pub trailing_start: usize,
}

/// Computes the windowed trend report. Per-index tables are computed
/// independently (in parallel) and merged in index order, so the result
/// does not depend on the worker count.
pub fn weak_star_trend(
    spec: &SequenceSpec,
    window_l: i64,
    window_s: i64,
    qs: &[f64],
) -> Result<TrendReport> {
    if window_l < 1 || window_s < 1 {
        return Err(Error::BadWindow);
    }
    let items = spec.generate()?;
    if items.len() < 4 {
        return Err(Error::SequenceTooShort {
            required: 4,
            got: items.len(),
        });
    }
    for &q in qs {
        if !q.is_finite() || q < 1.0 {
            return Err(Error::InvalidExponent(q));
        }
    }

    let per_index: Vec<CoefficientTable> = items
        .par_iter()
        .map(|it| it.state.density_table_hyperplane().restrict(window_l, window_s))
        .collect();
    let indices: Vec<usize> = items.iter().map(|it| it.index).collect();

    let partial_sums = qs
        .iter()
        .map(|&q| {
            Ok(PartialSumTrend {
                q,
                values: per_index
                    .iter()
                    .map(|t| crate::estimates::lp_norm(t, q))
                    .collect::<Result<Vec<f64>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let trailing_start = items.len() / 2;
    let trailing = &per_index[trailing_start..];
    let mut keys: Vec<(Frequency, i64)> = trailing
        .iter()
        .flat_map(|t| t.keys().cloned())
        .collect();
    keys.sort();
    keys.dedup();
    let mut convergence_gap = BTreeMap::new();
    for key in keys {
        let values: Vec<Complex64> = trailing.iter().map(|t| t.entry(&key.0, key.1)).collect();
        let mut gap = 0.0;
        for a in 0..values.len() {
            for b in a + 1..values.len() {
                gap = f64::max(gap, (values[a] - values[b]).norm());
            }
        }
        convergence_gap.insert(key, gap);
    }

    Ok(TrendReport {
        window_l,
        window_s,
        indices,
        per_index,
        partial_sums,
        convergence_gap,
        trailing_start: indices_start(&items, trailing_start),
    })
}

fn indices_start(items: &[SequenceItem], at: usize) -> usize {
    items[at].index
}

impl TrendReport {
    /// CSV dump: one row per `(n, l, s)` with the same float format as the
    /// coefficient-table CSV.
    pub fn to_csv_string(&self) -> String {
        use std::fmt::Write as _;
        let dim = self
            .per_index
            .first()
            .map(|t| t.dim())
            .unwrap_or(1);
        let mut out = String::from("n,");
        for i in 1..=dim {
            let _ = write!(out, "l_{i},");
        }
        out.push_str("s,re,im\n");
        for (n, table) in self.indices.iter().zip(&self.per_index) {
            for ((l, s), v) in table.iter() {
                let _ = write!(out, "{n},");
                for c in l.coords() {
                    let _ = write!(out, "{c},");
                }
                let _ = writeln!(out, "{s},{:.16e},{:.16e}", v.re, v.im);
            }
        }
        out
    }

    /// Summary JSON: indices, partial sums per exponent, and the
    /// convergence gap per window entry.
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct GapJson<'a> {
            l: &'a [i64],
            s: i64,
            gap: f64,
        }
        #[derive(Serialize)]
        struct SummaryJson<'a> {
            indices: &'a [usize],
            #[serde(rename = "partialSums")]
            partial_sums: &'a [PartialSumTrend],
            #[serde(rename = "convergenceGap")]
            convergence_gap: Vec<GapJson<'a>>,
            #[serde(rename = "trailingStart")]
            trailing_start: usize,
        }
        let gaps: Vec<GapJson> = self
            .convergence_gap
            .iter()
            .map(|((l, s), gap)| GapJson {
                l: l.coords(),
                s: *s,
                gap: *gap,
            })
            .collect();
        serde_json::to_string_pretty(&SummaryJson {
            indices: &self.indices,
            partial_sums: &self.partial_sums,
            convergence_gap: gaps,
            trailing_start: self.trailing_start,
        })
        .expect("summary serialization cannot fail")
    }
}
