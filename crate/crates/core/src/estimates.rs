//! The quantitative bounds as executable checks.
//!
//! Each check compares a quantity computed from a state or kernel against
//! the explicit constant the chord-counting argument yields, and returns a
//! [`BoundReport`]. The headline bound is
//! `Σ |b(l,s)|^{d+1} <= 2^d ‖u‖^{2(d+1)}`; it follows from the stratified
//! tuple sums `T_{r,δ}` bounded by `binom(δ,r) ‖u‖^{2(δ+1)}`, and its
//! kernel version bounds `‖b_ρ‖_{ℓ^{rk+1}}` for kernels supported on a
//! submodule of rank `rk`.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::lattice::{affine_rank_of_refs, difference_set, Frequency, Submodule};
use crate::state::{CoefficientTable, FourierState};

/// Relative slack on `lhs <= rhs`: a report passes iff
/// `lhs <= rhs * (1 + PASS_SLACK)`.
pub const PASS_SLACK: f64 = 1e-9;

/// Hard cap on the number of tuples a stratified-sum enumeration may visit.
pub const TUPLE_BUDGET: u64 = 10_000_000;

/// Outcome of one inequality check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub context: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl BoundReport {
    pub fn new(context: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        BoundReport {
            context: context.into(),
            lhs,
            rhs,
            ratio,
            pass: lhs <= rhs * (1.0 + PASS_SLACK),
        }
    }
}

/// `(Σ |entry|^p)^{1/p}` over all table entries, `p >= 1`. The max entry is
/// factored out before exponentiation.
pub fn lp_norm(table: &CoefficientTable, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(lp_power_sum(table, p)?.powf(1.0 / p))
}

/// `Σ |entry|^p`, with the same max-entry factoring as [`lp_norm`].
pub fn lp_power_sum(table: &CoefficientTable, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let max = table.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    let scaled: f64 = table.iter().map(|(_, v)| (v.norm() / max).powf(p)).sum();
    Ok(max.powf(p) * scaled)
}

/// Checks the unconditional density bound
/// `Σ |b_u(l,s)|^{d+1} <= 2^d ‖u‖^{2(d+1)}`.
pub fn check_lp_bound(u: &FourierState) -> Result<BoundReport> {
    if u.is_zero() {
        return Err(Error::ZeroState);
    }
    let d = u.dim();
    let table = u.density_table_bruteforce();
    let lhs = lp_power_sum(&table, (d + 1) as f64)?;
    let rhs = 2f64.powi(d as i32) * u.norm_sq().powi(d as i32 + 1);
    Ok(BoundReport::new(format!("density_lp_bound d={d}"), lhs, rhs))
}

/// Stratified tuple sums `T_{r,δ}(u)` for every affine rank `r = 0..=δ`:
/// over each chord `(l, s)` with `l != 0`, all `(δ+1)`-tuples of origins
/// drawn from the support points on the chord's hyperplane (with both tuple
/// ends in the support), bucketed by the affine rank of the tuple, each
/// contributing `Π |a_{j+l} a_j|`.
fn stratified_sums(u: &FourierState, delta: usize) -> Result<Vec<f64>> {
    let tuple_len = delta + 1;
    let support: Vec<&Frequency> = u.support().collect();

    // origins grouped per chord, with their pair weights |a_{j+l} a_j|
    let mut chord_groups: Vec<Vec<(&Frequency, f64)>> = Vec::new();
    for l in difference_set(support.iter().copied()) {
        let mut by_temporal: Vec<(i64, Vec<(&Frequency, f64)>)> = Vec::new();
        for &j in &support {
            let Some(ak) = u.shifted_amplitude(j, &l) else {
                continue;
            };
            let s = -l.norm_sq() - 2 * l.dot(j);
            let weight = ak.norm() * u.amplitude(j).norm();
            match by_temporal.iter_mut().find(|(t, _)| *t == s) {
                Some((_, group)) => group.push((j, weight)),
                None => by_temporal.push((s, vec![(j, weight)])),
            }
        }
        by_temporal.sort_by_key(|(s, _)| *s);
        chord_groups.extend(by_temporal.into_iter().map(|(_, g)| g));
    }

    let mut needed: u64 = 0;
    for group in &chord_groups {
        needed = needed.saturating_add((group.len() as u64).saturating_pow(tuple_len as u32));
        if needed > TUPLE_BUDGET {
            return Err(Error::TupleBudget {
                needed,
                budget: TUPLE_BUDGET,
            });
        }
    }

    let mut buckets = vec![0.0; delta + 1];
    let mut tuple: Vec<&Frequency> = Vec::with_capacity(tuple_len);
    for group in &chord_groups {
        let n = group.len();
        let mut idx = vec![0usize; tuple_len];
        loop {
            tuple.clear();
            let mut product = 1.0;
            for &i in &idx {
                tuple.push(group[i].0);
                product *= group[i].1;
            }
            let rank = affine_rank_of_refs(&tuple);
            buckets[rank] += product;

            let mut carry = true;
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < n {
                    carry = false;
                    break;
                }
                *slot = 0;
            }
            if carry {
                break;
            }
        }
    }
    Ok(buckets)
}

/// Checks the stratified-sum bound
/// `T_{r,δ}(u) <= binom(δ,r) ‖u‖^{2(δ+1)}` for `0 <= r <= δ-1 <= d-1`.
pub fn stratified_sum_bound(u: &FourierState, r: usize, delta: usize) -> Result<BoundReport> {
    let d = u.dim();
    if delta == 0 || delta > d || r > delta - 1 {
        return Err(Error::ParameterRange { r, delta, d });
    }
    let lhs = stratified_sums(u, delta)?[r];
    let rhs = binomial(delta, r) * u.norm_sq().powi(delta as i32 + 1);
    Ok(BoundReport::new(
        format!("stratified_sum r={r} delta={delta}"),
        lhs,
        rhs,
    ))
}

/// Checks the decomposition bound behind the headline estimate:
/// `Σ |b_u(l,s)|^{d+1} <= ‖u‖^{2(d+1)} + Σ_{r=0}^{d-1} T_{r,d}(u)`.
pub fn check_lp_decomposition(u: &FourierState) -> Result<BoundReport> {
    if u.is_zero() {
        return Err(Error::ZeroState);
    }
    let d = u.dim();
    let table = u.density_table_bruteforce();
    let lhs = lp_power_sum(&table, (d + 1) as f64)?;
    let buckets = stratified_sums(u, d)?;
    let rhs = u.norm_sq().powi(d as i32 + 1) + buckets[..d].iter().sum::<f64>();
    Ok(BoundReport::new(
        format!("lp_decomposition d={d}"),
        lhs,
        rhs,
    ))
}

/// Checks the kernel bound for a density matrix supported on a submodule of
/// rank `p >= 1`: `‖b_ρ‖_{ℓ^{p+1}} <= 2^{p/(p+1)} ‖t_ρ‖_{L^1}`.
pub fn check_density_matrix_bound(
    rho: &DensityMatrix,
    submodule: &Submodule,
) -> Result<BoundReport> {
    if submodule.rank() == 0 {
        return Err(Error::RankZeroSubmodule);
    }
    if !rho.supported_on(submodule) {
        return Err(Error::NotInSubmoduleClass);
    }
    let rank = submodule.rank();
    let table = rho.trace_density_table();
    let lhs = lp_norm(&table, (rank + 1) as f64)?;
    let rhs = 2f64.powf(rank as f64 / (rank + 1) as f64) * rho.trace();
    Ok(BoundReport::new(
        format!("trace_density_lp_bound rank={rank}"),
        lhs,
        rhs,
    ))
}

/// Both sides of the d=1 space-time identity
/// `(2π)^{-2} ∫∫ |ψ|^4 dx dt = Σ |b(l,s)|^2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParsevalCheck {
    pub quadrature: f64,
    pub table_sum: f64,
}

impl ParsevalCheck {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.quadrature.abs().max(self.table_sum.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.quadrature - self.table_sum).abs() / scale
        }
    }
}

/// Evaluates `(2π)^{-2} ∫∫ |ψ(x,t)|^4 dx dt` for a d=1 state by grid
/// quadrature, and the squared ℓ² mass of the coefficient table. The grids
/// are fine enough that both quadratures are exact for trigonometric
/// polynomials, so the two sides must agree up to rounding.
///
/// `n` is the spatial grid size and must satisfy `n >= 4·max|k| + 1`; the
/// time grid exceeds twice the bandwidth of `|ψ|^4` in `t`.
pub fn l4_parseval_check(u: &FourierState, n: usize) -> Result<ParsevalCheck> {
    if u.dim() != 1 {
        return Err(Error::NotOneDimensional(u.dim()));
    }
    let required = 4 * u.max_coord() as usize + 1;
    if n < required {
        return Err(Error::Aliasing { required, got: n });
    }
    let max_norm_sq = u.support().map(|k| k.norm_sq()).max().unwrap_or(0) as usize;
    let n_t = 4 * max_norm_sq + 1;
    let mut accum = 0.0;
    for q in 0..n_t {
        let t = std::f64::consts::TAU * q as f64 / n_t as f64;
        let grid = u.evaluate_grid(t, n)?;
        accum += grid.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>();
    }
    let quadrature = accum / (n as f64 * n_t as f64);
    let table_sum = lp_power_sum(&u.density_table_bruteforce(), 2.0)?;
    Ok(ParsevalCheck {
        quadrature,
        table_sum,
    })
}

/// Data reported for a state supported on a single sphere `|k|^2 = λ`: the
/// eigenvalue, the `ℓ^d` norm of the (purely spatial) coefficient table,
/// and confirmation that every coefficient sits at `s = 0`. No bound is
/// asserted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenfunctionReport {
    pub lambda: i64,
    pub ld_norm: f64,
    pub support_on_s_zero: bool,
}

pub fn eigenfunction_report(u: &FourierState) -> Result<EigenfunctionReport> {
    let mut support = u.support();
    let Some(first) = support.next() else {
        return Err(Error::ZeroState);
    };
    let lambda = first.norm_sq();
    for k in support {
        if k.norm_sq() != lambda {
            return Err(Error::NotEigenfunction {
                first: lambda,
                second: k.norm_sq(),
            });
        }
    }
    let table = u.density_table_bruteforce();
    let support_on_s_zero = table.keys().all(|(_, s)| *s == 0);
    Ok(EigenfunctionReport {
        lambda,
        ld_norm: lp_norm(&table, u.dim() as f64)?,
        support_on_s_zero,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

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
    fn lp_norm_examples() {
        let u = FourierState::new(1, vec![(f(&[5]), c(2.0f64.sqrt(), 0.0))]).unwrap();
        let table = u.density_table_bruteforce();
        assert!((lp_norm(&table, 2.0).unwrap() - 2.0).abs() < 1e-15);

        let table = two_mode_d1().density_table_bruteforce();
        assert!((lp_norm(&table, 2.0).unwrap() - 6.0f64.sqrt()).abs() < 1e-15);

        let empty = CoefficientTable::empty(1);
        assert_eq!(lp_norm(&empty, 3.0).unwrap(), 0.0);
        assert!(matches!(
            lp_norm(&empty, 0.5),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn lp_norm_nonincreasing_after_normalization() {
        let table = two_mode_d1().density_table_bruteforce();
        let max = table.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        let mut last = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0, 4.0, 8.0] {
            let value = lp_norm(&table, p).unwrap() / max;
            assert!(value <= last * (1.0 + 1e-12));
            last = value;
        }
    }

    #[test]
    fn lp_bound_single_mode_d2() {
        let u = FourierState::new(2, vec![(f(&[1, 0]), c(1.0, 0.0))]).unwrap();
        let report = check_lp_bound(&u).unwrap();
        assert_eq!(report.lhs, 1.0);
        assert_eq!(report.rhs, 4.0);
        assert!(report.pass);
    }

    #[test]
    fn lp_bound_two_modes_d1() {
        // lhs = 2^2 + 1 + 1 = 6, rhs = 2 * (‖u‖^2)^2 = 8
        let report = check_lp_bound(&two_mode_d1()).unwrap();
        assert!((report.lhs - 6.0).abs() < 1e-12);
        assert_eq!(report.rhs, 8.0);
        assert!(report.pass);
    }

    #[test]
    fn lp_bound_rejects_zero_state() {
        let zero = FourierState::new(1, vec![]).unwrap();
        assert!(matches!(check_lp_bound(&zero), Err(Error::ZeroState)));
    }

    #[test]
    fn stratified_sum_single_mode_is_zero() {
        let u = FourierState::new(3, vec![(f(&[1, 2, 0]), c(0.5, 0.5))]).unwrap();
        for delta in 1..=3usize {
            for r in 0..delta {
                let report = stratified_sum_bound(&u, r, delta).unwrap();
                assert_eq!(report.lhs, 0.0, "r={r} delta={delta}");
                assert!(report.pass);
            }
        }
    }

    #[test]
    fn stratified_sum_two_modes_d1() {
        // both hyperplane point sets are singletons: T_{0,1} = 1 + 1 = 2
        let report = stratified_sum_bound(&two_mode_d1(), 0, 1).unwrap();
        assert!((report.lhs - 2.0).abs() < 1e-14);
        assert_eq!(report.rhs, 4.0);
        assert!(report.pass);
    }

    #[test]
    fn stratified_sum_rank_zero_closed_form() {
        // T_{0,δ} = Σ_{k != j} |a_k a_j|^{δ+1}
        let u = FourierState::new(
            2,
            vec![
                (f(&[0, 0]), c(0.5, -0.5)),
                (f(&[1, 0]), c(1.0, 0.25)),
                (f(&[0, 2]), c(-0.75, 0.0)),
            ],
        )
        .unwrap();
        for delta in 1..=2usize {
            let got = stratified_sum_bound(&u, 0, delta).unwrap().lhs;
            let mut expected = 0.0;
            for (k, ak) in u.modes() {
                for (j, aj) in u.modes() {
                    if k != j {
                        expected += (ak.norm() * aj.norm()).powi(delta as i32 + 1);
                    }
                }
            }
            let gap = (got - expected).abs() / expected.max(1e-300);
            assert!(gap <= 1e-10, "delta={delta}: {got} vs {expected}");
        }
    }

    #[test]
    fn stratified_sum_parameter_range() {
        let u = two_mode_d1();
        assert!(matches!(
            stratified_sum_bound(&u, 0, 2),
            Err(Error::ParameterRange { .. })
        ));
        assert!(matches!(
            stratified_sum_bound(&u, 1, 1),
            Err(Error::ParameterRange { .. })
        ));
        assert!(matches!(
            stratified_sum_bound(&u, 0, 0),
            Err(Error::ParameterRange { .. })
        ));
    }

    #[test]
    fn decomposition_single_mode_is_equality() {
        let u = FourierState::new(2, vec![(f(&[3, 1]), c(1.0, 0.0))]).unwrap();
        let report = check_lp_decomposition(&u).unwrap();
        assert_eq!(report.lhs, 1.0);
        assert_eq!(report.rhs, 1.0);
        assert!(report.pass);
    }

    #[test]
    fn decomposition_two_modes_d1() {
        // singleton hyperplanes make the decomposition an equality:
        // 6 = ‖u‖^4 + T_{0,1} = 4 + 2
        let report = check_lp_decomposition(&two_mode_d1()).unwrap();
        assert!((report.lhs - 6.0).abs() < 1e-12);
        assert!((report.rhs - 6.0).abs() < 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn dm_bound_pure_single_mode() {
        let u = FourierState::new(2, vec![(f(&[1, 0]), c(1.0, 0.0))]).unwrap();
        let rho = DensityMatrix::from_pure(&u).unwrap();
        let axis = Submodule::from_generators(2, vec![f(&[1, 0])]).unwrap();
        let report = check_density_matrix_bound(&rho, &axis).unwrap();
        assert_eq!(report.lhs, 1.0);
        assert!((report.rhs - 2.0f64.sqrt()).abs() < 1e-15);
        assert!(report.pass);
    }

    #[test]
    fn dm_bound_line_embedded_in_d2() {
        let u = FourierState::new(
            2,
            vec![(f(&[0, 0]), c(1.0, 0.0)), (f(&[1, 0]), c(1.0, 0.0))],
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&u).unwrap();
        let axis = Submodule::from_generators(2, vec![f(&[1, 0])]).unwrap();
        let report = check_density_matrix_bound(&rho, &axis).unwrap();
        // same table as the d=1 two-mode state: ℓ² norm √6 vs √2·2
        assert!((report.lhs - 6.0f64.sqrt()).abs() < 1e-12);
        assert!((report.rhs - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn dm_bound_rejects_unsupported_kernel() {
        let u = FourierState::new(2, vec![(f(&[0, 1]), c(1.0, 0.0))]).unwrap();
        let rho = DensityMatrix::from_pure(&u).unwrap();
        let axis = Submodule::from_generators(2, vec![f(&[1, 0])]).unwrap();
        assert!(matches!(
            check_density_matrix_bound(&rho, &axis),
            Err(Error::NotInSubmoduleClass)
        ));
        let zero = Submodule::from_generators(2, vec![]).unwrap();
        assert!(matches!(
            check_density_matrix_bound(&rho, &zero),
            Err(Error::RankZeroSubmodule)
        ));
    }

    #[test]
    fn parseval_single_mode() {
        let u = FourierState::new(1, vec![(f(&[2]), c(0.0, 1.5))]).unwrap();
        let check = l4_parseval_check(&u, 9).unwrap();
        let expected = 1.5f64.powi(4);
        assert!((check.quadrature - expected).abs() < 1e-10);
        assert!((check.table_sum - expected).abs() < 1e-10);
    }

    #[test]
    fn parseval_two_modes_is_six() {
        let check = l4_parseval_check(&two_mode_d1(), 5).unwrap();
        assert!((check.quadrature - 6.0).abs() <= 1e-10, "{check:?}");
        assert!((check.table_sum - 6.0).abs() <= 1e-10, "{check:?}");
    }

    #[test]
    fn parseval_rejects_higher_dimensions() {
        let u = FourierState::new(2, vec![(f(&[1, 0]), c(1.0, 0.0))]).unwrap();
        assert!(matches!(
            l4_parseval_check(&u, 33),
            Err(Error::NotOneDimensional(2))
        ));
    }

    #[test]
    fn eigenfunction_four_point_sphere() {
        let half = c(0.5, 0.0);
        let u = FourierState::new(
            2,
            vec![
                (f(&[1, 0]), half),
                (f(&[-1, 0]), half),
                (f(&[0, 1]), half),
                (f(&[0, -1]), half),
            ],
        )
        .unwrap();
        let report = eigenfunction_report(&u).unwrap();
        assert_eq!(report.lambda, 1);
        assert!(report.support_on_s_zero);
        // table: center 1, four diagonal shifts 1/2, four axis shifts 1/4
        assert!((report.ld_norm - 1.5).abs() < 1e-12);
    }

    #[test]
    fn eigenfunction_single_mode() {
        let u = FourierState::new(2, vec![(f(&[2, 1]), c(0.0, 0.5))]).unwrap();
        let report = eigenfunction_report(&u).unwrap();
        assert_eq!(report.lambda, 5);
        assert_eq!(report.ld_norm, 0.25);
        assert!(report.support_on_s_zero);
    }

    #[test]
    fn eigenfunction_mixed_sphere_rejected() {
        let u = FourierState::new(
            2,
            vec![(f(&[1, 0]), c(1.0, 0.0)), (f(&[1, 1]), c(1.0, 0.0))],
        )
        .unwrap();
        assert!(matches!(
            eigenfunction_report(&u),
            Err(Error::NotEigenfunction { .. })
        ));
    }

    #[test]
    fn bound_report_ratio_conventions() {
        let r = BoundReport::new("zero", 0.0, 0.0);
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
        let r = BoundReport::new("fail", 1.0, 0.0);
        assert!(r.ratio.is_infinite());
        assert!(!r.pass);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(1, 0), 1.0);
        assert_eq!(binomial(3, 1), 3.0);
        assert_eq!(binomial(3, 2), 3.0);
        assert_eq!(binomial(8, 4), 70.0);
    }
}
