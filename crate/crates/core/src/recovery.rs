//! Dictatorship reconstruction from a strong line, the reasonableness and
//! medium-value checks, error injection, and the noise experiment harness.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::family::{BooleanFamily, CosetUnion, FamilyFile, Line, LineKind, RealFunction};
use crate::numeric::{eps_tolerance, fmt17, TOLERANCE_FLOOR};
use crate::perm::{factorial, for_each_in_range, next_permutation, sign_of, MAX_DENSE_N};
use crate::permanent::{good_fraction_through, BoolMatrix};
use crate::projection::{
    coefficient_matrix_with, gamma, tau_matrix, CoefficientMatrix, EpsilonKind, EpsilonOptions, TauMatrix,
};
use crate::rng::{random_images, stream, SnfRng};
use crate::strong_line::{
    classify, find_strong_line_recursive, line_candidates, measure_q, LargenessClassifier, Method, SearchOptions,
    StrongLineReport,
};

/// Settings for [`recover`]. `None` thresholds use the calibrated defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoveryParams {
    pub large_threshold: Option<f64>,
    pub tau_threshold: Option<f64>,
    /// Largest non-large fraction accepted for the strong line.
    pub p_max: f64,
    /// Sample count for Monte Carlo steps (ε above the dense limit, goodness
    /// above the exact permanent limit).
    pub samples: u64,
    pub seed: u64,
}

impl Default for RecoveryParams {
    fn default() -> Self {
        RecoveryParams {
            large_threshold: None,
            tau_threshold: None,
            p_max: 0.5,
            samples: 100_000,
            seed: 0,
        }
    }
}

/// Selection threshold `t` for `τ ≥ 1 − t`: `26ε^{1/7}` when `c = 1/2` and
/// `51ε^{1/7}` otherwise, with `ε` floored at `n^{−7/3}` and `t` capped at
/// 1/2.
pub fn default_tau_threshold(epsilon: f64, c: f64, n: usize) -> f64 {
    let scale = if (c - 0.5).abs() < 1e-12 { 26.0 } else { 51.0 };
    let eps = epsilon.max((n as f64).powf(-7.0 / 3.0));
    eps_tolerance(scale, eps).min(0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cluster {
    ZeroOne,
    Gamma,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MediumValueReport {
    pub gamma: f64,
    /// Whether `γ` is `156ε^{1/7}`-far from `{0, 1}`.
    pub gamma_far: bool,
    pub cluster: Cluster,
    /// Set when `γ` is far from `{0, 1}` and the entries split between the
    /// two clusters.
    pub dichotomy_violated: bool,
}

/// Clusters the reasonable `τ` values of the strong line around `{0, 1}` or
/// `γ`.
pub fn medium_value_check(tau_line: &[f64], reasonable: &[bool], c: f64, epsilon: f64) -> MediumValueReport {
    let g = gamma(c);
    if (c - 0.5).abs() < 1e-12 {
        return MediumValueReport {
            gamma: g,
            gamma_far: false,
            cluster: Cluster::ZeroOne,
            dichotomy_violated: false,
        };
    }
    let gamma_far = g.min(1.0 - g) > eps_tolerance(156.0, epsilon);
    let mut near_gamma = 0;
    let mut near_01 = 0;
    for (&t, &ok) in tau_line.iter().zip(reasonable) {
        if !ok {
            continue;
        }
        if (t - g).abs() < t.min(1.0 - t).abs() {
            near_gamma += 1;
        } else {
            near_01 += 1;
        }
    }
    let cluster = match (near_01, near_gamma) {
        (_, 0) => Cluster::ZeroOne,
        (0, _) => Cluster::Gamma,
        _ => Cluster::Mixed,
    };
    MediumValueReport {
        gamma: g,
        gamma_far,
        cluster,
        dichotomy_violated: gamma_far && cluster == Cluster::Mixed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reasonableness {
    pub large: bool,
    /// Probability that a random diagonal through the entry is good.
    pub r: f64,
    /// Fraction of `T_ij` on which `|f₁|` is not `ε^{1/7}`-close to 1.
    pub far_from_boolean: f64,
    pub reasonable: bool,
}

/// The reasonableness conditions for the entry at position `k` on `line`.
pub fn reasonable(
    m: &CoefficientMatrix,
    l: &BoolMatrix,
    line: Line,
    k: usize,
    samples: u64,
    seed: u64,
) -> Reasonableness {
    let (i, j) = line.cell(k);
    let large = l.get(i, j);
    let r = good_fraction_through(l, i, j, samples, seed).value;
    let far = coset_far_from_boolean(m, i, j, samples, seed);
    Reasonableness {
        large,
        r,
        far_from_boolean: far,
        reasonable: large && r >= 0.8 && far <= 0.2,
    }
}

/// `Pr_{π ∈ T_ij}[ ||f₁(π)| − 1| > ε^{1/7} ]`.
fn coset_far_from_boolean(m: &CoefficientMatrix, i: usize, j: usize, samples: u64, seed: u64) -> f64 {
    let n = m.n;
    let tol = eps_tolerance(1.0, m.epsilon);
    let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
    let base = m.get(i, j);
    let far = |order: &[u8]| -> bool {
        let v: f64 = base
            + rows
                .iter()
                .zip(order)
                .map(|(&r, &o)| m.get(r, cols[o as usize]))
                .sum::<f64>();
        (v.abs() - 1.0).abs() > tol
    };
    if n - 1 <= MAX_DENSE_N {
        let mut order: Vec<u8> = (0..(n - 1) as u8).collect();
        let mut count = 0u64;
        let mut total = 0u64;
        loop {
            total += 1;
            if far(&order) {
                count += 1;
            }
            if !next_permutation(&mut order) {
                break;
            }
        }
        count as f64 / total as f64
    } else {
        let mut rng = stream(seed, (i * n + j) as u64);
        let hits = (0..samples).filter(|_| far(&random_images(n - 1, &mut rng))).count();
        hits as f64 / samples.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub line: Option<Line>,
    pub agrees: bool,
    pub degraded: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryResult {
    #[serde(serialize_with = "serialize_family")]
    pub g: BooleanFamily,
    pub d: f64,
    pub symdiff: u64,
    pub symdiff_fraction: f64,
    pub strong_line: StrongLineReport,
    pub recursive_check: CrossCheck,
    pub epsilon: f64,
    pub epsilon_kind: EpsilonKind,
    pub c: f64,
    pub large_threshold: f64,
    pub tau_threshold: f64,
    /// `τ` along the strong line.
    pub tau_line: Vec<f64>,
    pub reasonable: Vec<bool>,
    pub medium_value: MediumValueReport,
}

fn serialize_family<S: serde::Serializer>(f: &BooleanFamily, s: S) -> std::result::Result<S::Ok, S::Error> {
    let file: FamilyFile = f.to_file();
    serde::Serialize::serialize(&file, s)
}

impl RecoveryResult {
    /// Positions selected on the strong line.
    pub fn members(&self) -> Vec<usize> {
        self.g
            .as_dictatorship()
            .map(|c| c.members().to_vec())
            .unwrap_or_default()
    }
}

/// `τ` values along `line`.
pub fn tau_along(tau: &TauMatrix, line: Line) -> Vec<f64> {
    match line.kind {
        LineKind::Row => tau.row(line.index).to_vec(),
        LineKind::Column => tau.column(line.index),
    }
}

fn line_mass(m: &CoefficientMatrix, line: Line) -> f64 {
    (0..m.n)
        .map(|k| {
            let (i, j) = line.cell(k);
            m.get(i, j).abs()
        })
        .sum()
}

/// Reconstructs the approximating dictatorship of `family`.
pub fn recover(family: &BooleanFamily, params: &RecoveryParams) -> Result<RecoveryResult> {
    let n = family.n();
    let m = coefficient_matrix_with(
        family,
        EpsilonOptions {
            samples: params.samples,
            seed: params.seed,
        },
    )?;
    let cls = match params.large_threshold {
        Some(t) => LargenessClassifier::with_threshold(m.epsilon, m.c, t),
        None => LargenessClassifier::for_matrix(&m),
    };
    let l = classify(&m, &cls);
    let search = SearchOptions {
        samples: params.samples.min(20_000),
        seed: params.seed,
        ..SearchOptions::default()
    };

    // Direct scan; among lines tied at the smallest non-large fraction the
    // one carrying the most coefficient mass wins.
    let candidates = line_candidates(&l);
    let best_p = candidates[0].1;
    let line = candidates
        .iter()
        .take_while(|c| c.1 == best_p)
        .map(|c| c.0)
        .fold(None::<Line>, |acc, cand| match acc {
            None => Some(cand),
            Some(cur) if line_mass(&m, cand) > line_mass(&m, cur) + 1e-12 => Some(cand),
            keep => keep,
        })
        .expect("at least one line");
    if best_p > params.p_max {
        return Err(Error::NoStrongLine {
            best: Some(line),
            best_p,
        });
    }
    let (q, q_se) = measure_q(&l, &search);
    let strong_line = StrongLineReport {
        line,
        strength_p: best_p,
        q_good: q,
        q_stderr: q_se,
        method: Method::Direct,
        degraded: false,
        bootstrap_ok: {
            let on_line = (0..n)
                .filter(|&k| {
                    let (i, j) = line.cell(k);
                    l.get(i, j)
                })
                .count();
            let outside = (l.count() - on_line) as f64;
            outside <= 3.0 * (2.0 * q / (1.0 - best_p)) * n as f64 + 1e-9
        },
        trace: Vec::new(),
    };

    let recursive_check = match find_strong_line_recursive(&l, 1.0 / 50.0, &search) {
        Ok(rep) => CrossCheck {
            line: Some(rep.line),
            agrees: rep.line == line,
            degraded: rep.degraded,
            error: None,
        },
        Err(e) => CrossCheck {
            line: None,
            agrees: false,
            degraded: true,
            error: Some(e.to_string()),
        },
    };

    let tau = tau_matrix(family);
    let tau_line = tau_along(&tau, line);
    let flags: Vec<bool> = (0..n)
        .map(|k| reasonable(&m, &l, line, k, params.samples.min(20_000), params.seed).reasonable)
        .collect();
    let medium = medium_value_check(&tau_line, &flags, m.c, m.epsilon);
    let tau_threshold = params
        .tau_threshold
        .unwrap_or_else(|| default_tau_threshold(m.epsilon, m.c, n))
        .max(TOLERANCE_FLOOR);
    let members = select_on_line(&tau_line, tau_threshold, &medium)?;
    let cosets = CosetUnion::new(n, line, members)?;
    let d = cosets.members().len() as f64 / n as f64;
    let g = BooleanFamily::symbolic(n, cosets, BTreeSet::new(), BTreeSet::new())?;
    let symdiff = family.symmetric_difference(&g)?;
    Ok(RecoveryResult {
        symdiff_fraction: symdiff as f64 / factorial(n) as f64,
        symdiff,
        g,
        d,
        strong_line,
        recursive_check,
        epsilon: m.epsilon,
        epsilon_kind: m.epsilon_kind,
        c: m.c,
        large_threshold: cls.threshold,
        tau_threshold,
        tau_line,
        reasonable: flags,
        medium_value: medium,
    })
}

/// Positions `k` with `τ_k ≥ 1 − t`; fails when the line's entries sit at
/// the medium value.
pub fn select_on_line(tau_line: &[f64], threshold: f64, medium: &MediumValueReport) -> Result<Vec<usize>> {
    if medium.cluster == Cluster::Gamma {
        return Err(Error::MediumValueCluster { gamma: medium.gamma });
    }
    Ok(tau_line
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= 1.0 - threshold)
        .map(|(k, _)| k)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Injection {
    #[serde(serialize_with = "serialize_family")]
    pub h: BooleanFamily,
    /// Permutations removed from `F` (or added, when `F` was complemented).
    pub changed: u64,
    pub complemented: bool,
    /// `⟨h, sgn⟩` for `h = 2χ_H − 1`.
    pub sign_correlation: f64,
    /// `(n!·⟨h, sgn⟩)² ≥ υ (n!)²`, checked in integers.
    pub certified: bool,
}

/// Moves `F` by at most `√υ·n!` permutations so that `⟨h, sgn⟩² ≥ υ`,
/// removing permutations of the majority parity from the larger of `F` and
/// its complement.
pub fn inject_error(family: &BooleanFamily, upsilon: f64, seed: u64) -> Result<Injection> {
    if !(0.0..=1.0 / 16.0).contains(&upsilon) {
        return Err(Error::InvalidParameter {
            name: "upsilon",
            reason: format!("must lie in [0, 1/16], got {upsilon}"),
        });
    }
    let n = family.n();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "sign correlation needs n ≥ 2".into(),
        });
    }
    let total = factorial(n);
    let complemented = family.size() * 2 < total;
    let base = if complemented {
        family.complement()
    } else {
        family.clone()
    };
    let bits = base.to_bitset()?;

    let mut even = Vec::new();
    let mut odd = Vec::new();
    for_each_in_range(n, 0, total, |r, p| {
        if bits.get(r as usize) {
            if sign_of(p) == 1 {
                even.push(r);
            } else {
                odd.push(r);
            }
        }
    });
    // n!·⟨f, sgn⟩ = 2(#even − #odd) since Σ sgn = 0.
    let d = 2 * (even.len() as i128 - odd.len() as i128);
    let target = upsilon * (total as f64) * (total as f64);
    let certifies = |d: i128| (d as f64) * (d as f64) >= target;

    let mut changed = 0u64;
    let mut out = bits.clone();
    if !certifies(d) {
        let (pool, s) = if even.len() >= odd.len() {
            (&even, 1i128)
        } else {
            (&odd, -1i128)
        };
        // Removing k of sign s moves n!·x by −2sk.
        let need = ((upsilon.sqrt() * total as f64 + (s * d) as f64) / 2.0).ceil().max(0.0) as u64;
        let mut k = need;
        while !certifies(d - 2 * s * k as i128) {
            k += 1;
        }
        if k as usize > pool.len() {
            return Err(Error::InvalidParameter {
                name: "upsilon",
                reason: format!("needs {k} removals but only {} candidates", pool.len()),
            });
        }
        let mut rng = stream(seed, 0);
        for idx in sample(&mut rng, pool.len(), k as usize) {
            out.set(pool[idx] as usize, false);
        }
        changed = k;
    }
    let h_base = BooleanFamily::explicit(n, out)?;
    let h = if complemented { h_base.complement() } else { h_base };
    let corr = RealFunction::signed_indicator(&h)?.sign_correlation();
    let hb = h.to_bitset()?;
    let mut e = 0i128;
    let mut o = 0i128;
    for_each_in_range(n, 0, total, |r, p| {
        if hb.get(r as usize) {
            if sign_of(p) == 1 {
                e += 1;
            } else {
                o += 1;
            }
        }
    });
    Ok(Injection {
        h,
        changed,
        complemented,
        sign_correlation: corr,
        certified: certifies(2 * (e - o)),
    })
}

/// A dictatorship with noise, for experiments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub n: usize,
    pub line: Line,
    pub members: Vec<usize>,
    pub delta: f64,
    pub seed: u64,
}

/// Flips each membership with probability `δ`, then adds or removes random
/// permutations until the size matches the base dictatorship again.
pub fn noised_dictatorship(base: &BooleanFamily, delta: f64, rng: &mut SnfRng) -> Result<BooleanFamily> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must lie in [0, 1], got {delta}"),
        });
    }
    let n = base.n();
    let mut bits: Bitset = base.to_bitset()?;
    let target = base.size();
    if delta > 0.0 {
        for r in 0..bits.len() {
            if rng.random_bool(delta) {
                bits.toggle(r);
            }
        }
    }
    let size = bits.count_ones();
    if size != target {
        let want_member = size < target;
        let pool: Vec<usize> = (0..bits.len()).filter(|&r| bits.get(r) != want_member).collect();
        let k = size.abs_diff(target) as usize;
        for idx in sample(rng, pool.len(), k) {
            bits.toggle(pool[idx]);
        }
    }
    BooleanFamily::explicit(n, bits)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub trial: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub symdiff: f64,
    pub truth_symdiff: f64,
    pub d: f64,
    pub c: f64,
    pub eta: f64,
    pub ratio: f64,
    pub recovered: bool,
}

pub const STABILITY_CSV_HEADER: &str =
    "# snf-stability v1\ntrial,delta,epsilon,symdiff,truth_symdiff,d,c,eta,ratio,recovered";

impl StabilityRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.trial,
            fmt17(self.delta),
            fmt17(self.epsilon),
            fmt17(self.symdiff),
            fmt17(self.truth_symdiff),
            fmt17(self.d),
            fmt17(self.c),
            fmt17(self.eta),
            fmt17(self.ratio),
            self.recovered
        )
    }
}

/// `symdiff · η / (ε^{1/7} + n^{−1/3})`.
pub fn stability_ratio(symdiff: f64, eta: f64, epsilon: f64, n: usize) -> f64 {
    symdiff * eta / (epsilon.max(0.0).powf(1.0 / 7.0) + (n as f64).powf(-1.0 / 3.0))
}

/// Runs `trials` seeded noise-and-recover trials. Trials where recovery
/// fails are reported with `recovered = false`, `d = 0` and the symmetric
/// difference to the empty family.
pub fn stability_experiment(noise: &NoiseSpec, trials: u64, params: &RecoveryParams) -> Result<Vec<StabilityRow>> {
    let base = BooleanFamily::dictatorship(noise.n, noise.line, noise.members.iter().copied())?;
    let total = factorial(noise.n) as f64;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(noise.seed, trial);
            let f = noised_dictatorship(&base, noise.delta, &mut rng)?;
            let p = RecoveryParams {
                seed: noise.seed.wrapping_add(trial),
                ..*params
            };
            let c = f.density();
            let eta = f.eta();
            let (epsilon, symdiff, truth, d, ok) = match recover(&f, &p) {
                Ok(res) => {
                    let truth = res.g.symmetric_difference(&base)? as f64 / total;
                    (res.epsilon, res.symdiff_fraction, truth, res.d, true)
                }
                Err(Error::NoStrongLine { .. })
                | Err(Error::MediumValueCluster { .. })
                | Err(Error::LineConflict { .. }) => {
                    let (eps, _) = crate::projection::distance_to_u1(&f)?;
                    (eps, c, base.size() as f64 / total, 0.0, false)
                }
                Err(e) => return Err(e),
            };
            Ok(StabilityRow {
                trial,
                delta: noise.delta,
                epsilon,
                symdiff,
                truth_symdiff: truth,
                d,
                c,
                eta,
                ratio: stability_ratio(symdiff, eta, epsilon, noise.n),
                recovered: ok,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_dictatorships_are_fixed_points() {
        for k in 1..6 {
            let f = BooleanFamily::dictatorship(6, Line::row(0), 0..k).unwrap();
            let res = recover(&f, &RecoveryParams::default()).unwrap();
            assert_eq!(res.symdiff, 0, "k = {k}");
            assert!((res.d - k as f64 / 6.0).abs() < 1e-15);
        }
        let f = BooleanFamily::dictatorship(6, Line::column(4), [1, 3, 5]).unwrap();
        let res = recover(&f, &RecoveryParams::default()).unwrap();
        assert_eq!(res.strong_line.line, Line::column(4));
        assert_eq!(res.g, f);
    }

    #[test]
    fn noised_half_dictatorship_at_n8() {
        let base = BooleanFamily::dictatorship(8, Line::row(2), [0, 1, 5, 6]).unwrap();
        let mut rng = stream(4, 0);
        let f = noised_dictatorship(&base, 0.005, &mut rng).unwrap();
        assert_eq!(f.size(), base.size());
        let res = recover(&f, &RecoveryParams::default()).unwrap();
        assert_eq!(res.g.symmetric_difference(&base).unwrap(), 0);
        assert!(res.symdiff_fraction <= 0.011);
        let again = recover(&res.g, &RecoveryParams::default()).unwrap();
        assert_eq!(again.g, res.g);
    }

    #[test]
    fn random_family_does_not_crash() {
        let mut rng = stream(9, 0);
        let ranks: Vec<u64> = (0..720).filter(|_| rng.random_bool(0.5)).collect();
        let f = BooleanFamily::from_ranks(6, ranks).unwrap();
        match recover(&f, &RecoveryParams::default()) {
            Err(Error::NoStrongLine { .. }) => {}
            Ok(res) => assert!(res.symdiff_fraction > 0.2),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn medium_value_clusters() {
        let rep = medium_value_check(&[0.5, 0.5, 0.5], &[true; 3], 0.5, 0.0);
        assert_eq!(rep.cluster, Cluster::ZeroOne);
        let rep = medium_value_check(&[0.6, 0.6, 0.6, 0.6], &[true; 4], 0.3, 0.0);
        assert_eq!(rep.cluster, Cluster::Gamma);
        assert!(matches!(
            select_on_line(&[0.6; 4], 0.1, &rep),
            Err(Error::MediumValueCluster { .. })
        ));
        let rep = medium_value_check(&[0.98, 0.02, 0.6], &[true; 3], 0.3, 0.0);
        assert_eq!(rep.cluster, Cluster::Mixed);
        assert!(rep.dichotomy_violated);
        let rep = medium_value_check(&[0.98, 0.02, 0.01], &[true; 3], 0.3, 1e-3);
        assert_eq!(rep.cluster, Cluster::ZeroOne);
    }

    #[test]
    fn reasonable_on_exact_dictatorship() {
        let f = BooleanFamily::dictatorship(6, Line::row(0), [0, 1, 2]).unwrap();
        let m = crate::projection::coefficient_matrix(&f).unwrap();
        let l = classify(&m, &LargenessClassifier::for_matrix(&m));
        for k in 0..6 {
            let r = reasonable(&m, &l, Line::row(0), k, 1000, 0);
            assert!(r.reasonable, "{k}: {r:?}");
        }
        assert!(!reasonable(&m, &l, Line::row(1), 0, 1000, 0).reasonable);
    }

    #[test]
    fn injection_certificate() {
        let f = BooleanFamily::dictatorship(6, Line::row(0), [0, 1, 2]).unwrap();
        let inj = inject_error(&f, 0.01, 3).unwrap();
        assert!(inj.certified);
        assert!(inj.sign_correlation.powi(2) >= 0.01 - 1e-12);
        assert!(f.symmetric_difference(&inj.h).unwrap() as f64 <= 0.1 * 720.0);
        let same = inject_error(&f, 0.0, 3).unwrap();
        assert_eq!(same.changed, 0);
        assert_eq!(same.h.symmetric_difference(&f).unwrap(), 0);
        assert!(inject_error(&f, 0.1, 3).is_err());
    }

    #[test]
    fn stability_rows_are_deterministic() {
        let noise = NoiseSpec {
            n: 6,
            line: Line::row(0),
            members: vec![0, 1, 2],
            delta: 0.0,
            seed: 1,
        };
        let rows = stability_experiment(&noise, 2, &RecoveryParams::default()).unwrap();
        assert!(rows.iter().all(|r| r.epsilon.abs() < 1e-12 && r.symdiff == 0.0));
        let noisy = NoiseSpec { delta: 0.01, ..noise };
        let a = stability_experiment(&noisy, 3, &RecoveryParams::default()).unwrap();
        let b = stability_experiment(&noisy, 3, &RecoveryParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
