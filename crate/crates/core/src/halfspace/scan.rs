use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

use super::symbols::{HalfSpace, Undamped};
use crate::error::{Error, Result};

type C = Complex64;

/// Decay exponent of `|M|` fitted along one ray of the lattice.
#[derive(Debug, Clone, Serialize)]
pub struct RayFit {
    pub ray: String,
    /// Least-squares slope of `log |M|` against `log |(k, xi)|`.
    pub exponent: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub k_max: i64,
    pub xi_max: i64,
    /// Lattice points visited after folding the symmetries `k -> -k` and
    /// rotations of `xi`.
    pub points: u64,
    pub sup_weighted: f64,
    pub argmax: (i64, [i64; 2]),
    pub decay: Vec<RayFit>,
    /// Largest `|undamped| / |M|` over points where the undamped multiplier is finite.
    pub max_undamped_ratio: f64,
    pub ratio_argmax: (i64, [i64; 2]),
    pub resonant_points: u64,
}

/// Values `n = a^2 + b^2 <= bound` with a representative `(a, b)`, `a >= b >= 0`.
fn sums_of_two_squares(bound: i64) -> Vec<(i64, [i64; 2])> {
    let mut rep = vec![None; bound as usize + 1];
    let mut a = 0;
    while a * a <= bound {
        for b in 0..=a {
            let n = a * a + b * b;
            if n > bound {
                break;
            }
            if rep[n as usize].is_none() {
                rep[n as usize] = Some([a, b]);
            }
        }
        a += 1;
    }
    rep.into_iter().enumerate().skip(1).filter_map(|(n, r)| r.map(|r| (n as i64, r))).collect()
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    k: i64,
    n: i64,
    xi: [i64; 2],
}

impl Best {
    const NONE: Best = Best { value: f64::NEG_INFINITY, k: i64::MAX, n: i64::MAX, xi: [0, 0] };

    /// Larger value wins; ties go to the smallest `(|k|, |xi|)`.
    fn pick(a: Best, b: Best) -> Best {
        match a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => {
                if (a.k, a.n) <= (b.k, b.n) {
                    a
                } else {
                    b
                }
            }
        }
    }
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    num / den
}

fn ray_fit(hs: &HalfSpace, name: &str, pts: impl Iterator<Item = (i64, [i64; 2])>) -> RayFit {
    let samples: Vec<(f64, f64)> = pts
        .map(|(k, xi)| {
            let w = hs.frequency(k);
            let x = hs.wavevector(xi);
            let r = (w * w + x[0] * x[0] + x[1] * x[1]).sqrt();
            (r.ln(), hs.multiplier(k, xi).norm().ln())
        })
        .collect();
    RayFit { ray: name.into(), exponent: fit_slope(&samples), samples: samples.len() }
}

fn geometric(from: i64, to: i64) -> Vec<i64> {
    let mut v = Vec::new();
    let mut x = from as f64;
    while x <= to as f64 {
        let i = x.round() as i64;
        if v.last() != Some(&i) {
            v.push(i);
        }
        x *= 1.25;
    }
    v
}

/// Scans `1 <= k <= k_max` and `0 < |xi| <= xi_max`. Negative `k` and the
/// orientation of `xi` are folded away since the multiplier depends on
/// `(|k|, |xi|)` only, up to conjugation.
pub fn boundedness_scan(hs: &HalfSpace, k_max: i64, xi_max: i64) -> Result<ScanReport> {
    if k_max < 1 || xi_max < 1 {
        return Err(Error::Parameters("scan ranges must be at least 1".into()));
    }
    let shells = sums_of_two_squares(xi_max * xi_max);
    let (weighted, ratio, resonant) = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut bw = Best::NONE;
            let mut br = Best::NONE;
            let mut res = 0u64;
            for &(n, xi) in &shells {
                let here = |value| Best { value, k, n, xi };
                bw = Best::pick(bw, here(hs.weighted_multiplier(k, xi).norm()));
                match hs.undamped_multiplier(k, xi) {
                    Undamped::Singular => res += 1,
                    Undamped::Finite(u) => {
                        br = Best::pick(br, here(u.norm() / hs.multiplier(k, xi).norm()));
                    }
                }
            }
            (bw, br, res)
        })
        .reduce(|| (Best::NONE, Best::NONE, 0), |a, b| (Best::pick(a.0, b.0), Best::pick(a.1, b.1), a.2 + b.2));

    let tail = |n: i64| (n / 10).max(1);
    let decay = vec![
        ray_fit(hs, "k at xi = (1, 0)", geometric(tail(k_max), k_max).into_iter().map(|k| (k, [1, 0]))),
        ray_fit(hs, "xi = (n, 0) at k = 1", geometric(tail(xi_max), xi_max).into_iter().map(|n| (1, [n, 0]))),
        ray_fit(
            hs,
            "k = n^2, xi = (n, 0)",
            geometric(tail(xi_max), xi_max).into_iter().filter(|n| n * n <= k_max).map(|n| (n * n, [n, 0])),
        ),
    ];
    Ok(ScanReport {
        k_max,
        xi_max,
        points: k_max as u64 * shells.len() as u64,
        sup_weighted: weighted.value,
        argmax: (weighted.k, weighted.xi),
        decay,
        max_undamped_ratio: ratio.value,
        ratio_argmax: (ratio.k, ratio.xi),
        resonant_points: resonant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceClass {
    /// The symbol vanishes.
    Resonant,
    /// The damping terms outweigh the conservative part `|xi|^4 - k^2`.
    NearResonant,
    /// The conservative part dominates.
    Damped,
}

impl std::fmt::Display for ResonanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ResonanceClass::Resonant => "resonant",
            ResonanceClass::NearResonant => "near-resonant",
            ResonanceClass::Damped => "damped",
        })
    }
}

fn classify(undamped: C, damping: C, exact_zero: bool) -> ResonanceClass {
    let scale = undamped.norm() + damping.norm();
    let s = undamped + damping;
    if (exact_zero && damping == C::new(0.0, 0.0)) || s.norm() <= 1e-14 * scale {
        ResonanceClass::Resonant
    } else if undamped.norm() <= damping.norm() {
        ResonanceClass::NearResonant
    } else {
        ResonanceClass::Damped
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceEntry {
    pub k: i64,
    pub xi: [i64; 2],
    pub multiplier: C,
    pub weighted: f64,
    pub undamped_symbol: C,
    pub internal_damping: C,
    pub fluid_damping: C,
    /// `|1 / (|xi|^4 - k^2)|`, infinite at exact resonance.
    pub undamped_abs: f64,
    pub class: ResonanceClass,
    /// Fluid damping only (`mu_s = 0`).
    pub class_fluid_only: ResonanceClass,
    /// Plate damping only (fluid terms removed).
    pub class_internal_only: ResonanceClass,
    pub class_undamped: ResonanceClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceReport {
    pub halfspace: HalfSpace,
    pub k_max: i64,
    pub xi_max: i64,
    pub entries: Vec<ResonanceEntry>,
    pub counts: Vec<(String, ResonanceClass, usize)>,
}

/// Decomposes the coupled symbol on every lattice point with
/// `|k| <= k_max`, `|xi_i| <= xi_max` and classifies it with and without the
/// damping mechanisms.
pub fn resonance_report(hs: &HalfSpace, k_max: i64, xi_max: i64) -> ResonanceReport {
    let mut entries = Vec::new();
    for k in -k_max..=k_max {
        for a in -xi_max..=xi_max {
            for b in -xi_max..=xi_max {
                let xi = [a, b];
                let Ok(parts) = hs.symbol_parts(k, xi) else { continue };
                let exact = hs.is_resonant(k, xi);
                let zero = C::new(0.0, 0.0);
                entries.push(ResonanceEntry {
                    k,
                    xi,
                    multiplier: hs.multiplier(k, xi),
                    weighted: hs.weighted_multiplier(k, xi).norm(),
                    undamped_symbol: parts.undamped,
                    internal_damping: parts.internal,
                    fluid_damping: parts.fluid,
                    undamped_abs: hs.undamped_multiplier(k, xi).value().map_or(f64::INFINITY, |v| v.norm()),
                    class: classify(parts.undamped, parts.internal + parts.fluid, exact),
                    class_fluid_only: classify(parts.undamped, parts.fluid, exact),
                    class_internal_only: classify(parts.undamped, parts.internal, exact),
                    class_undamped: classify(parts.undamped, zero, exact),
                });
            }
        }
    }
    let mut counts = Vec::new();
    for variant in ["full", "fluid-only", "internal-only", "undamped"] {
        for class in [ResonanceClass::Resonant, ResonanceClass::NearResonant, ResonanceClass::Damped] {
            let n = entries
                .iter()
                .filter(|e| {
                    class
                        == match variant {
                            "full" => e.class,
                            "fluid-only" => e.class_fluid_only,
                            "internal-only" => e.class_internal_only,
                            _ => e.class_undamped,
                        }
                })
                .count();
            counts.push((variant.to_string(), class, n));
        }
    }
    ResonanceReport { halfspace: *hs, k_max, xi_max, entries, counts }
}
