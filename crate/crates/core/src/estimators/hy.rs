//! Realized variance and the Hayashi–Yoshida estimator.
//!
//! The double sum runs over all pairs of observation intervals with a
//! non-empty intersection; it is evaluated by a two-pointer merge sweep in
//! O(N₁+N₂) (the overlap join of two sorted interval sequences), never by the
//! literal O(N₁N₂) loop. The literal loop survives as [`hy_brute`], the test
//! oracle.
//!
//! The three single-sum representations regroup the same addends by tracing
//! component 1, component 2, or the refresh grid; interior addends regroup
//! identically and discrepancies are confined to end effects near t. The
//! upper summation bounds here cover the full range m₋(t) / Mⁿ(t) so that the
//! representations coincide with the double sum exactly whenever t is a
//! synchronous observation point; the end-effect magnitude near t is reported
//! as `boundary_residual` instead of being corrected away.

use crate::error::{Error, Result};
use crate::sampling::refresh_grid;
use crate::simulate::ObservedPath;

/// Which evaluation route produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// The overlap double sum.
    DoubleSum,
    /// Trace increments of component 1 against interpolated component 2.
    Rep1,
    /// Trace increments of component 2 against interpolated component 1.
    Rep2,
    /// Products of interpolated increments over refresh intervals.
    Rep3,
}

/// An estimator value at time t, with the magnitude of possible end-effect
/// terms near t (zero for the double sum, which is the reference).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    pub t: f64,
    /// None for realized variance.
    pub representation: Option<Representation>,
    pub boundary_residual: f64,
}

/// Realized variance: the sum of squared increments over observations ≤ t.
pub fn rv(path: &ObservedPath, t: f64) -> Result<EstimateResult> {
    let m = path.grid().m_minus(t).unwrap_or(0);
    if m < 1 {
        return Err(Error::Estimator(format!(
            "fewer than 2 observations before t = {t}"
        )));
    }
    let v = path.values();
    let mut sum = 0.0;
    for i in 1..=m {
        let d = v[i] - v[i - 1];
        sum += d * d;
    }
    Ok(EstimateResult {
        value: sum,
        t,
        representation: None,
        boundary_residual: 0.0,
    })
}

/// Arranges the operands in a fixed component order so that symmetric calls
/// sum the identical sequence of products.
fn canonical<'a>(p1: &'a ObservedPath, p2: &'a ObservedPath) -> (&'a ObservedPath, &'a ObservedPath) {
    if p1.component() <= p2.component() {
        (p1, p2)
    } else {
        (p2, p1)
    }
}

fn check_grids(p1: &ObservedPath, p2: &ObservedPath, t: f64) -> Result<(usize, usize)> {
    let m1 = p1.grid().m_minus(t).unwrap_or(0);
    let m2 = p2.grid().m_minus(t).unwrap_or(0);
    if m1 < 1 || m2 < 1 {
        return Err(Error::DegenerateGrid(format!(
            "need at least one full observation interval before t = {t}"
        )));
    }
    Ok((m1, m2))
}

/// The Hayashi–Yoshida estimator at time t: the sum of increment products
/// over all pairs (i, j) with t_i⁽¹⁾ ≤ t, t_j⁽²⁾ ≤ t whose observation
/// intervals overlap.
pub fn hy(p1: &ObservedPath, p2: &ObservedPath, t: f64) -> Result<EstimateResult> {
    let (a, b) = canonical(p1, p2);
    let (m1, m2) = check_grids(a, b, t)?;
    let t1 = a.grid().times();
    let t2 = b.grid().times();
    let v1 = a.values();
    let v2 = b.values();

    let mut sum = 0.0;
    let mut j_lo = 1usize;
    for i in 1..=m1 {
        let lo = t1[i - 1];
        let hi = t1[i];
        while j_lo <= m2 && t2[j_lo] <= lo {
            j_lo += 1;
        }
        let d1 = v1[i] - v1[i - 1];
        let mut j = j_lo;
        // t2[j] > lo and t2[j-1] < hi together are the overlap indicator
        while j <= m2 && t2[j - 1] < hi {
            sum += d1 * (v2[j] - v2[j - 1]);
            j += 1;
        }
    }
    Ok(EstimateResult {
        value: sum,
        t,
        representation: Some(Representation::DoubleSum),
        boundary_residual: 0.0,
    })
}

/// Literal O(N₁N₂) evaluation of the overlap double sum; the reference oracle
/// for the sweep.
pub fn hy_brute(p1: &ObservedPath, p2: &ObservedPath, t: f64) -> Result<f64> {
    let (a, b) = canonical(p1, p2);
    let (m1, m2) = check_grids(a, b, t)?;
    let t1 = a.grid().times();
    let t2 = b.grid().times();
    let v1 = a.values();
    let v2 = b.values();
    let mut sum = 0.0;
    for i in 1..=m1 {
        for j in 1..=m2 {
            if t1[i].min(t2[j]) > t1[i - 1].max(t2[j - 1]) {
                sum += (v1[i] - v1[i - 1]) * (v2[j] - v2[j - 1]);
            }
        }
    }
    Ok(sum)
}

/// One of the three single-sum representations, evaluated on the full index
/// range, with the end-effect bound recorded as `boundary_residual`.
pub fn hy_rep(
    p1: &ObservedPath,
    p2: &ObservedPath,
    t: f64,
    rep: Representation,
) -> Result<EstimateResult> {
    if rep == Representation::DoubleSum {
        return hy(p1, p2, t);
    }
    let (a, b) = canonical(p1, p2);
    check_grids(a, b, t)?;
    let value = match rep {
        Representation::Rep1 => traced_sum(a, b, t)?,
        Representation::Rep2 => traced_sum(b, a, t)?,
        Representation::Rep3 => refresh_sum(a, b, t)?,
        Representation::DoubleSum => unreachable!(),
    };
    let residual = end_effect_bound(a, b, t)?;
    Ok(EstimateResult {
        value,
        t,
        representation: Some(rep),
        boundary_residual: residual,
    })
}

/// Σ_i Δ_iX⁽ᵃ⁾ · (X⁽ᵇ⁾ at the next b-tick after t_i⁽ᵃ⁾ − X⁽ᵇ⁾ at the
/// previous b-tick before t_{i−1}⁽ᵃ⁾): the traced representation. Addends
/// whose interpolation runs past the other grid's span are end effects and
/// are skipped (they are covered by the residual bound).
fn traced_sum(a: &ObservedPath, b: &ObservedPath, t: f64) -> Result<f64> {
    let ta = a.grid().times();
    let va = a.values();
    let gb = b.grid();
    let vb = b.values();
    let ma = a.grid().m_minus(t).unwrap_or(0);
    let mut sum = 0.0;
    for i in 1..=ma {
        let Some(up) = gb.m_plus(ta[i]) else { continue };
        let lo = gb.m_minus(ta[i - 1]).expect("grids share origin 0");
        sum += (va[i] - va[i - 1]) * (vb[up] - vb[lo]);
    }
    Ok(sum)
}

/// Σ_k over refresh intervals of the products of interpolated increments.
fn refresh_sum(a: &ObservedPath, b: &ObservedPath, t: f64) -> Result<f64> {
    let r = refresh_grid(a.grid(), b.grid())?;
    let m_t = r.count_up_to(t);
    let values = [a.values(), b.values()];
    let mut sum = 0.0;
    for k in 1..=m_t {
        let mut w = [0.0f64; 2];
        let mut defined = true;
        for l in 0..2 {
            match r.next_index(l, k) {
                Some(up) => w[l] = values[l][up] - values[l][r.prev_index(l, k)],
                None => defined = false,
            }
        }
        if defined {
            sum += w[0] * w[1];
        }
    }
    Ok(sum)
}

/// Upper bound on the regrouping discrepancy between the double sum and any
/// representation: the total magnitude of increment products whose intervals
/// touch the region beyond the second-to-last refresh time before t.
fn end_effect_bound(a: &ObservedPath, b: &ObservedPath, t: f64) -> Result<f64> {
    let r = refresh_grid(a.grid(), b.grid())?;
    let m_t = r.count_up_to(t);
    let s_star = if m_t >= 2 { r.times()[m_t - 1] } else { 0.0 };

    let t1 = a.grid().times();
    let t2 = b.grid().times();
    let v1 = a.values();
    let v2 = b.values();
    let m1 = t1.len() - 1;
    let m2 = t2.len() - 1;
    let mut bound = 0.0;
    let mut j_lo = 1usize;
    for i in 1..=m1 {
        let lo = t1[i - 1];
        let hi = t1[i];
        while j_lo <= m2 && t2[j_lo] <= lo {
            j_lo += 1;
        }
        let d1 = (v1[i] - v1[i - 1]).abs();
        let mut j = j_lo;
        while j <= m2 && t2[j - 1] < hi {
            if t1[i] > s_star || t2[j] > s_star {
                bound += d1 * (v2[j] - v2[j - 1]).abs();
            }
            j += 1;
        }
    }
    Ok(bound)
}
