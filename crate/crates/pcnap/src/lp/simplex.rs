//! Dense two-phase simplex, generic over the scalar.
//!
//! The exact path runs over `Ratio<i128>` with checked arithmetic and falls
//! back to `BigRational` on overflow, so results are always exact. A float
//! instantiation backs the opt-in approximate mode. Pivoting uses Dantzig's
//! rule until it stalls, then switches to Bland's rule, which guarantees
//! termination in exact arithmetic.
//!
//! Before solving, rows are presolved: vacuous rows are dropped, duplicates
//! merged, and rows implied componentwise by another row (same sense, `x >=
//! 0`) removed. This only shrinks the system; the solved problem is
//! equivalent to the input.

use super::{LPProblem, LPSolution, LpStatus, Objective, Rel};
use crate::error::{Error, Result};
use crate::rational::Q;
use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

pub(crate) struct Overflow;

type R<T> = std::result::Result<T, Overflow>;

pub(crate) trait Scalar: Clone + Sized {
    fn from_q(q: &Q) -> Option<Self>;
    fn to_q(&self) -> Q;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    /// Sign with tolerance: -1, 0, +1.
    fn sign(&self, tol: &Self) -> i8;
    fn lt(&self, o: &Self) -> bool;
}

impl Scalar for BigRational {
    fn from_q(q: &Q) -> Option<Self> {
        Some(q.clone())
    }
    fn to_q(&self) -> Q {
        self.clone()
    }
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(self / o)
        }
    }
    fn sign(&self, _tol: &Self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

impl Scalar for Ratio<i128> {
    fn from_q(q: &Q) -> Option<Self> {
        Some(Ratio::new(q.numer().to_i128()?, q.denom().to_i128()?))
    }
    fn to_q(&self) -> Q {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
    fn zero() -> Self {
        <Ratio<i128> as Zero>::zero()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            self.checked_div(o)
        }
    }
    fn sign(&self, _tol: &Self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

impl Scalar for f64 {
    fn from_q(q: &Q) -> Option<Self> {
        Some(q.numer().to_f64()? / q.denom().to_f64()?)
    }
    fn to_q(&self) -> Q {
        BigRational::from_float(*self).unwrap_or_else(|| <BigRational as Zero>::zero())
    }
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn sign(&self, tol: &Self) -> i8 {
        if self.abs() <= *tol {
            0
        } else if *self < 0.0 {
            -1
        } else {
            1
        }
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

/// Scalar-independent prepared problem: minimize `obj . x`, rows `>= rhs`,
/// `x >= 0`.
struct Prepared {
    nvars: usize,
    obj: Vec<Q>,
    rows: Vec<(Vec<(usize, Q)>, Q)>,
    trivially_infeasible: bool,
}

fn leq_componentwise(a: &[(usize, Q)], b: &[(usize, Q)]) -> bool {
    // a_i <= b_i for every component (sparse, sorted by var).
    let zero = <Q as Zero>::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((va, ca)), Some((vb, cb))) if va == vb => {
                if ca > cb {
                    return false;
                }
                i += 1;
                j += 1;
            }
            (Some((va, ca)), Some((vb, _))) if va < vb => {
                if *ca > zero {
                    return false;
                }
                i += 1;
            }
            (Some(_), Some((_, cb))) => {
                if *cb < zero {
                    return false;
                }
                j += 1;
            }
            (Some((_, ca)), None) => {
                if *ca > zero {
                    return false;
                }
                i += 1;
            }
            (None, Some((_, cb))) => {
                if *cb < zero {
                    return false;
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    true
}

fn prepare(p: &LPProblem) -> Prepared {
    let nvars = p.var_names.len();
    let flip = matches!(p.objective_sense, Objective::Maximize);
    let mut obj = vec![<Q as Zero>::zero(); nvars];
    for (v, c) in &p.objective {
        obj[*v] = if flip { -c.clone() } else { c.clone() };
    }

    let mut trivially_infeasible = false;
    let mut dedup: BTreeMap<Vec<(usize, Q)>, Q> = BTreeMap::new();
    for row in &p.rows {
        let mut coeffs: BTreeMap<usize, Q> = BTreeMap::new();
        for (v, c) in &row.coeffs {
            let e = coeffs.entry(*v).or_insert_with(<Q as Zero>::zero);
            *e += c;
        }
        let (mut coeffs, mut rhs): (Vec<(usize, Q)>, Q) = (
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            row.rhs.clone(),
        );
        if matches!(row.rel, Rel::Le) {
            for (_, c) in coeffs.iter_mut() {
                *c = -c.clone();
            }
            rhs = -rhs;
        }
        if coeffs.is_empty() {
            if rhs.is_positive() {
                trivially_infeasible = true;
            }
            continue;
        }
        // All-nonnegative row with rhs <= 0 is implied by x >= 0.
        if !rhs.is_positive() && coeffs.iter().all(|(_, c)| !c.is_negative()) {
            continue;
        }
        let e = dedup.entry(coeffs).or_insert_with(|| rhs.clone());
        if rhs > *e {
            *e = rhs;
        }
    }

    let rows: Vec<(Vec<(usize, Q)>, Q)> = dedup.into_iter().collect();
    let mut keep = vec![true; rows.len()];

    // Row domination: a kept row r1 with r1 <= r2 componentwise and
    // rhs1 >= rhs2 implies r2 under x >= 0. Restrict the quadratic scan to
    // groups where it pays off.
    let mut groups: BTreeMap<(Option<(usize, Q)>, Q), Vec<usize>> = BTreeMap::new();
    for (i, (coeffs, rhs)) in rows.iter().enumerate() {
        let positives: Vec<&(usize, Q)> =
            coeffs.iter().filter(|(_, c)| c.is_positive()).collect();
        let key = if positives.len() == coeffs.len() {
            // Covering-style row: group by rhs only.
            (None, rhs.clone())
        } else if positives.len() == 1 {
            (Some(positives[0].clone()), rhs.clone())
        } else {
            continue;
        };
        groups.entry(key).or_default().push(i);
    }
    for (_, group) in groups {
        for (a, &i) in group.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            for &j in &group[a + 1..] {
                if !keep[j] {
                    continue;
                }
                if leq_componentwise(&rows[i].0, &rows[j].0) {
                    keep[j] = false;
                } else if leq_componentwise(&rows[j].0, &rows[i].0) {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let rows = rows
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r)
        .collect();

    Prepared { nvars, obj, rows, trivially_infeasible }
}

enum RawOutcome {
    Optimal(Vec<Q>),
    Infeasible,
    Unbounded,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>, // m x (cols + 1), last entry is rhs
    cost: Vec<S>,      // reduced costs, length cols
    basis: Vec<usize>,
    cols: usize,
    art_start: usize,
    tol: S,
    bland: bool,
    stall: usize,
    iter_cap: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, prow: usize, pcol: usize) -> R<()> {
        let pv = self.rows[prow][pcol].clone();
        let inv_scale = |x: &S| x.div(&pv).ok_or(Overflow);
        for x in self.rows[prow].iter_mut() {
            if x.sign(&self.tol) != 0 {
                *x = inv_scale(x)?;
            } else {
                *x = S::zero();
            }
        }
        self.rows[prow][pcol] = pv.div(&pv).ok_or(Overflow)?;
        let pivot_row = self.rows[prow].clone();
        for i in 0..self.rows.len() {
            if i == prow {
                continue;
            }
            let factor = self.rows[i][pcol].clone();
            if factor.sign(&self.tol) == 0 {
                self.rows[i][pcol] = S::zero();
                continue;
            }
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if p.sign(&self.tol) != 0 {
                    *x = x.sub(&factor.mul(p).ok_or(Overflow)?).ok_or(Overflow)?;
                }
            }
            self.rows[i][pcol] = S::zero();
        }
        let factor = self.cost[pcol].clone();
        if factor.sign(&self.tol) != 0 {
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                if p.sign(&self.tol) != 0 {
                    *x = x.sub(&factor.mul(p).ok_or(Overflow)?).ok_or(Overflow)?;
                }
            }
            self.cost[pcol] = S::zero();
        }
        self.basis[prow] = pcol;
        Ok(())
    }

    /// One simplex phase; returns false when optimal, or Err-like unbounded
    /// marker via Ok(None) ... encoded as Option<bool>: None = unbounded.
    fn optimize(&mut self, allow_art: bool) -> R<Option<()>> {
        loop {
            self.iter_cap = self.iter_cap.checked_sub(1).ok_or(Overflow)?;
            // Entering column.
            let limit = if allow_art { self.cols } else { self.art_start };
            let mut enter: Option<usize> = None;
            if self.bland {
                for j in 0..limit {
                    if self.cost[j].sign(&self.tol) < 0 {
                        enter = Some(j);
                        break;
                    }
                }
            } else {
                let mut best: Option<(usize, S)> = None;
                for j in 0..limit {
                    if self.cost[j].sign(&self.tol) < 0 {
                        match &best {
                            Some((_, c)) if !self.cost[j].lt(c) => {}
                            _ => best = Some((j, self.cost[j].clone())),
                        }
                    }
                }
                enter = best.map(|(j, _)| j);
            }
            let Some(e) = enter else { return Ok(Some(())) };
            // Ratio test; ties by lowest basis variable (Bland).
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][e].sign(&self.tol) > 0 {
                    let ratio = self.rhs(i).div(&self.rows[i][e]).ok_or(Overflow)?;
                    match &leave {
                        Some((li, lr)) => {
                            let tie = !ratio.lt(lr) && !lr.lt(&ratio);
                            if ratio.lt(lr) || (tie && self.basis[i] < self.basis[*li]) {
                                leave = Some((i, ratio));
                            }
                        }
                        None => leave = Some((i, ratio)),
                    }
                }
            }
            let Some((prow, bottleneck)) = leave else { return Ok(None) };
            let degenerate = bottleneck.sign(&self.tol) == 0;
            if degenerate {
                self.stall += 1;
                if self.stall > 40 {
                    self.bland = true;
                }
            } else {
                self.stall = 0;
            }
            self.pivot(prow, e)?;
        }
    }
}

fn run<S: Scalar>(prep: &Prepared, tol: S) -> R<RawOutcome> {
    if prep.trivially_infeasible {
        return Ok(RawOutcome::Infeasible);
    }
    let n = prep.nvars;
    let m = prep.rows.len();
    // Columns: structural n, surplus m, artificials per row as needed. A Ge
    // row with rhs >= 0 gets surplus -1 and an artificial; one with rhs < 0
    // is negated, turning its surplus into a basic slack.
    let mut art_index = Vec::with_capacity(m);
    let mut next_art = n + m;
    for (_, rhs) in prep.rows.iter() {
        if rhs.is_negative() {
            art_index.push(None);
        } else {
            art_index.push(Some(next_art));
            next_art += 1;
        }
    }
    let cols = next_art;
    let zero = S::zero();
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (coeffs, rhs)) in prep.rows.iter().enumerate() {
        let mut row = vec![zero.clone(); cols + 1];
        let negate = rhs.is_negative();
        for (v, c) in coeffs {
            let val = if negate { -c.clone() } else { c.clone() };
            row[*v] = S::from_q(&val).ok_or(Overflow)?;
        }
        // Surplus column: -1 normally, +1 on negated rows.
        row[n + i] = if negate {
            S::from_q(&Q::from_integer(BigInt::from(1))).ok_or(Overflow)?
        } else {
            S::from_q(&Q::from_integer(BigInt::from(-1))).ok_or(Overflow)?
        };
        let r = if negate { -rhs.clone() } else { rhs.clone() };
        row[cols] = S::from_q(&r).ok_or(Overflow)?;
        if let Some(a) = art_index[i] {
            row[a] = S::from_q(&Q::from_integer(BigInt::from(1))).ok_or(Overflow)?;
            basis.push(a);
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    let mut cost = vec![zero.clone(); cols];
    for j in n + m..cols {
        cost[j] = S::from_q(&Q::from_integer(BigInt::from(1))).ok_or(Overflow)?;
    }
    for (i, row) in rows.iter().enumerate() {
        if art_index[i].is_some() {
            for j in 0..cols {
                if row[j].sign(&tol) != 0 {
                    cost[j] = cost[j].sub(&row[j]).ok_or(Overflow)?;
                }
            }
        }
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis,
        cols,
        art_start: n + m,
        tol: tol.clone(),
        bland: false,
        stall: 0,
        iter_cap: 2_000_000,
    };
    // Artificials never re-enter the basis in either phase.
    if tab.optimize(false)?.is_none() {
        // Phase 1 objective is bounded below by 0; unbounded cannot happen.
        return Err(Overflow);
    }
    let mut phase1_obj = S::zero();
    for i in 0..tab.rows.len() {
        if tab.basis[i] >= tab.art_start {
            phase1_obj = phase1_obj.add(tab.rhs(i)).ok_or(Overflow)?;
        }
    }
    if phase1_obj.sign(&tab.tol) > 0 {
        return Ok(RawOutcome::Infeasible);
    }
    // Pivot remaining artificials out; drop rows that are redundant.
    let mut drop_rows: Vec<usize> = Vec::new();
    for i in 0..tab.rows.len() {
        if tab.basis[i] < tab.art_start {
            continue;
        }
        let mut pivoted = false;
        for j in 0..tab.art_start {
            if tab.rows[i][j].sign(&tab.tol) != 0 {
                tab.pivot(i, j)?;
                pivoted = true;
                break;
            }
        }
        if !pivoted {
            drop_rows.push(i);
        }
    }
    for &i in drop_rows.iter().rev() {
        tab.rows.remove(i);
        tab.basis.remove(i);
    }

    // Phase 2 reduced costs for the true objective.
    let mut cost: Vec<S> = prep
        .obj
        .iter()
        .map(|c| S::from_q(c).ok_or(Overflow))
        .collect::<R<Vec<S>>>()?;
    cost.resize(tab.cols, S::zero());
    for i in 0..tab.rows.len() {
        let b = tab.basis[i];
        let cb = cost[b].clone();
        if cb.sign(&tab.tol) != 0 {
            for j in 0..tab.cols {
                if tab.rows[i][j].sign(&tab.tol) != 0 {
                    cost[j] = cost[j]
                        .sub(&cb.mul(&tab.rows[i][j]).ok_or(Overflow)?)
                        .ok_or(Overflow)?;
                }
            }
        }
    }
    // Basic columns must read exactly zero after the sweep.
    for i in 0..tab.rows.len() {
        cost[tab.basis[i]] = S::zero();
    }
    tab.cost = cost;
    tab.bland = false;
    tab.stall = 0;
    match tab.optimize(false)? {
        None => Ok(RawOutcome::Unbounded),
        Some(()) => {
            let mut x = vec![<Q as Zero>::zero(); n];
            for i in 0..tab.rows.len() {
                if tab.basis[i] < n {
                    x[tab.basis[i]] = tab.rhs(i).to_q();
                }
            }
            Ok(RawOutcome::Optimal(x))
        }
    }
}

fn finish(p: &LPProblem, prep: &Prepared, raw: RawOutcome) -> LPSolution {
    match raw {
        RawOutcome::Infeasible => LPSolution {
            status: LpStatus::Infeasible,
            objective: <Q as Zero>::zero(),
            values: BTreeMap::new(),
        },
        RawOutcome::Unbounded => LPSolution {
            status: LpStatus::Unbounded,
            objective: <Q as Zero>::zero(),
            values: BTreeMap::new(),
        },
        RawOutcome::Optimal(x) => {
            let mut obj = <Q as Zero>::zero();
            for (v, c) in &p.objective {
                obj += c * &x[*v];
            }
            let values: BTreeMap<String, Q> = p
                .var_names
                .iter()
                .cloned()
                .zip(x.iter().cloned())
                .collect();
            let _ = prep;
            LPSolution { status: LpStatus::Optimal, objective: obj, values }
        }
    }
}

/// Solve in exact rational arithmetic.
pub fn solve(p: &LPProblem) -> Result<LPSolution> {
    let prep = prepare(p);
    match run::<Ratio<i128>>(&prep, <Ratio<i128> as Zero>::zero()) {
        Ok(raw) => Ok(finish(p, &prep, raw)),
        Err(Overflow) => match run::<BigRational>(&prep, <BigRational as Zero>::zero()) {
            Ok(raw) => Ok(finish(p, &prep, raw)),
            Err(Overflow) => Err(Error::invariant(
                "simplex did not terminate in exact arithmetic",
            )),
        },
    }
}

/// Solve in floating point with tolerance `eps`; values are reported as the
/// exact rationals of the computed doubles.
pub fn solve_float(p: &LPProblem, eps: f64) -> Result<LPSolution> {
    if !(eps > 0.0) {
        return Err(Error::validation("float mode requires a positive epsilon"));
    }
    let prep = prepare(p);
    match run::<f64>(&prep, eps) {
        Ok(raw) => Ok(finish(p, &prep, raw)),
        Err(Overflow) => Err(Error::invariant("float simplex exceeded its iteration cap")),
    }
}
