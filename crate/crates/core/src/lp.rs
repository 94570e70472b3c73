//! Exact two-phase simplex over the rationals with Bland's anti-cycling rule.
//!
//! Problems here have at most a few dozen variables, so the tableau is dense
//! and reduced costs are recomputed from scratch at every pivot.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bounds {
    pub lower: Option<Scalar>,
    pub upper: Option<Scalar>,
}

impl Bounds {
    pub fn nonnegative() -> Bounds {
        Bounds {
            lower: Some(Scalar::zero()),
            upper: None,
        }
    }

    pub fn free() -> Bounds {
        Bounds::default()
    }
}

/// `optimize objective . x` subject to linear constraints and variable bounds.
///
/// Variables default to `x >= 0`; use [`LinearProgram::set_bounds`] to change.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Scalar>,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Scalar, point: Vec<Scalar> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Scalar, Vec<Scalar>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Scalar>) -> LinearProgram {
        let n = objective.len();
        LinearProgram {
            objective,
            sense,
            constraints: Vec::new(),
            bounds: vec![Bounds::nonnegative(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    /// True when `point` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, point: &[Scalar]) -> bool {
        if point.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self.bounds.iter().zip(point).all(|(b, x)| {
            b.lower.as_ref().is_none_or(|l| x >= l) && b.upper.as_ref().is_none_or(|u| x <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Scalar = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_value(&self, point: &[Scalar]) -> Scalar {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

/// How an original variable is expressed through nonnegative columns.
struct VarMap {
    offset: Scalar,
    terms: Vec<(usize, Scalar)>,
}

pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    let n = lp.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(Vec<(usize, Scalar)>, Scalar)> = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                maps.push(VarMap {
                    offset: l.clone(),
                    terms: vec![(ncols, Scalar::one())],
                });
                if let Some(u) = upper {
                    if u < l {
                        return LpOutcome::Infeasible;
                    }
                    extra_rows.push((vec![(ncols, Scalar::one())], u - l));
                }
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap {
                    offset: u.clone(),
                    terms: vec![(ncols, -Scalar::one())],
                });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap {
                    offset: Scalar::zero(),
                    terms: vec![(ncols, Scalar::one()), (ncols + 1, -Scalar::one())],
                });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    // Rows over structural columns, rhs >= 0 after normalization.
    let mut rows: Vec<(Vec<Scalar>, Relation, Scalar)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Scalar::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            rhs -= a * &maps[j].offset;
            for (col, sign) in &maps[j].terms {
                coeffs[*col] += a * sign;
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (terms, rhs) in extra_rows {
        let mut coeffs = vec![Scalar::zero(); structural];
        for (col, sign) in terms {
            coeffs[col] = sign;
        }
        rows.push((coeffs, Relation::Le, rhs));
    }
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            for a in coeffs.iter_mut() {
                *a = -&*a;
            }
            *rhs = -&*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let total = structural + slack_count + art_count;
    let art_start = structural + slack_count;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width: total,
    };
    let (mut slack, mut art) = (structural, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(total + 1, Scalar::zero());
        row[total] = rhs;
        match rel {
            Relation::Le => {
                row[slack] = Scalar::one();
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Scalar::one();
                slack += 1;
                row[art] = Scalar::one();
                tab.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                row[art] = Scalar::one();
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    if art_count > 0 {
        let mut cost = vec![Scalar::zero(); total];
        for c in cost.iter_mut().skip(art_start) {
            *c = Scalar::one();
        }
        match tab.minimize(&cost, total) {
            Phase::Optimal => {}
            Phase::Unbounded => unreachable!("phase one is bounded below by zero"),
        }
        if tab.objective(&cost).is_positive() {
            return LpOutcome::Infeasible;
        }
        tab.drive_out_artificials(art_start);
    }

    let mut cost = vec![Scalar::zero(); total];
    for (j, c) in lp.objective.iter().enumerate() {
        let c = match lp.sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c,
        };
        for (col, sign) in &maps[j].terms {
            cost[*col] += &c * sign;
        }
    }
    if let Phase::Unbounded = tab.minimize(&cost, art_start) {
        return LpOutcome::Unbounded;
    }

    let mut col_values = vec![Scalar::zero(); total];
    for (i, &b) in tab.basis.iter().enumerate() {
        col_values[b] = tab.rows[i][total].clone();
    }
    let point: Vec<Scalar> = maps
        .iter()
        .map(|vm| {
            vm.terms
                .iter()
                .fold(vm.offset.clone(), |acc, (col, sign)| acc + &col_values[*col] * sign)
        })
        .collect();
    LpOutcome::Optimal {
        value: lp.objective_value(&point),
        point,
    }
}

enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn objective(&self, cost: &[Scalar]) -> Scalar {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| &cost[b] * &self.rows[i][self.width])
            .sum()
    }

    fn reduced_cost(&self, cost: &[Scalar], j: usize) -> Scalar {
        let mut r = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                r -= &cost[b] * &self.rows[i][j];
            }
        }
        r
    }

    /// Minimizes `cost` using only columns `< allowed` as entering candidates.
    fn minimize(&mut self, cost: &[Scalar], allowed: usize) -> Phase {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_negative());
            let Some(j) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.width] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[pr].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pr || row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// After a feasible phase one, pivots zero-valued artificials out of the
    /// basis and drops rows that turn out to be redundant.
    fn drive_out_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            match (0..art_start).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
        // Artificial columns are never allowed to re-enter; zero them so they
        // cannot affect reduced costs either.
        for row in self.rows.iter_mut() {
            for v in row[art_start..self.width].iter_mut() {
                *v = Scalar::zero();
            }
        }
    }
}
