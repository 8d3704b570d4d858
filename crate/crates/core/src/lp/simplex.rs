//! Dense-tableau primal simplex over exact rationals.
//!
//! Variables carry a lower bound of zero and an optional upper bound;
//! nonbasic variables sit at one of their bounds. Entering and leaving
//! variables are chosen by Bland's rule (smallest column index), which
//! prevents cycling and makes every solve deterministic.

use crate::error::LpError;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
}

/// `Σ coeff·x  (≥ | ≤)  rhs`, with sparse coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Row {
    pub fn ge(coeffs: Vec<(usize, Rational)>, rhs: impl Into<Rational>) -> Row {
        Row {
            coeffs,
            sense: Sense::Ge,
            rhs: rhs.into(),
        }
    }

    pub fn le(coeffs: Vec<(usize, Rational)>, rhs: impl Into<Rational>) -> Row {
        Row {
            coeffs,
            sense: Sense::Le,
            rhs: rhs.into(),
        }
    }

    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let act = self.activity(x);
        match self.sense {
            Sense::Ge => act >= self.rhs,
            Sense::Le => act <= self.rhs,
        }
    }
}

/// `min objective·x` subject to `rows` and `0 ≤ x_j ≤ upper_j`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    /// `None` is an unbounded variable.
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    /// Box-constrained program: every variable in `[0, 1]`.
    pub fn unit_box(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            upper: vec![Some(Rational::one()); n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let count = self.num_vars();
        for row in &self.rows {
            if let Some((var, _)) = row.coeffs.iter().find(|(j, _)| *j >= count) {
                return Err(LpError::BadRow { var: *var, count });
            }
        }
        Ok(())
    }
}

/// An optimal basic feasible solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
    /// Rows whose slack is nonbasic: these, together with the structural
    /// variables held at a bound, determine `values` uniquely.
    pub defining_rows: Vec<usize>,
    /// Structural variables that are nonbasic (held at 0 or at their upper bound).
    pub at_bound: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic(usize),
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Structural(usize),
    Slack(usize),
    Artificial,
}

#[derive(Clone, Debug)]
struct Column {
    kind: Kind,
    upper: Option<Rational>,
    status: Status,
}

const PIVOT_LIMIT: usize = 200_000;

/// Simplex tableau `B⁻¹A` with the current values of the basic variables.
#[derive(Clone, Debug)]
pub struct Tableau {
    a: Vec<Vec<Rational>>,
    beta: Vec<Rational>,
    basis: Vec<usize>,
    cols: Vec<Column>,
    objective: Vec<Rational>,
    rows: Vec<Row>,
    pivots: usize,
}

impl Tableau {
    /// Set up the initial slack/artificial basis and solve.
    pub fn solve(lp: &LinearProgram) -> Result<Tableau, LpError> {
        lp.validate()?;
        let n = lp.num_vars();
        let mut t = Tableau {
            a: Vec::new(),
            beta: Vec::new(),
            basis: Vec::new(),
            cols: (0..n)
                .map(|j| Column {
                    kind: Kind::Structural(j),
                    upper: lp.upper[j].clone(),
                    status: Status::Lower,
                })
                .collect(),
            objective: lp.objective.clone(),
            rows: Vec::new(),
            pivots: 0,
        };
        for row in &lp.rows {
            t.append_row(row.clone());
        }
        t.optimize_all()?;
        Ok(t)
    }

    /// Add a constraint to a solved tableau and re-optimize from the current
    /// basis. The new row starts with its own slack or artificial basic.
    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = Row>) -> Result<(), LpError> {
        for row in rows {
            if let Some((var, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.objective.len()) {
                return Err(LpError::BadRow {
                    var: *var,
                    count: self.objective.len(),
                });
            }
            self.append_row(row);
        }
        self.optimize_all()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn pivot_count(&self) -> usize {
        self.pivots
    }

    fn value_of(&self, j: usize) -> Rational {
        match self.cols[j].status {
            Status::Basic(r) => self.beta[r].clone(),
            Status::Lower => Rational::zero(),
            Status::Upper => self.cols[j]
                .upper
                .clone()
                .expect("upper status needs a bound"),
        }
    }

    fn structural_values(&self) -> Vec<Rational> {
        (0..self.objective.len())
            .map(|j| self.value_of(j))
            .collect()
    }

    fn append_row(&mut self, row: Row) {
        let width = self.cols.len();
        let x = self.structural_values();
        let activity = row.activity(&x);
        let mut r = vec![Rational::zero(); width];
        for (j, c) in &row.coeffs {
            r[*j] += c;
        }
        // express in the current basis
        for (i, &bj) in self.basis.iter().enumerate() {
            if let Kind::Structural(_) = self.cols[bj].kind {
                if !r[bj].is_zero() {
                    let f = r[bj].clone();
                    for (k, v) in self.a[i].iter().enumerate() {
                        if !v.is_zero() {
                            r[k] = r[k].sub_mul(&f, v);
                        }
                    }
                }
            }
        }
        let row_idx = self.rows.len();
        let slack_sign = match row.sense {
            Sense::Ge => Rational::from_int(-1),
            Sense::Le => Rational::one(),
        };
        // slack value if it were basic: Ge => act - b, Le => b - act
        let slack_value = match row.sense {
            Sense::Ge => &activity - &row.rhs,
            Sense::Le => &row.rhs - &activity,
        };
        for existing in &mut self.a {
            existing.push(Rational::zero());
        }
        r.push(slack_sign.clone());
        self.cols.push(Column {
            kind: Kind::Slack(row_idx),
            upper: None,
            status: Status::Lower,
        });
        let slack_col = self.cols.len() - 1;
        let tr = self.a.len();
        if !slack_value.is_negative() {
            if slack_sign.is_negative() {
                r.iter_mut().for_each(|v| *v = -&*v);
            }
            self.cols[slack_col].status = Status::Basic(tr);
            self.basis.push(slack_col);
            self.beta.push(slack_value);
        } else {
            // artificial with coefficient +1 after sign normalization:
            // row·x + art = rhs' where art = -slack_value > 0
            for existing in &mut self.a {
                existing.push(Rational::zero());
            }
            if row.sense == Sense::Le {
                r.iter_mut().for_each(|v| *v = -&*v);
            }
            r.push(Rational::one());
            self.cols.push(Column {
                kind: Kind::Artificial,
                upper: None,
                status: Status::Basic(tr),
            });
            self.basis.push(self.cols.len() - 1);
            self.beta.push(-slack_value);
        }
        self.a.push(r);
        self.rows.push(row);
    }

    fn has_artificials(&self) -> bool {
        self.cols.iter().any(|c| c.kind == Kind::Artificial)
    }

    fn optimize_all(&mut self) -> Result<(), LpError> {
        if self.has_artificials() {
            let cost: Vec<Rational> = self
                .cols
                .iter()
                .map(|c| {
                    if c.kind == Kind::Artificial {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            self.optimize(&cost)?;
            let infeasibility: Rational = self
                .cols
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kind == Kind::Artificial)
                .map(|(j, _)| self.value_of(j))
                .sum();
            if infeasibility.is_positive() {
                return Err(LpError::Infeasible);
            }
            self.drive_out_artificials();
            self.remove_artificials();
        }
        let cost: Vec<Rational> = self
            .cols
            .iter()
            .map(|c| match c.kind {
                Kind::Structural(j) => self.objective[j].clone(),
                _ => Rational::zero(),
            })
            .collect();
        self.optimize(&cost)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.basis.len() {
            if self.cols[self.basis[r]].kind != Kind::Artificial {
                continue;
            }
            debug_assert!(self.beta[r].is_zero());
            // [A | ±I] has full row rank, so a non-artificial nonzero exists.
            let entering = (0..self.cols.len())
                .find(|&k| {
                    self.cols[k].kind != Kind::Artificial
                        && !matches!(self.cols[k].status, Status::Basic(_))
                        && !self.a[r][k].is_zero()
                })
                .expect("tableau row of an artificial has a non-artificial entry");
            let value = self.value_of(entering);
            let leaving = self.basis[r];
            self.cols[leaving].status = Status::Lower;
            self.cols[entering].status = Status::Basic(r);
            self.basis[r] = entering;
            self.beta[r] = value;
            self.pivot(r, entering, None);
        }
    }

    fn remove_artificials(&mut self) {
        let keep: Vec<bool> = self
            .cols
            .iter()
            .map(|c| c.kind != Kind::Artificial)
            .collect();
        let mut remap = vec![usize::MAX; self.cols.len()];
        let mut next = 0;
        for (j, k) in keep.iter().enumerate() {
            if *k {
                remap[j] = next;
                next += 1;
            }
        }
        for row in &mut self.a {
            let mut idx = 0;
            row.retain(|_| {
                let k = keep[idx];
                idx += 1;
                k
            });
        }
        let mut idx = 0;
        self.cols.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
        for b in &mut self.basis {
            *b = remap[*b];
        }
    }

    /// Run primal simplex iterations for `cost` (one entry per column) until
    /// no improving column remains.
    fn optimize(&mut self, cost: &[Rational]) -> Result<(), LpError> {
        let width = self.cols.len();
        let mut d: Vec<Rational> = cost.to_vec();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = &cost[bj];
            if cb.is_zero() {
                continue;
            }
            for (dk, a) in d.iter_mut().zip(&self.a[i]) {
                if !a.is_zero() {
                    *dk = dk.sub_mul(cb, a);
                }
            }
        }

        loop {
            if self.pivots >= PIVOT_LIMIT {
                return Err(LpError::PivotLimit(PIVOT_LIMIT));
            }
            let entering = (0..width).find(|&j| match self.cols[j].status {
                Status::Basic(_) => false,
                Status::Lower => d[j].is_negative(),
                Status::Upper => d[j].is_positive(),
            });
            let Some(j) = entering else {
                return Ok(());
            };
            let increasing = self.cols[j].status == Status::Lower;

            // ratio test; ties broken by the smallest leaving column index
            let mut best: Option<(Rational, usize, Status)> = None;
            for (i, row) in self.a.iter().enumerate() {
                let aij = &row[j];
                if aij.is_zero() {
                    continue;
                }
                let alpha = if increasing { aij.clone() } else { -aij };
                let bcol = self.basis[i];
                let (limit, to) = if alpha.is_positive() {
                    (&self.beta[i] / &alpha, Status::Lower)
                } else {
                    match &self.cols[bcol].upper {
                        Some(u) => ((u - &self.beta[i]) / (-&alpha), Status::Upper),
                        None => continue,
                    }
                };
                let better = match &best {
                    None => true,
                    Some((bl, bi, _)) => limit < *bl || (limit == *bl && bcol < self.basis[*bi]),
                };
                if better {
                    best = Some((limit, i, to));
                }
            }
            let own = self.cols[j].upper.clone();
            let flip = match (&best, &own) {
                (None, None) => return Err(LpError::Unbounded),
                (None, Some(_)) => true,
                (Some((bl, _, _)), Some(u)) => u < bl,
                (Some(_), None) => false,
            };
            let step = if flip {
                own.clone().unwrap()
            } else {
                best.as_ref().unwrap().0.clone()
            };

            if !step.is_zero() {
                for i in 0..self.beta.len() {
                    let aij = &self.a[i][j];
                    if aij.is_zero() {
                        continue;
                    }
                    let delta = aij * &step;
                    if increasing {
                        self.beta[i] -= &delta;
                    } else {
                        self.beta[i] += &delta;
                    }
                }
            }

            if flip {
                self.cols[j].status = if increasing {
                    Status::Upper
                } else {
                    Status::Lower
                };
                continue;
            }

            let (_, r, to) = best.unwrap();
            let entering_value = if increasing {
                step
            } else {
                self.cols[j].upper.as_ref().unwrap() - &step
            };
            let leaving = self.basis[r];
            self.cols[leaving].status = to;
            self.cols[j].status = Status::Basic(r);
            self.basis[r] = j;
            self.beta[r] = entering_value;
            self.pivot(r, j, Some(&mut d));
            self.pivots += 1;
        }
    }

    fn pivot(&mut self, r: usize, j: usize, d: Option<&mut Vec<Rational>>) {
        let piv = self.a[r][j].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let pivot_row = self.a[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&k| !pivot_row[k].is_zero())
            .collect();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for &k in &nz {
                row[k] = row[k].sub_mul(&f, &pivot_row[k]);
            }
        }
        if let Some(d) = d {
            if !d[j].is_zero() {
                let f = d[j].clone();
                for &k in &nz {
                    d[k] = d[k].sub_mul(&f, &pivot_row[k]);
                }
            }
        }
    }

    pub fn solution(&self) -> BasicSolution {
        let values = self.structural_values();
        let objective = values.iter().zip(&self.objective).map(|(x, c)| x * c).sum();
        let mut defining_rows = Vec::new();
        let mut at_bound = Vec::new();
        for c in &self.cols {
            let nonbasic = !matches!(c.status, Status::Basic(_));
            match c.kind {
                Kind::Slack(i) if nonbasic => defining_rows.push(i),
                Kind::Structural(j) if nonbasic => at_bound.push(j),
                _ => {}
            }
        }
        BasicSolution {
            values,
            objective,
            defining_rows,
            at_bound,
        }
    }
}

/// Solve `lp` from scratch.
pub fn simplex_solve(lp: &LinearProgram) -> Result<BasicSolution, LpError> {
    Ok(Tableau::solve(lp)?.solution())
}

/// Rank of a dense rational matrix by fraction-exact Gaussian elimination.
pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        let pivot_row: Vec<Rational> = m[rank].iter().map(|v| v * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for k in c..cols {
                    if !pivot_row[k].is_zero() {
                        row[k] = row[k].sub_mul(&f, &pivot_row[k]);
                    }
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// True iff the defining rows plus the bound constraints of `sol` form a
/// nonsingular system, i.e. `sol` is a vertex of `lp`'s polytope.
pub fn is_vertex(lp: &LinearProgram, sol: &BasicSolution) -> bool {
    let n = lp.num_vars();
    let mut system: Vec<Vec<Rational>> = Vec::new();
    for &i in &sol.defining_rows {
        let mut r = vec![Rational::zero(); n];
        for (j, c) in &lp.rows[i].coeffs {
            r[*j] += c;
        }
        system.push(r);
    }
    for &j in &sol.at_bound {
        let mut r = vec![Rational::zero(); n];
        r[j] = Rational::one();
        system.push(r);
    }
    if system.len() < n {
        return false;
    }
    let tight = sol
        .defining_rows
        .iter()
        .all(|&i| lp.rows[i].activity(&sol.values) == lp.rows[i].rhs);
    tight && rank(system) == n
}
