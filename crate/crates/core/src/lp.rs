//! Exact two-phase simplex over rationals.
//!
//! Problems are `min cᵀx` subject to row constraints and `x ≥ 0`. Bland's
//! rule is used throughout, so the solver always terminates; speed is
//! secondary to exactness at the sizes used here.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }

    fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (a, v)| acc + a * v)
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// `min objective·x` subject to `constraints`, all variables nonnegative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    Width {
        row: usize,
        found: usize,
        expected: usize,
    },
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn with_objective(mut self, objective: Vec<Rational>) -> Self {
        self.objective = objective;
        self
    }

    pub fn push(&mut self, constraint: Constraint) {
        self.constraints.push(constraint);
    }

    fn check(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars {
            return Err(LpError::Width {
                row: usize::MAX,
                found: self.objective.len(),
                expected: self.num_vars,
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::Width {
                    row,
                    found: c.coeffs.len(),
                    expected: self.num_vars,
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    /// `Σ u_i A_i` and `Σ u_i b_i`.
    pub fn combine(&self, multipliers: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        let mut rhs = Rational::zero();
        for (u, c) in multipliers.iter().zip(&self.constraints) {
            if u.is_zero() {
                continue;
            }
            for (acc, a) in coeffs.iter_mut().zip(&c.coeffs) {
                *acc += u * a;
            }
            rhs += u * &c.rhs;
        }
        (coeffs, rhs)
    }

    fn multiplier_signs_ok(&self, y: &[Rational], le_sign_nonneg: bool) -> bool {
        y.len() == self.constraints.len()
            && y.iter().zip(&self.constraints).all(|(v, c)| match c.relation {
                Relation::Eq => true,
                Relation::Le => v.is_negative() != le_sign_nonneg || v.is_zero(),
                Relation::Ge => v.is_negative() == le_sign_nonneg || v.is_zero(),
            })
    }

    /// A Farkas certificate `u`: `uᵀA ≥ 0`, `uᵀb < 0`, `u ≥ 0` on `≤` rows,
    /// `u ≤ 0` on `≥` rows. Its existence proves infeasibility.
    pub fn verify_farkas(&self, u: &[Rational]) -> bool {
        if !self.multiplier_signs_ok(u, true) {
            return false;
        }
        let (coeffs, rhs) = self.combine(u);
        coeffs.iter().all(|a| !a.is_negative()) && rhs.is_negative()
    }

    /// Dual feasibility of `y` (`yᵀA ≤ c`, `y ≤ 0` on `≤` rows, `y ≥ 0` on
    /// `≥` rows) together with `yᵀb = cᵀx` proves `x` optimal.
    pub fn verify_optimal(&self, x: &[Rational], y: &[Rational]) -> bool {
        if !self.is_feasible_point(x) || !self.multiplier_signs_ok(y, false) {
            return false;
        }
        let (coeffs, rhs) = self.combine(y);
        coeffs.iter().zip(&self.objective).all(|(a, c)| a <= c) && rhs == self.objective_value(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// Row multipliers in the orientation of [`LinearProgram::verify_optimal`].
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    /// Constraint rows; the last entry of each row is its right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    /// Per row, a column that was the unit vector `e_i` in the initial
    /// tableau; its current column is `B⁻¹ e_i`.
    unit: Vec<usize>,
    /// `-1` where the row was negated to make its right-hand side
    /// nonnegative.
    sign: Vec<i8>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let mut sign = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for c in &lp.constraints {
            if c.rhs.is_negative() {
                sign.push(-1);
                relations.push(c.relation.flipped());
            } else {
                sign.push(1);
                relations.push(c.relation);
            }
        }
        let slacks = relations.iter().filter(|r| **r != Relation::Eq).count();
        let artificials = relations.iter().filter(|r| **r != Relation::Le).count();
        let width = lp.num_vars + slacks + artificials;
        let mut kinds = vec![Column::Original; lp.num_vars];
        kinds.extend(std::iter::repeat(Column::Slack).take(slacks));
        kinds.extend(std::iter::repeat(Column::Artificial).take(artificials));

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut unit = Vec::with_capacity(m);
        let mut next_slack = lp.num_vars;
        let mut next_artificial = lp.num_vars + slacks;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width + 1];
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = if sign[i] < 0 { -a } else { a.clone() };
            }
            row[width] = c.rhs.abs();
            match relations[i] {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    unit.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_artificial] = Rational::one();
                    basis.push(next_artificial);
                    unit.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = Rational::one();
                    basis.push(next_artificial);
                    unit.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            rows,
            cost: vec![Rational::zero(); width + 1],
            basis,
            kinds,
            unit,
            sign,
        }
    }

    /// Loads reduced costs for column costs `c` given the current basis.
    fn price(&mut self, c: &[Rational]) {
        let width = self.width();
        let mut cost: Vec<Rational> = c.to_vec();
        cost.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=width {
                if !row[j].is_zero() {
                    cost[j] -= cb * &row[j];
                }
            }
        }
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let width = self.width();
        let inv = self.rows[r][col].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..=width).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[col].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = col;
    }

    /// Runs Bland's rule on the loaded costs. Returns false if unbounded.
    fn optimize(&mut self, allow_artificial: bool) -> bool {
        let width = self.width();
        loop {
            let entering = (0..width).find(|&j| {
                (allow_artificial || self.kinds[j] != Column::Artificial)
                    && self.cost[j].is_negative()
            });
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[width] / &row[col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    /// `y_i = c_{unit_i} − d_{unit_i}`, mapped back through row negation.
    fn duals(&self, c: &[Rational]) -> Vec<Rational> {
        self.unit
            .iter()
            .zip(&self.sign)
            .map(|(&u, &s)| {
                let y = &c[u] - &self.cost[u];
                if s < 0 {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn basic_solution(&self, num_vars: usize) -> Vec<Rational> {
        let width = self.width();
        let mut x = vec![Rational::zero(); num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < num_vars {
                x[b] = row[width].clone();
            }
        }
        x
    }

    /// Pivots zero-level artificials out of the basis where possible. Rows
    /// where no pivot exists are linearly dependent and stay inert.
    fn expel_artificials(&mut self) {
        let width = self.width();
        for r in 0..self.rows.len() {
            if self.kinds[self.basis[r]] != Column::Artificial {
                continue;
            }
            if let Some(col) =
                (0..width).find(|&j| self.kinds[j] != Column::Artificial && !self.rows[r][j].is_zero())
            {
                self.pivot(r, col);
            }
        }
    }
}

/// Solves `lp` exactly.
///
/// # Panics
/// If a constraint or the objective has the wrong width.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    if let Err(e) = lp.check() {
        panic!("malformed linear program: {e}");
    }
    let mut tableau = Tableau::build(lp);
    let width = tableau.width();

    if tableau.kinds.contains(&Column::Artificial) {
        let phase_one: Vec<Rational> = tableau
            .kinds
            .iter()
            .map(|k| match k {
                Column::Artificial => Rational::one(),
                _ => Rational::zero(),
            })
            .collect();
        tableau.price(&phase_one);
        // Phase one is bounded below by zero.
        tableau.optimize(true);
        if tableau.cost[width].is_negative() {
            let y = tableau.duals(&phase_one);
            let farkas = y.into_iter().map(|v| -v).collect();
            return LpOutcome::Infeasible { farkas };
        }
        tableau.expel_artificials();
    }

    let mut phase_two = lp.objective.clone();
    phase_two.resize(width, Rational::zero());
    tableau.price(&phase_two);
    if !tableau.optimize(false) {
        return LpOutcome::Unbounded;
    }
    let x = tableau.basic_solution(lp.num_vars);
    let value = -tableau.cost[width].clone();
    let duals = tableau.duals(&phase_two);
    LpOutcome::Optimal(LpSolution { x, value, duals })
}

/// Feasibility only: solves with a zero objective.
pub fn find_feasible(lp: &LinearProgram) -> LpOutcome {
    let mut zero = lp.clone();
    zero.objective = vec![Rational::zero(); lp.num_vars];
    solve(&zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn row(coeffs: &[i64], relation: Relation, rhs: i64) -> Constraint {
        Constraint::new(coeffs.iter().map(|&c| int(c)).collect(), relation, int(rhs))
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18; optimum 36 at (2, 6).
        let mut lp = LinearProgram::new(2).with_objective(vec![int(-3), int(-5)]);
        lp.push(row(&[1, 0], Relation::Le, 4));
        lp.push(row(&[0, 2], Relation::Le, 12));
        lp.push(row(&[3, 2], Relation::Le, 18));
        let LpOutcome::Optimal(sol) = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(sol.x, vec![int(2), int(6)]);
        assert_eq!(sol.value, int(-36));
        assert!(lp.verify_optimal(&sol.x, &sol.duals));
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y s.t. x + y = 1, x ≥ 1/3.
        let mut lp = LinearProgram::new(2).with_objective(vec![int(1), int(2)]);
        lp.push(row(&[1, 1], Relation::Eq, 1));
        lp.push(Constraint::new(vec![int(1), int(0)], Relation::Ge, rat(1, 3)));
        let LpOutcome::Optimal(sol) = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(sol.x, vec![int(1), int(0)]);
        assert!(lp.verify_optimal(&sol.x, &sol.duals));
    }

    #[test]
    fn infeasible_gives_farkas() {
        let mut lp = LinearProgram::new(2);
        lp.push(row(&[1, 1], Relation::Le, 1));
        lp.push(row(&[1, 1], Relation::Ge, 2));
        let LpOutcome::Infeasible { farkas } = solve(&lp) else {
            panic!("expected infeasible");
        };
        assert!(lp.verify_farkas(&farkas));
    }

    #[test]
    fn negative_rhs_rows() {
        // -x ≤ -2 means x ≥ 2; x ≤ 1 contradicts it.
        let mut lp = LinearProgram::new(1);
        lp.push(row(&[-1], Relation::Le, -2));
        lp.push(row(&[1], Relation::Le, 1));
        let LpOutcome::Infeasible { farkas } = solve(&lp) else {
            panic!("expected infeasible");
        };
        assert!(lp.verify_farkas(&farkas));
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new(2).with_objective(vec![int(-1), int(0)]);
        lp.push(row(&[1, -1], Relation::Le, 1));
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2).with_objective(vec![int(1), int(1)]);
        lp.push(row(&[1, 1], Relation::Eq, 2));
        lp.push(row(&[2, 2], Relation::Eq, 4));
        lp.push(row(&[1, 0], Relation::Ge, 1));
        let LpOutcome::Optimal(sol) = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(sol.value, int(2));
        assert!(lp.verify_optimal(&sol.x, &sol.duals));
    }

    fn relation() -> impl Strategy<Value = Relation> {
        prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
    }

    prop_compose! {
        fn small_lp()(vars in 1usize..4, rows in 1usize..5)
            (objective in proptest::collection::vec(-3i64..4, vars),
             body in proptest::collection::vec(
                 (proptest::collection::vec(-3i64..4, vars), relation(), -4i64..5), rows),
             vars in Just(vars))
            -> LinearProgram
        {
            let mut lp = LinearProgram::new(vars)
                .with_objective(objective.into_iter().map(int).collect());
            for (coeffs, rel, rhs) in body {
                lp.push(Constraint::new(coeffs.into_iter().map(int).collect(), rel, int(rhs)));
            }
            // Keep every problem bounded so the optimum branch is exercised.
            lp.push(Constraint::new(vec![int(1); vars], Relation::Le, int(10)));
            lp
        }
    }

    proptest! {
        #[test]
        fn outcomes_carry_valid_certificates(lp in small_lp()) {
            match solve(&lp) {
                LpOutcome::Optimal(sol) => {
                    prop_assert!(lp.verify_optimal(&sol.x, &sol.duals));
                    prop_assert_eq!(lp.objective_value(&sol.x), sol.value);
                }
                LpOutcome::Infeasible { farkas } => prop_assert!(lp.verify_farkas(&farkas)),
                LpOutcome::Unbounded => prop_assert!(false, "bounded by construction"),
            }
        }
    }
}
