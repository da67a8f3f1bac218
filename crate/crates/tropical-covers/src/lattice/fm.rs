//! Fourier-Motzkin elimination over the rationals, with strict
//! inequalities tracked.  Small systems only: the cone dimensions in this
//! crate stay in single digits.

use super::linalg::Rat;
use num::{Signed, Zero};

/// `coeffs . y >= rhs`, strict when `strict` is set.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub strict: bool,
}

impl Constraint {
    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rhs, strict: false }
    }
    pub fn gt(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rhs, strict: true }
    }

    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let scale = lead.abs();
            for c in self.coeffs.iter_mut() {
                *c = &*c / &scale;
            }
            self.rhs = &self.rhs / &scale;
        }
        self
    }
}

/// Decides feasibility of the conjunction of constraints on `nvars`
/// variables.
pub fn feasible(constraints: Vec<Constraint>, nvars: usize) -> bool {
    let mut current = constraints;
    for var in 0..nvars {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for c in current {
            let a = &c.coeffs[var];
            if a.is_zero() {
                rest.push(c);
            } else if a.is_positive() {
                pos.push(c);
            } else {
                neg.push(c);
            }
        }
        // combine: from pos (y >= ...) and neg (y <= ...) eliminate var
        for p in &pos {
            for q in &neg {
                let ap = p.coeffs[var].clone();
                let aq = q.coeffs[var].clone();
                // p: ap*y + P.y' >= bp (ap>0)  =>  y >= (bp - P)/ap
                // q: aq*y + Q.y' >= bq (aq<0)  =>  y <= (bq - Q)/aq flips
                // combined: (bp - P)/ap <= (bq - Q)/aq-side ...
                // standard FM: aq<0: multiply p by (-aq), q by ap, add
                let mut coeffs = Vec::with_capacity(p.coeffs.len());
                for i in 0..p.coeffs.len() {
                    coeffs.push(&p.coeffs[i] * (-aq.clone()) + &q.coeffs[i] * ap.clone());
                }
                let rhs = &p.rhs * (-aq.clone()) + &q.rhs * ap.clone();
                debug_assert!(coeffs[var].is_zero());
                rest.push(Constraint { coeffs, rhs, strict: p.strict || q.strict });
            }
        }
        // dedupe normalized constraints to tame growth
        let mut seen = std::collections::BTreeSet::new();
        let mut next = Vec::new();
        for c in rest {
            let c = c.normalized();
            let key = format!(
                "{:?}|{}|{}",
                c.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                c.rhs,
                c.strict
            );
            if seen.insert(key) {
                next.push(c);
            }
        }
        current = next;
        let _ = var;
    }
    // all variables eliminated: constraints are 0 >= rhs (or strict)
    current.iter().all(|c| {
        debug_assert!(c.coeffs.iter().all(|x| x.is_zero()));
        if c.strict {
            c.rhs.is_negative()
        } else {
            !c.rhs.is_positive()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linalg::rat;

    #[test]
    fn strict_positive_orthant_meets_halfplane() {
        // x > 0, y > 0, x + y > 0: feasible
        let cs = vec![
            Constraint::gt(vec![rat(1), rat(0)], rat(0)),
            Constraint::gt(vec![rat(0), rat(1)], rat(0)),
            Constraint::gt(vec![rat(1), rat(1)], rat(0)),
        ];
        assert!(feasible(cs, 2));
    }

    #[test]
    fn contradictory_strict_pair() {
        // x > 0 and -x >= 0
        let cs = vec![
            Constraint::gt(vec![rat(1)], rat(0)),
            Constraint::ge(vec![rat(-1)], rat(0)),
        ];
        assert!(!feasible(cs, 1));
    }

    #[test]
    fn affine_window() {
        // 1 <= x <= 2 feasible; 3 <= x <= 2 infeasible
        let cs = vec![
            Constraint::ge(vec![rat(1)], rat(1)),
            Constraint::ge(vec![rat(-1)], rat(-2)),
        ];
        assert!(feasible(cs, 1));
        let cs = vec![
            Constraint::ge(vec![rat(1)], rat(3)),
            Constraint::ge(vec![rat(-1)], rat(-2)),
        ];
        assert!(!feasible(cs, 1));
    }
}
