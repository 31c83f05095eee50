//! R((t)) / (Z((t)) + R[1/t]) computed one t-degree at a time.

use serde::{Deserialize, Serialize};

use crate::archimed::C0arObject;
use crate::finabel::FinAbGroup;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefQuotient {
    Trivial,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyDegree {
    pub degree: i64,
    pub quotient: C0arObject,
    pub descriptor: CoefQuotient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalogyReport {
    pub n: i64,
    pub degrees: Vec<AnalogyDegree>,
    /// trivial in degrees <= 0, a circle in degrees >= 1
    pub pattern_ok: bool,
    /// every circle factor has Pontryagin dual Z
    pub circle_dual_ok: bool,
}

/// R / (lattice of rank `r` + subspace of dim `v`) for a single real coordinate.
fn quotient_of_line(r: usize, v: usize) -> C0arObject {
    let t = FinAbGroup::trivial();
    match (r.min(1), v.min(1)) {
        (_, 1) => C0arObject::new(t, 0, 0, 0),
        (1, 0) => C0arObject::new(t, 0, 1, 0),
        _ => C0arObject::new(t, 0, 0, 1),
    }
}

pub fn arithmetic_analogy_series(n: i64) -> Result<AnalogyReport> {
    if n < 0 {
        return Err(Error::Invalid(format!("N = {n} < 0")));
    }
    let degrees: Vec<AnalogyDegree> = (-n..=n)
        .map(|d| {
            // Z((t)) meets degree d in Z; R[1/t] in R when d <= 0
            let quotient = quotient_of_line(1, usize::from(d <= 0));
            let descriptor = if quotient.p == 1 && quotient.dim() == 1 { CoefQuotient::Circle } else { CoefQuotient::Trivial };
            AnalogyDegree { degree: d, quotient, descriptor }
        })
        .collect();
    let pattern_ok = degrees.iter().all(|g| {
        let want = if g.degree >= 1 { CoefQuotient::Circle } else { CoefQuotient::Trivial };
        g.descriptor == want && (want == CoefQuotient::Circle || g.quotient.dim() + g.quotient.rank_pi0() == 0)
    });
    let z = C0arObject::new(FinAbGroup::trivial(), 1, 0, 0);
    let circle_dual_ok = degrees
        .iter()
        .filter(|g| g.descriptor == CoefQuotient::Circle)
        .all(|g| g.quotient.dual() == z && g.quotient.is_compact() && z.is_discrete());
    Ok(AnalogyReport { n, degrees, pattern_ok, circle_dual_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern() {
        let r = arithmetic_analogy_series(2).unwrap();
        let d: Vec<CoefQuotient> = r.degrees.iter().map(|g| g.descriptor).collect();
        use CoefQuotient::*;
        assert_eq!(d, vec![Trivial, Trivial, Trivial, Circle, Circle]);
        assert!(r.pattern_ok && r.circle_dual_ok);
        let r0 = arithmetic_analogy_series(0).unwrap();
        assert_eq!(r0.degrees.len(), 1);
        assert_eq!(r0.degrees[0].descriptor, Trivial);
        assert!(arithmetic_analogy_series(-1).is_err());
    }

    #[test]
    fn line_quotients() {
        assert_eq!(quotient_of_line(0, 0).q, 1);
        assert_eq!(quotient_of_line(1, 0).p, 1);
        assert_eq!(quotient_of_line(1, 1).dim(), 0);
    }
}
