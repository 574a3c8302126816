//! p-independence over F^p via the Jacobian criterion.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{rank, Matrix};

fn check(elts: &[FieldElement]) -> Result<()> {
    if let Some(first) = elts.first() {
        for e in elts {
            if e.ctx() != first.ctx() {
                return Err(Error::ContextMismatch);
            }
        }
    }
    Ok(())
}

pub fn jacobian(elts: &[FieldElement]) -> Result<Matrix> {
    elts.iter()
        .map(|e| (0..e.ctx().nvars()).map(|j| e.partial(j)).collect())
        .collect()
}

/// Whether `[F^p(elts) : F^p] = p^len`.
pub fn p_independent(elts: &[FieldElement]) -> Result<bool> {
    check(elts)?;
    if elts.iter().any(|e| e.is_zero()) {
        return Err(Error::ZeroElement);
    }
    if elts.is_empty() {
        return Ok(true);
    }
    if elts.len() > elts[0].ctx().nvars() {
        return Ok(false);
    }
    Ok(rank(&jacobian(elts)?)? == elts.len())
}

/// Greedy p-independent subset, in input order.
pub fn independent_subset(elts: &[FieldElement]) -> Result<Vec<FieldElement>> {
    check(elts)?;
    let mut chosen: Vec<FieldElement> = Vec::new();
    for e in elts {
        if e.is_zero() {
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(e.clone());
        if p_independent(&trial)? {
            chosen = trial;
        }
    }
    Ok(chosen)
}

/// Whether `a` lies in F^p(gens).
pub fn in_p_subfield(a: &FieldElement, gens: &[FieldElement]) -> Result<bool> {
    check(gens)?;
    if let Some(g) = gens.first() {
        if g.ctx() != a.ctx() {
            return Err(Error::ContextMismatch);
        }
    }
    if a.is_zero() {
        return Ok(true);
    }
    let mut basis = independent_subset(gens)?;
    basis.push(a.clone());
    Ok(!p_independent(&basis)?)
}

/// Completes `elts` to a p-basis of F by prepending variables in declared order.
pub fn extend_to_pbasis(elts: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if elts.is_empty() {
        return Err(Error::NotPIndependent);
    }
    if !p_independent(elts)? {
        return Err(Error::NotPIndependent);
    }
    let ctx = elts[0].ctx().clone();
    let mut head: Vec<FieldElement> = Vec::new();
    for x in ctx.gens() {
        if head.len() + elts.len() == ctx.nvars() {
            break;
        }
        let mut trial = head.clone();
        trial.push(x.clone());
        trial.extend(elts.iter().cloned());
        if p_independent(&trial)? {
            head.push(x);
        }
    }
    head.extend(elts.iter().cloned());
    Ok(head)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;

    #[test]
    fn independence_examples() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let x = c.gen(0);
        let y = c.gen(1);
        assert!(p_independent(&[x.clone(), y.clone()]).unwrap());
        let x2y2 = x.mul(&y).unwrap().pow(2).unwrap();
        assert!(!p_independent(&[x.clone(), x2y2]).unwrap());
        let x2y = x.pow(2).unwrap().mul(&y).unwrap();
        assert!(p_independent(&[x2y, x.clone()]).unwrap());
        assert_eq!(p_independent(&[c.zero()]), Err(Error::ZeroElement));
    }

    #[test]
    fn subfield_examples() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let x = c.gen(0);
        let y = c.gen(1);
        let s = x.pow(2).unwrap().add(&y.pow(2).unwrap()).unwrap();
        assert!(in_p_subfield(&s, &[x.clone()]).unwrap());
        assert!(!in_p_subfield(&y, &[x.clone()]).unwrap());
        let xy2 = x.mul(&y.pow(2).unwrap()).unwrap();
        assert!(in_p_subfield(&xy2, &[x.clone()]).unwrap());
    }

    #[test]
    fn completion_examples() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let x = c.gen(0);
        let y = c.gen(1);
        assert_eq!(extend_to_pbasis(&[y.clone()]).unwrap(), vec![x.clone(), y.clone()]);
        assert_eq!(extend_to_pbasis(&[x.clone(), y.clone()]).unwrap(), vec![x.clone(), y.clone()]);
        let s = x.add(&y).unwrap();
        assert_eq!(extend_to_pbasis(&[s.clone()]).unwrap(), vec![x.clone(), s]);
        let x2 = x.pow(2).unwrap();
        assert_eq!(extend_to_pbasis(&[x2]), Err(Error::NotPIndependent));
    }
}
