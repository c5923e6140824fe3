use thiserror::Error;

use super::{Formula, Quantifier, Span, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("unbound variable `{name}` at {}", span.start)]
    Unbound { name: String, span: Span },
    #[error("unknown predicate `{name}` at {}", span.start)]
    UnknownPredicate { name: String, span: Span },
    #[error("counting quantifier at {} leaves {free:?} free; its binder must close the subformula", span.start)]
    FragmentViolation { free: Vec<String>, span: Span },
    #[error("modulo bounds must satisfy 0 <= t < k, got t={t}, k={k}")]
    BadModulus { t: u64, k: u64, span: Span },
    #[error("variable `{name}` bound twice in one binder")]
    DuplicateBinder { name: String, span: Span },
}

/// Checks scoping, predicate registration, modulo bounds and the fragment
/// rule (every counting quantifier binds all free variables of its scope).
///
/// `free` lists the variables that may occur free.
pub fn validate(
    f: &Formula,
    free: &[&str],
    known_predicate: impl Fn(&str) -> bool,
) -> Result<(), Vec<ValidationError>> {
    let mut errors = Vec::new();
    let mut scope: Vec<&str> = free.to_vec();
    walk(f, &mut scope, &known_predicate, &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_var(v: &Var, scope: &[&str], errors: &mut Vec<ValidationError>) {
    if !scope.contains(&v.name.as_str()) {
        errors.push(ValidationError::Unbound {
            name: v.name.clone(),
            span: v.span,
        });
    }
}

fn check_binder(vs: &[Var], errors: &mut Vec<ValidationError>) {
    for (i, v) in vs.iter().enumerate() {
        if vs[..i].iter().any(|w| w.name == v.name) {
            errors.push(ValidationError::DuplicateBinder {
                name: v.name.clone(),
                span: v.span,
            });
        }
    }
}

fn closed_under(vs: &[Var], bodies: &[&Formula], span: Span, errors: &mut Vec<ValidationError>) {
    let mut free: Vec<String> = bodies
        .iter()
        .flat_map(|b| b.free_vars())
        .filter(|n| !vs.iter().any(|v| &v.name == n))
        .collect();
    free.sort();
    free.dedup();
    if !free.is_empty() {
        errors.push(ValidationError::FragmentViolation { free, span });
    }
}

fn walk<'a>(
    f: &'a Formula,
    scope: &mut Vec<&'a str>,
    known: &impl Fn(&str) -> bool,
    errors: &mut Vec<ValidationError>,
) {
    match f {
        Formula::Const(..) => {}
        Formula::Rel(x, y) | Formula::Eq(x, y) => {
            check_var(x, scope, errors);
            check_var(y, scope, errors);
        }
        Formula::Pred(name, x, span) => {
            if !known(name) {
                errors.push(ValidationError::UnknownPredicate {
                    name: name.clone(),
                    span: *span,
                });
            }
            check_var(x, scope, errors);
        }
        Formula::Not(g, _) => walk(g, scope, known, errors),
        Formula::Binary(_, a, b, _) => {
            walk(a, scope, known, errors);
            walk(b, scope, known, errors);
        }
        Formula::Quant(q, vs, body, span) => {
            check_binder(vs, errors);
            if let Quantifier::ExistsMod { t, k } = *q {
                if t >= k {
                    errors.push(ValidationError::BadModulus { t, k, span: *span });
                }
            }
            if q.is_counting() {
                closed_under(vs, &[body], *span, errors);
            }
            let n = scope.len();
            scope.extend(vs.iter().map(|v| v.name.as_str()));
            walk(body, scope, known, errors);
            scope.truncate(n);
        }
        Formula::Haertig(vs, a, b, span) => {
            check_binder(vs, errors);
            closed_under(vs, &[a, b], *span, errors);
            let n = scope.len();
            scope.extend(vs.iter().map(|v| v.name.as_str()));
            walk(a, scope, known, errors);
            walk(b, scope, known, errors);
            scope.truncate(n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn check(s: &str) -> Result<(), Vec<ValidationError>> {
        validate(&parse_formula(s).unwrap(), &[], |p| p == "zero")
    }

    #[test]
    fn fragment_rule() {
        let errs = check("A y. Einf x. x->y").unwrap_err();
        assert!(matches!(&errs[..], [ValidationError::FragmentViolation { free, .. }] if free == &["y"]));
        assert!(check("Einf x. E y. (In[zero](y) & x->y)").is_ok());
        assert!(check("H y. (y->y ; In[zero](y))").is_ok());
        assert!(check("A x. H y. (y->x ; y=y)").is_err());
    }

    #[test]
    fn scoping_and_predicates() {
        assert!(matches!(
            &check("E x. x -> z").unwrap_err()[..],
            [ValidationError::Unbound { name, .. }] if name == "z"
        ));
        assert!(matches!(
            &check("E x. In[one](x)").unwrap_err()[..],
            [ValidationError::UnknownPredicate { .. }]
        ));
        assert!(validate(&parse_formula("x->y").unwrap(), &["x", "y"], |_| false).is_ok());
        assert!(matches!(
            &check("E (x,x). x=x").unwrap_err()[..],
            [ValidationError::DuplicateBinder { .. }]
        ));
    }

    #[test]
    fn modulus_bounds() {
        assert!(matches!(
            &check("Emod[2,2] x. x->x").unwrap_err()[..],
            [ValidationError::BadModulus { t: 2, k: 2, .. }]
        ));
        assert!(check("Emod[1,2] x. x->x").is_ok());
    }

    #[test]
    fn pure_first_order_is_unrestricted() {
        assert!(check("A x. E y. A z. E w. (x->y & z->w) | ~(E v. v->x & A u. u=v)").is_ok());
    }
}
