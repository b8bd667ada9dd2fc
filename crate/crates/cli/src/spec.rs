//! Text grammars for test functions and norms.

use std::path::Path;

use smld_core::analysis::{NormKind, NormSpec};
use smld_core::operator::{SampledFunction, TestFunction};

use crate::error::CliError;

fn number(text: &str, what: &str) -> Result<f64, CliError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{what}: cannot parse {text:?} as a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{what}: must be finite, got {text}")));
    }
    Ok(v)
}

fn numbers(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|s| number(s, what)).collect()
}

/// Parses `monomial:r`, `poly:c0,c1,...`, `exp:c`, `abs:c`, `sqrt`,
/// `sin:c`, `file:<path>`, `const1` or `const:c`.
pub fn parse_function(text: &str) -> Result<TestFunction, CliError> {
    let (head, arg) = match text.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (text, None),
    };
    let need = || {
        arg.filter(|s| !s.is_empty())
            .ok_or_else(|| CliError::usage(format!("function {head:?} needs an argument, e.g. {head}:1")))
    };
    let none = |a: Option<&str>| match a {
        None => Ok(()),
        Some(_) => Err(CliError::usage(format!("function {head:?} takes no argument"))),
    };
    let f = match head {
        "monomial" => {
            let a = need()?;
            let r: u32 = a
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("monomial: order must be a nonnegative integer, got {a:?}")))?;
            TestFunction::monomial(r)
        }
        "poly" => TestFunction::polynomial(numbers(need()?, "poly")?),
        "exp" => TestFunction::exp(number(need()?, "exp")?),
        "abs" => TestFunction::abs_shift(number(need()?, "abs")?),
        "sin" => TestFunction::sin(number(need()?, "sin")?),
        "sqrt" => {
            none(arg)?;
            TestFunction::sqrt()
        }
        "const1" => {
            none(arg)?;
            TestFunction::constant(1.0)
        }
        "const" => TestFunction::constant(number(need()?, "const")?),
        "file" => TestFunction::sampled(SampledFunction::from_path(Path::new(need()?))?),
        other => {
            return Err(CliError::usage(format!(
                "unknown function {other:?}; expected monomial:r, poly:c0,c1,..., exp:c, abs:c, sqrt, sin:c, const1, const:c or file:<path>"
            )))
        }
    };
    Ok(f)
}

/// Parses `sup:a`, `phi:x_max`, `lp:p,R` or `wlp:p,gamma,R_max`.
pub fn parse_norm(text: &str, grid_points: usize) -> Result<NormSpec, CliError> {
    let (head, arg) = text
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("norm {text:?}: expected kind:arguments, e.g. sup:2")))?;
    let vals = numbers(arg, head)?;
    let arity = |k: usize| {
        if vals.len() == k {
            Ok(())
        } else {
            Err(CliError::usage(format!("norm {head}: expected {k} argument(s), got {}", vals.len())))
        }
    };
    let kind = match head {
        "sup" => {
            arity(1)?;
            NormKind::SupCompact { a: vals[0] }
        }
        "phi" => {
            arity(1)?;
            NormKind::WeightedPhi { x_max: vals[0] }
        }
        "lp" => {
            arity(2)?;
            NormKind::Lp { p: vals[0], r: vals[1] }
        }
        "wlp" => {
            arity(3)?;
            NormKind::WeightedLp { p: vals[0], gamma: vals[1], r_max: vals[2] }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown norm {other:?}; expected sup:a, phi:x_max, lp:p,R or wlp:p,gamma,R_max"
            )))
        }
    };
    Ok(NormSpec::new(kind, grid_points)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use smld_core::operator::FunctionKind;

    #[test]
    fn catalog_round_trips_through_display() {
        for s in ["monomial:3", "poly:1,-2,0.5", "exp:-1", "abs:1", "sqrt", "sin:2"] {
            assert_eq!(parse_function(s).unwrap().to_string(), s);
        }
        assert_eq!(parse_function("const1").unwrap().kind, FunctionKind::Polynomial(vec![1.0]));
        assert_eq!(parse_function("const:2.5").unwrap().kind, FunctionKind::Polynomial(vec![2.5]));
    }

    #[test]
    fn malformed_functions_are_usage_errors() {
        for s in ["monomial", "monomial:-1", "poly:", "exp:x", "sqrt:1", "cosh:1", "exp:inf", "file:/no/such/file"] {
            let e = parse_function(s).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{s}");
        }
    }

    #[test]
    fn norms() {
        assert_eq!(parse_norm("sup:2", 11).unwrap().kind, NormKind::SupCompact { a: 2.0 });
        assert_eq!(
            parse_norm("wlp:2,1,20", 11).unwrap().kind,
            NormKind::WeightedLp { p: 2.0, gamma: 1.0, r_max: 20.0 }
        );
        for s in ["sup", "sup:1,2", "lp:0.5,2", "phi:-1", "max:1"] {
            assert!(parse_norm(s, 11).is_err(), "{s}");
        }
    }
}
