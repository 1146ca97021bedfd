//! Named built-in test functions used by experiments and the CLI.
//!
//! A fixed registry keeps configs declarative without embedding an
//! expression language; the handful of functions the experiments need are
//! all here.

/// Univariate test function.
pub type Fn1 = fn(f64) -> f64;
/// Bivariate test function.
pub type Fn2 = fn(f64, f64) -> f64;

/// Look up a univariate built-in by name.
pub fn lookup1(name: &str) -> Option<Fn1> {
    Some(match name {
        "e0" => |_| 1.0,
        "e1" => |t| t,
        "e2" => |t| t * t,
        "x_over_1px" => |t| t / (1.0 + t),
        "sqrt" => |t| t.sqrt(),
        "min1" => |t| t.min(1.0),
        _ => return None,
    })
}

/// Look up a bivariate built-in by name.
pub fn lookup2(name: &str) -> Option<Fn2> {
    Some(match name {
        "one" => |_, _| 1.0,
        "x" => |x, _| x,
        "y" => |_, y| y,
        "x_plus_y" => |x, y| x + y,
        "xy" => |x, y| x * y,
        "e2_sum" => |x, y| x * x + y * y,
        "sum_x_over_1px" => |x, y| x / (1.0 + x) + y / (1.0 + y),
        "sqrt_xy" => |x, y| x.sqrt() * y.sqrt(),
        "min1_prod" => |x, y| x.min(1.0) * y.min(1.0),
        _ => return None,
    })
}

/// Names accepted by [`lookup1`], for error messages.
pub const NAMES_1D: &[&str] = &["e0", "e1", "e2", "x_over_1px", "sqrt", "min1"];
/// Names accepted by [`lookup2`], for error messages.
pub const NAMES_2D: &[&str] = &[
    "one",
    "x",
    "y",
    "x_plus_y",
    "xy",
    "e2_sum",
    "sum_x_over_1px",
    "sqrt_xy",
    "min1_prod",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        for n in NAMES_1D {
            assert!(lookup1(n).is_some(), "{n} missing");
        }
        for n in NAMES_2D {
            assert!(lookup2(n).is_some(), "{n} missing");
        }
        assert!(lookup1("nope").is_none());
        assert!(lookup2("nope").is_none());
    }
}
