//! Discrete variational field theory on Lie groupoids.
//!
//! Fields live on a planar mesh with constant face degree k: a base point per
//! vertex and a groupoid arrow per directed edge, subject to morphism axioms.
//! Each face induces a k-gon of composable arrows (a discrete jet), a
//! Lagrangian assigns it a real number, and critical points of the action sum
//! satisfy discrete field equations assembled from tangent-lift derivatives.
//! The crate provides:
//!
//! * [`mesh`] — square and triangular grids, face/vertex incidence, boundaries;
//! * [`groupoid`] — pair groupoids over `R^n`, matrix groups (SO(3), GL(n)),
//!   and pair groupoids over a group, with their algebroid fibers;
//! * [`jet`] — validated k-gons, variations, tangent-lift derivatives;
//! * [`lagrangian`] — Lagrangian catalog, Poincare-Cartan forms, action sums;
//! * [`field`] — discrete fields, morphism extension, finite variations;
//! * [`solver`] — residual assembly, boundary-value and time-marching Newton,
//!   multisymplectic diagnostics, Lie-Poisson reduction;
//! * [`gauge`] — lattice gauge fields, plaquette field strength, holonomy;
//! * [`diagnostics`] — seeded invariant suites shared with the CLI;
//! * [`sample`] — deterministic random elements, jets, and fields for tests.
//!
//! Index convention used throughout: a face with corners `(x_1, ..., x_k)` has
//! edges `[x]_i = (x_{i-1}, x_i)`, indices modulo k mapped into `1..=k`; the
//! local index of a vertex is the slot whose tangent lift moves it.

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod gauge;
pub mod groupoid;
pub mod jet;
pub mod lagrangian;
mod linalg;
pub mod mesh;
pub mod sample;
pub mod solver;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Formats a float like C's `%.17g`: 17 significant digits, trailing zeros
/// trimmed, scientific notation outside the `%f` range. 17 digits round-trip
/// every f64, so equal outputs mean bit-equal numbers.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    // %e with 16 fractional digits = 17 significant digits
    let sci = format!("{:.16e}", x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exponent.parse().expect("integer exponent");
    let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
    if !(-4..17).contains(&exp) {
        format!("{trimmed}e{:+03}", exp)
    } else {
        // expand into %f style with exactly 17 significant digits
        let digits: String = trimmed.chars().filter(|c| c.is_ascii_digit()).collect();
        let neg = trimmed.starts_with('-');
        let point = exp + 1; // digits before the decimal point
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if point <= 0 {
            out.push_str("0.");
            for _ in 0..-point {
                out.push('0');
            }
            out.push_str(&digits);
        } else if (point as usize) >= digits.len() {
            out.push_str(&digits);
            for _ in 0..(point as usize - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..point as usize]);
            out.push('.');
            out.push_str(&digits[point as usize..]);
        }
        out
    }
}

/// Runs `f(0..n)` over `workers` threads, preserving index order in the output.
/// `workers <= 1` stays on the calling thread, which is the reproducible
/// default; results are identical for any worker count.
pub fn par_map<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(workers.min(n));
    std::thread::scope(|scope| {
        for (c, slice) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(c * chunk + off));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips_and_trims() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        // 1e-7 is not exactly representable; %.17g exposes that
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(1e-8), "1e-08");
        for &x in &[std::f64::consts::PI, -1.0 / 3.0, 6.02e23, 1.25e-13, 42.0] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn par_map_is_order_preserving_for_any_worker_count() {
        let serial = par_map(1, 100, |i| i * i);
        for workers in [2, 3, 7] {
            assert_eq!(par_map(workers, 100, |i| i * i), serial);
        }
    }
}
