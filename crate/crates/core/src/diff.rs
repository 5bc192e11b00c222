//! Central finite differences with Richardson extrapolation.
//!
//! Every level halves the step and cancels the next even power of h, so
//! `levels = 2` on a first derivative is accurate to O(h⁶).

fn richardson(mut table: Vec<f64>) -> f64 {
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        factor *= 4.0;
    }
    table[0]
}

/// f'(x) from central differences at h, h/2, …, h/2^levels.
pub fn derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64, levels: usize) -> f64 {
    let table = (0..=levels)
        .map(|k| {
            let s = h / f64::from(1u32 << k);
            (f(x + s) - f(x - s)) / (2.0 * s)
        })
        .collect();
    richardson(table)
}

/// f''(x) from three-point second differences at h, h/2, …, h/2^levels.
pub fn second_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64, levels: usize) -> f64 {
    let f0 = f(x);
    let table = (0..=levels)
        .map(|k| {
            let s = h / f64::from(1u32 << k);
            (f(x + s) - 2.0 * f0 + f(x - s)) / (s * s)
        })
        .collect();
    richardson(table)
}

/// Fallible variant of [`derivative`]; the first error aborts.
pub fn try_derivative<E, F: FnMut(f64) -> Result<f64, E>>(mut f: F, x: f64, h: f64, levels: usize) -> Result<f64, E> {
    let mut table = Vec::with_capacity(levels + 1);
    for k in 0..=levels {
        let s = h / f64::from(1u32 << k);
        table.push((f(x + s)? - f(x - s)?) / (2.0 * s));
    }
    Ok(richardson(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_smooth_functions() {
        let d = derivative(f64::sin, 0.7, 1e-2, 2);
        assert!((d - 0.7f64.cos()).abs() < 1e-13);
        let d2 = second_derivative(f64::exp, 0.3, 1e-2, 2);
        assert!((d2 - 0.3f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn richardson_improves_on_plain_difference() {
        let f = |x: f64| x.powi(5);
        let plain = derivative(f, 1.0, 0.1, 0);
        let refined = derivative(f, 1.0, 0.1, 1);
        assert!((refined - 5.0).abs() < (plain - 5.0).abs());
    }
}
