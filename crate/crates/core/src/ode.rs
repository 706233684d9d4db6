//! Fixed-step classical Runge–Kutta integration for autonomous fields.

use crate::{Error, RVector, Result};

/// Default step used when a caller does not supply one.
pub const DEFAULT_DT: f64 = 1e-3;

/// One classical RK4 step of size `h` for a fallible autonomous field.
pub fn rk4_step<F>(field: &mut F, y: &RVector, h: f64) -> Result<RVector>
where
    F: FnMut(&RVector) -> Result<RVector>,
{
    let k1 = field(y)?;
    let k2 = field(&(y + &k1 * (h / 2.0)))?;
    let k3 = field(&(y + &k2 * (h / 2.0)))?;
    let k4 = field(&(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Time grid `0, dt, 2 dt, ..., t_end`. The final step is shortened when
/// `t_end` is not a multiple of `dt`.
pub fn time_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter { name: "dt", value: dt, reason: "must be positive" });
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter { name: "t_end", value: t_end, reason: "must be positive" });
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    grid.push(t_end);
    Ok(grid)
}

/// Integrate `y' = field(y)` on [`time_grid`], calling `observe` on every
/// accepted state (including the initial one). Stops with
/// [`Error::Divergence`] on the first non-finite state.
pub fn integrate<F, O>(mut field: F, y0: RVector, t_end: f64, dt: f64, mut observe: O) -> Result<()>
where
    F: FnMut(&RVector) -> Result<RVector>,
    O: FnMut(f64, &RVector) -> Result<()>,
{
    let grid = time_grid(t_end, dt)?;
    let mut y = y0;
    observe(grid[0], &y)?;
    for w in grid.windows(2) {
        let next = rk4_step(&mut field, &y, w[1] - w[0])?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { last_valid_time: w[0] });
        }
        y = next;
        observe(w[1], &y)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_end_exactly() {
        let g = time_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!((g[3] - 0.9).abs() < 1e-15);
        let g = time_grid(1.0, 0.25).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn rejects_bad_step() {
        assert!(time_grid(1.0, 0.0).is_err());
        assert!(time_grid(-1.0, 0.1).is_err());
    }

    #[test]
    fn exponential_decay_is_fourth_order() {
        let err = |dt: f64| {
            let mut last = 0.0;
            integrate(|y| Ok(-y), RVector::from_element(1, 1.0), 1.0, dt, |_, y| {
                last = y[0];
                Ok(())
            })
            .unwrap();
            (last - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn divergence_is_reported() {
        let res = integrate(|y| Ok(y.map(|v| v * v * 1e3)), RVector::from_element(1, 1.0), 10.0, 0.1, |_, _| Ok(()));
        assert!(matches!(res, Err(Error::Divergence { .. })));
    }
}
