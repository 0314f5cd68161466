//! Bessel functions of integer order and their positive zeros.

use crate::error::{Error, Result};

/// `J_0(x), ..., J_nmax(x)` by backward recurrence, normalized with
/// `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = nmax.max(ax as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let (mut next, mut cur) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        if k - 1 <= nmax {
            out[k - 1] = cur;
        }
        if k <= nmax {
            out[k] = next;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += cur;
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_all(n, x)[n]
}

/// Zeros `j_{n,k} < bound` of `J_n` for every order that has one.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeros {
    /// `zeros[n]` lists `j_{n,1} < j_{n,2} < ...` below the bound.
    pub zeros: Vec<Vec<f64>>,
    pub bound: f64,
}

fn bisect(n: usize, mut a: f64, mut b: f64) -> f64 {
    let mut fa = bessel_j(n, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= 4.0 * f64::EPSILON * m {
            break;
        }
        let fm = bessel_j(n, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// First sign change of J_n in (from, ...) scanning with unit steps; zeros are
// more than 3 apart, so no pair of zeros can hide inside one step.
fn scan_next(n: usize, from: f64) -> f64 {
    let mut a = from;
    let mut fa = bessel_j(n, a);
    loop {
        let b = a + 1.0;
        let fb = bessel_j(n, b);
        if fa == 0.0 && a > from {
            return a;
        }
        if (fa > 0.0) != (fb > 0.0) {
            return bisect(n, a, b);
        }
        a = b;
        fa = fb;
    }
}

/// Zeros below `bound`; the completeness of each order follows from the
/// interlacing `j_{n,k} < j_{n+1,k} < j_{n,k+1}`.
pub fn bessel_zeros(bound: f64) -> Result<BesselZeros> {
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    // J_0 from a plain scan, keeping the first zero at or above the bound
    let mut prev = Vec::new();
    let mut x = 1e-3;
    loop {
        let z = scan_next(0, x);
        prev.push(z);
        if z >= bound {
            break;
        }
        x = z + 1e-9 * z;
    }
    for n in 0.. {
        if prev[0] >= bound {
            break;
        }
        let below: Vec<f64> = prev.iter().copied().filter(|&z| z < bound).collect();
        zeros.push(below);
        // zeros of J_{n+1}, one in each gap of the J_n zeros
        let order = n + 1;
        let mut next = Vec::with_capacity(prev.len());
        for w in prev.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (bessel_j(order, a), bessel_j(order, b));
            if (fa > 0.0) == (fb > 0.0) {
                return Err(Error::Solver(format!(
                    "no sign change of J_{order} between consecutive zeros {a} and {b} of J_{n}"
                )));
            }
            next.push(bisect(order, a, b));
        }
        while next.last().is_none_or(|&z| z < bound) {
            let from = next.last().copied().unwrap_or(*prev.last().unwrap());
            let from = from.max(*prev.last().unwrap());
            next.push(scan_next(order, from + 1e-9 * from));
        }
        prev = next;
    }
    Ok(BesselZeros { zeros, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bessel_values() {
        assert_relative_eq!(bessel_j(0, 1.0), 0.765_197_686_557_966_6, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(1, 2.5), 0.497_094_102_464_274_1, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(5, 10.0), -0.234_061_528_186_793_6, epsilon = 1e-15);
        assert_relative_eq!(bessel_j(2, -3.0), bessel_j(2, 3.0), epsilon = 1e-16);
        assert_relative_eq!(bessel_j(3, -3.0), -bessel_j(3, 3.0), epsilon = 1e-16);
    }

    #[test]
    fn known_zeros() {
        let z = bessel_zeros(10.0).unwrap();
        assert_relative_eq!(z.zeros[0][0], 2.404_825_557_695_773, epsilon = 1e-13);
        assert_relative_eq!(z.zeros[0][2], 8.653_727_912_911_013, epsilon = 1e-13);
        assert_relative_eq!(z.zeros[1][0], 3.831_705_970_207_512, epsilon = 1e-13);
        assert_relative_eq!(z.zeros[2][0], 5.135_622_301_840_683, epsilon = 1e-13);
        assert_relative_eq!(z.zeros[5][0], 8.771_483_815_959_954, epsilon = 1e-13);
        // j_{6,1} = 9.936, j_{7,1} = 11.086
        assert_eq!(z.zeros.len(), 7);
    }

    #[test]
    fn zeros_of_high_order_are_roots() {
        let z = bessel_zeros(60.0).unwrap();
        for (n, zs) in z.zeros.iter().enumerate() {
            for w in zs.windows(2) {
                assert!(w[1] - w[0] > 3.0);
            }
            for &x in zs {
                assert!(bessel_j(n, x).abs() < 1e-12, "J_{n}({x})");
            }
        }
    }
}
