use std::f64::consts::PI;

use super::{bessel_zeros, Spectrum, SpectrumSource};
use crate::error::{validation, Error, Result};
use crate::geometry::Domain;

/// Largest number of eigenvalues an oracle will enumerate.
pub const MAX_ORACLE_ENTRIES: f64 = 1e8;

/// `pi^2 (m^2/a^2 + n^2/b^2) < cutoff`, `m, n >= 1`.
pub fn exact_rectangle_spectrum(a: f64, b: f64, cutoff: f64) -> Result<Spectrum> {
    if !(a > 0.0 && b > 0.0) {
        return Err(validation("rectangle sides must be positive"));
    }
    if !(cutoff.is_finite()) {
        return Err(validation("cutoff must be finite"));
    }
    if a * b * cutoff / (4.0 * PI) > MAX_ORACLE_ENTRIES {
        return Err(Error::Resource(format!(
            "rectangle spectrum below {cutoff} has more than {MAX_ORACLE_ENTRIES} entries"
        )));
    }
    let mut ev = Vec::new();
    let (ia, ib) = (PI * PI / (a * a), PI * PI / (b * b));
    let mut m = 1u64;
    loop {
        let base = ia * (m * m) as f64;
        if base + ib >= cutoff {
            break;
        }
        let mut n = 1u64;
        loop {
            let e = base + ib * (n * n) as f64;
            if e >= cutoff {
                break;
            }
            ev.push(e);
            n += 1;
        }
        m += 1;
    }
    Spectrum::new(ev, cutoff, SpectrumSource::ExactRectangle { a, b })
}

/// `j_{n,k}^2 / R^2 < cutoff`, twice for `n >= 1`.
pub fn exact_disk_spectrum(radius: f64, cutoff: f64) -> Result<Spectrum> {
    if !(radius > 0.0) {
        return Err(validation("disk radius must be positive"));
    }
    if !(cutoff.is_finite()) {
        return Err(validation("cutoff must be finite"));
    }
    if radius * radius * cutoff / 4.0 > MAX_ORACLE_ENTRIES {
        return Err(Error::Resource(format!(
            "disk spectrum below {cutoff} has more than {MAX_ORACLE_ENTRIES} entries"
        )));
    }
    let mut ev = Vec::new();
    if cutoff > 0.0 {
        let zeros = bessel_zeros(radius * cutoff.sqrt())?;
        for (n, zs) in zeros.zeros.iter().enumerate() {
            for &j in zs {
                let e = j * j / (radius * radius);
                if e < cutoff {
                    ev.push(e);
                    if n >= 1 {
                        ev.push(e);
                    }
                }
            }
        }
    }
    Spectrum::new(ev, cutoff, SpectrumSource::ExactDisk { radius })
}

/// Oracle spectrum for rectangles and disks.
pub fn exact_spectrum(domain: &Domain, cutoff: f64) -> Result<Spectrum> {
    match domain {
        Domain::Rectangle { a, b, .. } => exact_rectangle_spectrum(*a, *b, cutoff),
        Domain::Disk { radius, .. } => exact_disk_spectrum(*radius, cutoff),
        Domain::ConvexPolygon(_) => Err(validation("no exact spectrum for general polygons")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rectangle_examples() {
        let s = exact_rectangle_spectrum(1.0, 1.0, 100.0).unwrap();
        let expect: Vec<f64> = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0].iter().map(|k| k * PI * PI).collect();
        assert_eq!(s.len(), 6);
        for (a, b) in s.eigenvalues.iter().zip(&expect) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(exact_rectangle_spectrum(2.0, 1.0, 50.0).unwrap().len(), 6);
        assert!(exact_rectangle_spectrum(1.0, 1.0, 2.0 * PI * PI).unwrap().is_empty());
        assert!(matches!(exact_rectangle_spectrum(1.0, 1.0, 1e12), Err(Error::Resource(_))));
    }

    #[test]
    fn disk_examples() {
        let s = exact_disk_spectrum(1.0, 6.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s.eigenvalues[0], 5.783_185_962_946_784, epsilon = 1e-12);
        let s = exact_disk_spectrum(1.0, 15.0).unwrap();
        assert_eq!(s.len(), 3);
        assert_relative_eq!(s.eigenvalues[1], 3.831_705_970_207_512f64.powi(2), epsilon = 1e-12);
        assert_eq!(s.eigenvalues[1], s.eigenvalues[2]);
        let big = exact_disk_spectrum(2.0, 15.0 / 4.0).unwrap();
        for (a, b) in big.eigenvalues.iter().zip(&s.eigenvalues) {
            assert_relative_eq!(*a, b / 4.0, epsilon = 1e-13);
        }
    }
}
