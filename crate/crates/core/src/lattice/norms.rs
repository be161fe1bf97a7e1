use super::{Couple, Element};
use crate::error::Result;
use crate::kfunctional::{k_value, DEFAULT_ACCURACY};

/// `(max(||x||_0, ||x||_1), K(1, x))`, the norms of the intersection and
/// the sum of the couple.
pub fn delta_sigma_norms(x: &Element, couple: &Couple) -> Result<(f64, f64)> {
    let (l0, l1) = couple.legs();
    let delta = l0.norm(x)?.max(l1.norm(x)?);
    let sigma = k_value(x, couple, 1.0, DEFAULT_ACCURACY)?;
    Ok((delta, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_and_zero() {
        let c = Couple::sequence(1.0, f64::INFINITY);
        let e = Element::seq(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(delta_sigma_norms(&e, &c).unwrap(), (1.0, 1.0));
        let z = Element::seq(vec![0.0; 3]).unwrap();
        assert_eq!(delta_sigma_norms(&z, &c).unwrap(), (0.0, 0.0));
    }
}
