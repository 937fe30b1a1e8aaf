//! Small dense-vector helpers used by the search and optimizer modules.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_squared(v: &[f64]) -> f64 {
    dot(v, v)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    norm_squared(v).sqrt()
}

/// Scales `v` to unit norm in place; returns the original norm.
pub(crate) fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norm_agree_on_a_known_vector() {
        let v = [3.0, 4.0];
        assert_eq!(dot(&v, &v), 25.0);
        assert_eq!(norm(&v), 5.0);
    }

    #[test]
    fn normalize_returns_previous_norm_and_scales_to_unit() {
        let mut v = vec![3.0, 4.0];
        let old = normalize(&mut v);
        assert_eq!(old, 5.0);
        assert!((norm(&v) - 1.0).abs() < 1e-15);
    }
}
