use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LightbulbMoments<S> {
    pub n: usize,
    pub mu: S,
    pub sigma2: S,
    pub lambda_n: S,
    /// `-(1/(n-1)) Π_{s=1}^{n/2-1} (1 - 4s(n-s)/(n(n-1)))²` for even `n`.
    pub lambda_even_form: Option<S>,
}

fn factor<S: Scalar>(n: usize, s: usize) -> S {
    let (n, s) = (n as i64, s as i64);
    S::one() - S::from_ratio(4 * s * (n - s), n * (n - 1))
}

/// `μ = n/2`, `λ_n = Π_{s=1}^n (1 - 4s(n-s)/(n(n-1)))` and
/// `σ² = (n/4)(1 + (n-1)λ_n)`.
pub fn lightbulb_moments<S: Scalar>(n: usize) -> Result<LightbulbMoments<S>> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    let lambda_n = (1..=n).fold(S::one(), |acc, s| acc * factor::<S>(n, s));
    let nn = S::from_int(n as i64);
    let sigma2 = nn.clone() / S::from_int(4) * (S::one() + S::from_int(n as i64 - 1) * lambda_n.clone());
    let lambda_even_form = n.is_multiple_of(2).then(|| {
        let prod = (1..n / 2).fold(S::one(), |acc, s| {
            let f = factor::<S>(n, s);
            acc * f.clone() * f
        });
        -(prod / S::from_int(n as i64 - 1))
    });
    Ok(LightbulbMoments { n, mu: nn / S::from_int(2), sigma2, lambda_n, lambda_even_form })
}

/// Previous Kolmogorov constant for the lightbulb sum,
/// `B_n = (n/(2σ)) Δ̄₀ + 1.64 n/σ² + 2` with
/// `Δ̄₀ = 1/(2√n) + 1/(2n) + e^{-n/2}/3`.
pub fn compute_bn(n: usize) -> Result<f64> {
    if n % 2 == 1 {
        return Err(Error::OddN { n });
    }
    if n < 6 {
        return Err(Error::NTooSmall { n, min: 6 });
    }
    let sigma2 = lightbulb_moments::<f64>(n)?.sigma2;
    let sigma = libm::sqrt(sigma2);
    let nf = n as f64;
    let delta0 = 1.0 / (2.0 * libm::sqrt(nf)) + 1.0 / (2.0 * nf) + libm::exp(-nf / 2.0) / 3.0;
    Ok(nf / (2.0 * sigma) * delta0 + 1.64 * nf / sigma2 + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn small_n_exact() {
        let m4 = lightbulb_moments::<Rational>(4).unwrap();
        assert_eq!((m4.mu.clone(), m4.sigma2.clone(), m4.lambda_n.clone()), (q(2, 1), q(1, 1), q(0, 1)));
        assert_eq!(m4.lambda_even_form, Some(q(0, 1)));
        let m6 = lightbulb_moments::<Rational>(6).unwrap();
        assert_eq!(m6.lambda_n, q(-1, 10125));
        assert_eq!(m6.sigma2, q(3, 2) * q(2024, 2025));
        assert_eq!(m6.lambda_even_form, Some(m6.lambda_n.clone()));
    }

    #[test]
    fn even_form_and_sign() {
        for n in (4..=200).step_by(2) {
            let m = lightbulb_moments::<f64>(n).unwrap();
            let even = m.lambda_even_form.unwrap();
            assert!(libm::fabs(even - m.lambda_n) <= 1e-14 * (1.0 + libm::fabs(even)));
            assert!(m.lambda_n <= 0.0 && m.sigma2 <= n as f64 / 4.0);
        }
        let m = lightbulb_moments::<f64>(100).unwrap();
        assert!(m.sigma2 <= 25.0);
        assert!(lightbulb_moments::<f64>(5).unwrap().lambda_even_form.is_none());
        assert!(matches!(lightbulb_moments::<f64>(1), Err(Error::NTooSmall { .. })));
    }

    #[test]
    fn bn_constant() {
        let b6 = compute_bn(6).unwrap();
        let sigma2 = 1.5 * 2024.0 / 2025.0;
        let direct = 3.0 / libm::sqrt(sigma2) * (1.0 / (2.0 * libm::sqrt(6.0)) + 1.0 / 12.0 + libm::exp(-3.0) / 3.0)
            + 1.64 * 6.0 / sigma2
            + 2.0;
        assert!(libm::fabs(b6 - direct) < 1e-12);
        assert!(b6 > 9.06);
        assert!(matches!(compute_bn(7), Err(Error::OddN { n: 7 })));
        assert!(matches!(compute_bn(4), Err(Error::NTooSmall { n: 4, min: 6 })));
    }
}
