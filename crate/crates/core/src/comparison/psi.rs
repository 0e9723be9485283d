//! Closed-form solutions and barriers of `psi'' = kappa^2 (r - s)^(-alpha) psi`,
//! `psi(0) = 0`, `psi'(0) = 1` on `[0, r)`.

use super::bessel::{bessel_scaled, gamma};
use crate::error::{check_range, LabError, Result};
use crate::numeric::{lit, Real};
use serde::Serialize;

/// Which representation a [`ClosedFormPsi`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PsiCase {
    /// `alpha in [-2, 0)`: a cosh/sinh expression that is a candidate upper barrier, not an exact solution.
    Hyperbolic,
    /// `alpha in [0, 2)`: exact solution via modified Bessel functions of order `1/(2 - alpha)`.
    Bessel,
    /// `alpha = 2`: exact solution as a combination of two powers of `r - s`.
    Power,
    /// `kappa = 0`: `psi(s) = s`.
    Linear,
}

/// Solution (or barrier) of the comparison ODE with right endpoint `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormPsi<T> {
    pub case: PsiCase,
    pub kappa: T,
    pub alpha: T,
    pub r: T,
    /// Coefficient of the growing branch as written in the closed form.
    pub c1: T,
    /// Coefficient of the decaying branch as written in the closed form.
    pub c2: T,
    /// Scaled Bessel data at the endpoint argument: `(z_r, e^-z_r I(z_r), e^z_r K(z_r))`.
    #[serde(skip)]
    endpoint: Option<(f64, f64, f64)>,
}

/// `sqrt(1 + 4 kappa^2)`, the indicial discriminant for inverse-square potentials.
pub fn indicial_root<T: Real>(kappa: T) -> T {
    (T::one() + lit::<T>(4.0) * kappa * kappa).sqrt()
}

/// Builds the closed form for `(kappa, alpha, r)`.
pub fn closed_form_psi<T: Real>(kappa: T, alpha: T, r: T) -> Result<ClosedFormPsi<T>> {
    check_range("kappa", kappa.as_f64(), 0.0, f64::MAX, "[0, inf)")?;
    check_range("alpha", alpha.as_f64(), -2.0, 2.0, "[-2, 2]")?;
    check_range("r", r.as_f64(), f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    let two = lit::<T>(2.0);
    let mut out = ClosedFormPsi {
        case: PsiCase::Linear,
        kappa,
        alpha,
        r,
        c1: T::zero(),
        c2: T::one(),
        endpoint: None,
    };
    if kappa == T::zero() {
        return Ok(out);
    }
    if alpha == two {
        let q = indicial_root(kappa);
        out.case = PsiCase::Power;
        out.c1 = -r.powf((T::one() - q) / two) / q;
        out.c2 = r.powf((T::one() + q) / two) / q;
    } else if alpha >= T::zero() {
        let (af, kf, rf) = (alpha.as_f64(), kappa.as_f64(), r.as_f64());
        let nu = 1.0 / (2.0 - af);
        let beta = kf / (1.0 - af / 2.0);
        let zr = beta * rf.powf(1.0 - af / 2.0);
        let b = bessel_scaled(nu, zr)?;
        // psi'(0) = 1 fixes C2 = sqrt(r) I(z_r) / (1 - alpha/2); C1 = -C2 K(z_r) / I(z_r).
        let c2 = rf.sqrt() / (1.0 - af / 2.0) * b.i * zr.exp();
        let c1 = -c2 * b.k / b.i * (-2.0 * zr).exp();
        if !c2.is_finite() {
            return Err(LabError::Overflow(zr));
        }
        out.case = PsiCase::Bessel;
        out.c1 = lit(c1);
        out.c2 = lit(c2);
        out.endpoint = Some((zr, b.i, b.k));
    } else {
        let scale = ((T::one() + r) / two).powf(alpha / two);
        let w0 = hyperbolic_phase(kappa, alpha, r, T::zero());
        out.case = PsiCase::Hyperbolic;
        out.c1 = -scale * w0.cosh();
        out.c2 = scale * w0.sinh();
    }
    Ok(out)
}

/// `W(s) = 2 kappa / (2 - alpha) ((1 + r - s)^(1 - alpha/2) - 1)`.
fn hyperbolic_phase<T: Real>(kappa: T, alpha: T, r: T, s: T) -> T {
    let two = lit::<T>(2.0);
    two * kappa / (two - alpha) * ((T::one() + r - s).powf(T::one() - alpha / two) - T::one())
}

impl<T: Real> ClosedFormPsi<T> {
    /// Whether the closed form solves the ODE exactly (false for the hyperbolic barrier).
    pub fn is_exact(&self) -> bool {
        self.case != PsiCase::Hyperbolic
    }

    /// Coefficient `kappa^2 (r - s)^(-alpha)` of the ODE.
    pub fn coefficient(&self, s: T) -> T {
        self.kappa * self.kappa * (self.r - s).powf(-self.alpha)
    }

    fn check_domain(&self, s: T) -> Result<()> {
        if !(s >= T::zero()) || !(s < self.r) {
            return Err(LabError::ProfileDomain {
                r: s.as_f64(),
                end: self.r.as_f64(),
            });
        }
        Ok(())
    }

    /// `(psi(s), psi'(s))` for `s in [0, r)`.
    pub fn eval(&self, s: T) -> Result<(T, T)> {
        self.check_domain(s)?;
        let two = lit::<T>(2.0);
        let x = self.r - s;
        Ok(match self.case {
            PsiCase::Linear => (s, T::one()),
            PsiCase::Power => {
                let q = indicial_root(self.kappa);
                let (ap, am) = ((T::one() + q) / two, (T::one() - q) / two);
                let rho = x / self.r;
                let lr = rho.ln();
                // r (rho^am - rho^ap) / q written to avoid cancellation near s = 0.
                let v = -self.r * (am * lr).exp() * (q * lr).exp_m1() / q;
                let dv = (ap * ((ap - T::one()) * lr).exp() - am * ((am - T::one()) * lr).exp()) / q;
                (v, dv)
            }
            PsiCase::Bessel => {
                let (zr, ir, kr) = self.endpoint.expect("bessel data");
                let (af, kf, xf) = (self.alpha.as_f64(), self.kappa.as_f64(), x.as_f64());
                let nu = 1.0 / (2.0 - af);
                let beta = kf / (1.0 - af / 2.0);
                let z = beta * xf.powf(1.0 - af / 2.0);
                let b = bessel_scaled(nu, z)?;
                let up = (zr - z).exp();
                let down = (z - zr).exp();
                let f = ir * b.k * up - kr * b.i * down;
                let fp = ir * b.k_prime * up - kr * b.i_prime * down;
                let pref = self.r.as_f64().sqrt() / (1.0 - af / 2.0);
                let sx = xf.sqrt();
                let v = pref * sx * f;
                let dvdx = pref * (f / (2.0 * sx) + sx * kf * xf.powf(-af / 2.0) * fp);
                (lit(v), lit(-dvdx))
            }
            PsiCase::Hyperbolic => {
                let scale = (T::one() + self.r).powf(self.alpha / two);
                let phase = hyperbolic_phase(self.kappa, self.alpha, self.r, T::zero())
                    - hyperbolic_phase(self.kappa, self.alpha, self.r, s);
                let v = scale / self.kappa * phase.sinh();
                let dv = scale * (T::one() + x).powf(-self.alpha / two) * phase.cosh();
                (v, dv)
            }
        })
    }

    /// `psi(s)` only.
    pub fn value(&self, s: T) -> Result<T> {
        Ok(self.eval(s)?.0)
    }

    /// `psi''(s)`: `G psi` for exact cases, the analytic second derivative of the barrier otherwise.
    pub fn second_derivative(&self, s: T) -> Result<T> {
        let (v, _) = self.eval(s)?;
        if self.case != PsiCase::Hyperbolic {
            if self.case == PsiCase::Linear {
                return Ok(T::zero());
            }
            return Ok(self.coefficient(s) * v);
        }
        let two = lit::<T>(2.0);
        let y = T::one() + self.r - s;
        let phase = hyperbolic_phase(self.kappa, self.alpha, self.r, T::zero())
            - hyperbolic_phase(self.kappa, self.alpha, self.r, s);
        let scale = (T::one() + self.r).powf(self.alpha / two);
        Ok(scale
            * (self.alpha / two * y.powf(-self.alpha / two - T::one()) * phase.cosh()
                + self.kappa * y.powf(-self.alpha) * phase.sinh()))
    }

    /// `psi(r)` as a limit; infinite for the power case with `kappa > 0`.
    pub fn value_at_end(&self) -> T {
        match self.case {
            PsiCase::Linear => self.r,
            PsiCase::Power => T::infinity(),
            PsiCase::Hyperbolic => {
                let two = lit::<T>(2.0);
                let scale = (T::one() + self.r).powf(self.alpha / two);
                scale / self.kappa * hyperbolic_phase(self.kappa, self.alpha, self.r, T::zero()).sinh()
            }
            PsiCase::Bessel => {
                let (zr, ir, _) = self.endpoint.expect("bessel data");
                let af = self.alpha.as_f64();
                let nu = 1.0 / (2.0 - af);
                let beta = self.kappa.as_f64() / (1.0 - af / 2.0);
                let pref = self.r.as_f64().sqrt() / (1.0 - af / 2.0);
                // sqrt(x) K(beta x^(1-alpha/2)) -> Gamma(nu) 2^(nu-1) beta^(-nu) as x -> 0.
                lit(pref * ir * zr.exp() * gamma(nu) * 2f64.powf(nu - 1.0) * beta.powf(-nu))
            }
        }
    }

    /// The growth bound `r^(1 + q) / q`, `q = sqrt(1 + 4 kappa^2)`, for `psi(r - 1)` when `alpha = 2`.
    pub fn power_endpoint_bound(&self) -> T {
        let q = indicial_root(self.kappa);
        self.r.powf(T::one() + q) / q
    }
}
