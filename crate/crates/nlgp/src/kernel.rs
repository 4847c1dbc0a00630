//! Interaction kernels: even finite measures given as atoms plus an integrable
//! density, with closed-form Fourier and (generalized) Laplace transforms, and
//! the hypothesis checks and speed thresholds that govern solvability.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::{bisect, golden_min};

/// Sonic speed: long-wave limit of ω(ξ)/ξ under the Ŵ(0) = 1 normalization.
pub const SONIC_SPEED: f64 = SQRT_2;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel has no registered Laplace transform")]
    UnavailableTransform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Contact,
    Gaussian,
    Nematic,
    Vanderwaals,
    Rectangular,
    ThreeDelta,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Contact => "contact",
            Family::Gaussian => "gaussian",
            Family::Nematic => "nematic",
            Family::Vanderwaals => "vanderwaals",
            Family::Rectangular => "rectangular",
            Family::ThreeDelta => "three_delta",
            Family::Custom => "custom",
        }
    }
}

/// A kernel recipe: family plus named parameters, as read from configs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl KernelSpec {
    pub fn contact() -> Self {
        KernelSpec { family: Family::Contact, lambda: None, beta: None }
    }

    pub fn gaussian(lambda: f64) -> Self {
        KernelSpec { family: Family::Gaussian, lambda: Some(lambda), beta: None }
    }

    pub fn nematic(lambda: f64) -> Self {
        KernelSpec { family: Family::Nematic, lambda: Some(lambda), beta: None }
    }

    pub fn vanderwaals(beta: f64, lambda: f64) -> Self {
        KernelSpec { family: Family::Vanderwaals, lambda: Some(lambda), beta: Some(beta) }
    }

    pub fn rectangular(lambda: f64) -> Self {
        KernelSpec { family: Family::Rectangular, lambda: Some(lambda), beta: None }
    }

    pub fn three_delta(lambda: f64) -> Self {
        KernelSpec { family: Family::ThreeDelta, lambda: Some(lambda), beta: None }
    }

    /// Same recipe at a different nonlocality scale. λ = 0 degenerates to the
    /// contact kernel for every family.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return KernelSpec { family: Family::Contact, lambda: None, beta: self.beta };
        }
        self.lambda = Some(lambda);
        self
    }

    pub fn build(&self) -> Result<Kernel, KernelError> {
        let lambda = self.lambda;
        let need_lambda = |what: &str| {
            lambda.ok_or_else(|| {
                KernelError::InvalidParameter(format!("{what} requires a lambda parameter"))
            })
        };
        match self.family {
            Family::Contact => Ok(Kernel {
                family: Family::Contact,
                lambda: 0.0,
                beta: 0.0,
                atoms: vec![Atom { position: 0.0, weight: 1.0 }],
                density: Density::None,
            }),
            Family::Gaussian => {
                let l = need_lambda("gaussian")?;
                if !l.is_finite() || l <= 0.0 {
                    return Err(KernelError::InvalidParameter(format!(
                        "gaussian requires lambda > 0 (got {l})"
                    )));
                }
                Ok(Kernel {
                    family: Family::Gaussian,
                    lambda: l,
                    beta: 0.0,
                    atoms: Vec::new(),
                    density: Density::Gaussian { lambda: l },
                })
            }
            Family::Nematic => {
                let l = need_lambda("nematic")?;
                if !l.is_finite() || l <= 0.0 {
                    return Err(KernelError::InvalidParameter(format!(
                        "nematic requires lambda > 0 (got {l})"
                    )));
                }
                Ok(Kernel {
                    family: Family::Nematic,
                    lambda: l,
                    beta: 0.0,
                    atoms: Vec::new(),
                    density: Density::Exponential { lambda: l },
                })
            }
            Family::Vanderwaals => {
                let l = need_lambda("vanderwaals")?;
                let b = self.beta.ok_or_else(|| {
                    KernelError::InvalidParameter("vanderwaals requires a beta parameter".into())
                })?;
                if !b.is_finite() || b <= 0.0 {
                    return Err(KernelError::InvalidParameter(format!(
                        "vanderwaals requires beta > 0 (got {b})"
                    )));
                }
                if !l.is_finite() || l >= b / 2.0 {
                    return Err(KernelError::InvalidParameter(format!(
                        "vanderwaals requires lambda < beta/2 (got lambda = {l}, beta = {b})"
                    )));
                }
                let a = b / (b - 2.0 * l);
                let density = if l == 0.0 {
                    Density::None
                } else {
                    Density::ExponentialTail { amplitude: -a * l, beta: b }
                };
                Ok(Kernel {
                    family: Family::Vanderwaals,
                    lambda: l,
                    beta: b,
                    atoms: vec![Atom { position: 0.0, weight: a }],
                    density,
                })
            }
            Family::Rectangular => {
                let l = need_lambda("rectangular")?;
                if !l.is_finite() || l <= 0.0 {
                    return Err(KernelError::InvalidParameter(format!(
                        "rectangular requires lambda > 0 (got {l})"
                    )));
                }
                Ok(Kernel {
                    family: Family::Rectangular,
                    lambda: l,
                    beta: 0.0,
                    atoms: Vec::new(),
                    density: Density::Rectangular { lambda: l },
                })
            }
            Family::ThreeDelta => {
                let l = need_lambda("three_delta")?;
                if l == 0.0 || !l.is_finite() {
                    return Err(KernelError::InvalidParameter(format!(
                        "three_delta requires lambda != 0 (got {l})"
                    )));
                }
                Ok(Kernel {
                    family: Family::ThreeDelta,
                    lambda: l,
                    beta: 0.0,
                    atoms: vec![
                        Atom { position: 0.0, weight: 2.0 },
                        Atom { position: -l, weight: -0.5 },
                        Atom { position: l, weight: -0.5 },
                    ],
                    density: Density::None,
                })
            }
            Family::Custom => Err(KernelError::InvalidParameter(
                "custom kernels are built programmatically via Kernel::from_atoms".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// Integrable density component; each variant carries its closed forms.
#[derive(Clone, Copy, Debug)]
enum Density {
    None,
    /// e^{-x²/4λ²} / (2|λ|√π)
    Gaussian { lambda: f64 },
    /// e^{-|x|/|λ|} / (2|λ|)
    Exponential { lambda: f64 },
    /// amplitude · e^{-β|x|} (vanderwaals tail, amplitude = -A_λ λ)
    ExponentialTail { amplitude: f64, beta: f64 },
    /// indicator of [-|λ|, |λ|] / (2|λ|)
    Rectangular { lambda: f64 },
}

impl Density {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Density::None => 0.0,
            Density::Gaussian { lambda } => {
                (-x * x / (4.0 * lambda * lambda)).exp() / (2.0 * lambda.abs() * PI.sqrt())
            }
            Density::Exponential { lambda } => {
                (-x.abs() / lambda.abs()).exp() / (2.0 * lambda.abs())
            }
            Density::ExponentialTail { amplitude, beta } => amplitude * (-beta * x.abs()).exp(),
            Density::Rectangular { lambda } => {
                if x.abs() <= lambda.abs() {
                    1.0 / (2.0 * lambda.abs())
                } else {
                    0.0
                }
            }
        }
    }

    fn hat(&self, xi: f64) -> f64 {
        match *self {
            Density::None => 0.0,
            Density::Gaussian { lambda } => (-lambda * lambda * xi * xi).exp(),
            Density::Exponential { lambda } => 1.0 / (1.0 + lambda * lambda * xi * xi),
            Density::ExponentialTail { amplitude, beta } => {
                amplitude * 2.0 * beta / (xi * xi + beta * beta)
            }
            Density::Rectangular { lambda } => sinc(lambda * xi),
        }
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

/// An even finite measure 𝒲 = atoms + density with Ŵ(0) = 1.
#[derive(Clone, Debug)]
pub struct Kernel {
    family: Family,
    lambda: f64,
    beta: f64,
    atoms: Vec<Atom>,
    density: Density,
}

impl Kernel {
    /// Custom kernel from a finite list of atoms. Atoms must come in ±position
    /// pairs of equal weight (a lone atom at 0 is fine) and sum to 1.
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Kernel, KernelError> {
        if atoms.is_empty() {
            return Err(KernelError::InvalidParameter("atom list is empty".into()));
        }
        let mut total = 0.0;
        for a in &atoms {
            if !a.position.is_finite() || !a.weight.is_finite() {
                return Err(KernelError::InvalidParameter("non-finite atom".into()));
            }
            total += a.weight;
            if a.position != 0.0 {
                let mirror = atoms.iter().find(|b| {
                    (b.position + a.position).abs() <= 1e-12 * a.position.abs().max(1.0)
                });
                match mirror {
                    Some(b) if (b.weight - a.weight).abs() <= 1e-12 => {}
                    _ => {
                        return Err(KernelError::InvalidParameter(format!(
                            "atom at {} has no matching mirror atom (evenness)",
                            a.position
                        )))
                    }
                }
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(KernelError::InvalidParameter(format!(
                "atom weights sum to {total}, normalization requires 1"
            )));
        }
        Ok(Kernel { family: Family::Custom, lambda: 0.0, beta: 0.0, atoms, density: Density::None })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_density(&self) -> bool {
        !matches!(self.density, Density::None)
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.density.eval(x)
    }

    /// Fourier transform of the density component alone.
    pub(crate) fn density_hat(&self, xi: f64) -> f64 {
        self.density.hat(xi)
    }

    /// Ŵ(ξ), exact closed form; even and real by construction.
    pub fn fourier_hat(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        let mut v = self.density.hat(xi);
        for a in &self.atoms {
            v += a.weight * (a.position * xi).cos();
        }
        v
    }

    /// Generalized two-sided Laplace transform W̌(s), with ±∞ where the
    /// integral diverges. Even in s; only s ≥ 0 is meaningful.
    pub fn laplace(&self, s: f64) -> Result<f64, KernelError> {
        let s = s.abs();
        match self.family {
            Family::Contact => Ok(1.0),
            Family::Gaussian => Ok((self.lambda * self.lambda * s * s).exp()),
            Family::Nematic => {
                if s < 1.0 / self.lambda.abs() {
                    Ok(1.0 / (1.0 - self.lambda * self.lambda * s * s))
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Family::Rectangular => Ok(sinhc(self.lambda.abs() * s)),
            Family::ThreeDelta => Ok(2.0 - (self.lambda * s).cosh()),
            Family::Vanderwaals => {
                let (b, l) = (self.beta, self.lambda);
                if l == 0.0 {
                    Ok(1.0)
                } else if s < b {
                    let a = b / (b - 2.0 * l);
                    Ok(a * (1.0 - 2.0 * l * b / (b * b - s * s)))
                } else if l < 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(f64::NEG_INFINITY)
                }
            }
            Family::Custom => Err(KernelError::UnavailableTransform),
        }
    }

    /// True when every atom sits within 1e-9 grid units of a node, so that
    /// convolution shifts are exact rather than interpolated.
    pub fn atoms_on_grid(&self, grid: &crate::spectral::Grid) -> bool {
        let h = grid.spacing();
        self.atoms.iter().all(|a| {
            let s = a.position / h;
            (s - s.round()).abs() <= 1e-9
        })
    }

    /// Landau speed inf_{ξ>0} ω(ξ)/ξ with ω(ξ)² = ξ⁴ + 2Ŵ(ξ)ξ²; returns 0
    /// when ω² goes negative on the search grid.
    pub fn landau_speed(&self) -> f64 {
        let g = |xi: f64| xi * xi + 2.0 * self.fourier_hat(xi);
        let grid = xi_grid();
        let mut best = 2.0; // ξ → 0⁺ limit, = c_s²
        let mut best_idx = None;
        for (i, &xi) in grid.iter().enumerate() {
            let v = g(xi);
            if v < 0.0 {
                return 0.0;
            }
            if v < best {
                best = v;
                best_idx = Some(i);
            }
        }
        if let Some(i) = best_idx {
            let lo = if i == 0 { grid[0] * 0.5 } else { grid[i - 1] };
            let hi = if i + 1 == grid.len() { grid[i] * 2.0 } else { grid[i + 1] };
            let (_, v) = golden_min(g, lo, hi, 200);
            if v < 0.0 {
                return 0.0;
            }
            best = best.min(v);
        }
        best.max(0.0).sqrt()
    }

    /// (τ, σ) of the positive-density hypothesis, where applicable.
    pub(crate) fn h3_data(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Gaussian | Family::Nematic => {
                let tau = self.lambda;
                Some((tau, self.density.eval(tau)))
            }
            Family::Rectangular => {
                // No canonical choice in the literature for this family; τ is
                // kept below the admissibility cap π/√12 for every subsonic c.
                let tau = 0.5 * self.lambda.min(PI / 12f64.sqrt());
                Some((tau, 1.0 / (2.0 * self.lambda)))
            }
            _ => None,
        }
    }

    /// Decomposition 𝒲 = A_μ(δ₀ + μ) with ‖μ⁻‖ < 1, where applicable.
    pub(crate) fn h4_data(&self) -> Option<MuDecomposition> {
        match self.family {
            Family::Vanderwaals => {
                let (b, l) = (self.beta, self.lambda);
                // μ = -λ e^{-β|x|}: one-signed with total mass 2|λ|/β.
                let mass = 2.0 * l.abs() / b;
                let (mu_plus, mu_minus) = if l >= 0.0 { (0.0, mass) } else { (mass, 0.0) };
                Some(MuDecomposition { mu_plus, mu_minus, a_mu: b / (b - 2.0 * l) })
            }
            Family::Contact | Family::ThreeDelta | Family::Custom => {
                let w0 = self
                    .atoms
                    .iter()
                    .find(|a| a.position == 0.0)
                    .map(|a| a.weight)
                    .unwrap_or(0.0);
                if w0 <= 0.0 {
                    return None;
                }
                let mut mu_plus = 0.0;
                let mut mu_minus = 0.0;
                for a in &self.atoms {
                    if a.position != 0.0 {
                        if a.weight >= 0.0 {
                            mu_plus += a.weight / w0;
                        } else {
                            mu_minus += -a.weight / w0;
                        }
                    }
                }
                if mu_minus < 1.0 {
                    Some(MuDecomposition { mu_plus, mu_minus, a_mu: w0 })
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Derivative-bound constant of the h2 flag, the smallest m with
    /// Ŵ'(ξ) ≥ −mξ: closed form for the named families, numeric sup of
    /// -Ŵ'(ξ)/ξ otherwise. None when Ŵ dips negative or no m ∈ [0,1) works.
    fn h2_constant(&self) -> Option<f64> {
        let m = match self.family {
            Family::Contact => 0.0,
            Family::Gaussian | Family::Nematic => 2.0 * self.lambda * self.lambda,
            Family::Vanderwaals => {
                let (b, l) = (self.beta, self.lambda);
                4.0 * (-l).max(0.0) / (b * b * (b - 2.0 * l))
            }
            Family::ThreeDelta | Family::Custom | Family::Rectangular => {
                if !self.hat_nonnegative_on_grid() {
                    return None;
                }
                let step = 1e-5;
                let mut sup: f64 = 0.0;
                for &xi in xi_grid() {
                    let dw = (self.fourier_hat(xi + step) - self.fourier_hat(xi - step))
                        / (2.0 * step);
                    sup = sup.max(-dw / xi);
                }
                sup
            }
        };
        if m < 1.0 {
            Some(m.max(0.0))
        } else {
            None
        }
    }

    /// Smallest κ ≥ 0 with Ŵ ≥ (1 − κξ²)⁺ (the h5 flag), when one exists.
    fn h5_constant(&self) -> Option<f64> {
        match self.family {
            Family::Contact | Family::ThreeDelta => Some(0.0),
            Family::Gaussian | Family::Nematic => Some(self.lambda * self.lambda),
            Family::Vanderwaals => {
                let (b, l) = (self.beta, self.lambda);
                Some(2.0 * (-l).max(0.0) / (b * b * (b - 2.0 * l)))
            }
            Family::Rectangular => None, // sign-changing Ŵ
            Family::Custom => {
                if !self.hat_nonnegative_on_grid() {
                    return None;
                }
                let mut kappa: f64 = 0.0;
                for &xi in xi_grid() {
                    let w = self.fourier_hat(xi);
                    if w < 1.0 {
                        kappa = kappa.max((1.0 - w) / (xi * xi));
                    }
                }
                Some(kappa)
            }
        }
    }

    fn hat_nonnegative_on_grid(&self) -> bool {
        xi_grid().iter().all(|&xi| self.fourier_hat(xi) >= -1e-12)
    }

    /// 𝔰 = inf_ξ (Ŵ(ξ) + ξ²/2), by grid scan plus golden-section refinement.
    pub fn s_frak(&self) -> f64 {
        let f = |xi: f64| self.fourier_hat(xi) + 0.5 * xi * xi;
        let grid = xi_grid();
        let mut best = f(0.0);
        let mut best_idx = None;
        for (i, &xi) in grid.iter().enumerate() {
            let v = f(xi);
            if v < best {
                best = v;
                best_idx = Some(i);
            }
        }
        if let Some(i) = best_idx {
            let lo = if i == 0 { 0.0 } else { grid[i - 1] };
            let hi = if i + 1 == grid.len() { grid[i] * 2.0 } else { grid[i + 1] };
            let (_, v) = golden_min(f, lo, hi, 200);
            best = best.min(v);
        }
        best
    }

    /// Full hypothesis certificate for this kernel at speed c ∈ [0, √2).
    pub fn check_hypotheses(&self, c: f64) -> HypothesisReport {
        assert!((0.0..SONIC_SPEED).contains(&c), "speed must lie in [0, sqrt(2))");
        let s_frak = self.s_frak();
        let m = self.h2_constant();
        let kappa = self.h5_constant();
        let h3 = self.h3_data();
        let h4 = self.h4_data();
        let landau_speed = self.landau_speed();

        let h1_second_branch = match self.family {
            Family::ThreeDelta => false,
            Family::Custom => self.atoms.iter().all(|a| a.position == 0.0),
            _ => true,
        };

        let existence_msigmatau = match (m, h3) {
            (Some(m), Some((tau, sigma))) => match bound_m_tau_sigma(tau, sigma, c) {
                Some(big_m) => m * big_m < 1.0,
                None => false,
            },
            _ => false,
        };
        let existence_mmu = match (m, &h4) {
            (Some(m), Some(mu)) => m * bound_m_mu(mu.mu_plus, mu.mu_minus, c) < 1.0,
            _ => false,
        };

        HypothesisReport {
            s_frak,
            m,
            kappa,
            tau: h3.map(|t| t.0),
            sigma: h3.map(|t| t.1),
            mu_plus: h4.as_ref().map(|d| d.mu_plus),
            mu_minus: h4.as_ref().map(|d| d.mu_minus),
            a_mu: h4.as_ref().map(|d| d.a_mu),
            landau_speed,
            sonic_speed: SONIC_SPEED,
            flags: HypothesisFlags {
                h0: (self.fourier_hat(0.0) - 1.0).abs() <= 1e-12,
                h1: true,
                h2: m.is_some(),
                h3: h3.is_some(),
                h4: h4.is_some(),
                h5: kappa.is_some(),
                h1_second_branch,
                speed_below_existence_range: s_frak > 0.0 && c * c < 2.0 * s_frak,
                existence_msigmatau,
                existence_mmu,
            },
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MuDecomposition {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub a_mu: f64,
}

/// M(c, μ) = (1 + ‖μ⁺‖/(1 − ‖μ⁻‖)) (1 + c²/4).
pub fn bound_m_mu(mu_plus: f64, mu_minus: f64, c: f64) -> f64 {
    (1.0 + mu_plus / (1.0 - mu_minus)) * (1.0 + c * c / 4.0)
}

/// M(c, τ, σ) = (1 + c²/4) sec(τ√(8+2c²)/2) / (τσ); None when the secant
/// precondition τ < π/√(8+2c²) fails.
pub fn bound_m_tau_sigma(tau: f64, sigma: f64, c: f64) -> Option<f64> {
    let arg = 0.5 * tau * (8.0 + 2.0 * c * c).sqrt();
    if arg >= PI / 2.0 {
        return None;
    }
    Some((1.0 + c * c / 4.0) / (tau * sigma * arg.cos()))
}

pub(crate) fn tau_cap(c: f64) -> f64 {
    PI / (8.0 + 2.0 * c * c).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HypothesisFlags {
    pub h0: bool,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
    /// Alternative smoothness branch: ξ(Ŵ)'(ξ) bounded.
    pub h1_second_branch: bool,
    /// c < √(2𝔰), the speed range covered by the general existence theory.
    pub speed_below_existence_range: bool,
    /// τ admissible and m·M(c,τ,σ) < 1.
    pub existence_msigmatau: bool,
    /// m·M(c,μ) < 1.
    pub existence_mmu: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HypothesisReport {
    pub s_frak: f64,
    pub m: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub mu_plus: Option<f64>,
    pub mu_minus: Option<f64>,
    pub a_mu: Option<f64>,
    pub landau_speed: f64,
    pub sonic_speed: f64,
    pub flags: HypothesisFlags,
}

/// Log-spaced ξ grid used for all kernel-side infima and suprema.
pub(crate) fn xi_grid() -> &'static [f64] {
    static GRID: OnceLock<Vec<f64>> = OnceLock::new();
    GRID.get_or_init(|| {
        let n = 4096;
        let (lo, hi) = (1e-4f64, 1e3f64);
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
    })
}

/// First positive root of the boundary equation behind the gray-existence
/// threshold λ_c, i.e. coeff·(1 + c²/4)·λ²·sec(λ√(8+2c²)/2) = 1, where coeff
/// is 4e^{1/4}√π for the gaussian family and 4e for the nematic one.
pub(crate) fn lambda_c_root(coeff: f64, c: f64) -> f64 {
    let cap = tau_cap(c);
    let f = |l: f64| {
        let arg = 0.5 * l * (8.0 + 2.0 * c * c).sqrt();
        coeff * (1.0 + c * c / 4.0) * l * l / arg.cos() - 1.0
    };
    bisect(f, 1e-12, cap * (1.0 - 1e-12), 1e-14)
}
