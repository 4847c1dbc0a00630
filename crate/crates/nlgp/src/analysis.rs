//! Diagnostics: conserved quantities, first-integral defect, a-priori
//! bounds, mass sign, oscillation detection and prediction, speed/scale
//! thresholds, and nonlocal-to-local sweep metrics.

use serde::Serialize;
use thiserror::Error;

use crate::black::BlackProfile;
use crate::gray::GrayProfile;
use crate::kernel::{
    bound_m_mu, bound_m_tau_sigma, lambda_c_root, tau_cap, Family, Kernel, KernelError,
    KernelSpec,
};
use crate::spectral::{convolve, derivative, integrate, Field};
use crate::util::golden_max;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("tau = {tau} is too large for speed {c}: the secant bound needs tau < {limit}")]
    TauTooLarge { tau: f64, c: f64, limit: f64 },
    #[error("lambda list has {lambdas} entries but {profiles} profiles were supplied")]
    MismatchedLengths { lambdas: usize, profiles: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Either soliton flavor, for the shared diagnostics.
#[derive(Clone, Copy)]
pub enum Profile<'a> {
    Gray(&'a GrayProfile),
    Black(&'a BlackProfile),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagnosticsReport {
    pub energy: f64,
    /// Renormalized momentum; absent for black profiles and refused when the
    /// modulus dips below 1e−6 (no regularization of the 1 − 1/|u|² factor).
    pub momentum: Option<f64>,
    pub mass: f64,
    pub first_integral_defect: f64,
    pub eta_integral_sign_ok: bool,
    pub apriori_bound_ok: Option<bool>,
}

/// Energy, momentum and mass by quadrature, plus the bound checks.
pub fn conserved_quantities(profile: Profile<'_>, kernel: &Kernel) -> DiagnosticsReport {
    let (eta, up2, momentum, c, sup_mod2, defect) = match profile {
        Profile::Gray(p) => {
            let up2 = p.wave_derivative_squared();
            let momentum = if p.min_modulus() > 1e-6 {
                let d_re = crate::spectral::mirrored_derivative(p.u_re(), -p.u_re().values()[0], 1);
                let d_im = crate::spectral::mirrored_derivative(p.u_im(), p.u_im().values()[0], 1);
                // ⟨iu′, u⟩ = u_im u_re′ − u_re u_im′
                let integrand = Field::new(
                    p.grid(),
                    (0..p.grid().n())
                        .map(|j| {
                            let m2 = p.u_re().values()[j].powi(2) + p.u_im().values()[j].powi(2);
                            (p.u_im().values()[j] * d_re.values()[j]
                                - p.u_re().values()[j] * d_im.values()[j])
                                * (1.0 - 1.0 / m2)
                        })
                        .collect(),
                )
                .expect("finite integrand");
                Some(integrate(&integrand))
            } else {
                None
            };
            let sup_mod2 = 1.0 - p.eta().min_value();
            (
                p.eta().clone(),
                up2,
                momentum,
                p.c(),
                sup_mod2,
                p.first_integral_defect(),
            )
        }
        Profile::Black(p) => {
            let du = crate::spectral::mirrored_derivative(p.u(), -p.u().values()[0], 1);
            let up2 = du.map(|d| d * d);
            let eta_prime = derivative(p.eta(), 1);
            let mut defect = 0.0f64;
            for j in 0..p.grid().n() {
                let v = eta_prime.values()[j].powi(2)
                    - 4.0 * up2.values()[j] * (1.0 - p.eta().values()[j]);
                defect = defect.max(v.abs());
            }
            let sup_mod2 = 1.0 - p.eta().min_value();
            (p.eta().clone(), up2, None, 0.0, sup_mod2, defect)
        }
    };

    let w_eta = convolve(kernel, &eta);
    let energy =
        0.5 * integrate(&up2) + 0.25 * integrate(&w_eta.zip_map(&eta, |a, b| a * b));
    let mass = integrate(&eta);
    let nontrivial = eta.sup_norm() > 1e-10;
    let eta_integral_sign_ok = !nontrivial || (2.0 - c * c) * mass > 0.0;
    let apriori_bound_ok = match apriori_bounds(kernel, c) {
        Ok((m_mu, m_ts)) => {
            let best = match (m_mu, m_ts) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            best.map(|m| sup_mod2 <= m + 1e-8)
        }
        Err(_) => None,
    };

    DiagnosticsReport {
        energy,
        momentum,
        mass,
        first_integral_defect: defect,
        eta_integral_sign_ok,
        apriori_bound_ok,
    }
}

pub fn first_integral_defect(profile: &GrayProfile) -> f64 {
    profile.first_integral_defect()
}

/// A-priori sup-norm bounds (M(c,μ), M(c,τ,σ)) where the kernel's hypothesis
/// data makes them meaningful.
pub fn apriori_bounds(kernel: &Kernel, c: f64) -> Result<(Option<f64>, Option<f64>), AnalysisError> {
    let m_mu = kernel
        .check_hypotheses_mu_only()
        .map(|(mu_plus, mu_minus)| bound_m_mu(mu_plus, mu_minus, c));
    let m_ts = match kernel.check_hypotheses_tau_sigma_only() {
        Some((tau, sigma)) => match bound_m_tau_sigma(tau, sigma, c) {
            Some(m) => Some(m),
            None => {
                return Err(AnalysisError::TauTooLarge { tau, c, limit: tau_cap(c) });
            }
        },
        None => None,
    };
    Ok((m_mu, m_ts))
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationReport {
    pub sign_changes_of_eta_prime: usize,
    pub oscillation_triples: Vec<[f64; 3]>,
    /// Family-sharp criterion where one exists, otherwise the generic strong
    /// predicate; absent when no kernel information was supplied or the
    /// kernel has no registered Laplace transform.
    pub predicted_oscillatory: Option<bool>,
    pub threshold_lambda_tilde: Option<f64>,
}

/// Detect sign changes of η′ above the floor 1e−6·max|η′| and extract
/// alternating triples (x₁, x₂, x₃); optionally attach the kernel-side
/// prediction for the given speed.
pub fn oscillation_scan(
    eta: &Field,
    kernel_info: Option<(&KernelSpec, f64)>,
) -> OscillationReport {
    let eta_prime = derivative(eta, 1);
    let floor = 1e-6 * eta_prime.sup_norm();
    let grid = eta.grid();

    // runs of significant sign, each represented at its strongest node
    let mut runs: Vec<(f64, f64)> = Vec::new(); // (sign, position)
    let mut current: Option<(f64, f64, f64)> = None; // (sign, best |v|, position)
    for j in 0..grid.n() {
        let v = eta_prime.values()[j];
        if floor == 0.0 || v.abs() <= floor {
            continue;
        }
        let s = v.signum();
        match current {
            Some((cs, best, pos)) if cs == s => {
                if v.abs() > best {
                    current = Some((cs, v.abs(), grid.node(j)));
                } else {
                    current = Some((cs, best, pos));
                }
            }
            Some((cs, _, pos)) => {
                runs.push((cs, pos));
                current = Some((s, v.abs(), grid.node(j)));
            }
            None => current = Some((s, v.abs(), grid.node(j))),
        }
    }
    if let Some((cs, _, pos)) = current {
        runs.push((cs, pos));
    }

    let sign_changes = runs.windows(2).filter(|w| w[0].0 != w[1].0).count();
    let mut triples = Vec::new();
    for w in runs.windows(3) {
        if w[0].0 == -w[1].0 && w[1].0 == -w[2].0 {
            triples.push([w[0].1, w[1].1, w[2].1]);
        }
    }

    let (predicted, threshold) = match kernel_info {
        Some((spec, c)) => {
            let report = thresholds(spec, c);
            let threshold = report.lambda_tilde_c;
            let predicted = match spec.family {
                Family::Gaussian | Family::Nematic => {
                    threshold.map(|t| spec.lambda.unwrap_or(0.0) > t)
                }
                Family::Vanderwaals => report
                    .discriminant_root
                    .map(|r| r.class != RootClass::PositiveReal),
                _ => spec
                    .build()
                    .ok()
                    .and_then(|k| oscillation_predicate(&k, c).ok())
                    .map(|(_, strong)| strong),
            };
            (predicted, threshold)
        }
        None => (None, None),
    };

    OscillationReport {
        sign_changes_of_eta_prime: sign_changes,
        oscillation_triples: triples,
        predicted_oscillatory: predicted,
        threshold_lambda_tilde: threshold,
    }
}

/// Monotonicity check used for black solitons (Dirichlet-clamped node at −L
/// included).
pub fn is_nondecreasing(u: &Field, tol: f64) -> bool {
    u.values().windows(2).all(|w| w[1] >= w[0] - tol)
}

/// The two Laplace-side oscillation criteria on a log s-grid with divergence
/// handled through ±∞:
/// strict:  s² − 2W̌(s) + c² < 0      for all s ≥ 0,
/// strong:  s² − 2W̌(s) + c² < −2cs  for all s ≥ 0.
// the negated comparisons are deliberate: W̌ = ±∞ must settle the strict
// inequalities exactly as written
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn oscillation_predicate(kernel: &Kernel, c: f64) -> Result<(bool, bool), AnalysisError> {
    let mut points: Vec<f64> = vec![0.0];
    points.extend_from_slice(crate::kernel::xi_grid());
    // family-aware extra samples near divergence edges
    match kernel.family() {
        Family::Nematic => {
            let edge = 1.0 / kernel.lambda().abs();
            points.extend([edge * (1.0 - 1e-9), edge, edge * (1.0 + 1e-9)]);
        }
        Family::Vanderwaals => {
            let edge = kernel.beta();
            points.extend([edge * (1.0 - 1e-9), edge, edge * (1.0 + 1e-9)]);
        }
        _ => {}
    }
    let mut strict = true;
    let mut strong = true;
    for &s in &points {
        let w = kernel.laplace(s)?;
        let phi = s * s - 2.0 * w + c * c;
        if !(phi < 0.0) {
            strict = false;
        }
        if !(phi < -2.0 * c * s) {
            strong = false;
        }
        if !strict && !strong {
            break;
        }
    }
    Ok((strict, strong))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    NegativeReal,
    Complex,
    PositiveReal,
}

/// The classified square of the slowest characteristic root of the
/// vanderwaals linearization; oscillation is predicted unless it is a
/// positive real.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscriminantRoot {
    pub re: f64,
    pub im: f64,
    pub class: RootClass,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdReport {
    /// Existence threshold λ_c (gaussian/nematic).
    pub lambda_c: Option<f64>,
    /// Oscillation threshold λ̃_c (gaussian/nematic).
    pub lambda_tilde_c: Option<f64>,
    /// vanderwaals speed-dependent validity edge λ_{c,β} (a negative number).
    pub lambda_c_beta: Option<f64>,
    pub discriminant_root: Option<DiscriminantRoot>,
}

/// Family thresholds at speed c. Roots are found by bisection on the defining
/// boundary equations and re-verified by the tests against those equations.
pub fn thresholds(spec: &KernelSpec, c: f64) -> ThresholdReport {
    match spec.family {
        Family::Gaussian => {
            let coeff = 4.0 * (0.25f64).exp() * std::f64::consts::PI.sqrt();
            ThresholdReport {
                lambda_c: Some(lambda_c_root(coeff, c)),
                lambda_tilde_c: Some(gaussian_lambda_tilde(c)),
                lambda_c_beta: None,
                discriminant_root: None,
            }
        }
        Family::Nematic => {
            let coeff = 4.0 * std::f64::consts::E;
            ThresholdReport {
                lambda_c: Some(lambda_c_root(coeff, c)),
                lambda_tilde_c: Some(nematic_lambda_tilde(c)),
                lambda_c_beta: None,
                discriminant_root: None,
            }
        }
        Family::Vanderwaals => {
            let beta = spec.beta.unwrap_or(f64::NAN);
            let lambda_c_beta = if beta.is_finite() && beta > 0.0 {
                let from_m = if beta * beta < 2.0 {
                    beta.powi(3) / (2.0 * (2.0 - beta * beta))
                } else {
                    f64::INFINITY
                };
                let from_mu = beta.powi(3) / (4.0 + c * c);
                Some(-from_m.min(from_mu))
            } else {
                None
            };
            let discriminant_root = match (spec.beta, spec.lambda) {
                (Some(b), Some(l)) if b > 0.0 && l < b / 2.0 => {
                    Some(vanderwaals_root(b, l, c))
                }
                _ => None,
            };
            ThresholdReport {
                lambda_c: None,
                lambda_tilde_c: None,
                lambda_c_beta,
                discriminant_root,
            }
        }
        _ => ThresholdReport {
            lambda_c: None,
            lambda_tilde_c: None,
            lambda_c_beta: None,
            discriminant_root: None,
        },
    }
}

/// λ̃_c for the gaussian family: max over s ≥ √2 − c of √(ln₊((s+c)²/2))/s,
/// located by coarse scan plus golden-section refinement.
pub fn gaussian_lambda_tilde(c: f64) -> f64 {
    let lo = (std::f64::consts::SQRT_2 - c).max(1e-12);
    let f = |s: f64| {
        let t = ((s + c) * (s + c) / 2.0).ln();
        if t <= 0.0 {
            0.0
        } else {
            t.sqrt() / s
        }
    };
    let mut best_s = lo;
    let mut best = f(lo);
    let hi = lo + 60.0;
    let steps = 4000;
    for i in 0..=steps {
        let s = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    let (_, v) = golden_max(f, (best_s - 0.05).max(lo), best_s + 0.05, 200);
    v.max(best)
}

/// λ̃_c for the nematic family, closed form.
pub fn nematic_lambda_tilde(c: f64) -> f64 {
    if c == 0.0 {
        1.0 / 8.0f64.sqrt()
    } else {
        (4.0 - c * c - (8.0 * (2.0 - c * c)).sqrt()).sqrt() / (c * c)
    }
}

fn vanderwaals_root(beta: f64, lambda: f64, c: f64) -> DiscriminantRoot {
    let a = beta / (beta - 2.0 * lambda);
    let b2 = beta * beta;
    let big_b = b2 + 2.0 * a - c * c;
    let disc = big_b * big_b - 4.0 * b2 * (2.0 * a - c * c) - 16.0 * beta * a * lambda;
    if disc < 0.0 {
        DiscriminantRoot { re: big_b, im: -(-disc).sqrt(), class: RootClass::Complex }
    } else {
        let z = big_b - disc.sqrt();
        DiscriminantRoot {
            re: z,
            im: 0.0,
            class: if z < 0.0 { RootClass::NegativeReal } else { RootClass::PositiveReal },
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub distance_eta: f64,
    pub distance_u: f64,
}

/// Windowed sup-norm distances of gray profiles to the explicit local
/// soliton on [−L/2, L/2]; the solver's normalization (even η, θ(0) = −π/2)
/// is the alignment gauge.
pub fn gray_local_limit_sweep(
    c: f64,
    lambdas: &[f64],
    profiles: &[&GrayProfile],
) -> Result<Vec<SweepEntry>, AnalysisError> {
    if lambdas.len() != profiles.len() {
        return Err(AnalysisError::MismatchedLengths {
            lambdas: lambdas.len(),
            profiles: profiles.len(),
        });
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for (&lambda, p) in lambdas.iter().zip(profiles) {
        let grid = p.grid();
        let local = crate::gray::explicit_local_profile(c, grid);
        let half = grid.half_length() / 2.0;
        let mut d_eta = 0.0f64;
        let mut d_u = 0.0f64;
        for j in 0..grid.n() {
            if grid.node(j).abs() > half {
                continue;
            }
            d_eta = d_eta.max((p.eta().values()[j] - local.eta().values()[j]).abs());
            let dre = p.u_re().values()[j] - local.u_re().values()[j];
            let dim = p.u_im().values()[j] - local.u_im().values()[j];
            d_u = d_u.max((dre * dre + dim * dim).sqrt());
        }
        out.push(SweepEntry { lambda, distance_eta: d_eta, distance_u: d_u });
    }
    Ok(out)
}

/// Black-soliton analogue: distances to tanh(x/√2) on the central window.
pub fn black_local_limit_sweep(
    lambdas: &[f64],
    profiles: &[&BlackProfile],
) -> Result<Vec<SweepEntry>, AnalysisError> {
    if lambdas.len() != profiles.len() {
        return Err(AnalysisError::MismatchedLengths {
            lambdas: lambdas.len(),
            profiles: profiles.len(),
        });
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for (&lambda, p) in lambdas.iter().zip(profiles) {
        let grid = p.grid();
        let half = grid.half_length() / 2.0;
        let mut d_eta = 0.0f64;
        let mut d_u = 0.0f64;
        for j in 0..grid.n() {
            let x = grid.node(j);
            if x.abs() > half {
                continue;
            }
            let u_loc = (x / std::f64::consts::SQRT_2).tanh();
            d_u = d_u.max((p.u().values()[j] - u_loc).abs());
            d_eta = d_eta.max((p.eta().values()[j] - (1.0 - u_loc * u_loc)).abs());
        }
        out.push(SweepEntry { lambda, distance_eta: d_eta, distance_u: d_u });
    }
    Ok(out)
}

impl Kernel {
    pub(crate) fn check_hypotheses_mu_only(&self) -> Option<(f64, f64)> {
        self.h4_data().map(|d| (d.mu_plus, d.mu_minus))
    }

    pub(crate) fn check_hypotheses_tau_sigma_only(&self) -> Option<(f64, f64)> {
        self.h3_data()
    }
}
