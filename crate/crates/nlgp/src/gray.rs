//! Gray solitons (0 < c < √2): the profile equation for η = 1 − |u|², a
//! stabilized fixed-point iteration on its convolution form, a Newton–Krylov
//! method on the even subspace, continuation in the kernel scale, and phase
//! reconstruction of the complex wave.

use crate::kernel::{Kernel, KernelSpec, SONIC_SPEED};
use crate::solver::{Method, SolveError, SolveReport, SolverOptions};
use crate::spectral::{
    antiderivative_centered, apply_lc, check_lc_admissible, convolve, derivative, inner_product,
    mirrored_derivative, Field, Grid,
};

/// Iterates whose density gets this close to 1 leave the admissible set.
const ETA_CEILING: f64 = 1.0 - 1e-8;
/// Sup-norm below which an iterate counts as the trivial zero branch.
const COLLAPSE_FLOOR: f64 = 1e-10;

/// A computed gray soliton: even density profile η, phase θ anchored at
/// θ(0) = −π/2, and the complex wave u = √(1−η) e^{iθ}.
#[derive(Clone, Debug)]
pub struct GrayProfile {
    c: f64,
    eta: Field,
    theta: Field,
    u_re: Field,
    u_im: Field,
}

impl GrayProfile {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eta(&self) -> &Field {
        &self.eta
    }

    pub fn theta(&self) -> &Field {
        &self.theta
    }

    pub fn u_re(&self) -> &Field {
        &self.u_re
    }

    pub fn u_im(&self) -> &Field {
        &self.u_im
    }

    pub fn grid(&self) -> Grid {
        self.eta.grid()
    }

    pub fn min_modulus(&self) -> f64 {
        self.u_re
            .values()
            .iter()
            .zip(self.u_im.values())
            .fold(f64::INFINITY, |m, (&re, &im)| m.min((re * re + im * im).sqrt()))
    }

    /// u_re is odd and u_im even about 0, so the wave's derivative is taken
    /// with the mirror extension that matches those parities.
    pub fn wave_derivative_squared(&self) -> Field {
        let d_re = mirrored_derivative(&self.u_re, -self.u_re.values()[0], 1);
        let d_im = mirrored_derivative(&self.u_im, self.u_im.values()[0], 1);
        d_re.zip_map(&d_im, |a, b| a * a + b * b)
    }

    /// sup |c²η² + (η′)² − 4|u′|²(1−η)| over the grid.
    pub fn first_integral_defect(&self) -> f64 {
        let eta_prime = derivative(&self.eta, 1);
        let up2 = self.wave_derivative_squared();
        let c2 = self.c * self.c;
        let mut defect = 0.0f64;
        for j in 0..self.eta.grid().n() {
            let e = self.eta.values()[j];
            let ep = eta_prime.values()[j];
            let v = c2 * e * e + ep * ep - 4.0 * up2.values()[j] * (1.0 - e);
            defect = defect.max(v.abs());
        }
        defect
    }

    pub fn from_eta(c: f64, eta: Field) -> GrayProfile {
        let (theta, u_re, u_im) = reconstruct_phase(&eta, c);
        GrayProfile { c, eta, theta, u_re, u_im }
    }
}

/// Closed-form dark soliton of the contact-kernel equation:
/// η(x) = (1 − c²/2) sech²(√(2−c²) x/2), θ from its arctan formula.
pub fn explicit_local_profile(c: f64, grid: Grid) -> GrayProfile {
    assert!(c > 0.0 && c < SONIC_SPEED, "explicit profile needs 0 < c < sqrt(2)");
    let a = (2.0 - c * c).sqrt() / 2.0;
    let amp = 1.0 - c * c / 2.0;
    let eta = Field::from_fn(grid, |x| amp / (a * x).cosh().powi(2));
    let theta = Field::from_fn(grid, |x| {
        ((2.0 - c * c).sqrt() / c * (a * x).tanh()).atan() - std::f64::consts::FRAC_PI_2
    });
    let u_re = Field::from_fn(grid, |x| ((2.0 - c * c) / 2.0).sqrt() * (a * x).tanh());
    let u_im = Field::constant(grid, -c / SONIC_SPEED);
    GrayProfile { c, eta, theta, u_re, u_im }
}

/// Explicit η alone, handy as solver init.
pub fn explicit_local_eta(c: f64, grid: Grid) -> Field {
    let a = (2.0 - c * c).sqrt() / 2.0;
    let amp = 1.0 - c * c / 2.0;
    Field::from_fn(grid, |x| amp / (a * x).cosh().powi(2))
}

fn guard_eta(eta: &Field) -> Result<(), SolveError> {
    if eta.max_value() >= ETA_CEILING {
        return Err(SolveError::EtaTouchesOne);
    }
    Ok(())
}

/// F(η) = c²η²/(2(1−η)) + (η′)²/(2(1−η)) + 2η(𝒲∗η).
pub fn nonlinear_rhs(kernel: &Kernel, c: f64, eta: &Field) -> Result<Field, SolveError> {
    guard_eta(eta)?;
    let eta_prime = derivative(eta, 1);
    let w_eta = convolve(kernel, eta);
    let c2 = c * c;
    let mut out = Vec::with_capacity(eta.grid().n());
    for j in 0..eta.grid().n() {
        let e = eta.values()[j];
        let ep = eta_prime.values()[j];
        out.push((c2 * e * e + ep * ep) / (2.0 * (1.0 - e)) + 2.0 * e * w_eta.values()[j]);
    }
    Ok(Field::new(eta.grid(), out)?)
}

/// G_c(η) = η″ − 2𝒲∗η + c²η + F(η); zero exactly at profile solutions.
pub fn residual(kernel: &Kernel, c: f64, eta: &Field) -> Result<Field, SolveError> {
    guard_eta(eta)?;
    let lin = derivative(eta, 2)
        .zip_map(&convolve(kernel, eta), |a, b| a - 2.0 * b)
        .zip_map(eta, |a, b| a + c * c * b);
    Ok(lin.zip_map(&nonlinear_rhs(kernel, c, eta)?, |a, b| a + b))
}

/// Directional derivative ∂_η G_c(η)[σ].
pub fn linearized_apply(kernel: &Kernel, c: f64, eta: &Field, sigma: &Field) -> Field {
    let eta_prime = derivative(eta, 1);
    let w_eta = convolve(kernel, eta);
    linearized_apply_cached(kernel, c, eta, &eta_prime, &w_eta, sigma)
}

fn linearized_apply_cached(
    kernel: &Kernel,
    c: f64,
    eta: &Field,
    eta_prime: &Field,
    w_eta: &Field,
    sigma: &Field,
) -> Field {
    let c2 = c * c;
    let sigma_prime = derivative(sigma, 1);
    let w_sigma = convolve(kernel, sigma);
    let lin = derivative(sigma, 2).zip_map(&w_sigma, |a, b| a - 2.0 * b);
    let n = eta.grid().n();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let e = eta.values()[j];
        let ep = eta_prime.values()[j];
        let s = sigma.values()[j];
        let one_minus = 1.0 - e;
        let coeff = (c2 * e * (2.0 - e) + ep * ep) / (2.0 * one_minus * one_minus);
        out.push(
            lin.values()[j]
                + c2 * s
                + coeff * s
                + ep / one_minus * sigma_prime.values()[j]
                + 2.0 * w_eta.values()[j] * s
                + 2.0 * e * w_sigma.values()[j],
        );
    }
    Field::from_parts(eta.grid(), out)
}

/// θ(x) = (c/2)∫₀ˣ η/(1−η) − π/2 (spectral antiderivative), and the wave
/// u = √(1−η) e^{iθ}.
pub fn reconstruct_phase(eta: &Field, c: f64) -> (Field, Field, Field) {
    let integrand = eta.map(|e| 0.5 * c * e / (1.0 - e));
    let anti = antiderivative_centered(&integrand);
    let theta = anti.map(|v| v - std::f64::consts::FRAC_PI_2);
    let rho = eta.map(|e| (1.0 - e).sqrt());
    let u_re = rho.zip_map(&theta, |r, t| r * t.cos());
    let u_im = rho.zip_map(&theta, |r, t| r * t.sin());
    (theta, u_re, u_im)
}

fn finish(
    c: f64,
    eta: Field,
    iterations: usize,
    residual_sup: f64,
) -> Result<(GrayProfile, SolveReport), SolveError> {
    let eta_max = eta.max_value();
    if eta_max.abs() < COLLAPSE_FLOOR && eta.sup_norm() < COLLAPSE_FLOOR {
        return Err(SolveError::CollapseToZero {
            report: SolveReport::pending(iterations, residual_sup, eta_max),
        });
    }
    let profile = GrayProfile::from_eta(c, eta);
    let report = SolveReport {
        converged: true,
        iterations,
        residual_sup,
        eta_max,
        first_integral_defect: profile.first_integral_defect(),
    };
    Ok((profile, report))
}

/// Damped fixed-point iteration on η = 𝓛_c∗F(η), stabilized by a
/// Petviashvili factor and Anderson mixing. The raw damped map diverges near
/// every nontrivial profile (the linearization has an eigenvalue above 1), so
/// each step uses γ²·𝓛_c∗F(η) with γ = ⟨η, L₀η⟩/⟨η, F(η)⟩, which pins the
/// unstable amplitude mode; Anderson extrapolation over the last few iterates
/// removes the remaining slow modes.
pub fn solve_fixed_point(
    kernel: &Kernel,
    c: f64,
    init: &Field,
    opts: &SolverOptions,
) -> Result<(GrayProfile, SolveReport), SolveError> {
    opts.validate();
    assert!(c > 0.0 && c < SONIC_SPEED, "gray solves need 0 < c < sqrt(2)");
    check_lc_admissible(kernel, c, &init.grid())?;

    let mut eta = init.symmetrized_even();
    let d = opts.damping;
    const ANDERSON_DEPTH: usize = 4;
    let mut hist_eta: Vec<Field> = Vec::new();
    let mut hist_res: Vec<Field> = Vec::new();

    let mut res_sup = residual(kernel, c, &eta)?.sup_norm();
    let divergence_cap = 1e4 * res_sup.max(1.0);
    for it in 0..opts.max_iter {
        if eta.sup_norm() < COLLAPSE_FLOOR {
            return Err(SolveError::CollapseToZero {
                report: SolveReport::pending(it, res_sup, eta.max_value()),
            });
        }
        if res_sup < opts.tol {
            return finish(c, eta, it, res_sup);
        }
        if res_sup > divergence_cap {
            return Err(SolveError::NoConvergence {
                report: SolveReport::pending(it, res_sup, eta.max_value()),
            });
        }

        let rhs = nonlinear_rhs(kernel, c, &eta)?;
        let denom = inner_product(&eta, &rhs);
        if denom.abs() < 1e-300 {
            return Err(SolveError::CollapseToZero {
                report: SolveReport::pending(it, res_sup, eta.max_value()),
            });
        }
        let l0_eta = crate::spectral::apply_lc_inverse(kernel, c, &eta);
        let gamma = inner_product(&eta, &l0_eta) / denom;
        let picard = apply_lc(kernel, c, &rhs)?.scaled(gamma * gamma);

        let step = eta.zip_map(&picard, |e, p| (1.0 - d) * e + d * p).symmetrized_even();
        guard_eta(&step)?;
        let step_res = residual(kernel, c, &step)?.sup_norm();

        // Anderson extrapolation over the fixed-point residual step − η; the
        // candidate replaces the plain step only when it does not look worse
        let fp_res = step.zip_map(&eta, |a, b| a - b);
        hist_eta.push(eta.clone());
        hist_res.push(fp_res.clone());
        if hist_eta.len() > ANDERSON_DEPTH + 1 {
            hist_eta.remove(0);
            hist_res.remove(0);
        }
        let mut next = step.clone();
        let mut next_res = step_res;
        if hist_eta.len() >= 2 {
            if let Some(coeffs) = anderson_coefficients(&hist_res, &fp_res) {
                let mut cand = step;
                for (i, &gcoef) in coeffs.iter().enumerate() {
                    let de = hist_eta[i + 1].zip_map(&hist_eta[i], |a, b| a - b);
                    let dr = hist_res[i + 1].zip_map(&hist_res[i], |a, b| a - b);
                    cand = cand.zip_map(&de, |v, dl| v - gcoef * dl);
                    cand = cand.zip_map(&dr, |v, dl| v - gcoef * dl);
                }
                let cand = cand.symmetrized_even();
                if cand.max_value() < ETA_CEILING {
                    if let Ok(r) = residual(kernel, c, &cand) {
                        let rs = r.sup_norm();
                        if rs <= next_res {
                            next = cand;
                            next_res = rs;
                        }
                    }
                }
            }
        }

        eta = next;
        res_sup = next_res;
    }

    if res_sup < opts.tol {
        return finish(c, eta, opts.max_iter, res_sup);
    }
    Err(SolveError::NoConvergence {
        report: SolveReport::pending(opts.max_iter, res_sup, eta.max_value()),
    })
}

/// Least-squares Anderson mixing coefficients: minimize ‖res − ΔR γ‖₂ over
/// the residual-difference columns, via regularized normal equations (the
/// history depth is at most 4).
fn anderson_coefficients(hist_res: &[Field], res: &Field) -> Option<Vec<f64>> {
    let m = hist_res.len() - 1;
    let cols: Vec<Field> = (0..m)
        .map(|i| hist_res[i + 1].zip_map(&hist_res[i], |a, b| a - b))
        .collect();
    let mut gram = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = inner_product(&cols[i], &cols[j]);
        }
        rhs[i] = inner_product(&cols[i], res);
    }
    let trace: f64 = (0..m).map(|i| gram[i][i]).sum();
    if !trace.is_finite() || trace <= 0.0 {
        return None;
    }
    let reg = 1e-12 * trace / m as f64;
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += reg;
    }
    solve_dense(&mut gram, &mut rhs)
}

#[allow(clippy::needless_range_loop)]
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for cc in col..n {
                a[r][cc] -= f * a[col][cc];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for cc in col + 1..n {
            s -= a[col][cc] * x[cc];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Newton iteration on the even subspace: each step solves
/// ∂_η G_c(η)[σ] = −G_c(η) by 𝓛_c-preconditioned GMRES and updates η ← η + σ
/// with a residual-decrease backtracking line search.
pub fn solve_newton(
    kernel: &Kernel,
    c: f64,
    init: &Field,
    opts: &SolverOptions,
) -> Result<(GrayProfile, SolveReport), SolveError> {
    opts.validate();
    assert!(c > 0.0 && c < SONIC_SPEED, "gray solves need 0 < c < sqrt(2)");
    check_lc_admissible(kernel, c, &init.grid())?;

    let mut eta = init.symmetrized_even();
    guard_eta(&eta)?;

    for it in 0..opts.max_iter {
        let g = residual(kernel, c, &eta)?;
        let res_sup = g.sup_norm();
        if res_sup < opts.tol {
            return finish(c, eta, it, res_sup);
        }

        let eta_prime = derivative(&eta, 1);
        let w_eta = convolve(kernel, &eta);
        let apply = |s: &Field| -> Result<Field, SolveError> {
            let js = linearized_apply_cached(kernel, c, &eta, &eta_prime, &w_eta, s);
            Ok(apply_lc(kernel, c, &js)?.symmetrized_even())
        };
        let rhs = apply_lc(kernel, c, &g)?.scaled(-1.0).symmetrized_even();

        let inner_tol = (res_sup.sqrt() * 1e-2).clamp(1e-8, 1e-3);
        let (sigma, achieved) = gmres(&apply, &rhs, inner_tol, 200)?;
        if achieved > 0.5 {
            return Err(SolveError::LinearSolveStagnation {
                report: SolveReport::pending(it, res_sup, eta.max_value()),
                rel: achieved,
            });
        }
        let sigma = sigma.symmetrized_even();

        // keep the iterate inside {η < 1}, then insist on residual decrease
        let mut t = 1.0;
        for _ in 0..60 {
            if eta.zip_map(&sigma, |e, s| e + t * s).max_value() < ETA_CEILING {
                break;
            }
            t *= 0.5;
        }
        let mut accepted = None;
        for _ in 0..10 {
            let cand = eta.zip_map(&sigma, |e, s| e + t * s).symmetrized_even();
            if cand.max_value() < ETA_CEILING {
                let r = residual(kernel, c, &cand)?.sup_norm();
                if r <= res_sup * (1.0 - 1e-4 * t) || r < opts.tol {
                    accepted = Some(cand);
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some(next) => eta = next,
            None => {
                return Err(SolveError::NoConvergence {
                    report: SolveReport::pending(it, res_sup, eta.max_value()),
                })
            }
        }
    }

    let res_sup = residual(kernel, c, &eta)?.sup_norm();
    if res_sup < opts.tol {
        return finish(c, eta, opts.max_iter, res_sup);
    }
    Err(SolveError::NoConvergence {
        report: SolveReport::pending(opts.max_iter, res_sup, eta.max_value()),
    })
}

/// Dispatch on the configured method.
pub fn solve(
    kernel: &Kernel,
    c: f64,
    init: &Field,
    opts: &SolverOptions,
) -> Result<(GrayProfile, SolveReport), SolveError> {
    match opts.method {
        Method::FixedPoint => solve_fixed_point(kernel, c, init, opts),
        Method::Newton => solve_newton(kernel, c, init, opts),
    }
}

/// Newton first; on soft failure fall back to the fixed-point iteration and
/// polish its result with Newton.
pub fn solve_auto(
    kernel: &Kernel,
    c: f64,
    init: &Field,
    opts: &SolverOptions,
) -> Result<(GrayProfile, SolveReport), SolveError> {
    match solve_newton(kernel, c, init, opts) {
        Ok(out) => Ok(out),
        Err(SolveError::NoConvergence { .. }) | Err(SolveError::LinearSolveStagnation { .. }) => {
            let mut fp_opts = *opts;
            fp_opts.max_iter = opts.max_iter.max(500);
            fp_opts.tol = opts.tol.max(1e-6);
            let (profile, fp_report) = solve_fixed_point(kernel, c, init, &fp_opts)?;
            if fp_report.residual_sup < opts.tol {
                return Ok((profile, fp_report));
            }
            let (polished, mut report) = solve_newton(kernel, c, profile.eta(), opts)?;
            report.iterations += fp_report.iterations;
            Ok((polished, report))
        }
        Err(e) => Err(e),
    }
}

/// One entry of a continuation run.
#[derive(Clone, Debug)]
pub struct ContinuationStep {
    pub lambda: f64,
    pub profile: GrayProfile,
    pub report: SolveReport,
}

/// Warm-started chain over kernel scales: the smallest |λ| is solved from the
/// explicit local profile, and each later target starts from the previous
/// solution. λ = 0 entries use the contact kernel.
pub fn continue_family(
    base: &KernelSpec,
    c: f64,
    lambdas: &[f64],
    grid: Grid,
    opts: &SolverOptions,
) -> Result<Vec<ContinuationStep>, SolveError> {
    let mut out = Vec::with_capacity(lambdas.len());
    let mut init = explicit_local_eta(c, grid);
    for &lambda in lambdas {
        let kernel = base
            .with_lambda(lambda)
            .build()
            .map_err(|e| SolveError::ChainBroken { lambda, source: Box::new(e.into()) })?;
        let (profile, report) = solve(&kernel, c, &init, opts)
            .map_err(|e| SolveError::ChainBroken { lambda, source: Box::new(e) })?;
        init = profile.eta().clone();
        out.push(ContinuationStep { lambda, profile, report });
    }
    Ok(out)
}

/// Full-orthogonalization GMRES on fields; returns the approximate solution
/// and the achieved relative residual.
fn gmres(
    apply: &dyn Fn(&Field) -> Result<Field, SolveError>,
    b: &Field,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Field, f64), SolveError> {
    let b_norm = b.l2_norm();
    if b_norm == 0.0 {
        return Ok((Field::zeros(b.grid()), 0.0));
    }
    let mut basis: Vec<Field> = vec![b.scaled(1.0 / b_norm)];
    let mut hess: Vec<Vec<f64>> = Vec::new(); // hess[j][i] = H(i, j), column-major
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![b_norm];
    let mut rel = 1.0;

    for j in 0..max_iter {
        let mut w = apply(&basis[j])?;
        let mut col = Vec::with_capacity(j + 2);
        for v in &basis {
            let hij = inner_product(&w, v);
            w = w.zip_map(v, move |a, b| a - hij * b);
            col.push(hij);
        }
        let h_next = w.l2_norm();
        col.push(h_next);

        // apply accumulated Givens rotations to the new column
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = (col[j] * col[j] + col[j + 1] * col[j + 1]).sqrt();
        let (c_new, s_new) = if denom == 0.0 { (1.0, 0.0) } else { (col[j] / denom, col[j + 1] / denom) };
        cs.push(c_new);
        sn.push(s_new);
        col[j] = denom;
        col[j + 1] = 0.0;
        g.push(-s_new * g[j]);
        g[j] *= c_new;
        hess.push(col);

        rel = g[j + 1].abs() / b_norm;
        if rel <= rel_tol || h_next < 1e-14 {
            let y = back_substitute(&hess, &g, j + 1);
            let mut x = Field::zeros(b.grid());
            for (i, &yi) in y.iter().enumerate() {
                x = x.zip_map(&basis[i], move |a, b| a + yi * b);
            }
            return Ok((x, rel));
        }
        basis.push(w.scaled(1.0 / h_next));
    }

    let k = hess.len();
    let y = back_substitute(&hess, &g, k);
    let mut x = Field::zeros(b.grid());
    for (i, &yi) in y.iter().enumerate() {
        x = x.zip_map(&basis[i], move |a, b| a + yi * b);
    }
    Ok((x, rel))
}

fn back_substitute(hess: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= hess[j][i] * y[j];
        }
        y[i] = s / hess[i][i];
    }
    y
}
