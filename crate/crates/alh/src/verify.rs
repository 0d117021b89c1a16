//! Batch verification suites: every defining identity of the operator
//! algebra, the scattering theory, the kernel conditions, the Lenard chain,
//! flow commutation, and the Jacobi probe, reported as machine-readable
//! check results.

use serde::Serialize;

use crate::error::Result;
use crate::flows::{self, FlowKind};
use crate::functionals::{self, BracketKind, Functional};
use crate::lattice::{bilinear_form, pair_state, random_state, LatticeState, Window};
use crate::operators::{self, interior_entry_diff, interior_entry_norm, OpName};
use crate::scattering::{self, ResolventKind};
use crate::C64;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub case: String,
    /// Relative (scale-normalized) error unless the case says otherwise.
    pub metric: f64,
    pub tol: f64,
    pub pass: bool,
    /// Diagnostic cases report a magnitude but never fail the run.
    pub diagnostic: bool,
}

impl CheckResult {
    fn check(suite: &str, case: impl Into<String>, metric: f64, tol: f64) -> CheckResult {
        CheckResult {
            suite: suite.into(),
            case: case.into(),
            metric,
            tol,
            pass: metric.is_finite() && metric <= tol,
            diagnostic: false,
        }
    }

    fn diagnostic(suite: &str, case: impl Into<String>, metric: f64, tol: f64) -> CheckResult {
        CheckResult {
            suite: suite.into(),
            case: case.into(),
            metric,
            tol,
            pass: true,
            diagnostic: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: usize,
    pub amplitude: f64,
    pub seeds: Vec<u64>,
    pub z_set: Vec<C64>,
    pub n_max: usize,
    pub resolvent_terms: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 32,
            amplitude: 0.1,
            seeds: vec![42, 43, 44],
            z_set: vec![C64::new(2.0, 0.0), C64::new(1.7, 0.3), C64::new(0.0, 3.0)],
            n_max: 4,
            resolvent_terms: 30,
        }
    }
}

impl SuiteConfig {
    fn state(&self, seed: u64) -> Result<LatticeState> {
        random_state(self.n, seed, self.amplitude, 0.15)
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "operators",
    "resolvent",
    "kernel",
    "lenard",
    "commute",
    "jacobi",
];

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    match name {
        "operators" => suite_operator_identities(cfg),
        "resolvent" => suite_resolvent(cfg),
        "kernel" => suite_kernel(cfg),
        "lenard" => suite_lenard(cfg),
        "commute" => suite_commute(cfg),
        "jacobi" => suite_jacobi(cfg),
        "all" => {
            let mut out = Vec::new();
            for s in SUITE_NAMES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        other => Err(crate::error::AlError::InvalidInput(format!(
            "unknown suite `{other}`"
        ))),
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1e-12)
}

// ---------------------------------------------------------------------------
// Operator identities
// ---------------------------------------------------------------------------

pub fn suite_operator_identities(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "operators";
    let mut out = Vec::new();
    let margin = 3;
    for &seed in &cfg.seeds {
        let s = cfg.state(seed)?;
        let n = s.n();
        let l = operators::assemble(OpName::L, &s)?;
        let linv = operators::assemble(OpName::Linv, &s)?;
        let lp = operators::assemble(OpName::Lplus, &s)?;
        let lm = operators::assemble(OpName::Lminus, &s)?;
        let s3 = operators::assemble(OpName::Sigma3, &s)?;
        let scale = interior_entry_norm(&lp.entries, n, 0).max(1.0);

        // Lplus is the sum of the two one-sided operators, entry by entry.
        let sum = &l.entries + &linv.entries;
        let d = (&lp.entries - &sum).map(|v| v.norm()).max();
        out.push(CheckResult::check(
            SUITE,
            format!("Lplus = L + Linv (seed {seed})"),
            rel(d, scale),
            1e-13,
        ));

        // L and Linv invert each other on interior rows/columns.
        let prod1 = &l.entries * &linv.entries;
        let prod2 = &linv.entries * &l.entries;
        let id = nalgebra::DMatrix::<C64>::identity(2 * n, 2 * n);
        let d = interior_entry_diff(&prod1, &id, n, margin)
            .max(interior_entry_diff(&prod2, &id, n, margin));
        out.push(CheckResult::check(
            SUITE,
            format!("L Linv = Linv L = I (seed {seed})"),
            d,
            1e-9,
        ));

        // Lplus acting on the potential gives the weighted sum of shifts.
        let got = operators::apply(&lp, &s.rq_field())?;
        let mut d = 0.0f64;
        let mut fscale = 0.0f64;
        for k in s.window.iter() {
            let w = s.weight(k);
            let e1 = w * (s.r_at(k + 1) + s.r_at(k - 1));
            let e2 = w * (s.q_at(k + 1) + s.q_at(k - 1));
            d = d
                .max((got.c1_at(k) - e1).norm())
                .max((got.c2_at(k) - e2).norm());
            fscale = fscale.max(e1.norm()).max(e2.norm());
        }
        out.push(CheckResult::check(
            SUITE,
            format!("Lplus(r,q) closed form (seed {seed})"),
            rel(d, fscale),
            1e-12,
        ));

        // Direct closed forms of the adjoints against the assembled adjoint.
        let lstar = operators::assemble(OpName::Lstar, &s)?;
        let ladj = operators::adjoint(&l, &s)?;
        let d = interior_entry_diff(&lstar.entries, &ladj.entries, n, margin);
        out.push(CheckResult::check(
            SUITE,
            format!("Lstar closed form (seed {seed})"),
            rel(d, scale),
            1e-10,
        ));
        let listar = operators::assemble(OpName::Linvstar, &s)?;
        let liadj = operators::adjoint(&linv, &s)?;
        let d = interior_entry_diff(&listar.entries, &liadj.entries, n, margin);
        out.push(CheckResult::check(
            SUITE,
            format!("Linvstar closed form (seed {seed})"),
            rel(d, scale),
            1e-10,
        ));

        // Lminus = sigma3 (Lstar + Linvstar) sigma3 entrywise.
        let conj = &s3.entries * (&lstar.entries + &listar.entries) * &s3.entries;
        let d = (&lm.entries - &conj).map(|v| v.norm()).max();
        out.push(CheckResult::check(
            SUITE,
            format!("Lminus = sigma3(Lstar + Linvstar)sigma3 (seed {seed})"),
            rel(d, scale),
            1e-13,
        ));

        // Lminus vs sigma3 Lplus* sigma3 through the assembled adjoint.
        let lpadj = operators::adjoint(&lp, &s)?;
        let conj = &s3.entries * &lpadj.entries * &s3.entries;
        let d = interior_entry_diff(&lm.entries, &conj, n, margin);
        out.push(CheckResult::check(
            SUITE,
            format!("Lminus = sigma3 Lplus* sigma3 (seed {seed})"),
            rel(d, scale),
            1e-10,
        ));

        // R = B (Lplus + Lminus) Binv entrywise.
        let r = operators::assemble(OpName::R, &s)?;
        let b = operators::assemble(OpName::B, &s)?;
        let binv = operators::assemble(OpName::Binv, &s)?;
        let conj = &b.entries * (&lp.entries + &lm.entries) * &binv.entries;
        let d = (&r.entries - &conj).map(|v| v.norm()).max();
        out.push(CheckResult::check(
            SUITE,
            format!("R = B(Lplus + Lminus)Binv (seed {seed})"),
            rel(d, scale),
            1e-13,
        ));

        // R* = sigma3 R sigma3.
        let radj = operators::adjoint(&r, &s)?;
        let conj = &s3.entries * &r.entries * &s3.entries;
        let d = interior_entry_diff(&radj.entries, &conj, n, margin);
        out.push(CheckResult::check(
            SUITE,
            format!("R* = sigma3 R sigma3 (seed {seed})"),
            rel(d, interior_entry_norm(&r.entries, n, 0).max(1.0)),
            1e-10,
        ));

        // Lplus - Lminus decomposes into the two whole-lattice-sum pieces.
        let d1 = operators::assemble(OpName::D1, &s)?;
        let d2 = operators::assemble(OpName::D2, &s)?;
        let lhs = &lp.entries - &lm.entries;
        let rhs = &d1.entries + &d2.entries;
        let d = interior_entry_diff(&lhs, &rhs, n, 2);
        out.push(CheckResult::check(
            SUITE,
            format!("Lplus - Lminus = D1 + D2 (seed {seed})"),
            rel(d, scale),
            1e-12,
        ));

        // Skewness of K and J in the bilinear form.
        let k_op = operators::assemble(OpName::K, &s)?;
        let j_op = operators::assemble(OpName::J, &s)?;
        for (op, opname, tol) in [(&k_op, "K", 1e-10), (&j_op, "J", 1e-12)] {
            let mut worst = 0.0f64;
            for pair in 0..10u64 {
                let u = random_state(s.n(), 1000 + 17 * seed + pair, 0.3, 0.0)?.qr_field();
                let v = random_state(s.n(), 2000 + 31 * seed + pair, 0.3, 0.0)?.qr_field();
                let uv = bilinear_form(&u, &operators::apply(op, &v)?, &s)?;
                let vu = bilinear_form(&v, &operators::apply(op, &u)?, &s)?;
                let nscale = (u.norm_inf() * v.norm_inf()).max(1e-12);
                worst = worst.max((uv + vu).norm() / nscale);
            }
            out.push(CheckResult::check(
                SUITE,
                format!("{opname} skew-symmetric, 10 pairs (seed {seed})"),
                worst,
                tol,
            ));
        }
    }

    // Error path: a state with 1 - q r ~ 0 must surface SingularState from
    // the assembler instead of producing garbage.
    let w = Window::centered(cfg.n)?;
    let mut q = vec![C64::default(); cfg.n];
    let mut r = vec![C64::default(); cfg.n];
    q[cfg.n / 2] = C64::new(1.0, 0.0);
    r[cfg.n / 2] = C64::new(1.0 - 1e-12, 0.0);
    let bad = LatticeState { window: w, q, r };
    let surfaced = matches!(
        operators::assemble(OpName::L, &bad),
        Err(crate::error::AlError::SingularState { .. })
    );
    out.push(CheckResult::check(
        "operators",
        "near-singular state surfaces SingularState".to_string(),
        if surfaced { 0.0 } else { 1.0 },
        0.5,
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Resolvent identities and the squared-eigenfunction identity set
// ---------------------------------------------------------------------------

pub fn suite_resolvent(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "resolvent";
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let s = cfg.state(seed)?;
        for &z in &cfg.z_set {
            // The L expansion converges for |z| > 1; the Linv expansion is
            // evaluated at the reciprocal point.
            let sum = scattering::resolvent_series(&s, z, ResolventKind::L, cfg.resolvent_terms)?;
            let reference = scattering::resolvent_reference(&s, z, ResolventKind::L)?;
            let d = sum.field.sub(&reference).norm_inf_interior(2);
            out.push(CheckResult::check(
                SUITE,
                format!("resolvent L at z={z} (seed {seed})"),
                rel(d, reference.norm_inf()),
                1e-8,
            ));

            let zr = C64::new(1.0, 0.0) / z;
            let sum =
                scattering::resolvent_series(&s, zr, ResolventKind::Linv, cfg.resolvent_terms)?;
            let reference = scattering::resolvent_reference(&s, zr, ResolventKind::Linv)?;
            let d = sum.field.sub(&reference).norm_inf_interior(2);
            out.push(CheckResult::check(
                SUITE,
                format!("resolvent Linv at z={zr} (seed {seed})"),
                rel(d, reference.norm_inf()),
                1e-8,
            ));
        }

        // Near the unit circle the Neumann sum converges slowly; report the
        // residual as a diagnostic with a relaxed threshold.
        let z = C64::new(1.05, 0.0);
        let sum = scattering::resolvent_series(&s, z, ResolventKind::L, 4 * cfg.resolvent_terms)?;
        let reference = scattering::resolvent_reference(&s, z, ResolventKind::L)?;
        let d = sum.field.sub(&reference).norm_inf_interior(2);
        out.push(CheckResult::diagnostic(
            SUITE,
            format!("resolvent L near unit circle z={z} (seed {seed})"),
            rel(d, reference.norm_inf()),
            1e-5,
        ));
    }

    // Squared-eigenfunction identity set: two seeds, two z-points.
    for &seed in cfg.seeds.iter().take(2) {
        let s = cfg.state(seed)?;
        for &z in cfg.z_set.iter().take(2) {
            out.extend(squared_eigen_identities(&s, z, seed)?);
        }
    }
    Ok(out)
}

/// Residuals of the per-site identities satisfied by the squared
/// eigenfunctions, plain and hatted, all at tolerance 1e-9.
fn squared_eigen_identities(s: &LatticeState, z: C64, seed: u64) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "resolvent";
    const TOL: f64 = 1e-9;
    let mut out = Vec::new();
    let j = scattering::jost(s, z)?;
    let se = scattering::squared_eigen_from_jost(s, &j)?;
    let one = C64::new(1.0, 0.0);
    let zi = one / z;
    let z2 = z * z;
    let zi2 = zi * zi;
    let tag = |name: &str| format!("{name} at z={z} (seed {seed})");

    // W-recursion W_{k+1} = E_k W_k E_{k+1}^{-1}, plain and hatted.
    let mut d_plain = 0.0f64;
    let mut d_hat = 0.0f64;
    for k in s.window.interior(1) {
        if k + 1 > s.window.k_max {
            continue;
        }
        let e = scattering::transfer_matrix(s, k, z);
        let einv = scattering::transfer_matrix_inv(s, k + 1, z)?;
        let lhs = se.w_at(k + 1);
        let rhs = e * se.w_at(k) * einv;
        d_plain = d_plain.max((lhs - rhs).norm());
        let lhs = se.w_hat_at(k + 1);
        let rhs = e * se.w_hat_at(k) * einv;
        d_hat = d_hat.max((lhs - rhs).norm());
    }
    out.push(CheckResult::check(SUITE, tag("W recursion"), d_plain, TOL));
    out.push(CheckResult::check(SUITE, tag("W recursion (hat)"), d_hat, TOL));

    // Unit identities.
    let mut d_plain = 0.0f64;
    let mut d_hat = 0.0f64;
    for k in s.window.iter() {
        let u = (s.r_at(k) * se.alpha_at(k) + zi * se.delta_at(k))
            - (s.q_at(k) * se.beta_at(k) + z * se.gamma_at(k));
        d_plain = d_plain.max((u - one).norm());
        let u = (s.r_at(k) * se.alpha_hat_at(k) + zi * se.delta_hat_at(k))
            - (s.q_at(k) * se.beta_hat_at(k) + z * se.gamma_hat_at(k));
        d_hat = d_hat.max((u + one).norm());
    }
    out.push(CheckResult::check(SUITE, tag("unit identity"), d_plain, TOL));
    out.push(CheckResult::check(SUITE, tag("unit identity (hat)"), d_hat, TOL));

    // Per-site abbreviations: T_k = q beta + z gamma and the right tail sum
    // S_k = sum_{j >= k+1} (q beta + r alpha)_j, plus hatted versions.
    let t_at = |k: i64| s.q_at(k) * se.beta_at(k) + z * se.gamma_at(k);
    let that_at = |k: i64| s.q_at(k) * se.beta_hat_at(k) + z * se.gamma_hat_at(k);
    let s_at = |k: i64| -> C64 {
        s.window
            .iter()
            .filter(|&j| j >= k + 1)
            .map(|j| s.q_at(j) * se.beta_at(j) + s.r_at(j) * se.alpha_at(j))
            .sum()
    };
    let shat_at = |k: i64| -> C64 {
        s.window
            .iter()
            .filter(|&j| j >= k + 1)
            .map(|j| s.q_at(j) * se.beta_hat_at(j) + s.r_at(j) * se.alpha_hat_at(j))
            .sum()
    };

    // Shift identities for the generating vector (1 - rq)(beta, -alpha)^T
    // and its hatted counterpart (1 - rq)(-beta_hat, alpha_hat)^T.
    let mut d_psh = 0.0f64;
    let mut d_msh = 0.0f64;
    let mut d_psh_hat = 0.0f64;
    let mut d_msh_hat = 0.0f64;
    for k in s.window.interior(1) {
        let w = s.weight(k);
        let (q, r) = (s.q_at(k), s.r_at(k));
        let (qp, rp) = (s.q_at(k + 1), s.r_at(k + 1));
        let (qm, rm) = (s.q_at(k - 1), s.r_at(k - 1));
        let wp = s.weight(k + 1);
        let wm = s.weight(k - 1);
        let t = t_at(k);
        let rad = r * se.alpha_at(k) + zi * se.delta_at(k); // = 1 + t

        // plus-shift
        let lhs1 = wp * se.beta_at(k + 1);
        let lhs2 = -wp * se.alpha_at(k + 1);
        let rhs1 = zi2 * (w * se.beta_at(k) - r) + (rp + zi2 * r) * (t + one);
        let rhs2 = z2 * (-w * se.alpha_at(k) - q) + (qp + z2 * q) * (-(rad - one));
        d_psh = d_psh.max((lhs1 - rhs1).norm()).max((lhs2 - rhs2).norm());

        // minus-shift
        let tm = t_at(k - 1);
        let radm = s.r_at(k - 1) * se.alpha_at(k - 1) + zi * se.delta_at(k - 1);
        let lhs1 = wm * se.beta_at(k - 1);
        let lhs2 = -wm * se.alpha_at(k - 1);
        let rhs1 = z2 * (w * se.beta_at(k) - r) + (rm + z2 * r) * (-tm);
        let rhs2 = zi2 * (-w * se.alpha_at(k) - q) + (qm + zi2 * q) * radm;
        d_msh = d_msh.max((lhs1 - rhs1).norm()).max((lhs2 - rhs2).norm());

        // hatted plus-shift: factor vector (1 - That, That)
        let th = that_at(k);
        let lhs1 = wp * (-se.beta_hat_at(k + 1));
        let lhs2 = wp * se.alpha_hat_at(k + 1);
        let rhs1 = zi2 * (-w * se.beta_hat_at(k) - r) + (rp + zi2 * r) * (one - th);
        let rhs2 = z2 * (w * se.alpha_hat_at(k) - q) + (qp + z2 * q) * th;
        d_psh_hat = d_psh_hat.max((lhs1 - rhs1).norm()).max((lhs2 - rhs2).norm());

        // hatted minus-shift: factor vector E^-(That, 1 - That)
        let thm = that_at(k - 1);
        let lhs1 = wm * (-se.beta_hat_at(k - 1));
        let lhs2 = wm * se.alpha_hat_at(k - 1);
        let rhs1 = z2 * (-w * se.beta_hat_at(k) - r) + (rm + z2 * r) * thm;
        let rhs2 = zi2 * (w * se.alpha_hat_at(k) - q) + (qm + zi2 * q) * (one - thm);
        d_msh_hat = d_msh_hat.max((lhs1 - rhs1).norm()).max((lhs2 - rhs2).norm());
    }
    out.push(CheckResult::check(SUITE, tag("plus-shift identity"), d_psh, TOL));
    out.push(CheckResult::check(SUITE, tag("minus-shift identity"), d_msh, TOL));
    out.push(CheckResult::check(SUITE, tag("plus-shift identity (hat)"), d_psh_hat, TOL));
    out.push(CheckResult::check(SUITE, tag("minus-shift identity (hat)"), d_msh_hat, TOL));

    // Factor identities expressing the delta/gamma-dependent combinations as
    // right tail sums: T_k = -S_k, (r alpha + z^-1 delta)_k = 1 - S_k, and
    // the hatted versions That_k = 1 - Shat_k,
    // (r alpha_hat + z^-1 delta_hat)_k = -Shat_k.
    let mut d_fac = 0.0f64;
    let mut d_fac_hat = 0.0f64;
    for k in s.window.iter() {
        let sk = s_at(k);
        d_fac = d_fac.max((t_at(k) + sk).norm());
        let rad = s.r_at(k) * se.alpha_at(k) + zi * se.delta_at(k);
        d_fac = d_fac.max((rad - one + sk).norm());

        let shk = shat_at(k);
        d_fac_hat = d_fac_hat.max((that_at(k) - one + shk).norm());
        let radh = s.r_at(k) * se.alpha_hat_at(k) + zi * se.delta_hat_at(k);
        d_fac_hat = d_fac_hat.max((radh + shk).norm());
    }
    out.push(CheckResult::check(SUITE, tag("factor identity"), d_fac, TOL));
    out.push(CheckResult::check(SUITE, tag("factor identity (hat)"), d_fac_hat, TOL));

    // Orthogonality sums over the whole window.
    let d = s_at(s.window.k_min - 1).norm();
    out.push(CheckResult::check(SUITE, tag("orthogonality sum"), d, TOL));
    let d = shat_at(s.window.k_min - 1).norm();
    out.push(CheckResult::check(SUITE, tag("orthogonality sum (hat)"), d, TOL));

    Ok(out)
}

// ---------------------------------------------------------------------------
// Kernel conditions
// ---------------------------------------------------------------------------

pub fn suite_kernel(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "kernel";
    let mut out = Vec::new();
    let mut states: Vec<(String, LatticeState)> = vec![(
        "pair".into(),
        pair_state(
            cfg.n,
            0,
            C64::new(0.1, 0.0),
            1,
            C64::new(0.2, 0.0),
        )?,
    )];
    for &seed in &cfg.seeds {
        states.push((format!("seed {seed}"), cfg.state(seed)?));
    }
    for (label, s) in &states {
        let lp = operators::assemble(OpName::Lplus, s)?;
        let lm = operators::assemble(OpName::Lminus, s)?;
        let l = operators::assemble(OpName::L, s)?;
        let linv = operators::assemble(OpName::Linv, s)?;
        let d1 = operators::assemble(OpName::D1, s)?;
        let d2 = operators::assemble(OpName::D2, s)?;
        let margin = 2 + cfg.n_max;

        // (Lplus - Lminus) Lplus^n (r, q)^T = 0 on the interior.
        for n in 0..=cfg.n_max {
            let base = operators::power_apply(&lp, &s.rq_field(), n)?;
            let scale = base.norm_inf().max(1e-12);
            let diff = operators::apply(&lp, &base)?
                .sub(&operators::apply(&lm, &base)?);
            out.push(CheckResult::check(
                SUITE,
                format!("(Lplus - Lminus) Lplus^{n} (r,q) = 0 ({label})"),
                diff.norm_inf_interior(margin) / scale,
                1e-8,
            ));
        }

        // D1 and D2 annihilate L^m (r,q) and Linv^m (r,q).
        for m in 0..=3usize {
            for (opname, op) in [("L", &l), ("Linv", &linv)] {
                let base = operators::power_apply(op, &s.rq_field(), m)?;
                let scale = base.norm_inf().max(1e-12);
                for (dn, dop) in [("D1", &d1), ("D2", &d2)] {
                    let v = operators::apply(dop, &base)?;
                    out.push(CheckResult::check(
                        SUITE,
                        format!("{dn} {opname}^{m} (r,q) = 0 ({label})"),
                        v.norm_inf_interior(margin) / scale,
                        1e-8,
                    ));
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Lenard chain
// ---------------------------------------------------------------------------

pub fn suite_lenard(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "lenard";
    let mut out = Vec::new();
    let mut constants: Vec<C64> = Vec::new();
    for &seed in &cfg.seeds {
        let s = cfg.state(seed)?;
        let j_op = operators::assemble(OpName::J, &s)?;
        let k_op = operators::assemble(OpName::K, &s)?;

        // The combination 2(C1 + C1hat) is the second Hamiltonian of the
        // chain: X_1 = J grad of it.
        let x1 = flows::vector_field(&FlowKind::Hierarchy(1), &s)?;
        let g1 = functionals::discrete_gradient(&Functional::C1, &s)?
            .add(&functionals::discrete_gradient(&Functional::C1hat, &s)?)
            .scale(C64::new(2.0, 0.0));
        let jg1 = operators::apply(&j_op, &g1)?;
        let scale = x1.norm_inf().max(1e-12);
        out.push(CheckResult::check(
            SUITE,
            format!("X_1 = J grad(2(C1 + C1hat)) (seed {seed})"),
            x1.sub(&jg1).norm_inf_interior(2) / scale,
            1e-8,
        ));

        // Measure the X_1 / AL-field proportionality constant at the largest
        // interior component.
        let al = flows::vector_field(&FlowKind::Al, &s)?;
        let mut best = (0.0f64, C64::default(), C64::default());
        for k in s.window.interior(2) {
            if al.c1_at(k).norm() > best.0 {
                best = (al.c1_at(k).norm(), x1.c1_at(k), al.c1_at(k));
            }
        }
        let c = best.1 / best.2;
        constants.push(c);
        out.push(CheckResult::diagnostic(
            SUITE,
            format!("measured X_1 / AL constant = {c} (seed {seed})"),
            c.im.abs(),
            1e-9,
        ));

        // K grad H0 = J grad(2(C1 + C1hat)).
        let g0 = functionals::discrete_gradient(&Functional::H0, &s)?;
        let kg0 = operators::apply(&k_op, &g0)?;
        out.push(CheckResult::check(
            SUITE,
            format!("K grad H0 = J grad(2(C1 + C1hat)) (seed {seed})"),
            kg0.sub(&jg1).norm_inf_interior(2) / scale,
            1e-8,
        ));

        // X_2 = K grad(2(C1 + C1hat)).
        let x2 = flows::vector_field(&FlowKind::Hierarchy(2), &s)?;
        let kg1 = operators::apply(&k_op, &g1)?;
        let scale = x2.norm_inf().max(1e-12);
        out.push(CheckResult::check(
            SUITE,
            format!("X_2 = K grad(2(C1 + C1hat)) (seed {seed})"),
            x2.sub(&kg1).norm_inf_interior(3) / scale,
            1e-7,
        ));
    }

    // The measured constant must be stable across seeds.
    let mut spread = 0.0f64;
    for a in &constants {
        for b in &constants {
            spread = spread.max((a - b).norm());
        }
    }
    out.push(CheckResult::check(
        SUITE,
        format!("X_1 / AL constant stable across seeds ({})", constants[0]),
        spread,
        1e-10,
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Flow commutation
// ---------------------------------------------------------------------------

pub fn suite_commute(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "commute";
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let s = cfg.state(seed)?;
        for (m, n, tol) in [(0u32, 1u32, 1e-5), (1, 2, 1e-5)] {
            let d = flows::commutator_defect(m, n, &s, 1e-5)?;
            out.push(CheckResult::check(
                SUITE,
                format!("[X_{m}, X_{n}] defect (seed {seed})"),
                d,
                tol,
            ));
        }
        // Conserved quantities commute in the J bracket.
        let v = functionals::bracket(&Functional::C1, &Functional::H0, &s, BracketKind::J)?
            + functionals::bracket(&Functional::C1hat, &Functional::H0, &s, BracketKind::J)?;
        out.push(CheckResult::check(
            SUITE,
            format!("{{C1 + C1hat, H0}}_J (seed {seed})"),
            v.norm(),
            1e-9,
        ));
        let v = functionals::bracket(&Functional::C1, &Functional::C1hat, &s, BracketKind::J)?;
        out.push(CheckResult::check(
            SUITE,
            format!("{{C1, C1hat}}_J (seed {seed})"),
            v.norm(),
            1e-9,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Jacobi probe
// ---------------------------------------------------------------------------

pub fn suite_jacobi(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "jacobi";
    let mut out = Vec::new();
    // Keep the window small: the probe needs O(N) bracket evaluations per
    // outer gradient.
    let n = cfg.n.min(16);
    let s = random_state(n, cfg.seeds[0], cfg.amplitude, 0.15)?;
    let triples: Vec<(String, [Functional; 3])> = vec![
        (
            "(C1, C1hat, H0)".into(),
            [Functional::C1, Functional::C1hat, Functional::H0],
        ),
        (
            "cylinder triple A".into(),
            [
                Functional::Cylinder(functionals::cylinder_random(101, s.window)),
                Functional::Cylinder(functionals::cylinder_random(102, s.window)),
                Functional::Cylinder(functionals::cylinder_random(103, s.window)),
            ],
        ),
        (
            "cylinder triple B".into(),
            [
                Functional::Cylinder(functionals::cylinder_random(201, s.window)),
                Functional::Cylinder(functionals::cylinder_random(202, s.window)),
                Functional::Cylinder(functionals::cylinder_random(203, s.window)),
            ],
        ),
    ];
    for (label, [f, g, h]) in &triples {
        // Control: the constant-coefficient J bracket satisfies Jacobi; the
        // residual is the finite-difference noise floor and must be small.
        let dj = functionals::jacobi_defect(f, g, h, &s, 1e-5, BracketKind::J)?;
        out.push(CheckResult::check(
            SUITE,
            format!("J-bracket Jacobi control {label}"),
            dj.norm(),
            1e-6,
        ));
        // Probe: the K bracket's Jacobi identity is an open question; the
        // magnitude is reported without a verdict.
        let dk = functionals::jacobi_defect(f, g, h, &s, 1e-5, BracketKind::K)?;
        out.push(CheckResult::diagnostic(
            SUITE,
            format!("K-bracket Jacobi magnitude {label}"),
            dk.norm(),
            f64::INFINITY,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub precision: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub diagnostics: usize,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn new(results: Vec<CheckResult>) -> Report {
        let total = results.len();
        let failed = results.iter().filter(|r| !r.pass).count();
        let diagnostics = results.iter().filter(|r| r.diagnostic).count();
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            precision: "complex f64".to_string(),
            total,
            passed: total - failed,
            failed,
            diagnostics,
            results,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SuiteConfig {
        SuiteConfig {
            n: 24,
            seeds: vec![42, 43],
            z_set: vec![C64::new(2.0, 0.0), C64::new(1.7, 0.3)],
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn operator_suite_passes() {
        let results = suite_operator_identities(&small_cfg()).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {} metric {:.3e} tol {:.1e}", r.suite, r.case, r.metric, r.tol);
        }
    }

    #[test]
    fn resolvent_suite_passes() {
        let results = suite_resolvent(&small_cfg()).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {} metric {:.3e} tol {:.1e}", r.suite, r.case, r.metric, r.tol);
        }
    }

    #[test]
    fn kernel_suite_passes() {
        let mut cfg = small_cfg();
        cfg.n = 32;
        let results = suite_kernel(&cfg).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {} metric {:.3e} tol {:.1e}", r.suite, r.case, r.metric, r.tol);
        }
    }

    #[test]
    fn lenard_suite_passes() {
        let mut cfg = small_cfg();
        cfg.n = 32;
        let results = suite_lenard(&cfg).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {} metric {:.3e} tol {:.1e}", r.suite, r.case, r.metric, r.tol);
        }
    }

    #[test]
    fn commute_suite_passes() {
        let mut cfg = small_cfg();
        cfg.seeds = vec![42];
        let results = suite_commute(&cfg).unwrap();
        for r in &results {
            assert!(r.pass, "{}: {} metric {:.3e} tol {:.1e}", r.suite, r.case, r.metric, r.tol);
        }
    }

    #[test]
    fn jacobi_suite_reports() {
        let mut cfg = small_cfg();
        cfg.n = 12;
        let results = suite_jacobi(&cfg).unwrap();
        assert!(results.iter().any(|r| r.diagnostic));
        for r in results.iter().filter(|r| !r.diagnostic) {
            assert!(r.pass, "{}: {} metric {:.3e}", r.suite, r.case, r.metric);
        }
    }

    #[test]
    fn report_counts_and_determinism() {
        let cfg = small_cfg();
        let a = Report::new(suite_operator_identities(&cfg).unwrap());
        let b = Report::new(suite_operator_identities(&cfg).unwrap());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.total, a.passed + a.failed);
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("bogus", &SuiteConfig::default()).is_err());
    }
}
