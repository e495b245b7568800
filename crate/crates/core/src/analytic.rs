//! Closed-form weak-probe solution: zeroth-order coherences and the
//! first-order probe coherence ρ13⁽¹⁾, evaluated exactly as printed.
//!
//! These formulas are a diagnostic. The numeric solver in
//! [`crate::liouvillian`] is what χ″ maps are built from; [`discrepancy_report`]
//! measures how far the two disagree.
//!
//! Coefficients are evaluated in dependency order: A and C tables, B₁–B₃,
//! zeroth-order elements, B₄–B₅, ρ21⁽¹⁾, B₀, and finally ρ13⁽¹⁾. ρ23⁽⁰⁾ is taken
//! as the conjugate of ρ32⁽⁰⁾.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouvillian::SteadyStateSolver;
use crate::model::{SystemParams, STATE_TOL};

type C64 = Complex64;

const SINGULAR_EPS: f64 = 1e-14;

/// A₀…A₉, B₀…B₅, C₀…C₉. C₈ is carried for completeness and not used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub a: [C64; 10],
    pub b: [C64; 6],
    pub c: [C64; 10],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZerothOrder {
    pub rho21: C64,
    pub rho12: C64,
    pub rho31: C64,
    pub rho13: C64,
    pub rho32: C64,
    pub rho23: C64,
    /// ρ11⁽⁰⁾ − ρ33⁽⁰⁾.
    pub population_difference: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstOrder {
    pub table: CoefficientTable,
    pub zeroth: ZerothOrder,
    pub rho21: C64,
    pub rho13: C64,
    /// The p√(γ₁γ₂)-weighted part of ρ13⁽¹⁾, included in `rho13`.
    pub rho13_sgc: C64,
}

fn nonzero(name: &'static str, z: C64) -> Result<C64> {
    if z.norm() < SINGULAR_EPS || !z.is_finite() {
        Err(Error::SingularDenominator { name })
    } else {
        Ok(z)
    }
}

struct Inputs {
    g1: f64,
    g2: f64,
    pump: f64,
    dp: f64,
    dc: f64,
    wp: f64,
    wc: f64,
    p: f64,
}

impl Inputs {
    fn new(params: &SystemParams, p: f64, omega_c: f64) -> Self {
        Inputs {
            g1: params.gamma1,
            g2: params.gamma2,
            pump: params.pump,
            dp: params.delta_p,
            dc: params.delta_c,
            wp: params.omega_p,
            wc: omega_c,
            p,
        }
    }

    fn sgc(&self) -> f64 {
        self.p * (self.g1 * self.g2).sqrt()
    }
}

fn a_table(s: &Inputs) -> [C64; 10] {
    let i = C64::i();
    let (g1, g2, gp, wc2) = (s.g1, s.g2, s.pump, s.wc * s.wc);
    [
        (g1 + g2).into(),
        (2.0 * gp * s.dc * g2).into(),
        (2.0 * gp * g1 * g2 + 2.0 * gp * wc2 + 2.0 * gp * g2 * g2 + wc2 * g1).into(),
        (2.0 * gp * s.wc * g2).into(),
        (-2.0 * gp * wc2 - g1 * wc2).into(),
        i * g2 * s.dc + g2 * g2,
        (s.dc * s.dc + g2 * g2).into(),
        s.dc + i * g1 + i * g2,
        gp + i * s.dp + g1 + g2,
        s.dc - i * g1 - i * g2,
    ]
}

fn c_table(s: &Inputs, a: &[C64; 10]) -> [C64; 10] {
    let i = C64::i();
    let (g1, g2, gp) = (s.g1, s.g2, s.pump);
    [
        (g1 + 2.0 * g2).into(),
        -a[8],
        -s.dc + i * g1 + i * g2,
        gp - i * (s.dc - s.dp),
        (2.0 * gp + g1).into(),
        -gp - i * s.dc + i * s.dp,
        -gp - g1 - g2 + i * s.dp,
        i * s.dc - g1 - g2,
        -i * s.dc * g2 + g2 * g2,
        g2 * g2 + i * s.dc * g2,
    ]
}

/// The A and C tables, which depend only on the parameters and Ωc.
pub fn coefficient_tables(params: &SystemParams, omega_c: f64) -> Result<([C64; 10], [C64; 10])> {
    let params = params.validated()?;
    let s = Inputs::new(&params, params.p()?, omega_c);
    let a = a_table(&s);
    let c = c_table(&s, &a);
    Ok((a, c))
}

struct Partial {
    a: [C64; 10],
    c: [C64; 10],
    b1: C64,
    b2: C64,
    b3: C64,
    zeroth: ZerothOrder,
}

fn zeroth_stage(s: &Inputs) -> Result<Partial> {
    let i = C64::i();
    let a = a_table(s);
    let c = c_table(s, &a);
    let (g1, g2, gp, wc) = (s.g1, s.g2, s.pump, s.wc);
    let wc2 = wc * wc;
    let sgc = s.sgc();

    let d = nonzero("A1^2+A2^2-A4^2", a[1] * a[1] + a[2] * a[2] - a[4] * a[4])?;
    let rho21 = (a[1] - i * (a[2] + a[4])) * a[3] / d;

    let den31 = nonzero("Oc^2+C5C6", wc2 + c[5] * c[6])? * nonzero("Oc^2C4-2g2GC7", wc2 * c[4] - 2.0 * g2 * gp * c[7])?;
    let rho31 = 2.0 * s.p * gp * wc2 * (-i * wc + c[7] * rho21) * (g1 * g2).sqrt() / den31;

    let b1 = wc2 * c[4] - 2.0 * i * gp * c[2] * g2;
    let b2 = wc * d + a[3] * c[2] * (a[1] + i * (a[2] + a[4]));
    let b3 = wc2 * c[4] + 2.0 * i * c[2] * gp * g2;

    let oc_c1c3 = nonzero("Oc^2-C1C3", wc2 - c[1] * c[3])?;
    let rho32 = -2.0 * sgc * gp * wc * c[1] * b2 / (d * oc_c1c3 * nonzero("B3", b3)?);

    let den_pop = nonzero(
        "2G(Oc^2+A5)+g1(Oc^2+2Gg2)",
        2.0 * gp * (wc2 + a[5]) + g1 * (wc2 + 2.0 * gp * g2),
    )?;
    let population_difference = wc * (wc + c[2] * rho21) * (gp - g1) / den_pop;

    Ok(Partial {
        a,
        c,
        b1,
        b2,
        b3,
        zeroth: ZerothOrder {
            rho21,
            rho12: rho21.conj(),
            rho31,
            rho13: rho31.conj(),
            rho32,
            rho23: rho32.conj(),
            population_difference,
        },
    })
}

fn first_stage(s: &Inputs) -> Result<FirstOrder> {
    let i = C64::i();
    let part = zeroth_stage(s)?;
    let (a, c, z) = (&part.a, &part.c, &part.zeroth);
    let (g1, g2, gp, wc, wp) = (s.g1, s.g2, s.pump, s.wc, s.wp);
    let wc2 = wc * wc;

    let b4 = 2.0 * i * gp + wp * (z.rho13 - z.rho31);
    let b5 = wc2 * wp * c[4] * (z.rho23 - z.rho32);
    let den21 = nonzero(
        "2Oc^2A0C4+2G(A6+C0g1)g2",
        2.0 * wc2 * a[0] * c[4] + 2.0 * gp * (a[6] + c[0] * g1) * g2,
    )?;
    let rho21 = -i * (2.0 * gp * wp * z.rho23 * (c[9] + g1 * g2) + wc * a[9] * g2 * b4 + b5) / den21;

    let b0 = wp * wc * (z.rho13 - z.rho31) + 2.0 * i * gp * (wc + c[2] * rho21 + wp * z.rho32);

    let oc_c1c3 = nonzero("Oc^2-C1C3", wc2 - c[1] * c[3])?;
    let b1 = nonzero("B1", part.b1)?;
    let rho13_sgc = s.sgc() * wc2 * b0 / (oc_c1c3 * b1);
    let rho13 = (wc * wp * z.rho21 - i * wp * c[3] * z.rho23) / oc_c1c3 + rho13_sgc;

    Ok(FirstOrder {
        table: CoefficientTable {
            a: part.a,
            b: [b0, part.b1, part.b2, part.b3, b4, b5],
            c: part.c,
        },
        zeroth: part.zeroth,
        rho21,
        rho13,
        rho13_sgc,
    })
}

/// Zeroth-order (probe-off) coherences and population difference.
pub fn zeroth_order(params: &SystemParams, omega_c: f64) -> Result<ZerothOrder> {
    let params = params.validated()?;
    zeroth_stage(&Inputs::new(&params, params.p()?, omega_c)).map(|p| p.zeroth)
}

/// Full evaluation including the coefficient table and ρ21⁽¹⁾.
pub fn first_order(params: &SystemParams, omega_c: f64) -> Result<FirstOrder> {
    let params = params.validated()?;
    first_stage(&Inputs::new(&params, params.p()?, omega_c))
}

/// As [`first_order`] with `p` supplied directly instead of derived from θ.
pub fn first_order_with_alignment(params: &SystemParams, p: f64, omega_c: f64) -> Result<FirstOrder> {
    first_stage(&Inputs::new(params, p, omega_c))
}

/// ρ13⁽¹⁾ from the printed closed form.
pub fn rho13_first_order(params: &SystemParams, omega_c: f64) -> Result<C64> {
    first_order(params, omega_c).map(|f| f.rho13)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyPoint {
    pub theta: f64,
    pub p: f64,
    pub pump: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub omega_p: f64,
    pub omega_c: f64,
    pub alpha: f64,
    /// α·Re[ρ13⁽¹⁾/Ωp] and α·Im[ρ13⁽¹⁾/Ωp]; absent when the closed form is singular.
    pub analytic_re: Option<f64>,
    pub analytic_im: Option<f64>,
    pub numeric_re: Option<f64>,
    pub numeric_im: Option<f64>,
    pub abs_diff_im: Option<f64>,
    pub rel_diff_im: Option<f64>,
    pub abs_diff_re: Option<f64>,
    /// Error kind for points where either side could not be evaluated.
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub solver: String,
    pub points: Vec<DiscrepancyPoint>,
    pub max_abs_diff_im: f64,
    pub max_rel_diff_im: f64,
    pub flagged: usize,
}

/// Compares the closed-form χ″ with the numeric steady state point by point.
pub fn discrepancy_report(
    params_list: &[SystemParams],
    omega_c_list: &[f64],
    solver: &dyn SteadyStateSolver,
) -> Result<DiscrepancyReport> {
    if params_list.is_empty() {
        return Err(Error::Contract("discrepancy_report needs at least one point".into()));
    }
    if params_list.len() != omega_c_list.len() {
        return Err(Error::Contract(format!(
            "discrepancy_report got {} parameter sets but {} coupling values",
            params_list.len(),
            omega_c_list.len()
        )));
    }
    let mut points = Vec::with_capacity(params_list.len());
    for (params, &wc) in params_list.iter().zip(omega_c_list) {
        if !(params.omega_p > 0.0) {
            return Err(Error::Contract("discrepancy_report needs omega_p > 0".into()));
        }
        let scale = params.alpha / params.omega_p;
        let analytic = rho13_first_order(params, wc).map(|z| z * scale);
        let numeric = solver.solve(params, wc).map(|rho| rho.rho13() * scale);
        let flag = match (&analytic, &numeric) {
            (Err(e), _) | (_, Err(e)) => Some(e.kind().to_string()),
            _ => None,
        };
        let an = analytic.ok();
        let nu = numeric.ok();
        let both = an.zip(nu);
        points.push(DiscrepancyPoint {
            theta: params.theta,
            p: params.p()?,
            pump: params.pump,
            delta_p: params.delta_p,
            delta_c: params.delta_c,
            omega_p: params.omega_p,
            omega_c: wc,
            alpha: params.alpha,
            analytic_re: an.map(|z| z.re),
            analytic_im: an.map(|z| z.im),
            numeric_re: nu.map(|z| z.re),
            numeric_im: nu.map(|z| z.im),
            abs_diff_im: both.map(|(a, n)| (a.im - n.im).abs()),
            rel_diff_im: both.and_then(|(a, n)| {
                (n.im.abs() > STATE_TOL).then(|| (a.im - n.im).abs() / n.im.abs())
            }),
            abs_diff_re: both.map(|(a, n)| (a.re - n.re).abs()),
            flag,
        });
    }
    let max_of = |f: fn(&DiscrepancyPoint) -> Option<f64>| {
        points.iter().filter_map(f).fold(0.0, f64::max)
    };
    Ok(DiscrepancyReport {
        solver: solver.name().to_string(),
        max_abs_diff_im: max_of(|p| p.abs_diff_im),
        max_rel_diff_im: max_of(|p| p.rel_diff_im),
        flagged: points.iter().filter(|p| p.flag.is_some()).count(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{steady_state, DirectSolver, SolverOptions};
    use std::f64::consts::PI;

    fn fig2d() -> SystemParams {
        SystemParams::fig2_base()
    }

    #[test]
    fn table_transcription_identities() {
        for wc in [0.0, 1.3, 5.0, -2.2] {
            for pump in [0.6, 4.0, 15.0] {
                let params = fig2d().with_pump(pump);
                let f = first_order(&params, wc).unwrap();
                let (a, b, c) = (&f.table.a, &f.table.b, &f.table.c);
                assert_eq!(c[1], -a[8]);
                assert_eq!(a[6].im, 0.0);
                assert!(a[6].re >= 0.0);
                assert_eq!(a[6].re, params.delta_c.powi(2) + params.gamma2.powi(2));
                assert!((a[4] + c[4] * wc * wc).norm() < 1e-12);
                // B1 and B3 differ only in the sign of the 2iΓC2γ2 term.
                assert!((b[1] + b[3] - 2.0 * wc * wc * c[4]).norm() < 1e-12 * (1.0 + b[1].norm()));
            }
        }
    }

    #[test]
    fn zero_coupling_kills_zeroth_order_coherences() {
        let z = zeroth_order(&fig2d(), 0.0).unwrap();
        assert_eq!(z.rho21.norm(), 0.0);
        assert_eq!(z.rho32.norm(), 0.0);
        assert_eq!(z.rho31.norm(), 0.0);
        assert_eq!(rho13_first_order(&fig2d(), 0.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn rho21_zeroth_order_has_no_alignment_dependence() {
        let a = zeroth_order(&fig2d().with_theta(PI / 5.0), 3.7).unwrap();
        let b = zeroth_order(&fig2d().with_theta(PI / 12.0), 3.7).unwrap();
        assert_eq!(a.rho21, b.rho21);
        assert_eq!(a.population_difference, b.population_difference);
        assert_ne!(a.rho31, b.rho31);
    }

    #[test]
    fn orthogonal_dipoles_kill_sgc_branch() {
        let params = fig2d().with_theta(PI / 2.0);
        let f = first_order(&params, 4.0).unwrap();
        assert_eq!(f.zeroth.rho31.norm(), 0.0);
        assert_eq!(f.zeroth.rho32.norm(), 0.0);
        assert_eq!(f.rho13_sgc.norm(), 0.0);
        let (c, z) = (&f.table.c, &f.zeroth);
        let wc = 4.0;
        let wp = params.omega_p;
        let first_term =
            (wc * wp * z.rho21 - C64::i() * wp * c[3] * z.rho23) / (wc * wc - c[1] * c[3]);
        assert_eq!(f.rho13, first_term);
    }

    #[test]
    fn exactly_linear_in_probe_without_sgc() {
        let base = fig2d().with_theta(PI / 2.0);
        let one = rho13_first_order(&base.with_omega_p(0.01), 4.5).unwrap();
        let two = rho13_first_order(&base.with_omega_p(0.02), 4.5).unwrap();
        assert!((two - 2.0 * one).norm() <= 1e-14 * one.norm());
    }

    #[test]
    fn affine_in_probe_with_sgc() {
        // B0 and B4 carry probe-independent 2iΓ terms, so ρ13⁽¹⁾ = u + v·Ωp.
        let base = fig2d();
        let f = |wp: f64| first_order(&base.with_omega_p(wp), 4.5).unwrap().rho13;
        let (f0, f1, f2) = (f(0.0), f(0.01), f(0.02));
        assert!(f0.norm() > 1e-3);
        assert!(((f2 - f1) - (f1 - f0)).norm() < 1e-12);
    }

    #[test]
    fn zeroth_order_against_probe_off_numerics() {
        let params = fig2d().with_omega_p(0.0);
        let z = zeroth_order(&params, 5.0).unwrap();
        let rho = steady_state(&params, 5.0, &SolverOptions::default()).unwrap();
        let numeric_pd = rho.get(1, 1) - rho.get(3, 3);
        // The p-free elements reproduce the numerics; the SGC-carrying
        // ρ31⁽⁰⁾, ρ32⁽⁰⁾ do not and are only recorded.
        assert!((z.rho21 - rho.get(2, 1)).norm() < 1e-12);
        assert!((z.population_difference - numeric_pd).norm() < 1e-12);
        assert!((z.rho31 - rho.get(3, 1)).norm() > 1e-3);
    }

    #[test]
    fn report_single_point() {
        let params = fig2d().with_theta(PI / 2.0);
        let solver = DirectSolver { tol: 1e-10 };
        let r = discrepancy_report(&[params], &[0.0], &solver).unwrap();
        let pt = &r.points[0];
        assert_eq!(pt.analytic_im, Some(0.0));
        assert_eq!(pt.abs_diff_im, Some(pt.numeric_im.unwrap().abs()));
        assert_eq!(r.flagged, 0);
    }

    #[test]
    fn report_rejects_bad_input() {
        let solver = DirectSolver { tol: 1e-10 };
        assert!(matches!(
            discrepancy_report(&[], &[], &solver),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            discrepancy_report(&[fig2d()], &[1.0, 2.0], &solver),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn report_flags_singular_points() {
        // Γ = 0 at Ωc = 0 zeroes A1, A2 and A4 simultaneously.
        let params = fig2d().with_pump(0.0);
        let solver = DirectSolver { tol: 1e-10 };
        let r = discrepancy_report(&[params, fig2d()], &[0.0, 5.0], &solver).unwrap();
        assert_eq!(r.flagged, 1);
        assert!(r.points[0].flag.is_some());
        assert!(r.points[1].flag.is_none());
        assert!(r.max_abs_diff_im > 0.0);
    }
}
