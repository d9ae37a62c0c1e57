use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::report::{to_csv, Check, CheckReport, NormReport, Rung};
use crate::base::{interior, norm1};
use crate::bimodule::Bimodule;
use crate::clifford::check_relations;
use crate::connexion::{Connexion, XConnexion};
use crate::error::{Error, Result};
use crate::fourier::FourierElement;
use crate::gcp::{Gcp, GradedElement, RelationReport};
use crate::instance::{Instance, Registry};
use crate::lift::{
    doubled_grading, heat_trace, lift_odd_even, lift_odd_odd, one_tensor_nabla, vertical_graded, LiftedTriple,
    Margin, Parity, StabilityReport,
};
use crate::operator::Cutoff;
use crate::C64;

/// Instance, connexion and parity resolved from a config.
pub struct Setup {
    pub instance: Box<dyn Instance>,
    pub connexion: Option<Connexion>,
    pub parity: Parity,
    pub ladder: Vec<Cutoff>,
}

impl Setup {
    pub fn new(cfg: &RunConfig, registry: &Registry) -> Result<Self> {
        cfg.validate()?;
        let instance = registry.instance(&cfg.instance, &cfg.params)?;
        let connexion = match instance.module() {
            Some(e) => Some(registry.connexion(&cfg.connexion, e, &cfg.params)?),
            None => None,
        };
        let parity = cfg.parity.unwrap_or_else(|| instance.default_parity());
        if parity == Parity::OddEven && instance.clifford().grading().is_none() {
            return Err(Error::Config(format!(
                "parity odd-even needs an even torus dimension, got n = {}",
                instance.n()
            )));
        }
        Ok(Self { instance, connexion, parity, ladder: cfg.ladder()? })
    }

    fn fourier(&self) -> Option<(&Bimodule, &Connexion)> {
        Some((self.instance.module()?, self.connexion.as_ref()?))
    }

    fn require_fourier(&self) -> Result<(&Bimodule, &Connexion)> {
        self.fourier().ok_or_else(|| {
            Error::Config(format!(
                "instance '{}' with these parameters has no Fourier picture to build the lift on",
                self.instance.name()
            ))
        })
    }

    /// The lifted operator on a fresh product truncated at `cutoff`.
    pub fn lift(&self, cutoff: Cutoff) -> Result<(Gcp, LiftedTriple)> {
        let (e, nabla) = self.require_fourier()?;
        let gcp = Gcp::new(e.clone(), cutoff.k)?;
        let l = {
            let x = XConnexion::new(nabla, &gcp, self.instance.clifford())?;
            match self.parity {
                Parity::OddEven => lift_odd_even(&x, cutoff.m)?,
                Parity::OddOdd => lift_odd_odd(&x, cutoff.m)?,
            }
        };
        Ok((gcp, l))
    }
}

/// Runs the whole invariant suite.
pub fn check(cfg: &RunConfig, registry: &Registry) -> Result<CheckReport> {
    let setup = Setup::new(cfg, registry)?;
    let tol = cfg.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cl = setup.instance.clifford();
    let mut checks = vec![Check::below("clifford.relations", check_relations(cl), tol.clifford)];

    if let Some((e, nabla)) = setup.fourier() {
        checks.extend(algebra_checks(cfg, e, nabla, cl, &mut rng)?);
        checks.extend(lift_checks(cfg, &setup, &mut rng)?);
    }
    checks.extend(setup.instance.extra_checks(&mut rng, tol.algebra)?);

    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(CheckReport {
        instance: setup.instance.name().to_string(),
        connexion: setup.connexion.as_ref().map_or("none", |c| c.name()).to_string(),
        parity: Some(setup.parity),
        seed: cfg.seed,
        cutoff: [cfg.cutoff.k, cfg.cutoff.m],
        ladder: setup.ladder.iter().map(|c| [c.k, c.m]).collect(),
        passed: checks.len() - failed,
        failed,
        checks,
    })
}

fn algebra_checks(
    cfg: &RunConfig,
    e: &Bimodule,
    nabla: &Connexion,
    cl: &crate::clifford::CliffordRep,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>> {
    let tol = cfg.tolerances.algebra;
    let n = e.n();
    let gcp = Gcp::new(e.clone(), 2)?;
    let mut xs = e.frame();
    let mut bases = vec![FourierElement::unit(n)];
    for _ in 0..cfg.samples {
        xs.push(gcp.random_module_element(3, 1, rng));
        bases.push(FourierElement::random(n, 2, 1, rng));
    }

    let conn = nabla.check(e, &xs, &bases)?;
    let mut rel = RelationReport::default();
    let mut assoc: f64 = 0.0;
    let mut bimodular: f64 = 0.0;
    let mut star: f64 = 0.0;
    let mut law: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut graded = Vec::new();
    let x = XConnexion::new(nabla, &gcp, cl)?;
    for i in 0..cfg.samples {
        let (xi, zeta, b) = (&xs[xs.len() - 1 - i], &xs[i % xs.len()], &bases[i + 1]);
        rel = rel.merge(&gcp.relation_residuals(xi, zeta, b)?);

        let f = gcp.random_element(&[-1, 0, 1], 2, 1, rng);
        let g = gcp.random_element(&[-1, 0, 1], 2, 1, rng);
        let h = gcp.random_element(&[-1, 0, 1], 2, 1, rng);
        if let Some(r) = gcp.associativity_residual(&f, &g, &h) {
            assoc = assoc.max(r);
        }

        let b2 = FourierElement::random(n, 2, 1, rng);
        let sandwiched = gcp.multiply(&gcp.multiply(&GradedElement::from_base(b.clone()), &f), &GradedElement::from_base(b2.clone()));
        let want = b.multiply(&gcp.cond_exp(&f))?.multiply(&b2)?;
        bimodular = bimodular.max(gcp.cond_exp(&sandwiched).max_abs_diff(&want));
        star = star.max(gcp.cond_exp(&gcp.star(&f)).max_abs_diff(&gcp.cond_exp(&f).star()));

        let s = gcp.s(1, xi);
        law = law.max(x.connexion_law_residual(&s, b)?);
        let (lhs, rhs) = x.hermitian_residual(&f, &g, cfg.cutoff.m)?;
        herm = herm.max(lhs.max_diff_on(&rhs, interior(cfg.cutoff.m, 0))?);
        graded.push(f);
    }
    let one = gcp.cond_exp(&GradedElement::unit(n)).max_abs_diff(&FourierElement::unit(n));

    Ok(vec![
        Check::below("module.frame", e.frame_residual(&xs)?, tol),
        Check::below("connexion.right_leibniz", conn.right_leibniz, tol),
        Check::below("connexion.left_leibniz", conn.left_leibniz, tol),
        Check::below("connexion.right_hermitian", conn.right_hermitian, tol),
        Check::below("connexion.left_hermitian", conn.left_hermitian, tol),
        Check::below("gcp.inner_right", rel.inner_right, tol),
        Check::below("gcp.right_action", rel.right_action, tol),
        Check::below("gcp.left_action", rel.left_action, tol),
        Check::below("gcp.inner_left", rel.inner_left, tol),
        Check::below("gcp.associativity", assoc, tol),
        Check::below("cond_exp.unit", one, tol),
        Check::below("cond_exp.bimodular", bimodular, tol),
        Check::below("cond_exp.star", star, tol),
        Check::below("x.frame", gcp.x_frame_residual(&graded), tol),
        Check::below("x.connexion_law", law, tol),
        Check::below("x.hermitian", herm, tol),
    ])
}

fn lift_checks(cfg: &RunConfig, setup: &Setup, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = cfg.tolerances;
    let cutoff = Cutoff::from(cfg.cutoff);
    let (gcp, l) = setup.lift(cutoff)?;
    let (_, nabla) = setup.require_fourier()?;
    let cl = setup.instance.clifford();
    let mut checks = vec![Check::below("lift.selfadjoint", l.operator.selfadjoint_deviation(), tol.selfadjoint)];
    match setup.parity {
        Parity::OddEven => {
            let x = XConnexion::new(nabla, &gcp, cl)?;
            let h = one_tensor_nabla(&x, cutoff.m)?;
            let v = vertical_graded(cutoff, cl)?;
            checks.push(Check::below("lift.anticommutation", v.anticommutator(&h)?.max_abs(), tol.algebra));
        }
        Parity::OddOdd => {
            let g = doubled_grading(&l.operator);
            checks.push(Check::below("lift.anticommutation", l.operator.anticommutator(&g)?.max_abs(), tol.algebra));
        }
    }
    let u = gcp.gauge_unitary(C64::from_polar(1.0, 0.7), &l.operator);
    let conj = u.matmul(&l.operator)?.matmul(&u.adjoint())?;
    checks.push(Check::below("lift.gauge_equivariance", conj.sub(&l.operator)?.max_abs(), tol.algebra));

    let (commutators, corners) = stability_samples(setup, cfg.samples, rng)?;
    let (comm, corner) = ladder_reports(setup, &commutators, &corners)?;
    let worst = |r: &[StabilityReport]| r.iter().map(|s| s.variation).fold(0.0, f64::max);
    checks.push(Check::below("lift.commutator_stability", worst(&comm), tol.stability));
    checks.push(Check::below("lift.kucerovsky_stability", worst(&corner), tol.stability));
    Ok(checks)
}

/// Seeded monomials `c U^q e_l` whose reach fits inside the lowest rung:
/// general elements for the commutator, degree-one ones for the corner.
pub fn stability_samples(
    setup: &Setup,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<GradedElement>, Vec<GradedElement>)> {
    let (e, nabla) = setup.require_fourier()?;
    let low = setup.ladder[0];
    if low.k == 0 {
        return Err(Error::Config("the lowest ladder rung needs K >= 1".into()));
    }
    let gcp = Gcp::new(e.clone(), low.k)?;
    let pot = Margin::of(&gcp, nabla, &GradedElement::unit(e.n()))?.modes;
    let radius = (low.m as i64 - pot).min(2);
    if radius < 0 {
        return Err(Error::Config(format!(
            "the lowest ladder rung M = {} is below the connexion reach {pot}",
            low.m
        )));
    }
    let q_max = (low.k as i64).min(2);
    let draw = |rng: &mut ChaCha8Rng, q: i64| {
        let mode: Vec<i64> = (0..e.n()).map(|_| rng.gen_range(-radius..=radius)).collect();
        let c = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        gcp.monomial(q, &mode, c)
    };
    let mut commutators = Vec::with_capacity(count);
    let mut corners = Vec::with_capacity(count);
    for _ in 0..count {
        let q = rng.gen_range(-q_max..=q_max);
        commutators.push(draw(rng, q));
        corners.push(draw(rng, 1));
    }
    Ok((commutators, corners))
}

/// Norms of `[L, F]` and of the degree-zero corner along the ladder, one
/// lift per rung shared by all samples.
pub fn ladder_reports(
    setup: &Setup,
    commutators: &[GradedElement],
    corners: &[GradedElement],
) -> Result<(Vec<StabilityReport>, Vec<StabilityReport>)> {
    let (_, nabla) = setup.require_fourier()?;
    let mut comm = vec![Vec::new(); commutators.len()];
    let mut corner = vec![Vec::new(); corners.len()];
    for &rung in &setup.ladder {
        let (gcp, l) = setup.lift(rung)?;
        for (f, out) in commutators.iter().zip(comm.iter_mut()) {
            out.push(l.commutator(&gcp, f, Margin::of(&gcp, nabla, f)?)?.norm());
        }
        for (xi, out) in corners.iter().zip(corner.iter_mut()) {
            out.push(l.kucerovsky_corner(&gcp, xi, Margin::of(&gcp, nabla, xi)?)?.norm());
        }
    }
    let wrap = |v: Vec<Vec<f64>>| v.into_iter().map(|n| StabilityReport::new(setup.ladder.clone(), n)).collect();
    Ok((wrap(comm), wrap(corner)))
}

fn fmt_value(v: f64) -> String {
    // rounding noise around zero would otherwise print as -0.000...
    if v.abs() < 5e-13 {
        "0.000000000000".into()
    } else {
        format!("{v:.12}")
    }
}

fn header(cfg: &RunConfig, setup: &Setup) -> String {
    format!(
        "instance={} connexion={} parity={} K={} M={} n={}",
        setup.instance.name(),
        cfg.connexion,
        match setup.parity {
            Parity::OddEven => "odd-even",
            Parity::OddOdd => "odd-odd",
        },
        cfg.cutoff.k,
        cfg.cutoff.m,
        setup.instance.n()
    )
}

/// CSV of `(degree, mode, eigenvalue)`, sorted by eigenvalue then sector.
/// Modes are written as `k1;k2;...`.
pub fn spectrum(cfg: &RunConfig, registry: &Registry) -> Result<String> {
    let setup = Setup::new(cfg, registry)?;
    let (_, l) = setup.lift(Cutoff::from(cfg.cutoff))?;
    let mut eigs = l.operator.labeled_eigenvalues()?;
    eigs.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.sector.cmp(&b.sector)));
    let rows: Vec<Vec<String>> = eigs
        .iter()
        .map(|e| {
            let mode: Vec<String> = e.sector.mode.iter().map(|k| k.to_string()).collect();
            vec![e.sector.degree.to_string(), mode.join(";"), fmt_value(e.value)]
        })
        .collect();
    Ok(to_csv(&header(cfg, &setup), &["degree", "mode", "eigenvalue"], &rows))
}

/// CSV of `(t, trace)` for every `t` in `ts`.
pub fn heat(cfg: &RunConfig, registry: &Registry, ts: &[f64]) -> Result<String> {
    let setup = Setup::new(cfg, registry)?;
    let eigs = setup.lift(Cutoff::from(cfg.cutoff))?.1.spectrum()?;
    let traces = heat_trace(&eigs, ts).map_err(|e| Error::Config(e.to_string()))?;
    let rows: Vec<Vec<String>> = ts.iter().zip(&traces).map(|(t, h)| vec![t.to_string(), format!("{h:.12}")]).collect();
    Ok(to_csv(&header(cfg, &setup), &["t", "trace"], &rows))
}

/// `||b||_1` of the configured base element at every ladder rung.
pub fn norm1_report(cfg: &RunConfig, registry: &Registry) -> Result<NormReport> {
    let setup = Setup::new(cfg, registry)?;
    let a = cfg.norm1.element(setup.instance.n())?;
    let mut rungs = Vec::new();
    for c in &setup.ladder {
        rungs.push(Rung { k: c.k, m: c.m, norm: norm1(&a, c.m, setup.instance.clifford())? });
    }
    let st = StabilityReport::new(setup.ladder.clone(), rungs.iter().map(|r| r.norm).collect());
    let pass = st.stable(cfg.tolerances.stability);
    Ok(NormReport {
        instance: setup.instance.name().to_string(),
        rungs,
        variation: st.variation,
        tolerance: cfg.tolerances.stability,
        status: if pass { "PASS" } else { "FAIL" },
    })
}
