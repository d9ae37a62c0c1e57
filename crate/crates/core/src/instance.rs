//! Named instances and connexion kinds.
//!
//! Every instance exposes its Clifford data and, when it has one, the Fourier
//! picture of its bimodule; the shared check suite runs on that. Instances may
//! add checks of their own (the grid model does). Both tables are plain name
//! to constructor maps so a caller can register more.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bimodule::Bimodule;
use crate::cli::report::Check;
use crate::clifford::{build_clifford, CliffordRep};
use crate::connexion::Connexion;
use crate::error::{Error, Result};
use crate::fourier::{FourierElement, Shift};
use crate::gcp::Gcp;
use crate::lift::Parity;
use crate::qhm::{self, QhmElement, QhmParams};
use crate::C64;

/// Instance parameters as read from the config; each instance reads the
/// fields it needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSpec {
    /// Torus dimension of the base.
    pub n: usize,
    /// Numerators of the translation `sigma`, over `shift_den`.
    pub shift: Vec<i64>,
    pub shift_den: i64,
    /// Generating frame of the twisted module: `trivial`, `cos-sin` or `character`.
    pub frame: String,
    /// Constant added to the first connexion component by `perturbed`.
    pub perturbation: f64,
    pub qhm: QhmSpec,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            n: 2,
            shift: vec![1, 0],
            shift_den: 8,
            frame: "cos-sin".into(),
            perturbation: 1.0,
            qhm: QhmSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QhmSpec {
    pub c: i64,
    pub mu_num: i64,
    pub mu_den: i64,
    pub nu_num: i64,
    pub nu_den: i64,
    pub n: usize,
    pub k: usize,
}

impl Default for QhmSpec {
    fn default() -> Self {
        Self {
            c: 0,
            mu_num: 1,
            mu_den: 8,
            nu_num: 0,
            nu_den: 1,
            n: 16,
            k: 3,
        }
    }
}

impl QhmSpec {
    pub fn params(&self) -> Result<QhmParams> {
        QhmParams::new(self.c, (self.mu_num, self.mu_den), (self.nu_num, self.nu_den), self.n, self.k)
    }
}

pub trait Instance: Send + Sync {
    fn name(&self) -> &'static str;

    fn clifford(&self) -> &CliffordRep;

    /// The Fourier picture of the bimodule, absent for grid-only instances.
    fn module(&self) -> Option<&Bimodule>;

    fn n(&self) -> usize {
        self.clifford().n()
    }

    /// Odd-even when the horizontal triple is graded.
    fn default_parity(&self) -> Parity {
        if self.clifford().grading().is_some() {
            Parity::OddEven
        } else {
            Parity::OddOdd
        }
    }

    /// Checks beyond the shared suite.
    fn extra_checks(&self, _rng: &mut ChaCha8Rng, _tol: f64) -> Result<Vec<Check>> {
        Ok(Vec::new())
    }
}

pub type InstanceFactory = fn(&InstanceSpec) -> Result<Box<dyn Instance>>;
pub type ConnexionFactory = fn(&Bimodule, &InstanceSpec) -> Result<Connexion>;

pub struct Registry {
    instances: BTreeMap<&'static str, InstanceFactory>,
    connexions: BTreeMap<&'static str, ConnexionFactory>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Self {
            instances: BTreeMap::new(),
            connexions: BTreeMap::new(),
        };
        r.register_instance("flat-torus", FlatTorus::build);
        r.register_instance("twisted-module", TwistedModule::build);
        r.register_instance("qhm", Qhm::build);
        r.register_connexion("grassmann", |e, _| Ok(Connexion::grassmann(e)));
        r.register_connexion("perturbed", |e, spec| {
            let b0 = FourierElement::constant(e.n(), C64::new(spec.perturbation, 0.0));
            Connexion::perturbed(e, 0, &b0)
        });
        r
    }
}

impl Registry {
    pub fn register_instance(&mut self, name: &'static str, f: InstanceFactory) {
        self.instances.insert(name, f);
    }

    pub fn register_connexion(&mut self, name: &'static str, f: ConnexionFactory) {
        self.connexions.insert(name, f);
    }

    pub fn instance_names(&self) -> Vec<&'static str> {
        self.instances.keys().copied().collect()
    }

    pub fn connexion_names(&self) -> Vec<&'static str> {
        self.connexions.keys().copied().collect()
    }

    pub fn instance(&self, name: &str, spec: &InstanceSpec) -> Result<Box<dyn Instance>> {
        let f = self.instances.get(name).ok_or_else(|| {
            Error::Config(format!("unknown instance '{name}', expected one of {:?}", self.instance_names()))
        })?;
        f(spec)
    }

    pub fn connexion(&self, name: &str, module: &Bimodule, spec: &InstanceSpec) -> Result<Connexion> {
        let f = self.connexions.get(name).ok_or_else(|| {
            Error::Config(format!("unknown connexion '{name}', expected one of {:?}", self.connexion_names()))
        })?;
        f(module, spec)
    }
}

/// `E = B`, `sigma = id`.
pub struct FlatTorus {
    cl: CliffordRep,
    module: Bimodule,
}

impl FlatTorus {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            cl: build_clifford(n)?,
            module: Bimodule::trivial(n),
        })
    }

    fn build(spec: &InstanceSpec) -> Result<Box<dyn Instance>> {
        Ok(Box::new(Self::new(spec.n)?))
    }
}

impl Instance for FlatTorus {
    fn name(&self) -> &'static str {
        "flat-torus"
    }

    fn clifford(&self) -> &CliffordRep {
        &self.cl
    }

    fn module(&self) -> Option<&Bimodule> {
        Some(&self.module)
    }
}

/// `B` twisted by a rational translation, with a chosen frame.
pub struct TwistedModule {
    cl: CliffordRep,
    module: Bimodule,
}

impl TwistedModule {
    pub fn new(n: usize, shift: Shift, frame: &str) -> Result<Self> {
        if shift.n() != n {
            return Err(Error::Config(format!("shift has {} entries, expected {n}", shift.n())));
        }
        let axis = |j: usize| -> Vec<i64> { (0..n).map(|i| i64::from(i == j)).collect() };
        let gens = match frame {
            "trivial" => vec![FourierElement::unit(n)],
            "cos-sin" => vec![FourierElement::cos(&axis(0)), FourierElement::sin(&axis(0))],
            "character" if n >= 2 => {
                let s = 0.5f64.sqrt();
                vec![
                    FourierElement::monomial(&axis(0), C64::new(s, 0.0)),
                    FourierElement::monomial(&axis(1), C64::new(0.0, s)),
                ]
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown frame '{other}' for n = {n}, expected trivial, cos-sin or character"
                )))
            }
        };
        Ok(Self {
            cl: build_clifford(n)?,
            module: Bimodule::new(shift, gens, 0)?,
        })
    }

    fn build(spec: &InstanceSpec) -> Result<Box<dyn Instance>> {
        let shift = Shift::new(spec.shift.clone(), spec.shift_den)?;
        Ok(Box::new(Self::new(spec.n, shift, &spec.frame)?))
    }
}

impl Instance for TwistedModule {
    fn name(&self) -> &'static str {
        "twisted-module"
    }

    fn clifford(&self) -> &CliffordRep {
        &self.cl
    }

    fn module(&self) -> Option<&Bimodule> {
        Some(&self.module)
    }
}

/// The grid model; for `c = 0` it also has the Fourier picture.
pub struct Qhm {
    cl: CliffordRep,
    params: QhmParams,
    module: Option<Bimodule>,
}

impl Qhm {
    pub fn new(params: QhmParams) -> Result<Self> {
        let module = if params.c == 0 { Some(qhm::bimodule(params)?) } else { None };
        Ok(Self {
            cl: build_clifford(2)?,
            params,
            module,
        })
    }

    pub fn params(&self) -> QhmParams {
        self.params
    }

    fn build(spec: &InstanceSpec) -> Result<Box<dyn Instance>> {
        Ok(Box::new(Self::new(spec.qhm.params()?)?))
    }
}

/// Ratio of connexion residuals at `N` and `2N` for smooth samples.
pub fn grid_convergence_ratio(params: QhmParams, seed: u64) -> Result<(f64, f64)> {
    let mut out = [0.0; 2];
    for (i, n) in [params.n, 2 * params.n].into_iter().enumerate() {
        let pr = QhmParams { n, ..params };
        pr.validate()?;
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let xs = (0..2)
            .map(|_| qhm::random_smooth(pr, &[1], &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let bs = (0..2)
            .map(|_| qhm::random_algebraic(pr, &[0], 3, 1, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        out[i] = qhm::check_connexion(&xs, &bs)?.max();
    }
    Ok((out[0], out[1]))
}

impl Instance for Qhm {
    fn name(&self) -> &'static str {
        "qhm"
    }

    fn clifford(&self) -> &CliffordRep {
        &self.cl
    }

    fn module(&self) -> Option<&Bimodule> {
        self.module.as_ref()
    }

    fn extra_checks(&self, rng: &mut ChaCha8Rng, tol: f64) -> Result<Vec<Check>> {
        let pr = self.params;
        let deg: Vec<i64> = vec![-1, 0, 1];
        let pairs = (0..5)
            .map(|_| Ok((qhm::random_smooth(pr, &deg, rng)?, qhm::random_smooth(pr, &deg, rng)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut trace: f64 = 0.0;
        let mut invariance: f64 = 0.0;
        let mut star: f64 = 0.0;
        let mut auto: f64 = 0.0;
        let step = 1.0 / pr.n as f64;
        for (a, b) in &pairs {
            let ab = a.multiply(b)?;
            trace = trace.max((ab.trace() - b.multiply(a)?.trace()).norm());
            invariance = invariance.max((a.heisenberg_act(3.0 * step, step, 0.4)?.trace() - a.trace()).norm());
            star = star.max(ab.star().max_abs_diff(&b.star().multiply(&a.star())?));
            let lhs = ab.heisenberg_act(step, 2.0 * step, 0.2)?;
            let rhs = a.heisenberg_act(step, 2.0 * step, 0.2)?.multiply(&b.heisenberg_act(step, 2.0 * step, 0.2)?)?;
            auto = auto.max(lhs.max_abs_diff(&rhs));
        }
        let (a, b, c) = (&pairs[0].0, &pairs[0].1, &pairs[1].0);
        let assoc = a.multiply(b)?.multiply(c)?.max_abs_diff(&a.multiply(&b.multiply(c)?)?);
        let one = (QhmElement::unit(pr).trace() - C64::new(1.0, 0.0)).norm();
        let samples = (0..3)
            .map(|_| qhm::random_smooth(pr, &[1], rng))
            .collect::<Result<Vec<_>>>()?;
        let mut checks = vec![
            Check::below("qhm.trace_unit", one, 1e-15),
            Check::below("qhm.traciality", trace, tol),
            Check::below("qhm.trace_heisenberg_invariance", invariance, tol),
            Check::below("qhm.star_antimultiplicative", star, tol),
            Check::below("qhm.heisenberg_automorphism", auto, tol),
            Check::below("qhm.associativity", assoc, tol),
            Check::below("qhm.frame_identity", qhm::frame_identity_residual(pr)?, tol),
            Check::below("qhm.frame_reconstruction", qhm::frame_reconstruction_residual(&samples)?, tol),
        ];
        if pr.c == 0 {
            let xs = (0..3)
                .map(|_| qhm::random_algebraic(pr, &[1], 3, 1, rng))
                .collect::<Result<Vec<_>>>()?;
            let bs = (0..2)
                .map(|_| qhm::random_algebraic(pr, &[0], 3, 1, rng))
                .collect::<Result<Vec<_>>>()?;
            let rep = qhm::check_connexion(&xs, &bs)?;
            checks.push(Check::below("qhm.connexion.right_leibniz", rep.right_leibniz, tol));
            checks.push(Check::below("qhm.connexion.left_leibniz", rep.left_leibniz, tol));
            checks.push(Check::below("qhm.connexion.right_hermitian", rep.right_hermitian, tol));
            checks.push(Check::below("qhm.connexion.left_hermitian", rep.left_hermitian, tol));
            let gcp = Gcp::new(qhm::bimodule(pr)?, pr.k)?;
            let mut adapter: f64 = 0.0;
            let mut tau: f64 = 0.0;
            for _ in 0..2 {
                let a = qhm::random_algebraic(pr, &[-1, 0, 1], 2, 1, rng)?;
                let b = qhm::random_algebraic(pr, &[-1, 0, 1], 2, 1, rng)?;
                let (ga, gb) = (qhm::to_graded(&a, &gcp)?, qhm::to_graded(&b, &gcp)?);
                let via = qhm::from_graded(pr, &gcp, &gcp.multiply(&ga, &gb))?;
                adapter = adapter.max(via.max_abs_diff(&a.multiply(&b)?));
                tau = tau.max((gcp.cond_exp(&ga).get(&[0, 0]) - a.trace()).norm());
            }
            checks.push(Check::below("qhm.adapter_product", adapter, tol));
            checks.push(Check::below("qhm.trace_through_cond_exp", tau, tol));
        } else {
            let seed = rng.gen();
            let (coarse, fine) = grid_convergence_ratio(pr, seed)?;
            checks.push(Check::above("qhm.connexion.convergence_ratio", coarse / fine, 12.0));
        }
        Ok(checks)
    }
}
