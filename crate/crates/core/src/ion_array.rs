//! Exact equilibrium of the linear ion array and its longitudinal modes.
//!
//! Positions are dimensionless, in units of d₀, and minimise
//!
//! ```text
//! U(z) = Σ_i z_i²/2 + Σ_{i<j} 1/|z_i - z_j|
//! ```
//!
//! The Hessian of `U` is the identity plus a weighted graph Laplacian, so it
//! is positive definite for every ordered configuration and Newton steps are
//! always descent directions. Pair distances are accumulated from the gaps
//! rather than differenced from positions: at N = 1000 the centre gaps are
//! ~0.037 d₀ while the end positions are ~27 d₀, and differencing alone
//! leaves a gradient floor near 1e-10.

use crate::constants::{trap_length_scale, IonSpecies, PhysicalConstants};
use crate::continuum::{self, ContinuumModel};
use crate::error::{ensure, Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::{CompensatedSum, Scalar};

/// Trap and species parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig<T> {
    pub n_ions: usize,
    /// Longitudinal (axial) trap frequency, rad/s.
    pub omega_z: T,
    /// Representative transverse mode frequency, rad/s.
    pub omega_t: T,
    pub species: IonSpecies<T>,
    /// Ion temperature, K. Only the decoherence rates read it.
    pub temperature: T,
    pub constants: PhysicalConstants<T>,
    /// `omega_t / omega_z` below this raises the linear-regime advisory.
    pub linear_regime_threshold: T,
}

impl<T: Scalar> TrapConfig<T> {
    pub fn new(n_ions: usize, omega_z: T, omega_t: T, species: IonSpecies<T>) -> Result<Self> {
        let cfg = Self {
            n_ions,
            omega_z,
            omega_t,
            species,
            temperature: T::zero(),
            constants: PhysicalConstants::si(),
            linear_regime_threshold: T::lit(10.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// ¹³⁸Ba⁺ with ω_z = 2π·100 kHz and ω_t = 2π·20 MHz.
    pub fn ba138(n_ions: usize) -> Self {
        let constants = PhysicalConstants::si();
        let two_pi = T::lit(2.0) * T::PI();
        Self {
            n_ions,
            omega_z: two_pi * T::lit(1.0e5),
            omega_t: two_pi * T::lit(2.0e7),
            species: IonSpecies::ba138(&constants),
            temperature: T::zero(),
            constants,
            linear_regime_threshold: T::lit(10.0),
        }
    }

    pub fn with_n_ions(&self, n_ions: usize) -> Self {
        Self { n_ions, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        ensure(self.n_ions >= 1, || "n_ions must be at least 1".into())?;
        ensure(self.omega_z > T::zero() && self.omega_z.is_finite(), || {
            format!("omega_z must be positive, got {}", self.omega_z)
        })?;
        ensure(self.omega_t > T::zero() && self.omega_t.is_finite(), || {
            format!("omega_t must be positive, got {}", self.omega_t)
        })?;
        ensure(self.temperature >= T::zero(), || {
            format!("temperature must be non-negative, got {}", self.temperature)
        })?;
        ensure(self.species.mass > T::zero(), || "ion mass must be positive".into())?;
        ensure(self.species.charge_number > 0, || "ion must be charged".into())
    }

    /// Gaussian-convention q² of one ion, J·m.
    pub fn q2(&self) -> T {
        self.constants.gaussian_q2(self.species.charge_number)
    }

    /// Trap length scale d₀, m.
    pub fn d0(&self) -> Result<T> {
        trap_length_scale(self.q2(), self.species.mass, self.omega_z)
    }

    /// Set when the transverse confinement is too weak relative to the axial
    /// one for the fluid model's ω_t ≫ ω_z assumption.
    pub fn linear_regime_advisory(&self) -> Option<String> {
        let ratio = self.omega_t / self.omega_z;
        (ratio < self.linear_regime_threshold).then(|| {
            format!(
                "omega_t/omega_z = {ratio:.3} is below {}: the linear-chain continuum laws may not apply",
                self.linear_regime_threshold
            )
        })
    }
}

/// Initial guess for the equilibrium solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Seed<T> {
    /// Invert the Dubin cumulative ion count.
    Continuum,
    /// Equally spaced, centred; `None` spans the Dubin length 2L.
    Uniform(Option<T>),
    /// Explicit positions, sorted before use.
    Positions(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Gradient max-norm at which the solve stops.
    pub tol: T,
    pub max_iter: usize,
    pub seed: Seed<T>,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-12).max(T::epsilon() * T::lit(1e3)),
            max_iter: 200,
            seed: Seed::Continuum,
        }
    }
}

/// Equilibrium positions together with the scale d₀.
#[derive(Debug, Clone, PartialEq)]
pub struct IonArray<T> {
    positions_scaled: Vec<T>,
    gaps: Vec<T>,
    d0: T,
    residual_gradient_norm: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spacings<T> {
    /// `gaps[i] = z[i+1] - z[i]`, units of d₀.
    pub gaps: Vec<T>,
    pub s0_exact: T,
}

impl<T: Scalar> IonArray<T> {
    /// Wraps arbitrary strictly increasing positions (e.g. synthetic chains).
    /// The residual is the gradient max-norm of `U` at those positions.
    pub fn from_positions(positions_scaled: Vec<T>, d0: T) -> Result<Self> {
        ensure(!positions_scaled.is_empty(), || "an ion array needs at least one ion".into())?;
        ensure(d0 > T::zero(), || format!("d0 must be positive, got {d0}"))?;
        let gaps: Vec<T> = positions_scaled.windows(2).map(|w| w[1] - w[0]).collect();
        ensure(gaps.iter().all(|&g| g > T::zero()), || {
            "positions must be strictly increasing".into()
        })?;
        let residual = max_norm(&energy_gradient(&positions_scaled, &gaps).1);
        Ok(Self {
            positions_scaled,
            gaps,
            d0,
            residual_gradient_norm: residual,
        })
    }

    pub(crate) fn from_solution(sol: EquilibriumSolution<T>, d0: T) -> Self {
        Self {
            positions_scaled: sol.positions,
            gaps: sol.gaps,
            d0,
            residual_gradient_norm: sol.residual,
        }
    }

    pub fn n_ions(&self) -> usize {
        self.positions_scaled.len()
    }

    pub fn positions_scaled(&self) -> &[T] {
        &self.positions_scaled
    }

    pub fn positions_m(&self) -> Vec<T> {
        self.positions_scaled.iter().map(|&z| z * self.d0).collect()
    }

    pub fn d0(&self) -> T {
        self.d0
    }

    pub fn residual_gradient_norm(&self) -> T {
        self.residual_gradient_norm
    }

    /// Gaps as carried by the solver (more accurate than differencing).
    pub(crate) fn gaps(&self) -> &[T] {
        &self.gaps
    }

    pub fn spacings(&self) -> Result<Spacings<T>> {
        ensure(self.n_ions() >= 2, || "spacings need at least 2 ions".into())?;
        let s0 = self.gaps.iter().copied().fold(T::infinity(), T::min);
        Ok(Spacings {
            gaps: self.gaps.clone(),
            s0_exact: s0,
        })
    }

    /// Dimensionless Hessian of `U` at these positions.
    pub(crate) fn hessian(&self) -> SymMatrix<T> {
        hessian(&self.gaps, self.n_ions())
    }

    /// Longitudinal normal-mode frequencies in units of ω_z, ascending.
    /// The centre-of-mass mode is the lowest, at exactly ω_z.
    pub fn longitudinal_mode_frequencies(&self) -> Result<Vec<T>> {
        let ev = self.hessian().eigenvalues();
        if let Some(&bad) = ev.iter().find(|&&e| !(e > T::zero())) {
            return Err(Error::Instability {
                eigenvalue: bad.to_f64_lossy(),
            });
        }
        Ok(ev.into_iter().map(|e| e.sqrt()).collect())
    }
}

/// Detailed solver output, including the accepted-iterate energies.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution<T> {
    pub positions: Vec<T>,
    pub gaps: Vec<T>,
    pub residual: T,
    pub iterations: usize,
    pub energy_trace: Vec<T>,
}

/// Solves for the equilibrium of `config.n_ions` ions.
pub fn solve_equilibrium<T: Scalar>(
    config: &TrapConfig<T>,
    opts: &SolverOptions<T>,
) -> Result<IonArray<T>> {
    config.validate()?;
    let d0 = config.d0()?;
    Ok(IonArray::from_solution(solve_scaled(config.n_ions, opts)?, d0))
}

/// Dimensionless Newton solve with backtracking line search.
pub fn solve_scaled<T: Scalar>(n_ions: usize, opts: &SolverOptions<T>) -> Result<EquilibriumSolution<T>> {
    ensure(n_ions >= 1, || "solve_equilibrium needs at least 1 ion".into())?;
    let mut z = initial_positions(n_ions, &opts.seed)?;
    let mut gaps: Vec<T> = z.windows(2).map(|w| w[1] - w[0]).collect();

    let (mut energy, mut grad) = energy_gradient(&z, &gaps);
    let mut residual = max_norm(&grad);
    let mut trace = vec![energy];
    let armijo = T::lit(1e-4);
    let flat = T::lit(16.0) * T::epsilon();

    for iter in 0..opts.max_iter {
        if residual <= opts.tol {
            return Ok(EquilibriumSolution {
                positions: z,
                gaps,
                residual,
                iterations: iter,
                energy_trace: trace,
            });
        }
        let h = hessian(&gaps, n_ions);
        let rhs: Vec<T> = grad.iter().map(|&g| -g).collect();
        let step = h.cholesky_solve(&rhs).ok_or(Error::Convergence {
            iterations: iter,
            residual: residual.to_f64_lossy(),
        })?;
        let slope: T = grad.iter().zip(&step).map(|(&g, &s)| g * s).sum();

        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let zt: Vec<T> = z.iter().zip(&step).map(|(&a, &s)| a + alpha * s).collect();
            let gt: Vec<T> = gaps
                .iter()
                .enumerate()
                .map(|(k, &g)| g + alpha * (step[k + 1] - step[k]))
                .collect();
            if gt.iter().all(|&g| g > T::zero()) {
                let (et, grt) = energy_gradient(&zt, &gt);
                let rt = max_norm(&grt);
                let sufficient = et <= energy + armijo * alpha * slope;
                // Near the minimum the energy change drops below rounding;
                // fall back to requiring a smaller gradient.
                let within_rounding = et - energy <= flat * energy.abs() && rt < residual;
                if sufficient || within_rounding {
                    accepted = Some((zt, gt, et, grt, rt));
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        let Some((zt, gt, et, grt, rt)) = accepted else {
            return Err(Error::Convergence {
                iterations: iter,
                residual: residual.to_f64_lossy(),
            });
        };
        z = zt;
        gaps = gt;
        energy = et;
        grad = grt;
        residual = rt;
        trace.push(energy);
    }
    if residual <= opts.tol {
        return Ok(EquilibriumSolution {
            positions: z,
            gaps,
            residual,
            iterations: opts.max_iter,
            energy_trace: trace,
        });
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        residual: residual.to_f64_lossy(),
    })
}

fn initial_positions<T: Scalar>(n_ions: usize, seed: &Seed<T>) -> Result<Vec<T>> {
    let mut z = match seed {
        Seed::Continuum => continuum::seed_positions(n_ions, ContinuumModel::DubinFluid)?,
        Seed::Uniform(spacing) => {
            if n_ions == 1 {
                vec![T::zero()]
            } else {
                let s = match spacing {
                    Some(s) => *s,
                    None => {
                        let l: T = continuum::half_length(n_ions, ContinuumModel::DubinFluid)?;
                        T::lit(2.0) * l / T::from_count(n_ions - 1)
                    }
                };
                ensure(s > T::zero(), || format!("uniform seed spacing must be positive, got {s}"))?;
                let mid = T::from_count(n_ions - 1) * T::lit(0.5);
                (0..n_ions).map(|i| (T::from_count(i) - mid) * s).collect()
            }
        }
        Seed::Positions(p) => {
            ensure(p.len() == n_ions, || {
                format!("seed has {} positions, expected {n_ions}", p.len())
            })?;
            ensure(p.iter().all(|x| x.is_finite()), || "seed positions must be finite".into())?;
            p.clone()
        }
    };
    z.sort_by(|a, b| a.partial_cmp(b).expect("finite seed"));
    if n_ions > 1 && z.windows(2).any(|w| w[1] <= w[0]) {
        // Push coincident ions apart to a hundredth of the continuum
        // minimum spacing; closer seeds leave the Hessian ill-conditioned.
        let min_gap = T::lit(0.01) * continuum::min_spacing::<T>(n_ions, ContinuumModel::DubinFluid)?;
        for i in 1..n_ions {
            if z[i] < z[i - 1] + min_gap {
                z[i] = z[i - 1] + min_gap;
            }
        }
    }
    Ok(z)
}

fn max_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Energy and gradient of `U`, with pair distances accumulated from `gaps`.
pub(crate) fn energy_gradient<T: Scalar>(z: &[T], gaps: &[T]) -> (T, Vec<T>) {
    let n = z.len();
    let mut right: Vec<CompensatedSum<T>> = vec![CompensatedSum::new(); n];
    let mut left: Vec<CompensatedSum<T>> = vec![CompensatedSum::new(); n];
    let mut energy = CompensatedSum::new();
    let half = T::lit(0.5);
    for &x in z {
        energy.add(half * x * x);
    }
    for i in 0..n {
        let mut d = T::zero();
        for j in (i + 1)..n {
            d = d + gaps[j - 1];
            let inv = d.recip();
            energy.add(inv);
            let f = inv * inv;
            right[i].add(f);
            left[j].add(f);
        }
    }
    let grad = (0..n)
        .map(|i| z[i] + (right[i].value() - left[i].value()))
        .collect();
    (energy.value(), grad)
}

pub(crate) fn hessian<T: Scalar>(gaps: &[T], n: usize) -> SymMatrix<T> {
    let mut h = SymMatrix::zeros(n);
    let two = T::lit(2.0);
    let mut diag: Vec<CompensatedSum<T>> = vec![CompensatedSum::new(); n];
    for i in 0..n {
        let mut d = T::zero();
        for j in (i + 1)..n {
            d = d + gaps[j - 1];
            let k = two / (d * d * d);
            h.set(i, j, -k);
            h.set(j, i, -k);
            diag[i].add(k);
            diag[j].add(k);
        }
    }
    for (i, acc) in diag.iter().enumerate() {
        h.set(i, i, T::one() + acc.value());
    }
    h
}
