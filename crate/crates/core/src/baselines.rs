//! Classical reference integrators for the cubic toy model: forward Euler,
//! RK4, the closed-form solution, perturbed-ensemble averaging, and an
//! Euler–Maruyama variant with pre-drawn noise increments.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::OdeSpec;
use crate::rng;

/// Which method produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euler,
    Rk4,
    Analytic,
    EnsembleMean,
    EulerMaruyama,
    Quantum,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
            Method::Analytic => "analytic",
            Method::EnsembleMean => "ensemble_mean",
            Method::EulerMaruyama => "euler_maruyama",
            Method::Quantum => "quantum",
        };
        f.write_str(s)
    }
}

/// A labelled (t, x) series on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub method: Method,
    pub points: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, x)| x)
    }

    pub fn last_x(&self) -> f64 {
        self.points.last().map(|&(_, x)| x).unwrap_or(f64::NAN)
    }
}

/// Perturbed-initial-condition ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub size: usize,
    /// Standard deviation of the Gaussian initial-condition perturbation.
    pub sigma: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Domain("ensemble size must be at least 1".into()));
        }
        if self.sigma < 0.0 {
            return Err(Error::Domain("sigma must be non-negative".into()));
        }
        Ok(())
    }
}

fn grid_step(ode: &OdeSpec, x: f64, f: impl Fn(f64) -> f64) -> f64 {
    x + ode.dt * f(x)
}

/// Forward Euler: x_{k+1} = x_k + Δt·(λx_k − αx_k³).
pub fn euler(ode: &OdeSpec) -> Result<Trajectory> {
    ode.validate()?;
    let mut points = Vec::with_capacity(ode.steps + 1);
    let mut x = ode.x0;
    points.push((0.0, x));
    for k in 1..=ode.steps {
        x = grid_step(ode, x, |x| ode.rhs(x));
        points.push((k as f64 * ode.dt, x));
    }
    Ok(Trajectory {
        method: Method::Euler,
        points,
    })
}

/// Classical fourth-order Runge–Kutta on the same grid.
pub fn rk4(ode: &OdeSpec) -> Result<Trajectory> {
    ode.validate()?;
    let mut points = Vec::with_capacity(ode.steps + 1);
    let mut x = ode.x0;
    points.push((0.0, x));
    let h = ode.dt;
    for k in 1..=ode.steps {
        let k1 = ode.rhs(x);
        let k2 = ode.rhs(x + 0.5 * h * k1);
        let k3 = ode.rhs(x + 0.5 * h * k2);
        let k4 = ode.rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        points.push((k as f64 * h, x));
    }
    Ok(Trajectory {
        method: Method::Rk4,
        points,
    })
}

/// Closed-form solution of ẋ = λx − αx³ (Bernoulli substitution y = x⁻²):
/// x(t) = x₀·e^{λt} / √(1 + (α/λ)·x₀²·(e^{2λt} − 1)), and the λ → 0 limit
/// x(t) = x₀ / √(1 + 2αx₀²t).
pub fn analytic(ode: &OdeSpec, t: f64) -> Result<f64> {
    ode.validate()?;
    let (lambda, alpha, x0) = (ode.linear_coeff, ode.cubic_coeff, ode.x0);
    if lambda == 0.0 {
        let denom = 1.0 + 2.0 * alpha * x0 * x0 * t;
        if denom <= 0.0 {
            return Err(Error::Domain(format!(
                "analytic solution undefined at t = {t}: denominator {denom}"
            )));
        }
        return Ok(x0 / denom.sqrt());
    }
    let e2 = (2.0 * lambda * t).exp();
    let denom = 1.0 + alpha / lambda * x0 * x0 * (e2 - 1.0);
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "analytic solution undefined at t = {t}: denominator {denom}"
        )));
    }
    Ok(x0 * (lambda * t).exp() / denom.sqrt())
}

/// Closed-form solution sampled on the ODE's own grid.
pub fn analytic_trajectory(ode: &OdeSpec) -> Result<Trajectory> {
    let points = (0..=ode.steps)
        .map(|k| {
            let t = k as f64 * ode.dt;
            Ok((t, analytic(ode, t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        method: Method::Analytic,
        points,
    })
}

/// Mean over Euler trajectories started from Gaussian-perturbed initial
/// values. Member i draws its perturbation from substream i of the seed, so
/// the result is independent of evaluation order.
pub fn ensemble_mean(ode: &OdeSpec, spec: &EnsembleSpec) -> Result<Trajectory> {
    ode.validate()?;
    spec.validate()?;
    let normal = Normal::new(0.0, spec.sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Domain(e.to_string()))?;
    let mut mean = vec![0.0; ode.steps + 1];
    for member in 0..spec.size {
        let mut member_rng = rng::substream(spec.seed, member as u64);
        let perturbation = if spec.sigma > 0.0 {
            normal.sample(&mut member_rng)
        } else {
            0.0
        };
        let member_ode = OdeSpec {
            x0: ode.x0 + perturbation,
            ..*ode
        };
        for (acc, (_, x)) in mean.iter_mut().zip(euler(&member_ode)?.points) {
            *acc += x;
        }
    }
    let points = mean
        .into_iter()
        .enumerate()
        .map(|(k, sum)| (k as f64 * ode.dt, sum / spec.size as f64))
        .collect();
    Ok(Trajectory {
        method: Method::EnsembleMean,
        points,
    })
}

/// Euler–Maruyama with additive noise: all T Wiener increments are drawn
/// up front from the seed, then
/// x_{k+1} = x_k + Δt·f(x_k) + √Δt·σ·w_k.
pub fn euler_maruyama(ode: &OdeSpec, noise_sigma: f64, seed: u64) -> Result<Trajectory> {
    ode.validate()?;
    if noise_sigma < 0.0 {
        return Err(Error::Domain("noise_sigma must be non-negative".into()));
    }
    let mut noise_rng = rng::seeded(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let increments: Vec<f64> = (0..ode.steps)
        .map(|_| normal.sample(&mut noise_rng))
        .collect();

    let mut points = Vec::with_capacity(ode.steps + 1);
    let mut x = ode.x0;
    points.push((0.0, x));
    let root_dt = ode.dt.sqrt();
    for (k, w) in increments.iter().enumerate() {
        x = x + ode.dt * ode.rhs(x) + root_dt * noise_sigma * w;
        points.push(((k + 1) as f64 * ode.dt, x));
    }
    Ok(Trajectory {
        method: Method::EulerMaruyama,
        points,
    })
}
