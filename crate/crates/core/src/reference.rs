//! Closed-form and quadrature-based analytic solutions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre_on;

/// Earliest time at which the BKW solution is nonnegative, `6 ln(5/2)`.
pub fn bkw_t0() -> f64 {
    6.0 * 2.5f64.ln()
}

/// Largest order accepted by [`maxwell_moment_recursion`].
pub const MOMENT_RECURSION_MAX_ORDER: usize = 6;

/// Centered Maxwellian density with temperature `t`.
pub fn maxwellian(v2: f64, temperature: f64) -> f64 {
    (-v2 / (2.0 * temperature)).exp() / (2.0 * PI * temperature).powf(1.5)
}

/// BKW solution of the elastic Maxwell-molecule equation with
/// `K = 1 − e^{−t/6}`.
pub fn bkw_exact(v: [f64; 3], t: f64, eta: f64) -> Result<f64> {
    let t0 = bkw_t0();
    if t < t0 * (1.0 - 1e-14) {
        return Err(Error::Precondition(format!("BKW requires t >= {t0}, got {t}")));
    }
    let k = -(-t / 6.0).exp_m1();
    let e2 = eta * eta;
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let gauss = (-r2 / (2.0 * k * e2)).exp() / (2.0 * (2.0 * PI * k * e2).powf(1.5));
    Ok(gauss * ((5.0 * k - 3.0) / k + (1.0 - k) / (k * k) * r2 / e2))
}

/// Momentum flow `M(t)` and energy flow `r(t)` for the bimodal elastic
/// Maxwell-molecule benchmark (`γ = 1/2`, `V₁ = (−2,2,0)`, `V₂ = (2,0,0)`,
/// `T₁ = T₂ = 1`).
pub fn maxwell_second_moment_exact(t: f64) -> ([[f64; 3]; 3], [f64; 3]) {
    let a = (-t / 2.0).exp();
    let b = (-t / 3.0).exp();
    let m0 = [[5.0, -2.0, 0.0], [-2.0, 3.0, 0.0], [0.0, 0.0, 1.0]];
    let minf = [8.0 / 3.0, 11.0 / 3.0, 8.0 / 3.0];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let eq = if i == j { minf[i] } else { 0.0 };
            m[i][j] = m0[i][j] * a + eq * (1.0 - a);
        }
    }
    let r0 = [-4.0, 13.0, 0.0];
    let rinf = [0.0, 43.0, 0.0];
    let rmix = [12.0, 4.0, 0.0];
    let mut r = [0.0; 3];
    for i in 0..3 {
        r[i] = 0.5 * r0[i] * b + rinf[i] / 6.0 * (1.0 - b) - rmix[i] / 6.0 * (a - b);
    }
    (m, r)
}

/// `λ_n = 1 − (β^{2n} + Σ_{k=0}^{n} (1−β)^{2k})/(n+1)`
pub fn moment_rate(n: usize, beta: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let s: f64 = (0..=n).map(|k| (1.0 - beta).powi(2 * k as i32)).sum();
    1.0 - (beta.powi(2 * n as i32) + s) / (n as f64 + 1.0)
}

/// `B_β(k, n−k) = β^{2k} ∫₀¹ s^k (1 − β(2−β)s)^{n−k} ds` by binomial expansion.
pub fn moment_beta_factor(k: usize, n: usize, beta: f64) -> f64 {
    let c = beta * (2.0 - beta);
    let m = n - k;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=m {
        sum += binom * (-c).powi(j as i32) / (k + j + 1) as f64;
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    beta.powi(2 * k as i32) * sum
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Isotropic moments `m_n(t) = ∫|v|^{2n} f` of the Maxwell-molecule
/// equation, `initial[k] = m_k(0)` for `k = 0..=n`. The convolution in `τ`
/// is marched forward on a uniform grid with composite Simpson weights and
/// the grid is refined until the result changes by at most `1e-11` relative.
pub fn maxwell_moment_recursion(n: usize, t: f64, initial: &[f64], beta: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if n > MOMENT_RECURSION_MAX_ORDER {
        return Err(Error::Precondition(format!(
            "moment order {n} exceeds the maximum {MOMENT_RECURSION_MAX_ORDER}"
        )));
    }
    if initial.len() < n + 1 || initial.iter().take(n + 1).any(|m| !m.is_finite()) {
        return Err(Error::Precondition(format!("need {} finite initial moments", n + 1)));
    }
    if t < 0.0 || !(0.0..=1.0).contains(&beta) {
        return Err(Error::Precondition(format!("need t >= 0 and beta in [0,1], got t = {t}, beta = {beta}")));
    }
    if t == 0.0 {
        return Ok(initial[n]);
    }
    let mut steps = ((t / 0.05).ceil() as usize).max(8);
    let mut prev = moment_march(n, t, initial, beta, steps);
    for _ in 0..12 {
        steps *= 2;
        let next = moment_march(n, t, initial, beta, steps);
        if (next - prev).abs() <= 1e-11 * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Weights for `∫₀^{t_i} g dτ` on a uniform grid: Simpson for even `i`,
/// Simpson plus a closing 3/8 panel for odd `i ≥ 3`.
fn running_weights(i: usize, h: f64) -> Vec<f64> {
    debug_assert!(i >= 2);
    let mut w = vec![0.0; i + 1];
    let simpson_end = if i % 2 == 0 { i } else { i - 3 };
    for j in (0..simpson_end).step_by(2) {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    if i % 2 == 1 {
        let s = i - 3;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

fn moment_march(n: usize, t: f64, initial: &[f64], beta: f64, steps: usize) -> f64 {
    let h = t / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let mut table: Vec<Vec<f64>> = vec![vec![1.0; steps + 1]];
    for order in 1..=n {
        let lam = moment_rate(order, beta);
        let coefs: Vec<f64> = (1..order)
            .map(|k| binomial(2 * order + 2, 2 * k + 1) * moment_beta_factor(k, order, beta) / (2.0 * (order as f64 + 1.0)))
            .collect();
        let source: Vec<f64> = (0..=steps)
            .map(|i| {
                (1..order)
                    .map(|k| coefs[k - 1] * table[k][i] * table[order - k][i])
                    .sum()
            })
            .collect();
        let mut values = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let ti = times[i];
            let mut conv = 0.0;
            if i == 1 {
                // quadratic through τ₀, τ₁, τ₂ integrated over [0, h]
                let g = |j: usize| source[j] * (-lam * (ti - times[j])).exp();
                conv = h / 12.0 * (5.0 * g(0) + 8.0 * g(1) - g(2));
            } else if i > 1 {
                let w = running_weights(i, h);
                for (j, wj) in w.iter().enumerate() {
                    conv += wj * source[j] * (-lam * (ti - times[j])).exp();
                }
            }
            values.push((-lam * ti).exp() * initial[order] + conv);
        }
        table.push(values);
    }
    table[n][steps]
}

/// `β = (1+e)/2` and kinetic energy `K(t) = K₀e^{−β(1−β)t} + |V|²/2 (1 − e^{−β(1−β)t})`.
pub fn inelastic_energy_exact(t: f64, beta: f64, k0: f64, bulk: [f64; 3]) -> f64 {
    let decay = (-beta * (1.0 - beta) * t).exp();
    let v2: f64 = bulk.iter().map(|x| x * x).sum();
    k0 * decay + 0.5 * v2 * (1.0 - decay)
}

/// Rate `ζπC₀(1 − e²)` of the heated inelastic temperature equation.
pub fn diffusion_rate(zeta: f64, c0: f64, e: f64) -> f64 {
    zeta * PI * c0 * (1.0 - e * e)
}

/// Equilibrium `2η/(ζπC₀(1 − e²))`; infinite for elastic collisions.
pub fn diffusion_equilibrium_temperature(eta: f64, zeta: f64, c0: f64, e: f64) -> f64 {
    let r = diffusion_rate(zeta, c0, e);
    if r == 0.0 {
        f64::INFINITY
    } else {
        2.0 * eta / r
    }
}

/// Solution of `dT/dt = 2η − ζπC₀(1 − e²)T`. For `e = 1` the linear growth
/// `T₀ + 2ηt`.
pub fn diffusion_temperature_exact(t: f64, eta: f64, zeta: f64, c0: f64, e: f64, t0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) || !(zeta > 0.0) || !(c0 > 0.0) {
        return Err(Error::Precondition(format!(
            "need e in [0,1], zeta > 0, C0 > 0; got e = {e}, zeta = {zeta}, C0 = {c0}"
        )));
    }
    let r = diffusion_rate(zeta, c0, e);
    if r == 0.0 {
        return Ok(t0 + 2.0 * eta * t);
    }
    let decay = (-r * t).exp();
    Ok(t0 * decay + 2.0 * eta / r * (1.0 - decay))
}

const SS_GAUSS_ORDER: usize = 16;

/// `F(|v|) = (4/π) ∫₀^∞ (1+s²)^{−2} M_{T̄(s)}(v) ds` with
/// `T̄ = 𝒯 + a s² e^{−2t/3}`, integrated in `θ = arctan s` over panels
/// graded toward `θ = 0`.
pub fn self_similar_f(speed: f64, thermostat: f64, a: f64, t: f64) -> Result<f64> {
    if thermostat < 0.0 || !thermostat.is_finite() {
        return Err(Error::Precondition(format!("thermostat temperature must be >= 0, got {thermostat}")));
    }
    if thermostat == 0.0 && speed == 0.0 {
        return Err(Error::Precondition("F with zero thermostat is singular at |v| = 0".into()));
    }
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("scale a must be positive, got {a}")));
    }
    let v2 = speed * speed;
    let decay = a * (-2.0 * t / 3.0).exp();
    let integrand = |theta: f64| -> f64 {
        let c = theta.cos();
        let s = theta.tan();
        let tbar = thermostat + decay * s * s;
        if tbar <= 0.0 {
            return 0.0;
        }
        c * c * maxwellian(v2, tbar)
    };
    let mut breaks = vec![0.0];
    for j in (0..48).rev() {
        breaks.push(0.5 * PI * 0.5f64.powi(j));
    }
    let eval = |sub: usize| -> f64 {
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / sub as f64;
            for p in 0..sub {
                let (x, wt) = gauss_legendre_on(SS_GAUSS_ORDER, w[0] + p as f64 * h, w[0] + (p + 1) as f64 * h);
                total += x.iter().zip(&wt).map(|(&x, &w)| w * integrand(x)).sum::<f64>();
            }
        }
        4.0 / PI * total
    };
    let mut sub = 1;
    let mut prev = eval(sub);
    for _ in 0..6 {
        sub *= 2;
        let next = eval(sub);
        if (next - prev).abs() <= 1e-10 * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Cold-thermostat profile estimates `(small-|v|, large-|v|)`:
/// `(√2/π^{5/2}) |v|^{−2} (1 + 2|v|² ln|v|)` and `2 (2/π)^{5/2} |v|^{−6}`.
pub fn cold_asymptotics(speed: f64) -> Result<(f64, f64)> {
    if !(speed > 0.0) {
        return Err(Error::Precondition(format!("speed must be positive, got {speed}")));
    }
    let small = 2f64.sqrt() / PI.powf(2.5) / (speed * speed) * (1.0 + 2.0 * speed * speed * speed.ln());
    let large = 2.0 * (2.0 / PI).powf(2.5) / speed.powi(6);
    Ok((small, large))
}
