//! Denoising experiments: uniform noise, signal-to-noise ratios, bandwidth
//! sweeps, energy concentration and plan timing.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor::FactorPlan;
use crate::graph::DirectedGraph;
use crate::linalg::{column, norm2};
use crate::signal::ProductSignal;
use crate::square::SquarePlan;

/// Additive noise drawn i.i.d. uniform on `[-level, level]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub level: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(level: f64, seed: u64) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be finite and nonnegative, got {level}"
            )));
        }
        Ok(Self { level, seed })
    }
}

/// Returns `x + η`. The draw is `level · u` with `u` uniform on `[-1, 1]`, so
/// one seed gives proportional noise at every level.
pub fn add_uniform_noise(x: &ProductSignal, noise: NoiseModel) -> ProductSignal {
    if noise.level == 0.0 {
        return x.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let m = x.as_mat();
    // Drawn column by column so the stream follows `vec` order.
    let mut draws = Vec::with_capacity(m.nrows() * m.ncols());
    for _ in 0..m.nrows() * m.ncols() {
        draws.push(noise.level * rng.gen_range(-1.0..=1.0));
    }
    ProductSignal::from_fn(x.n1(), x.n2(), |r, c| m[(r, c)] + draws[c * m.nrows() + r])
}

/// A decibel value that may be `+∞` (exact reconstruction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decibels {
    Finite(f64),
    PlusInfinity,
}

impl Decibels {
    pub fn value(self) -> f64 {
        match self {
            Decibels::Finite(v) => v,
            Decibels::PlusInfinity => f64::INFINITY,
        }
    }

    /// Arithmetic mean of dB values; `+∞` if any entry is.
    pub fn mean(values: &[Decibels]) -> Option<Decibels> {
        if values.is_empty() {
            return None;
        }
        let mut sum = 0.0;
        for v in values {
            match v {
                Decibels::Finite(x) => sum += x,
                Decibels::PlusInfinity => return Some(Decibels::PlusInfinity),
            }
        }
        Some(Decibels::Finite(sum / values.len() as f64))
    }
}

impl fmt::Display for Decibels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decibels::Finite(v) => write!(f, "{v}"),
            Decibels::PlusInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for Decibels {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Decibels::Finite(v) => s.serialize_f64(*v),
            Decibels::PlusInfinity => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Decibels {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Decibels::Finite(v)),
            Raw::Str(s) if s == "+inf" => Ok(Decibels::PlusInfinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "unexpected dB value {s:?}"
            ))),
        }
    }
}

/// `−20·log10(‖estimate − reference‖ / ‖reference‖)`.
pub fn relative_db(reference: &ProductSignal, estimate: &ProductSignal) -> Result<Decibels> {
    let norm = reference.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let err = estimate.distance(reference)?;
    if err == 0.0 {
        return Ok(Decibels::PlusInfinity);
    }
    Ok(Decibels::Finite(-20.0 * (err / norm).log10()))
}

/// Input signal-to-noise ratio of a noisy observation.
pub fn isnr(x: &ProductSignal, noisy: &ProductSignal) -> Result<Decibels> {
    relative_db(x, noisy)
}

/// Signal-to-noise ratio of a reconstruction.
pub fn snr(x: &ProductSignal, estimate: &ProductSignal) -> Result<Decibels> {
    relative_db(x, estimate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Square,
    Otimes,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Square => "square",
            TransformKind::Otimes => "otimes",
        }
    }
}

/// One point of an energy concentration profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub m: usize,
    /// `1 − ‖X − X_M‖ / ‖X‖`.
    pub fraction: f64,
    /// `1 − ‖X − X_M‖² / ‖X‖²`.
    pub squared_fraction: f64,
}

/// Operations shared by both transforms in the experiments.
pub trait Bandlimiter {
    fn kind(&self) -> TransformKind;

    /// `(N1, N2)`.
    fn shape(&self) -> (usize, usize);

    fn bandlimit_signal(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal>;

    /// `(M, ‖X − X_M‖)` for every cut that does not split a degenerate group.
    fn residuals(&self, x: &ProductSignal) -> Result<Vec<(usize, f64)>>;
}

impl Bandlimiter for SquarePlan {
    fn kind(&self) -> TransformKind {
        TransformKind::Square
    }

    fn shape(&self) -> (usize, usize) {
        (self.n1(), self.n2())
    }

    fn bandlimit_signal(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal> {
        SquarePlan::bandlimit_signal(self, x, m)
    }

    fn residuals(&self, x: &ProductSignal) -> Result<Vec<(usize, f64)>> {
        x.check_shape(self.n1(), self.n2())?;
        let xv = x.to_vec();
        let (u, v) = (self.basis().left(), self.basis().right());
        let xc = column(&xv);
        let ux = u.transpose() * &xc;
        let vx = v.transpose() * &xc;
        // The running residual x − x_M, updated one column pair at a time.
        let mut rest = xv;
        let mut out = Vec::new();
        let mut k = 0;
        for group in self.basis().groups() {
            for kk in k..group.end {
                for (row, r) in rest.iter_mut().enumerate() {
                    *r -= 0.5 * (u[(row, kk)] * ux[(kk, 0)] + v[(row, kk)] * vx[(kk, 0)]);
                }
            }
            k = group.end;
            out.push((k, norm2(&rest)));
        }
        Ok(out)
    }
}

impl Bandlimiter for FactorPlan {
    fn kind(&self) -> TransformKind {
        TransformKind::Otimes
    }

    fn shape(&self) -> (usize, usize) {
        (self.n1(), self.n2())
    }

    fn bandlimit_signal(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal> {
        self.bandlimit(x, m)
    }

    fn residuals(&self, x: &ProductSignal) -> Result<Vec<(usize, f64)>> {
        x.check_shape(self.n1(), self.n2())?;
        let (b1, b2) = self.factor_bases();
        let (u1, v1, u2, v2) = (b1.left(), b1.right(), b2.left(), b2.right());
        let xm = x.as_mat();
        let y = u2.transpose() * xm * u1;
        let yt = v2.transpose() * xm * v1;
        let mut rest = xm.to_owned();
        let pairs = self.pair_order();
        let tol = self.tie_tol();
        let mut out = Vec::new();
        for (k, p) in pairs.iter().enumerate() {
            let (cu, cv) = (y[(p.j, p.i)], yt[(p.j, p.i)]);
            for c in 0..rest.ncols() {
                for r in 0..rest.nrows() {
                    rest[(r, c)] -=
                        0.5 * (cu * u2[(r, p.j)] * u1[(c, p.i)] + cv * v2[(r, p.j)] * v1[(c, p.i)]);
                }
            }
            if k + 1 == pairs.len() || pairs[k + 1].mu > p.mu + tol {
                out.push((k + 1, rest.norm_l2()));
            }
        }
        Ok(out)
    }
}

/// Bandlimited reconstruction of a noisy observation.
pub fn denoise(plan: &dyn Bandlimiter, noisy: &ProductSignal, m: usize) -> Result<ProductSignal> {
    plan.bandlimit_signal(noisy, m)
}

/// Captured energy at every cut between degenerate groups.
pub fn energy_profile(plan: &dyn Bandlimiter, x: &ProductSignal) -> Result<Vec<EnergyPoint>> {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(plan
        .residuals(x)?
        .into_iter()
        .map(|(m, r)| EnergyPoint {
            m,
            fraction: 1.0 - r / norm,
            squared_fraction: 1.0 - (r / norm).powi(2),
        })
        .collect())
}

/// Grid and repetition settings for [`denoise_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub noise_levels: Vec<f64>,
    pub bandwidths: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub m: usize,
    pub transform: TransformKind,
    pub isnr_db: Decibels,
    pub snr_db: Decibels,
    pub trials: usize,
    pub days: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub transform: TransformKind,
    pub points: Vec<EnergyPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Profiles of the first day's clean signal.
    pub energy_profiles: Vec<EnergyProfile>,
}

/// Seed of the noise draw for one `(day, trial)`, independent of evaluation order.
pub fn trial_seed(master: u64, day: usize, trial: usize) -> u64 {
    let mut s = splitmix(master);
    s = splitmix(s ^ day as u64);
    splitmix(s ^ trial as u64)
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Averages ISNR and SNR over days and trials for each `(c, M, transform)`.
///
/// The noise of trial `t` on day `d` is drawn once from `trial_seed(seed, d, t)`
/// and scaled to each level, so every level and transform sees the same draw.
pub fn denoise_sweep(
    plans: &[&dyn Bandlimiter],
    days: &[ProductSignal],
    config: &SweepConfig,
) -> Result<SweepReport> {
    if plans.is_empty()
        || days.is_empty()
        || config.noise_levels.is_empty()
        || config.bandwidths.is_empty()
    {
        return Err(Error::InvalidArgument(
            "sweep needs at least one plan, day, noise level and bandwidth".into(),
        ));
    }
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    for &c in &config.noise_levels {
        NoiseModel::new(c, 0)?;
    }
    for plan in plans {
        let (n1, n2) = plan.shape();
        for &m in &config.bandwidths {
            if m == 0 || m > n1 * n2 {
                return Err(Error::BandwidthOutOfRange { m, n: n1 * n2 });
            }
        }
        for x in days {
            x.check_shape(n1, n2)?;
        }
    }

    let (nc, nm, np) = (
        config.noise_levels.len(),
        config.bandwidths.len(),
        plans.len(),
    );
    let mut isnr_acc = vec![Vec::new(); nc];
    let mut snr_acc = vec![Vec::new(); nc * nm * np];
    for (d, x) in days.iter().enumerate() {
        for t in 0..config.trials {
            let seed = trial_seed(config.seed, d, t);
            for (ci, &c) in config.noise_levels.iter().enumerate() {
                let noisy = add_uniform_noise(x, NoiseModel { level: c, seed });
                isnr_acc[ci].push(isnr(x, &noisy)?);
                for (mi, &m) in config.bandwidths.iter().enumerate() {
                    for (pi, plan) in plans.iter().enumerate() {
                        let estimate = denoise(*plan, &noisy, m)?;
                        snr_acc[(ci * nm + mi) * np + pi].push(snr(x, &estimate)?);
                    }
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(nc * nm * np);
    for (ci, &c) in config.noise_levels.iter().enumerate() {
        let isnr_db = Decibels::mean(&isnr_acc[ci]).expect("nonempty");
        for (mi, &m) in config.bandwidths.iter().enumerate() {
            for (pi, plan) in plans.iter().enumerate() {
                rows.push(SweepRow {
                    c,
                    m,
                    transform: plan.kind(),
                    isnr_db,
                    snr_db: Decibels::mean(&snr_acc[(ci * nm + mi) * np + pi]).expect("nonempty"),
                    trials: config.trials,
                    days: days.len(),
                    seed: config.seed,
                });
            }
        }
    }
    let energy_profiles = plans
        .iter()
        .map(|p| {
            Ok(EnergyProfile {
                transform: p.kind(),
                points: energy_profile(*p, &days[0])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport {
        rows,
        energy_profiles,
    })
}

/// Median plan construction times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub square_seconds: f64,
    pub otimes_seconds: f64,
}

impl Timing {
    pub fn ratio(&self) -> f64 {
        self.square_seconds / self.otimes_seconds
    }
}

pub fn timing_compare(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    repetitions: usize,
) -> Result<Timing> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    let mut sq = Vec::with_capacity(repetitions);
    let mut ot = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        std::hint::black_box(SquarePlan::new(g1, g2)?);
        sq.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        std::hint::black_box(FactorPlan::new(g1, g2)?);
        ot.push(start.elapsed().as_secs_f64());
    }
    Ok(Timing {
        square_seconds: median(&mut sq),
        otimes_seconds: median(&mut ot),
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
