use rayon::prelude::*;
use serde::Serialize;

use super::{fmt_f64, group_label, stream_rng, stream_seed, ExperimentConfig, Target, TargetDensity};
use crate::error::{Error, Result};
use crate::estimators::{empirical_coefficients, positive_part_renormalize, DensityEstimate, MultiCenterSystem, Sample, SeriesEstimate, DEFAULT_RIDGE};
use crate::group::{GroupElement, Transport};
use crate::orthopoly::{Family, OrthonormalBasis};
use crate::quadrature::{gauss_rule, QuadratureRule, DEFAULT_OVERSIZED_M};

/// Values within this many joint standard errors count as indistinguishable
/// for the pre-asymptotic guard of the slope fit.
pub const DROP_GUARD_SE: f64 = 2.0;
/// Minimum number of sample sizes for a rate fit.
pub const MIN_RATE_POINTS: usize = 4;

/// Rows of a CSV table.
pub trait CsvTable {
    fn columns(&self) -> &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for r in self.rows() {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Rule used for `L²(μ)` error integrals of series estimates up to degree `k_max`.
fn error_rule(config: &ExperimentConfig, target: &Target, k_max: usize) -> Result<QuadratureRule> {
    let basis = config.basis();
    let m = match (config.quadrature_nodes, basis.family) {
        (Some(m), _) => m,
        (None, Family::HermiteProbabilist) => DEFAULT_OVERSIZED_M,
        (None, Family::LegendreUniform) => {
            let deg = target.degree().unwrap_or(k_max);
            (64).max((k_max + deg) / 2 + 2)
        }
    };
    gauss_rule(basis, m)
}

fn transports(config: &ExperimentConfig) -> Result<Vec<Transport>> {
    let measure = config.basis().measure();
    config.group_list().into_iter().map(|g| Transport::new(g, measure)).collect()
}

/// `‖f̂_{g} - U_g f‖²_{L²(μ)}` by pull-back quadrature.
pub fn transported_error_sq(estimate: &SeriesEstimate, target: &Target, rule: &QuadratureRule) -> f64 {
    let t = estimate.transport();
    t.pullback_integrate(rule, |x| {
        let d = estimate.eval(x) - t.apply(|y| target.density(y), x);
        d * d
    })
}

struct Cell {
    coefficients: Vec<f64>,
    /// `errors[k_index][group_index]`
    errors: Vec<Vec<f64>>,
}

struct Sweep {
    target: Target,
    groups: Vec<GroupElement>,
    /// `k_values[n_index]`
    k_values: Vec<Vec<usize>>,
    /// `cells[n_index][replicate]`
    cells: Vec<Vec<Cell>>,
}

fn run_sweep(config: &ExperimentConfig) -> Result<Sweep> {
    config.validate()?;
    let basis = config.basis();
    let target = Target::new(config.target.clone(), basis)?;
    let ts = transports(config)?;
    let k_values = config
        .n_grid
        .iter()
        .map(|&n| config.k_rule.values(n, target.kind.smoothness()))
        .collect::<Result<Vec<_>>>()?;
    let k_top = k_values.iter().flatten().copied().max().unwrap_or(0);
    let rule = error_rule(config, &target, k_top)?;

    let jobs: Vec<(usize, usize)> = (0..config.n_grid.len()).flat_map(|i| (0..config.replicates).map(move |r| (i, r))).collect();
    let results: Vec<Result<Cell>> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let n = config.n_grid[i];
            let mut rng = stream_rng(config.seed, r as u64, i as u64);
            let sample = Sample::new(target.sample(n, &mut rng)?)?;
            let ks = &k_values[i];
            let k_max = ks.iter().copied().max().unwrap_or(0);
            let theta = empirical_coefficients(&sample, basis, k_max)?;
            let mut errors = Vec::with_capacity(ks.len());
            for &k in ks {
                let row = ts
                    .iter()
                    .map(|t| {
                        let est = SeriesEstimate::new(theta[..=k].to_vec(), basis, t.group)?;
                        Ok(transported_error_sq(&est, &target, &rule))
                    })
                    .collect::<Result<Vec<_>>>()?;
                errors.push(row);
            }
            Ok(Cell { coefficients: theta, errors })
        })
        .collect();
    let mut cells: Vec<Vec<Cell>> = (0..config.n_grid.len()).map(|_| Vec::with_capacity(config.replicates)).collect();
    for (&(i, _), res) in jobs.iter().zip(results) {
        cells[i].push(res?);
    }
    Ok(Sweep {
        target,
        groups: ts.iter().map(|t| t.group).collect(),
        k_values,
        cells,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with `n - 1` denominator; 0 for a single value.
fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

fn standard_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasVarianceRow {
    pub n: usize,
    pub k: usize,
    pub g: String,
    /// Analytic `Σ_{k>K} θ_k²`.
    pub bias2: f64,
    /// `Σ_{k<=K}` of the across-replicate variance of `θ̂_k`.
    pub var_emp: f64,
    /// Mean of the per-replicate squared `L²(μ)` error.
    pub mse: f64,
    /// Monte Carlo standard error of `mse`.
    pub se: f64,
}

impl BiasVarianceRow {
    /// `var_emp / (K/n)`.
    pub fn variance_ratio(&self) -> f64 {
        if self.k == 0 {
            return f64::NAN;
        }
        self.var_emp / (self.k as f64 / self.n as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasVarianceReport {
    pub replicates: usize,
    pub seed: u64,
    pub rows: Vec<BiasVarianceRow>,
}

impl CsvTable for BiasVarianceReport {
    fn columns(&self) -> &'static [&'static str] {
        &["n", "K", "g", "bias2", "var_emp", "mse", "se"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.n.to_string(), r.k.to_string(), r.g.clone(), fmt_f64(r.bias2), fmt_f64(r.var_emp), fmt_f64(r.mse), fmt_f64(r.se)])
            .collect()
    }
}

fn sweep_rows(config: &ExperimentConfig, sweep: &Sweep) -> Vec<BiasVarianceRow> {
    let mut rows = Vec::new();
    for (i, &n) in config.n_grid.iter().enumerate() {
        let cells = &sweep.cells[i];
        for (ki, &k) in sweep.k_values[i].iter().enumerate() {
            let var_emp: f64 = (1..=k)
                .map(|j| variance(&cells.iter().map(|c| c.coefficients[j]).collect::<Vec<_>>()))
                .sum();
            let bias2 = sweep.target.tail_sq(k);
            for (gi, g) in sweep.groups.iter().enumerate() {
                let errs: Vec<f64> = cells.iter().map(|c| c.errors[ki][gi]).collect();
                rows.push(BiasVarianceRow {
                    n,
                    k,
                    g: group_label(g),
                    bias2,
                    var_emp,
                    mse: mean(&errs),
                    se: standard_error(&errs),
                });
            }
        }
    }
    rows
}

/// Analytic squared bias and empirical variance for every `(n, K, g)`.
pub fn bias_variance_sweep(config: &ExperimentConfig) -> Result<BiasVarianceReport> {
    let sweep = run_sweep(config)?;
    Ok(BiasVarianceReport {
        replicates: config.replicates,
        seed: config.seed,
        rows: sweep_rows(config, &sweep),
    })
}

/// Ordinary least squares `y = a + b x`; returns `(b, se(b))`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, se)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub g: String,
    pub slope: f64,
    pub slope_se: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// The smallest `n` was dropped by the pre-asymptotic guard.
    pub dropped_smallest: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub replicates: usize,
    pub seed: u64,
    pub rows: Vec<RateRow>,
    /// Per-cell MSE behind the fits.
    pub cells: Vec<BiasVarianceRow>,
}

impl RateReport {
    /// Largest pairwise slope difference across group elements.
    pub fn slope_spread(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.slope).fold(f64::NEG_INFINITY, f64::max);
        let min = self.rows.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
        max - min
    }
}

impl CsvTable for RateReport {
    fn columns(&self) -> &'static [&'static str] {
        &["g", "slope", "slope_se", "n_min", "n_max"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.g.clone(), fmt_f64(r.slope), fmt_f64(r.slope_se), r.n_min.to_string(), r.n_max.to_string()])
            .collect()
    }
}

/// Log-log slope of MSE against `n` with `K` following the configured rule.
pub fn rate_study(config: &ExperimentConfig) -> Result<RateReport> {
    if config.n_grid.len() < MIN_RATE_POINTS {
        return Err(Error::InvalidConfig(format!("a rate study needs at least {MIN_RATE_POINTS} sample sizes")));
    }
    let sweep = run_sweep(config)?;
    if sweep.k_values.iter().any(|ks| ks.len() != 1) {
        return Err(Error::InvalidConfig("a rate study needs exactly one K per sample size".into()));
    }
    let cells = sweep_rows(config, &sweep);
    let mut rows = Vec::new();
    for g in &sweep.groups {
        let label = group_label(g);
        let mut pts: Vec<&BiasVarianceRow> = cells.iter().filter(|c| c.g == label).collect();
        let dropped = {
            let (a, b) = (pts[0], pts[1]);
            (a.mse - b.mse).abs() <= DROP_GUARD_SE * (a.se * a.se + b.se * b.se).sqrt()
        };
        if dropped {
            pts.remove(0);
        }
        let x: Vec<f64> = pts.iter().map(|c| (c.n as f64).ln()).collect();
        let y: Vec<f64> = pts.iter().map(|c| c.mse.ln()).collect();
        let (slope, slope_se) = ols_slope(&x, &y);
        rows.push(RateRow {
            g: label,
            slope,
            slope_se,
            n_min: pts[0].n,
            n_max: pts[pts.len() - 1].n,
            dropped_smallest: dropped,
        });
    }
    Ok(RateReport {
        replicates: config.replicates,
        seed: config.seed,
        rows,
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceErrorRow {
    pub g: String,
    pub replicates: usize,
    /// `max_r |‖f̂_g - f^{(g)}‖ - ‖f̂_e - f‖| / ‖f̂_e - f‖`.
    pub max_rel_diff: f64,
    pub mean_base_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceErrorReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<EquivarianceErrorRow>,
}

impl EquivarianceErrorReport {
    pub fn max_rel_diff(&self) -> f64 {
        self.rows.iter().map(|r| r.max_rel_diff).fold(0.0, f64::max)
    }
}

impl CsvTable for EquivarianceErrorReport {
    fn columns(&self) -> &'static [&'static str] {
        &["g", "replicates", "max_rel_diff", "mean_base_error"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.g.clone(), r.replicates.to_string(), fmt_f64(r.max_rel_diff), fmt_f64(r.mean_base_error)])
            .collect()
    }
}

/// Compares, replicate by replicate, the base error `‖f̂_e - f‖` computed on
/// the base rule with the transported error `‖f̂_g - U_g f‖` computed by
/// pull-back, at the first `n` and first `K` of the config.
pub fn equivariance_error_identity(config: &ExperimentConfig) -> Result<EquivarianceErrorReport> {
    config.validate()?;
    let basis = config.basis();
    let target = Target::new(config.target.clone(), basis)?;
    let n = config.n_grid[0];
    let k = config.k_rule.values(n, target.kind.smoothness())?[0];
    let rule = error_rule(config, &target, k)?;
    let ts = transports(config)?;

    let per_rep: Vec<Result<(f64, Vec<f64>)>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, r as u64, 0);
            let sample = Sample::new(target.sample(n, &mut rng)?)?;
            let theta = empirical_coefficients(&sample, basis, k)?;
            let base = SeriesEstimate::new(theta.clone(), basis, GroupElement::IDENTITY)?;
            let base_err = rule.integrate_fn(|x| (base.eval(x) - target.density(x)).powi(2)).sqrt();
            let trans = ts
                .iter()
                .map(|t| {
                    let est = SeriesEstimate::new(theta.clone(), basis, t.group)?;
                    Ok(transported_error_sq(&est, &target, &rule).sqrt())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((base_err, trans))
        })
        .collect();
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = ts
        .iter()
        .enumerate()
        .map(|(gi, t)| {
            let max_rel_diff = per_rep.iter().map(|(b, tr)| (tr[gi] - b).abs() / b).fold(0.0, f64::max);
            EquivarianceErrorRow {
                g: group_label(&t.group),
                replicates: config.replicates,
                max_rel_diff,
                mean_base_error: mean(&per_rep.iter().map(|p| p.0).collect::<Vec<_>>()),
            }
        })
        .collect();
    Ok(EquivarianceErrorReport {
        n,
        k,
        seed: config.seed,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultimodalRow {
    pub scheme: String,
    pub dimension: usize,
    pub centers: Vec<f64>,
    pub ise_median: f64,
    pub ise_iqr: f64,
    /// Population rows only: `‖f_LS - f‖_{L²(γ)}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultimodalReport {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub positive_part: bool,
    pub rows: Vec<MultimodalRow>,
}

impl MultimodalReport {
    pub fn row(&self, scheme: &str, dimension: usize) -> Option<&MultimodalRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.dimension == dimension)
    }
}

impl CsvTable for MultimodalReport {
    fn columns(&self) -> &'static [&'static str] {
        &["scheme", "dimension", "ise_median", "ise_iqr"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.scheme.clone(), r.dimension.to_string(), fmt_f64(r.ise_median), fmt_f64(r.ise_iqr)])
            .collect()
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn median_iqr(mut xs: Vec<f64>) -> (f64, f64) {
    xs.sort_by(|a, b| a.total_cmp(b));
    (quantile(&xs, 0.5), quantile(&xs, 0.75) - quantile(&xs, 0.25))
}

pub const SINGLE_CENTER: &str = "single-center";
pub const MULTI_CENTER: &str = "two-center";
pub const COMPARISON: &str = "comparison";
pub const POPULATION_SUFFIX: &str = "-population";

/// ISE against the Lebesgue-density truth and single- vs multi-center
/// estimators at equal total dimension.
pub fn multimodal_comparison(config: &ExperimentConfig) -> Result<MultimodalReport> {
    config.validate()?;
    if !matches!(config.target, TargetDensity::BimodalGaussian { .. }) {
        return Err(Error::InvalidConfig("the multimodal comparison needs the bimodal target".into()));
    }
    let target = Target::new(config.target.clone(), OrthonormalBasis::HERMITE)?;
    let rule = gauss_rule(OrthonormalBasis::HERMITE, config.quadrature_nodes.unwrap_or(DEFAULT_OVERSIZED_M))?;
    let n = config.n_grid[0];

    let mut schemes: Vec<(String, Vec<f64>)> = vec![(SINGLE_CENTER.into(), vec![0.0])];
    let multi_name = if config.centers.len() == 2 { MULTI_CENTER.to_string() } else { format!("{}-center", config.centers.len()) };
    schemes.push((multi_name, config.centers.clone()));
    if let Some(c) = &config.comparison_centers {
        schemes.push((COMPARISON.into(), c.clone()));
    }

    // (scheme, dimension, system)
    let mut systems = Vec::new();
    for &d in &config.dimensions {
        for (name, centers) in &schemes {
            if d % centers.len() != 0 || d < centers.len() {
                return Err(Error::InvalidConfig(format!("dimension {d} is not a multiple of {} centers", centers.len())));
            }
            let k = d / centers.len() - 1;
            systems.push((name.clone(), d, MultiCenterSystem::new(centers, k, rule.clone(), DEFAULT_RIDGE)?));
        }
    }

    let phi: Vec<f64> = rule.nodes.iter().map(|&x| crate::measure::Measure::GaussianStd.density(x)).collect();
    let truth: Vec<f64> = rule.nodes.iter().map(|&x| target.density(x)).collect();
    let ise = |est: &dyn DensityEstimate| -> Result<f64> {
        let mut vals: Vec<f64> = rule.nodes.iter().map(|&x| est.eval(x)).collect();
        if config.positive_part {
            vals = positive_part_renormalize(&vals, &rule)?.0;
        }
        Ok(vals
            .iter()
            .zip(&truth)
            .zip(rule.weights.iter().zip(&phi))
            .map(|((v, f), (w, p))| w * p * (v - f).powi(2))
            .sum())
    };

    let per_rep: Vec<Result<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(config.seed, r as u64, 0);
            let sample = target.sample_with_seed(n, &mut rng, stream_seed(config.seed, r as u64, 0))?;
            systems.iter().map(|(_, _, sys)| ise(&sys.fit(&sample)?)).collect()
        })
        .collect();
    let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (si, (name, d, sys)) in systems.iter().enumerate() {
        let (med, iqr) = median_iqr(per_rep.iter().map(|v| v[si]).collect());
        rows.push(MultimodalRow {
            scheme: name.clone(),
            dimension: *d,
            centers: sys.centers.clone(),
            ise_median: med,
            ise_iqr: iqr,
            l2_gamma: None,
        });
    }
    for (name, d, sys) in &systems {
        let est = sys.fit_population(|x| target.density(x))?;
        let l2 = rule.integrate_fn(|x| (est.eval(x) - target.density(x)).powi(2)).sqrt();
        rows.push(MultimodalRow {
            scheme: format!("{name}{POPULATION_SUFFIX}"),
            dimension: *d,
            centers: sys.centers.clone(),
            ise_median: ise(&est)?,
            ise_iqr: 0.0,
            l2_gamma: Some(l2),
        });
    }
    Ok(MultimodalReport {
        n,
        replicates: config.replicates,
        seed: config.seed,
        positive_part: config.positive_part,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::KRule;

    fn small(mut c: ExperimentConfig, reps: usize) -> ExperimentConfig {
        c.replicates = reps;
        c
    }

    #[test]
    fn ols_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (b, se) = ols_slope(&x, &y);
        assert!((b - 2.0).abs() < 1e-14 && se < 1e-7);
    }

    #[test]
    fn quantiles() {
        let (m, iqr) = median_iqr(vec![4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(m, 3.0);
        assert_eq!(iqr, 2.0);
    }

    #[test]
    fn bias_is_zero_past_the_last_coefficient() {
        let mut c = small(ExperimentConfig::bias_variance_preset(), 20);
        c.n_grid = vec![500];
        c.k_rule = KRule::Fixed { values: vec![40, 45] };
        let rep = bias_variance_sweep(&c).unwrap();
        assert!(rep.rows.iter().all(|r| r.bias2 == 0.0));
    }

    #[test]
    fn sweep_is_deterministic_and_consistent() {
        let mut c = small(ExperimentConfig::bias_variance_preset(), 60);
        c.n_grid = vec![400, 800];
        let a = bias_variance_sweep(&c).unwrap();
        let b = bias_variance_sweep(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        for r in &a.rows {
            assert!(r.mse >= r.bias2 - 3.0 * r.se);
            assert!((r.bias2 + r.var_emp - r.mse).abs() <= 3.0 * r.se + 0.2 * r.mse, "{r:?}");
        }
        // transported rows repeat the base numbers
        assert!((a.rows[0].mse - a.rows[1].mse).abs() <= 1e-12 * a.rows[0].mse);
    }

    #[test]
    fn equivariance_error_on_legendre_target() {
        let mut c = small(ExperimentConfig::bias_variance_preset(), 8);
        c.n_grid = vec![300];
        c.k_rule = KRule::Fixed { values: vec![8] };
        let rep = equivariance_error_identity(&c).unwrap();
        assert_eq!(rep.rows[0].max_rel_diff.abs(), 0.0);
        assert!(rep.max_rel_diff() <= 1e-8);
    }

    #[test]
    fn rate_study_needs_four_sizes() {
        let mut c = ExperimentConfig::rates_preset();
        c.n_grid = vec![250, 500, 1000];
        assert!(rate_study(&c).is_err());
    }

    #[test]
    fn sampler_moments() {
        let t = Target::new(TargetDensity::BaseMeasureItself, OrthonormalBasis::HERMITE).unwrap();
        let n = 100_000;
        let xs = t.sample(n, &mut stream_rng(1, 0, 0)).unwrap();
        let m = mean(&xs);
        assert!(m.abs() <= 4.0 / (n as f64).sqrt());
        assert!((variance(&xs) - 1.0).abs() <= 0.05);

        let t = Target::new(TargetDensity::bimodal_default(), OrthonormalBasis::HERMITE).unwrap();
        let xs = t.sample(10_000, &mut stream_rng(1, 0, 0)).unwrap();
        assert!(mean(&xs).abs() <= 0.1);
        let abs = mean(&xs.iter().map(|x| x.abs()).collect::<Vec<_>>());
        assert!((1.5..=2.3).contains(&abs));
        assert_eq!(xs, t.sample(10_000, &mut stream_rng(1, 0, 0)).unwrap());
    }

    #[test]
    fn sobolev_target_is_valid_on_legendre_only() {
        let t = Target::new(TargetDensity::sobolev_default(), OrthonormalBasis::LEGENDRE).unwrap();
        assert!(t.envelope() > 1.0 && t.envelope() < 100.0);
        let rule = gauss_rule(OrthonormalBasis::LEGENDRE, 64).unwrap();
        assert!((rule.integrate_fn(|x| t.density(x)) - 1.0).abs() <= 1e-8);
        assert!(matches!(
            Target::new(TargetDensity::sobolev_default(), OrthonormalBasis::HERMITE),
            Err(Error::NegativeTarget { .. })
        ));
        let big = TargetDensity::SobolevSeries {
            t: 1.0,
            scale: 0.3,
            k_max: 40,
            radius: Some(0.1),
        };
        assert!(Target::new(big, OrthonormalBasis::LEGENDRE).is_err());
    }

    #[test]
    fn bimodal_coefficients_match_quadrature() {
        let t = Target::new(TargetDensity::bimodal_default(), OrthonormalBasis::HERMITE).unwrap();
        let rule = gauss_rule(OrthonormalBasis::HERMITE, DEFAULT_OVERSIZED_M).unwrap();
        for k in 0..12 {
            let q = rule.integrate_fn(|x| t.density(x) * OrthonormalBasis::HERMITE.eval_one(k, x));
            assert!((q - t.coefficient(k)).abs() <= 1e-10 * t.coefficient(k).abs().max(1.0), "{k}");
        }
        let norm = (-4.0f64).exp() * (1.0 + 8.0f64.exp()) / 2.0;
        assert!((t.tail_sq(0) + 1.0 - norm).abs() <= 1e-10 * norm);
    }
}
