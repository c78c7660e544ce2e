//! Per-position linear ensembles combining the baseline projection with the
//! classifier probabilities.
//!
//! Least squares is solved with Householder QR and column pivoting. A
//! rank-deficient design falls back to the minimum-norm solution through a
//! complete orthogonal decomposition.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roster::Position;
use crate::table;

/// Householder reflectors of a QR factorization, stored LAPACK-style: the
/// essential part of each reflector below the diagonal of `a`, its scale in
/// `tau`, and `R` on and above the diagonal.
struct Householder {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    tau: Vec<f64>,
    /// Column permutation: position `k` of the factorization holds original
    /// column `perm[k]`.
    perm: Vec<usize>,
}

impl Householder {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    /// Factorizes a row-major `rows × cols` matrix, pivoting on the largest
    /// remaining column norm when `pivot` is set.
    fn factor(rows: usize, cols: usize, mut a: Vec<f64>, pivot: bool) -> Householder {
        let steps = rows.min(cols);
        let mut tau = vec![0.0; steps];
        let mut perm: Vec<usize> = (0..cols).collect();
        for k in 0..steps {
            if pivot {
                let norm2 = |c: usize, a: &[f64]| (k..rows).map(|r| a[r * cols + c].powi(2)).sum::<f64>();
                let best = (k..cols).max_by(|&x, &y| norm2(x, &a).total_cmp(&norm2(y, &a)).then(y.cmp(&x))).unwrap_or(k);
                if best != k {
                    for r in 0..rows {
                        a.swap(r * cols + k, r * cols + best);
                    }
                    perm.swap(k, best);
                }
            }
            let alpha = a[k * cols + k];
            let tail: f64 = (k + 1..rows).map(|r| a[r * cols + k].powi(2)).sum();
            if tail == 0.0 {
                tau[k] = 0.0;
                continue;
            }
            let norm = (alpha * alpha + tail).sqrt();
            let beta = if alpha >= 0.0 { -norm } else { norm };
            tau[k] = (beta - alpha) / beta;
            let scale = 1.0 / (alpha - beta);
            for r in k + 1..rows {
                a[r * cols + k] *= scale;
            }
            a[k * cols + k] = beta;
            for c in k + 1..cols {
                let mut s = a[k * cols + c];
                for r in k + 1..rows {
                    s += a[r * cols + k] * a[r * cols + c];
                }
                s *= tau[k];
                a[k * cols + c] -= s;
                for r in k + 1..rows {
                    a[r * cols + c] -= s * a[r * cols + k];
                }
            }
        }
        Householder { rows, cols, a, tau, perm }
    }

    /// Applies `Qᵀ` to a vector of length `rows`.
    fn apply_qt(&self, v: &mut [f64]) {
        for k in 0..self.tau.len() {
            self.reflect(k, v);
        }
    }

    /// Applies `Q` to a vector of length `rows`.
    fn apply_q(&self, v: &mut [f64]) {
        for k in (0..self.tau.len()).rev() {
            self.reflect(k, v);
        }
    }

    fn reflect(&self, k: usize, v: &mut [f64]) {
        if self.tau[k] == 0.0 {
            return;
        }
        let mut s = v[k];
        for r in k + 1..self.rows {
            s += self.at(r, k) * v[r];
        }
        s *= self.tau[k];
        v[k] -= s;
        for r in k + 1..self.rows {
            v[r] -= s * self.at(r, k);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    /// Set when the design has fewer independent columns than coefficients
    /// and the minimum-norm solution was returned.
    pub rank_deficient: bool,
}

/// Minimizes `‖Xβ − y‖₂`. `x` holds one row per observation, intercept
/// column included by the caller.
pub fn fit_least_squares(x: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let m = x.len();
    if m == 0 {
        return Err(Error::EmptySample("no rows to fit".into()));
    }
    if y.len() != m {
        return Err(Error::ShapeMismatch { expected: m, got: y.len() });
    }
    let n = x[0].len();
    if n == 0 {
        return Err(Error::invalid("design matrix has no columns"));
    }
    if let Some(r) = x.iter().find(|r| r.len() != n) {
        return Err(Error::ShapeMismatch { expected: n, got: r.len() });
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("design matrix or targets are not finite"));
    }
    let qr = Householder::factor(m, n, x.iter().flatten().copied().collect(), true);
    let steps = m.min(n);
    let r00 = qr.at(0, 0).abs();
    let tol = (m.max(n) as f64) * f64::EPSILON * r00 * 16.0;
    let rank = if r00 == 0.0 {
        0
    } else {
        (0..steps).take_while(|&k| qr.at(k, k).abs() > tol).count()
    };
    let mut c = y.to_vec();
    qr.apply_qt(&mut c);

    let mut permuted = vec![0.0; n];
    if rank == n {
        for k in (0..n).rev() {
            let mut s = c[k];
            for j in k + 1..n {
                s -= qr.at(k, j) * permuted[j];
            }
            permuted[k] = s / qr.at(k, k);
        }
    } else if rank > 0 {
        // [R11 R12]ᵀ = Z S, so A P = Q₁ Sᵀ Zᵀ and the minimum-norm solution
        // is P Z w with Sᵀ w = c₁.
        let mut t = vec![0.0; n * rank];
        for i in 0..rank {
            for j in i..n {
                t[j * rank + i] = qr.at(i, j);
            }
        }
        let z = Householder::factor(n, rank, t, false);
        let mut w = vec![0.0; n];
        for i in 0..rank {
            let mut s = c[i];
            for j in 0..i {
                s -= z.at(j, i) * w[j];
            }
            w[i] = s / z.at(i, i);
        }
        z.apply_q(&mut w);
        permuted = w;
    }
    let mut coefficients = vec![0.0; n];
    for (k, &col) in qr.perm.iter().enumerate() {
        coefficients[col] = permuted[k];
    }
    Ok(LeastSquares {
        coefficients,
        rank,
        rank_deficient: rank < n,
    })
}

/// One player-week of regression input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionInput {
    pub player_id: String,
    pub week: u32,
    pub position: Position,
    pub baseline_projection: f64,
    pub p_boom: f64,
    pub p_bust: f64,
    pub p_injury: f64,
    pub p_meaningful: f64,
}

impl ProjectionInput {
    pub fn validate(&self) -> Result<()> {
        if !self.baseline_projection.is_finite() {
            return Err(Error::invalid(format!("{} week {}: baseline is not finite", self.player_id, self.week)));
        }
        for p in [self.p_boom, self.p_bust, self.p_injury, self.p_meaningful] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{} week {}: probability {p} outside [0, 1]", self.player_id, self.week)));
            }
        }
        Ok(())
    }

    fn value(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Baseline => self.baseline_projection,
            Feature::Boom => self.p_boom,
            Feature::Bust => self.p_bust,
            Feature::Injury => self.p_injury,
            Feature::Meaningful => self.p_meaningful,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Baseline,
    Boom,
    Bust,
    Injury,
    Meaningful,
}

impl Feature {
    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Baseline => "baseline_projection",
            Feature::Boom => "p_boom",
            Feature::Bust => "p_bust",
            Feature::Injury => "p_injury",
            Feature::Meaningful => "p_meaningful",
        }
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Feature::Baseline, Feature::Boom, Feature::Bust, Feature::Injury, Feature::Meaningful]
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown feature {s:?}")))
    }
}

/// Which regressors a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    /// Baseline projection plus the four state probabilities.
    Combined,
    BaselineOnly,
    /// The four probabilities without the baseline; reported as the
    /// language-adjusted projection.
    ProbabilitiesOnly,
}

impl FeatureSet {
    pub fn features(self) -> Vec<Feature> {
        let probs = [Feature::Boom, Feature::Bust, Feature::Injury, Feature::Meaningful];
        match self {
            FeatureSet::Combined => std::iter::once(Feature::Baseline).chain(probs).collect(),
            FeatureSet::BaselineOnly => vec![Feature::Baseline],
            FeatureSet::ProbabilitiesOnly => probs.to_vec(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Combined => "combined",
            FeatureSet::BaselineOnly => "baseline_only",
            FeatureSet::ProbabilitiesOnly => "probabilities_only",
        }
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combined" => Ok(FeatureSet::Combined),
            "baseline_only" => Ok(FeatureSet::BaselineOnly),
            "probabilities_only" => Ok(FeatureSet::ProbabilitiesOnly),
            other => Err(Error::invalid(format!("unknown feature set {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    /// `None` for the pooled all-positions model.
    pub position: Option<Position>,
    pub features: Vec<Feature>,
    /// Intercept first, then one coefficient per feature.
    pub coefficients: Vec<f64>,
    pub rank_deficient: bool,
}

impl RegressionModel {
    pub fn predict(&self, input: &ProjectionInput) -> f64 {
        self.coefficients[0]
            + self
                .features
                .iter()
                .zip(&self.coefficients[1..])
                .map(|(f, b)| b * input.value(*f))
                .sum::<f64>()
    }
}

/// A regression training example: inputs and the realized score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRow {
    pub input: ProjectionInput,
    pub actual: f64,
}

fn fit_group(rows: &[&TrainingRow], features: &[Feature], position: Option<Position>) -> Result<RegressionModel> {
    let x: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| std::iter::once(1.0).chain(features.iter().map(|f| r.input.value(*f))).collect())
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.actual).collect();
    let fit = fit_least_squares(&x, &y)?;
    Ok(RegressionModel {
        position,
        features: features.to_vec(),
        coefficients: fit.coefficients,
        rank_deficient: fit.rank_deficient,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub models: BTreeMap<Position, RegressionModel>,
    /// Fitted on all rows; serves positions without their own model.
    pub pooled: Option<RegressionModel>,
    /// Positions present in training data that had too few rows for their
    /// own model.
    pub pooled_fallback: Vec<Position>,
}

/// One model per position with at least `features + 1` rows; other positions
/// use the pooled model.
pub fn fit_ensemble(rows: &[TrainingRow], set: FeatureSet) -> Result<Ensemble> {
    let features = set.features();
    let needed = features.len() + 1;
    for r in rows {
        r.input.validate()?;
        if !r.actual.is_finite() {
            return Err(Error::invalid(format!("{} week {}: actual is not finite", r.input.player_id, r.input.week)));
        }
    }
    let mut groups: BTreeMap<Position, Vec<&TrainingRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.input.position).or_default().push(r);
    }
    let mut models = BTreeMap::new();
    let mut pooled_fallback = Vec::new();
    for (pos, group) in &groups {
        if group.len() >= needed {
            models.insert(*pos, fit_group(group, &features, Some(*pos))?);
        } else {
            pooled_fallback.push(*pos);
        }
    }
    let pooled = if rows.len() >= needed {
        let all: Vec<&TrainingRow> = rows.iter().collect();
        Some(fit_group(&all, &features, None)?)
    } else {
        None
    };
    if models.is_empty() && pooled.is_none() {
        return Err(Error::EmptySample(format!("no position group has the {needed} rows a fit needs")));
    }
    Ok(Ensemble {
        models,
        pooled,
        pooled_fallback,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    pub pooled_fallback: bool,
}

impl Ensemble {
    pub fn model_for(&self, position: Position) -> Result<(&RegressionModel, bool)> {
        match self.models.get(&position) {
            Some(m) => Ok((m, false)),
            None => self
                .pooled
                .as_ref()
                .map(|m| (m, true))
                .ok_or_else(|| Error::MissingModel(format!("position {position}"))),
        }
    }

    pub fn predict(&self, input: &ProjectionInput) -> Result<Prediction> {
        let (model, pooled_fallback) = self.model_for(input.position)?;
        Ok(Prediction {
            value: model.predict(input),
            pooled_fallback,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("position,feature,beta\n");
        let all = self.models.values().chain(self.pooled.as_ref());
        for m in all {
            let pos = m.position.map_or("ALL", |p| p.as_str());
            out.push_str(&format!("{pos},intercept,{}\n", m.coefficients[0]));
            for (f, b) in m.features.iter().zip(&m.coefficients[1..]) {
                out.push_str(&format!("{pos},{},{b}\n", f.as_str()));
            }
        }
        out
    }

    pub fn parse(input: &str) -> Result<Ensemble> {
        let mut grouped: BTreeMap<String, (Vec<Feature>, Vec<f64>)> = BTreeMap::new();
        for row in table::rows(input, "position") {
            let pos = row.str(0)?.to_string();
            let feature = row.str(1)?;
            let beta: f64 = row.parse(2)?;
            let entry = grouped.entry(pos).or_default();
            if feature == "intercept" {
                if !entry.1.is_empty() {
                    return Err(Error::parse(format!("line {}", row.line), "intercept must come first"));
                }
            } else {
                if entry.1.is_empty() {
                    return Err(Error::parse(format!("line {}", row.line), "intercept must come first"));
                }
                entry.0.push(feature.parse()?);
            }
            entry.1.push(beta);
        }
        let mut models = BTreeMap::new();
        let mut pooled = None;
        for (pos, (features, coefficients)) in grouped {
            let position = if pos == "ALL" { None } else { Some(pos.parse::<Position>()?) };
            let model = RegressionModel {
                position,
                features,
                coefficients,
                rank_deficient: false,
            };
            match position {
                Some(p) => {
                    models.insert(p, model);
                }
                None => pooled = Some(model),
            }
        }
        if models.is_empty() && pooled.is_none() {
            return Err(Error::parse("model file", "no coefficients"));
        }
        Ok(Ensemble {
            models,
            pooled,
            pooled_fallback: Vec::new(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Ensemble> {
        Ensemble::parse(&table::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn rmse(predictions: &[f64], actuals: &[f64]) -> Result<f64> {
    if predictions.len() != actuals.len() {
        return Err(Error::ShapeMismatch {
            expected: actuals.len(),
            got: predictions.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptySample("no predictions to score".into()));
    }
    let sse: f64 = predictions.iter().zip(actuals).map(|(p, a)| (p - a).powi(2)).sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

pub const TRAINING_HEADER: &str =
    "player_id,week,position,baseline_projection,p_boom,p_bust,p_injury,p_meaningful,actual";

pub fn format_training_rows(rows: &[TrainingRow]) -> Result<String> {
    let mut out = format!("{TRAINING_HEADER}\n");
    for r in rows {
        let i = &r.input;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            table::check_field(&i.player_id)?,
            i.week,
            i.position,
            i.baseline_projection,
            i.p_boom,
            i.p_bust,
            i.p_injury,
            i.p_meaningful,
            r.actual
        ));
    }
    Ok(out)
}

pub fn parse_training_rows(input: &str) -> Result<Vec<TrainingRow>> {
    table::rows(input, "player_id")
        .iter()
        .map(|r| {
            let row = TrainingRow {
                input: ProjectionInput {
                    player_id: r.str(0)?.to_string(),
                    week: r.parse(1)?,
                    position: r.parse(2)?,
                    baseline_projection: r.parse(3)?,
                    p_boom: r.parse(4)?,
                    p_bust: r.parse(5)?,
                    p_injury: r.parse(6)?,
                    p_meaningful: r.parse(7)?,
                },
                actual: r.parse(8)?,
            };
            row.input.validate()?;
            Ok(row)
        })
        .collect()
}
