//! Worked examples: a flat non-integrable almost Hermitian structure on R^6 and
//! the Kaehler / para-Kaehler surface products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::nijenhuis_at;
use crate::io::{MetricFile, ModelFile, ThetaFile};
use crate::linalg::{Matrix, Vector};
use crate::rational::{int, serde_str};
use crate::realization::{metric_from_theta, surface_product_theta, PolynomialMetric, L};
use crate::structure::{model_from_components, CurvatureModel, Kind, Structure, ThetaTensor};
use crate::Rational;

pub const FIXTURE_NAMES: [&str; 3] = [
    "gray-nonintegrable-r6",
    "kaehler-surface-product",
    "para-surface-product",
];

/// 1-jet at the origin of an almost complex structure on flat R^6 with
/// coordinates `(x1, y1, x2, y2, x3, y3)`:
/// `J∂x1 = cos x3 ∂y1 + sin x3 ∂y2`, `J∂y1 = -cos x3 ∂x1 + sin x3 ∂x2`,
/// `J∂x2 = -sin x3 ∂y1 + cos x3 ∂y2`, `J∂y2 = -sin x3 ∂x1 - cos x3 ∂x2`,
/// `J∂x3 = ∂y3`, `J∂y3 = -∂x3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlmostComplexJet {
    /// `J(0)`; column `b` is the image of `∂_b`.
    pub j0: Matrix,
    /// `∂_k J(0)` for each coordinate `k`.
    pub dj: Vec<Matrix>,
}

impl AlmostComplexJet {
    pub fn nonintegrable_r6() -> Self {
        let mut j0 = Matrix::zeros(6, 6);
        for k in 0..3 {
            j0[(2 * k + 1, 2 * k)] = int(1);
            j0[(2 * k, 2 * k + 1)] = int(-1);
        }
        // only the x3-derivative survives: d/dx3 of cos is 0, of sin is 1 at 0
        let mut dx3 = Matrix::zeros(6, 6);
        dx3[(3, 0)] = int(1);
        dx3[(2, 1)] = int(1);
        dx3[(1, 2)] = int(-1);
        dx3[(0, 3)] = int(-1);
        let mut dj = vec![Matrix::zeros(6, 6); 6];
        dj[4] = dx3;
        Self { j0, dj }
    }

    pub fn nijenhuis(&self, i: usize, j: usize) -> Vector {
        nijenhuis_at(&self.j0, &self.dj, i, j, Kind::Complex)
    }

    /// The background metric, flat.
    pub fn metric(&self) -> PolynomialMetric {
        PolynomialMetric::flat(&Structure::standard(6, Kind::Complex).expect("m = 6"))
    }
}

fn matrix_rows(a: &Matrix) -> Vec<Vec<StrRational>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().cloned().map(StrRational).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<StrRational>]) -> Result<Matrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("jet matrices must be square".into()));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j].0.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrRational(#[serde(with = "serde_str")] pub Rational);

/// Serialized almost complex jet: `J0` and the nonzero derivatives `dJ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetFile {
    pub m: usize,
    #[serde(rename = "J0")]
    pub j0: Vec<Vec<StrRational>>,
    /// `(coordinate, ∂J)` with 1-based coordinates.
    #[serde(rename = "dJ")]
    pub dj: Vec<JetDerivative>,
    pub metric: MetricFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetDerivative {
    pub coordinate: usize,
    pub matrix: Vec<Vec<StrRational>>,
}

impl JetFile {
    pub fn from_jet(jet: &AlmostComplexJet) -> Self {
        let dj = jet
            .dj
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(k, d)| JetDerivative {
                coordinate: k + 1,
                matrix: matrix_rows(d),
            })
            .collect();
        Self {
            m: jet.j0.rows(),
            j0: matrix_rows(&jet.j0),
            dj,
            metric: MetricFile::from_metric(&jet.metric()),
        }
    }

    pub fn to_jet(&self) -> Result<AlmostComplexJet> {
        let j0 = matrix_from_rows(&self.j0)?;
        if j0.rows() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: j0.rows(),
            });
        }
        let mut dj = vec![Matrix::zeros(self.m, self.m); self.m];
        for d in &self.dj {
            if d.coordinate == 0 || d.coordinate > self.m {
                return Err(Error::IndexOutOfRange {
                    index: d.coordinate,
                    m: self.m,
                });
            }
            dj[d.coordinate - 1] = matrix_from_rows(&d.matrix)?;
        }
        Ok(AlmostComplexJet { j0, dj })
    }
}

/// A surface-product example: `Θ`, its metric, and the associated model.
#[derive(Debug, Clone)]
pub struct SurfaceProduct {
    pub theta: ThetaTensor,
    pub model: CurvatureModel,
}

impl SurfaceProduct {
    pub fn metric(&self) -> PolynomialMetric {
        metric_from_theta(&self.theta)
    }
}

/// Complex kind: `Θ = ½(e¹e¹ + e²e²) ⊗ (e¹e¹ + e²e²)` on R^4 together with the model
/// `A(1,2,2,1) = 1`, the curvature of `g_Θ` at the origin up to the global sign
/// `L(Θ) = -A`.
pub fn kaehler_surface_product() -> SurfaceProduct {
    let s = Structure::standard(4, Kind::Complex).expect("m = 4");
    let model = model_from_components(&s, &[([1, 2, 2, 1], int(1))]).expect("valid model");
    SurfaceProduct {
        theta: surface_product_theta(&s),
        model,
    }
}

/// Para kind: `Θ̃ = ½(e¹e¹ - e²e²) ⊗ (e¹e¹ - e²e²)` with model `L(Θ̃)`.
pub fn para_surface_product() -> SurfaceProduct {
    let s = Structure::standard(4, Kind::Para).expect("m = 4");
    let theta = surface_product_theta(&s);
    let model = CurvatureModel::new(s, L(&theta)).expect("L maps into curvature tensors");
    SurfaceProduct { theta, model }
}

/// Serialized fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixtureFile {
    Jet {
        name: String,
        jet: JetFile,
    },
    Surface {
        name: String,
        theta: ThetaFile,
        metric: MetricFile,
        model: ModelFile,
    },
}

pub fn fixture(name: &str) -> Result<FixtureFile> {
    let surface = |p: SurfaceProduct| FixtureFile::Surface {
        name: name.to_string(),
        theta: ThetaFile::from_theta(&p.theta),
        metric: MetricFile::from_metric(&p.metric()),
        model: ModelFile::from_model(&p.model),
    };
    match name {
        "gray-nonintegrable-r6" => Ok(FixtureFile::Jet {
            name: name.to_string(),
            jet: JetFile::from_jet(&AlmostComplexJet::nonintegrable_r6()),
        }),
        "kaehler-surface-product" => Ok(surface(kaehler_surface_product())),
        "para-surface-product" => Ok(surface(para_surface_product())),
        _ => Err(Error::UnknownFixture(name.to_string())),
    }
}
