//! The three Venn-region programs.
//!
//! A model's variables are the region fractions `z_F`, one per region of
//! the Venn diagram of the base sets. Every `y` quantity is a linear
//! aggregate of the `z_F`, never a free variable. Constraint 0 is always
//! `Σ z_F = 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::expr::{Expr, Lin, SqrtMode};
use super::NlpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    OddTorus,
    EvenTorus,
    Regular,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::OddTorus, ModelKind::EvenTorus, ModelKind::Regular];

    /// Base set names; set `k` is bit `k` of a region mask.
    pub fn set_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::OddTorus => &["R", "C", "D", "S"],
            ModelKind::EvenTorus | ModelKind::Regular => &["R", "C", "D0", "D1", "S0", "S1"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::OddTorus => "odd-torus",
            ModelKind::EvenTorus => "even-torus",
            ModelKind::Regular => "regular",
        })
    }
}

impl FromStr for ModelKind {
    type Err = NlpError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "odd-torus" => Ok(ModelKind::OddTorus),
            "even-torus" => Ok(ModelKind::EvenTorus),
            "regular" => Ok(ModelKind::Regular),
            other => Err(NlpError::UnknownModel(other.to_string())),
        }
    }
}

/// One Venn region: bit `k` set means the region lies inside base set `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionMask(pub u8);

impl RegionMask {
    pub fn all(set_count: usize) -> impl Iterator<Item = RegionMask> {
        (0..1u16 << set_count).map(|m| RegionMask(m as u8))
    }

    pub fn inside(self, sets: u8) -> bool {
        self.0 & sets == sets
    }

    pub fn name(self, set_names: &[&str]) -> String {
        let parts: Vec<&str> = set_names
            .iter()
            .enumerate()
            .filter(|(k, _)| self.0 >> k & 1 == 1)
            .map(|(_, s)| *s)
            .collect();
        if parts.is_empty() {
            "z_none".into()
        } else {
            format!("z_{}", parts.join("."))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub lhs: Expr,
    pub rel: Rel,
    pub rhs: Expr,
}

impl Constraint {
    /// `lhs − rhs`.
    pub fn gap(&self, x: &[f64], mode: SqrtMode) -> f64 {
        self.lhs.eval(x, mode) - self.rhs.eval(x, mode)
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        let g = self.gap(x, SqrtMode::Exact);
        match self.rel {
            Rel::Eq => g.abs(),
            Rel::Le => g.max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub name: String,
    pub lin: Lin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlpModel {
    /// `None` for models read back from text.
    pub kind: Option<ModelKind>,
    pub vars: Vec<VarDecl>,
    pub aggregates: Vec<Aggregate>,
    pub constraints: Vec<Constraint>,
    /// Maximize the minimum of these.
    pub objective: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub residuals: Vec<f64>,
    /// Largest distance outside a variable's box.
    pub bound_violation: f64,
}

impl Evaluation {
    pub fn max_violation(&self) -> f64 {
        self.residuals.iter().fold(self.bound_violation, |a, &b| a.max(b))
    }
}

impl NlpModel {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn aggregate(&self, name: &str) -> Option<&Lin> {
        self.aggregates.iter().find(|a| a.name == name).map(|a| &a.lin)
    }

    pub fn constraint_count(&self, prefix: &str) -> usize {
        self.constraints.iter().filter(|c| c.name.starts_with(prefix)).count()
    }

    /// Objective and per-constraint residuals at `point`, with exact square
    /// roots.
    pub fn evaluate(&self, point: &[f64]) -> Result<Evaluation, NlpError> {
        if point.len() != self.dim() {
            return Err(NlpError::Dimension {
                expected: self.dim(),
                got: point.len(),
            });
        }
        let objective = self
            .objective
            .iter()
            .map(|e| e.eval(point, SqrtMode::Exact))
            .fold(f64::INFINITY, f64::min);
        let residuals = self.constraints.iter().map(|c| c.residual(point)).collect();
        let bound_violation = self
            .vars
            .iter()
            .zip(point)
            .map(|(v, &x)| (v.lo - x).max(x - v.hi).max(0.0))
            .fold(0.0, f64::max);
        Ok(Evaluation {
            objective,
            residuals,
            bound_violation,
        })
    }
}

pub fn evaluate(model: &NlpModel, point: &[f64]) -> Result<Evaluation, NlpError> {
    model.evaluate(point)
}

struct Builder {
    names: &'static [&'static str],
    regions: usize,
    constraints: Vec<Constraint>,
    aggregates: Vec<Aggregate>,
}

impl Builder {
    fn bit(&self, set: &str) -> u8 {
        let k = self.names.iter().position(|s| *s == set).expect("known set");
        1 << k
    }

    /// `y` of the intersection of the named sets.
    fn y(&self, sets: &[&str]) -> Lin {
        let mask = sets.iter().fold(0, |m, s| m | self.bit(s));
        Lin::sum_of((0..self.regions).filter(|&f| RegionMask(f as u8).inside(mask)))
    }

    fn ye(&self, sets: &[&str]) -> Expr {
        Expr::lin(self.y(sets))
    }

    fn push(&mut self, name: String, lhs: Expr, rel: Rel, rhs: Expr) {
        self.constraints.push(Constraint { name, lhs, rel, rhs });
    }

    /// `y_{X∩X'} = factor · y_X · y_{X'}`.
    fn product(&mut self, x: &str, xp: &str, factor: f64) {
        let mut factors = vec![self.ye(&[x]), self.ye(&[xp])];
        if factor != 1.0 {
            factors.insert(0, Expr::Num(factor));
        }
        let lhs = self.ye(&[x, xp]);
        self.push(format!("product {x} {xp}"), lhs, Rel::Eq, Expr::Mul(factors));
    }

    fn zero(&mut self, x: &str, xp: &str) {
        let lhs = self.ye(&[x, xp]);
        self.push(format!("zero {x} {xp}"), lhs, Rel::Eq, Expr::Num(0.0));
    }

    fn half(&mut self, x: &str) {
        let lhs = self.ye(&[x]);
        self.push(format!("half {x}"), lhs, Rel::Le, Expr::Num(0.5));
    }

    /// The line-type intersection bound for a row/column set `x` and a
    /// diagonal set `xp`:
    /// `y_{X∩X'} ≤ y_{X'} − max(0, 2√y_{X'} − y_X)²/4`.
    ///
    /// When `y_X ≤ 2√y_{X'}` the right side equals
    /// `y_X√y_{X'} − y_X²/4`; otherwise it is the trivial `y_{X'}`. The
    /// two pieces meet with matching slope at `y_X = 2√y_{X'}`.
    fn lemma(&mut self, x: &str, xp: &str) {
        let gap = Expr::sub(
            Expr::Mul(vec![Expr::Num(2.0), Expr::sqrt(self.ye(&[xp]))]),
            self.ye(&[x]),
        );
        let p = Expr::pos(gap);
        let rhs = Expr::sub(self.ye(&[xp]), Expr::Mul(vec![Expr::Num(0.25), p.clone(), p]));
        let lhs = self.ye(&[x, xp]);
        self.push(format!("lemma {x} {xp}"), lhs, Rel::Le, rhs);
    }
}

pub fn build_model(kind: ModelKind) -> NlpModel {
    let names = kind.set_names();
    let regions = 1usize << names.len();
    let mut b = Builder {
        names,
        regions,
        constraints: vec![],
        aggregates: vec![],
    };
    let vars: Vec<VarDecl> = RegionMask::all(names.len())
        .map(|f| VarDecl {
            name: f.name(names),
            lo: 0.0,
            hi: 1.0,
        })
        .collect();

    for (i, x) in names.iter().enumerate() {
        b.aggregates.push(Aggregate {
            name: format!("y_{x}"),
            lin: b.y(&[x]),
        });
        for xp in &names[i + 1..] {
            b.aggregates.push(Aggregate {
                name: format!("y_{x}.{xp}"),
                lin: b.y(&[x, xp]),
            });
        }
    }
    // Sets first, pairs after.
    b.aggregates.sort_by_key(|a| a.name.matches('.').count());

    b.push(
        "sum".into(),
        Expr::lin(Lin::sum_of(0..regions)),
        Rel::Eq,
        Expr::Num(1.0),
    );

    let diag_sets = ["D0", "D1", "S0", "S1"];
    let objective = match kind {
        ModelKind::OddTorus => {
            for (i, x) in names.iter().enumerate() {
                for xp in &names[i + 1..] {
                    b.product(x, xp, 1.0);
                }
            }
            vec![Expr::Var(regions - 1), Expr::Var(0)]
        }
        ModelKind::EvenTorus | ModelKind::Regular => {
            b.product("R", "C", 1.0);
            if kind == ModelKind::EvenTorus {
                b.product("D0", "S0", 2.0);
                b.product("D1", "S1", 2.0);
                for x in ["R", "C"] {
                    for xp in diag_sets {
                        b.product(x, xp, 1.0);
                    }
                }
            }
            for (x, xp) in [("D0", "D1"), ("D0", "S1"), ("S0", "D1"), ("S0", "S1")] {
                b.zero(x, xp);
            }
            if kind == ModelKind::Regular {
                for x in ["R", "C"] {
                    for xp in diag_sets {
                        b.lemma(x, xp);
                    }
                }
            }
            for x in diag_sets {
                b.half(x);
            }
            let f2 = b.bit("R") | b.bit("C") | b.bit("D0") | b.bit("S0");
            let f3 = b.bit("R") | b.bit("C") | b.bit("D1") | b.bit("S1");
            vec![
                Expr::Var(0),
                Expr::lin(Lin::sum_of([f2 as usize, f3 as usize])),
            ]
        }
    };

    NlpModel {
        kind: Some(kind),
        vars,
        aggregates: b.aggregates,
        constraints: b.constraints,
        objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let odd = build_model(ModelKind::OddTorus);
        assert_eq!(odd.dim(), 16);
        assert_eq!(odd.aggregates.len(), 4 + 6);
        assert_eq!(odd.constraint_count("product"), 6);
        assert_eq!(odd.constraints[0].name, "sum");

        let even = build_model(ModelKind::EvenTorus);
        assert_eq!(even.dim(), 64);
        assert_eq!(even.constraint_count("product"), 1 + 2 + 8);
        assert_eq!(even.constraint_count("zero"), 4);
        assert_eq!(even.constraint_count("half"), 4);

        let reg = build_model(ModelKind::Regular);
        assert_eq!(reg.dim(), 64);
        assert_eq!(reg.constraint_count("lemma"), 8);
        assert_eq!(reg.constraint_count("product"), 1);
    }

    #[test]
    fn regions_are_enumerated_once() {
        let masks: Vec<_> = RegionMask::all(6).collect();
        assert_eq!(masks.len(), 64);
        let mut dedup = masks.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 64);
        assert_eq!(RegionMask(0).name(&["R", "C"]), "z_none");
        assert_eq!(RegionMask(3).name(&["R", "C"]), "z_R.C");
    }

    #[test]
    fn uniform_point_on_odd_torus() {
        let m = build_model(ModelKind::OddTorus);
        let z = vec![1.0 / 16.0; 16];
        let e = m.evaluate(&z).unwrap();
        assert!((e.objective - 1.0 / 16.0).abs() < 1e-15);
        assert!(e.max_violation() < 1e-15);
        assert!((m.aggregate("y_R").unwrap().eval(&z) - 0.5).abs() < 1e-15);
        assert!((m.aggregate("y_R.S").unwrap().eval(&z) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn point_masses() {
        // On the odd torus a point mass keeps every y in {0, 1}, so the
        // products hold and only the objective collapses.
        let odd = build_model(ModelKind::OddTorus);
        let mut z = vec![0.0; 16];
        z[15] = 1.0;
        let e = odd.evaluate(&z).unwrap();
        assert!(e.max_violation() < 1e-15);
        assert_eq!(e.objective, 0.0);
        // With four diagonal sets the half bounds and zeros break.
        for kind in [ModelKind::EvenTorus, ModelKind::Regular] {
            let m = build_model(kind);
            let mut z = vec![0.0; 64];
            z[63] = 1.0;
            let e = m.evaluate(&z).unwrap();
            assert!(e.residuals[0] < 1e-15, "sum holds");
            assert!((e.max_violation() - 1.0).abs() < 1e-15, "{kind}");
        }
    }

    #[test]
    fn zero_constraint_detects_overlap() {
        let m = build_model(ModelKind::Regular);
        let mut z = vec![0.0; 64];
        // Region inside exactly D0 and D1.
        z[0b0000_1100] = 0.3;
        z[0] = 0.7;
        let e = m.evaluate(&z).unwrap();
        let k = m.constraints.iter().position(|c| c.name == "zero D0 D1").unwrap();
        assert!((e.residuals[k] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let m = build_model(ModelKind::OddTorus);
        assert_eq!(
            m.evaluate(&[0.0; 3]).unwrap_err(),
            NlpError::Dimension { expected: 16, got: 3 }
        );
    }

    #[test]
    fn lemma_bound_meets_trivial_bound_at_the_gate() {
        // With α = 2√β the gated bound is β; just below it, it is the
        // smooth Lemma expression; above it, the trivial β.
        let m = build_model(ModelKind::Regular);
        let c = m.constraints.iter().find(|c| c.name == "lemma R D0").unwrap();
        let bound = |alpha: f64, beta: f64| {
            // y_R = α through region {R}, y_D0 = β through region {D0}.
            let mut z = vec![0.0; 64];
            z[0b000001] = alpha;
            z[0b000100] = beta;
            z[0] = 1.0 - alpha - beta;
            c.rhs.eval(&z, SqrtMode::Exact)
        };
        for beta in [0.01, 0.04, 0.09, 0.2] {
            let alpha = 2.0 * f64::sqrt(beta);
            if alpha + beta > 1.0 {
                continue;
            }
            assert!((bound(alpha, beta) - beta).abs() < 1e-12);
            let a = 0.5 * alpha;
            let smooth = a * beta.sqrt() - a * a / 4.0;
            assert!((bound(a, beta) - smooth).abs() < 1e-12);
            let above = (alpha * 1.2).min(1.0 - beta);
            assert!((bound(above, beta) - beta).abs() < 1e-12);
        }
    }
}
