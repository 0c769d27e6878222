//! Expression trees over the model variables, with evaluation and
//! reverse-mode gradients.

/// Sparse affine form `Σ cᵢ·xᵢ + c₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lin {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Lin {
    pub fn new(terms: Vec<(usize, f64)>, constant: f64) -> Self {
        Lin { terms, constant }
    }

    /// Sum of the given variables with unit coefficients.
    pub fn sum_of(vars: impl IntoIterator<Item = usize>) -> Self {
        Lin::new(vars.into_iter().map(|v| (v, 1.0)).collect(), 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + self.constant
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Lin(Lin),
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Vec<Expr>),
    Sqrt(Box<Expr>),
    Min(Vec<Expr>),
}

/// How `sqrt` treats small or negative arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqrtMode {
    /// `sqrt(max(u, 0))`; the true value.
    Exact,
    /// `sqrt(max(u, floor))`, keeping the derivative finite.
    Floored(f64),
}

impl Expr {
    pub fn lin(l: Lin) -> Expr {
        Expr::Lin(l)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(Box::new(a))
    }

    /// `max(0, a)`, written as `a − min(a, 0)` so it stays within the
    /// exported operator set.
    pub fn pos(a: Expr) -> Expr {
        Expr::sub(a.clone(), Expr::Min(vec![a, Expr::Num(0.0)]))
    }

    pub fn eval(&self, x: &[f64], mode: SqrtMode) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Lin(l) => l.eval(x),
            Expr::Add(xs) => xs.iter().map(|e| e.eval(x, mode)).sum(),
            Expr::Sub(a, b) => a.eval(x, mode) - b.eval(x, mode),
            Expr::Mul(xs) => xs.iter().map(|e| e.eval(x, mode)).product(),
            Expr::Sqrt(a) => sqrt_of(a.eval(x, mode), mode),
            Expr::Min(xs) => xs
                .iter()
                .map(|e| e.eval(x, mode))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Value, with `seed · ∂self/∂x` added into `grad`. At ties `min`
    /// follows its first minimal argument.
    pub fn eval_grad(&self, x: &[f64], mode: SqrtMode, seed: f64, grad: &mut [f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => {
                grad[*i] += seed;
                x[*i]
            }
            Expr::Lin(l) => {
                for &(i, c) in &l.terms {
                    grad[i] += seed * c;
                }
                l.eval(x)
            }
            Expr::Add(xs) => xs.iter().map(|e| e.eval_grad(x, mode, seed, grad)).sum(),
            Expr::Sub(a, b) => a.eval_grad(x, mode, seed, grad) - b.eval_grad(x, mode, -seed, grad),
            Expr::Mul(xs) => {
                let vals: Vec<f64> = xs.iter().map(|e| e.eval(x, mode)).collect();
                for (k, e) in xs.iter().enumerate() {
                    let others: f64 = vals
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, v)| v)
                        .product();
                    if others != 0.0 {
                        e.eval_grad(x, mode, seed * others, grad);
                    }
                }
                vals.iter().product()
            }
            Expr::Sqrt(a) => {
                let u = a.eval(x, mode);
                let v = sqrt_of(u, mode);
                let active = match mode {
                    SqrtMode::Exact => u > 0.0,
                    SqrtMode::Floored(f) => u > f,
                };
                if active {
                    a.eval_grad(x, mode, seed * 0.5 / v, grad);
                }
                v
            }
            Expr::Min(xs) => {
                let (k, v) = xs
                    .iter()
                    .map(|e| e.eval(x, mode))
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
                if let Some(e) = xs.get(k) {
                    e.eval_grad(x, mode, seed, grad);
                }
                v
            }
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Lin(l) => l.terms.iter().map(|t| t.0).max(),
            Expr::Add(xs) | Expr::Mul(xs) | Expr::Min(xs) => xs.iter().filter_map(Expr::max_var).max(),
            Expr::Sub(a, b) => a.max_var().max(b.max_var()),
            Expr::Sqrt(a) => a.max_var(),
        }
    }
}

fn sqrt_of(u: f64, mode: SqrtMode) -> f64 {
    match mode {
        SqrtMode::Exact => u.max(0.0).sqrt(),
        SqrtMode::Floored(f) => u.max(f).sqrt(),
    }
}
