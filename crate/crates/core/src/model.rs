//! Linear descriptor systems `E x' = A x + B u + G d`, `y = C x` with exact
//! entries, their on-disk JSON form, and the two structural transformations
//! the decision procedures need: eliminating the disturbance channel and
//! bringing the descriptor matrix to the split form `diag(I, 0)`.

use crate::field::{parse_rational, Field, Rat};
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("system still has disturbance inputs; eliminate them first")]
    DisturbancesPresent,
    #[error("entry {0} is not representable in the requested field")]
    NotRepresentable(String),
}

/// `E x' = A x + B u + G d`, `y = C x` with `E, A: q x n`, `B: q x m`,
/// `G: q x s`, `C: p x n`. Any of `q`, `n`, `m`, `s`, `p` may be zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DaeSystem<F> {
    pub name: String,
    pub e: Matrix<F>,
    pub a: Matrix<F>,
    pub b: Matrix<F>,
    pub g: Matrix<F>,
    pub c: Matrix<F>,
}

impl<F: Field> DaeSystem<F> {
    pub fn new(
        name: impl Into<String>,
        e: Matrix<F>,
        a: Matrix<F>,
        b: Matrix<F>,
        g: Matrix<F>,
        c: Matrix<F>,
    ) -> Result<Self, ModelError> {
        let (q, n) = (e.rows(), e.cols());
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::Dimension(format!("{what} (E is {q}x{n})")))
            }
        };
        check(a.rows() == q && a.cols() == n, "A must match E")?;
        check(b.rows() == q, "B must have q rows")?;
        check(g.rows() == q, "G must have q rows")?;
        check(c.cols() == n, "C must have n columns")?;
        Ok(DaeSystem {
            name: name.into(),
            e,
            a,
            b,
            g,
            c,
        })
    }

    pub fn q(&self) -> usize {
        self.e.rows()
    }

    pub fn n(&self) -> usize {
        self.e.cols()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn s(&self) -> usize {
        self.g.cols()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }
}

impl DaeSystem<Rat> {
    /// Re-expresses the system over another field entry by entry. Fails when
    /// an entry has no image, e.g. a denominator divisible by the modulus.
    pub fn map_field<G: Field>(&self) -> Result<DaeSystem<G>, ModelError> {
        let conv = matrix_in_field::<G>;
        DaeSystem::new(
            self.name.clone(),
            conv(&self.e)?,
            conv(&self.a)?,
            conv(&self.b)?,
            conv(&self.g)?,
            conv(&self.c)?,
        )
    }
}

/// Result of premultiplying by an invertible `P = [G_perp; G_dag]`: the
/// `G_perp` rows are disturbance-free and form the reduced system.
#[derive(Clone, Debug)]
pub struct DisturbanceElimination<F> {
    pub reduced: DaeSystem<F>,
    pub g_perp: Matrix<F>,
    pub g_dagger: Matrix<F>,
    pub p_matrix: Matrix<F>,
}

/// Maximal-row-count left annihilator of `g`, with canonical rows.
fn left_annihilator<F: Field>(g: &Matrix<F>) -> Matrix<F> {
    Subspace::kernel_of(&g.transpose()).basis().transpose()
}

pub fn eliminate_disturbance<F: Field>(sys: &DaeSystem<F>) -> DisturbanceElimination<F> {
    let g_perp = left_annihilator(&sys.g);
    // Rows recovering the disturbance action: D * g_cols = I on a maximal
    // independent column set. For full column rank G this is a left inverse.
    let pivot_cols = sys.g.rref().pivots;
    let g_dagger = if pivot_cols.is_empty() {
        Matrix::zeros(0, sys.q())
    } else {
        let mut picked = Matrix::zeros(sys.q(), 0);
        for &c in &pivot_cols {
            picked = picked.hstack(&sys.g.column(c));
        }
        let x = picked
            .transpose()
            .solve(&Matrix::identity(pivot_cols.len()))
            .expect("independent columns admit a left inverse");
        x.transpose()
    };
    let p_matrix = g_perp.vstack(&g_dagger);
    debug_assert!(p_matrix.inverse().is_some(), "P must be invertible");
    let reduced = DaeSystem::new(
        sys.name.clone(),
        g_perp.mul(&sys.e),
        g_perp.mul(&sys.a),
        g_perp.mul(&sys.b),
        Matrix::zeros(g_perp.rows(), 0),
        sys.c.clone(),
    )
    .expect("reduced dimensions are consistent");
    DisturbanceElimination {
        reduced,
        g_perp,
        g_dagger,
        p_matrix,
    }
}

/// Disturbance-free system rewritten with invertible `S`, `T` so that
/// `S E T = diag(I, 0)`. The first `n_a = rank E` equations are differential,
/// the rest algebraic; the state splits as `x = T (x_a; x_b)`.
#[derive(Clone, Debug)]
pub struct SpecialForm<F> {
    pub s_matrix: Matrix<F>,
    pub t_matrix: Matrix<F>,
    pub n_a: usize,
    pub n_b: usize,
    pub a_aa: Matrix<F>,
    pub a_ab: Matrix<F>,
    pub a_ba: Matrix<F>,
    pub a_bb: Matrix<F>,
    pub b_a: Matrix<F>,
    pub b_b: Matrix<F>,
    pub c_a: Matrix<F>,
    pub c_b: Matrix<F>,
}

pub fn to_special_form<F: Field>(sys: &DaeSystem<F>) -> Result<SpecialForm<F>, ModelError> {
    if sys.s() > 0 {
        return Err(ModelError::DisturbancesPresent);
    }
    let (q, n) = (sys.q(), sys.n());
    let (ech, u) = sys.e.rref_with_transform();
    let n_a = ech.rank;
    let n_b = n - n_a;
    let mut in_pivots = vec![false; n];
    for &p in &ech.pivots {
        in_pivots[p] = true;
    }
    let order: Vec<usize> = ech
        .pivots
        .iter()
        .copied()
        .chain((0..n).filter(|&c| !in_pivots[c]))
        .collect();
    let mut perm = Matrix::zeros(n, n);
    for (j, &src) in order.iter().enumerate() {
        *perm.at_mut(src, j) = F::one();
    }
    // After permuting, the echelon form reads [I | N; 0 0]; clear N by a
    // unimodular column operation.
    let permuted = ech.matrix.mul(&perm);
    let n_block = permuted.submatrix(0..n_a, n_a..n);
    let clear = {
        let top = Matrix::identity(n_a).hstack(&n_block.neg());
        let bottom = Matrix::zeros(n_b, n_a).hstack(&Matrix::identity(n_b));
        top.vstack(&bottom)
    };
    let t = perm.mul(&clear);
    let s = u;
    debug_assert_eq!(s.mul(&sys.e).mul(&t), {
        let mut d = Matrix::zeros(q, n);
        for i in 0..n_a {
            *d.at_mut(i, i) = F::one();
        }
        d
    });
    let at = s.mul(&sys.a).mul(&t);
    let sb = s.mul(&sys.b);
    let ct = sys.c.mul(&t);
    Ok(SpecialForm {
        a_aa: at.submatrix(0..n_a, 0..n_a),
        a_ab: at.submatrix(0..n_a, n_a..n),
        a_ba: at.submatrix(n_a..q, 0..n_a),
        a_bb: at.submatrix(n_a..q, n_a..n),
        b_a: sb.submatrix(0..n_a, 0..sys.m()),
        b_b: sb.submatrix(n_a..q, 0..sys.m()),
        c_a: ct.submatrix(0..sys.p(), 0..n_a),
        c_b: ct.submatrix(0..sys.p(), n_a..n),
        s_matrix: s,
        t_matrix: t,
        n_a,
        n_b,
    })
}

/// Promotes the input channel to state: `E_e = [E 0]`, `A_e = [A B]` with the
/// input row appended to the state vector and no remaining inputs.
pub fn extend_input<F: Field>(sys: &DaeSystem<F>) -> DaeSystem<F> {
    let q = sys.q();
    let m = sys.m();
    DaeSystem::new(
        sys.name.clone(),
        sys.e.hstack(&Matrix::zeros(q, m)),
        sys.a.hstack(&sys.b),
        Matrix::zeros(q, 0),
        sys.g.clone(),
        sys.c.hstack(&Matrix::zeros(sys.p(), m)),
    )
    .expect("extended dimensions are consistent")
}

fn parse_entry(v: &Value) -> Result<Rat, ModelError> {
    match v {
        Value::Number(n) => {
            let literal = n.to_string();
            if literal.contains(['.', 'e', 'E']) {
                return Err(ModelError::Parse(format!(
                    "non-integer numeric literal {literal}; write exact values as strings like \"1/2\" or \"0.5\""
                )));
            }
            parse_rational(&literal).map_err(ModelError::Parse)
        }
        Value::String(s) => parse_rational(s).map_err(ModelError::Parse),
        other => Err(ModelError::Parse(format!(
            "matrix entry must be an integer or a string, got {other}"
        ))),
    }
}

/// Re-expresses a rational matrix over another field entry by entry.
pub fn matrix_in_field<G: Field>(m: &Matrix<Rat>) -> Result<Matrix<G>, ModelError> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.at(r, c);
            let w =
                G::from_rational(v).ok_or_else(|| ModelError::NotRepresentable(v.to_string()))?;
            out.push(w);
        }
    }
    Ok(Matrix::new(m.rows(), m.cols(), out))
}

/// Parses one matrix in the file format: an array of rows with exact
/// entries, or the `{"rows", "cols"}` object form for empty shapes. The
/// key names the matrix in error messages.
pub fn parse_matrix(key: &str, v: &Value) -> Result<Matrix<Rat>, ModelError> {
    match v {
        Value::Array(rows) => {
            let mut parsed: Vec<Vec<Rat>> = Vec::with_capacity(rows.len());
            for row in rows {
                let Value::Array(entries) = row else {
                    return Err(ModelError::Parse(format!("{key}: rows must be arrays")));
                };
                parsed.push(entries.iter().map(parse_entry).collect::<Result<_, _>>()?);
            }
            let cols = parsed.first().map_or(0, Vec::len);
            if parsed.iter().any(|r| r.len() != cols) {
                return Err(ModelError::Parse(format!("{key}: ragged rows")));
            }
            Ok(Matrix::from_rows(parsed))
        }
        Value::Object(obj) => {
            let dim = |k: &str| -> Result<usize, ModelError> {
                obj.get(k)
                    .and_then(Value::as_u64)
                    .map(|v| v as usize)
                    .ok_or_else(|| {
                        ModelError::Parse(format!("{key}: object form needs integer \"{k}\""))
                    })
            };
            let rows = dim("rows")?;
            let cols = dim("cols")?;
            if rows * cols != 0 {
                return Err(ModelError::Parse(format!(
                    "{key}: object form {{\"rows\", \"cols\"}} is only for empty matrices"
                )));
            }
            Ok(Matrix::zeros(rows, cols))
        }
        other => Err(ModelError::Parse(format!(
            "{key}: expected an array of rows or an empty-matrix object, got {other}"
        ))),
    }
}

/// Parses a system from its JSON object form. `E` and `A` are required;
/// omitted `B`/`G` default to zero columns and an omitted `C` to zero rows.
pub fn parse_system_value(v: &Value) -> Result<DaeSystem<Rat>, ModelError> {
    let Value::Object(obj) = v else {
        return Err(ModelError::Parse(
            "system file must be a JSON object".into(),
        ));
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "name" | "E" | "A" | "B" | "G" | "C") {
            return Err(ModelError::Parse(format!("unknown key {key:?}")));
        }
    }
    let name = match obj.get("name") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(ModelError::Parse(format!(
                "name must be a string, got {other}"
            )))
        }
    };
    let required = |k: &str| -> Result<Matrix<Rat>, ModelError> {
        let v = obj
            .get(k)
            .ok_or_else(|| ModelError::Parse(format!("missing required matrix {k:?}")))?;
        parse_matrix(k, v)
    };
    let e = required("E")?;
    let a = required("A")?;
    let (q, n) = (e.rows(), e.cols());
    let optional = |k: &str, rows: usize, cols: usize| -> Result<Matrix<Rat>, ModelError> {
        match obj.get(k) {
            Some(v) => parse_matrix(k, v),
            None => Ok(Matrix::zeros(rows, cols)),
        }
    };
    let b = optional("B", q, 0)?;
    let g = optional("G", q, 0)?;
    let c = optional("C", 0, n)?;
    DaeSystem::new(name, e, a, b, g, c)
}

pub fn parse_system_str(text: &str) -> Result<DaeSystem<Rat>, ModelError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| ModelError::Parse(format!("invalid JSON: {e}")))?;
    parse_system_value(&v)
}

/// Serializes a matrix to the same JSON form `parse_matrix` reads, with
/// entries written as exact strings.
pub fn matrix_to_value<F: Field>(m: &Matrix<F>) -> Value {
    if m.is_empty() {
        return serde_json::json!({ "rows": m.rows(), "cols": m.cols() });
    }
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| Value::String(m.at(r, c).to_string()))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

/// Serializes a system to the same JSON form `parse_system_value` reads.
/// Entries are written as exact strings.
pub fn system_to_value<F: Field>(sys: &DaeSystem<F>) -> Value {
    serde_json::json!({
        "name": sys.name,
        "E": matrix_to_value(&sys.e),
        "A": matrix_to_value(&sys.a),
        "B": matrix_to_value(&sys.b),
        "G": matrix_to_value(&sys.g),
        "C": matrix_to_value(&sys.c),
    })
}
