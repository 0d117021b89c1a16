//! Dense assembly of the lattice operators at a base state.
//!
//! Every operator is realized as a 2N x 2N complex matrix in a site-major
//! basis: column index 2*(k - k_min) + c for component c in {0, 1}. Shift
//! operators are zero-extended at the window edges and the semi-infinite sums
//! J_k^+/J_k^- are truncated to the window, so identities that involve them
//! are only expected to hold on interior rows.
//!
//! Operator expressions follow the convention that a shift written to the
//! left of a multiplication acts after it: E^-(f_k) u = f_{k-1} u_{k-1}.
//! This convention is pinned down by the requirement that the assembled
//! sum-difference operator Lplus equals L + Linv entry by entry, which the
//! test suite checks.

use nalgebra::DMatrix;

use crate::error::{AlError, Result};
use crate::lattice::{Field, LatticeState, Ordering, SINGULAR_TOL};
use crate::C64;

pub type Mat = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpName {
    L,
    Linv,
    Lplus,
    Lminus,
    Lstar,
    Linvstar,
    R,
    K,
    J,
    D1,
    D2,
    B,
    Binv,
    Sigma1,
    Sigma3,
    Identity,
}

impl OpName {
    pub fn parse(name: &str) -> Result<OpName> {
        Ok(match name {
            "L" => OpName::L,
            "Linv" => OpName::Linv,
            "Lplus" => OpName::Lplus,
            "Lminus" => OpName::Lminus,
            "Lstar" => OpName::Lstar,
            "Linvstar" => OpName::Linvstar,
            "R" => OpName::R,
            "K" => OpName::K,
            "J" => OpName::J,
            "D1" => OpName::D1,
            "D2" => OpName::D2,
            "B" => OpName::B,
            "Binv" => OpName::Binv,
            "sigma1" => OpName::Sigma1,
            "sigma3" => OpName::Sigma3,
            "identity" => OpName::Identity,
            other => return Err(AlError::UnknownOperator(other.into())),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OpName::L => "L",
            OpName::Linv => "Linv",
            OpName::Lplus => "Lplus",
            OpName::Lminus => "Lminus",
            OpName::Lstar => "Lstar",
            OpName::Linvstar => "Linvstar",
            OpName::R => "R",
            OpName::K => "K",
            OpName::J => "J",
            OpName::D1 => "D1",
            OpName::D2 => "D2",
            OpName::B => "B",
            OpName::Binv => "Binv",
            OpName::Sigma1 => "sigma1",
            OpName::Sigma3 => "sigma3",
            OpName::Identity => "identity",
        }
    }

    /// Ordering of the fields the operator consumes / produces.
    pub fn orderings(&self) -> (Ordering, Ordering) {
        match self {
            OpName::L
            | OpName::Linv
            | OpName::Lplus
            | OpName::Lminus
            | OpName::Lstar
            | OpName::Linvstar
            | OpName::D1
            | OpName::D2 => (Ordering::Rq, Ordering::Rq),
            OpName::R | OpName::K | OpName::J => (Ordering::Qr, Ordering::Qr),
            OpName::B => (Ordering::Rq, Ordering::Qr),
            OpName::Binv => (Ordering::Qr, Ordering::Rq),
            // The Pauli blocks and the identity are used in both conventions;
            // tag them as order-preserving on (r,q) by default.
            OpName::Sigma1 | OpName::Sigma3 | OpName::Identity => (Ordering::Rq, Ordering::Rq),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub name: OpName,
    pub entries: Mat,
    pub domain_ordering: Ordering,
    pub codomain_ordering: Ordering,
    pub window: crate::lattice::Window,
}

/// Matrix G with bilinear_form(u, v) = u^T G v; per-site block
/// -(1 - q_k r_k)^{-1} antidiag(1, 1).
pub struct FormMatrix {
    pub entries: Mat,
    inverse: Mat,
}

impl FormMatrix {
    pub fn new(s: &LatticeState) -> Result<FormMatrix> {
        let n = s.n();
        let mut g = Mat::zeros(2 * n, 2 * n);
        let mut ginv = Mat::zeros(2 * n, 2 * n);
        for k in s.window.iter() {
            let w = s.weight(k);
            if w.norm() <= SINGULAR_TOL {
                return Err(AlError::SingularState { k, value: w.norm() });
            }
            let i = s.window.idx(k);
            let c = -C64::new(1.0, 0.0) / w;
            g[(2 * i, 2 * i + 1)] = c;
            g[(2 * i + 1, 2 * i)] = c;
            ginv[(2 * i, 2 * i + 1)] = -w;
            ginv[(2 * i + 1, 2 * i)] = -w;
        }
        Ok(FormMatrix { entries: g, inverse: ginv })
    }

    pub fn inverse(&self) -> &Mat {
        &self.inverse
    }
}

// ---------------------------------------------------------------------------
// Scalar (N x N) building blocks
// ---------------------------------------------------------------------------

struct Blocks {
    n: usize,
}

impl Blocks {
    fn eye(&self) -> Mat {
        Mat::identity(self.n, self.n)
    }

    fn zeros(&self) -> Mat {
        Mat::zeros(self.n, self.n)
    }

    /// (E^+ u)_k = u_{k+1}.
    fn ep(&self) -> Mat {
        let mut m = self.zeros();
        for i in 0..self.n - 1 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// (E^- u)_k = u_{k-1}.
    fn em(&self) -> Mat {
        let mut m = self.zeros();
        for i in 1..self.n {
            m[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        m
    }

    fn diag(&self, f: &[C64]) -> Mat {
        let mut m = self.zeros();
        for i in 0..self.n {
            m[(i, i)] = f[i];
        }
        m
    }

    /// (J_k^+(w_j) u)_k = sum_{j >= k} w_j u_j.
    fn jplus(&self, w: &[C64]) -> Mat {
        let mut m = self.zeros();
        for i in 0..self.n {
            for j in i..self.n {
                m[(i, j)] = w[j];
            }
        }
        m
    }

    /// (J_k^-(w_j) u)_k = sum_{j <= k} w_j u_j.
    fn jminus(&self, w: &[C64]) -> Mat {
        let mut m = self.zeros();
        for i in 0..self.n {
            for j in 0..=i {
                m[(i, j)] = w[j];
            }
        }
        m
    }

    /// Whole-window sum: u -> sum_j w_j u_j at every site.
    fn jfull(&self, w: &[C64]) -> Mat {
        let mut m = self.zeros();
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = w[j];
            }
        }
        m
    }

    /// J_k^+ - J_k^- (the shared j = k term cancels).
    fn jpm(&self, w: &[C64]) -> Mat {
        self.jplus(w) - self.jminus(w)
    }
}

fn two_by_two(b11: Mat, b12: Mat, b21: Mat, b22: Mat) -> Mat {
    let n = b11.nrows();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(2 * i, 2 * j)] = b11[(i, j)];
            m[(2 * i, 2 * j + 1)] = b12[(i, j)];
            m[(2 * i + 1, 2 * j)] = b21[(i, j)];
            m[(2 * i + 1, 2 * j + 1)] = b22[(i, j)];
        }
    }
    m
}

struct StateData {
    q: Vec<C64>,
    r: Vec<C64>,
    w: Vec<C64>,     // 1 - r q
    winv: Vec<C64>,  // 1/(1 - r q)
    qt: Vec<C64>,    // q/(1 - r q)
    rt: Vec<C64>,    // r/(1 - r q)
}

impl StateData {
    fn new(s: &LatticeState) -> StateData {
        let one = C64::new(1.0, 0.0);
        let w: Vec<C64> = s.window.iter().map(|k| s.weight(k)).collect();
        StateData {
            q: s.q.clone(),
            r: s.r.clone(),
            winv: w.iter().map(|v| one / v).collect(),
            qt: s.q.iter().zip(&w).map(|(q, w)| q / w).collect(),
            rt: s.r.iter().zip(&w).map(|(r, w)| r / w).collect(),
            w,
        }
    }

    fn prod(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }
}

pub fn assemble(name: OpName, s: &LatticeState) -> Result<OperatorMatrix> {
    s.check_nonsingular()?;
    let n = s.n();
    let bl = Blocks { n };
    let d = StateData::new(s);
    let entries = match name {
        OpName::Identity => Mat::identity(2 * n, 2 * n),
        OpName::Sigma1 => two_by_two(bl.zeros(), bl.eye(), bl.eye(), bl.zeros()),
        OpName::Sigma3 => two_by_two(bl.eye(), bl.zeros(), bl.zeros(), -bl.eye()),
        OpName::B => two_by_two(bl.zeros(), bl.eye(), -bl.eye(), bl.zeros()),
        OpName::Binv => two_by_two(bl.zeros(), -bl.eye(), bl.eye(), bl.zeros()),
        OpName::J => {
            let i = C64::new(0.0, 1.0);
            two_by_two(bl.eye() * -i, bl.zeros(), bl.zeros(), bl.eye() * i)
        }
        OpName::L => assemble_l(&bl, &d),
        OpName::Linv => assemble_linv(&bl, &d),
        OpName::Lplus => assemble_lplus(&bl, &d),
        OpName::Lstar => assemble_lstar(&bl, &d),
        OpName::Linvstar => assemble_linvstar(&bl, &d),
        OpName::Lminus => assemble_lminus(&bl, &d),
        OpName::R => assemble_r(&bl, &d),
        OpName::K => {
            // K is defined as the composition R J; the skewness and bracket
            // tests exercise it independently.
            let r = assemble_r(&bl, &d);
            let i = C64::new(0.0, 1.0);
            let j = two_by_two(bl.eye() * -i, bl.zeros(), bl.zeros(), bl.eye() * i);
            r * j
        }
        OpName::D1 => assemble_d1(&bl, &d),
        OpName::D2 => assemble_d2(&bl, &d),
    };
    let (dom, cod) = name.orderings();
    Ok(OperatorMatrix {
        name,
        entries,
        domain_ordering: dom,
        codomain_ordering: cod,
        window: s.window,
    })
}

/// The sum-difference operator L (integration constants set to zero).
fn assemble_l(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);

    let b11 = &em
        - &dw * &em * (&dr * bl.jplus(&d.qt))
        + &dw * &em * bl.diag(&d.prod(&d.rt, &d.q))
        - &dr * bl.jplus(&d.q) * &em;
    let b12 = &dw * &em * (&dr * bl.jplus(&d.rt))
        - &dw * &em * bl.diag(&d.prod(&d.rt, &d.r))
        + &dr * bl.jplus(&d.r) * &ep;
    let b21 = -(&dw * &ep * (&dq * bl.jplus(&d.qt)))
        - &dq * bl.jplus(&d.q) * &em
        + bl.diag(&d.prod(&d.q, &d.q)) * &em;
    let b22 = &ep
        + &dw * &ep * (&dq * bl.jplus(&d.rt))
        + &dq * bl.jplus(&d.r) * &ep
        - bl.diag(&d.prod(&d.q, &d.r)) * &ep;
    two_by_two(b11, b12, b21, b22)
}

fn assemble_linv(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);

    let b11 = &ep
        + &dw * &ep * (&dr * bl.jplus(&d.qt))
        + &dr * bl.jplus(&d.q) * &ep
        - bl.diag(&d.prod(&d.r, &d.q)) * &ep;
    let b12 = -(&dw * &ep * (&dr * bl.jplus(&d.rt)))
        - &dr * bl.jplus(&d.r) * &em
        + bl.diag(&d.prod(&d.r, &d.r)) * &em;
    let b21 = &dw * &em * (&dq * bl.jplus(&d.qt))
        - &dw * &em * bl.diag(&d.prod(&d.qt, &d.q))
        + &dq * bl.jplus(&d.q) * &ep;
    let b22 = &em
        - &dw * &em * (&dq * bl.jplus(&d.rt))
        + &dw * &em * bl.diag(&d.prod(&d.qt, &d.r))
        - &dq * bl.jplus(&d.r) * &em;
    two_by_two(b11, b12, b21, b22)
}

/// Direct closed form of Lplus; the test suite checks it equals L + Linv.
fn assemble_lplus(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let epm = &ep - &em;
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);

    let shift_sum = &ep + &em;
    let t1 = two_by_two(shift_sum.clone(), bl.zeros(), bl.zeros(), shift_sum);

    let m11 = &dr * bl.jplus(&d.qt);
    let m12 = -(&dr * bl.jplus(&d.rt));
    let m21 = -(&dq * bl.jplus(&d.qt));
    let m22 = &dq * bl.jplus(&d.rt);
    let t2 = two_by_two(
        &dw * &epm * m11,
        &dw * &epm * m12,
        &dw * &epm * m21,
        &dw * &epm * m22,
    );

    let t3 = two_by_two(
        &dw * &em * bl.diag(&d.prod(&d.rt, &d.q)),
        -(&dw * &em * bl.diag(&d.prod(&d.rt, &d.r))),
        -(&dw * &em * bl.diag(&d.prod(&d.qt, &d.q))),
        &dw * &em * bl.diag(&d.prod(&d.qt, &d.r)),
    );

    let t4 = two_by_two(
        &dr * bl.jplus(&d.q) * &epm,
        &dr * bl.jplus(&d.r) * &epm,
        &dq * bl.jplus(&d.q) * &epm,
        &dq * bl.jplus(&d.r) * &epm,
    );

    let t5 = two_by_two(
        -(bl.diag(&d.prod(&d.r, &d.q)) * &ep),
        bl.diag(&d.prod(&d.r, &d.r)) * &em,
        bl.diag(&d.prod(&d.q, &d.q)) * &em,
        -(bl.diag(&d.prod(&d.q, &d.r)) * &ep),
    );

    t1 + t2 + t3 + t4 + t5
}

/// Direct closed form of the adjoint of L with respect to the bilinear form.
fn assemble_lstar(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);
    let dwi = bl.diag(&d.winv);

    let b11 = &dw * &em * &dwi
        + &dw * &em * (&dr * bl.jminus(&d.qt))
        - &dw * &em * bl.diag(&d.prod(&d.rt, &d.q))
        + &dr * bl.jminus(&d.q) * &em;
    let b12 = &dw * &em * (&dr * bl.jminus(&d.rt))
        + &dr * bl.jminus(&d.r) * &ep
        - bl.diag(&d.prod(&d.r, &d.r)) * &ep;
    let b21 = -(&dw * &ep * (&dq * bl.jminus(&d.qt)))
        + &dw * &ep * bl.diag(&d.prod(&d.qt, &d.q))
        - &dq * bl.jminus(&d.q) * &em;
    let b22 = &dw * &ep * &dwi
        - &dw * &ep * (&dq * bl.jminus(&d.rt))
        - &dq * bl.jminus(&d.r) * &ep
        + bl.diag(&d.prod(&d.q, &d.r)) * &ep;
    two_by_two(b11, b12, b21, b22)
}

fn assemble_linvstar(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);
    let dwi = bl.diag(&d.winv);

    let b11 = &dw * &ep * &dwi
        - &dw * &ep * (&dr * bl.jminus(&d.qt))
        - &dr * bl.jminus(&d.q) * &ep
        + bl.diag(&d.prod(&d.r, &d.q)) * &ep;
    let b12 = -(&dw * &ep * (&dr * bl.jminus(&d.rt)))
        + &dw * &ep * bl.diag(&d.prod(&d.rt, &d.r))
        - &dr * bl.jminus(&d.r) * &em;
    let b21 = &dw * &em * (&dq * bl.jminus(&d.qt))
        + &dq * bl.jminus(&d.q) * &ep
        - bl.diag(&d.prod(&d.q, &d.q)) * &ep;
    let b22 = &dw * &em * &dwi
        + &dw * &em * (&dq * bl.jminus(&d.rt))
        - &dw * &em * bl.diag(&d.prod(&d.qt, &d.r))
        + &dq * bl.jminus(&d.r) * &em;
    two_by_two(b11, b12, b21, b22)
}

/// Direct closed form of Lminus; the suite checks it against
/// sigma3 (Lstar + Linvstar) sigma3^{-1} and against the assembled adjoint.
fn assemble_lminus(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let epm = &ep - &em;
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);

    let shift_sum = &ep + &em;
    let t1 = two_by_two(shift_sum.clone(), bl.zeros(), bl.zeros(), shift_sum);

    let t2 = two_by_two(
        -(&dw * &epm * (&dr * bl.jminus(&d.qt))),
        &dw * &epm * (&dr * bl.jminus(&d.rt)),
        &dw * &epm * (&dq * bl.jminus(&d.qt)),
        -(&dw * &epm * (&dq * bl.jminus(&d.rt))),
    );

    let t3 = two_by_two(
        &dw * &ep * bl.diag(&d.prod(&d.rt, &d.q)),
        -(&dw * &ep * bl.diag(&d.prod(&d.rt, &d.r))),
        -(&dw * &ep * bl.diag(&d.prod(&d.qt, &d.q))),
        &dw * &ep * bl.diag(&d.prod(&d.qt, &d.r)),
    );

    let t4 = two_by_two(
        -(&dr * bl.jminus(&d.q) * &epm),
        -(&dr * bl.jminus(&d.r) * &epm),
        -(&dq * bl.jminus(&d.q) * &epm),
        -(&dq * bl.jminus(&d.r) * &epm),
    );

    let t5 = two_by_two(
        -(bl.diag(&d.prod(&d.r, &d.q)) * &em),
        bl.diag(&d.prod(&d.r, &d.r)) * &ep,
        bl.diag(&d.prod(&d.q, &d.q)) * &ep,
        -(bl.diag(&d.prod(&d.q, &d.r)) * &em),
    );

    t1 + t2 + t3 + t4 + t5
}

/// Direct closed form of the recursion operator R on (q, r)-ordered fields;
/// the suite checks it equals B (Lplus + Lminus) Binv.
fn assemble_r(bl: &Blocks, d: &StateData) -> Mat {
    let (ep, em) = (bl.ep(), bl.em());
    let epm = &ep - &em;
    let eps = &ep + &em;
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);
    let two = C64::new(2.0, 0.0);

    let t1 = two_by_two(&eps * two, bl.zeros(), bl.zeros(), &eps * two);

    let t2 = two_by_two(
        &dw * &epm * (&dq * bl.jpm(&d.rt)),
        &dw * &epm * (&dq * bl.jpm(&d.qt)),
        &dw * &epm * (&dr * bl.jpm(&d.rt)),
        &dw * &epm * (&dr * bl.jpm(&d.qt)),
    );

    let t3 = two_by_two(
        &dw * &eps * bl.diag(&d.prod(&d.qt, &d.r)),
        &dw * &eps * bl.diag(&d.prod(&d.qt, &d.q)),
        &dw * &eps * bl.diag(&d.prod(&d.rt, &d.r)),
        &dw * &eps * bl.diag(&d.prod(&d.rt, &d.q)),
    );

    let t4 = two_by_two(
        &dq * bl.jpm(&d.r) * &epm,
        -(&dq * bl.jpm(&d.q) * &epm),
        -(&dr * bl.jpm(&d.r) * &epm),
        &dr * bl.jpm(&d.q) * &epm,
    );

    let t5 = two_by_two(
        -(bl.diag(&d.prod(&d.q, &d.r)) * &eps),
        -(bl.diag(&d.prod(&d.q, &d.q)) * &eps),
        -(bl.diag(&d.prod(&d.r, &d.r)) * &eps),
        -(bl.diag(&d.prod(&d.r, &d.q)) * &eps),
    );

    t1 + t2 + t3 + t4 + t5
}

/// First piece of Lplus - Lminus: whole-lattice sums weighted by
/// q_j/(1 - r_j q_j), r_j/(1 - r_j q_j).
fn assemble_d1(bl: &Blocks, d: &StateData) -> Mat {
    let epm = bl.ep() - bl.em();
    let dw = bl.diag(&d.w);
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);
    two_by_two(
        &dw * &epm * (&dr * bl.jfull(&d.qt)),
        -(&dw * &epm * (&dr * bl.jfull(&d.rt))),
        -(&dw * &epm * (&dq * bl.jfull(&d.qt))),
        &dw * &epm * (&dq * bl.jfull(&d.rt)),
    )
}

/// Second piece of Lplus - Lminus: bare whole-lattice sums applied to the
/// shifted field.
fn assemble_d2(bl: &Blocks, d: &StateData) -> Mat {
    let epm = bl.ep() - bl.em();
    let dq = bl.diag(&d.q);
    let dr = bl.diag(&d.r);
    two_by_two(
        &dr * bl.jfull(&d.q) * &epm,
        &dr * bl.jfull(&d.r) * &epm,
        &dq * bl.jfull(&d.q) * &epm,
        &dq * bl.jfull(&d.r) * &epm,
    )
}

// ---------------------------------------------------------------------------
// Application, powers, adjoints
// ---------------------------------------------------------------------------

pub fn apply(a: &OperatorMatrix, f: &Field) -> Result<Field> {
    if f.ordering != a.domain_ordering {
        return Err(AlError::OrderingMismatch {
            expected: a.domain_ordering.to_string(),
            got: f.ordering.to_string(),
        });
    }
    if f.window != a.window {
        return Err(AlError::WindowMismatch);
    }
    let x = nalgebra::DVector::from_vec(f.to_vec());
    let y = &a.entries * x;
    Ok(Field::from_vec(
        f.window,
        a.codomain_ordering,
        y.as_slice(),
    ))
}

pub fn power_apply(a: &OperatorMatrix, f: &Field, n: usize) -> Result<Field> {
    let mut g = f.clone();
    for _ in 0..n {
        g = apply(a, &g)?;
    }
    Ok(g)
}

/// Adjoint with respect to the bilinear form: A* = G^{-1} A^T G, so that
/// <A u, v> = <u, A* v>.
pub fn adjoint(a: &OperatorMatrix, s: &LatticeState) -> Result<OperatorMatrix> {
    let g = FormMatrix::new(s)?;
    let entries = g.inverse() * a.entries.transpose() * &g.entries;
    Ok(OperatorMatrix {
        name: a.name,
        entries,
        // The adjoint swaps domain and codomain.
        domain_ordering: a.codomain_ordering,
        codomain_ordering: a.domain_ordering,
        window: a.window,
    })
}

/// Max entry modulus of a - b over rows and columns belonging to interior
/// sites (distance >= margin from either window edge).
pub fn interior_entry_diff(a: &Mat, b: &Mat, n_sites: usize, margin: usize) -> f64 {
    let lo = 2 * margin;
    let hi = 2 * (n_sites - margin);
    let mut worst = 0.0f64;
    for i in lo..hi {
        for j in lo..hi {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Max entry modulus over interior rows/columns (scale for relative checks).
pub fn interior_entry_norm(a: &Mat, n_sites: usize, margin: usize) -> f64 {
    let lo = 2 * margin;
    let hi = 2 * (n_sites - margin);
    let mut worst = 0.0f64;
    for i in lo..hi {
        for j in lo..hi {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// Operator infinity-norm (max absolute row sum); used for the geometric
/// tail bound of the resolvent truncation.
pub fn op_norm_inf(a: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        let s: f64 = (0..a.ncols()).map(|j| a[(i, j)].norm()).sum();
        worst = worst.max(s);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{pair_state, seeded_state, zero_state};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn l_on_zero_state_is_pure_shift() {
        let s = zero_state(8).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let bl = Blocks { n: 8 };
        let expect = two_by_two(bl.em(), bl.zeros(), bl.zeros(), bl.ep());
        assert_eq!(l.entries, expect);
    }

    #[test]
    fn j_is_per_site_diag() {
        let s = seeded_state(8, 1, 0.1).unwrap();
        let j = assemble(OpName::J, &s).unwrap();
        for i in 0..8 {
            assert_eq!(j.entries[(2 * i, 2 * i)], c(0.0, -1.0));
            assert_eq!(j.entries[(2 * i + 1, 2 * i + 1)], c(0.0, 1.0));
        }
    }

    #[test]
    fn lplus_equals_l_plus_linv_entrywise() {
        let s = seeded_state(24, 42, 0.2).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let linv = assemble(OpName::Linv, &s).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let sum = &l.entries + &linv.entries;
        let diff = (&lp.entries - sum).map(|v| v.norm()).max();
        assert!(diff < 1e-14, "Lplus != L + Linv, diff {diff:.3e}");
    }

    #[test]
    fn lplus_closed_form_action_on_potential() {
        // Lplus (r,q)^T = (1 - r_k q_k)(E^+ + E^-)(r_k, q_k)^T.
        let s = seeded_state(32, 42, 0.1).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let got = apply(&lp, &s.rq_field()).unwrap();
        let mut worst = 0.0f64;
        for k in s.window.iter() {
            let w = s.weight(k);
            let e1 = w * (s.r_at(k + 1) + s.r_at(k - 1));
            let e2 = w * (s.q_at(k + 1) + s.q_at(k - 1));
            worst = worst
                .max((got.c1_at(k) - e1).norm())
                .max((got.c2_at(k) - e2).norm());
        }
        assert!(worst < 1e-12, "AL closed form residual {worst:.3e}");
    }

    #[test]
    fn inverse_pair() {
        let s = seeded_state(32, 7, 0.2).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let linv = assemble(OpName::Linv, &s).unwrap();
        let f = s.rq_field();
        let a = apply(&l, &apply(&linv, &f).unwrap()).unwrap();
        let b = apply(&linv, &apply(&l, &f).unwrap()).unwrap();
        let scale = f.norm_inf();
        assert!(a.sub(&f).norm_inf_interior(2) <= 1e-9 * scale);
        assert!(b.sub(&f).norm_inf_interior(2) <= 1e-9 * scale);
    }

    #[test]
    fn adjoint_moves_across_form() {
        let s = seeded_state(16, 5, 0.2).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let lstar = adjoint(&l, &s).unwrap();
        let u = seeded_state(16, 21, 0.3).unwrap().rq_field();
        let v = seeded_state(16, 22, 0.3).unwrap().rq_field();
        let lhs =
            crate::lattice::bilinear_form(&apply(&l, &u).unwrap(), &v, &s).unwrap();
        let rhs =
            crate::lattice::bilinear_form(&u, &apply(&lstar, &v).unwrap(), &s).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn lstar_closed_form_matches_adjoint_interior() {
        let s = seeded_state(24, 11, 0.15).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let direct = assemble(OpName::Lstar, &s).unwrap();
        let adj = adjoint(&l, &s).unwrap();
        let d = interior_entry_diff(&direct.entries, &adj.entries, 24, 3);
        assert!(d < 1e-10, "Lstar closed form vs adjoint: {d:.3e}");

        let linv = assemble(OpName::Linv, &s).unwrap();
        let direct = assemble(OpName::Linvstar, &s).unwrap();
        let adj = adjoint(&linv, &s).unwrap();
        let d = interior_entry_diff(&direct.entries, &adj.entries, 24, 3);
        assert!(d < 1e-10, "Linvstar closed form vs adjoint: {d:.3e}");
    }

    #[test]
    fn lminus_is_conjugated_adjoint_sum() {
        let s = seeded_state(24, 13, 0.15).unwrap();
        let lm = assemble(OpName::Lminus, &s).unwrap();
        let lstar = assemble(OpName::Lstar, &s).unwrap();
        let listar = assemble(OpName::Linvstar, &s).unwrap();
        let s3 = assemble(OpName::Sigma3, &s).unwrap();
        let conj = &s3.entries * (&lstar.entries + &listar.entries) * &s3.entries;
        let d = (&lm.entries - conj).map(|v| v.norm()).max();
        assert!(d < 1e-14, "Lminus vs sigma3(L* + Linv*)sigma3: {d:.3e}");
    }

    #[test]
    fn r_is_conjugated_lplus_lminus_sum() {
        let s = seeded_state(24, 17, 0.15).unwrap();
        let r = assemble(OpName::R, &s).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let lm = assemble(OpName::Lminus, &s).unwrap();
        let b = assemble(OpName::B, &s).unwrap();
        let binv = assemble(OpName::Binv, &s).unwrap();
        let conj = &b.entries * (&lp.entries + &lm.entries) * &binv.entries;
        let d = (&r.entries - conj).map(|v| v.norm()).max();
        assert!(d < 1e-14, "R vs B(Lplus + Lminus)Binv: {d:.3e}");
    }

    #[test]
    fn decomposition_d1_d2() {
        let s = seeded_state(24, 19, 0.15).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let lm = assemble(OpName::Lminus, &s).unwrap();
        let d1 = assemble(OpName::D1, &s).unwrap();
        let d2 = assemble(OpName::D2, &s).unwrap();
        let lhs = &lp.entries - &lm.entries;
        let rhs = &d1.entries + &d2.entries;
        let d = interior_entry_diff(&lhs, &rhs, 24, 2);
        assert!(d < 1e-12, "Lplus - Lminus vs D1 + D2: {d:.3e}");
    }

    #[test]
    fn d1_annihilates_potential() {
        let s = seeded_state(24, 23, 0.15).unwrap();
        let d1 = assemble(OpName::D1, &s).unwrap();
        let out = apply(&d1, &s.rq_field()).unwrap();
        assert!(out.norm_inf_interior(2) < 1e-12);
    }

    #[test]
    fn pair_state_oracle() {
        let s = pair_state(8, 0, c(0.1, 0.0), 1, c(0.2, 0.0)).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let got = apply(&lp, &s.rq_field()).unwrap();
        // component 1 at k = 1: (1 - r_1 q_1)(r_2 + r_0) = 0.1
        assert!((got.c1_at(1) - c(0.1, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn j_grad_h0_action() {
        // J applied to the gradient field of H0 gives i(q, -r).
        let s = seeded_state(16, 3, 0.2).unwrap();
        let j = assemble(OpName::J, &s).unwrap();
        let grad = crate::functionals::discrete_gradient(
            &crate::functionals::Functional::H0,
            &s,
        )
        .unwrap();
        let out = apply(&j, &grad).unwrap();
        let i = c(0.0, 1.0);
        for k in s.window.iter() {
            assert!((out.c1_at(k) - i * s.q_at(k)).norm() < 1e-14);
            assert!((out.c2_at(k) + i * s.r_at(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn apply_rejects_wrong_ordering() {
        let s = seeded_state(8, 1, 0.1).unwrap();
        let l = assemble(OpName::L, &s).unwrap();
        let f = s.qr_field();
        assert!(matches!(
            apply(&l, &f),
            Err(AlError::OrderingMismatch { .. })
        ));
    }

    #[test]
    fn power_apply_matches_repeated_apply() {
        let s = seeded_state(16, 2, 0.15).unwrap();
        let lp = assemble(OpName::Lplus, &s).unwrap();
        let f = s.rq_field();
        let a = power_apply(&lp, &f, 2).unwrap();
        let b = apply(&lp, &apply(&lp, &f).unwrap()).unwrap();
        assert_eq!(a.c1, b.c1);
        assert_eq!(a.c2, b.c2);
        let id0 = power_apply(&lp, &f, 0).unwrap();
        assert_eq!(id0.c1, f.c1);
    }
}
