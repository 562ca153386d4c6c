//! Constructors for the standard families of non-homogeneous quadratic
//! algebras: Weyl algebras, (Sridharan-deformed) enveloping algebras,
//! symplectic reflection algebras, graded Hecke algebras and deformed
//! preprojective algebras.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::base_bimodules::{tensor_over_k, BaseRing, Bimodule, BimoduleError, Dual, TensorProduct};
use crate::exact_linalg::{add_scaled, int, unit_vec, zero_vec, Matrix, Scalar};
use crate::nonhomogeneous::{NonhomogeneousError, NonhomogeneousPresentation};
use crate::quadratic::{QuadraticPresentation, TruncatedGradedAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GalleryError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Nonhomogeneous(#[from] NonhomogeneousError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, GalleryError> {
    Err(GalleryError::Invalid(msg.into()))
}

fn is_skew(m: &Matrix) -> bool {
    m.rows() == m.cols() && m.add(&m.transpose()).is_zero()
}

/// `x^T m y`.
fn bilinear(m: &Matrix, x: &[Scalar], y: &[Scalar]) -> Scalar {
    x.iter().zip(m.mul_vec(y)).map(|(a, b)| a * b).sum()
}

/// Standard symplectic form on `Q^{2n}`: `omega(x_i, x_{n+i}) = 1`.
pub fn standard_symplectic(n: usize) -> Matrix {
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m.set(i, n + i, int(1));
        m.set(n + i, i, int(-1));
    }
    m
}

/// Finite group acting on `V = Q^n` by matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupData {
    v_dim: usize,
    elements: Vec<Matrix>,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl GroupData {
    /// The listed matrices must form a group; the multiplication table is
    /// read off from matrix products.
    pub fn from_matrices(v_dim: usize, elements: Vec<Matrix>, labels: Vec<String>) -> Result<Self, GalleryError> {
        if elements.is_empty() || labels.len() != elements.len() {
            return invalid("group needs at least one element and one label per element");
        }
        if elements.iter().any(|m| m.rows() != v_dim || m.cols() != v_dim) {
            return invalid(format!("group elements must be {v_dim}x{v_dim}"));
        }
        let find = |m: &Matrix| elements.iter().position(|g| g == m);
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                match find(&a.mul(b)) {
                    Some(k) => table[i][j] = k,
                    None => return invalid(format!("product of elements {i} and {j} is not in the group")),
                }
            }
        }
        let Some(identity) = find(&Matrix::identity(v_dim)) else {
            return invalid("group does not contain the identity");
        };
        let mut inverses = Vec::new();
        for i in 0..elements.len() {
            match (0..elements.len()).find(|&j| table[i][j] == identity) {
                Some(j) => inverses.push(j),
                None => return invalid(format!("element {i} has no inverse")),
            }
        }
        Ok(GroupData { v_dim, elements, labels, table, identity, inverses })
    }

    pub fn trivial(v_dim: usize) -> Self {
        Self::from_matrices(v_dim, vec![Matrix::identity(v_dim)], vec!["1".into()]).unwrap()
    }

    /// `{1, -1}` acting on `Q^n`.
    pub fn z2(v_dim: usize) -> Self {
        let id = Matrix::identity(v_dim);
        let minus = id.scaled(&int(-1));
        Self::from_matrices(v_dim, vec![id, minus], vec!["1".into(), "s".into()]).unwrap()
    }

    /// Cyclic group of order 1, 2, 3, 4 or 6 acting on `Q^2` inside `SL_2`.
    pub fn cyclic(order: usize) -> Result<Self, GalleryError> {
        let gen = match order {
            1 => Matrix::identity(2),
            2 => Matrix::from_i64(2, 2, &[-1, 0, 0, -1]),
            3 => Matrix::from_i64(2, 2, &[0, -1, 1, -1]),
            4 => Matrix::from_i64(2, 2, &[0, -1, 1, 0]),
            6 => Matrix::from_i64(2, 2, &[1, -1, 1, 0]),
            _ => return invalid(format!("no rational rotation of order {order}")),
        };
        let mut elements = vec![Matrix::identity(2)];
        for k in 1..order {
            elements.push(elements[k - 1].mul(&gen));
        }
        let labels = (0..order).map(|k| if k == 0 { "1".into() } else { format!("g{k}") }).collect();
        Self::from_matrices(2, elements, labels)
    }

    /// `Z/2` swapping the two symplectic planes of `Q^4`
    /// (coordinates `x_1, x_2, y_1, y_2`).
    pub fn plane_swap() -> Self {
        let swap = Matrix::from_i64(4, 4, &[0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0]);
        Self::from_matrices(4, vec![Matrix::identity(4), swap], vec!["1".into(), "s".into()]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    pub fn element(&self, g: usize) -> &Matrix {
        &self.elements[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn conjugate(&self, h: usize, s: usize) -> usize {
        self.mul(self.mul(h, s), self.inverse(h))
    }

    /// `rk(1 - s) = 2`.
    pub fn is_symplectic_reflection(&self, s: usize) -> bool {
        Matrix::identity(self.v_dim).sub(&self.elements[s]).rank() == 2
    }

    pub fn reflections(&self) -> Vec<usize> {
        (0..self.order()).filter(|&s| self.is_symplectic_reflection(s)).collect()
    }

    pub fn preserves(&self, omega: &Matrix) -> bool {
        self.elements.iter().all(|m| &m.transpose().mul(omega).mul(m) == omega)
    }

    pub fn base_ring(&self) -> Arc<BaseRing> {
        BaseRing::group_algebra(&self.table, self.identity, self.labels.clone()).expect("group algebras are semisimple")
    }

    /// `E = V (x) kG` with `g.(v (x) h) = v^g (x) gh` and
    /// `(v (x) h).g = v (x) hg`; basis `v_i (x) h` at index `i |G| + h`.
    pub fn generators(&self, base: &Arc<BaseRing>) -> Bimodule {
        let (n, o) = (self.v_dim, self.order());
        let idx = |i: usize, h: usize| i * o + h;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for g in 0..o {
            let mut l = Matrix::zeros(n * o, n * o);
            let mut r = Matrix::zeros(n * o, n * o);
            for i in 0..n {
                for h in 0..o {
                    for m in 0..n {
                        let c = self.elements[g].get(m, i);
                        if !c.is_zero() {
                            l.set(idx(m, self.mul(g, h)), idx(i, h), c.clone());
                        }
                    }
                    r.set(idx(i, self.mul(h, g)), idx(i, h), int(1));
                }
            }
            left.push(l);
            right.push(r);
        }
        Bimodule::new(base.clone(), n * o, left, right).expect("V (x) kG is a bimodule")
    }

    /// Projection onto `im(1 - s)` along `ker(1 - s)`.
    pub fn reflection_projection(&self, s: usize) -> Matrix {
        let n = self.v_dim;
        let one_minus = Matrix::identity(n).sub(&self.elements[s]);
        let im = one_minus.image();
        let ker = one_minus.kernel();
        let mut cols: Vec<Vec<Scalar>> = im.basis().to_vec();
        cols.extend(ker.basis().iter().cloned());
        let b = Matrix::from_columns(n, &cols);
        let binv = b.inverse().expect("finite-order elements are semisimple");
        let mut d = Matrix::zeros(n, n);
        for i in 0..im.dim() {
            d.set(i, i, int(1));
        }
        b.mul(&d).mul(&binv)
    }

    /// `omega_s`: equal to `omega` on `im(1 - s)` and zero on `ker(1 - s)`.
    pub fn omega_s(&self, omega: &Matrix, s: usize) -> Matrix {
        let p = self.reflection_projection(s);
        p.transpose().mul(omega).mul(&p)
    }
}

/// Relations `x_i (x) x_j - x_j (x) x_i - alpha(i,j) - beta(i,j)` for `i < j`,
/// placed at `v_i (x) 1` in `E` (the group element 1 when `E = V (x) kG`).
fn commutator_relations(
    gens: &Bimodule,
    square: &TensorProduct,
    v_dim: usize,
    embed: impl Fn(usize) -> Vec<Scalar>,
    lower: impl Fn(usize, usize) -> (Vec<Scalar>, Vec<Scalar>),
) -> Vec<Vec<Scalar>> {
    let dk = gens.base().dim();
    let mut out = Vec::new();
    for i in 0..v_dim {
        for j in i + 1..v_dim {
            let (xi, xj) = (embed(i), embed(j));
            let mut top = square.project_pair(&xi, &xj);
            add_scaled(&mut top, &int(-1), &square.project_pair(&xj, &xi));
            let (e_part, k_part) = lower(i, j);
            let mut v = Vec::with_capacity(dk + gens.dim() + square.dim());
            v.extend(k_part.iter().map(|x| -x.clone()));
            v.extend(e_part.iter().map(|x| -x.clone()));
            v.extend(top);
            out.push(v);
        }
    }
    out
}

/// Weyl algebra `x (x) y - y (x) x - omega(x, y)` over `Q`.
pub fn build_weyl(omega: &Matrix) -> Result<NonhomogeneousPresentation, GalleryError> {
    let n = omega.rows();
    if !is_skew(omega) {
        return invalid("omega is not skew-symmetric");
    }
    if omega.rank() != n || n % 2 != 0 {
        return invalid("omega is degenerate");
    }
    let base = BaseRing::field();
    let gens = Bimodule::free_over_field(&base, n);
    let square = tensor_over_k(&gens, &gens)?;
    let vecs = commutator_relations(&gens, &square, n, |i| unit_vec(n, i), |i, j| {
        (zero_vec(n), vec![omega.get(i, j).clone()])
    });
    Ok(NonhomogeneousPresentation::new(gens, &vecs)?)
}

/// Lie algebra data: `bracket[i][j]` holds the coordinates of `[x_i, x_j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieData {
    pub dim: usize,
    pub bracket: Vec<Vec<Vec<Scalar>>>,
}

impl LieData {
    pub fn new(dim: usize, bracket: Vec<Vec<Vec<Scalar>>>) -> Result<Self, GalleryError> {
        if bracket.len() != dim || bracket.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return invalid("bracket has the wrong shape");
        }
        for i in 0..dim {
            for j in 0..dim {
                let s: Vec<Scalar> = bracket[i][j].iter().zip(&bracket[j][i]).map(|(a, b)| a + b).collect();
                if s.iter().any(|x| !x.is_zero()) {
                    return invalid(format!("bracket is not antisymmetric at ({i},{j})"));
                }
            }
        }
        Ok(LieData { dim, bracket })
    }

    /// From the brackets `[x_i, x_j]` for `i < j` (missing pairs are zero).
    pub fn from_pairs(dim: usize, pairs: &[(usize, usize, Vec<i64>)]) -> Result<Self, GalleryError> {
        let mut bracket = vec![vec![zero_vec(dim); dim]; dim];
        for (i, j, v) in pairs {
            if *i >= dim || *j >= dim || v.len() != dim {
                return invalid("bracket entry out of range");
            }
            bracket[*i][*j] = v.iter().map(|&x| int(x)).collect();
            bracket[*j][*i] = v.iter().map(|&x| int(-x)).collect();
        }
        Self::new(dim, bracket)
    }

    /// `sl_2` in the basis `(e, f, h)`.
    pub fn sl2() -> Self {
        Self::from_pairs(3, &[(0, 1, vec![0, 0, 1]), (0, 2, vec![-2, 0, 0]), (1, 2, vec![0, 2, 0])]).unwrap()
    }

    pub fn abelian(dim: usize) -> Self {
        Self::from_pairs(dim, &[]).unwrap()
    }

    /// `[x, y] = y`.
    pub fn nonabelian2() -> Self {
        Self::from_pairs(2, &[(0, 1, vec![0, 1])]).unwrap()
    }

    /// Heisenberg algebra `[x, y] = z`.
    pub fn heisenberg() -> Self {
        Self::from_pairs(3, &[(0, 1, vec![0, 0, 1])]).unwrap()
    }

    /// First violation of the Jacobi identity, if any.
    pub fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        let br = |u: &[Scalar], v: &[Scalar]| {
            let mut out = zero_vec(n);
            for (i, a) in u.iter().enumerate() {
                for (j, b) in v.iter().enumerate() {
                    if !a.is_zero() && !b.is_zero() {
                        add_scaled(&mut out, &(a * b), &self.bracket[i][j]);
                    }
                }
            }
            out
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (unit_vec(n, i), unit_vec(n, j), unit_vec(n, k));
                    let mut s = br(&x, &br(&y, &z));
                    add_scaled(&mut s, &int(1), &br(&y, &br(&z, &x)));
                    add_scaled(&mut s, &int(1), &br(&z, &br(&x, &y)));
                    if s.iter().any(|c| !c.is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// `x (x) y - y (x) x - [x, y] - beta(x, y)` over `Q`.
pub fn build_enveloping(lie: &LieData, beta: Option<&Matrix>) -> Result<NonhomogeneousPresentation, GalleryError> {
    let n = lie.dim;
    if let Some(b) = beta {
        if b.rows() != n || !is_skew(b) {
            return invalid("beta is not a skew form on the Lie algebra");
        }
    }
    let base = BaseRing::field();
    let gens = Bimodule::free_over_field(&base, n);
    let square = tensor_over_k(&gens, &gens)?;
    let vecs = commutator_relations(&gens, &square, n, |i| unit_vec(n, i), |i, j| {
        (lie.bracket[i][j].clone(), vec![beta.map_or_else(Scalar::zero, |b| b.get(i, j).clone())])
    });
    Ok(NonhomogeneousPresentation::new(gens, &vecs)?)
}

/// `x (x) y - y (x) x - sum_g a_g(x, y) g` over `kG`, `E = V (x) kG`.
pub fn build_graded_hecke(group: &GroupData, forms: &[Matrix]) -> Result<NonhomogeneousPresentation, GalleryError> {
    let n = group.v_dim();
    if forms.len() != group.order() {
        return invalid("one form per group element is required");
    }
    if forms.iter().any(|a| a.rows() != n || !is_skew(a)) {
        return invalid("forms a_g must be skew-symmetric on V");
    }
    let base = group.base_ring();
    let gens = group.generators(&base);
    let square = tensor_over_k(&gens, &gens)?;
    let o = group.order();
    let id = group.identity();
    let vecs = commutator_relations(&gens, &square, n, |i| unit_vec(n * o, i * o + id), |i, j| {
        let k: Vec<Scalar> = forms.iter().map(|a| a.get(i, j).clone()).collect();
        (zero_vec(n * o), k)
    });
    Ok(NonhomogeneousPresentation::new(gens, &vecs)?)
}

/// Parameters of a symplectic reflection algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SraData {
    pub group: GroupData,
    pub omega: Matrix,
    pub t: Scalar,
    /// `c[g]` for every group element; zero off the symplectic reflections.
    pub c: Vec<Scalar>,
}

impl SraData {
    /// `c` constant on all symplectic reflections.
    pub fn new(group: GroupData, omega: Matrix, t: Scalar, c: Scalar) -> Self {
        let cs = (0..group.order()).map(|g| if group.is_symplectic_reflection(g) { c.clone() } else { Scalar::zero() }).collect();
        SraData { group, omega, t, c: cs }
    }

    pub fn validate(&self) -> Result<(), GalleryError> {
        let g = &self.group;
        if self.omega.rows() != g.v_dim() || !is_skew(&self.omega) || self.omega.rank() != g.v_dim() {
            return invalid("omega must be a nondegenerate skew form on V");
        }
        if !g.preserves(&self.omega) {
            return invalid("group does not preserve omega");
        }
        if self.c.len() != g.order() {
            return invalid("c needs one value per group element");
        }
        for s in 0..g.order() {
            if !g.is_symplectic_reflection(s) && !self.c[s].is_zero() {
                return invalid(format!("c is nonzero on {} which is not a symplectic reflection", g.labels()[s]));
            }
            for h in 0..g.order() {
                if self.c[g.conjugate(h, s)] != self.c[s] {
                    return invalid("c is not conjugation invariant");
                }
            }
        }
        Ok(())
    }

    /// `a_1 = t omega`, `a_s = c_s omega_s`.
    pub fn forms(&self) -> Vec<Matrix> {
        let g = &self.group;
        (0..g.order())
            .map(|s| {
                let mut a = Matrix::zeros(g.v_dim(), g.v_dim());
                if s == g.identity() {
                    a.add_assign_scaled(&self.t, &self.omega);
                }
                if g.is_symplectic_reflection(s) && !self.c[s].is_zero() {
                    a.add_assign_scaled(&self.c[s], &g.omega_s(&self.omega, s));
                }
                a
            })
            .collect()
    }

    /// `kappa(x_i, x_j) = t omega(x_i, x_j) + sum_s c_s omega_s(x_i, x_j) s`
    /// in the group basis of `kG`.
    pub fn kappa(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.forms().iter().map(|a| bilinear(a, x, y)).collect()
    }
}

pub fn build_sra(data: &SraData) -> Result<NonhomogeneousPresentation, GalleryError> {
    data.validate()?;
    build_graded_hecke(&data.group, &data.forms())
}

/// Quiver with deformation parameters `lambda_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverData {
    pub vertices: usize,
    /// `(tail, head)`.
    pub arrows: Vec<(usize, usize)>,
    pub lambda: Vec<Scalar>,
}

/// Underlying-graph type of a connected quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphType {
    /// Finite ADE type, e.g. `A3`, `D4`, `E6`.
    Ade(String),
    NotAde,
}

impl QuiverData {
    pub fn new(vertices: usize, arrows: Vec<(usize, usize)>, lambda: Vec<Scalar>) -> Result<Self, GalleryError> {
        let q = QuiverData { vertices, arrows, lambda };
        q.validate()?;
        Ok(q)
    }

    pub fn undeformed(vertices: usize, arrows: Vec<(usize, usize)>) -> Result<Self, GalleryError> {
        Self::new(vertices, arrows, vec![Scalar::zero(); vertices])
    }

    pub fn kronecker() -> Self {
        Self::undeformed(2, vec![(0, 1), (0, 1)]).unwrap()
    }

    pub fn jordan(lambda: Scalar) -> Self {
        Self::new(1, vec![(0, 0)], vec![lambda]).unwrap()
    }

    /// Linear `A_n` quiver `0 -> 1 -> ... -> n-1`.
    pub fn a_n(n: usize) -> Self {
        Self::undeformed(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    /// Cyclic quiver with `n` vertices (extended type `A_{n-1}`).
    pub fn cyclic(n: usize) -> Self {
        Self::undeformed(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    pub fn with_lambda(mut self, lambda: Vec<Scalar>) -> Result<Self, GalleryError> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), GalleryError> {
        if self.vertices == 0 {
            return invalid("quiver has no vertices");
        }
        if self.lambda.len() != self.vertices {
            return invalid("lambda needs one value per vertex");
        }
        if let Some(k) = self.arrows.iter().position(|&(t, h)| t >= self.vertices || h >= self.vertices) {
            return invalid(format!("arrow {k} references a missing vertex"));
        }
        if !self.is_connected() {
            return invalid("quiver is not connected");
        }
        Ok(())
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(t, h) in &self.arrows {
            adj[t].push(h);
            if t != h {
                adj[h].push(t);
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbours();
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Classification of the underlying graph.
    pub fn graph_type(&self) -> GraphType {
        let n = self.vertices;
        let loops = self.arrows.iter().any(|&(t, h)| t == h);
        let mut pairs: Vec<(usize, usize)> = self.arrows.iter().map(|&(t, h)| (t.min(h), t.max(h))).collect();
        pairs.sort();
        let multiple = pairs.windows(2).any(|w| w[0] == w[1]);
        if loops || multiple || self.arrows.len() != n - 1 {
            return GraphType::NotAde;
        }
        let adj = self.neighbours();
        let degrees: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let branch: Vec<usize> = (0..n).filter(|&v| degrees[v] >= 3).collect();
        if branch.is_empty() {
            return GraphType::Ade(format!("A{n}"));
        }
        if branch.len() > 1 || degrees[branch[0]] > 3 {
            return GraphType::NotAde;
        }
        let c = branch[0];
        let mut arms: Vec<usize> = adj[c]
            .iter()
            .map(|&start| {
                let (mut prev, mut cur, mut len) = (c, start, 1);
                while degrees[cur] == 2 {
                    let next = *adj[cur].iter().find(|&&w| w != prev).unwrap();
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort();
        match (arms[0], arms[1], arms[2]) {
            (1, 1, _) => GraphType::Ade(format!("D{n}")),
            (1, 2, 2) => GraphType::Ade("E6".into()),
            (1, 2, 3) => GraphType::Ade("E7".into()),
            (1, 2, 4) => GraphType::Ade("E8".into()),
            _ => GraphType::NotAde,
        }
    }

    /// Vertices that are not the tail of any arrow.
    pub fn vertices_without_outgoing(&self) -> Vec<usize> {
        (0..self.vertices).filter(|&i| !self.arrows.iter().any(|&(t, _)| t == i)).collect()
    }

    /// An orientation in which every vertex is the tail of some arrow, with
    /// the indices of the reversed arrows. `None` when the graph is a tree.
    pub fn reorient(&self) -> Option<(QuiverData, Vec<usize>)> {
        if self.vertices_without_outgoing().is_empty() {
            return Some((self.clone(), Vec::new()));
        }
        if self.arrows.len() < self.vertices {
            return None;
        }
        // Find an edge closing a cycle, orient the cycle, then orient the
        // remaining spanning-tree edges towards it.
        let n = self.vertices;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut tree_edge = vec![false; self.arrows.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (k, &(t, h)) in self.arrows.iter().enumerate() {
                let w = if t == v { h } else if h == v { t } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, k));
                    tree_edge[k] = true;
                    queue.push_back(w);
                }
            }
        }
        let extra = (0..self.arrows.len()).find(|&k| !tree_edge[k])?;
        let (u, w) = self.arrows[extra];
        let path_to_root = |mut v: usize| {
            let mut p = vec![v];
            while let Some((q, _)) = parent[v] {
                p.push(q);
                v = q;
            }
            p
        };
        let pu = path_to_root(u);
        let pw = path_to_root(w);
        let meet = *pu.iter().find(|x| pw.contains(x)).unwrap();
        let mut orient: Vec<Option<(usize, usize)>> = vec![None; self.arrows.len()];
        orient[extra] = Some((u, w));
        // cycle: u -> w -> parent(w) -> ... -> meet -> ... -> u
        let mut v = w;
        while v != meet {
            let (q, k) = parent[v].unwrap();
            orient[k] = Some((v, q));
            v = q;
        }
        let mut down = Vec::new();
        let mut v = u;
        while v != meet {
            let (q, k) = parent[v].unwrap();
            down.push((q, v, k));
            v = q;
        }
        for (q, v, k) in down {
            orient[k] = Some((q, v));
        }
        let mut on_cycle = vec![false; n];
        for (k, o) in orient.iter().enumerate() {
            if let Some((t, h)) = o {
                on_cycle[*t] = true;
                on_cycle[*h] = true;
                let _ = k;
            }
        }
        // remaining vertices point towards the cycle along a BFS from it
        let mut dist_parent: Vec<Option<usize>> = vec![None; n];
        let mut done = on_cycle.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| on_cycle[v]).collect();
        while let Some(v) = queue.pop_front() {
            for (k, &(t, h)) in self.arrows.iter().enumerate() {
                let x = if t == v { h } else if h == v { t } else { continue };
                if !done[x] {
                    done[x] = true;
                    dist_parent[x] = Some(k);
                    orient[k] = Some((x, v));
                    queue.push_back(x);
                }
            }
        }
        let _ = dist_parent;
        let mut flipped = Vec::new();
        let mut arrows = self.arrows.clone();
        for k in 0..arrows.len() {
            if let Some((t, h)) = orient[k] {
                if (t, h) != self.arrows[k] {
                    arrows[k] = (t, h);
                    flipped.push(k);
                }
            }
        }
        let q = QuiverData { vertices: n, arrows, lambda: self.lambda.clone() };
        debug_assert!(q.vertices_without_outgoing().is_empty());
        Some((q, flipped))
    }

    /// Number of arrows of the doubled quiver.
    pub fn doubled(&self) -> usize {
        2 * self.arrows.len()
    }

    /// Tail and head of doubled arrow `c`: `a_m` at `m`, `a_m^*` at `m + |Q_1|`.
    pub fn ends(&self, c: usize) -> (usize, usize) {
        let m = self.arrows.len();
        if c < m {
            self.arrows[c]
        } else {
            let (t, h) = self.arrows[c - m];
            (h, t)
        }
    }

    pub fn star(&self, c: usize) -> usize {
        let m = self.arrows.len();
        if c < m { c + m } else { c - m }
    }

    pub fn base_ring(&self) -> Arc<BaseRing> {
        BaseRing::product_of_fields(self.vertices)
    }

    /// `E` spanned by the doubled arrows: `e_i a = a` iff `h(a) = i`,
    /// `a e_j = a` iff `t(a) = j`.
    pub fn generators(&self, base: &Arc<BaseRing>) -> Bimodule {
        let d = self.doubled();
        let mut left = vec![Matrix::zeros(d, d); self.vertices];
        let mut right = vec![Matrix::zeros(d, d); self.vertices];
        for c in 0..d {
            let (t, h) = self.ends(c);
            left[h].set(c, c, int(1));
            right[t].set(c, c, int(1));
        }
        Bimodule::new(base.clone(), d, left, right).expect("arrow bimodule")
    }
}

/// Preprojective presentation together with what was done to the input.
#[derive(Clone, Debug)]
pub struct PreprojectiveData {
    pub presentation: NonhomogeneousPresentation,
    /// The quiver actually used (after reorientation).
    pub quiver: QuiverData,
    pub reversed_arrows: Vec<usize>,
    pub graph_type: GraphType,
    pub warnings: Vec<String>,
}

/// `sum_{t(a)=i} a^* a - sum_{h(a)=i} a a^* - lambda_i e_i` for each vertex.
pub fn build_preprojective(quiver: &QuiverData) -> Result<NonhomogeneousPresentation, GalleryError> {
    Ok(build_preprojective_data(quiver)?.presentation)
}

pub fn build_preprojective_data(quiver: &QuiverData) -> Result<PreprojectiveData, GalleryError> {
    quiver.validate()?;
    let mut warnings = Vec::new();
    let graph_type = quiver.graph_type();
    if let GraphType::Ade(t) = &graph_type {
        warnings.push(format!("underlying graph is of finite type {t}; the preprojective algebra is not expected to be Koszul"));
    }
    let (q, reversed) = match quiver.reorient() {
        Some((q, rev)) => {
            if !rev.is_empty() {
                warnings.push(format!("reoriented arrows {rev:?} so that every vertex is a tail"));
            }
            (q, rev)
        }
        None => {
            warnings.push("no orientation makes every vertex a tail; omega_i uses an incoming arrow where needed".into());
            (quiver.clone(), Vec::new())
        }
    };
    let presentation = preprojective_presentation(&q)?;
    Ok(PreprojectiveData { presentation, quiver: q, reversed_arrows: reversed, graph_type, warnings })
}

fn preprojective_presentation(q: &QuiverData) -> Result<NonhomogeneousPresentation, GalleryError> {
    let base = q.base_ring();
    let gens = q.generators(&base);
    let square = tensor_over_k(&gens, &gens)?;
    let d = q.doubled();
    let vecs: Vec<Vec<Scalar>> = (0..q.vertices).map(|i| {
        let mut top = zero_vec(square.dim());
        for (m, &(t, h)) in q.arrows.iter().enumerate() {
            let (a, a_star) = (unit_vec(d, m), unit_vec(d, q.star(m)));
            if t == i {
                add_scaled(&mut top, &int(1), &square.project_pair(&a_star, &a));
            }
            if h == i {
                add_scaled(&mut top, &int(-1), &square.project_pair(&a, &a_star));
            }
        }
        let mut v = zero_vec(q.vertices);
        v[i] = -q.lambda[i].clone();
        v.extend(zero_vec(d));
        v.extend(top);
        v
    }).collect();
    Ok(NonhomogeneousPresentation::new(gens, &vecs)?)
}

/// `psi_a` (`psi_a(b) = delta_{ab} e_{t(a)}`) in the coordinates of the dual.
pub fn psi(q: &QuiverData, dual: &Dual, a: usize) -> Vec<Scalar> {
    let mut m = Matrix::zeros(q.vertices, q.doubled());
    m.set(q.ends(a).0, a, int(1));
    dual.coordinates_of(&m).expect("psi_a is right k-linear")
}

/// A combination `sum c psi_a (x) psi_b`, stored as `(a, b, c)`.
pub type PsiTensor = Vec<(usize, usize, Scalar)>;

/// Spanning relations of the quadratic dual, each with a short label.
pub fn preprojective_dual_relations(q: &QuiverData) -> Vec<(String, PsiTensor)> {
    let m = q.arrows.len();
    let one = Scalar::one();
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            out.push(("same-kind".to_string(), vec![(a, b, one.clone())]));
            out.push(("same-kind".to_string(), vec![(q.star(a), q.star(b), one.clone())]));
            if a != b {
                out.push(("mixed".to_string(), vec![(a, q.star(b), one.clone())]));
                out.push(("mixed".to_string(), vec![(q.star(a), b, one.clone())]));
            }
            let (ta, ha) = q.arrows[a];
            let (tb, hb) = q.arrows[b];
            if ta == tb {
                out.push(("common-tail".to_string(), vec![(a, q.star(a), one.clone()), (b, q.star(b), -one.clone())]));
            }
            if ha == hb {
                out.push(("common-head".to_string(), vec![(q.star(a), a, one.clone()), (q.star(b), b, -one.clone())]));
            }
            if ta == hb {
                out.push(("tail-head".to_string(), vec![(a, q.star(a), one.clone()), (q.star(b), b, one.clone())]));
            }
        }
    }
    out
}

/// Tensor-reverse every term of a `PsiTensor`.
pub fn reversed(t: &PsiTensor) -> PsiTensor {
    t.iter().map(|(a, b, c)| (*b, *a, c.clone())).collect()
}

/// `omega_i` for each vertex: `psi_a (x) psi_{a^*}` for an arrow with
/// `t(a) = i`, otherwise `-psi_{a^*} (x) psi_a` for an arrow with `h(a) = i`.
/// Both satisfy `omega_i(x_j) = delta_{ij} e_i` under the pairing
/// `(f (x) g)(e_2 (x) e_1) = f(g(e_2) e_1)`.
pub fn preprojective_omegas(q: &QuiverData) -> Vec<PsiTensor> {
    (0..q.vertices)
        .map(|i| {
            if let Some(a) = q.arrows.iter().position(|&(t, _)| t == i) {
                vec![(a, q.star(a), Scalar::one())]
            } else {
                let a = q.arrows.iter().position(|&(_, h)| h == i).expect("connected quiver with an arrow");
                vec![(q.star(a), a, -Scalar::one())]
            }
        })
        .collect()
}

/// `PsiTensor` as a vector in `E^* (x)_k E^*` (coordinates of `square`).
pub fn psi_tensor_in_square(q: &QuiverData, dual: &Dual, square: &TensorProduct, t: &PsiTensor) -> Vec<Scalar> {
    let mut v = zero_vec(square.dim());
    for (a, b, c) in t {
        add_scaled(&mut v, c, &square.project_pair(&psi(q, dual, *a), &psi(q, dual, *b)));
    }
    v
}

/// `PsiTensor` as an element of the degree-2 part of an algebra generated
/// by `E^*`.
pub fn psi_tensor_in_algebra(q: &QuiverData, dual: &Dual, alg: &TruncatedGradedAlgebra, t: &PsiTensor) -> Vec<Scalar> {
    let mut v = zero_vec(alg.dim(2));
    for (a, b, c) in t {
        add_scaled(&mut v, c, &alg.mul(1, &psi(q, dual, *a), 1, &psi(q, dual, *b)));
    }
    v
}

/// `Sym(Q^n)` as a quadratic presentation.
pub fn symmetric_algebra(n: usize) -> Result<QuadraticPresentation, GalleryError> {
    let p = build_enveloping(&LieData::abelian(n), None)?;
    Ok(p.quadratic().clone())
}

/// A named gallery entry.
#[derive(Clone, Debug)]
pub struct GalleryItem {
    pub name: String,
    pub presentation: NonhomogeneousPresentation,
    pub warnings: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl GalleryItem {
    fn new(name: &str, presentation: NonhomogeneousPresentation) -> Self {
        GalleryItem { name: name.into(), presentation, warnings: Vec::new(), metadata: BTreeMap::new() }
    }
}

/// The default parameterised instances of every family.
pub fn default_gallery() -> Result<Vec<GalleryItem>, GalleryError> {
    let mut out = vec![
        GalleryItem::new("weyl2", build_weyl(&standard_symplectic(1))?),
        GalleryItem::new("weyl4", build_weyl(&standard_symplectic(2))?),
        GalleryItem::new("enveloping-sl2", build_enveloping(&LieData::sl2(), None)?),
        GalleryItem::new(
            "sridharan2",
            build_enveloping(&LieData::nonabelian2(), Some(&Matrix::from_i64(2, 2, &[0, 1, -1, 0])))?,
        ),
        GalleryItem::new(
            "sra-z2",
            build_sra(&SraData::new(GroupData::z2(2), standard_symplectic(1), int(1), int(1)))?,
        ),
        GalleryItem::new(
            "hecke-z2",
            build_graded_hecke(&GroupData::z2(2), &[Matrix::zeros(2, 2), Matrix::from_i64(2, 2, &[0, 1, -1, 0])])?,
        ),
    ];
    for (name, q) in [
        ("preprojective-kronecker", QuiverData::kronecker().with_lambda(vec![int(1), int(-1)])?),
        ("preprojective-cyclic3", QuiverData::cyclic(3).with_lambda(vec![int(1), int(2), int(-3)])?),
    ] {
        let d = build_preprojective_data(&q)?;
        let mut item = GalleryItem::new(name, d.presentation);
        item.warnings = d.warnings;
        if !d.reversed_arrows.is_empty() {
            item.metadata.insert("reversed_arrows".into(), format!("{:?}", d.reversed_arrows));
        }
        out.push(item);
    }
    Ok(out)
}

/// Quadratic algebras used for the Koszul and Ext checks.
pub fn quadratic_gallery() -> Result<Vec<(String, QuadraticPresentation)>, GalleryError> {
    let mut out: Vec<(String, QuadraticPresentation)> = vec![
        ("sym2".into(), symmetric_algebra(2)?),
        ("sym3".into(), symmetric_algebra(3)?),
        (
            "tensor2".into(),
            QuadraticPresentation::tensor_algebra(Bimodule::free_over_field(&BaseRing::field(), 2))
                .map_err(NonhomogeneousError::from)?,
        ),
    ];
    for item in default_gallery()? {
        if item.name == "weyl4" || item.name == "enveloping-sl2" {
            continue;
        }
        out.push((format!("gr-{}", item.name), item.presentation.quadratic().clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_bimodules::right_dual;
    use crate::exact_linalg::Subspace;
    use crate::nonhomogeneous::{curved_dual, pbw_check, verify_cdga};
    use crate::quadratic::{koszulness_check, quadratic_dual, truncate_algebra};

    #[test]
    fn z2_reflection() {
        let g = GroupData::z2(2);
        assert!(g.is_symplectic_reflection(1));
        assert!(!g.is_symplectic_reflection(0));
        assert_eq!(g.omega_s(&standard_symplectic(1), 1), standard_symplectic(1));
    }

    #[test]
    fn plane_swap_omega_s() {
        let g = GroupData::plane_swap();
        let om = standard_symplectic(2);
        assert!(g.preserves(&om));
        assert!(g.is_symplectic_reflection(1));
        let ws = g.omega_s(&om, 1);
        assert!(is_skew(&ws));
        assert_eq!(ws.rank(), 2);
    }

    #[test]
    fn graph_types() {
        assert_eq!(QuiverData::a_n(2).graph_type(), GraphType::Ade("A2".into()));
        assert_eq!(QuiverData::kronecker().graph_type(), GraphType::NotAde);
        assert_eq!(QuiverData::cyclic(3).graph_type(), GraphType::NotAde);
        let d4 = QuiverData::undeformed(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(d4.graph_type(), GraphType::Ade("D4".into()));
        let d4t = QuiverData::undeformed(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(d4t.graph_type(), GraphType::NotAde);
        let e6 = QuiverData::undeformed(6, vec![(0, 1), (0, 2), (2, 3), (0, 4), (4, 5)]).unwrap();
        assert_eq!(e6.graph_type(), GraphType::Ade("E6".into()));
    }

    #[test]
    fn kronecker_reorientation() {
        let (q, flipped) = QuiverData::kronecker().reorient().unwrap();
        assert_eq!(flipped.len(), 1);
        assert!(q.vertices_without_outgoing().is_empty());
        assert!(QuiverData::a_n(3).reorient().is_none());
    }

    #[test]
    fn disconnected_quiver_rejected() {
        assert!(QuiverData::undeformed(3, vec![(0, 1)]).is_err());
    }

    #[test]
    fn weyl_dim_zero() {
        let p = build_weyl(&Matrix::zeros(0, 0)).unwrap();
        assert_eq!(p.generators().dim(), 0);
        assert_eq!(p.relations().dim(), 0);
    }

    #[test]
    fn degenerate_omega_rejected() {
        assert!(build_weyl(&Matrix::zeros(2, 2)).is_err());
        assert!(build_weyl(&Matrix::from_i64(2, 2, &[0, 1, 1, 0])).is_err());
    }

    #[test]
    fn non_antisymmetric_bracket_rejected() {
        let mut b = vec![vec![zero_vec(2); 2]; 2];
        b[0][1] = vec![int(1), int(0)];
        assert!(LieData::new(2, b).is_err());
    }

    #[test]
    fn sra_pbw() {
        let p = build_sra(&SraData::new(GroupData::z2(2), standard_symplectic(1), frac_s(2, 3), frac_s(-5, 7))).unwrap();
        let r = pbw_check(&p).unwrap();
        assert!(r.pbw(), "{}", r.summary());
        let c = curved_dual(&p, 3).unwrap();
        assert_eq!(c.dims(), vec![2, 4, 2, 0]);
        assert!(c.differential_is_zero());
    }

    fn frac_s(p: i64, q: i64) -> Scalar {
        crate::exact_linalg::frac(p, q)
    }

    #[test]
    fn kronecker_relations_span_q_perp() {
        let d = build_preprojective_data(&QuiverData::kronecker()).unwrap();
        let quad = d.presentation.quadratic();
        let dual = quadratic_dual(quad).unwrap();
        let sq = dual.presentation.square();
        let rels: Vec<Vec<Scalar>> = preprojective_dual_relations(&d.quiver)
            .iter()
            .map(|(_, t)| psi_tensor_in_square(&d.quiver, &dual.dual, sq, t))
            .collect();
        let span = Subspace::span(sq.dim(), rels);
        assert_eq!(&span, dual.presentation.relations());
    }

    #[test]
    fn preprojective_curvature_matches_omegas() {
        let q = QuiverData::kronecker().with_lambda(vec![int(3), int(-2)]).unwrap();
        let d = build_preprojective_data(&q).unwrap();
        let c = curved_dual(&d.presentation, 3).unwrap();
        assert_eq!(c.dims(), vec![2, 4, 2, 0]);
        let mut expected = zero_vec(c.algebra.dim(2));
        for (i, w) in preprojective_omegas(&d.quiver).iter().enumerate() {
            let v = psi_tensor_in_algebra(&d.quiver, &c.dual.dual, &c.algebra, w);
            add_scaled(&mut expected, &-d.quiver.lambda[i].clone(), &v);
        }
        assert_eq!(c.curvature, expected);
        assert!(verify_cdga(&c).pass());
    }

    #[test]
    fn a2_preprojective_is_radical_square_zero() {
        let d = build_preprojective_data(&QuiverData::a_n(2)).unwrap();
        assert!(matches!(d.graph_type, GraphType::Ade(_)));
        let quad = d.presentation.quadratic();
        assert_eq!(quad.relations().dim(), quad.square().dim());
    }

    #[test]
    fn a3_preprojective_not_koszul() {
        let d = build_preprojective_data(&QuiverData::a_n(3)).unwrap();
        let r = koszulness_check(d.presentation.quadratic(), 4).unwrap();
        assert!(!r.pass());
        assert!(r.failure.is_some());
    }

    #[test]
    fn jordan_is_weyl() {
        let j = build_preprojective(&QuiverData::jordan(int(1))).unwrap();
        let w = build_weyl(&standard_symplectic(1)).unwrap();
        // a^* a - a a^* - 1 with x = a^*, y = a
        let perm = Matrix::from_i64(2, 2, &[0, 1, 1, 0]);
        let e = w.generators();
        let sq = w.quadratic().square();
        let mapped: Vec<Vec<Scalar>> = j
            .relations()
            .basis()
            .iter()
            .map(|r| {
                let mut v = r[..1].to_vec();
                v.extend(perm.mul_vec(&r[1..3]));
                v.extend(sq.map_tensor(&perm, &perm, sq).mul_vec(&r[3..]));
                v
            })
            .collect();
        let _ = e;
        assert_eq!(&Subspace::span(w.ambient().dim(), mapped), w.relations());
    }

    #[test]
    fn trivial_group_sra_is_weyl() {
        let s = build_sra(&SraData::new(GroupData::trivial(2), standard_symplectic(1), int(1), int(0))).unwrap();
        let w = build_weyl(&standard_symplectic(1)).unwrap();
        assert_eq!(s.relations(), w.relations());
    }

    #[test]
    fn gallery_builds() {
        let g = default_gallery().unwrap();
        assert!(g.len() >= 8);
        let t = truncate_algebra(g[0].presentation.quadratic(), 2).unwrap();
        assert_eq!(t.hilbert(), vec![1, 2, 3]);
        let _ = right_dual(g[0].presentation.generators());
    }
}
