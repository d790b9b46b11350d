//! Python bindings for the geogt core: graphs and their hyperbolicity,
//! root systems and Chevalley forms, quadratic rings, horoballs and
//! pseudocharacter reports.

use geogt_core::action;
use geogt_core::chevalley::{self, ChevalleyZForm, ProductOrder};
use geogt_core::coarse::{self, DeltaMode, FiniteGraphSpace};
use geogt_core::horoball::{self, ScanPolicy};
use geogt_core::numring::{self, QuadOrder};
use geogt_core::rootsys;
use num_bigint::BigInt;
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: geogt_core::Error) -> PyErr {
    match e {
        geogt_core::Error::Budget(_) => PyMemoryError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_json<T: Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn mode(samples: Option<u64>, seed: Option<u64>) -> PyResult<DeltaMode> {
    match (samples, seed) {
        (None, None) => Ok(DeltaMode::Exact),
        (Some(samples), Some(seed)) => Ok(DeltaMode::Sampled { samples, seed }),
        _ => Err(PyValueError::new_err("sampling needs both samples and seed")),
    }
}

/// A finite connected or disconnected graph with its exact path metric.
#[pyclass(frozen)]
struct Graph {
    inner: FiniteGraphSpace,
}

#[pymethods]
impl Graph {
    #[staticmethod]
    fn path(n: usize) -> Self {
        Graph { inner: coarse::path_graph(n) }
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Graph { inner: coarse::cycle_graph(n) }
    }

    #[staticmethod]
    fn grid(w: usize, h: usize) -> Self {
        Graph { inner: coarse::grid_graph(w, h) }
    }

    #[staticmethod]
    fn tree(n: usize, seed: u64) -> Self {
        Graph { inner: coarse::random_tree(n, seed) }
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        Ok(Graph {
            inner: FiniteGraphSpace::from_edges(n, &edges).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges()
    }

    /// `None` when the vertices lie in different components.
    fn distance(&self, u: usize, v: usize) -> PyResult<Option<u32>> {
        if u >= self.inner.n() || v >= self.inner.n() {
            return Err(PyValueError::new_err("vertex out of range"));
        }
        Ok(self.inner.distances().finite(u, v))
    }

    fn diameter(&self) -> Option<u32> {
        self.inner.diameter()
    }

    /// Four-point constant; exact unless both `samples` and `seed` are given.
    #[pyo3(signature = (samples=None, seed=None))]
    fn delta(&self, py: Python<'_>, samples: Option<u64>, seed: Option<u64>) -> PyResult<f64> {
        let m = mode(samples, seed)?;
        let r = py.detach(|| coarse::four_point_delta(&self.inner, m)).map_err(err)?;
        Ok(r.delta4.to_f64())
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

#[pyclass(frozen)]
struct RootSystem {
    inner: rootsys::RootSystem,
}

#[pymethods]
impl RootSystem {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let (f, r) = rootsys::parse_system_name(name).map_err(err)?;
        Ok(RootSystem {
            inner: rootsys::build_root_system(f, r).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn roots(&self) -> Vec<String> {
        self.inner.roots().iter().map(|r| r.to_string()).collect()
    }

    fn simple_roots(&self) -> Vec<usize> {
        self.inner.simple_roots().to_vec()
    }

    fn rank2_class(&self, a: usize, b: usize) -> PyResult<String> {
        let n = self.inner.len();
        if a >= n || b >= n {
            return Err(PyValueError::new_err("root index out of range"));
        }
        Ok(self.inner.rank2_class_idx(a, b).to_string())
    }
}

/// Chevalley basis of the simple Lie algebra of a root system, with its
/// adjoint group elements.
#[pyclass(frozen)]
struct Chevalley {
    inner: ChevalleyZForm,
}

#[pymethods]
impl Chevalley {
    #[new]
    fn new(system: &RootSystem) -> PyResult<Self> {
        Ok(Chevalley {
            inner: chevalley::chevalley_basis(&system.inner).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn verify(&self) -> bool {
        chevalley::verify_basis(&self.inner).passed()
    }

    /// Factors `(i, j, N)` of `[x_α(t), x_β(u)]`, checked on `t, u ∈ [−grid, grid]`.
    #[pyo3(signature = (a, b, grid=3))]
    fn steinberg(&self, a: usize, b: usize, grid: i64) -> PyResult<Vec<(u32, u32, i64)>> {
        let g: Vec<i64> = (-grid..=grid).collect();
        let r = chevalley::steinberg_commutator(&self.inner, a, b, &g, ProductOrder::IncreasingHeight).map_err(err)?;
        Ok(r.factors.iter().map(|f| (f.i, f.j, f.n)).collect())
    }

    /// Image root and sign of `w_β x_α(t) w_β⁻¹`.
    fn weyl(&self, a: usize, b: usize, t: i64) -> PyResult<(String, i64)> {
        let r = chevalley::weyl_conjugation_check(&self.inner, a, b, t).map_err(err)?;
        Ok((r.image_root, r.sign))
    }

    /// Method name, length and rendering of a short word for `x_α(n)`.
    fn logword(&self, root: usize, n: BigInt) -> PyResult<(String, usize, String)> {
        if root >= self.inner.system().len() {
            return Err(PyValueError::new_err("root index out of range"));
        }
        let r = self.inner.logword(root, &n).map_err(err)?;
        Ok((format!("{:?}", r.method), r.length, r.word.render(self.inner.system())))
    }
}

fn order(d: i64) -> PyResult<QuadOrder> {
    QuadOrder::new(d).map_err(err)
}

/// Fundamental unit of the ring of integers of Q(√d) as `(a, b)` in the basis `(1, ω)`.
#[pyfunction]
fn fundamental_unit(d: i64) -> PyResult<(BigInt, BigInt)> {
    let u = numring::fundamental_unit(d).map_err(err)?;
    Ok((u.a, u.b))
}

/// Index of the ideal generated by `gens`, each given as `(a, b)`.
#[pyfunction]
fn ideal_norm(d: i64, gens: Vec<(BigInt, BigInt)>) -> PyResult<BigInt> {
    let o = order(d)?;
    let gens: Vec<_> = gens.into_iter().map(|(a, b)| o.elem(a, b)).collect();
    numring::ideal_norm(o, &gens).map_err(err)
}

/// `(ideal_index, k, evaluates)` for the stubborn witness of `upper(λ)^k`.
#[pyfunction]
#[pyo3(signature = (d, lam=(BigInt::from(1), BigInt::from(0))))]
fn stubborn_witness(d: i64, lam: (BigInt, BigInt)) -> PyResult<(BigInt, BigInt, bool)> {
    let o = order(d)?;
    let w = numring::stubborn_witness(o, &o.elem(lam.0, lam.1)).map_err(err)?;
    Ok((w.ideal_index, w.k, w.evaluates))
}

/// `(depth, vertices, delta4)` rows for the exponential family on `base`.
#[pyfunction]
#[pyo3(signature = (base, depths, samples=1_000_000, seed=0, exact_limit=1_000_000_000))]
fn horoball_profile(
    py: Python<'_>,
    base: &Graph,
    depths: Vec<u32>,
    samples: u64,
    seed: u64,
    exact_limit: u64,
) -> PyResult<Vec<(u32, usize, f64)>> {
    let depth = depths.iter().copied().max().unwrap_or(0);
    let policy = ScanPolicy {
        exact_limit,
        samples,
        seed,
    };
    let rows = py
        .detach(|| {
            let fam = horoball::exponential_family(&base.inner, depth);
            horoball::delta_profile(&base.inner, &fam, &depths, policy)
        })
        .map_err(err)?;
    Ok(rows.iter().map(|r| (r.depth, r.vertices, r.delta.delta4.to_f64())).collect())
}

/// Name and JSON pseudocharacter report of each built-in corpus instance.
#[pyfunction]
fn pseudochar_corpus(py: Python<'_>) -> PyResult<Vec<(String, String)>> {
    let reports = py
        .detach(|| {
            action::pseudochar_corpus()?
                .into_iter()
                .map(|inst| Ok((inst.name.clone(), inst.report()?)))
                .collect::<geogt_core::Result<Vec<_>>>()
        })
        .map_err(err)?;
    reports.into_iter().map(|(n, r)| Ok((n, to_json(&r)?))).collect()
}

/// Diameter of SL(2, Z/p) over its upper and lower unipotent subgroups.
#[pyfunction]
#[pyo3(signature = (p, max_order=1_000_000))]
fn bounded_generation(p: u64, max_order: usize) -> PyResult<Option<u32>> {
    let (u, l) = action::sl2_unipotents(p);
    let gens = [u.clone(), l.clone()].concat();
    let r = action::bounded_generation_diameter(&gens, &[u, l], max_order).map_err(err)?;
    Ok(r.diameter)
}

/// JSON bounds report for two paths of length `len` mapped into a path.
#[pyfunction]
#[pyo3(signature = (len=40))]
fn two_lines_fiber(py: Python<'_>, len: usize) -> PyResult<String> {
    if len < 2 {
        return Err(PyValueError::new_err("len must be at least 2"));
    }
    let inst = coarse::two_lines_instance(len);
    let b = py
        .detach(|| {
            let f = inst.build(100)?;
            coarse::fiber_bounds(&f, &inst.x, DeltaMode::Exact)
        })
        .map_err(err)?;
    to_json(&b)
}

#[pymodule]
fn geogt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Graph>()?;
    m.add_class::<RootSystem>()?;
    m.add_class::<Chevalley>()?;
    m.add_function(wrap_pyfunction!(fundamental_unit, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_norm, m)?)?;
    m.add_function(wrap_pyfunction!(stubborn_witness, m)?)?;
    m.add_function(wrap_pyfunction!(horoball_profile, m)?)?;
    m.add_function(wrap_pyfunction!(pseudochar_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(bounded_generation, m)?)?;
    m.add_function(wrap_pyfunction!(two_lines_fiber, m)?)?;
    Ok(())
}
