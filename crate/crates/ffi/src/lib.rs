//! C interface to conelab.
//!
//! Every function returns a [`ConelabStatus`]. Results are written through out
//! pointers, which are left untouched on failure. Handles are opaque and owned
//! by the caller once returned; release them with the matching `_free`.
//! The message of the most recent failure on the calling thread is available
//! from [`conelab_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use conelab::geometry::{NormSpec, Point};
use conelab::lab::parse_body;
use conelab::{
    cone_over_base, estimate_thickness, make_body, max_chord, mlur_modulus, order_interval, rho_both, thickness, Body,
    BodyRecipe, ChordSearch, ConeOverBase, ConvexBody, DistanceMode, LabError, LiftedPoint, SampleBudget,
};

/// A convex base body.
pub struct ConelabBody {
    body: Body,
}

/// The cone over a base body with a chosen norm.
pub struct ConelabCone {
    cone: ConeOverBase,
}

/// Status codes. Values 1 to 18 match the `error_code` column of conelab reports.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConelabStatus {
    Ok = 0,
    DimensionMismatch = 1,
    NonFinite = 2,
    Infeasible = 3,
    Unbounded = 4,
    Unsupported = 5,
    Inconsistent = 6,
    Convergence = 7,
    NotInterior = 8,
    NotInCone = 9,
    NotInBody = 10,
    NotExtreme = 11,
    NotOnSphere = 12,
    InvalidParameter = 13,
    InvalidRecipe = 14,
    NeedsSamplingBudget = 15,
    DegenerateRegion = 16,
    Config = 17,
    Io = 18,
    NullPointer = 100,
    InvalidUtf8 = 101,
    BufferTooSmall = 102,
    Panic = 103,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConelabNorm {
    L1 = 0,
    L2 = 1,
    Linf = 2,
}

/// How two one-sided interval distances combine.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConelabMode {
    /// Larger of the two one-sided distances.
    Max = 0,
    /// Smaller of the two.
    Min = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(ConelabStatus, String);

impl From<LabError> for Fail {
    fn from(e: LabError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn status_of(e: &LabError) -> ConelabStatus {
    use ConelabStatus::*;
    const TABLE: [ConelabStatus; 18] = [
        DimensionMismatch,
        NonFinite,
        Infeasible,
        Unbounded,
        Unsupported,
        Inconsistent,
        Convergence,
        NotInterior,
        NotInCone,
        NotInBody,
        NotExtreme,
        NotOnSphere,
        InvalidParameter,
        InvalidRecipe,
        NeedsSamplingBudget,
        DegenerateRegion,
        Config,
        Io,
    ];
    TABLE[(e.code() - 1) as usize]
}

fn null(what: &str) -> Fail {
    Fail(ConelabStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, record any failure and turn panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ConelabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ConelabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ConelabStatus::Panic
        }
    }
}

unsafe fn doubles<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn point(p: *const f64, len: usize, what: &str) -> Result<Point, Fail> {
    Ok(Point::new(doubles(p, len, what)?.to_vec())?)
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn norm_of(n: ConelabNorm) -> NormSpec {
    match n {
        ConelabNorm::L1 => NormSpec::L1,
        ConelabNorm::L2 => NormSpec::L2,
        ConelabNorm::Linf => NormSpec::Linf,
    }
}

fn boxed<T>(value: T, slot: &mut *mut T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Build a body from a TOML document: a catalog recipe with `kind`, or bare
/// `hrep` rows or `vrep` points.
///
/// # Safety
/// `recipe` must be a valid NUL-terminated string; `out_body` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_body_from_recipe(recipe: *const c_char, out_body: *mut *mut ConelabBody) -> ConelabStatus {
    guard(|| {
        if recipe.is_null() {
            return Err(null("recipe"));
        }
        let text = CStr::from_ptr(recipe).to_str().map_err(|e| Fail(ConelabStatus::InvalidUtf8, e.to_string()))?;
        let slot = out(out_body, "out_body")?;
        let body = make_body(&parse_body(text)?)?;
        boxed(ConelabBody { body }, slot);
        Ok(())
    })
}

/// Build the polytope `{x : a·x ≤ b}` from `rows` rows of `dim + 1` doubles
/// laid out as `a₁ … a_dim b`, row-major.
///
/// # Safety
/// `rows` must point at `n_rows * (dim + 1)` doubles; `out_body` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_body_from_hrep(
    rows: *const f64,
    n_rows: usize,
    dim: usize,
    out_body: *mut *mut ConelabBody,
) -> ConelabStatus {
    guard(|| {
        let width = dim + 1;
        let flat = doubles(rows, n_rows * width, "rows")?;
        let slot = out(out_body, "out_body")?;
        let recipe = BodyRecipe::HrepBody { rows: flat.chunks(width).map(<[f64]>::to_vec).collect() };
        boxed(ConelabBody { body: make_body(&recipe)? }, slot);
        Ok(())
    })
}

/// Dimension of the space the body lives in, or 0 for a null handle.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn conelab_body_dim(body: *const ConelabBody) -> usize {
    body.as_ref().map_or(0, |b| b.body.dim())
}

/// # Safety
/// `body` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conelab_body_free(body: *mut ConelabBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// The cone over a copy of `body`, measured with `norm` on the base space.
///
/// # Safety
/// `body` must be a live handle; `out_cone` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_cone_new(
    body: *const ConelabBody,
    norm: ConelabNorm,
    out_cone: *mut *mut ConelabCone,
) -> ConelabStatus {
    guard(|| {
        let body = body.as_ref().ok_or_else(|| null("body"))?;
        let slot = out(out_cone, "out_cone")?;
        let cone = cone_over_base(body.body.clone(), norm_of(norm))?;
        boxed(ConelabCone { cone }, slot);
        Ok(())
    })
}

/// # Safety
/// `cone` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conelab_cone_free(cone: *mut ConelabCone) {
    if !cone.is_null() {
        drop(Box::from_raw(cone));
    }
}

/// Vertices of the order interval between 0 and `z = (t, x₁, …, x_dim)`.
///
/// Writes up to `capacity` vertices of `dim + 1` doubles each into `out_vertices` and
/// their count into `n_vertices`. When `capacity` is too small the count is
/// still reported and the status is `BufferTooSmall`; pass `capacity = 0` to
/// query the size. Curved bases give `Unsupported`.
///
/// # Safety
/// `z` must point at `z_len` doubles; `out_vertices` at `capacity * z_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn conelab_interval_vertices(
    cone: *const ConelabCone,
    z: *const f64,
    z_len: usize,
    out_vertices: *mut f64,
    capacity: usize,
    n_vertices: *mut usize,
) -> ConelabStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        let z = LiftedPoint::from_slice(doubles(z, z_len, "z")?);
        let count = out(n_vertices, "n_vertices")?;
        let iv = order_interval(&cone.cone, &z)?;
        let verts = iv
            .vertices()
            .ok_or_else(|| Fail(ConelabStatus::Unsupported, "interval over a curved base has no vertex list".into()))?;
        *count = verts.len();
        if verts.len() > capacity {
            return Err(Fail(ConelabStatus::BufferTooSmall, format!("{} vertices do not fit in {capacity}", verts.len())));
        }
        if out_vertices.is_null() {
            return Err(null("out_vertices"));
        }
        let dst = slice::from_raw_parts_mut(out_vertices, verts.len() * z_len);
        for (chunk, v) in dst.chunks_mut(z_len).zip(verts) {
            chunk.copy_from_slice(v.as_slice());
        }
        Ok(())
    })
}

/// Thickness of the interval between 0 and `(1, x)`.
///
/// Exact over polytopes. Over curved bases, `budget > 0` allows a sampled
/// lower bound with the given seed, flagged by `*exact = 0`; with
/// `budget = 0` the call fails with `NeedsSamplingBudget`.
///
/// # Safety
/// `x` must point at `dim` doubles; `value` and `exact` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_thickness(
    cone: *const ConelabCone,
    x: *const f64,
    dim: usize,
    budget: u64,
    seed: u64,
    value: *mut f64,
    exact: *mut i32,
) -> ConelabStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        let z = LiftedPoint::hat(&point(x, dim, "x")?);
        let (value, exact) = (out(value, "value")?, out(exact, "exact")?);
        let (v, e) = match thickness(&cone.cone, &z) {
            Err(LabError::NeedsSamplingBudget) if budget > 0 => {
                (estimate_thickness(&cone.cone, &z, &SampleBudget::new(budget as usize, seed))?.value, 0)
            }
            other => (other?, 1),
        };
        *value = v;
        *exact = e;
        Ok(())
    })
}

/// Distance between the intervals under `(1, x)` and `(1, y)`. The budget and
/// seed act as in [`conelab_thickness`].
///
/// # Safety
/// `x` and `y` must point at `dim` doubles; `value` and `exact` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_rho(
    cone: *const ConelabCone,
    x: *const f64,
    y: *const f64,
    dim: usize,
    mode: ConelabMode,
    budget: u64,
    seed: u64,
    value: *mut f64,
    exact: *mut i32,
) -> ConelabStatus {
    guard(|| {
        let cone = cone.as_ref().ok_or_else(|| null("cone"))?;
        let zx = LiftedPoint::hat(&point(x, dim, "x")?);
        let zy = LiftedPoint::hat(&point(y, dim, "y")?);
        let (value, exact) = (out(value, "value")?, out(exact, "exact")?);
        let sampler = (budget > 0).then(|| SampleBudget::new(budget as usize, seed));
        let d = rho_both(&cone.cone, &zx, &zy, sampler.as_ref())?;
        *value = d.value(match mode {
            ConelabMode::Max => DistanceMode::MaxHausdorff,
            ConelabMode::Min => DistanceMode::MinOneSided,
        });
        *exact = i32::from(d.exact);
        Ok(())
    })
}

/// Length of the longest chord of the body whose midpoint is `x`.
///
/// # Safety
/// `x` must point at `dim` doubles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_max_chord(
    body: *const ConelabBody,
    x: *const f64,
    dim: usize,
    norm: ConelabNorm,
    value: *mut f64,
) -> ConelabStatus {
    guard(|| {
        let body = body.as_ref().ok_or_else(|| null("body"))?;
        let x = point(x, dim, "x")?;
        let value = out(value, "value")?;
        *value = max_chord(&body.body, &x, &norm_of(norm))?;
        Ok(())
    })
}

/// Rotundity modulus at the sphere point `x` for the offset `delta`.
///
/// # Safety
/// `x` must point at `dim` doubles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conelab_mlur_modulus(
    body: *const ConelabBody,
    x: *const f64,
    dim: usize,
    delta: f64,
    norm: ConelabNorm,
    value: *mut f64,
) -> ConelabStatus {
    guard(|| {
        let body = body.as_ref().ok_or_else(|| null("body"))?;
        let x = point(x, dim, "x")?;
        let value = out(value, "value")?;
        *value = mlur_modulus(&body.body, &x, delta, &norm_of(norm), &ChordSearch::default())?;
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn conelab_status_string(status: ConelabStatus) -> *const c_char {
    use ConelabStatus::*;
    let s: &'static CStr = match status {
        Ok => c"ok",
        DimensionMismatch => c"dimension mismatch",
        NonFinite => c"non-finite input",
        Infeasible => c"infeasible",
        Unbounded => c"unbounded",
        Unsupported => c"unsupported",
        Inconsistent => c"inconsistent representations",
        Convergence => c"no convergence",
        NotInterior => c"not an interior point",
        NotInCone => c"not in the cone",
        NotInBody => c"not in the body",
        NotExtreme => c"not an extreme point",
        NotOnSphere => c"not on the unit sphere",
        InvalidParameter => c"invalid parameter",
        InvalidRecipe => c"invalid recipe",
        NeedsSamplingBudget => c"needs a sampling budget",
        DegenerateRegion => c"degenerate region",
        Config => c"configuration error",
        Io => c"i/o error",
        NullPointer => c"null pointer",
        InvalidUtf8 => c"invalid utf-8",
        BufferTooSmall => c"buffer too small",
        Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn conelab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
