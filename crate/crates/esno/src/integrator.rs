//! Grids, boundary conditions, semi-discrete residual assembly and
//! SSP-RK3 time stepping; 2D runs sweep the 1D pipeline dimension by
//! dimension and sum the directional tendencies.

use rayon::prelude::*;

use crate::ecflux::{ec_flux_line, entropy_flux_2p};
use crate::error::{CellIndex, Error, Result};
use crate::esflux::{esno_flux, gate_flux, interface_entropy_flux, InterfaceRecord, JumpVariable};
use crate::models::{Axis, SystemModel, MAX_COMPONENTS};
use crate::reconstruction::nonoscillatory_flux_line;
use crate::scheme::FluxSchemeConfig;

/// One coordinate axis of a structured grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub dx: f64,
}

impl AxisSpec {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Parameter {
                name: "n_cells",
                reason: format!("need at least 4 cells, got {n}"),
            });
        }
        let dx = (x_max - x_min) / n as f64;
        if !(dx > 0.0) {
            return Err(Error::Parameter {
                name: "domain",
                reason: format!("empty axis [{x_min}, {x_max}]"),
            });
        }
        Ok(AxisSpec { x_min, x_max, n, dx })
    }

    /// Center of interior cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    Transmissive,
    Reflective,
}

// ---------------------------------------------------------------------------
// 1D field

#[derive(Debug, Clone)]
pub struct Field1d {
    pub axis: AxisSpec,
    pub ghost: usize,
    pub m: usize,
    pub bc: BoundaryKind,
    pub time: f64,
    data: Vec<f64>,
}

impl Field1d {
    pub fn new(axis: AxisSpec, ghost: usize, m: usize, bc: BoundaryKind) -> Self {
        let data = vec![0.0; (axis.n + 2 * ghost) * m];
        Field1d { axis, ghost, m, bc, time: 0.0, data }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Interior cell `i` (0..n).
    pub fn cell(&self, i: usize) -> &[f64] {
        let t = self.ghost + i;
        &self.data[t * self.m..(t + 1) * self.m]
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        let t = self.ghost + i;
        &mut self.data[t * self.m..(t + 1) * self.m]
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.axis.center(i)
    }

    /// Copy of the interior degrees of freedom (n * m values).
    pub fn interior_vec(&self) -> Vec<f64> {
        let (g, n, m) = (self.ghost, self.axis.n, self.m);
        self.data[g * m..(g + n) * m].to_vec()
    }

    pub fn set_interior(&mut self, dofs: &[f64]) {
        let (g, n, m) = (self.ghost, self.axis.n, self.m);
        self.data[g * m..(g + n) * m].copy_from_slice(dofs);
    }

    pub fn validate_interior(&self, model: &SystemModel) -> Result<()> {
        for i in 0..self.axis.n {
            model.validate_state(self.cell(i)).map_err(|e| Error::SolverAbort {
                time: self.time,
                cell: CellIndex::One(i),
                stage: None,
                source: Box::new(e),
            })?;
        }
        Ok(())
    }
}

/// Fills the ghost layers of a line of cells in place. `u` holds
/// `(n + 2 g) * m` values; reflective walls mirror the state and negate
/// the momentum component normal to the wall, if any.
fn fill_line_ghosts(u: &mut [f64], n: usize, g: usize, m: usize, bc: BoundaryKind, normal: Option<usize>) {
    for t in 0..g {
        let (dst_l, dst_r) = (g - 1 - t, g + n + t);
        let (src_l, src_r) = match bc {
            BoundaryKind::Periodic => (g + n - 1 - t, g + t),
            BoundaryKind::Transmissive => (g, g + n - 1),
            BoundaryKind::Reflective => (g + t, g + n - 1 - t),
        };
        for c in 0..m {
            u[dst_l * m + c] = u[src_l * m + c];
            u[dst_r * m + c] = u[src_r * m + c];
        }
        if bc == BoundaryKind::Reflective {
            if let Some(nc) = normal {
                u[dst_l * m + nc] = -u[dst_l * m + nc];
                u[dst_r * m + nc] = -u[dst_r * m + nc];
            }
        }
    }
}

/// Populates the ghost cells of a 1D field according to its boundary tag.
pub fn apply_boundary(field: &mut Field1d, model: &SystemModel) {
    let (n, g, m) = (field.axis.n, field.ghost, field.m);
    let normal = model.normal_momentum_component(Axis::X);
    fill_line_ghosts(&mut field.data, n, g, m, field.bc, normal);
}

// ---------------------------------------------------------------------------
// Interface fluxes of one line (shared by 1D fields and 2D sweeps)

/// Computes the gated interface fluxes of one line with ghosts filled.
/// Writes `(n + 1) * m` values; interface `j` sits between cells
/// `g + j - 1` and `g + j`. With `records` set, per-interface diagnostics
/// (selector mask, diffusion, entropy fluxes) are collected as well.
pub fn line_fluxes(
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    axis: Axis,
    u: &[f64],
    n: usize,
    g: usize,
    f_hat: &mut [f64],
    mut records: Option<&mut Vec<InterfaceRecord>>,
) -> Result<()> {
    scheme.validate()?;
    let m = model.components();
    if g < scheme.ghost_width() {
        return Err(Error::Config(format!(
            "scheme {} needs ghost width {}, grid provides {g}",
            scheme.render(),
            scheme.ghost_width()
        )));
    }
    let nf = (n + 1) * m;
    debug_assert_eq!(f_hat.len(), nf);

    let mut f_ec: Option<Vec<f64>> = None;
    let mut f_ns: Option<Vec<f64>> = None;
    if let Some(order) = scheme.ec_order {
        let mut buf = vec![0.0; nf];
        ec_flux_line(model, order, axis, u, n, g, &mut buf)?;
        f_ec = Some(buf);
    }
    if let Some(ns) = &scheme.ns {
        let mut buf = vec![0.0; nf];
        nonoscillatory_flux_line(model, ns, axis, u, n, g, &mut buf)?;
        f_ns = Some(buf);
    }

    // entropy variables per cell, needed for entropy-variable jumps and
    // for the entropy accounting of the diagnostics
    let need_v = matches!(scheme.selector.jump_variable, JumpVariable::Entropy) && scheme.gated();
    let need_records = records.is_some();
    let v_cells: Option<Vec<f64>> = if need_v || (need_records && scheme.ec_order.is_some()) {
        let total = n + 2 * g;
        let mut v = vec![0.0; total * m];
        for t in 0..total {
            let pair = model.entropy_pair(&u[t * m..(t + 1) * m])?;
            v[t * m..(t + 1) * m].copy_from_slice(&pair.v[..m]);
        }
        Some(v)
    } else {
        None
    };

    match (&f_ec, &f_ns) {
        (Some(ec), Some(ns)) => {
            for j in 0..=n {
                let (a, b) = (g + j - 1, g + j);
                let mut jump = [0.0; MAX_COMPONENTS];
                match scheme.selector.jump_variable {
                    JumpVariable::Conserved => {
                        for c in 0..m {
                            jump[c] = u[b * m + c] - u[a * m + c];
                        }
                    }
                    JumpVariable::Entropy => {
                        let v = v_cells.as_ref().expect("entropy variables computed");
                        for c in 0..m {
                            jump[c] = v[b * m + c] - v[a * m + c];
                        }
                    }
                }
                let span = j * m..(j + 1) * m;
                gate_flux(
                    &ec[span.clone()],
                    &ns[span.clone()],
                    &jump[..m],
                    &scheme.selector,
                    &mut f_hat[span.clone()],
                );
                if let Some(recs) = records.as_deref_mut() {
                    let mut rec =
                        esno_flux(&ec[span.clone()], &ns[span.clone()], &jump[..m], &scheme.selector);
                    fill_entropy_accounting(model, scheme, axis, u, m, j, g, &mut rec, v_cells.as_deref())?;
                    recs.push(rec);
                }
            }
        }
        (Some(ec), None) => {
            f_hat.copy_from_slice(ec);
            if let Some(recs) = records.as_deref_mut() {
                for j in 0..=n {
                    let span = j * m..(j + 1) * m;
                    let mut rec = esno_flux(&ec[span.clone()], &ec[span.clone()], &[0.0; MAX_COMPONENTS][..m], &scheme.selector);
                    fill_entropy_accounting(model, scheme, axis, u, m, j, g, &mut rec, v_cells.as_deref())?;
                    recs.push(rec);
                }
            }
        }
        (None, Some(ns)) => {
            f_hat.copy_from_slice(ns);
            if let Some(recs) = records.as_deref_mut() {
                for j in 0..=n {
                    let span = j * m..(j + 1) * m;
                    // no EC part: the record degenerates to the pure flux
                    let mut rec = esno_flux(&ns[span.clone()], &ns[span.clone()], &[0.0; MAX_COMPONENTS][..m], &scheme.selector);
                    rec.chi = (1u32 << m) - 1;
                    recs.push(rec);
                }
            }
        }
        (None, None) => unreachable!("validated above"),
    }
    Ok(())
}

/// q* of the matching EC order and q_hat = q* - vbar . (F* - F_hat).
fn fill_entropy_accounting(
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    axis: Axis,
    u: &[f64],
    m: usize,
    j: usize,
    g: usize,
    rec: &mut InterfaceRecord,
    v_cells: Option<&[f64]>,
) -> Result<()> {
    let Some(order) = scheme.ec_order else {
        return Ok(());
    };
    let p = order.half_order();
    let left = g + j - 1;
    let stencil = &u[(left + 1 - p) * m..(left + p + 1) * m];
    rec.q_star = entropy_flux_2p(model, stencil, p, axis)?;
    let (vl, vr);
    if let Some(v) = v_cells {
        vl = v[left * m..(left + 1) * m].to_vec();
        vr = v[(left + 1) * m..(left + 2) * m].to_vec();
    } else {
        vl = model.entropy_pair(&u[left * m..(left + 1) * m])?.v[..m].to_vec();
        vr = model.entropy_pair(&u[(left + 1) * m..(left + 2) * m])?.v[..m].to_vec();
    }
    interface_entropy_flux(rec, &vl, &vr);
    Ok(())
}

/// Locates the first non-physical cell of a line for error reports.
fn locate_bad_cell(model: &SystemModel, u: &[f64], n: usize, g: usize, m: usize) -> usize {
    for i in 0..n {
        let t = g + i;
        if model.validate_state(&u[t * m..(t + 1) * m]).is_err() {
            return i;
        }
    }
    0
}

/// Semi-discrete tendency L(u) = -(F_{i+1/2} - F_{i-1/2}) / dx over the
/// interior of a 1D field (ghosts must be filled). Optionally collects the
/// per-interface records for entropy diagnostics.
pub fn semi_discrete_rhs(
    field: &Field1d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    l_out: &mut [f64],
    records: Option<&mut Vec<InterfaceRecord>>,
) -> Result<()> {
    let (n, g, m, dx) = (field.axis.n, field.ghost, field.m, field.axis.dx);
    debug_assert_eq!(l_out.len(), n * m);
    let mut f_hat = vec![0.0; (n + 1) * m];
    line_fluxes(model, scheme, Axis::X, &field.data, n, g, &mut f_hat, records).map_err(|e| {
        match e {
            Error::NonPhysical { .. } => Error::SolverAbort {
                time: field.time,
                cell: CellIndex::One(locate_bad_cell(model, &field.data, n, g, m)),
                stage: None,
                source: Box::new(e),
            },
            other => other,
        }
    })?;
    for i in 0..n {
        for c in 0..m {
            l_out[i * m + c] = -(f_hat[(i + 1) * m + c] - f_hat[i * m + c]) / dx;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Time step control

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    /// dt = cfl * dx / sigma_max (2D: cfl / (sx/dx + sy/dy)).
    Cfl,
    /// dt = dx^(5/3), the accuracy-matched step of the convergence tables.
    AccuracyDt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControl {
    pub mode: TimeMode,
    pub cfl: f64,
    pub t_final: f64,
}

impl TimeControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Parameter {
                name: "cfl",
                reason: format!("must lie in (0, 1], got {}", self.cfl),
            });
        }
        if self.t_final < 0.0 {
            return Err(Error::Parameter {
                name: "t_final",
                reason: format!("must be non-negative, got {}", self.t_final),
            });
        }
        Ok(())
    }

    fn clip(&self, time: f64, dt: f64) -> f64 {
        let remaining = self.t_final - time;
        if dt >= remaining {
            remaining
        } else {
            dt
        }
    }
}

/// Stable (or accuracy-matched) time step for a 1D field, clipped to land
/// exactly on `t_final`.
pub fn compute_dt(field: &Field1d, model: &SystemModel, tc: &TimeControl) -> Result<f64> {
    tc.validate()?;
    let dx = field.axis.dx;
    let dt = match tc.mode {
        TimeMode::AccuracyDt => dx.powf(5.0 / 3.0),
        TimeMode::Cfl => {
            let mut sigma: f64 = 0.0;
            for i in 0..field.axis.n {
                sigma = sigma.max(model.max_wavespeed(field.cell(i), Axis::X)?);
            }
            if sigma == 0.0 {
                tc.cfl * dx
            } else {
                tc.cfl * dx / sigma
            }
        }
    };
    Ok(tc.clip(field.time, dt))
}

// ---------------------------------------------------------------------------
// SSP-RK3 (Shu-Osher form)

/// One SSP-RK3 step driven by an arbitrary tendency operator; the operator
/// receives the stage field (ghosts not yet filled) and the stage number.
pub fn ssp_rk3_step_with<F>(field: &mut Field1d, dt: f64, mut rhs: F) -> Result<()>
where
    F: FnMut(&mut Field1d, u8) -> Result<Vec<f64>>,
{
    if !(dt > 0.0) {
        return Err(Error::Parameter { name: "dt", reason: format!("must be positive, got {dt}") });
    }
    let u0 = field.interior_vec();
    let len = u0.len();

    let l0 = rhs(field, 1)?;
    let mut stage = vec![0.0; len];
    for i in 0..len {
        stage[i] = u0[i] + dt * l0[i];
    }
    field.set_interior(&stage);

    let l1 = rhs(field, 2)?;
    let u1 = field.interior_vec();
    for i in 0..len {
        stage[i] = 0.75 * u0[i] + 0.25 * (u1[i] + dt * l1[i]);
    }
    field.set_interior(&stage);

    let l2 = rhs(field, 3)?;
    let u2 = field.interior_vec();
    for i in 0..len {
        stage[i] = u0[i] / 3.0 + 2.0 / 3.0 * u2[i] + 2.0 / 3.0 * dt * l2[i];
    }
    field.set_interior(&stage);
    field.time += dt;
    Ok(())
}

fn tag_stage(e: Error, stage: u8, time: f64) -> Error {
    match e {
        Error::SolverAbort { cell, source, .. } => {
            Error::SolverAbort { time, cell, stage: Some(stage), source }
        }
        other => other,
    }
}

/// Advances a 1D field by one SSP-RK3 step of the full scheme pipeline.
pub fn ssp_rk3_step(
    field: &mut Field1d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    dt: f64,
) -> Result<()> {
    let t0 = field.time;
    let (n, m) = (field.axis.n, field.m);
    ssp_rk3_step_with(field, dt, |f, stage| {
        apply_boundary(f, model);
        let mut l = vec![0.0; n * m];
        semi_discrete_rhs(f, model, scheme, &mut l, None).map_err(|e| tag_stage(e, stage, t0))?;
        Ok(l)
    })?;
    field.validate_interior(model)
}

// ---------------------------------------------------------------------------
// 2D field

#[derive(Debug, Clone)]
pub struct Field2d {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub ghost: usize,
    pub m: usize,
    pub bc_x: BoundaryKind,
    pub bc_y: BoundaryKind,
    pub time: f64,
    data: Vec<f64>,
}

impl Field2d {
    pub fn new(
        x: AxisSpec,
        y: AxisSpec,
        ghost: usize,
        m: usize,
        bc_x: BoundaryKind,
        bc_y: BoundaryKind,
    ) -> Self {
        let data = vec![0.0; (x.n + 2 * ghost) * (y.n + 2 * ghost) * m];
        Field2d { x, y, ghost, m, bc_x, bc_y, time: 0.0, data }
    }

    fn stride(&self) -> usize {
        self.x.n + 2 * self.ghost
    }

    /// Interior cell (ix, iy).
    pub fn cell(&self, ix: usize, iy: usize) -> &[f64] {
        let t = (iy + self.ghost) * self.stride() + ix + self.ghost;
        &self.data[t * self.m..(t + 1) * self.m]
    }

    pub fn cell_mut(&mut self, ix: usize, iy: usize) -> &mut [f64] {
        let stride = self.stride();
        let t = (iy + self.ghost) * stride + ix + self.ghost;
        &mut self.data[t * self.m..(t + 1) * self.m]
    }

    pub fn interior_vec(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.x.n * self.y.n * self.m];
        for iy in 0..self.y.n {
            for ix in 0..self.x.n {
                let dst = (iy * self.x.n + ix) * self.m;
                out[dst..dst + self.m].copy_from_slice(self.cell(ix, iy));
            }
        }
        out
    }

    pub fn set_interior(&mut self, dofs: &[f64]) {
        let m = self.m;
        for iy in 0..self.y.n {
            for ix in 0..self.x.n {
                let src = (iy * self.x.n + ix) * m;
                self.cell_mut(ix, iy).copy_from_slice(&dofs[src..src + m]);
            }
        }
    }

    pub fn validate_interior(&self, model: &SystemModel) -> Result<()> {
        for iy in 0..self.y.n {
            for ix in 0..self.x.n {
                model.validate_state(self.cell(ix, iy)).map_err(|e| Error::SolverAbort {
                    time: self.time,
                    cell: CellIndex::Two(ix, iy),
                    stage: None,
                    source: Box::new(e),
                })?;
            }
        }
        Ok(())
    }
}

/// Fills both ghost layers of a 2D field: x ghosts row by row, then y
/// ghosts column by column (corners are not used by the sweeps).
pub fn apply_boundary_2d(field: &mut Field2d, model: &SystemModel) {
    let (nx, ny, g, m) = (field.x.n, field.y.n, field.ghost, field.m);
    let stride = field.stride();
    let normal_x = model.normal_momentum_component(Axis::X);
    let normal_y = model.normal_momentum_component(Axis::Y);
    // x direction: each interior row is contiguous
    for iy in 0..ny {
        let row = (iy + g) * stride * m;
        fill_line_ghosts(&mut field.data[row..row + stride * m], nx, g, m, field.bc_x, normal_x);
    }
    // y direction: gather/scatter strided columns over all x (incl. ghosts)
    let mut pencil = vec![0.0; (ny + 2 * g) * m];
    for tx in 0..stride {
        for ty in 0..ny + 2 * g {
            let src = (ty * stride + tx) * m;
            pencil[ty * m..(ty + 1) * m].copy_from_slice(&field.data[src..src + m]);
        }
        fill_line_ghosts(&mut pencil, ny, g, m, field.bc_y, normal_y);
        for ty in 0..ny + 2 * g {
            let dst = (ty * stride + tx) * m;
            field.data[dst..dst + m].copy_from_slice(&pencil[ty * m..(ty + 1) * m]);
        }
    }
}

/// Tendency of a 2D field: L = Lx + Ly with each directional sweep reusing
/// the 1D interface pipeline row/column-wise. `l_out` holds the interior
/// (y-major, x fastest). With `records`, x-sweep records (row by row) are
/// followed by y-sweep records (column by column).
pub fn semi_discrete_rhs_2d(
    field: &Field2d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    l_out: &mut [f64],
    mut records: Option<&mut Vec<InterfaceRecord>>,
) -> Result<()> {
    let (nx, ny, m) = (field.x.n, field.y.n, field.m);
    debug_assert_eq!(l_out.len(), nx * ny * m);
    let (dx, dy) = (field.x.dx, field.y.dx);

    // x sweeps: interior rows are contiguous slices of the storage
    let row_results: Vec<Result<Vec<f64>>> = if records.is_some() {
        (0..ny).map(|iy| x_sweep(field, model, scheme, iy, records.as_deref_mut())).collect()
    } else {
        (0..ny).into_par_iter().map(|iy| x_sweep(field, model, scheme, iy, None)).collect()
    };
    for (iy, res) in row_results.into_iter().enumerate() {
        let f_hat = res.map_err(|e| locate_2d(e, field, model, Some(iy), None))?;
        for ix in 0..nx {
            for c in 0..m {
                let dst = (iy * nx + ix) * m + c;
                l_out[dst] = -(f_hat[(ix + 1) * m + c] - f_hat[ix * m + c]) / dx;
            }
        }
    }

    // y sweeps: gather strided pencils
    let col_results: Vec<Result<Vec<f64>>> = if records.is_some() {
        (0..nx).map(|ix| y_sweep(field, model, scheme, ix, records.as_deref_mut())).collect()
    } else {
        (0..nx).into_par_iter().map(|ix| y_sweep(field, model, scheme, ix, None)).collect()
    };
    for (ix, res) in col_results.into_iter().enumerate() {
        let f_hat = res.map_err(|e| locate_2d(e, field, model, None, Some(ix)))?;
        for iy in 0..ny {
            for c in 0..m {
                let dst = (iy * nx + ix) * m + c;
                l_out[dst] -= (f_hat[(iy + 1) * m + c] - f_hat[iy * m + c]) / dy;
            }
        }
    }
    Ok(())
}

fn x_sweep(
    field: &Field2d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    iy: usize,
    records: Option<&mut Vec<InterfaceRecord>>,
) -> Result<Vec<f64>> {
    let (nx, g, m) = (field.x.n, field.ghost, field.m);
    let stride = field.stride();
    let row = (iy + g) * stride * m;
    let line = &field.data[row..row + stride * m];
    let mut f_hat = vec![0.0; (nx + 1) * m];
    line_fluxes(model, scheme, Axis::X, line, nx, g, &mut f_hat, records)?;
    Ok(f_hat)
}

fn y_sweep(
    field: &Field2d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    ix: usize,
    records: Option<&mut Vec<InterfaceRecord>>,
) -> Result<Vec<f64>> {
    let (ny, g, m) = (field.y.n, field.ghost, field.m);
    let stride = field.stride();
    let mut pencil = vec![0.0; (ny + 2 * g) * m];
    for ty in 0..ny + 2 * g {
        let src = (ty * stride + ix + g) * m;
        pencil[ty * m..(ty + 1) * m].copy_from_slice(&field.data[src..src + m]);
    }
    let mut f_hat = vec![0.0; (ny + 1) * m];
    line_fluxes(model, scheme, Axis::Y, &pencil, ny, g, &mut f_hat, records)?;
    Ok(f_hat)
}

fn locate_2d(
    e: Error,
    field: &Field2d,
    model: &SystemModel,
    row: Option<usize>,
    col: Option<usize>,
) -> Error {
    if let Error::NonPhysical { .. } = e {
        // scan the offending row/column for the first bad interior cell
        let (mut ix, mut iy) = (0, 0);
        if let Some(r) = row {
            iy = r;
            for i in 0..field.x.n {
                if model.validate_state(field.cell(i, r)).is_err() {
                    ix = i;
                    break;
                }
            }
        } else if let Some(c) = col {
            ix = c;
            for j in 0..field.y.n {
                if model.validate_state(field.cell(c, j)).is_err() {
                    iy = j;
                    break;
                }
            }
        }
        Error::SolverAbort {
            time: field.time,
            cell: CellIndex::Two(ix, iy),
            stage: None,
            source: Box::new(e),
        }
    } else {
        e
    }
}

/// Stable (or accuracy-matched) step for a 2D field: the CFL mode uses the
/// sum of the directional Courant numbers.
pub fn compute_dt_2d(field: &Field2d, model: &SystemModel, tc: &TimeControl) -> Result<f64> {
    tc.validate()?;
    let dt = match tc.mode {
        TimeMode::AccuracyDt => field.x.dx.min(field.y.dx).powf(5.0 / 3.0),
        TimeMode::Cfl => {
            let (mut sx, mut sy): (f64, f64) = (0.0, 0.0);
            for iy in 0..field.y.n {
                for ix in 0..field.x.n {
                    let u = field.cell(ix, iy);
                    sx = sx.max(model.max_wavespeed(u, Axis::X)?);
                    sy = sy.max(model.max_wavespeed(u, Axis::Y)?);
                }
            }
            let denom = sx / field.x.dx + sy / field.y.dx;
            if denom == 0.0 {
                tc.cfl * field.x.dx.min(field.y.dx)
            } else {
                tc.cfl / denom
            }
        }
    };
    Ok(tc.clip(field.time, dt))
}

/// One SSP-RK3 step of a 2D field with the summed directional tendencies.
pub fn step_2d(
    field: &mut Field2d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    dt: f64,
) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Parameter { name: "dt", reason: format!("must be positive, got {dt}") });
    }
    let t0 = field.time;
    let (nx, ny, m) = (field.x.n, field.y.n, field.m);
    let len = nx * ny * m;
    let rhs = |f: &mut Field2d, stage: u8| -> Result<Vec<f64>> {
        apply_boundary_2d(f, model);
        let mut l = vec![0.0; len];
        semi_discrete_rhs_2d(f, model, scheme, &mut l, None).map_err(|e| tag_stage(e, stage, t0))?;
        Ok(l)
    };

    let u0 = field.interior_vec();
    let l0 = rhs(field, 1)?;
    let mut stage = vec![0.0; len];
    for i in 0..len {
        stage[i] = u0[i] + dt * l0[i];
    }
    field.set_interior(&stage);

    let l1 = rhs(field, 2)?;
    let u1 = field.interior_vec();
    for i in 0..len {
        stage[i] = 0.75 * u0[i] + 0.25 * (u1[i] + dt * l1[i]);
    }
    field.set_interior(&stage);

    let l2 = rhs(field, 3)?;
    let u2 = field.interior_vec();
    for i in 0..len {
        stage[i] = u0[i] / 3.0 + 2.0 / 3.0 * u2[i] + 2.0 / 3.0 * dt * l2[i];
    }
    field.set_interior(&stage);
    field.time += dt;
    field.validate_interior(model)
}

// ---------------------------------------------------------------------------
// Run loops

fn effectively_done(time: f64, t_final: f64) -> bool {
    t_final - time <= 1e-12 * t_final.abs().max(1.0)
}

/// Steps a 1D field to `tc.t_final`; the observer runs after every
/// accepted step. Returns the number of steps taken.
pub fn run_1d(
    field: &mut Field1d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    tc: &TimeControl,
    mut observer: impl FnMut(&Field1d) -> Result<()>,
) -> Result<usize> {
    tc.validate()?;
    let mut steps = 0;
    while !effectively_done(field.time, tc.t_final) {
        let dt = compute_dt(field, model, tc)?;
        ssp_rk3_step(field, model, scheme, dt)?;
        steps += 1;
        observer(field)?;
    }
    Ok(steps)
}

/// Steps a 2D field to `tc.t_final`.
pub fn run_2d(
    field: &mut Field2d,
    model: &SystemModel,
    scheme: &FluxSchemeConfig,
    tc: &TimeControl,
    mut observer: impl FnMut(&Field2d) -> Result<()>,
) -> Result<usize> {
    tc.validate()?;
    let mut steps = 0;
    while !effectively_done(field.time, tc.t_final) {
        let dt = compute_dt_2d(field, model, tc)?;
        step_2d(field, model, scheme, dt)?;
        steps += 1;
        observer(field)?;
    }
    Ok(steps)
}
