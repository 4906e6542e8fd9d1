//! The glued approximate resolvent S = Ψ₁R₁Φ₁ + Ψ₂R₂Φ₂ and its residual
//! G = S(A − λ) − I, mode by mode on a uniform lattice.
//!
//! R₁ is the resolvent of the "double": the core [0, R_c + 1] reflected
//! about its right end, with Dirichlet conditions at both ends. R₂ is the
//! exact half-lattice Green function of the free end, which continues to
//! every sheet through its branch value.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::discretize::{assemble, ModeProblem, NodeLayout, Scheme};
use crate::error::{invalid, Error, Result};
use crate::modes::{ModeKind, ModeOperator};
use crate::numerics::{dense, SymTridiagonal};
use crate::spectral::{CrossSectionSpectrum, SpectralSurfacePoint};

use super::cutoff::{sample, Cutoff};
use super::kernel::LatticeKernel;

/// Distance from a double eigenvalue below which R₁ is refused.
pub const DOUBLE_GAP: f64 = 1e-8;

/// Mode operators whose potentials live in the core [0, R_c].
#[derive(Debug, Clone, PartialEq)]
pub struct CoreModel {
    modes: Vec<(ModeOperator, usize)>,
    core_radius: f64,
}

impl CoreModel {
    pub fn new(modes: &[ModeOperator], core_radius: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Empty("core model modes"));
        }
        if !(core_radius > 0.0 && core_radius.is_finite()) {
            return Err(invalid("core radius must be positive"));
        }
        let mut grouped: Vec<(ModeOperator, usize)> = Vec::new();
        for m in modes {
            if m.kind != ModeKind::Cylindrical {
                return Err(Error::Unsupported("parametrix for cusp ends".into()));
            }
            if m.potential.support_radius() > core_radius {
                return Err(Error::SupportBeyondScalingRadius {
                    support: m.potential.support_radius(),
                    radius: core_radius,
                });
            }
            match grouped.iter_mut().find(|(g, _)| g.same_operator(m)) {
                Some((_, k)) => *k += 1,
                None => grouped.push((m.clone(), 1)),
            }
        }
        Ok(Self {
            modes: grouped,
            core_radius,
        })
    }

    /// Free modes of a cross-section over a unit core.
    pub fn trivial(cross_section: &CrossSectionSpectrum) -> Result<Self> {
        let modes: Vec<ModeOperator> = cross_section
            .mode_values()
            .into_iter()
            .map(ModeOperator::free)
            .collect();
        Self::new(&modes, 1.0)
    }

    /// The same modes glued at a different radius.
    pub fn with_core_radius(&self, core_radius: f64) -> Result<Self> {
        let modes: Vec<ModeOperator> = self
            .modes
            .iter()
            .flat_map(|(m, k)| std::iter::repeat(m.clone()).take(*k))
            .collect();
        Self::new(&modes, core_radius)
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    /// Distinct mode operators with their multiplicities.
    pub fn modes(&self) -> &[(ModeOperator, usize)] {
        &self.modes
    }

    pub fn thresholds(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.modes.iter().map(|(m, _)| m.mu).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// Uniform lattice u_j = jh, j = 1..N, on (0, L) with Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametrixGrid {
    pub step: f64,
    pub length: f64,
}

impl ParametrixGrid {
    pub fn new(step: f64, length: f64) -> Result<Self> {
        if !(step > 0.0 && length > step) {
            return Err(invalid(
                "lattice step must be positive and below the length",
            ));
        }
        Ok(Self { step, length })
    }

    /// Lattice index of `x`, which must be a lattice point.
    fn index(&self, x: f64, what: &str) -> Result<usize> {
        let k = (x / self.step).round();
        if (k * self.step - x).abs() > 1e-9 * self.step.max(x.abs()) {
            return Err(invalid(format!(
                "{what} = {x} is not a multiple of the step {}",
                self.step
            )));
        }
        Ok(k as usize)
    }

    pub fn interior(&self) -> Result<usize> {
        Ok(self.index(self.length, "length")? - 1)
    }
}

/// Precomputed data of one mode: the operator, cutoffs and the double's eigenbasis.
#[derive(Debug, Clone)]
pub struct ModeParametrix {
    pub mode: ModeOperator,
    pub multiplicity: usize,
    operator: SymTridiagonal,
    /// Lattice index of s = 0 (node u = R_c).
    origin: usize,
    step: f64,
    phi: [Vec<f64>; 2],
    psi: [Vec<f64>; 2],
    double_values: Array1<f64>,
    double_vectors: Array2<f64>,
}

impl ModeParametrix {
    fn build(
        mode: &ModeOperator,
        multiplicity: usize,
        core_radius: f64,
        grid: &ParametrixGrid,
    ) -> Result<Self> {
        let n = grid.interior()?;
        let origin = grid.index(core_radius, "core radius")?;
        let half = grid.index(core_radius + 1.0, "core radius + 1")?;
        if half + 2 > n {
            return Err(Error::GridTooShort(format!(
                "L = {} must exceed R_c + 1",
                grid.length
            )));
        }
        let layout = NodeLayout::new(grid.length, n + 1, &[]);
        let op = assemble(&ModeProblem::plain(mode), &layout, Scheme::Fd2)?
            .real_symmetric()
            .ok_or_else(|| invalid("unscaled mode operator is not real symmetric"))?;

        // Double on (0, 2(R_c + 1)): node j (1-based) mirrors to 2·half − j.
        let nd = 2 * half - 1;
        let mirror = |j: usize| if j <= half { j } else { 2 * half - j };
        let mut a = Array2::<f64>::zeros((nd, nd));
        for j in 1..=nd {
            a[[j - 1, j - 1]] = op.diag[mirror(j) - 1];
            if j < nd {
                // Edge (j, j+1) mirrors to (m(j+1), m(j)).
                let e = if j < half { j } else { 2 * half - j - 1 };
                a[[j, j - 1]] = op.off[e - 1];
                a[[j - 1, j]] = op.off[e - 1];
            }
        }
        let (double_values, double_vectors) = dense::eigh(&a)?;

        let s: Vec<f64> = (1..=n)
            .map(|j| j as f64 * grid.step - core_radius)
            .collect();
        Ok(Self {
            mode: mode.clone(),
            multiplicity,
            operator: op,
            origin,
            step: grid.step,
            phi: [sample(Cutoff::Phi1, &s), sample(Cutoff::Phi2, &s)],
            psi: [sample(Cutoff::Psi1, &s), sample(Cutoff::Psi2, &s)],
            double_values,
            double_vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.operator.diag.len()
    }

    pub fn double_spectrum(&self) -> &Array1<f64> {
        &self.double_values
    }

    /// Real nodes u_j.
    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.dim()).map(|j| j as f64 * self.step).collect()
    }

    fn check_gap(&self, lambda: Complex64) -> Result<()> {
        match self
            .double_values
            .iter()
            .find(|&&e| (lambda - e).norm() < DOUBLE_GAP)
        {
            Some(_) => Err(Error::Singular(lambda)),
            None => Ok(()),
        }
    }

    /// R₁ entry between 0-based nodes i, j of the double.
    fn r1(&self, lambda: Complex64, i: usize, j: usize) -> Complex64 {
        let v = &self.double_vectors;
        self.double_values
            .iter()
            .enumerate()
            .map(|(k, &e)| v[[i, k]] * v[[j, k]] / (e - lambda))
            .sum()
    }

    /// R₂ entry between 0-based nodes i, j (zero on the core side).
    fn r2(&self, k: &LatticeKernel, i: usize, j: usize) -> Complex64 {
        let o = self.origin - 1;
        if i <= o || j <= o {
            return Complex64::new(0.0, 0.0);
        }
        k.entry(i - o, j - o)
    }

    fn lattice_kernel(&self, point: &SpectralSurfacePoint) -> Result<LatticeKernel> {
        let branch = point.branch_for(self.mode.mu).ok_or_else(|| {
            invalid(format!(
                "surface point does not track threshold {}",
                self.mode.mu
            ))
        })?;
        LatticeKernel::new(branch, self.step)
    }

    /// Dense S on all interior nodes.
    pub fn s_matrix(&self, point: &SpectralSurfacePoint) -> Result<Array2<Complex64>> {
        let lambda = point.lambda();
        self.check_gap(lambda)?;
        let k = self.lattice_kernel(point)?;
        let n = self.dim();
        let nd = self.double_values.len();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut v = Complex64::new(0.0, 0.0);
                        if self.psi[0][i] != 0.0 && self.phi[0][j] != 0.0 && i < nd && j < nd {
                            v += self.psi[0][i] * self.r1(lambda, i, j) * self.phi[0][j];
                        }
                        if self.psi[1][i] != 0.0 && self.phi[1][j] != 0.0 {
                            v += self.psi[1][i] * self.r2(&k, i, j) * self.phi[1][j];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let s = Array2::from_shape_fn((n, n), |(i, j)| rows[i][j]);
        Ok(s)
    }

    /// G = S(A − λ) − I, by definition.
    pub fn g_matrix(&self, point: &SpectralSurfacePoint) -> Result<Array2<Complex64>> {
        let s = self.s_matrix(point)?;
        let lambda = point.lambda();
        let n = self.dim();
        let a = &self.operator;
        let mut g = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut v = s[[i, j]] * (a.diag[j] - lambda);
                if j > 0 {
                    v += s[[i, j - 1]] * a.off[j - 1];
                }
                if j + 1 < n {
                    v += s[[i, j + 1]] * a.off[j];
                }
                if i == j {
                    v -= 1.0;
                }
                g[[i, j]] = v;
            }
        }
        Ok(g)
    }

    /// Rows where the commutator [Φ_c, A] is nonzero.
    fn commutator_rows(&self, c: usize) -> Vec<usize> {
        let f = &self.phi[c];
        let n = f.len();
        (0..n)
            .filter(|&i| (i > 0 && f[i] != f[i - 1]) || (i + 1 < n && f[i] != f[i + 1]))
            .collect()
    }

    /// I + Σ C_a Ψ_b R_b restricted to commutator rows: same determinant and
    /// null directions as I + G, at a fraction of the size.
    pub fn compressed(&self, point: &SpectralSurfacePoint) -> Result<Array2<Complex64>> {
        let lambda = point.lambda();
        self.check_gap(lambda)?;
        let k = self.lattice_kernel(point)?;
        let rows = [self.commutator_rows(0), self.commutator_rows(1)];
        let a = &self.operator;
        let n = self.dim();
        let nd = self.double_values.len();
        let size = rows[0].len() + rows[1].len();
        let mut m = Array2::<Complex64>::eye(size);
        let offsets = [0, rows[0].len()];
        for ca in 0..2 {
            for (ri, &i) in rows[ca].iter().enumerate() {
                // Row i of C_a: (Φ_i − Φ_{i±1}) A_{i,i±1} at columns i ± 1.
                let mut stencil = Vec::with_capacity(2);
                if i > 0 {
                    stencil.push((
                        i - 1,
                        (self.phi[ca][i] - self.phi[ca][i - 1]) * a.off[i - 1],
                    ));
                }
                if i + 1 < n {
                    stencil.push((i + 1, (self.phi[ca][i] - self.phi[ca][i + 1]) * a.off[i]));
                }
                for cb in 0..2 {
                    for (rj, &j) in rows[cb].iter().enumerate() {
                        let mut v = Complex64::new(0.0, 0.0);
                        for &(col, coef) in &stencil {
                            if coef == 0.0 || self.psi[cb][col] == 0.0 {
                                continue;
                            }
                            let r = if cb == 0 {
                                if col < nd && j < nd {
                                    self.r1(lambda, col, j)
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                            } else {
                                self.r2(&k, col, j)
                            };
                            v += coef * self.psi[cb][col] * r;
                        }
                        m[[offsets[ca] + ri, offsets[cb] + rj]] += v;
                    }
                }
            }
        }
        Ok(m)
    }
}

/// All mode blocks of a core model on a lattice.
#[derive(Debug, Clone)]
pub struct Parametrix {
    pub grid: ParametrixGrid,
    pub blocks: Vec<ModeParametrix>,
}

impl Parametrix {
    pub fn new(core: &CoreModel, grid: ParametrixGrid) -> Result<Self> {
        let blocks = core
            .modes()
            .par_iter()
            .map(|(m, k)| ModeParametrix::build(m, *k, core.core_radius(), &grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, blocks })
    }
}

/// A block-diagonal kernel matrix, one block per distinct mode.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub nodes: Vec<f64>,
    pub blocks: Vec<KernelBlock>,
}

#[derive(Debug, Clone)]
pub struct KernelBlock {
    pub mode: String,
    pub multiplicity: usize,
    pub matrix: Array2<Complex64>,
}

impl KernelMatrix {
    /// Singular values of the whole operator (blocks repeated by multiplicity), descending.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            let s = dense::singular_values(&b.matrix)?;
            for _ in 0..b.multiplicity {
                out.extend_from_slice(&s);
            }
        }
        out.sort_by(|a, b| b.total_cmp(a));
        Ok(out)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }
}

fn build_kernel(
    point: &SpectralSurfacePoint,
    core: &CoreModel,
    grid: ParametrixGrid,
    f: impl Fn(&ModeParametrix, &SpectralSurfacePoint) -> Result<Array2<Complex64>>,
) -> Result<KernelMatrix> {
    let p = Parametrix::new(core, grid)?;
    let nodes = p.blocks[0].nodes();
    let blocks = p
        .blocks
        .iter()
        .map(|b| {
            Ok(KernelBlock {
                mode: b.mode.label.clone(),
                multiplicity: b.multiplicity,
                matrix: f(b, point)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelMatrix { nodes, blocks })
}

pub fn assemble_parametrix(
    point: &SpectralSurfacePoint,
    core: &CoreModel,
    grid: ParametrixGrid,
) -> Result<KernelMatrix> {
    build_kernel(point, core, grid, ModeParametrix::s_matrix)
}

pub fn residual_g(
    point: &SpectralSurfacePoint,
    core: &CoreModel,
    grid: ParametrixGrid,
) -> Result<KernelMatrix> {
    build_kernel(point, core, grid, ModeParametrix::g_matrix)
}

/// Largest k-range over which σ_{2k} ≤ ratio·σ_k holds, checked on singular
/// values above `floor`·σ₁. Returns the worst observed ratio.
pub fn decay_ratio(singular_values: &[f64], floor: f64) -> Option<f64> {
    let s0 = *singular_values.first()?;
    let resolved = singular_values
        .iter()
        .take_while(|&&s| s > floor * s0)
        .count();
    let mut worst: Option<f64> = None;
    for k in 1..=resolved {
        if 2 * k > singular_values.len() {
            break;
        }
        let r = singular_values[2 * k - 1] / singular_values[k - 1];
        worst = Some(worst.map_or(r, |w: f64| w.max(r)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::RadialPotential;
    use crate::spectral::{surface_point, Approach, Sheet};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point(lambda: Complex64, mu: f64, sheet: Sheet) -> SpectralSurfacePoint {
        surface_point(lambda, &[mu], &[sheet], Approach::Exact).unwrap()
    }

    #[test]
    fn double_reflects_operator() {
        let core = CoreModel::new(
            &[ModeOperator::cylindrical(
                0.0,
                RadialPotential::square_well(2.0, 0.5).unwrap(),
            )],
            1.0,
        )
        .unwrap();
        let p = Parametrix::new(&core, ParametrixGrid::new(0.05, 6.0).unwrap()).unwrap();
        let b = &p.blocks[0];
        // Eigenvectors of a reflection-symmetric matrix are even or odd.
        let nd = b.double_values.len();
        let v = b.double_vectors.column(0);
        for j in 0..nd {
            assert!((v[j] - v[nd - 1 - j]).abs() < 1e-10 || (v[j] + v[nd - 1 - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn deep_rows_are_pure_end_kernel() {
        let core = CoreModel::new(&[ModeOperator::free(0.0)], 1.0).unwrap();
        let p = Parametrix::new(&core, ParametrixGrid::new(0.05, 6.0).unwrap()).unwrap();
        let b = &p.blocks[0];
        let pt = point(c(-1.0, 0.0), 0.0, Sheet::Physical);
        let s = b.s_matrix(&pt).unwrap();
        let k = b.lattice_kernel(&pt).unwrap();
        let i = (3.0f64 / 0.05).round() as usize - 1;
        for j in 0..b.dim() {
            let expect = b.r2(&k, i, j) * b.phi[1][j];
            assert!((s[[i, j]] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn commutator_form_matches_definition_away_from_truncation() {
        let core = CoreModel::new(
            &[ModeOperator::cylindrical(
                0.0,
                RadialPotential::barrier(8.0, 1.0, 2.0).unwrap(),
            )],
            2.0,
        )
        .unwrap();
        let p = Parametrix::new(&core, ParametrixGrid::new(0.05, 8.0).unwrap()).unwrap();
        let b = &p.blocks[0];
        let pt = point(c(-1.0, 0.2), 0.0, Sheet::Physical);
        let g = b.g_matrix(&pt).unwrap();
        let k = b.lattice_kernel(&pt).unwrap();
        let n = b.dim();
        let nd = b.double_values.len();
        let a = &b.operator;
        // Σ Ψ_c R_c [Φ_c, A], entry by entry.
        for i in 0..n {
            for j in 0..n - 1 {
                let mut v = c(0.0, 0.0);
                for cc in 0..2 {
                    let f = &b.phi[cc];
                    for (col, coef) in [
                        (
                            j.wrapping_sub(1),
                            if j > 0 {
                                (f[j - 1] - f[j]) * a.off[j - 1]
                            } else {
                                0.0
                            },
                        ),
                        (
                            j + 1,
                            if j + 1 < n {
                                (f[j + 1] - f[j]) * a.off[j]
                            } else {
                                0.0
                            },
                        ),
                    ] {
                        if coef == 0.0 || b.psi[cc][i] == 0.0 {
                            continue;
                        }
                        let r = if cc == 0 {
                            if i < nd && col < nd {
                                b.r1(pt.lambda(), i, col)
                            } else {
                                c(0.0, 0.0)
                            }
                        } else {
                            b.r2(&k, i, col)
                        };
                        v += b.psi[cc][i] * r * coef;
                    }
                }
                assert!(
                    (g[[i, j]] - v).norm() < 1e-9,
                    "({i},{j}): {} vs {v}",
                    g[[i, j]]
                );
            }
        }
    }

    #[test]
    fn singular_near_double_eigenvalue() {
        let core = CoreModel::new(&[ModeOperator::free(0.0)], 1.0).unwrap();
        let p = Parametrix::new(&core, ParametrixGrid::new(0.05, 6.0).unwrap()).unwrap();
        let e = p.blocks[0].double_values[0];
        let pt = surface_point(c(e, 0.0), &[0.0], &[Sheet::Physical], Approach::Above).unwrap();
        assert!(matches!(p.blocks[0].s_matrix(&pt), Err(Error::Singular(_))));
    }

    #[test]
    fn decay_ratio_on_synthetic_values() {
        let s: Vec<f64> = (0..20).map(|k| 0.3f64.powi(k)).collect();
        assert!((decay_ratio(&s, 1e-12).unwrap() - 0.3).abs() < 1e-12);
    }
}
