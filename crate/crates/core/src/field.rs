//! Vector-valued fields on the grid and their algebra.
//!
//! A [`VectorField3`] is one time slice of the map u: three real component
//! arrays over the collocation points, targeting ℝ³ ⊃ S². Pointwise
//! products (cross, dot) are evaluated in physical space; norms in Ḣ^s are
//! spectral sums, never finite differences. All operations are pure.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{HwmError, Result};
use crate::grid::SpectralGrid;

#[derive(Debug, Clone)]
pub struct VectorField3 {
    grid: Arc<SpectralGrid>,
    comps: [Vec<f64>; 3],
}

impl VectorField3 {
    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let m = grid.len();
        VectorField3 {
            grid,
            comps: [vec![0.0; m], vec![0.0; m], vec![0.0; m]],
        }
    }

    pub fn constant(grid: Arc<SpectralGrid>, value: [f64; 3]) -> Self {
        let m = grid.len();
        VectorField3 {
            grid,
            comps: [vec![value[0]; m], vec![value[1]; m], vec![value[2]; m]],
        }
    }

    pub fn from_components(
        grid: Arc<SpectralGrid>,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
    ) -> Result<Self> {
        let m = grid.len();
        if x.len() != m || y.len() != m || z.len() != m {
            return Err(HwmError::domain(format!(
                "component length mismatch: grid has {m} points"
            )));
        }
        Ok(VectorField3 {
            grid,
            comps: [x, y, z],
        })
    }

    /// Sample an analytic map at the collocation points.
    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64) -> [f64; 3]) -> Self {
        let mut out = VectorField3::zeros(grid.clone());
        for (j, &x) in grid.positions().iter().enumerate() {
            let v = f(x);
            out.comps[0][j] = v[0];
            out.comps[1][j] = v[1];
            out.comps[2][j] = v[2];
        }
        out
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.comps[i]
    }

    /// Pointwise 3-vector at sample j.
    pub fn at(&self, j: usize) -> [f64; 3] {
        [self.comps[0][j], self.comps[1][j], self.comps[2][j]]
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.is_finite()))
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(HwmError::GridMismatch);
        }
        Ok(())
    }

    /// Forward transform of each component (normalized coefficients).
    pub fn spectra(&self) -> [Vec<Complex64>; 3] {
        [
            self.grid.forward(&self.comps[0]),
            self.grid.forward(&self.comps[1]),
            self.grid.forward(&self.comps[2]),
        ]
    }

    /// Rebuild a field from component spectra, enforcing realness.
    pub fn from_spectra(grid: Arc<SpectralGrid>, spectra: &[Vec<Complex64>; 3]) -> Result<Self> {
        let x = grid.inverse(&spectra[0])?;
        let y = grid.inverse(&spectra[1])?;
        let z = grid.inverse(&spectra[2])?;
        VectorField3::from_components(grid, x, y, z)
    }

    /// Apply an in-place edit to each component spectrum and transform back.
    pub fn map_spectral(&self, edit: impl Fn(&mut Vec<Complex64>)) -> Result<Self> {
        let mut spectra = self.spectra();
        for s in &mut spectra {
            edit(s);
        }
        VectorField3::from_spectra(self.grid.clone(), &spectra)
    }

    // ── pointwise algebra ───────────────────────────────────────────────

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for v in comp.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// self + c·other, fused (the inner loop of every integrator).
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let mut out = self.clone();
        for i in 0..3 {
            for (a, &b) in out.comps[i].iter_mut().zip(other.comps[i].iter()) {
                *a = f(*a, b);
            }
        }
        Ok(out)
    }

    /// Pointwise ℝ³ cross product a × b on the collocation grid.
    pub fn cross(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let m = self.len();
        let mut out = VectorField3::zeros(self.grid.clone());
        let [ax, ay, az] = &self.comps;
        let [bx, by, bz] = &other.comps;
        for j in 0..m {
            out.comps[0][j] = ay[j] * bz[j] - az[j] * by[j];
            out.comps[1][j] = az[j] * bx[j] - ax[j] * bz[j];
            out.comps[2][j] = ax[j] * by[j] - ay[j] * bx[j];
        }
        Ok(out)
    }

    /// Pointwise dot product as a scalar sample vector.
    pub fn dot(&self, other: &Self) -> Result<Vec<f64>> {
        self.check_same_grid(other)?;
        let m = self.len();
        let mut out = vec![0.0; m];
        for j in 0..m {
            let a = self.at(j);
            let b = other.at(j);
            out[j] = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        }
        Ok(out)
    }

    /// Cross product with 3/2-rule anti-aliasing: both factors are
    /// zero-padded to 3M/2 modes, multiplied on the fine grid, and the
    /// product is truncated back to M modes. Off by default in the solver;
    /// the quadratic nonlinearity aliases only near the resolution limit.
    pub fn cross_dealiased(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let m = self.len();
        let m_fine = 3 * m / 2;
        let fine = SpectralGrid::new(self.grid.box_length(), m_fine)?;
        let a_fine = self.pad_to(&fine)?;
        let b_fine = other.pad_to(&fine)?;
        let prod_fine = a_fine.cross(&b_fine)?;
        prod_fine.truncate_to(&self.grid)
    }

    /// Zero-pad the spectrum onto a finer grid of the same box length.
    fn pad_to(&self, fine: &Arc<SpectralGrid>) -> Result<Self> {
        let m = self.len();
        let mf = fine.len();
        assert!(mf >= m && fine.box_length() == self.grid.box_length());
        let spectra = self.spectra();
        let mut padded: [Vec<Complex64>; 3] = [
            vec![Complex64::new(0.0, 0.0); mf],
            vec![Complex64::new(0.0, 0.0); mf],
            vec![Complex64::new(0.0, 0.0); mf],
        ];
        for i in 0..3 {
            for j in 0..m {
                let k = if j < m / 2 { j as i64 } else { j as i64 - m as i64 };
                let jf = if k >= 0 { k as usize } else { (mf as i64 + k) as usize };
                padded[i][jf] = spectra[i][j];
            }
        }
        VectorField3::from_spectra(fine.clone(), &padded)
    }

    /// Drop modes above the coarse grid's band (inverse of `pad_to`).
    fn truncate_to(&self, coarse: &Arc<SpectralGrid>) -> Result<Self> {
        let mf = self.len();
        let m = coarse.len();
        assert!(mf >= m && coarse.box_length() == self.grid.box_length());
        let spectra = self.spectra();
        let mut cut: [Vec<Complex64>; 3] = [
            vec![Complex64::new(0.0, 0.0); m],
            vec![Complex64::new(0.0, 0.0); m],
            vec![Complex64::new(0.0, 0.0); m],
        ];
        for i in 0..3 {
            for j in 0..m {
                let k = if j < m / 2 { j as i64 } else { j as i64 - m as i64 };
                let jf = if k >= 0 { k as usize } else { (mf as i64 + k) as usize };
                cut[i][j] = spectra[i][jf];
            }
        }
        VectorField3::from_spectra(coarse.clone(), &cut)
    }

    // ── norms and geometry ──────────────────────────────────────────────

    /// L² norm over all three components, h·Σ|u(x)|² under the periodic
    /// trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        let mut acc = 0.0;
        for c in &self.comps {
            for v in c {
                acc += v * v;
            }
        }
        (h * acc).sqrt()
    }

    /// Pointwise-Euclidean sup norm max_x |u(x)|.
    pub fn linf_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.len() {
            let v = self.at(j);
            best = best.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        }
        best
    }

    /// Homogeneous Sobolev norm (L·Σ_k |ξ_k|^{2s} |f̂_k|²)^{1/2} summed over
    /// components. `s = 0` reduces to the L² norm; `s` admissible in
    /// [0, 3/2].
    pub fn hs_norm(&self, s: f64) -> f64 {
        assert!(
            (0.0..=1.5).contains(&s),
            "hs_norm exponent must lie in [0, 3/2], got {s}"
        );
        let l = self.grid.box_length();
        let mut acc = 0.0;
        for c in &self.comps {
            let coeffs = self.grid.forward(c);
            for (j, ck) in coeffs.iter().enumerate() {
                let xi = self.grid.wavenumber(j).abs();
                let w = if xi == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    xi.powf(2.0 * s)
                };
                acc += w * ck.norm_sqr();
            }
        }
        (l * acc).sqrt()
    }

    /// max_x | |u(x)|² − 1 |, the distance of the slice from the unit
    /// sphere in the target.
    pub fn sphere_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.len() {
            let v = self.at(j);
            let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            worst = worst.max((n2 - 1.0).abs());
        }
        worst
    }

    /// Pointwise projection onto the unit sphere. Only used by the optional
    /// projected-flow variant; the regularized flow itself leaves S².
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for j in 0..self.len() {
            let v = self.at(j);
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.0 {
                out.comps[0][j] = v[0] / n;
                out.comps[1][j] = v[1] / n;
                out.comps[2][j] = v[2] / n;
            }
        }
        out
    }
}

/// Pseudo-random real field with spectrum supported on |k| ≤ `max_mode`
/// (in integer mode numbers, Nyquist excluded), reproducible from `seed`.
/// Coefficient amplitudes fall off like 1/(1+|k|) so every Sobolev norm in
/// play is O(1).
pub fn random_band_limited(
    grid: &Arc<SpectralGrid>,
    max_mode: usize,
    seed: u64,
) -> VectorField3 {
    let m = grid.len();
    let kmax = max_mode.min(m / 2 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps: [Vec<f64>; 3] = [vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    for comp in &mut comps {
        // build cosine/sine series with decaying random amplitudes
        let mut terms: Vec<(f64, f64, f64)> = Vec::new(); // (k, a_cos, a_sin)
        for k in 0..=kmax {
            let w = 1.0 / (1.0 + k as f64);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            terms.push((k as f64, w * a, w * b));
        }
        let base = 2.0 * std::f64::consts::PI / grid.box_length();
        for (j, slot) in comp.iter_mut().enumerate() {
            let x = grid.position(j);
            let mut v = 0.0;
            for &(k, ac, as_) in &terms {
                let phase = base * k * x;
                v += ac * phase.cos() + as_ * phase.sin();
            }
            *slot = v;
        }
    }
    VectorField3 {
        grid: grid.clone(),
        comps,
    }
}

/// Random field normalized pointwise onto the unit sphere around a base
/// direction; used where a sphere-valued sample is needed.
pub fn random_sphere_valued(grid: &Arc<SpectralGrid>, max_mode: usize, seed: u64) -> VectorField3 {
    let raw = random_band_limited(grid, max_mode, seed);
    let mut shifted = raw.scale(0.5);
    let m = grid.len();
    for j in 0..m {
        shifted.comps[2][j] += 1.5; // keep away from the origin
    }
    shifted.normalized()
}

/// A time-ordered sequence of slices produced by one solver run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub slices: Vec<VectorField3>,
    pub config: crate::solver::SolverConfig,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.slices[0].grid()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Uniform spacing of the stored samples.
    pub fn output_dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn initial(&self) -> &VectorField3 {
        &self.slices[0]
    }

    pub fn terminal(&self) -> &VectorField3 {
        &self.slices[self.len() - 1]
    }
}
