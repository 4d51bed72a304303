//! Every tolerance and threshold used by the verification suite, with its
//! origin. Nothing numeric is asserted anywhere else without a name here.

// ── machine-precision class ─────────────────────────────────────────────

/// Transform round trip and exact algebraic identities (relative).
pub const ROUND_TRIP: f64 = 1e-12;

/// Imaginary residue allowed after an inverse transform of a Hermitian
/// spectrum, relative to 1 + max |Re|.
pub const IM_RESIDUE: f64 = 1e-12;

/// Per-mode agreement for multiplier algebra (heat semigroup, repeated
/// quarter-Laplacian vs half-Laplacian).
pub const PER_MODE: f64 = 1e-12;

/// Pointwise triple-product orthogonality dot(u, u × w) = 0.
pub const ORTHOGONALITY: f64 = 1e-12;

/// Plancherel identity and spectral-vs-physical norm agreement (relative).
pub const PLANCHEREL: f64 = 1e-10;

/// Operator composition residual: Hilbert∘derivative vs half-Laplacian on
/// band-limited fields (relative).
pub const COMPOSE_RESIDUAL: f64 = 1e-10;

/// Self-adjointness of the quarter-Laplacian pairing (relative).
pub const SELF_ADJOINT: f64 = 1e-12;

/// Pairing reformulation identity (cross-product pairing vs fractional
/// pairing), relative to 1 + norms.
pub const PAIRING_IDENTITY: f64 = 1e-10;

// ── initial data ────────────────────────────────────────────────────────

/// |Q| must be a unit vector to this absolute tolerance.
pub const UNIT_Q: f64 = 1e-14;

/// Sphere deviation allowed for constructed initial data.
pub const DATA_SPHERE_DEV: f64 = 1e-12;

/// Far-field residue |u0 − Q| outside the support of constructed data.
pub const DATA_FAR_FIELD: f64 = 1e-12;

/// Minimal fitted spectral decay exponent certifying grid-level smoothness.
pub const SPECTRAL_DECAY_MIN: f64 = 4.0;

// ── solver and diagnostics ──────────────────────────────────────────────

/// Maximum-principle slack: max|u|² ≤ 1 + MAX_PRINCIPLE_BASE + MAX_PRINCIPLE_DT2·dt².
/// The base covers the proved sharp bound; the dt² term covers the global
/// second-order error of the time discretization (constant measured on the
/// reference bump runs, then pinned with margin).
pub const MAX_PRINCIPLE_BASE: f64 = 1e-6;
pub const MAX_PRINCIPLE_DT2: f64 = 25.0;

/// Critical-energy monotonicity: per-step upward violation allowed,
/// relative to 1 + E_c(0).
pub const EC_MONOTONE: f64 = 1e-8;

/// Uniform Ḣ^{1/2} bound: sup_t ‖u‖ ≤ ‖u₀‖·(1 + H12_GROWTH).
pub const H12_GROWTH: f64 = 1e-6;

/// Picard fixed point vs marching solver, L² distance at the window end.
pub const PICARD_VS_EVOLVE: f64 = 1e-4;

/// Picard convergence: iteration stops once the X-norm difference falls
/// below this times (1 + X-norm of the heat iterate).
pub const PICARD_CONVERGED: f64 = 1e-12;

/// Minimal Richardson refinement order for the identity residuals.
pub const RICHARDSON_MIN_ORDER: f64 = 1.9;

/// Resolution-doubling agreement of terminal slices (absolute L²).
pub const RESOLUTION_DOUBLING: f64 = 1e-6;

/// Commutator ladder: fitted log-log exponent must be at most this.
pub const COMMUTATOR_MAX_EXPONENT: f64 = -0.8;

// ── sweep ───────────────────────────────────────────────────────────────

/// Sphere certificate: intercept of the linear-in-ε envelope fit.
pub const SPHERE_INTERCEPT: f64 = 1e-6;

/// Weak-residual battery: how many of the 27 test functions must show a
/// decreasing half-wave residual along the ladder.
pub const WEAK_BATTERY_MIN_DECREASING: usize = 24;

/// Low-frequency time-regularity proxy: the projected ∂ₜu norm may not
/// exceed this multiple of its value on the first (largest-ε) rung.
pub const TIME_REG_BOUND_FACTOR: f64 = 5.0;

// ── stability regions (startup check dt·max|ξ| ≤ bound) ────────────────

/// ETD-RK2: the stiff term is exact, so dt is limited by the nonlinear
/// rotation rate ≤ max|ξ| on near-sphere states.
pub const STABILITY_ETD_RK2: f64 = 0.9;

/// IF-RK4 admits a wider explicit region.
pub const STABILITY_IFRK4: f64 = 2.5;

/// Named entries for the manifest's tolerance table.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("round_trip", ROUND_TRIP),
        ("im_residue", IM_RESIDUE),
        ("per_mode", PER_MODE),
        ("orthogonality", ORTHOGONALITY),
        ("plancherel", PLANCHEREL),
        ("compose_residual", COMPOSE_RESIDUAL),
        ("self_adjoint", SELF_ADJOINT),
        ("pairing_identity", PAIRING_IDENTITY),
        ("unit_q", UNIT_Q),
        ("data_sphere_dev", DATA_SPHERE_DEV),
        ("data_far_field", DATA_FAR_FIELD),
        ("spectral_decay_min", SPECTRAL_DECAY_MIN),
        ("max_principle_base", MAX_PRINCIPLE_BASE),
        ("max_principle_dt2", MAX_PRINCIPLE_DT2),
        ("ec_monotone", EC_MONOTONE),
        ("h12_growth", H12_GROWTH),
        ("picard_vs_evolve", PICARD_VS_EVOLVE),
        ("picard_converged", PICARD_CONVERGED),
        ("richardson_min_order", RICHARDSON_MIN_ORDER),
        ("resolution_doubling", RESOLUTION_DOUBLING),
        ("commutator_max_exponent", COMMUTATOR_MAX_EXPONENT),
        ("sphere_intercept", SPHERE_INTERCEPT),
        (
            "weak_battery_min_decreasing",
            WEAK_BATTERY_MIN_DECREASING as f64,
        ),
        ("time_reg_bound_factor", TIME_REG_BOUND_FACTOR),
        ("stability_etd_rk2", STABILITY_ETD_RK2),
        ("stability_ifrk4", STABILITY_IFRK4),
    ]
}
