//! Index and sign conventions shared by every module.
//!
//! * Signature: Lorentzian metrics are `(-, +, ..., +)` with time as
//!   coordinate 0. Units are geometric, `c = G = 1`.
//! * Christoffel symbols `Γ^k_{ij}` are stored with slots `(k, i, j)` and
//!   variance `(contra, co, co)`:
//!   `Γ^k_{ij} = ½ g^{km} (∂_i g_{jm} + ∂_j g_{im} - ∂_m g_{ij})`.
//! * Riemann `R_{jkl}{}^m` is stored with slots `(j, k, l, m)` and variance
//!   `(co, co, co, contra)`:
//!   `R_{jkl}{}^m = ∂_k Γ^m_{jl} - ∂_j Γ^m_{kl} + Γ^m_{ks} Γ^s_{jl} - Γ^m_{js} Γ^s_{kl}`.
//!   The fully covariant form lowers the last slot: `R_{jklm} = R_{jkl}{}^p g_{pm}`.
//! * Ricci contracts the second slot against the last: `R_{ij} = R_{imj}{}^m`;
//!   scalar curvature `R = g^{ij} R_{ij}`. A round sphere has positive `R`.
//! * `G_{jklm} = g_{mj} g_{kl} - g_{mk} g_{jl}`. With the conventions above a
//!   space of constant sectional curvature `K` has `R_{jklm} = -K G_{jklm}`
//!   and `R_{ij} = (n-1) K g_{ij}`.
//! * Weyl: `C_{jklm} = R_{jklm} + (g_{jm}R_{kl} - g_{km}R_{jl} + R_{jm}g_{kl} - R_{km}g_{jl})/(n-2)
//!   - G_{jklm} R/((n-1)(n-2))`, and `C_{jkl}{}^m` raises the last slot.
//! * Covariant derivatives put the new index first: `∇_i T_{...}` has slots
//!   `(i, ...)`.
//! * Multi-indices of jets are in graded lexicographic order (see
//!   [`crate::jets`]).
//! * Normalized residuals divide the Frobenius norm of a defect by
//!   `1 + ` the largest norm among the participating terms.
