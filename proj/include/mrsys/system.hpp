#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrsys/numerics.hpp"
#include "mrsys/signals.hpp"

namespace mrsys {

/// An (m, n)-multirate state-space system
///
///   x_{t+1} = A_t x_t + B_t u°_t,   y°_t = C_t x_t + D_t u°_t,
///   u° = up_{m̄} u,                  y = down_{n̄} y°,
///
/// with c = gcd(m, n), m̄ = m/c, n̄ = n/c and a central system of period
/// T = m n̄ = lcm(m, n). The four operator lists hold A_0 .. A_{T-1} etc.
struct MultirateSystem {
    int m = 1;
    int n = 1;
    int state_dim = 0;
    int input_dim = 0;
    int output_dim = 0;
    std::vector<ComplexMatrix> A;
    std::vector<ComplexMatrix> B;
    std::vector<ComplexMatrix> C;
    std::vector<ComplexMatrix> D;

    int c() const;
    int mbar() const { return m / c(); }
    int nbar() const { return n / c(); }
    /// Central period T = m n̄.
    int period() const { return m * nbar(); }
};

struct ValidationReport {
    std::vector<std::string> violations;
    /// Smallest (m', n') with m'/n' = m/n for which the system is still
    /// multirate; only filled in for valid systems.
    std::optional<std::pair<int, int>> minimal_pair;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const MultirateSystem& sys);
/// True iff every operator list satisfies X_{t+shift} = X_t (1e-12 absolute),
/// indices mod T. No validation is performed.
bool operators_repeat_every(const MultirateSystem& sys, int shift);

/// Throws DimensionMismatch listing every violation.
void require_valid(const MultirateSystem& sys);

struct SimulationTrace {
    VectorSequence u;          ///< physical input, zero-extended over the covered window
    VectorSequence u_central;  ///< u° = up_{m̄} u
    VectorSequence x;          ///< x_0 .. x_steps
    VectorSequence y_central;  ///< y°
    VectorSequence y;          ///< y = down_{n̄} y°
    ComplexVector x0;
};

/// Run the central recursion for t = 0 .. steps-1 from x0. Input samples
/// outside the given window (which must start at 0) are zero.
SimulationTrace simulate(const MultirateSystem& sys, const ComplexVector& x0, const VectorSequence& u, int steps);

/// The same system seen as (k m, k n)-multirate: operator lists tiled k times.
MultirateSystem reperiodize(const MultirateSystem& sys, int k);

/// Operator lists rotated so that the new A_t is A_{(t + tau) mod T}.
MultirateSystem shift_origin(const MultirateSystem& sys, long tau);

/// Error system sys1 - sys2 on the common multirate pair (C m̄, C n̄) with
/// C = lcm(c1, c2).
MultirateSystem difference(const MultirateSystem& sys1, const MultirateSystem& sys2);

/// Lifted EMP steady state of the system driven by the (n, z^m̄)-EMP input
/// with coefficients u. Every bold quantity is a stacked coefficient column.
struct SteadyState {
    Complex z;
    EmpCoefficients u;          ///< period n, base z^m̄
    EmpCoefficients u_central;  ///< period T, base z
    EmpCoefficients x;          ///< period T, base z
    EmpCoefficients y_central;  ///< period T, base z
    EmpCoefficients y;          ///< period m, base z^n̄
    ComplexVector x0;
};

SteadyState emp_steady_state(const MultirateSystem& sys, Complex z, const EmpCoefficients& u);

}  // namespace mrsys
