#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "mrsys/error.hpp"

namespace mrsys {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Solve A X = B with a partially pivoted LU factorisation.
///
/// Throws Singular when the smallest pivot falls below 1e-12 * ||A||_F.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

/// Smallest singular value of a nonempty matrix (min(rows, cols) values).
double smallest_singular_value(const ComplexMatrix& a);

/// Spectral radius through the Gelfand formula rho = lim ||A^(2^k)||_F^(1/2^k).
///
/// The returned value is an upper bound on rho(A) that agrees with the
/// previous squaring step to within rel_tol (or stops after 60 squarings).
/// rel_tol must lie in (0, 1e-2].
double spectral_radius(const ComplexMatrix& a, double rel_tol = 1e-10);

/// Hermitian solution of X = M^* X M + Q by Smith's squaring iteration.
///
/// Requires rho(M) < 1; throws NotConverged after 200 doublings or when the
/// iterates stop being finite.
ComplexMatrix solve_discrete_lyapunov(const ComplexMatrix& m, const ComplexMatrix& q);

/// Block-diagonal concatenation.
ComplexMatrix block_diagonal(const std::vector<ComplexMatrix>& blocks);

bool all_finite(const ComplexMatrix& a);

/// Integer power by binary exponentiation; negative exponents invert z.
Complex int_power(Complex z, long long exponent);

}  // namespace mrsys
