#include "mrsys/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace mrsys {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::BadLength: return "BadLength";
        case ErrorKind::Misaligned: return "Misaligned";
        case ErrorKind::NotInResolvent: return "NotInResolvent";
        case ErrorKind::NotDivisor: return "NotDivisor";
        case ErrorKind::Unstable: return "Unstable";
        case ErrorKind::IncompatibleRatio: return "IncompatibleRatio";
        case ErrorKind::IncompatibleDims: return "IncompatibleDims";
        case ErrorKind::BadTarget: return "BadTarget";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex v = a.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

Complex int_power(Complex z, long long exponent) {
    if (exponent < 0) return Complex(1.0) / int_power(z, -exponent);
    Complex result(1.0);
    Complex base = z;
    while (exponent > 0) {
        if (exponent & 1) result *= base;
        base *= base;
        exponent >>= 1;
    }
    return result;
}

ComplexMatrix block_diagonal(const std::vector<ComplexMatrix>& blocks) {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "solve_linear: matrix is " + std::to_string(a.rows()) +
                                                  "x" + std::to_string(a.cols()) + ", not square");
    }
    if (b.rows() != a.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "solve_linear: right-hand side has " +
                                                  std::to_string(b.rows()) + " rows, expected " +
                                                  std::to_string(a.rows()));
    }
    if (a.rows() == 0) return b;
    if (!all_finite(a) || !all_finite(b)) {
        throw Error(ErrorKind::Singular, "solve_linear: non-finite input");
    }

    const Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    const double threshold = 1e-12 * a.norm();
    if (!(pivot > threshold)) {
        throw Error(ErrorKind::Singular, "solve_linear: pivot " + std::to_string(pivot) +
                                             " below " + std::to_string(threshold));
    }
    ComplexMatrix x = lu.solve(b);
    if (!all_finite(x)) throw Error(ErrorKind::Singular, "solve_linear: non-finite solution");
    return x;
}

double smallest_singular_value(const ComplexMatrix& a) {
    if (a.size() == 0) throw Error(ErrorKind::ShapeMismatch, "smallest_singular_value: empty matrix");
    const Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues().minCoeff();
}

double spectral_radius(const ComplexMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "spectral_radius: not square");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
        throw Error(ErrorKind::ShapeMismatch, "spectral_radius: rel_tol must lie in (0, 1e-2]");
    }
    if (!all_finite(a)) throw Error(ErrorKind::NotConverged, "spectral_radius: non-finite input");
    if (a.rows() == 0) return 0.0;

    // Invariant: A^(2^k) = exp(log_scale) * p with ||p||_F = 1.
    double norm = a.norm();
    if (norm == 0.0) return 0.0;
    ComplexMatrix p = a / norm;
    double log_scale = std::log(norm);
    double power = 1.0;
    double estimate = norm;
    for (int k = 1; k <= 60; ++k) {
        ComplexMatrix sq = p * p;
        const double r = sq.norm();
        if (r == 0.0) return 0.0;
        p = sq / r;
        log_scale = 2.0 * log_scale + std::log(r);
        power *= 2.0;
        const double next = std::exp(log_scale / power);
        if (std::abs(next - estimate) <= rel_tol * next) return next;
        estimate = next;
    }
    return estimate;
}

ComplexMatrix solve_discrete_lyapunov(const ComplexMatrix& m, const ComplexMatrix& q) {
    if (m.rows() != m.cols() || q.rows() != m.rows() || q.cols() != m.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "solve_discrete_lyapunov: incompatible shapes");
    }
    ComplexMatrix x = q;
    ComplexMatrix p = m;
    for (int iter = 0; iter < 200; ++iter) {
        const ComplexMatrix update = p.adjoint() * x * p;
        x += update;
        if (!all_finite(x)) break;
        if (update.stableNorm() <= 1e-14 * x.stableNorm()) {
            return (x + x.adjoint()) / 2.0;
        }
        p = p * p;
    }
    throw Error(ErrorKind::NotConverged,
                "solve_discrete_lyapunov: Smith iteration did not converge (rho(M) too close to 1?)");
}

}  // namespace mrsys
