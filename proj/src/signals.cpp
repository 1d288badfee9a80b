#include "mrsys/signals.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mrsys {

namespace {

long floor_mod(long long a, long long b) {
    const long long r = a % b;
    return static_cast<long>(r < 0 ? r + b : r);
}

void require_positive(int value, const char* what) {
    if (value < 1) {
        throw Error(ErrorKind::BadLength, std::string(what) + " must be positive, got " + std::to_string(value));
    }
}

}  // namespace

VectorSequence VectorSequence::zeros(int dim, long start, std::size_t length) {
    VectorSequence out;
    out.dim = dim;
    out.start_index = start;
    out.values.assign(length, ComplexVector::Zero(dim));
    return out;
}

ComplexVector VectorSequence::stacked() const {
    ComplexVector out(static_cast<Eigen::Index>(values.size()) * dim);
    for (std::size_t i = 0; i < values.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * dim, dim) = values[i];
    return out;
}

VectorSequence VectorSequence::from_stacked(const ComplexVector& v, int dim, long start) {
    if (dim < 1 || v.size() % dim != 0) {
        throw Error(ErrorKind::BadLength, "from_stacked: length " + std::to_string(v.size()) +
                                              " is not a multiple of dim " + std::to_string(dim));
    }
    VectorSequence out;
    out.dim = dim;
    out.start_index = start;
    for (Eigen::Index i = 0; i < v.size() / dim; ++i) out.values.push_back(v.segment(i * dim, dim));
    return out;
}

ComplexVector EmpCoefficients::stacked() const {
    const int d = dim();
    ComplexVector out(static_cast<Eigen::Index>(coeffs.size()) * d);
    for (std::size_t k = 0; k < coeffs.size(); ++k) out.segment(static_cast<Eigen::Index>(k) * d, d) = coeffs[k];
    return out;
}

EmpCoefficients EmpCoefficients::from_stacked(const ComplexVector& v, int period, Complex base) {
    require_positive(period, "EMP period");
    if (v.size() % period != 0) {
        throw Error(ErrorKind::BadLength, "EMP coefficient column of length " + std::to_string(v.size()) +
                                              " does not split into " + std::to_string(period) + " blocks");
    }
    const Eigen::Index d = v.size() / period;
    EmpCoefficients out;
    out.period = period;
    out.base = base;
    for (int k = 0; k < period; ++k) out.coeffs.push_back(v.segment(k * d, d));
    return out;
}

Complex root_of_unity(int period, long long k) {
    const long r = floor_mod(k, period);
    if (r == 0) return {1.0, 0.0};
    // Quarter turns are returned exactly so that real and imaginary data stay clean.
    if ((4 * static_cast<long long>(r)) % period == 0) {
        switch ((4 * static_cast<long long>(r)) / period) {
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(period);
    return {std::cos(angle), std::sin(angle)};
}

VectorSequence upsample(const VectorSequence& v, int q) {
    require_positive(q, "upsampling factor");
    VectorSequence out;
    out.dim = v.dim;
    out.start_index = v.start_index * q;
    if (v.values.empty()) return out;
    const std::size_t length = q * v.values.size() - (q - 1);
    out.values.assign(length, ComplexVector::Zero(v.dim));
    for (std::size_t i = 0; i < v.values.size(); ++i) out.values[i * q] = v.values[i];
    return out;
}

VectorSequence downsample(const VectorSequence& v, int q) {
    require_positive(q, "downsampling factor");
    if (v.start_index % q != 0) {
        throw Error(ErrorKind::Misaligned, "downsample: start index " + std::to_string(v.start_index) +
                                               " is not a multiple of " + std::to_string(q));
    }
    VectorSequence out;
    out.dim = v.dim;
    out.start_index = v.start_index / q;
    for (std::size_t i = 0; i < v.values.size(); i += q) out.values.push_back(v.values[i]);
    return out;
}

EmpCoefficients emp_analyze(const VectorSequence& v, Complex z, int period) {
    require_positive(period, "EMP period");
    if (v.values.size() != static_cast<std::size_t>(period)) {
        throw Error(ErrorKind::BadLength, "emp_analyze: window has " + std::to_string(v.values.size()) +
                                              " samples, period is " + std::to_string(period));
    }
    if (z == Complex(0.0)) throw Error(ErrorKind::BadLength, "emp_analyze: base z must be nonzero");

    EmpCoefficients out;
    out.period = period;
    out.base = z;
    out.coeffs.assign(period, ComplexVector::Zero(v.dim));
    for (long i = 0; i < period; ++i) {
        const long t = v.start_index + i;
        const ComplexVector weighted = v.values[i] * int_power(z, t);
        for (int k = 0; k < period; ++k) {
            out.coeffs[k] += weighted * root_of_unity(period, -static_cast<long long>(t) * k);
        }
    }
    for (auto& c : out.coeffs) c /= static_cast<double>(period);
    return out;
}

VectorSequence emp_synthesize(const EmpCoefficients& coeffs, long t_begin, long t_end) {
    if (t_end < t_begin) throw Error(ErrorKind::BadLength, "emp_synthesize: empty range reversed");
    const int d = coeffs.dim();
    VectorSequence out = VectorSequence::zeros(d, t_begin, static_cast<std::size_t>(t_end - t_begin));
    for (long t = t_begin; t < t_end; ++t) {
        ComplexVector sum = ComplexVector::Zero(d);
        for (int k = 0; k < coeffs.period; ++k) {
            sum += coeffs.coeffs[k] * root_of_unity(coeffs.period, static_cast<long long>(t) * k);
        }
        out.values[t - t_begin] = sum * int_power(coeffs.base, -t);
    }
    return out;
}

bool is_emp(const VectorSequence& v, Complex z, int period, double rel_tol) {
    require_positive(period, "EMP period");
    std::vector<ComplexVector> modulated;
    double scale = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        modulated.push_back(v.values[i] * int_power(z, v.start_index + static_cast<long>(i)));
        scale = std::max(scale, modulated.back().norm());
    }
    for (std::size_t i = period; i < modulated.size(); ++i) {
        if ((modulated[i] - modulated[i - period]).norm() > rel_tol * scale) return false;
    }
    return true;
}

ComplexMatrix pi_block(int period, Complex z, int q, int dim) {
    require_positive(period, "period");
    require_positive(q, "q");
    const Eigen::Index n = static_cast<Eigen::Index>(period) * dim;
    ComplexMatrix out(q * n, n);
    for (int k = 0; k < q; ++k) {
        out.block(k * n, 0, n, n) = int_power(z, static_cast<long long>(k) * period) * ComplexMatrix::Identity(n, n);
    }
    return out;
}

ComplexMatrix modulation_matrix(int period, int dim, long long power) {
    require_positive(period, "period");
    ComplexVector diag(static_cast<Eigen::Index>(period) * dim);
    for (int k = 0; k < period; ++k) diag.segment(k * dim, dim).setConstant(root_of_unity(period, power * k));
    return diag.asDiagonal();
}

ComplexMatrix cyclic_shift(int period, int dim, long long power) {
    require_positive(period, "period");
    const Eigen::Index n = static_cast<Eigen::Index>(period) * dim;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < period; ++k) {
        const long col = floor_mod(k + power, period);
        out.block(k * dim, col * dim, dim, dim).setIdentity();
    }
    return out;
}

ComplexMatrix upsample_matrix(int period, int q, int dim) {
    require_positive(period, "period");
    require_positive(q, "q");
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(q) * period * dim,
                                            static_cast<Eigen::Index>(period) * dim);
    for (int s = 0; s < period; ++s) out.block(q * s * dim, s * dim, dim, dim).setIdentity();
    return out;
}

ComplexMatrix downsample_matrix(int period, int q, int dim) {
    return upsample_matrix(period, q, dim).transpose();
}

ComplexMatrix emp_analysis_matrix(int period, Complex z, int dim) {
    require_positive(period, "period");
    const Eigen::Index n = static_cast<Eigen::Index>(period) * dim;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < period; ++k) {
        for (int t = 0; t < period; ++t) {
            const Complex w = int_power(z, t) * root_of_unity(period, -static_cast<long long>(t) * k) /
                              static_cast<double>(period);
            out.block(k * dim, t * dim, dim, dim) = w * ComplexMatrix::Identity(dim, dim);
        }
    }
    return out;
}

ComplexMatrix emp_synthesis_matrix(int period, Complex z, int dim) {
    require_positive(period, "period");
    const Eigen::Index n = static_cast<Eigen::Index>(period) * dim;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int t = 0; t < period; ++t) {
        for (int k = 0; k < period; ++k) {
            const Complex w = int_power(z, -t) * root_of_unity(period, static_cast<long long>(t) * k);
            out.block(t * dim, k * dim, dim, dim) = w * ComplexMatrix::Identity(dim, dim);
        }
    }
    return out;
}

}  // namespace mrsys
