#pragma once

#include <vector>

#include "mrsys/numerics.hpp"

namespace mrsys {

/// A finite window of a vector-valued signal, v_t for t = start_index, ...
struct VectorSequence {
    int dim = 0;
    long start_index = 0;
    std::vector<ComplexVector> values;

    std::size_t size() const { return values.size(); }
    long end_index() const { return start_index + static_cast<long>(values.size()); }
    bool covers(long t) const { return t >= start_index && t < end_index(); }
    const ComplexVector& at(long t) const { return values.at(static_cast<std::size_t>(t - start_index)); }

    static VectorSequence zeros(int dim, long start, std::size_t length);
    /// Stack the window into a single column (oldest sample on top).
    ComplexVector stacked() const;
    static VectorSequence from_stacked(const ComplexVector& v, int dim, long start = 0);
};

/// Coefficients of a (T, z) exponentially modulated polynomial
///   v_t = z^{-t} sum_k coeffs[k] e^{2 pi j t k / T}.
struct EmpCoefficients {
    int period = 1;
    Complex base{1.0, 0.0};
    std::vector<ComplexVector> coeffs;

    int dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().size()); }
    ComplexVector stacked() const;
    static EmpCoefficients from_stacked(const ComplexVector& v, int period, Complex base);
};

/// e^{2 pi j k / T}, evaluated from k mod T so no error accumulates in k.
Complex root_of_unity(int period, long long k);

VectorSequence upsample(const VectorSequence& v, int q);
/// Throws Misaligned unless start_index is a multiple of q.
VectorSequence downsample(const VectorSequence& v, int q);

/// EMP analysis over a window of exactly T samples. The window may start at
/// any index since t -> z^t v_t is T-periodic for an EMP.
EmpCoefficients emp_analyze(const VectorSequence& v, Complex z, int period);
/// Evaluate the EMP at t in [t_begin, t_end).
VectorSequence emp_synthesize(const EmpCoefficients& coeffs, long t_begin, long t_end);

/// True if t -> z^t v_t is T-periodic on the window, to rel_tol relative to
/// the largest modulated sample. Windows shorter than T+1 are trivially EMP.
bool is_emp(const VectorSequence& v, Complex z, int period, double rel_tol = 1e-9);

/// Pi_{T,z,q} = col(z^{kT} I_{T*dim})_{k<q}, of size (q*T*dim) x (T*dim).
ComplexMatrix pi_block(int period, Complex z, int q, int dim);

/// N_T^power = diag(e^{2 pi j k power / T} I_dim)_{k<T}.
ComplexMatrix modulation_matrix(int period, int dim, long long power = 1);

/// sigma_T^power on T blocks of size dim, (sigma_T v)_k = v_{k+1 mod T}.
ComplexMatrix cyclic_shift(int period, int dim, long long power);

/// Matrix of the q-upsampler acting on a column of T blocks: (q*T*dim) x (T*dim).
ComplexMatrix upsample_matrix(int period, int q, int dim);
/// Matrix of the q-downsampler acting on a column of q*T blocks: (T*dim) x (q*T*dim).
ComplexMatrix downsample_matrix(int period, int q, int dim);

/// F_{T,z} as a (T*dim) x (T*dim) matrix acting on a stacked window 0..T-1.
ComplexMatrix emp_analysis_matrix(int period, Complex z, int dim);
/// F_{T,z}^{-1}: coefficients to samples at t = 0..T-1.
ComplexMatrix emp_synthesis_matrix(int period, Complex z, int dim);

}  // namespace mrsys
