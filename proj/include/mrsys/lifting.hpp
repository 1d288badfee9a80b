#pragma once

#include <vector>

#include "mrsys/numerics.hpp"
#include "mrsys/system.hpp"

namespace mrsys {

/// Fourier coefficients hat{A}_k = (1/T) sum_t A_t e^{-2 pi j t k / T}.
std::vector<ComplexMatrix> fourier_coefficients(const std::vector<ComplexMatrix>& seq);

/// Inverse of fourier_coefficients for a block column: the column holds T
/// stacked coefficient blocks of block_rows rows each, and the result is
/// A_t = sum_k hat{A}_k e^{2 pi j t k / T}, t < T.
std::vector<ComplexMatrix> inverse_fourier_blocks(const ComplexMatrix& column, int period, Eigen::Index block_rows);

/// Block Toeplitz transform: block (r, c) = hat{A}_{(r - c) mod T}.
ComplexMatrix toeplitz_transform(const std::vector<ComplexMatrix>& seq, int period);

/// Frequency-domain image of a multirate system at its central period.
struct LiftedSystem {
    int m = 1;
    int n = 1;
    int period = 1;
    int state_dim = 0;
    int input_dim = 0;
    int output_dim = 0;
    int mbar = 1;
    int nbar = 1;
    ComplexMatrix A;  // T d_x x T d_x
    ComplexMatrix B;  // T d_x x T d_u
    ComplexMatrix C;  // T d_y x T d_x
    ComplexMatrix D;  // T d_y x T d_u
    ComplexMatrix N;  // modulation matrix over the state blocks
    Complex epsilon;  // e^{2 pi j / T}
};

LiftedSystem lift(const MultirateSystem& sys);

struct ResolventMargin {
    double sigma_min = 0.0;  ///< smallest singular value of N - z A
    double threshold = 0.0;  ///< tol (1 + |z| ||A||_F)
    bool inside = true;
};

ResolventMargin resolvent_margin(const LiftedSystem& lifted, Complex z, double tol = 1e-9);
bool in_harmonic_resolvent(const LiftedSystem& lifted, Complex z, double tol = 1e-9);

/// G°(z) = z C (N - z A)^{-1} B + D, the transfer of the central system.
ComplexMatrix central_transfer(const LiftedSystem& lifted, Complex z);

/// G(z) as an m x n array of d_y x d_u blocks.
struct TransferValue {
    Complex z;
    ComplexMatrix matrix;
    int m = 1;
    int n = 1;
    int output_dim = 0;
    int input_dim = 0;

    /// G_{k,l}(z).
    ComplexMatrix block(int k, int l) const {
        return matrix.block(static_cast<Eigen::Index>(k) * output_dim, static_cast<Eigen::Index>(l) * input_dim,
                            output_dim, input_dim);
    }
    ComplexMatrix first_column() const { return matrix.leftCols(input_dim); }
};

/// G(z) = Pi*_{m,1,n̄} G°(z) Pi_{n,1,m̄} / m̄. Throws NotInResolvent.
TransferValue harmonic_transfer(const LiftedSystem& lifted, Complex z, double tol = 1e-9);
TransferValue harmonic_transfer(const MultirateSystem& sys, Complex z, double tol = 1e-9);

/// True iff every operator list is (T/q)-periodic, within 1e-12 absolute.
/// Throws NotDivisor unless q divides T.
bool detect_shorter_period(const MultirateSystem& sys, int q);

/// Band test of the Toeplitz transforms: every block at a distance that is
/// not a multiple of q is zero (threshold 1e-12 ||.||_F).
bool toeplitz_bands_only(const LiftedSystem& lifted, int q);

/// Transfer of the same system viewed at period (k m, k n).
TransferValue transfer_at_period(const MultirateSystem& sys, int k, Complex z, double tol = 1e-9);

/// Rebuild G(z) from first columns: G_{k,l}(z) = G_{k-l,0}(z / eps^l),
/// eps = e^{2 pi j / T}, row indices mod m.
TransferValue transfer_from_first_column(const MultirateSystem& sys, Complex z, double tol = 1e-9);

}  // namespace mrsys
