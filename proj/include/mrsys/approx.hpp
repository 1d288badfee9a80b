#pragma once

#include <string_view>
#include <vector>

#include "mrsys/lifting.hpp"
#include "mrsys/system.hpp"

namespace mrsys {

enum class HsMethod { Series, Lyapunov, Both };

std::string_view to_string(HsMethod method);
/// Accepts "series", "lyapunov" or "both"; throws Parse otherwise.
HsMethod parse_hs_method(std::string_view text);

/// Result of a Hilbert-Schmidt norm evaluation.
///
/// value is |G| = sqrt(sum_i ||G_i||_HS^2) over the first transfer column,
/// which equals (1/n)^(1/2) ||G||_HS and is invariant under inflation.
struct HsReport {
    double value = 0.0;
    HsMethod method = HsMethod::Both;
    int terms_used = 0;              ///< Taylor terms summed (series method)
    double spectral_radius_bound = 0.0;  ///< estimate of rho(N^{-1} A)
    bool converged = true;
    double series_value = 0.0;
    double lyapunov_value = 0.0;
};

/// Taylor coefficients G_0 .. G_K of G(z) at the origin,
///   G_0 = Pi* D Pi / m̄,  G_{k+1} = Pi* C (N^{-1} A)^k N^{-1} B Pi / m̄.
std::vector<ComplexMatrix> taylor_coefficients(const MultirateSystem& sys, int count);

/// Throws Unstable when rho(N^{-1} A) >= 1 - 1e-8.
HsReport hs_norm(const MultirateSystem& sys, HsMethod method = HsMethod::Both, double tol = 1e-10);
/// hs_norm(difference(sys1, sys2)).
HsReport hs_distance(const MultirateSystem& sys1, const MultirateSystem& sys2, HsMethod method = HsMethod::Both,
                     double tol = 1e-10);

/// Reduction bookkeeping for an approximant with multirate factor c_hat < c.
struct ApproxTarget {
    int c = 1;
    int c_hat = 1;
    int c_tilde = 1;  ///< gcd(c, c_hat)
    int q = 1;        ///< c / c_tilde
};

ApproxTarget reduce_target(int c, int c_hat);

/// down_q G(z) up_q, acting blockwise on the Y and U blocks.
ComplexMatrix downsampled_transfer(const MultirateSystem& sys, int q, Complex z, double tol = 1e-9);

/// The q x q regrouping used by the state-space construction of the
/// approximant. All matrices are square over X^T unless noted.
struct BlockRegrouping {
    int period = 1;  ///< T
    int q = 1;
    int dim = 0;
    ComplexMatrix m;          ///< M = diag(eps^k I_X)_{k<q}, eps = e^{2 pi j / T}
    ComplexMatrix m_inv;      ///< M^{-1} = M^*
    ComplexMatrix frak_m;     ///< diag(M, .., M), T/q copies
    ComplexMatrix frak_m_inv;
    ComplexMatrix frak_n;     ///< modulation over X^q blocks at period T/q
    ComplexMatrix selector;   ///< T dim x q dim, I_{X^q} in block 0
};

BlockRegrouping block_regrouping(int period, int q, int dim);

enum class ApproxVariant { MInverseRight = 1, MInverseLeft = 2 };

/// Optimal (m/q, n/q)-multirate approximant with state dimension q d_x.
/// Variant 1 applies M^{-1} on the right of the blocked transforms, variant 2
/// on the left; the two are similar through M. Throws NotDivisor unless
/// q divides gcd(m, n).
MultirateSystem optimal_approximant(const MultirateSystem& sys, int q, ApproxVariant variant = ApproxVariant::MInverseRight);

}  // namespace mrsys
