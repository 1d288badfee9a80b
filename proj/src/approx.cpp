#include "mrsys/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "mrsys/signals.hpp"

namespace mrsys {

std::string_view to_string(HsMethod method) {
    switch (method) {
        case HsMethod::Series: return "series";
        case HsMethod::Lyapunov: return "lyapunov";
        case HsMethod::Both: return "both";
    }
    return "both";
}

HsMethod parse_hs_method(std::string_view text) {
    if (text == "series") return HsMethod::Series;
    if (text == "lyapunov") return HsMethod::Lyapunov;
    if (text == "both") return HsMethod::Both;
    throw Error(ErrorKind::Parse, "unknown HS method '" + std::string(text) + "'");
}

namespace {

// Ingredients of the power series G(z) = G_0 + sum_k z^{k+1} out M^k in.
struct SeriesFactors {
    ComplexMatrix g0;      // Pi* D Pi / m̄
    ComplexMatrix step;    // M = N^{-1} A (N unitary, so N^{-1} = N^*)
    ComplexMatrix input;   // N^{-1} B Pi / m̄
    ComplexMatrix output;  // Pi* C
};

SeriesFactors series_factors(const MultirateSystem& sys, bool first_column_only) {
    const LiftedSystem lifted = lift(sys);
    ComplexMatrix pi_in = pi_block(sys.n, 1.0, sys.mbar(), sys.input_dim);
    if (first_column_only) pi_in = pi_in.leftCols(sys.input_dim).eval();
    const ComplexMatrix pi_out = pi_block(sys.m, 1.0, sys.nbar(), sys.output_dim);
    const double mbar = sys.mbar();

    SeriesFactors f;
    f.g0 = pi_out.adjoint() * lifted.D * pi_in / mbar;
    f.step = lifted.N.adjoint() * lifted.A;
    f.input = lifted.N.adjoint() * lifted.B * pi_in / mbar;
    f.output = pi_out.adjoint() * lifted.C;
    return f;
}

constexpr double kStabilityMargin = 1e-8;

double series_sum_squares(const SeriesFactors& f, double rho, double tol, int& terms, bool& converged) {
    double accumulated = f.g0.squaredNorm();
    terms = 0;
    converged = true;
    if (f.step.rows() == 0) return accumulated;

    // Tail certificate: term_k <= K rho_hat^{2k}, with K fitted over the
    // terms seen so far.
    const double rho_hat = std::min(rho + 1e-4, 0.5 * (1.0 + rho));
    const double log_rho2 = 2.0 * std::log(std::max(rho_hat, 1e-300));
    const double log_tail_factor = -std::log1p(-rho_hat * rho_hat);
    const long min_terms = f.step.rows();
    constexpr long kMaxTerms = 2'000'000;

    double log_constant = -std::numeric_limits<double>::infinity();
    ComplexMatrix power_times_input = f.input;
    for (long k = 0; k < kMaxTerms; ++k) {
        const double term = (f.output * power_times_input).squaredNorm();
        accumulated += term;
        ++terms;
        if (term > 0.0) log_constant = std::max(log_constant, std::log(term) - k * log_rho2);
        if (k + 1 >= min_terms) {
            const double tail = std::exp(log_constant + (k + 1) * log_rho2 + log_tail_factor);
            if (tail <= tol * tol * accumulated) return accumulated;
        }
        power_times_input = f.step * power_times_input;
    }
    converged = false;
    return accumulated;
}

struct LyapunovSum {
    double value = 0.0;
    double magnitude = 0.0;  // size of the summed parts, for the cancellation floor
};

LyapunovSum lyapunov_sum_squares(const SeriesFactors& f) {
    LyapunovSum out{f.g0.squaredNorm(), f.g0.squaredNorm()};
    if (f.step.rows() == 0) return out;
    const ComplexMatrix gramian = solve_discrete_lyapunov(f.step, f.output.adjoint() * f.output);
    out.value += (f.input.adjoint() * gramian * f.input).trace().real();
    out.magnitude += f.input.squaredNorm() * gramian.norm();
    // A difference of equal transfers can cancel to a tiny negative trace.
    out.value = std::max(out.value, 0.0);
    return out;
}

}  // namespace

std::vector<ComplexMatrix> taylor_coefficients(const MultirateSystem& sys, int count) {
    if (count < 0) throw Error(ErrorKind::BadLength, "taylor_coefficients: negative count");
    const SeriesFactors f = series_factors(sys, false);
    std::vector<ComplexMatrix> out{f.g0};
    ComplexMatrix power_times_input = f.input;
    for (int k = 0; k < count; ++k) {
        if (f.step.rows() == 0) {
            out.push_back(ComplexMatrix::Zero(f.g0.rows(), f.g0.cols()));
            continue;
        }
        out.push_back(f.output * power_times_input);
        power_times_input = f.step * power_times_input;
    }
    return out;
}

HsReport hs_norm(const MultirateSystem& sys, HsMethod method, double tol) {
    const SeriesFactors f = series_factors(sys, true);
    HsReport report;
    report.method = method;
    report.spectral_radius_bound = f.step.rows() == 0 ? 0.0 : spectral_radius(f.step, 1e-10);
    if (report.spectral_radius_bound >= 1.0 - kStabilityMargin) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "Hilbert-Schmidt norm is not finite: rho(N^-1 A) estimate " << report.spectral_radius_bound
            << " >= 1 - 1e-8";
        throw Error(ErrorKind::Unstable, msg.str());
    }

    double cancellation_floor = 0.0;
    if (method != HsMethod::Lyapunov) {
        bool converged = true;
        report.series_value = std::sqrt(series_sum_squares(f, report.spectral_radius_bound, tol, report.terms_used,
                                                           converged));
        report.converged = converged;
        report.value = report.series_value;
    }
    if (method != HsMethod::Series) {
        const LyapunovSum sum = lyapunov_sum_squares(f);
        report.lyapunov_value = std::sqrt(sum.value);
        report.value = report.lyapunov_value;
        // Below sqrt(eps * magnitude) both methods only see rounding noise.
        cancellation_floor = std::sqrt(std::numeric_limits<double>::epsilon() * sum.magnitude);
    }
    if (method == HsMethod::Both) {
        const double scale = std::max(report.lyapunov_value, std::numeric_limits<double>::min());
        const bool both_noise = std::max(report.series_value, report.lyapunov_value) <= 10.0 * cancellation_floor;
        const bool agree = std::abs(report.series_value - report.lyapunov_value) <= 10.0 * tol * scale || both_noise ||
                           report.series_value == report.lyapunov_value;
        report.converged = report.converged && agree;
    }
    return report;
}

HsReport hs_distance(const MultirateSystem& sys1, const MultirateSystem& sys2, HsMethod method, double tol) {
    return hs_norm(difference(sys1, sys2), method, tol);
}

ApproxTarget reduce_target(int c, int c_hat) {
    if (c_hat < 1 || c_hat >= c) {
        throw Error(ErrorKind::BadTarget, "target factor " + std::to_string(c_hat) + " must satisfy 1 <= c_hat < c = " +
                                              std::to_string(c));
    }
    ApproxTarget t;
    t.c = c;
    t.c_hat = c_hat;
    t.c_tilde = std::gcd(c, c_hat);
    t.q = c / t.c_tilde;
    return t;
}

namespace {

void require_divides_c(const MultirateSystem& sys, int q) {
    if (q < 1 || sys.c() % q != 0) {
        throw Error(ErrorKind::NotDivisor, std::to_string(q) + " does not divide gcd(m, n) = " + std::to_string(sys.c()));
    }
}

// blocks*dim x width*dim with the identity in the top block.
ComplexMatrix block_selector(int blocks, int width, int dim) {
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(blocks) * width * dim,
                                            static_cast<Eigen::Index>(width) * dim);
    out.topRows(static_cast<Eigen::Index>(width) * dim).setIdentity();
    return out;
}

}  // namespace

ComplexMatrix downsampled_transfer(const MultirateSystem& sys, int q, Complex z, double tol) {
    require_valid(sys);
    require_divides_c(sys, q);
    const TransferValue g = harmonic_transfer(sys, z, tol);
    const int rows = sys.m / q;
    const int cols = sys.n / q;
    ComplexMatrix out(static_cast<Eigen::Index>(rows) * sys.output_dim, static_cast<Eigen::Index>(cols) * sys.input_dim);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            out.block(r * sys.output_dim, c * sys.input_dim, sys.output_dim, sys.input_dim) = g.block(r * q, c * q);
        }
    }
    return out;
}

BlockRegrouping block_regrouping(int period, int q, int dim) {
    if (q < 1 || period % q != 0) {
        throw Error(ErrorKind::NotDivisor, std::to_string(q) + " does not divide " + std::to_string(period));
    }
    BlockRegrouping r;
    r.period = period;
    r.q = q;
    r.dim = dim;
    const int groups = period / q;
    ComplexVector m_diag(static_cast<Eigen::Index>(q) * dim);
    for (int k = 0; k < q; ++k) m_diag.segment(k * dim, dim).setConstant(root_of_unity(period, k));
    r.m = m_diag.asDiagonal();
    // Unitary diagonal: the inverse is the conjugate.
    r.m_inv = m_diag.conjugate().asDiagonal();

    ComplexVector frak_diag(static_cast<Eigen::Index>(period) * dim);
    ComplexVector frak_n_diag(static_cast<Eigen::Index>(period) * dim);
    for (int k = 0; k < period; ++k) {
        frak_diag.segment(k * dim, dim).setConstant(root_of_unity(period, k % q));
        frak_n_diag.segment(k * dim, dim).setConstant(root_of_unity(groups, k / q));
    }
    r.frak_m = frak_diag.asDiagonal();
    r.frak_m_inv = frak_diag.conjugate().asDiagonal();
    r.frak_n = frak_n_diag.asDiagonal();
    r.selector = block_selector(groups, q, dim);
    return r;
}

MultirateSystem optimal_approximant(const MultirateSystem& sys, int q, ApproxVariant variant) {
    require_valid(sys);
    require_divides_c(sys, q);
    const LiftedSystem lifted = lift(sys);
    const int period = lifted.period;
    const int groups = period / q;
    const int dx = sys.state_dim;
    const int du = sys.input_dim;
    const int dy = sys.output_dim;
    const BlockRegrouping reg = block_regrouping(period, q, dx);

    // up_q reinterpreted on grouped blocks, applied to the unit column over U.
    const ComplexMatrix input_selector = upsample_matrix(groups, q, du) * block_selector(groups, 1, du);
    // down_q reinterpreted on grouped output blocks.
    const ComplexMatrix output_down = downsample_matrix(groups, q, dy);

    ComplexMatrix a_column;
    ComplexMatrix b_column;
    ComplexMatrix c_column;
    if (variant == ApproxVariant::MInverseRight) {
        a_column = lifted.A * reg.frak_m_inv * reg.selector;
        b_column = lifted.B * input_selector;
        c_column = output_down * lifted.C * reg.frak_m_inv * reg.selector;
    } else {
        a_column = reg.frak_m_inv * lifted.A * reg.selector;
        b_column = reg.frak_m_inv * lifted.B * input_selector;
        c_column = output_down * lifted.C * reg.selector;
    }

    MultirateSystem out;
    out.m = sys.m / q;
    out.n = sys.n / q;
    out.state_dim = q * dx;
    out.input_dim = du;
    out.output_dim = dy;
    out.A = inverse_fourier_blocks(a_column, groups, static_cast<Eigen::Index>(q) * dx);
    out.B = inverse_fourier_blocks(b_column, groups, static_cast<Eigen::Index>(q) * dx);
    out.C = inverse_fourier_blocks(c_column, groups, dy);
    for (int t = 0; t < groups; ++t) {
        ComplexMatrix d = ComplexMatrix::Zero(dy, du);
        for (int k = 0; k < q; ++k) d += sys.D[t + k * groups];
        out.D.push_back(d / static_cast<double>(q));
    }
    return out;
}

}  // namespace mrsys
