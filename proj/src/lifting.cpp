#include "mrsys/lifting.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mrsys/signals.hpp"

namespace mrsys {

std::vector<ComplexMatrix> fourier_coefficients(const std::vector<ComplexMatrix>& seq) {
    const int period = static_cast<int>(seq.size());
    if (period == 0) throw Error(ErrorKind::BadLength, "fourier_coefficients: empty sequence");
    const auto rows = seq.front().rows();
    const auto cols = seq.front().cols();
    std::vector<ComplexMatrix> hat(period, ComplexMatrix::Zero(rows, cols));
    for (int t = 0; t < period; ++t) {
        if (seq[t].rows() != rows || seq[t].cols() != cols) {
            throw Error(ErrorKind::ShapeMismatch, "fourier_coefficients: element " + std::to_string(t) +
                                                      " has a different shape");
        }
        for (int k = 0; k < period; ++k) hat[k] += seq[t] * root_of_unity(period, -static_cast<long long>(t) * k);
    }
    for (auto& h : hat) h /= static_cast<double>(period);
    return hat;
}

std::vector<ComplexMatrix> inverse_fourier_blocks(const ComplexMatrix& column, int period, Eigen::Index block_rows) {
    if (column.rows() != period * block_rows) {
        throw Error(ErrorKind::ShapeMismatch, "inverse_fourier_blocks: column height does not match period");
    }
    std::vector<ComplexMatrix> seq(period, ComplexMatrix::Zero(block_rows, column.cols()));
    for (int t = 0; t < period; ++t) {
        for (int k = 0; k < period; ++k) {
            seq[t] += column.middleRows(k * block_rows, block_rows) * root_of_unity(period, static_cast<long long>(t) * k);
        }
    }
    return seq;
}

ComplexMatrix toeplitz_transform(const std::vector<ComplexMatrix>& seq, int period) {
    if (static_cast<int>(seq.size()) != period) {
        throw Error(ErrorKind::BadLength, "toeplitz_transform: " + std::to_string(seq.size()) +
                                              " operators for period " + std::to_string(period));
    }
    const auto hat = fourier_coefficients(seq);
    const auto rows = hat.front().rows();
    const auto cols = hat.front().cols();
    ComplexMatrix out(period * rows, period * cols);
    for (int r = 0; r < period; ++r) {
        for (int c = 0; c < period; ++c) {
            out.block(r * rows, c * cols, rows, cols) = hat[((r - c) % period + period) % period];
        }
    }
    return out;
}

LiftedSystem lift(const MultirateSystem& sys) {
    require_valid(sys);
    LiftedSystem out;
    out.m = sys.m;
    out.n = sys.n;
    out.period = sys.period();
    out.state_dim = sys.state_dim;
    out.input_dim = sys.input_dim;
    out.output_dim = sys.output_dim;
    out.mbar = sys.mbar();
    out.nbar = sys.nbar();
    out.A = toeplitz_transform(sys.A, out.period);
    out.B = toeplitz_transform(sys.B, out.period);
    out.C = toeplitz_transform(sys.C, out.period);
    out.D = toeplitz_transform(sys.D, out.period);
    out.N = modulation_matrix(out.period, out.state_dim);
    out.epsilon = root_of_unity(out.period, 1);
    return out;
}

ResolventMargin resolvent_margin(const LiftedSystem& lifted, Complex z, double tol) {
    ResolventMargin out;
    out.threshold = tol * (1.0 + std::abs(z) * lifted.A.norm());
    if (z == Complex(0.0) || lifted.state_dim == 0) {
        out.sigma_min = lifted.state_dim == 0 ? std::numeric_limits<double>::infinity() : smallest_singular_value(lifted.N);
        out.inside = true;
        return out;
    }
    out.sigma_min = smallest_singular_value(lifted.N - z * lifted.A);
    out.inside = out.sigma_min > out.threshold;
    return out;
}

bool in_harmonic_resolvent(const LiftedSystem& lifted, Complex z, double tol) {
    return resolvent_margin(lifted, z, tol).inside;
}

namespace {

void require_resolvent(const LiftedSystem& lifted, Complex z, double tol) {
    const auto margin = resolvent_margin(lifted, z, tol);
    if (!margin.inside) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "z = " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
            << "j is not in the harmonic resolvent set: sigma_min = " << margin.sigma_min
            << " <= threshold " << margin.threshold;
        throw Error(ErrorKind::NotInResolvent, msg.str());
    }
}

}  // namespace

ComplexMatrix central_transfer(const LiftedSystem& lifted, Complex z) {
    require_resolvent(lifted, z, 1e-9);
    if (lifted.state_dim == 0) return lifted.D;
    return z * lifted.C * solve_linear(lifted.N - z * lifted.A, lifted.B) + lifted.D;
}

TransferValue harmonic_transfer(const LiftedSystem& lifted, Complex z, double tol) {
    require_resolvent(lifted, z, tol);
    const ComplexMatrix pi_in = pi_block(lifted.n, 1.0, lifted.mbar, lifted.input_dim);
    const ComplexMatrix pi_out = pi_block(lifted.m, 1.0, lifted.nbar, lifted.output_dim);

    // One solve with n d_u right-hand sides.
    const ComplexMatrix b_pi = lifted.B * pi_in;
    ComplexMatrix central = lifted.D * pi_in;
    if (lifted.state_dim > 0) central += z * lifted.C * solve_linear(lifted.N - z * lifted.A, b_pi);

    TransferValue out;
    out.z = z;
    out.m = lifted.m;
    out.n = lifted.n;
    out.output_dim = lifted.output_dim;
    out.input_dim = lifted.input_dim;
    out.matrix = pi_out.adjoint() * central / static_cast<double>(lifted.mbar);
    return out;
}

TransferValue harmonic_transfer(const MultirateSystem& sys, Complex z, double tol) {
    return harmonic_transfer(lift(sys), z, tol);
}

bool detect_shorter_period(const MultirateSystem& sys, int q) {
    require_valid(sys);
    const int period = sys.period();
    if (q < 1 || period % q != 0) {
        throw Error(ErrorKind::NotDivisor, std::to_string(q) + " does not divide the central period " +
                                               std::to_string(period));
    }
    return operators_repeat_every(sys, period / q);
}

bool toeplitz_bands_only(const LiftedSystem& lifted, int q) {
    const int period = lifted.period;
    if (q < 1 || period % q != 0) {
        throw Error(ErrorKind::NotDivisor, std::to_string(q) + " does not divide " + std::to_string(period));
    }
    auto check = [&](const ComplexMatrix& toeplitz, Eigen::Index rows, Eigen::Index cols) {
        const double threshold = 1e-12 * toeplitz.norm();
        for (int r = 0; r < period; ++r) {
            for (int c = 0; c < period; ++c) {
                if ((r - c) % q == 0) continue;
                const auto block = toeplitz.block(r * rows, c * cols, rows, cols);
                if (block.size() > 0 && block.cwiseAbs().maxCoeff() > threshold) return false;
            }
        }
        return true;
    };
    return check(lifted.A, lifted.state_dim, lifted.state_dim) &&
           check(lifted.B, lifted.state_dim, lifted.input_dim) &&
           check(lifted.C, lifted.output_dim, lifted.state_dim) &&
           check(lifted.D, lifted.output_dim, lifted.input_dim);
}

TransferValue transfer_at_period(const MultirateSystem& sys, int k, Complex z, double tol) {
    return harmonic_transfer(reperiodize(sys, k), z, tol);
}

TransferValue transfer_from_first_column(const MultirateSystem& sys, Complex z, double tol) {
    const LiftedSystem lifted = lift(sys);
    TransferValue out;
    out.z = z;
    out.m = sys.m;
    out.n = sys.n;
    out.output_dim = sys.output_dim;
    out.input_dim = sys.input_dim;
    out.matrix = ComplexMatrix::Zero(static_cast<Eigen::Index>(sys.m) * sys.output_dim,
                                     static_cast<Eigen::Index>(sys.n) * sys.input_dim);
    for (int l = 0; l < sys.n; ++l) {
        const Complex rotated = z * root_of_unity(lifted.period, -l);
        const TransferValue column_source = harmonic_transfer(lifted, rotated, tol);
        for (int k = 0; k < sys.m; ++k) {
            const int source_row = ((k - l) % sys.m + sys.m) % sys.m;
            out.matrix.block(k * sys.output_dim, l * sys.input_dim, sys.output_dim, sys.input_dim) =
                column_source.block(source_row, 0);
        }
    }
    return out;
}

}  // namespace mrsys
