#include "mrsys/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "mrsys/approx.hpp"
#include "mrsys/lifting.hpp"
#include "mrsys/signals.hpp"

namespace mrsys {

std::string_view to_string(PropertyStatus status) {
    switch (status) {
        case PropertyStatus::Pass: return "pass";
        case PropertyStatus::Fail: return "FAIL";
        case PropertyStatus::Skipped: return "skipped";
    }
    return "skipped";
}

bool VerifyReport::passed() const { return first_failure() == nullptr; }

const PropertyResult* VerifyReport::first_failure() const {
    for (const auto& r : results) {
        if (r.status == PropertyStatus::Fail) return &r;
    }
    return nullptr;
}

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    Complex normal() {
        std::normal_distribution<double> n(0.0, 1.0);
        const double re = n(engine_);
        return {re, n(engine_)};
    }
    ComplexVector vector(Eigen::Index size) {
        ComplexVector v(size);
        for (Eigen::Index i = 0; i < size; ++i) v(i) = normal();
        return v;
    }
    /// Uniform angle, radius uniform on [r_lo, r_hi].
    Complex annulus(double r_lo, double r_hi) {
        return std::polar(uniform(r_lo, r_hi), uniform(0.0, 2.0 * std::numbers::pi));
    }

private:
    std::mt19937_64 engine_;
};

double relative_error(const ComplexMatrix& got, const ComplexMatrix& want) {
    const double scale = std::max(want.norm(), std::numeric_limits<double>::min());
    return (got - want).norm() / scale;
}

// Accumulates the worst error over trials and turns it into a result.
class Check {
public:
    Check(std::string name, double tolerance) {
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void observe(double error, const std::string& where) {
        if (!(error <= result_.worst_error)) {
            result_.worst_error = error;
            if (!(error <= result_.tolerance)) worst_where_ = where;
        }
        ++observations_;
    }
    void fail(const std::string& why) { forced_failure_ = why; }
    void skip(const std::string& why) { skipped_ = why; }

    PropertyResult finish(const std::string& metric) {
        if (!forced_failure_.empty()) {
            result_.status = PropertyStatus::Fail;
            result_.detail = forced_failure_;
        } else if (!skipped_.empty()) {
            result_.status = PropertyStatus::Skipped;
            result_.detail = skipped_;
        } else if (observations_ == 0) {
            result_.status = PropertyStatus::Skipped;
            result_.detail = "no admissible samples";
        } else if (!(result_.worst_error <= result_.tolerance)) {
            result_.status = PropertyStatus::Fail;
            result_.detail = metric + " exceeded at " + worst_where_;
        } else {
            result_.status = PropertyStatus::Pass;
            result_.detail = metric + ", " + std::to_string(observations_) + " samples";
        }
        return result_;
    }

private:
    PropertyResult result_;
    std::string worst_where_;
    std::string forced_failure_;
    std::string skipped_;
    int observations_ = 0;
};

std::string describe(Complex z) {
    std::ostringstream s;
    s.precision(6);
    s << "z = " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "j";
    return s.str();
}

std::vector<int> divisors(int value) {
    std::vector<int> out;
    for (int d = 1; d <= value; ++d) {
        if (value % d == 0) out.push_back(d);
    }
    return out;
}

// Points with a comfortable resolvent margin so that comparisons measure the
// identities rather than the conditioning of N - z A.
std::optional<Complex> sample_point(Rng& rng, const std::function<bool(Complex)>& admissible) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const Complex z = rng.annulus(0.3, 1.5);
        if (admissible(z)) return z;
    }
    return std::nullopt;
}

bool comfortably_inside(const LiftedSystem& lifted, Complex z) { return resolvent_margin(lifted, z, 1e-4).inside; }

// Every rotation of z by a T-th root of unity has the same margin, so one
// check covers the structure and reconstruction properties as well.
bool inside_with_inflations(const LiftedSystem& lifted, Complex z, int max_factor) {
    for (int k = 1; k <= max_factor; ++k) {
        for (int i = 0; i < k; ++i) {
            if (!comfortably_inside(lifted, z * root_of_unity(k * lifted.period, i))) return false;
        }
    }
    return true;
}

PropertyResult check_sampler_identities(Rng& rng, int trials) {
    Check check("sampler_dft_identities", 1e-12);
    for (int trial = 0; trial < trials; ++trial) {
        const int period = rng.integer(1, 8);
        const int q = rng.integer(1, 4);
        const int dim = rng.integer(1, 2);
        const Complex z = rng.annulus(0.3, 1.5);
        const Complex zq = int_power(z, q);
        const ComplexMatrix pi = pi_block(period, 1.0, q, dim);
        const std::string where = describe(z) + ", T = " + std::to_string(period) + ", q = " + std::to_string(q);

        const ComplexVector v = rng.vector(static_cast<Eigen::Index>(period) * dim);
        const ComplexVector lhs1 = emp_analysis_matrix(q * period, z, dim) * (upsample_matrix(period, q, dim) * v);
        const ComplexVector rhs1 = pi * (emp_analysis_matrix(period, zq, dim) * v) / static_cast<double>(q);
        check.observe((lhs1 - rhs1).norm() / v.norm(), where + " (upsampled analysis)");

        const ComplexVector w = rng.vector(static_cast<Eigen::Index>(q) * period * dim);
        const ComplexVector lhs2 = emp_analysis_matrix(period, zq, dim) * (downsample_matrix(period, q, dim) * w);
        const ComplexVector rhs2 = pi.adjoint() * (emp_analysis_matrix(q * period, z, dim) * w);
        check.observe((lhs2 - rhs2).norm() / w.norm(), where + " (downsampled analysis)");

        const ComplexVector lhs3 = upsample_matrix(period, q, dim) * (emp_analysis_matrix(period, z, dim) * v);
        const ComplexVector rhs3 = emp_analysis_matrix(q * period, z, dim) * (pi_block(period, 1.0 / z, q, dim) * v);
        check.observe((lhs3 - rhs3).norm() / v.norm(), where + " (upsampled coefficients)");

        const ComplexVector lhs4 = downsample_matrix(period, q, dim) * (emp_analysis_matrix(q * period, z, dim) * w);
        const ComplexVector rhs4 = emp_analysis_matrix(period, z, dim) *
                                   (pi_block(period, std::conj(z), q, dim).adjoint() * w) / static_cast<double>(q);
        check.observe((lhs4 - rhs4).norm() / w.norm(), where + " (downsampled coefficients)");
    }
    return check.finish("max |error| / ||v||");
}

PropertyResult check_toeplitz_commutation(const LiftedSystem& lifted) {
    Check check("toeplitz_shift_commutation", 1e-12);
    const int period = lifted.period;
    const auto commutator = [&](const ComplexMatrix& toeplitz, int row_dim, int col_dim) {
        if (toeplitz.size() == 0) return 0.0;
        const ComplexMatrix left = cyclic_shift(period, row_dim, 1) * toeplitz;
        const ComplexMatrix right = toeplitz * cyclic_shift(period, col_dim, 1);
        return (left - right).norm() / std::max(toeplitz.norm(), std::numeric_limits<double>::min());
    };
    check.observe(commutator(lifted.A, lifted.state_dim, lifted.state_dim), "A");
    check.observe(commutator(lifted.B, lifted.state_dim, lifted.input_dim), "B");
    check.observe(commutator(lifted.C, lifted.output_dim, lifted.state_dim), "C");
    check.observe(commutator(lifted.D, lifted.output_dim, lifted.input_dim), "D");
    return check.finish("relative commutator norm");
}

PropertyResult check_resolvent_rotation(const LiftedSystem& lifted, Rng& rng, int trials) {
    Check check("resolvent_rotation", 1e-8);
    if (lifted.state_dim == 0) {
        check.skip("state dimension 0");
        return check.finish("");
    }
    for (int trial = 0; trial < trials; ++trial) {
        const Complex z = rng.annulus(0.3, 1.5);
        const double base = smallest_singular_value(lifted.N - z * lifted.A);
        const double rotated = smallest_singular_value(lifted.N - lifted.epsilon * z * lifted.A);
        const double floor = 1e-12 * (1.0 + std::abs(z) * lifted.A.norm());
        check.observe(std::abs(rotated - base) / std::max(base, floor), describe(z));
    }
    return check.finish("relative change of sigma_min");
}

PropertyResult check_structure(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng, int trials) {
    Check structure("transfer_structure", 1e-9);
    for (int trial = 0; trial < trials; ++trial) {
        const auto z = sample_point(rng, [&](Complex w) { return comfortably_inside(lifted, w); });
        if (!z) break;
        const TransferValue g = harmonic_transfer(lifted, *z);
        const TransferValue g_rot = harmonic_transfer(lifted, lifted.epsilon * *z);
        double worst = 0.0;
        for (int k = 0; k < sys.m; ++k) {
            for (int l = 0; l < sys.n; ++l) {
                const ComplexMatrix diff = g_rot.block((k + 1) % sys.m, (l + 1) % sys.n) - g.block(k, l);
                worst = std::max(worst, diff.norm());
            }
        }
        structure.observe(worst / std::max(g.matrix.norm(), std::numeric_limits<double>::min()), describe(*z));
    }
    return structure.finish("max block error / ||G(z)||_F");
}

PropertyResult check_reconstruction(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng, int trials) {
    Check check("first_column_reconstruction", 1e-9);
    for (int trial = 0; trial < trials; ++trial) {
        const auto z = sample_point(rng, [&](Complex w) { return comfortably_inside(lifted, w); });
        if (!z) break;
        const TransferValue direct = harmonic_transfer(lifted, *z);
        const TransferValue rebuilt = transfer_from_first_column(sys, *z);
        check.observe(relative_error(rebuilt.matrix, direct.matrix), describe(*z));
    }
    return check.finish("relative error");
}

// max_t |w|^t ||a_t - b_t|| / max_t |w|^t ||b_t||
double weighted_error(const VectorSequence& got, const VectorSequence& want, Complex base, long count) {
    double num = 0.0;
    double den = std::numeric_limits<double>::min();
    for (long t = 0; t < count; ++t) {
        const double weight = std::pow(std::abs(base), static_cast<double>(t));
        num = std::max(num, weight * (got.at(t) - want.at(t)).norm());
        den = std::max(den, weight * want.at(t).norm());
    }
    return num / den;
}

std::vector<PropertyResult> check_steady_state(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng,
                                               int trials) {
    Check sim("emp_steady_state_simulation", 1e-8);
    Check freq("emp_steady_state_transfer", 1e-9);
    const int period = sys.period();
    for (int trial = 0; trial < trials; ++trial) {
        const auto z = sample_point(rng, [&](Complex w) { return comfortably_inside(lifted, w); });
        if (!z) break;
        EmpCoefficients u;
        u.period = sys.n;
        u.base = int_power(*z, sys.mbar());
        for (int k = 0; k < sys.n; ++k) u.coeffs.push_back(rng.vector(sys.input_dim));
        const SteadyState ss = emp_steady_state(sys, *z, u);

        const ComplexVector predicted = harmonic_transfer(lifted, *z).matrix * u.stacked();
        freq.observe(relative_error(ss.y.stacked(), predicted), describe(*z));

        const int steps = 3 * period;
        const VectorSequence input = emp_synthesize(u, 0, steps / sys.mbar());
        const SimulationTrace trace = simulate(sys, ss.x0, input, steps);
        const VectorSequence y_emp = emp_synthesize(ss.y, 0, static_cast<long>(trace.y.size()));
        const VectorSequence x_emp = emp_synthesize(ss.x, 0, steps + 1);
        double err = weighted_error(trace.y, y_emp, ss.y.base, static_cast<long>(trace.y.size()));
        if (sys.state_dim > 0) err = std::max(err, weighted_error(trace.x, x_emp, *z, steps + 1));
        sim.observe(err, describe(*z));
    }
    return {sim.finish("weighted relative error over 3 periods"), freq.finish("relative error of y vs G(z)u")};
}

PropertyResult check_characteristic(const MultirateSystem& sys, Rng& rng, int trials) {
    Check check("characteristic_condition", 1e-12);
    const int period = sys.period();
    for (int trial = 0; trial < trials; ++trial) {
        const int support = rng.integer(1, 3 * sys.n);
        const int steps = period * (rng.integer(2, 4) + (sys.n + support) / std::max(1, sys.n));
        const long inputs = steps / sys.mbar();
        VectorSequence u = VectorSequence::zeros(sys.input_dim, 0, static_cast<std::size_t>(inputs));
        for (int t = sys.n; t < std::min<long>(sys.n + support, inputs); ++t) u.values[t] = rng.vector(sys.input_dim);
        VectorSequence advanced = VectorSequence::zeros(sys.input_dim, 0, static_cast<std::size_t>(inputs));
        for (long t = 0; t + sys.n < inputs; ++t) advanced.values[t] = u.values[t + sys.n];

        const ComplexVector zero = ComplexVector::Zero(sys.state_dim);
        const auto y = simulate(sys, zero, u, steps).y;
        const auto y_adv = simulate(sys, zero, advanced, steps).y;
        double num = 0.0;
        double den = std::numeric_limits<double>::min();
        for (long t = 0; t + sys.m < static_cast<long>(y.size()); ++t) {
            num = std::max(num, (y_adv.at(t) - y.at(t + sys.m)).norm());
            den = std::max(den, y.at(t + sys.m).norm());
        }
        check.observe(num / den, "trial " + std::to_string(trial));
    }
    return check.finish("relative error of shifted outputs");
}

PropertyResult check_time_shift(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng, int trials) {
    Check check("time_shift_conjugation", 1e-9);
    const MultirateSystem shifted = shift_origin(sys, static_cast<long>(sys.mbar()) * sys.nbar());
    const LiftedSystem shifted_lifted = lift(shifted);
    const ComplexMatrix left = modulation_matrix(sys.m, sys.output_dim, sys.mbar());
    const ComplexMatrix right = modulation_matrix(sys.n, sys.input_dim, -static_cast<long long>(sys.nbar()));
    for (int trial = 0; trial < trials; ++trial) {
        const auto z = sample_point(rng, [&](Complex w) {
            return comfortably_inside(lifted, w) && comfortably_inside(shifted_lifted, w);
        });
        if (!z) break;
        const ComplexMatrix want = left * harmonic_transfer(lifted, *z).matrix * right;
        check.observe(relative_error(harmonic_transfer(shifted_lifted, *z).matrix, want), describe(*z));
    }
    return check.finish("relative error");
}

PropertyResult check_inflation(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng, int trials) {
    Check check("inflation_identity", 1e-10);
    for (int trial = 0; trial < trials; ++trial) {
        const int k = 2 + trial % 2;
        const auto z = sample_point(rng, [&](Complex w) { return inside_with_inflations(lifted, w, k); });
        if (!z) break;
        const TransferValue g = harmonic_transfer(lifted, *z);
        const TransferValue gk = transfer_at_period(sys, k, *z);
        const ComplexMatrix lhs = gk.matrix * upsample_matrix(sys.n, k, sys.input_dim);
        const ComplexMatrix rhs = upsample_matrix(sys.m, k, sys.output_dim) * g.matrix;
        check.observe(relative_error(lhs, rhs), describe(*z) + ", k = " + std::to_string(k));
    }
    return check.finish("relative error");
}

PropertyResult check_period_detection(const MultirateSystem& sys, const LiftedSystem& lifted) {
    Check check("shorter_period_detection", 0.0);
    for (int q : divisors(sys.period())) {
        const bool direct = detect_shorter_period(sys, q);
        const bool bands = toeplitz_bands_only(lifted, q);
        if (direct != bands) check.fail("time-domain and band tests disagree for q = " + std::to_string(q));
        check.observe(0.0, "q = " + std::to_string(q));
    }
    return check.finish("agreement of time-domain and band tests");
}

PropertyResult check_approximant_transfer(const MultirateSystem& sys, const LiftedSystem& lifted, Rng& rng,
                                          int trials) {
    Check check("approximant_transfer", 1e-9);
    if (sys.c() == 1) {
        check.skip("skipped: gcd(m, n) = 1, no shorter period");
        return check.finish("");
    }
    for (int q : divisors(sys.c())) {
        if (q == 1) continue;
        for (const ApproxVariant variant : {ApproxVariant::MInverseRight, ApproxVariant::MInverseLeft}) {
            const MultirateSystem approx = optimal_approximant(sys, q, variant);
            const LiftedSystem approx_lifted = lift(approx);
            for (int trial = 0; trial < std::max(1, trials / 4); ++trial) {
                const auto z = sample_point(rng, [&](Complex w) {
                    return comfortably_inside(lifted, w) && comfortably_inside(approx_lifted, w);
                });
                if (!z) break;
                const ComplexMatrix want = downsampled_transfer(sys, q, *z);
                check.observe(relative_error(harmonic_transfer(approx_lifted, *z).matrix, want),
                              describe(*z) + ", q = " + std::to_string(q) + ", variant " +
                                  std::to_string(static_cast<int>(variant)));
            }
        }
    }
    return check.finish("relative error against the downsampled transfer");
}

std::vector<PropertyResult> check_hs(const MultirateSystem& sys) {
    Check agreement("hs_method_agreement", 1e-7);
    Check pythagoras("hs_pythagoras", 1e-7);
    Check inflation("hs_inflation_invariance", 1e-8);
    HsReport norm;
    try {
        norm = hs_norm(sys, HsMethod::Both);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unstable) throw;
        for (Check* c : {&agreement, &pythagoras, &inflation}) c->skip("skipped: unstable");
        return {agreement.finish(""), pythagoras.finish(""), inflation.finish("")};
    }
    agreement.observe(std::abs(norm.series_value - norm.lyapunov_value) /
                          std::max(norm.lyapunov_value, std::numeric_limits<double>::min()),
                      "series vs lyapunov");

    const double total = norm.value * norm.value;
    if (sys.c() == 1) pythagoras.skip("skipped: gcd(m, n) = 1, no shorter period");
    for (int q : divisors(sys.c())) {
        if (q == 1) continue;
        const MultirateSystem approx = optimal_approximant(sys, q);
        const double kept = std::pow(hs_norm(approx, HsMethod::Lyapunov).value, 2);
        const double lost = std::pow(hs_distance(sys, approx, HsMethod::Lyapunov).value, 2);
        pythagoras.observe(std::abs(kept + lost - total) / std::max(total, std::numeric_limits<double>::min()),
                           "q = " + std::to_string(q));
    }

    for (int k : {2, 3}) {
        const double inflated = hs_norm(reperiodize(sys, k), HsMethod::Lyapunov).value;
        inflation.observe(std::abs(inflated - norm.value) / std::max(norm.value, std::numeric_limits<double>::min()),
                          "k = " + std::to_string(k));
    }
    return {agreement.finish("relative difference"), pythagoras.finish("relative defect of |G|^2"),
            inflation.finish("relative difference")};
}

}  // namespace

VerifyReport verify_system(const MultirateSystem& sys, int trials, std::uint64_t seed) {
    require_valid(sys);
    if (trials < 1) throw Error(ErrorKind::BadLength, "verify: trials must be positive");
    VerifyReport report;
    report.seed = seed;
    report.trials = trials;
    Rng rng(seed);
    const LiftedSystem lifted = lift(sys);

    auto& r = report.results;
    r.push_back(check_sampler_identities(rng, trials));
    r.push_back(check_toeplitz_commutation(lifted));
    r.push_back(check_resolvent_rotation(lifted, rng, trials));
    r.push_back(check_structure(sys, lifted, rng, trials));
    r.push_back(check_reconstruction(sys, lifted, rng, trials));
    for (auto& res : check_steady_state(sys, lifted, rng, trials)) r.push_back(std::move(res));
    r.push_back(check_characteristic(sys, rng, trials));
    r.push_back(check_time_shift(sys, lifted, rng, trials));
    r.push_back(check_inflation(sys, lifted, rng, trials));
    r.push_back(check_period_detection(sys, lifted));
    r.push_back(check_approximant_transfer(sys, lifted, rng, trials));
    for (auto& res : check_hs(sys)) r.push_back(std::move(res));
    return report;
}

}  // namespace mrsys
