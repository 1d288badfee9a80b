#include "mrsys/system.hpp"

#include <numeric>
#include <sstream>
#include <string>

#include "mrsys/lifting.hpp"

namespace mrsys {

int MultirateSystem::c() const { return std::gcd(m, n); }

namespace {

void check_list(const std::vector<ComplexMatrix>& list, const char* name, int expected_length, int rows, int cols,
                std::vector<std::string>& violations) {
    if (static_cast<int>(list.size()) != expected_length) {
        std::ostringstream msg;
        msg << name << ": sequence length " << list.size() << " ≠ m·n̄ = " << expected_length;
        violations.push_back(msg.str());
    }
    for (std::size_t t = 0; t < list.size(); ++t) {
        if (list[t].rows() != rows || list[t].cols() != cols) {
            std::ostringstream msg;
            msg << name << "[" << t << "]: shape " << list[t].rows() << "x" << list[t].cols() << ", expected "
                << rows << "x" << cols;
            violations.push_back(msg.str());
        } else if (!all_finite(list[t])) {
            std::ostringstream msg;
            msg << name << "[" << t << "]: non-finite entry";
            violations.push_back(msg.str());
        }
    }
}

}  // namespace

bool operators_repeat_every(const MultirateSystem& sys, int shift) {
    const int period = sys.period();
    for (const auto* list : {&sys.A, &sys.B, &sys.C, &sys.D}) {
        for (int t = 0; t < period; ++t) {
            const ComplexMatrix diff = (*list)[(t + shift) % period] - (*list)[t];
            if (diff.size() > 0 && diff.cwiseAbs().maxCoeff() > 1e-12) return false;
        }
    }
    return true;
}

ValidationReport validate(const MultirateSystem& sys) {
    ValidationReport report;
    auto& v = report.violations;
    if (sys.m < 1 || sys.n < 1) {
        v.push_back("periods must be positive, got (m, n) = (" + std::to_string(sys.m) + ", " +
                    std::to_string(sys.n) + ")");
        return report;
    }
    if (sys.state_dim < 0 || sys.input_dim < 0 || sys.output_dim < 0) {
        v.push_back("dimensions must be nonnegative");
        return report;
    }
    const int period = sys.period();
    check_list(sys.A, "A", period, sys.state_dim, sys.state_dim, v);
    check_list(sys.B, "B", period, sys.state_dim, sys.input_dim, v);
    check_list(sys.C, "C", period, sys.output_dim, sys.state_dim, v);
    check_list(sys.D, "D", period, sys.output_dim, sys.input_dim, v);
    if (!report.ok()) return report;

    // The pair shrinks by the largest divisor q of c for which the central
    // system is already (T/q)-periodic.
    const int c = sys.c();
    int best = 1;
    for (int q = c; q > 1; --q) {
        if (c % q == 0 && operators_repeat_every(sys, sys.period() / q)) {
            best = q;
            break;
        }
    }
    report.minimal_pair = std::make_pair(sys.m / best, sys.n / best);
    return report;
}

void require_valid(const MultirateSystem& sys) {
    const auto report = validate(sys);
    if (report.ok()) return;
    std::string msg = "invalid multirate system:";
    for (const auto& violation : report.violations) msg += " " + violation + ";";
    throw Error(ErrorKind::DimensionMismatch, msg);
}

SimulationTrace simulate(const MultirateSystem& sys, const ComplexVector& x0, const VectorSequence& u, int steps) {
    require_valid(sys);
    if (steps < 1) throw Error(ErrorKind::BadLength, "simulate: steps must be positive");
    if (x0.size() != sys.state_dim) {
        throw Error(ErrorKind::DimensionMismatch, "simulate: x0 has length " + std::to_string(x0.size()) +
                                                      ", state dimension is " + std::to_string(sys.state_dim));
    }
    if (!u.values.empty() && u.dim != sys.input_dim) {
        throw Error(ErrorKind::DimensionMismatch, "simulate: input dimension " + std::to_string(u.dim) +
                                                      ", expected " + std::to_string(sys.input_dim));
    }
    if (u.start_index != 0) throw Error(ErrorKind::Misaligned, "simulate: input must start at t = 0");

    const int period = sys.period();
    const int mbar = sys.mbar();
    const int nbar = sys.nbar();

    SimulationTrace trace;
    trace.x0 = x0;
    const std::size_t physical_inputs = static_cast<std::size_t>((steps + mbar - 1) / mbar);
    trace.u = VectorSequence::zeros(sys.input_dim, 0, physical_inputs);
    for (std::size_t i = 0; i < physical_inputs && i < u.values.size(); ++i) trace.u.values[i] = u.values[i];

    trace.u_central = VectorSequence::zeros(sys.input_dim, 0, static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; t += mbar) trace.u_central.values[t] = trace.u.values[t / mbar];

    trace.x = VectorSequence::zeros(sys.state_dim, 0, static_cast<std::size_t>(steps) + 1);
    trace.y_central = VectorSequence::zeros(sys.output_dim, 0, static_cast<std::size_t>(steps));
    trace.x.values[0] = x0;
    for (int t = 0; t < steps; ++t) {
        const int phase = t % period;
        const ComplexVector& xt = trace.x.values[t];
        const ComplexVector& ut = trace.u_central.values[t];
        trace.x.values[t + 1] = sys.A[phase] * xt + sys.B[phase] * ut;
        trace.y_central.values[t] = sys.C[phase] * xt + sys.D[phase] * ut;
    }
    trace.y = downsample(trace.y_central, nbar);
    return trace;
}

MultirateSystem reperiodize(const MultirateSystem& sys, int k) {
    if (k < 1) throw Error(ErrorKind::BadLength, "reperiodize: factor must be positive");
    MultirateSystem out = sys;
    out.m = k * sys.m;
    out.n = k * sys.n;
    for (auto* list : {&out.A, &out.B, &out.C, &out.D}) {
        const auto base = *list;
        list->clear();
        for (int i = 0; i < k; ++i) list->insert(list->end(), base.begin(), base.end());
    }
    return out;
}

MultirateSystem shift_origin(const MultirateSystem& sys, long tau) {
    require_valid(sys);
    const long period = sys.period();
    const long offset = ((tau % period) + period) % period;
    MultirateSystem out = sys;
    for (auto [dst, src] : {std::pair{&out.A, &sys.A}, std::pair{&out.B, &sys.B}, std::pair{&out.C, &sys.C},
                            std::pair{&out.D, &sys.D}}) {
        for (long t = 0; t < period; ++t) (*dst)[t] = (*src)[(t + offset) % period];
    }
    return out;
}

MultirateSystem difference(const MultirateSystem& sys1, const MultirateSystem& sys2) {
    require_valid(sys1);
    require_valid(sys2);
    if (sys1.input_dim != sys2.input_dim || sys1.output_dim != sys2.output_dim) {
        throw Error(ErrorKind::IncompatibleDims, "difference: input/output dimensions differ");
    }
    if (sys1.mbar() != sys2.mbar() || sys1.nbar() != sys2.nbar()) {
        throw Error(ErrorKind::IncompatibleRatio, "difference: rate ratios m/n differ");
    }
    const int common = std::lcm(sys1.c(), sys2.c());
    const MultirateSystem a = reperiodize(sys1, common / sys1.c());
    const MultirateSystem b = reperiodize(sys2, common / sys2.c());

    MultirateSystem out;
    out.m = a.m;
    out.n = a.n;
    out.state_dim = a.state_dim + b.state_dim;
    out.input_dim = a.input_dim;
    out.output_dim = a.output_dim;
    const int period = out.period();
    for (int t = 0; t < period; ++t) {
        out.A.push_back(block_diagonal({a.A[t], b.A[t]}));
        ComplexMatrix input(out.state_dim, out.input_dim);
        input.topRows(a.state_dim) = a.B[t];
        input.bottomRows(b.state_dim) = b.B[t];
        out.B.push_back(input);
        ComplexMatrix output(out.output_dim, out.state_dim);
        output.leftCols(a.state_dim) = a.C[t];
        output.rightCols(b.state_dim) = -b.C[t];
        out.C.push_back(output);
        out.D.push_back(a.D[t] - b.D[t]);
    }
    return out;
}

SteadyState emp_steady_state(const MultirateSystem& sys, Complex z, const EmpCoefficients& u) {
    const LiftedSystem lifted = lift(sys);
    if (z == Complex(0.0)) throw Error(ErrorKind::NotInResolvent, "emp_steady_state: z must be nonzero");
    if (u.period != sys.n || static_cast<int>(u.coeffs.size()) != sys.n) {
        throw Error(ErrorKind::BadLength, "emp_steady_state: input coefficients must have period n = " +
                                              std::to_string(sys.n));
    }
    if (u.dim() != sys.input_dim) {
        throw Error(ErrorKind::DimensionMismatch, "emp_steady_state: input coefficient dimension mismatch");
    }
    const int mbar = sys.mbar();
    const int nbar = sys.nbar();
    const Complex input_base = int_power(z, mbar);
    if (std::abs(u.base - input_base) > 1e-12 * std::abs(input_base)) {
        throw Error(ErrorKind::BadLength, "emp_steady_state: input base must equal z^m̄");
    }
    const auto margin = resolvent_margin(lifted, z);
    if (!margin.inside) {
        throw Error(ErrorKind::NotInResolvent, "emp_steady_state: sigma_min = " + std::to_string(margin.sigma_min) +
                                                   " <= threshold " + std::to_string(margin.threshold));
    }

    const int period = lifted.period;
    const ComplexVector u_hat = u.stacked();
    const ComplexVector u_central = pi_block(sys.n, 1.0, mbar, sys.input_dim) * u_hat / static_cast<double>(mbar);
    ComplexVector x = ComplexVector::Zero(static_cast<Eigen::Index>(period) * sys.state_dim);
    if (sys.state_dim > 0) x = z * solve_linear(lifted.N - z * lifted.A, lifted.B * u_central);
    const ComplexVector y_central = lifted.C * x + lifted.D * u_central;
    const ComplexVector y = pi_block(sys.m, 1.0, nbar, sys.output_dim).adjoint() * y_central;

    SteadyState out;
    out.z = z;
    out.u = u;
    out.u_central = EmpCoefficients::from_stacked(u_central, period, z);
    out.x = EmpCoefficients::from_stacked(x, period, z);
    out.y_central = EmpCoefficients::from_stacked(y_central, period, z);
    out.y = EmpCoefficients::from_stacked(y, sys.m, int_power(z, nbar));
    out.x0 = ComplexVector::Zero(sys.state_dim);
    for (const auto& block : out.x.coeffs) out.x0 += block;
    return out;
}

}  // namespace mrsys
