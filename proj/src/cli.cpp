#include "mrsys/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrsys/approx.hpp"
#include "mrsys/io.hpp"
#include "mrsys/lifting.hpp"
#include "mrsys/system.hpp"
#include "mrsys/verify.hpp"

namespace mrsys::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return kExitUsage;
        case ErrorKind::NotInResolvent: return kExitNotInResolvent;
        case ErrorKind::Unstable: return kExitUnstable;
        case ErrorKind::NotDivisor:
        case ErrorKind::BadTarget: return kExitNotDivisor;
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ShapeMismatch:
        case ErrorKind::BadLength:
        case ErrorKind::Misaligned:
        case ErrorKind::IncompatibleRatio:
        case ErrorKind::IncompatibleDims: return kExitDimensions;
        case ErrorKind::Singular:
        case ErrorKind::NotConverged: return kExitNumerical;
    }
    return kExitNumerical;
}

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& a) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(complex_json(a(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

void print_matrix(std::ostream& out, const ComplexMatrix& a, const std::string& indent) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        out << indent;
        for (Eigen::Index c = 0; c < a.cols(); ++c) out << (c ? "  " : "") << format_complex(a(r, c));
        out << "\n";
    }
}

json sequence_json(const VectorSequence& seq) {
    json out = json::array();
    for (const auto& v : seq.values) {
        json row = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(complex_json(v(i)));
        out.push_back(std::move(row));
    }
    return out;
}

struct EvalOptions {
    std::string file;
    std::string z = "";
    int period_factor = 1;
    double tol = 1e-9;
    std::string format = "text";
};

struct NormOptions {
    std::vector<std::string> files;
    std::string method = "both";
    double tol = 1e-10;
    std::string format = "text";
};

struct ApproxOptions {
    std::string file;
    std::optional<int> q;
    std::optional<int> target_c;
    int variant = 1;
    std::string output;
    std::string format = "text";
};

struct SimulateOptions {
    std::string file;
    std::string input;
    std::string x0;
    int steps = 0;
    std::string format = "csv";
};

struct VerifyOptions {
    std::string file;
    int trials = 50;
    std::uint64_t seed = 1;
    std::string format = "text";
};

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
    const MultirateSystem sys = load_system(opt.file);
    const Complex z = parse_complex_pair(opt.z);
    const MultirateSystem evaluated = opt.period_factor == 1 ? sys : reperiodize(sys, opt.period_factor);
    const LiftedSystem lifted = lift(evaluated);
    const ResolventMargin margin = resolvent_margin(lifted, z, opt.tol);
    const TransferValue g = harmonic_transfer(lifted, z, opt.tol);

    if (opt.format == "json") {
        json doc = {{"command", "eval"},
                    {"z", complex_json(z)},
                    {"period_factor", opt.period_factor},
                    {"tol", opt.tol},
                    {"m", g.m},
                    {"n", g.n},
                    {"output_dim", g.output_dim},
                    {"input_dim", g.input_dim},
                    {"sigma_min", margin.sigma_min},
                    {"threshold", margin.threshold},
                    {"matrix", matrix_json(g.matrix)}};
        out << doc.dump(2) << "\n";
        return kExitOk;
    }
    out << "G(z) at z = " << format_complex(z) << ", (m, n) = (" << g.m << ", " << g.n << "), blocks "
        << g.output_dim << "x" << g.input_dim << ", period factor " << opt.period_factor << "\n";
    print_matrix(out, g.matrix, "  ");
    out << "sigma_min " << format_real(margin.sigma_min) << ", threshold " << format_real(margin.threshold)
        << ", tol " << format_real(opt.tol) << "\n";
    return kExitOk;
}

json report_json(const HsReport& r, double tol) {
    return {{"value", r.value},
            {"method", std::string(to_string(r.method))},
            {"tol", tol},
            {"spectral_radius_bound", r.spectral_radius_bound},
            {"terms_used", r.terms_used},
            {"converged", r.converged},
            {"series_value", r.series_value},
            {"lyapunov_value", r.lyapunov_value}};
}

void print_report(std::ostream& out, const char* label, const HsReport& r, double tol) {
    out << label << " " << format_real(r.value) << "\n"
        << "method " << to_string(r.method) << ", tol " << format_real(tol) << "\n"
        << "spectral radius bound " << format_real(r.spectral_radius_bound) << "\n";
    if (r.method != HsMethod::Lyapunov) out << "series terms " << r.terms_used << "\n";
    if (r.method == HsMethod::Both) {
        out << "series " << format_real(r.series_value) << ", lyapunov " << format_real(r.lyapunov_value) << "\n";
    }
    out << "converged " << (r.converged ? "yes" : "no") << "\n";
}

int cmd_norm(const NormOptions& opt, std::ostream& out) {
    const HsMethod method = parse_hs_method(opt.method);
    const MultirateSystem first = load_system(opt.files.at(0));
    HsReport report;
    if (opt.files.size() == 1) {
        report = hs_norm(first, method, opt.tol);
    } else {
        report = hs_distance(first, load_system(opt.files.at(1)), method, opt.tol);
    }
    const char* label = opt.files.size() == 1 ? "norm" : "distance";
    if (opt.format == "json") {
        json doc = report_json(report, opt.tol);
        doc["command"] = "norm";
        doc["quantity"] = label;
        out << doc.dump(2) << "\n";
    } else {
        print_report(out, label, report, opt.tol);
    }
    return report.converged ? kExitOk : kExitNumerical;
}

int cmd_approx(const ApproxOptions& opt, std::ostream& out) {
    const MultirateSystem sys = load_system(opt.file);
    std::optional<ApproxTarget> target;
    int q = 0;
    if (opt.target_c) {
        target = reduce_target(sys.c(), *opt.target_c);
        q = target->q;
    } else {
        q = *opt.q;
    }
    const auto variant = opt.variant == 2 ? ApproxVariant::MInverseLeft : ApproxVariant::MInverseRight;
    const MultirateSystem approx = optimal_approximant(sys, q, variant);
    if (!opt.output.empty()) save_system(approx, opt.output);

    std::optional<HsReport> distance;
    std::string distance_note;
    try {
        distance = hs_distance(sys, approx);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unstable) throw;
        distance_note = "not finite (unstable source)";
    }

    if (opt.format == "json") {
        json doc = {{"command", "approx"},
                    {"q", q},
                    {"variant", opt.variant},
                    {"m", approx.m},
                    {"n", approx.n},
                    {"state_dim", approx.state_dim},
                    {"output", opt.output},
                    {"system", json::parse(dump_system(approx))}};
        if (target) {
            doc["target"] = {{"c", target->c},
                             {"c_hat", target->c_hat},
                             {"c_tilde", target->c_tilde},
                             {"q", target->q},
                             {"inflation", target->c_hat / target->c_tilde}};
        }
        doc["distance"] = distance ? report_json(*distance, 1e-10) : json(nullptr);
        out << doc.dump(2) << "\n";
        return kExitOk;
    }
    if (target) {
        out << "target c_hat " << target->c_hat << ": c " << target->c << ", c_tilde " << target->c_tilde << ", q "
            << target->q << ", optimum is the " << target->c_hat / target->c_tilde << "-inflate of the system below\n";
    }
    out << "approximant (m, n) = (" << approx.m << ", " << approx.n << "), state dim " << approx.state_dim
        << ", q " << q << ", variant " << opt.variant << "\n";
    if (!opt.output.empty()) out << "written to " << opt.output << "\n";
    if (distance) {
        out << "distance " << format_real(distance->value) << " (method " << to_string(distance->method) << ", tol "
            << format_real(1e-10) << ")\n";
    } else {
        out << "distance " << distance_note << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
    const MultirateSystem sys = load_system(opt.file);
    VectorSequence u = VectorSequence::zeros(sys.input_dim, 0, 0);
    if (!opt.input.empty()) u = parse_csv_samples(read_text_file(opt.input), sys.input_dim);
    ComplexVector x0 = ComplexVector::Zero(sys.state_dim);
    if (!opt.x0.empty()) x0 = parse_csv_vector(read_text_file(opt.x0), sys.state_dim);
    const SimulationTrace trace = simulate(sys, x0, u, opt.steps);

    if (opt.format == "json") {
        json doc = {{"command", "simulate"},
                    {"steps", opt.steps},
                    {"mbar", sys.mbar()},
                    {"nbar", sys.nbar()},
                    {"u", sequence_json(trace.u)},
                    {"x", sequence_json(trace.x)},
                    {"y_central", sequence_json(trace.y_central)},
                    {"y", sequence_json(trace.y)}};
        out << doc.dump(2) << "\n";
    } else {
        out << trace_to_csv(sys, trace);
    }
    return kExitOk;
}

int cmd_verify(VerifyOptions opt, std::ostream& out, std::ostream& err) {
    if (const char* env = std::getenv("MRSYS_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long parsed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw Error(ErrorKind::Parse, "MRSYS_SEED must be an unsigned integer");
        opt.seed = parsed;
    }
    const MultirateSystem sys = load_system(opt.file);
    const VerifyReport report = verify_system(sys, opt.trials, opt.seed);

    if (opt.format == "json") {
        json results = json::array();
        for (const auto& r : report.results) {
            results.push_back({{"name", r.name},
                               {"status", std::string(to_string(r.status))},
                               {"worst_error", r.worst_error},
                               {"tolerance", r.tolerance},
                               {"detail", r.detail}});
        }
        json doc = {{"command", "verify"},
                    {"seed", report.seed},
                    {"trials", report.trials},
                    {"passed", report.passed()},
                    {"results", results}};
        out << doc.dump(2) << "\n";
    } else {
        out << "seed " << report.seed << ", trials " << report.trials << "\n";
        for (const auto& r : report.results) {
            out << to_string(r.status) << "  " << r.name;
            if (r.status != PropertyStatus::Skipped) {
                out << "  worst " << format_real(r.worst_error) << "  tol " << format_real(r.tolerance);
            }
            out << "  (" << r.detail << ")\n";
        }
    }
    if (const PropertyResult* failure = report.first_failure()) {
        err << "verify failed: " << failure->name << ": " << failure->detail << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis and optimal shorter-period approximation of multirate linear systems", "mrsys"};
    app.require_subcommand(1);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate the harmonic transfer function at one point");
    eval_cmd->add_option("file", eval.file, "System file")->required();
    eval_cmd->add_option("--z", eval.z, "Evaluation point RE,IM")->required();
    eval_cmd->add_option("--period-factor", eval.period_factor, "Evaluate at the inflated period (k m, k n)")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--tol", eval.tol, "Resolvent membership tolerance")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--format", eval.format)->check(CLI::IsMember({"text", "json"}));

    NormOptions norm;
    auto* norm_cmd = app.add_subcommand("norm", "Hilbert-Schmidt norm of one system or distance between two");
    norm_cmd->add_option("files", norm.files, "One or two system files")->required()->expected(1, 2);
    norm_cmd->add_option("--method", norm.method)->check(CLI::IsMember({"both", "series", "lyapunov"}));
    norm_cmd->add_option("--hs-tol", norm.tol, "Relative accuracy target")->check(CLI::PositiveNumber);
    norm_cmd->add_option("--format", norm.format)->check(CLI::IsMember({"text", "json"}));

    ApproxOptions approx;
    int approx_q = 0;
    int approx_target = 0;
    auto* approx_cmd = app.add_subcommand("approx", "Optimal shorter-period approximant");
    approx_cmd->add_option("file", approx.file, "System file")->required();
    auto* q_opt = approx_cmd->add_option("--q", approx_q, "Period reduction factor, must divide gcd(m, n)");
    auto* target_opt = approx_cmd->add_option("--target-c", approx_target, "Target multirate factor c_hat < c");
    q_opt->excludes(target_opt);
    approx_cmd->add_option("--variant", approx.variant)->check(CLI::IsMember({1, 2}));
    approx_cmd->add_option("-o,--output", approx.output, "Write the approximant here");
    approx_cmd->add_option("--format", approx.format)->check(CLI::IsMember({"text", "json"}));

    SimulateOptions simulate_opt;
    auto* simulate_cmd = app.add_subcommand("simulate", "Time-domain simulation from t = 0");
    simulate_cmd->add_option("file", simulate_opt.file, "System file")->required();
    simulate_cmd->add_option("--input", simulate_opt.input, "CSV of physical input samples, one row per sample");
    simulate_cmd->add_option("--x0", simulate_opt.x0, "CSV holding the initial state");
    simulate_cmd->add_option("--steps", simulate_opt.steps, "Central time steps")->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--format", simulate_opt.format)->check(CLI::IsMember({"csv", "json"}));

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run the property suites against a system");
    verify_cmd->add_option("file", verify.file, "System file")->required();
    verify_cmd->add_option("--trials", verify.trials)->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", verify.seed, "Random seed (MRSYS_SEED overrides)");
    verify_cmd->add_option("--format", verify.format)->check(CLI::IsMember({"text", "json"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (approx_cmd->parsed()) {
            if (q_opt->count() == 0 && target_opt->count() == 0) {
                throw CLI::RequiredError("approx needs --q or --target-c");
            }
            if (q_opt->count() > 0) approx.q = approx_q;
            if (target_opt->count() > 0) approx.target_c = approx_target;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (eval_cmd->parsed()) return cmd_eval(eval, out);
        if (norm_cmd->parsed()) return cmd_norm(norm, out);
        if (approx_cmd->parsed()) return cmd_approx(approx, out);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate_opt, out);
        if (verify_cmd->parsed()) return cmd_verify(verify, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace mrsys::cli
