#include "mrsys/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mrsys {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

int read_int(const json& doc, const char* key, const char* where) {
    if (!doc.contains(key)) parse_error(std::string(where) + ": missing key \"" + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_number_integer()) parse_error(std::string(where) + ": \"" + key + "\" must be an integer");
    return v.get<int>();
}

Complex read_scalar(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        parse_error(where + ": complex scalars are written [re, im]");
    }
    const Complex out(v[0].get<double>(), v[1].get<double>());
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) parse_error(where + ": non-finite entry");
    return out;
}

ComplexMatrix read_matrix(const json& v, int rows, int cols, const std::string& where) {
    if (!v.is_array()) parse_error(where + ": matrix must be an array of rows");
    // A matrix with zero rows or columns is written as [] or as rows of [].
    if (rows == 0 || cols == 0) {
        if (v.size() != static_cast<std::size_t>(rows)) {
            parse_error(where + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(v.size()));
        }
        for (const auto& row : v) {
            if (!row.is_array() || !row.empty()) parse_error(where + ": expected empty rows");
        }
        return ComplexMatrix(rows, cols);
    }
    if (v.size() != static_cast<std::size_t>(rows)) {
        parse_error(where + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(v.size()));
    }
    ComplexMatrix out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = v[r];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
            parse_error(where + " row " + std::to_string(r) + ": expected " + std::to_string(cols) + " entries");
        }
        for (int c = 0; c < cols; ++c) {
            out(r, c) = read_scalar(row[c], where + "(" + std::to_string(r) + "," + std::to_string(c) + ")");
        }
    }
    return out;
}

std::vector<ComplexMatrix> read_list(const json& doc, const char* key, int length, int rows, int cols) {
    if (!doc.contains(key)) parse_error(std::string("missing key \"") + key + "\"");
    const json& v = doc.at(key);
    if (!v.is_array()) parse_error(std::string(key) + " must be an array of matrices");
    if (v.size() != static_cast<std::size_t>(length)) {
        parse_error(std::string(key) + ": sequence length " + std::to_string(v.size()) + " ≠ lcm(m, n) = " +
                    std::to_string(length));
    }
    std::vector<ComplexMatrix> out;
    for (int t = 0; t < length; ++t) out.push_back(read_matrix(v[t], rows, cols, std::string(key) + "[" + std::to_string(t) + "]"));
    return out;
}

json matrix_json(const ComplexMatrix& a) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = s.find(sep, begin);
        out.push_back(s.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
        if (pos == std::string_view::npos) break;
        begin = pos + 1;
    }
    return out;
}

// Rows of cells, skipping blank and '#' lines.
std::vector<std::vector<std::string_view>> csv_rows(std::string_view text) {
    std::vector<std::vector<std::string_view>> rows;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        rows.push_back(split(line, ','));
    }
    return rows;
}

bool try_parse_row(const std::vector<std::string_view>& cells, std::vector<Complex>& out) {
    out.clear();
    try {
        for (auto cell : cells) out.push_back(parse_complex(cell));
    } catch (const Error&) {
        return false;
    }
    return true;
}

}  // namespace

MultirateSystem parse_system(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        parse_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) parse_error("system file must hold a JSON object");

    MultirateSystem sys;
    sys.m = read_int(doc, "m", "system");
    sys.n = read_int(doc, "n", "system");
    if (sys.m < 1 || sys.n < 1) parse_error("m and n must be positive");
    if (!doc.contains("dims") || !doc.at("dims").is_object()) parse_error("missing object \"dims\"");
    const json& dims = doc.at("dims");
    sys.state_dim = read_int(dims, "state", "dims");
    sys.input_dim = read_int(dims, "input", "dims");
    sys.output_dim = read_int(dims, "output", "dims");
    if (sys.state_dim < 0 || sys.input_dim < 0 || sys.output_dim < 0) parse_error("dims must be nonnegative");

    const int period = sys.period();
    sys.A = read_list(doc, "A", period, sys.state_dim, sys.state_dim);
    sys.B = read_list(doc, "B", period, sys.state_dim, sys.input_dim);
    sys.C = read_list(doc, "C", period, sys.output_dim, sys.state_dim);
    sys.D = read_list(doc, "D", period, sys.output_dim, sys.input_dim);

    const auto report = validate(sys);
    if (!report.ok()) {
        std::string msg = "invalid system:";
        for (const auto& v : report.violations) msg += " " + v + ";";
        parse_error(msg);
    }
    return sys;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

MultirateSystem load_system(const std::filesystem::path& path) {
    try {
        return parse_system(read_text_file(path));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Parse) throw;
        throw Error(ErrorKind::Parse, path.string() + ": " + std::string(e.what()).substr(7));
    }
}

std::string dump_system(const MultirateSystem& sys, int indent) {
    require_valid(sys);
    const std::string pad(static_cast<std::size_t>(std::max(indent, 0)), ' ');
    std::ostringstream out;
    out << "{\n"
        << pad << "\"m\": " << sys.m << ",\n"
        << pad << "\"n\": " << sys.n << ",\n"
        << pad << "\"dims\": {\"state\": " << sys.state_dim << ", \"input\": " << sys.input_dim
        << ", \"output\": " << sys.output_dim << "},\n";
    const std::pair<const char*, const std::vector<ComplexMatrix>*> lists[] = {
        {"A", &sys.A}, {"B", &sys.B}, {"C", &sys.C}, {"D", &sys.D}};
    for (std::size_t i = 0; i < 4; ++i) {
        out << pad << "\"" << lists[i].first << "\": [\n";
        const auto& list = *lists[i].second;
        for (std::size_t t = 0; t < list.size(); ++t) {
            out << pad << pad << matrix_json(list[t]).dump() << (t + 1 < list.size() ? ",\n" : "\n");
        }
        out << pad << "]" << (i < 3 ? ",\n" : "\n");
    }
    out << "}\n";
    return out.str();
}

void save_system(const MultirateSystem& sys, const std::filesystem::path& path) {
    const std::string text = dump_system(sys);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
    out << text;
}

std::string format_real(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ec == std::errc() ? ptr : buffer);
}

std::string format_complex(Complex value) {
    std::string out = format_real(value.real());
    const std::string im = format_real(value.imag());
    if (im.front() != '-') out += '+';
    return out + im + "j";
}

Complex parse_complex(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) parse_error("empty complex value");
    double re = 0.0;
    if (s.back() != 'j' && s.back() != 'i') {
        if (!parse_double(s, re)) parse_error("cannot parse complex value '" + std::string(text) + "'");
        return {re, 0.0};
    }
    s.remove_suffix(1);
    // The imaginary part starts at the last sign that is not an exponent sign.
    std::size_t split_at = std::string_view::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split_at = i;
            break;
        }
    }
    double im = 0.0;
    const std::string_view re_part = split_at == std::string_view::npos ? std::string_view{} : s.substr(0, split_at);
    std::string_view im_part = split_at == std::string_view::npos ? s : s.substr(split_at);
    if (im_part == "+" || im_part == "-" || im_part.empty()) {
        im = im_part == "-" ? -1.0 : 1.0;
    } else if (!parse_double(im_part, im)) {
        parse_error("cannot parse complex value '" + std::string(text) + "'");
    }
    if (!re_part.empty() && !parse_double(re_part, re)) {
        parse_error("cannot parse complex value '" + std::string(text) + "'");
    }
    return {re, im};
}

Complex parse_complex_pair(std::string_view text) {
    const auto parts = split(text, ',');
    double re = 0.0;
    double im = 0.0;
    if (parts.size() != 2 || !parse_double(parts[0], re) || !parse_double(parts[1], im)) {
        parse_error("expected RE,IM, got '" + std::string(text) + "'");
    }
    return {re, im};
}

VectorSequence parse_csv_samples(std::string_view text, int dim) {
    const auto rows = csv_rows(text);
    VectorSequence out = VectorSequence::zeros(dim, 0, 0);
    std::vector<Complex> cells;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!try_parse_row(rows[r], cells)) {
            if (r == 0) continue;
            parse_error("CSV row " + std::to_string(r + 1) + " does not parse");
        }
        if (static_cast<int>(cells.size()) != dim) {
            throw Error(ErrorKind::DimensionMismatch, "CSV row " + std::to_string(r + 1) + " has " +
                                                          std::to_string(cells.size()) + " cells, expected " +
                                                          std::to_string(dim));
        }
        ComplexVector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = cells[i];
        out.values.push_back(v);
    }
    return out;
}

ComplexVector parse_csv_vector(std::string_view text, int dim) {
    std::vector<Complex> all;
    std::vector<Complex> cells;
    const auto rows = csv_rows(text);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!try_parse_row(rows[r], cells)) {
            if (r == 0) continue;
            parse_error("CSV row " + std::to_string(r + 1) + " does not parse");
        }
        all.insert(all.end(), cells.begin(), cells.end());
    }
    if (static_cast<int>(all.size()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, "CSV vector has " + std::to_string(all.size()) +
                                                      " entries, expected " + std::to_string(dim));
    }
    ComplexVector out(dim);
    for (int i = 0; i < dim; ++i) out(i) = all[i];
    return out;
}

std::string trace_to_csv(const MultirateSystem& sys, const SimulationTrace& trace) {
    const int mbar = sys.mbar();
    const int nbar = sys.nbar();
    std::ostringstream out;
    out << "t";
    for (int i = 0; i < sys.input_dim; ++i) out << ",u_" << i;
    for (int i = 0; i < sys.state_dim; ++i) out << ",x_" << i;
    for (int i = 0; i < sys.output_dim; ++i) out << ",y_" << i;
    out << "\n";
    const long steps = static_cast<long>(trace.y_central.size());
    for (long t = 0; t < steps; ++t) {
        out << t;
        const bool has_u = t % mbar == 0 && trace.u.covers(t / mbar);
        for (int i = 0; i < sys.input_dim; ++i) {
            out << ',';
            if (has_u) out << format_complex(trace.u.at(t / mbar)(i));
        }
        for (int i = 0; i < sys.state_dim; ++i) out << ',' << format_complex(trace.x.at(t)(i));
        const bool has_y = t % nbar == 0 && trace.y.covers(t / nbar);
        for (int i = 0; i < sys.output_dim; ++i) {
            out << ',';
            if (has_y) out << format_complex(trace.y.at(t / nbar)(i));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace mrsys
