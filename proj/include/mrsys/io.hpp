#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mrsys/numerics.hpp"
#include "mrsys/signals.hpp"
#include "mrsys/system.hpp"

namespace mrsys {

// SystemFile: {"m", "n", "dims": {"state", "input", "output"}, "A", "B", "C", "D"}
// where every operator list holds lcm(m, n) matrices written as nested row
// arrays of [re, im] pairs. Any schema or validation failure is a Parse error.

MultirateSystem parse_system(std::string_view text);
MultirateSystem load_system(const std::filesystem::path& path);
/// Doubles are written as the shortest decimal that reads back to the same bits.
std::string dump_system(const MultirateSystem& sys, int indent = 2);
void save_system(const MultirateSystem& sys, const std::filesystem::path& path);

/// Shortest round-trip decimal of a double ("1.5", "-0.25", "1e-300").
std::string format_real(double value);
/// "re+imj" / "re-imj".
std::string format_complex(Complex value);
/// Accepts "re+imj", "re-imj", "re", "imj" (also with i instead of j).
Complex parse_complex(std::string_view text);
/// "RE,IM" as used on the command line.
Complex parse_complex_pair(std::string_view text);

/// One sample per nonempty row, one complex cell per component. Lines starting
/// with '#' are skipped, and so is a first row that does not parse (a header).
/// Throws DimensionMismatch when a row does not have dim cells.
VectorSequence parse_csv_samples(std::string_view text, int dim);
/// All cells of the file in reading order, as one vector of length dim.
ComplexVector parse_csv_vector(std::string_view text, int dim);

std::string read_text_file(const std::filesystem::path& path);

/// Trace as CSV with header t,u_0..,x_0..,y_0.. and one row per central step.
/// The u cells are filled where m̄ | t (physical u_{t/m̄}) and the y cells
/// where n̄ | t (physical y_{t/n̄}); other cells are left empty.
std::string trace_to_csv(const MultirateSystem& sys, const SimulationTrace& trace);

}  // namespace mrsys
