#pragma once

// JSON model format:
//   {"n": int, "offset": float, "biases": [float], "couplings": [[i, j, value]]}
// Each coupling sets A[i][j] = A[j][i] = value. Pairs are normally listed
// once with i < j; if a pair appears in both orientations the two values
// are averaged. i == j sets a diagonal entry.

#include <string>
#include <string_view>

#include "qsplit/ising.hpp"

namespace qsplit {

IsingModel model_from_json(std::string_view text);
std::string model_to_json(const IsingModel& model);

std::string read_text_file(const std::string& path);
/// Creates missing parent directories.
void write_text_file(const std::string& path, std::string_view contents);

} // namespace qsplit
