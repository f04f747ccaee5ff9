#pragma once

#include <filesystem>
#include <string>

#include "emot/numerics.hpp"

namespace emot {

// Header-free delimiter-separated text (commas and/or whitespace), one matrix
// row per line. Blank lines and lines starting with '#' are skipped. Ragged
// rows, unparsable fields and NaN/Inf raise kParse with the line number.
DenseMatrix load_matrix(const std::filesystem::path& path);
// Accepts one value per line or a single row.
Vector load_vector(const std::filesystem::path& path);

// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace emot
