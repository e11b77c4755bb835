#pragma once

#include <string>

#include "repstab/complex_matrix.hpp"

namespace repstab::cmx {

enum class Format { json, binary };

/// CMX matrix file.
///
/// JSON variant: {"rows": n, "cols": n, "data": [re, im, re, im, ...]} with
/// row-major interleaved doubles. Binary variant: ASCII magic "CMX1", two
/// 64-bit little-endian unsigned dims, then rows*cols little-endian double
/// pairs (re, im), row-major. load() sniffs the magic to pick the decoder.
ComplexMatrix load(const std::string& path);
void save(const std::string& path, const ComplexMatrix& m, Format format = Format::json);

/// JSON text of a matrix (entries rounded to 15 significant digits).
std::string to_json_text(const ComplexMatrix& m);
ComplexMatrix from_json_text(const std::string& text);

} // namespace repstab::cmx
