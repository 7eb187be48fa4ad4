#pragma once

#include "kronlap/kron_core.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace kronlap {

enum class MatrixMarketLayout { array, coordinate };

/// Reads a real (or integer) Matrix Market file in array or coordinate layout,
/// general or symmetric. Symmetric files are expanded to full storage and
/// repeated coordinate entries are summed. Malformed content raises ParseError
/// with the offending line number; missing files raise IoError.
DenseMatrix read_matrix_market(const std::filesystem::path& path);

/// Reads an N x 1 (or 1 x N) Matrix Market file as a vector.
Vector read_vector_market(const std::filesystem::path& path);

/// Parses Matrix Market text; `origin` names the source in error messages.
DenseMatrix parse_matrix_market(std::string_view text, const std::string& origin = "<memory>");

/// Serializes with 17 significant digits so values read back bit-for-bit.
/// Coordinate layout stores only nonzero entries.
std::string format_matrix_market(const DenseMatrix& m, MatrixMarketLayout layout = MatrixMarketLayout::array);

/// Atomic write: the text goes to a sibling temporary file that is renamed over `path`.
void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m,
                         MatrixMarketLayout layout = MatrixMarketLayout::array);
void write_vector_market(const std::filesystem::path& path, const Vector& v);

/// Writes `content` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace kronlap
