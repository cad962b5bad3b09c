#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace magres::io {

/// Locale-independent decimal formatting: 9 significant digits.
std::string fmt_g9(double v);

/// Locale-independent shortest representation that round-trips exactly.
std::string fmt_exact(double v);

/// Parse a double with std::from_chars; throws config_error on junk.
double parse_double(std::string_view text);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view text);

/// Text matrix format: a header line "rows cols" followed by one
/// "row col value" triplet per entry, values exact round-trip.
void write_matrix_text(const Eigen::MatrixXd& m, std::ostream& os);
Eigen::MatrixXd read_matrix_text(std::istream& is);

/// Write a whole file, creating parent directories; throws io_error.
void write_file(const std::string& path, const std::string& content);

/// Read a whole file; throws io_error if unreadable.
std::string read_file(const std::string& path);

}  // namespace magres::io
