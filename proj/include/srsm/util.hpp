#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srsm {

/// Domain error for invalid inputs, degenerate configurations and I/O problems.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that round-trips a double (%.17g trimmed).
std::string format_double(double v);

/// Runs fn(0..n-1) with at most `parallelism` worker threads. Results must be
/// written to pre-sized slots indexed by i; completion order is irrelevant.
/// The first exception thrown by any worker is rethrown after join.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace srsm
