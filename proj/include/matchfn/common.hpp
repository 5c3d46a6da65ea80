#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace matchfn {

enum class ErrorKind {
  config,      // bad options / invalid parameter values
  io,          // unreadable or unwritable files
  data,        // schema violations, duplicates, empty input
  estimation,  // numerical failures inside the estimators
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(std::string msg) : Error(ErrorKind::config, std::move(msg)) {}
};
struct IoError : Error {
  explicit IoError(std::string msg) : Error(ErrorKind::io, std::move(msg)) {}
};
struct DataError : Error {
  explicit DataError(std::string msg) : Error(ErrorKind::data, std::move(msg)) {}
};
struct EstimationError : Error {
  explicit EstimationError(std::string msg) : Error(ErrorKind::estimation, std::move(msg)) {}
};

/// Query point too far from every sample point for a meaningful estimate.
struct OutOfSupportError : EstimationError {
  explicit OutOfSupportError(std::string msg) : EstimationError(std::move(msg)) {}
};

/// Calendar month with total order and integer arithmetic on the month index.
struct Month {
  int year = 0;
  int month = 1;  // 1..12

  static Month parse(const std::string& text);  // "YYYY-MM"
  static Month from_index(int idx) { return Month{idx / 12, idx % 12 + 1}; }

  int index() const noexcept { return year * 12 + (month - 1); }
  std::string str() const;

  friend auto operator<=>(const Month& a, const Month& b) = default;
};

Month operator+(Month m, int months);

/// Runs fn(i) for i in [0, n). Thread count is capped by MATCHFN_THREADS
/// when set. Results must be written to disjoint slots so the schedule
/// cannot change the output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace matchfn
