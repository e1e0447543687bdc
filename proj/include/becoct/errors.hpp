#pragma once
#include <stdexcept>
#include <string>

namespace becoct {

// Error categories; the values double as C API status codes.
enum class Status : int {
  ok = 0,
  invalid_argument = 1,
  config = 2,
  solver = 3,
  line_search = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(Status::invalid_argument, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(Status::config, w) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& w) : Error(Status::solver, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(Status::io, w) {}
};

}  // namespace becoct
