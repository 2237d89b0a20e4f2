#pragma once

#include <stdexcept>
#include <string>

namespace qipm {

enum class Errc {
  invalid_argument,
  structure_mismatch,
  not_interior,
  domain_error,
  rank_deficient,
  singular_system,
  no_initial_point,
  io_error,
  parse_error,
  invariant_violation,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qipm
