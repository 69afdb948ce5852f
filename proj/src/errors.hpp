#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relrank {

// Input is structurally malformed: mismatched lengths, unknown labels,
// a tensor of the wrong rank. Distinct from std::invalid_argument, which
// we reserve for bad configuration values.
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A configured resource limit (simplex cap, memory budget) would be exceeded.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Byte-level decode failure. offset is where the input stopped making sense.
struct parse_error : std::runtime_error {
  std::size_t offset;
  parse_error(const std::string& what, std::size_t off)
      : std::runtime_error(what + " (byte " + std::to_string(off) + ")"), offset(off) {}
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace relrank
