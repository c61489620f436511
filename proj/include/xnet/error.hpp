#pragma once

#include <stdexcept>
#include <string>

namespace xnet {

enum class errc {
  invalid_size,
  invalid_degree,
  invalid_generator,
  invalid_grouping,
  invalid_subset,
  invalid_spec,
  invalid_arch,
  too_large,
  shape_mismatch,
  numeric,
  not_found,
  corrupt_file,
  divergence,
  precondition,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_size: return "invalid-size";
    case errc::invalid_degree: return "invalid-degree";
    case errc::invalid_generator: return "invalid-generator";
    case errc::invalid_grouping: return "invalid-grouping";
    case errc::invalid_subset: return "invalid-subset";
    case errc::invalid_spec: return "invalid-spec";
    case errc::invalid_arch: return "invalid-arch";
    case errc::too_large: return "too-large";
    case errc::shape_mismatch: return "shape-mismatch";
    case errc::numeric: return "numeric";
    case errc::not_found: return "not-found";
    case errc::corrupt_file: return "corrupt-file";
    case errc::divergence: return "divergence";
    case errc::precondition: return "precondition";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace xnet
