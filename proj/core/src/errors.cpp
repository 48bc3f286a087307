#include "thetagreen/errors.hpp"

namespace thetagreen {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Precision: return "precision error";
    case ErrorKind::IllConditioned: return "ill-conditioned";
    case ErrorKind::Singular: return "singular point";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Inconsistent: return "inconsistent";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace thetagreen
