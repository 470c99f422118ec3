#pragma once

#include <stdexcept>

namespace eegssm {

/// Bad or inconsistent input data: missing files, shape mismatches,
/// non-finite samples, unknown channels, malformed manifests.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or activation.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eegssm
