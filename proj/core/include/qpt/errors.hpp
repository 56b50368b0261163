// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qpt {

// Base class for every failure the library reports deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotSquare final : Error { using Error::Error; };
struct NotHermitian final : Error { using Error::Error; };
struct NotPSD final : Error { using Error::Error; };
struct DimensionMismatch final : Error { using Error::Error; };
struct BadIndices final : Error { using Error::Error; };
struct BadWeights final : Error { using Error::Error; };
struct BadProbability final : Error { using Error::Error; };
struct ZeroTrace final : Error { using Error::Error; };
struct InvalidState final : Error { using Error::Error; };
struct InvalidChannel final : Error { using Error::Error; };
struct UnsupportedDimension final : Error { using Error::Error; };
struct IncompleteRecords final : Error { using Error::Error; };
struct MissingOutputs final : Error { using Error::Error; };
struct IllConditioned final : Error { using Error::Error; };
struct GeometryMismatch final : Error { using Error::Error; };
struct OutOfRange final : Error { using Error::Error; };
struct SingularBeyondRecovery final : Error { using Error::Error; };
struct BadConfig final : Error { using Error::Error; };
struct IoError final : Error { using Error::Error; };

}  // namespace qpt
