// Copyright 2026 The qcgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCGEN_ERROR_HPP
#define QCGEN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qcgen {

/// Malformed input: bad qubit index, shape mismatch, out-of-range argument.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A gate name that is not part of any known gate set.
struct UnknownGateError : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

/// A node (or token) that has no entry in the vocabulary it is encoded against.
struct VocabularyMismatch : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

/// A checkpoint whose metadata does not match the model it is loaded into.
struct CheckpointMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated, malformed, or hash-mismatched files.
struct CorruptDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An input file that does not exist or cannot be opened.
struct MissingFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pearson correlation with a zero-variance input.
struct UndefinedCorrelation : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace qcgen

#endif  // QCGEN_ERROR_HPP
