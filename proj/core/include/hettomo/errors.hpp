// Copyright 2026 The hettomo Authors
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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hettomo {

using Complex = std::complex<double>;

/// Base class for recoverable failures raised by the library. Precondition
/// violations on arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: empty histograms, grid or binning mismatches,
/// missing references, unreadable files.
class DataError : public Error {
   public:
    using Error::Error;
};

/// A numeric or consistency check failed (normalization, degenerate
/// calibration reference, rejection bound).
class NumericError : public Error {
   public:
    using Error::Error;
};

}  // namespace hettomo
