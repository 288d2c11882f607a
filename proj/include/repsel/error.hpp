// Copyright 2026 The repsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace repsel {

// Base of every error raised by the library. Subclasses mirror the failure
// classes callers are expected to distinguish (the CLI maps them to exit
// codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or an experiment that cannot be set up as requested.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file does not follow its container layout (bad magic, short header).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Content is structurally readable but semantically invalid (NaN values,
// labels outside {0,1}, ragged rows).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Raised when optimisation diverges (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace repsel
