/*
 * Copyright 2026 The sfm-decomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace sfm {

// Process exit codes. Each error class below maps to exactly one.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kValidation = 3,
  kDegenerate = 4,
  kInternal = 5,
  kIo = 6,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept = 0;
};

// Bad configuration, unknown columns, invalid parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kConfig; }
};

// Column named by the role schema that is absent from the data.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Data content violates an invariant (non-binary outcome, unknown group label).
class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kValidation; }
};

// Statistically degenerate input: empty group, zero population, zero variance.
class DegenerateError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kDegenerate; }
};

class InternalError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kInternal; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kIo; }
};

#define SFM_ASSERT(cond, msg)                                              \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw ::sfm::InternalError(std::string("assertion failed: ") + #cond \
                                 + " (" + (msg) + ")");                    \
    }                                                                      \
  } while (0)

}  // namespace sfm
