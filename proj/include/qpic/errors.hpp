// Copyright 2026 The qpic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPIC_ERRORS_HPP
#define QPIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qpic {

// Invalid user-supplied configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Numerical failure during a run (non-finite loss, unsolvable system, ...).
// The CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

}  // namespace qpic

#endif
