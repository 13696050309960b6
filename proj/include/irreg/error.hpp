/*
 * Copyright 2026 The irreg Authors.
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

#ifndef IRREG_ERROR_HPP_
#define IRREG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace irreg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input, protocol violations and contract breaches on user data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A covariance matrix could not be factorized even after jitter escalation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace irreg

#endif  // IRREG_ERROR_HPP_
