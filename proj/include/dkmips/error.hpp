// Copyright 2026 The Authors.
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

namespace dkmips {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input file.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Vectors of different dimensionality were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Search parameters out of range (k, lambda, mu, leaf size).
class ParamError : public Error {
 public:
  using Error::Error;
};

// Caller violated an algorithmic precondition, e.g. asked for the marginal
// gain of an item that is already in the result set.
class LogicError : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration refused because the instance is too large.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace dkmips
