// include/rdln/common.h

// Copyright 2026  RDLN Lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RDLN_COMMON_H_
#define RDLN_COMMON_H_

#include <cstdarg>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rdln {

// Error taxonomy. The CLI maps ParamError/ConfigError to exit code 1
// (validation) and everything else to exit code 2 (runtime failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments, dimensions, or probabilities.
class ParamError : public Error {
 public:
  using Error::Error;
};

// Every path through the trellis has probability zero.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Forced alignment infeasible (transcript too long, or no surviving path).
class AlignError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable/unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradients or other failures inside a training run.
class TrainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent experiment configuration, detected before any work is done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// printf-style std::string formatting.
std::string Format(const char *fmt, ...)
#ifdef __GNUC__
    __attribute__((format(printf, 1, 2)))
#endif
    ;

// FNV-1a 64-bit hash, used to fingerprint serialized models.
std::uint64_t Fnv1a64(const void *data, std::size_t size);
std::uint64_t Fnv1a64(const std::string &s);

}  // namespace rdln

#endif  // RDLN_COMMON_H_
