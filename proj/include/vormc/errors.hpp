// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vormc {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define VORMC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

VORMC_DEFINE_ERROR(DuplicatePoint)
VORMC_DEFINE_ERROR(DegenerateInput)
VORMC_DEFINE_ERROR(InvalidArgument)
VORMC_DEFINE_ERROR(InvalidConfidence)
VORMC_DEFINE_ERROR(RejectionExhausted)
VORMC_DEFINE_ERROR(EmptyFilter)
VORMC_DEFINE_ERROR(UnknownFunction)
VORMC_DEFINE_ERROR(ResolutionMismatch)
VORMC_DEFINE_ERROR(IoError)

#undef VORMC_DEFINE_ERROR

}  // namespace vormc
