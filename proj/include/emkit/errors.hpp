// Copyright 2026 The emkit Authors
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

namespace emkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EMKIT_DEFINE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  };

EMKIT_DEFINE_ERROR(ResourceError)
EMKIT_DEFINE_ERROR(MalformedInput)
EMKIT_DEFINE_ERROR(PreconditionError)
EMKIT_DEFINE_ERROR(EmptyError)
EMKIT_DEFINE_ERROR(IncompatibleHeaps)
EMKIT_DEFINE_ERROR(DanglingDelete)
EMKIT_DEFINE_ERROR(DisconnectedGraph)
EMKIT_DEFINE_ERROR(UnsupportedAlpha)
EMKIT_DEFINE_ERROR(ValidationError)
EMKIT_DEFINE_ERROR(BudgetError)
EMKIT_DEFINE_ERROR(SpecError)

#undef EMKIT_DEFINE_ERROR

}  // namespace emkit
