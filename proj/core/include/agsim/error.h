/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AGSIM_ERROR_H_
#define AGSIM_ERROR_H_

#include <stdexcept>
#include <string>

namespace agsim {

// Root of every error thrown by the library. Each subclass names one failure
// class from the module contracts so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define AGSIM_DEFINE_ERROR(Name)           \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// Scene / config loading.
AGSIM_DEFINE_ERROR(ParseError);
AGSIM_DEFINE_ERROR(SchemaError);
AGSIM_DEFINE_ERROR(ValidationError);
AGSIM_DEFINE_ERROR(OutOfBounds);

// Vehicles and registry.
AGSIM_DEFINE_ERROR(TypeMismatch);
AGSIM_DEFINE_ERROR(DuplicateId);
AGSIM_DEFINE_ERROR(UnknownVehicle);
AGSIM_DEFINE_ERROR(NoSuchSensor);

// Registration.
AGSIM_DEFINE_ERROR(DegenerateInput);
AGSIM_DEFINE_ERROR(InsufficientCorrespondences);
AGSIM_DEFINE_ERROR(NoPairs);

// Planning.
AGSIM_DEFINE_ERROR(NoPath);
AGSIM_DEFINE_ERROR(InvalidCell);
AGSIM_DEFINE_ERROR(PathExhausted);

// Metrics.
AGSIM_DEFINE_ERROR(EmptyLog);
AGSIM_DEFINE_ERROR(EmptySeries);

// Wire protocol and service.
AGSIM_DEFINE_ERROR(FrameTooLarge);
AGSIM_DEFINE_ERROR(MalformedJson);
AGSIM_DEFINE_ERROR(MissingField);
AGSIM_DEFINE_ERROR(BindError);

// CLI / artifacts.
AGSIM_DEFINE_ERROR(ConfigError);
AGSIM_DEFINE_ERROR(TaskFailure);
AGSIM_DEFINE_ERROR(MissingArtifact);

#undef AGSIM_DEFINE_ERROR

}  // namespace agsim

#endif  // AGSIM_ERROR_H_
