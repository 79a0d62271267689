// Copyright 2026 The userdp Authors.
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

#include "userdp/errors.h"

#include <string>

#include "absl/strings/cord.h"

namespace userdp {
namespace {

constexpr char kKindPayloadUrl[] = "userdp/error_kind";

absl::StatusCode CodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNone:
      return absl::StatusCode::kOk;
    case ErrorKind::kArgument:
    case ErrorKind::kShape:
    case ErrorKind::kConfig:
      return absl::StatusCode::kInvalidArgument;
    case ErrorKind::kPrecondition:
    case ErrorKind::kPlanInfeasible:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kBudgetExhausted:
      return absl::StatusCode::kResourceExhausted;
    case ErrorKind::kUnsupported:
      return absl::StatusCode::kUnimplemented;
    case ErrorKind::kIo:
      return absl::StatusCode::kNotFound;
    case ErrorKind::kInternal:
      return absl::StatusCode::kInternal;
  }
  return absl::StatusCode::kUnknown;
}

}  // namespace

absl::Status MakeError(ErrorKind kind, std::string_view message) {
  if (kind == ErrorKind::kNone) return absl::OkStatus();
  absl::Status status(CodeFor(kind),
                      absl::string_view(message.data(), message.size()));
  status.SetPayload(kKindPayloadUrl,
                    absl::Cord(std::to_string(static_cast<int>(kind))));
  return status;
}

ErrorKind KindOf(const absl::Status& status) {
  if (status.ok()) return ErrorKind::kNone;
  if (auto payload = status.GetPayload(kKindPayloadUrl)) {
    const int value = std::stoi(std::string(*payload));
    return static_cast<ErrorKind>(value);
  }
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return ErrorKind::kArgument;
    case absl::StatusCode::kFailedPrecondition:
      return ErrorKind::kPrecondition;
    case absl::StatusCode::kResourceExhausted:
      return ErrorKind::kBudgetExhausted;
    case absl::StatusCode::kUnimplemented:
      return ErrorKind::kUnsupported;
    case absl::StatusCode::kNotFound:
      return ErrorKind::kIo;
    default:
      return ErrorKind::kInternal;
  }
}

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNone:
      return "ok";
    case ErrorKind::kArgument:
      return "argument";
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kPrecondition:
      return "precondition";
    case ErrorKind::kBudgetExhausted:
      return "budget_exhausted";
    case ErrorKind::kUnsupported:
      return "unsupported";
    case ErrorKind::kPlanInfeasible:
      return "plan_infeasible";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "unknown";
}

}  // namespace userdp
