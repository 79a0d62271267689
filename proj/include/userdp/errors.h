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

#ifndef USERDP_ERRORS_H_
#define USERDP_ERRORS_H_

#include <string_view>

#include "absl/status/status.h"

namespace userdp {

// Error categories surfaced by the library. Each maps onto a canonical absl
// status code and is additionally tagged with a payload so that categories
// sharing a code (argument vs. shape vs. config) stay distinguishable.
enum class ErrorKind {
  kNone = 0,
  kArgument,
  kShape,
  kPrecondition,
  kBudgetExhausted,
  kUnsupported,
  kPlanInfeasible,
  kConfig,
  kIo,
  kInternal,
};

absl::Status MakeError(ErrorKind kind, std::string_view message);

// Returns kNone for OK statuses.
ErrorKind KindOf(const absl::Status& status);

std::string_view ErrorKindName(ErrorKind kind);

inline absl::Status ArgumentError(std::string_view m) {
  return MakeError(ErrorKind::kArgument, m);
}
inline absl::Status ShapeError(std::string_view m) {
  return MakeError(ErrorKind::kShape, m);
}
inline absl::Status PreconditionError(std::string_view m) {
  return MakeError(ErrorKind::kPrecondition, m);
}
inline absl::Status BudgetExhaustedError(std::string_view m) {
  return MakeError(ErrorKind::kBudgetExhausted, m);
}
inline absl::Status UnsupportedError(std::string_view m) {
  return MakeError(ErrorKind::kUnsupported, m);
}
inline absl::Status PlanInfeasibleError(std::string_view m) {
  return MakeError(ErrorKind::kPlanInfeasible, m);
}
inline absl::Status ConfigError(std::string_view m) {
  return MakeError(ErrorKind::kConfig, m);
}
inline absl::Status IoError(std::string_view m) {
  return MakeError(ErrorKind::kIo, m);
}
inline absl::Status InternalError(std::string_view m) {
  return MakeError(ErrorKind::kInternal, m);
}

}  // namespace userdp

#define USERDP_RETURN_IF_ERROR(expr)                 \
  do {                                               \
    const absl::Status _userdp_status = (expr);      \
    if (!_userdp_status.ok()) return _userdp_status; \
  } while (0)

#define USERDP_CONCAT_INNER_(a, b) a##b
#define USERDP_CONCAT_(a, b) USERDP_CONCAT_INNER_(a, b)

#define USERDP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                  \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(tmp).value()

#define USERDP_ASSIGN_OR_RETURN(lhs, expr)                                   \
  USERDP_ASSIGN_OR_RETURN_IMPL_(USERDP_CONCAT_(_userdp_statusor_, __LINE__), \
                                lhs, expr)

#endif  // USERDP_ERRORS_H_
