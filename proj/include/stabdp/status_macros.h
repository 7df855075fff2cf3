//
// Copyright 2026 The stabdp Authors.
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
//

#ifndef STABDP_STATUS_MACROS_H_
#define STABDP_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define STABDP_RETURN_IF_ERROR(expr)         \
  do {                                       \
    const absl::Status _status = (expr);     \
    if (!_status.ok()) return _status;       \
  } while (0)

#define STABDP_STATUS_CONCAT_INNER(a, b) a##b
#define STABDP_STATUS_CONCAT(a, b) STABDP_STATUS_CONCAT_INNER(a, b)

#define STABDP_ASSIGN_OR_RETURN(lhs, rexpr) \
  STABDP_ASSIGN_OR_RETURN_IMPL(             \
      STABDP_STATUS_CONCAT(_statusor_, __LINE__), lhs, rexpr)

#define STABDP_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                 \
  if (!statusor.ok()) return statusor.status();            \
  lhs = std::move(statusor).value()

#endif  // STABDP_STATUS_MACROS_H_
