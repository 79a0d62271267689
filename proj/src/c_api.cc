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

#include <cstdlib>
#include <cstring>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "userdp/core.h"
#include "userdp/errors.h"
#include "userdp/experiments.h"
#include "userdp/mean.h"
#include "userdp/mechanisms.h"
#include "userdp/range.h"
#include "userdp/userdp.h"

struct userdp_rng {
  userdp::RandomSource source;
};

struct userdp_dataset {
  userdp::UserDataset data;
};

struct userdp_session {
  userdp::AdaptiveQuerySession session;
};

namespace {

thread_local std::string last_error;

userdp_status ToCode(userdp::ErrorKind kind) {
  switch (kind) {
    case userdp::ErrorKind::kNone:
      return USERDP_OK;
    case userdp::ErrorKind::kArgument:
      return USERDP_ERR_ARGUMENT;
    case userdp::ErrorKind::kShape:
      return USERDP_ERR_SHAPE;
    case userdp::ErrorKind::kPrecondition:
      return USERDP_ERR_PRECONDITION;
    case userdp::ErrorKind::kBudgetExhausted:
      return USERDP_ERR_BUDGET_EXHAUSTED;
    case userdp::ErrorKind::kUnsupported:
      return USERDP_ERR_UNSUPPORTED;
    case userdp::ErrorKind::kPlanInfeasible:
      return USERDP_ERR_PLAN_INFEASIBLE;
    case userdp::ErrorKind::kConfig:
      return USERDP_ERR_CONFIG;
    case userdp::ErrorKind::kIo:
      return USERDP_ERR_IO;
    case userdp::ErrorKind::kInternal:
      return USERDP_ERR_INTERNAL;
  }
  return USERDP_ERR_INTERNAL;
}

userdp_status Fail(userdp_status code, std::string message) {
  last_error = std::move(message);
  return code;
}

userdp_status Report(const absl::Status& status) {
  if (status.ok()) return USERDP_OK;
  return Fail(ToCode(userdp::KindOf(status)), std::string(status.message()));
}

// Runs body, translating statuses and stray exceptions into codes.
template <typename F>
userdp_status Guard(F&& body) {
  try {
    return Report(body());
  } catch (const std::bad_alloc&) {
    return Fail(USERDP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(USERDP_ERR_INTERNAL, e.what());
  }
}

userdp_status Null(const char* what) {
  return Fail(USERDP_ERR_ARGUMENT, std::string(what) + " must not be NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void CopyOut(const userdp::Vector& v, double* out) {
  std::copy(v.begin(), v.end(), out);
}

}  // namespace

extern "C" {

const char* userdp_version(void) { return USERDP_VERSION_STRING; }

const char* userdp_status_name(userdp_status status) {
  switch (status) {
    case USERDP_OK:
      return "ok";
    case USERDP_ERR_ARGUMENT:
      return "argument";
    case USERDP_ERR_SHAPE:
      return "shape";
    case USERDP_ERR_PRECONDITION:
      return "precondition";
    case USERDP_ERR_BUDGET_EXHAUSTED:
      return "budget_exhausted";
    case USERDP_ERR_UNSUPPORTED:
      return "unsupported";
    case USERDP_ERR_PLAN_INFEASIBLE:
      return "plan_infeasible";
    case USERDP_ERR_CONFIG:
      return "config";
    case USERDP_ERR_IO:
      return "io";
    case USERDP_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* userdp_last_error(void) { return last_error.c_str(); }

void userdp_string_free(char* s) { std::free(s); }

userdp_status userdp_rng_create(uint64_t seed, uint64_t stream,
                                userdp_rng** out) {
  if (out == nullptr) return Null("out");
  return Guard([&] {
    *out = new userdp_rng{userdp::RandomSource(seed, stream)};
    return absl::OkStatus();
  });
}

void userdp_rng_destroy(userdp_rng* rng) { delete rng; }

userdp_status userdp_rng_uniform(userdp_rng* rng, double* out) {
  if (rng == nullptr || out == nullptr) return Null("rng and out");
  *out = rng->source.Uniform();
  return USERDP_OK;
}

userdp_status userdp_dataset_create(size_t dim, const char* bound_kind,
                                    double item_bound, size_t num_users,
                                    const size_t* items_per_user,
                                    const double* items, userdp_dataset** out) {
  if (bound_kind == nullptr || out == nullptr)
    return Null("bound_kind and out");
  if (num_users > 0 && (items_per_user == nullptr || items == nullptr)) {
    return Null("items_per_user and items");
  }
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(const userdp::BoundKind kind,
                            userdp::ParseBoundKind(bound_kind));
    std::vector<userdp::UserRecord> users(num_users);
    const double* p = items;
    for (size_t i = 0; i < num_users; ++i) {
      for (size_t j = 0; j < items_per_user[i]; ++j, p += dim) {
        users[i].items.emplace_back(p, p + dim);
      }
    }
    USERDP_ASSIGN_OR_RETURN(
        userdp::UserDataset data,
        userdp::UserDataset::Create(dim, kind, item_bound, std::move(users)));
    *out = new userdp_dataset{std::move(data)};
    return absl::OkStatus();
  });
}

userdp_status userdp_dataset_from_json(const char* json, userdp_dataset** out) {
  if (json == nullptr || out == nullptr) return Null("json and out");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(userdp::UserDataset data,
                            userdp::DatasetFromJson(json));
    *out = new userdp_dataset{std::move(data)};
    return absl::OkStatus();
  });
}

userdp_status userdp_dataset_to_json(const userdp_dataset* data, char** out) {
  if (data == nullptr || out == nullptr) return Null("data and out");
  return Guard([&]() -> absl::Status {
    char* s = CopyString(userdp::DatasetToJson(data->data));
    if (s == nullptr) return userdp::InternalError("out of memory");
    *out = s;
    return absl::OkStatus();
  });
}

size_t userdp_dataset_num_users(const userdp_dataset* data) {
  return data == nullptr ? 0 : data->data.num_users();
}

size_t userdp_dataset_dim(const userdp_dataset* data) {
  return data == nullptr ? 0 : data->data.dim();
}

void userdp_dataset_destroy(userdp_dataset* data) { delete data; }

userdp_status userdp_laplace(double scale, userdp_rng* rng, double* out) {
  if (rng == nullptr || out == nullptr) return Null("rng and out");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(const userdp::LaplaceScale b,
                            userdp::LaplaceScale::Create(scale));
    *out = userdp::SampleLaplace(b, rng->source);
    return absl::OkStatus();
  });
}

userdp_status userdp_exponential_mechanism(const double* costs, size_t k,
                                           double epsilon, userdp_rng* rng,
                                           size_t* out) {
  if (rng == nullptr || out == nullptr) return Null("rng and out");
  if (k > 0 && costs == nullptr) return Null("costs");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(
        *out, userdp::ExponentialMechanism(std::span<const double>(costs, k),
                                           epsilon, rng->source));
    return absl::OkStatus();
  });
}

userdp_status userdp_strong_composition(int64_t k, double eps0, double delta0,
                                        double delta_slack, double* epsilon,
                                        double* delta) {
  if (epsilon == nullptr || delta == nullptr) return Null("epsilon and delta");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(
        const userdp::CompositionPlan plan,
        userdp::CompositionPlan::Create(k, eps0, delta0, delta_slack));
    USERDP_ASSIGN_OR_RETURN(const userdp::PrivacyBudget total,
                            userdp::StrongComposition(plan));
    *epsilon = total.epsilon;
    *delta = total.delta;
    return absl::OkStatus();
  });
}

userdp_status userdp_per_step_budget(double epsilon, double delta, int64_t k,
                                     double* eps0, double* delta0,
                                     double* delta_slack) {
  if (eps0 == nullptr || delta0 == nullptr || delta_slack == nullptr) {
    return Null("outputs");
  }
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(const userdp::PrivacyBudget total,
                            userdp::PrivacyBudget::Create(epsilon, delta));
    USERDP_ASSIGN_OR_RETURN(const userdp::CompositionPlan plan,
                            userdp::PerStepBudgetForQueries(total, k));
    *eps0 = plan.eps0;
    *delta0 = plan.delta0;
    *delta_slack = plan.delta_slack;
    return absl::OkStatus();
  });
}

userdp_status userdp_private_range(const double* xs, size_t n, double epsilon,
                                   double tau, double range_bound,
                                   userdp_rng* rng, double* lo, double* hi) {
  if (rng == nullptr || lo == nullptr || hi == nullptr) {
    return Null("rng, lo and hi");
  }
  if (n > 0 && xs == nullptr) return Null("xs");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(
        const userdp::RangeInterval r,
        userdp::PrivateRange(std::span<const double>(xs, n), epsilon, tau,
                             range_bound, rng->source));
    *lo = r.lo;
    *hi = r.hi;
    return absl::OkStatus();
  });
}

userdp_status userdp_winsorized_mean_1d(const double* xs, size_t n,
                                        double epsilon, double tau,
                                        double range_bound, userdp_rng* rng,
                                        double* out) {
  if (rng == nullptr || out == nullptr) return Null("rng and out");
  if (n > 0 && xs == nullptr) return Null("xs");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(
        *out, userdp::WinsorizedMean1D(std::span<const double>(xs, n), epsilon,
                                       tau, range_bound, rng->source));
    return absl::OkStatus();
  });
}

userdp_status userdp_winsorized_mean_highd(const double* xs, size_t n,
                                           size_t dim, double epsilon,
                                           double delta, double tau,
                                           double range_bound, double gamma,
                                           userdp_rng* rng, double* out) {
  if (rng == nullptr || out == nullptr) return Null("rng and out");
  if (n > 0 && xs == nullptr) return Null("xs");
  return Guard([&]() -> absl::Status {
    std::vector<userdp::Vector> points;
    points.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      points.emplace_back(xs + i * dim, xs + (i + 1) * dim);
    }
    USERDP_ASSIGN_OR_RETURN(
        const userdp::Vector v,
        userdp::WinsorizedMeanHighD(points, epsilon, delta, tau, range_bound,
                                    gamma, rng->source));
    CopyOut(v, out);
    return absl::OkStatus();
  });
}

userdp_status userdp_user_level_mean(const userdp_dataset* data, double epsilon,
                                     double delta, double gamma,
                                     userdp_rng* rng, double* out) {
  if (data == nullptr || rng == nullptr || out == nullptr) {
    return Null("data, rng and out");
  }
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(const userdp::PrivacyBudget budget,
                            userdp::PrivacyBudget::Create(epsilon, delta));
    USERDP_ASSIGN_OR_RETURN(
        const userdp::Vector v,
        userdp::UserLevelBoundedMean(data->data, budget, gamma, rng->source));
    CopyOut(v, out);
    return absl::OkStatus();
  });
}

userdp_status userdp_fwht(double* v, size_t len) {
  if (len > 0 && v == nullptr) return Null("v");
  return Guard([&] { return userdp::FwhtInPlace(std::span<double>(v, len)); });
}

userdp_status userdp_session_create(const userdp_dataset* data, double epsilon,
                                    double delta, int64_t k_max, double gamma,
                                    double range_bound, uint64_t seed,
                                    userdp_session** out) {
  if (data == nullptr || out == nullptr) return Null("data and out");
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(const userdp::PrivacyBudget budget,
                            userdp::PrivacyBudget::Create(epsilon, delta));
    USERDP_ASSIGN_OR_RETURN(
        userdp::AdaptiveQuerySession session,
        userdp::AdaptiveQuerySession::Create(data->data, budget, k_max, gamma,
                                             range_bound, seed));
    *out = new userdp_session{std::move(session)};
    return absl::OkStatus();
  });
}

userdp_status userdp_session_answer(userdp_session* session,
                                    userdp_query_fn query, void* ctx,
                                    size_t out_dim, double tau, double* out) {
  if (session == nullptr || query == nullptr || out == nullptr) {
    return Null("session, query and out");
  }
  return Guard([&]() -> absl::Status {
    std::vector<double> flat;
    const userdp::VectorQuery fn =
        [&](const userdp::UserRecord& user) -> absl::StatusOr<userdp::Vector> {
      const size_t item_dim = user.items.empty() ? 0 : user.items[0].size();
      flat.clear();
      for (const auto& item : user.items) {
        flat.insert(flat.end(), item.begin(), item.end());
      }
      userdp::Vector result(out_dim, 0.0);
      if (query(ctx, flat.data(), user.items.size(), item_dim, result.data(),
                out_dim) != 0) {
        return userdp::ArgumentError("query callback reported failure");
      }
      return result;
    };
    USERDP_ASSIGN_OR_RETURN(const userdp::Vector v,
                            session->session.Answer(fn, tau));
    if (v.size() != out_dim) {
      return userdp::ShapeError("answer length differs from out_dim");
    }
    CopyOut(v, out);
    return absl::OkStatus();
  });
}

int64_t userdp_session_remaining(const userdp_session* session) {
  return session == nullptr ? 0 : session->session.remaining();
}

void userdp_session_destroy(userdp_session* session) { delete session; }

userdp_status userdp_experiment_validate(const char* config_json) {
  if (config_json == nullptr) return Null("config_json");
  return Guard([&] { return userdp::ValidateConfig(config_json); });
}

userdp_status userdp_experiment_run(const char* config_json, size_t jobs,
                                    int has_seed_override,
                                    uint64_t seed_override,
                                    const char* output_dir, int* acceptance_ok,
                                    char** summary_json) {
  if (config_json == nullptr || acceptance_ok == nullptr) {
    return Null("config_json and acceptance_ok");
  }
  return Guard([&]() -> absl::Status {
    userdp::RunOptions options;
    options.jobs = jobs == 0 ? 1 : jobs;
    if (has_seed_override != 0) options.seed_override = seed_override;
    if (output_dir != nullptr) options.output_dir = output_dir;
    USERDP_ASSIGN_OR_RETURN(const userdp::RunSummary summary,
                            userdp::RunExperiment(config_json, options));
    *acceptance_ok = summary.acceptance_ok ? 1 : 0;
    if (summary_json != nullptr) {
      nlohmann::json j;
      j["experiment"] = summary.experiment;
      j["output_dir"] = summary.output_dir;
      j["rows"] = summary.rows;
      j["acceptance_ok"] = summary.acceptance_ok;
      j["messages"] = summary.messages;
      char* s = CopyString(j.dump());
      if (s == nullptr) return userdp::InternalError("out of memory");
      *summary_json = s;
    }
    return absl::OkStatus();
  });
}

userdp_status userdp_experiment_report(const char* output_dir,
                                       const char* metric, char** slopes_json) {
  if (output_dir == nullptr || slopes_json == nullptr) {
    return Null("output_dir and slopes_json");
  }
  return Guard([&]() -> absl::Status {
    USERDP_ASSIGN_OR_RETURN(
        const std::string text,
        userdp::ReportScaling(output_dir, metric == nullptr ? "" : metric));
    char* s = CopyString(text);
    if (s == nullptr) return userdp::InternalError("out of memory");
    *slopes_json = s;
    return absl::OkStatus();
  });
}

}  // extern "C"
