#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "yardtwin/engine.hpp"
#include "yardtwin/error.hpp"
#include "yardtwin/events.hpp"
#include "yardtwin/kpi.hpp"
#include "yardtwin/layout.hpp"
#include "yardtwin/strategies.hpp"
#include "yardtwin/time.hpp"
#include "yardtwin/yard_state.hpp"

namespace yardtwin::service {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// HTTP status for each library error code.
constexpr int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadTimestamp:
    case ErrorCode::BadWindow:
    case ErrorCode::MalformedLine:
    case ErrorCode::MissingRequiredField:
      return 400;
    case ErrorCode::AddressOutOfRange:
    case ErrorCode::NoDataAtTime:
    case ErrorCode::UnknownJob:
    case ErrorCode::UnknownContainer:
      return 404;
    case ErrorCode::InvalidStrategy:
      return 422;
    default:
      return 500;
  }
}

inline Response error_response(int status, std::string_view code, const std::string& message,
                               std::optional<std::uint64_t> seq = std::nullopt) {
  nlohmann::json j{{"code", code}, {"message", message}};
  if (seq) j["seq"] = *seq;
  return Response{status, j.dump()};
}

inline Response error_response(const YardError& e) {
  return error_response(http_status(e.code()), code_name(e.code()), e.what(), e.seq());
}

inline Response json_response(const nlohmann::json& j, int status = 200) { return Response{status, j.dump()}; }

/// Read-only mirror of one ingested log plus a bounded pool running
/// simulation jobs. Every answer is a function of (log, layout, request);
/// times are always explicit query parameters.
class Service {
 public:
  Service(YardLayout layout, EventLog log, unsigned workers = 2)
      : layout_(std::make_shared<const YardLayout>(std::move(layout))),
        log_(std::make_shared<const EventLog>(std::move(log))) {
    if (workers == 0) workers = 1;
    for (unsigned i = 0; i < workers; ++i) {
      pool_.emplace_back([this](std::stop_token stop) { work(stop); });
    }
  }

  ~Service() {
    for (auto& t : pool_) t.request_stop();
    queue_cv_.notify_all();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Appends newly observed events to the mirror (single writer).
  void ingest(const std::vector<YardEvent>& events) {
    std::unique_lock lock(log_mutex_);
    auto next = std::make_shared<EventLog>(*log_);
    std::uint64_t seq = 0;
    for (const YardEvent& existing : next->events) seq = std::max(seq, existing.seq + 1);
    for (const YardEvent& e : events) {
      YardEvent copy = e;
      copy.seq = seq++;
      next->events.push_back(std::move(copy));
    }
    sort_log(*next);
    log_ = std::move(next);
  }

  std::shared_ptr<const EventLog> log() const {
    std::shared_lock lock(log_mutex_);
    return log_;
  }

  const YardLayout& layout() const { return *layout_; }

  Response handle(const Request& req) const {
    try {
      return route(req);
    } catch (const YardError& e) {
      return error_response(e);
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      return error_response(500, "Internal", e.what());
    }
  }

  /// Blocks until the job leaves PENDING/RUNNING. Test and CLI helper.
  JobStatus wait(const std::string& job_id) const {
    std::unique_lock lock(jobs_mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) fail(ErrorCode::UnknownJob, job_id);
    jobs_cv_.wait(lock, [&] {
      return it->second.job.status == JobStatus::Done || it->second.job.status == JobStatus::Failed;
    });
    return it->second.job.status;
  }

  /// Snapshot at t as served by GET /yard/snapshot.
  YardState snapshot_at(Timestamp t) const {
    auto log = this->log();
    if (log->events.empty() || log->events.back().timestamp < t) {
      fail(ErrorCode::NoDataAtTime, "the mirror has no data at " + format_timestamp(t));
    }
    return replay_to(*log, *layout_, t);
  }

 private:
  struct JobEntry {
    SimulationJob job;
    std::shared_ptr<const EventLog> log;
    std::string result;  // serialized KpiComparison once DONE
    std::string error;   // message once FAILED
    std::string error_code;
  };

  static std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
      const std::size_t slash = path.find('/', start);
      const std::size_t end = slash == std::string_view::npos ? path.size() : slash;
      if (end > start) parts.push_back(path.substr(start, end - start));
      if (slash == std::string_view::npos) break;
      start = slash + 1;
    }
    return parts;
  }

  static Timestamp required_time(const Request& req, const std::string& name) {
    auto it = req.params.find(name);
    if (it == req.params.end()) fail(ErrorCode::BadTimestamp, "query parameter '" + name + "' is required");
    return parse_timestamp(it->second);
  }

  static std::size_t count_param(const Request& req, const std::string& name, std::size_t fallback) {
    auto it = req.params.find(name);
    if (it == req.params.end()) return fallback;
    const std::string& text = it->second;
    if (text.empty() || text.size() > 9 || text.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::MalformedLine, "'" + name + "' must be a non-negative integer");
    }
    return static_cast<std::size_t>(std::stoul(text));
  }

  Response route(const Request& req) const {
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    if (get && parts.size() == 2 && parts[0] == "yard" && parts[1] == "snapshot") {
      return json_response(snapshot_to_json(snapshot_at(required_time(req, "at"))));
    }
    if (get && parts.size() == 1 && parts[0] == "kpi") {
      const TimeWindow window = make_window(required_time(req, "from"), required_time(req, "to"));
      return json_response(to_json(kpi_report(*log(), *layout_, window)));
    }
    if (get && parts.size() == 1 && parts[0] == "blocks") return list_blocks(req);
    if (get && parts.size() == 2 && parts[0] == "blocks") {
      const BlockSpec& b = known_block(std::string(parts[1]));
      const Timestamp at = required_time(req, "at");
      const YardState state = snapshot_at(at);
      nlohmann::json bays = nlohmann::json::array();
      for (int bay = 1; bay <= b.bay_count; ++bay) bays.push_back(bay_detail(state, b, bay));
      nlohmann::json j = b;
      j["at"] = format_timestamp(at);
      j["bays"] = std::move(bays);
      return json_response(j);
    }
    if (get && parts.size() == 4 && parts[0] == "blocks" && parts[2] == "bays") {
      const BlockSpec& b = known_block(std::string(parts[1]));
      const std::string bay_text(parts[3]);
      if (bay_text.empty() || bay_text.size() > 6 || bay_text.find_first_not_of("0123456789") != std::string::npos ||
          std::stoi(bay_text) < 1 || std::stoi(bay_text) > b.bay_count) {
        fail(ErrorCode::AddressOutOfRange, "block " + b.block_id + " has no bay " + bay_text);
      }
      const Timestamp at = required_time(req, "at");
      nlohmann::json j = bay_detail(snapshot_at(at), b, std::stoi(bay_text));
      j["block_id"] = b.block_id;
      j["at"] = format_timestamp(at);
      j["max_tier"] = b.max_tier;
      return json_response(j);
    }
    if (req.method == "POST" && parts.size() == 1 && parts[0] == "simulations") return submit(req.body);
    if (get && parts.size() == 2 && parts[0] == "simulations") return job_status(std::string(parts[1]));
    return error_response(404, "NotFound", "no route for " + req.method + " " + req.path);
  }

  const BlockSpec& known_block(const std::string& id) const {
    const BlockSpec* b = layout_->find(id);
    if (b == nullptr) fail(ErrorCode::AddressOutOfRange, "unknown block " + id);
    return *b;
  }

  Response list_blocks(const Request& req) const {
    const auto& blocks = layout_->blocks();
    const std::size_t offset = count_param(req, "offset", 0);
    const std::size_t limit = count_param(req, "limit", 50);
    nlohmann::json page = nlohmann::json::array();
    for (std::size_t i = offset; i < blocks.size() && i < offset + limit; ++i) page.push_back(blocks[i]);
    return json_response({{"total", blocks.size()}, {"offset", offset}, {"limit", limit}, {"blocks", page}});
  }

  static nlohmann::json bay_detail(const YardState& state, const BlockSpec& b, int bay) {
    using nlohmann::json;
    json rows = json::array();
    for (int row = 1; row <= b.row_count; ++row) {
      json stack = json::array();
      int tier = 0;
      for (const std::string& id : state.stack({b.block_id, bay, row})) {
        const ContainerRecord& rec = state.container(id);
        stack.push_back(json{{"tier", ++tier},
                             {"container_id", id},
                             {"iso_type", rec.iso_type},
                             {"origin_port", rec.origin_port ? json(*rec.origin_port) : json(nullptr)},
                             {"destination_port", rec.destination_port ? json(*rec.destination_port) : json(nullptr)},
                             {"dwell_days", dwell_days(rec.arrival_time, state.clock())},
                             {"departure_booked", rec.departure_booked},
                             {"rehandle_count", rec.rehandle_count}});
      }
      rows.push_back(json{{"row", row}, {"height", tier}, {"stack", std::move(stack)}});
    }
    return json{{"bay", bay}, {"heights", state.stack_heights(b.block_id, bay)}, {"rows", std::move(rows)}};
  }

  Response submit(const std::string& body) const {
    const nlohmann::json j = nlohmann::json::parse(body);
    if (!j.is_object()) return error_response(400, "BadRequest", "body must be a JSON object");
    SimulationJob job;
    job.window = make_window(parse_timestamp(j.at("from").get<std::string>()),
                             parse_timestamp(j.at("to").get<std::string>()));
    job.step = step_from_name(j.value("step", std::string("EVENT")));
    if (!j.contains("strategy")) fail(ErrorCode::InvalidStrategy, "'strategy' is required");
    job.strategy = strategy_spec_from_json(j.at("strategy"));
    Strategy::from_spec(job.strategy);
    job.seed = j.value("seed", std::uint64_t{0});

    std::string id;
    {
      std::lock_guard lock(jobs_mutex_);
      id = "job-" + std::to_string(++job_counter_);
      job.job_id = id;
      jobs_.emplace(id, JobEntry{job, log(), {}, {}, {}});
    }
    {
      std::lock_guard lock(queue_mutex_);
      queue_.push_back(id);
    }
    queue_cv_.notify_one();
    return json_response({{"job_id", id}}, 202);
  }

  Response job_status(const std::string& id) const {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) fail(ErrorCode::UnknownJob, "no job " + id);
    const JobEntry& e = it->second;
    nlohmann::json j{{"job_id", id},
                     {"status", status_name(e.job.status)},
                     {"request",
                      {{"from", format_timestamp(e.job.window.from)},
                       {"to", format_timestamp(e.job.window.to)},
                       {"step", step_name(e.job.step)},
                       {"strategy", to_json(e.job.strategy)},
                       {"seed", e.job.seed}}}};
    if (e.job.status == JobStatus::Done) j["comparison"] = nlohmann::json::parse(e.result);
    if (e.job.status == JobStatus::Failed) j["error"] = {{"code", e.error_code}, {"message", e.error}};
    return json_response(j);
  }

  void work(std::stop_token stop) const {
    while (true) {
      std::string id;
      {
        std::unique_lock lock(queue_mutex_);
        queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); });
        if (stop.stop_requested()) return;
        id = std::move(queue_.front());
        queue_.pop_front();
      }
      SimulationJob job;
      std::shared_ptr<const EventLog> log;
      {
        std::lock_guard lock(jobs_mutex_);
        auto& entry = jobs_.at(id);
        entry.job.status = JobStatus::Running;
        job = entry.job;
        log = entry.log;
      }
      std::string result, error, code;
      try {
        result = to_json(run_job(*log, *layout_, job)).dump();
      } catch (const YardError& e) {
        error = e.what();
        code = std::string(code_name(e.code()));
      } catch (const std::exception& e) {
        error = e.what();
        code = "Internal";
      }
      {
        std::lock_guard lock(jobs_mutex_);
        auto& entry = jobs_.at(id);
        entry.result = std::move(result);
        entry.error = std::move(error);
        entry.error_code = std::move(code);
        entry.job.status = entry.error_code.empty() ? JobStatus::Done : JobStatus::Failed;
      }
      jobs_cv_.notify_all();
    }
  }

  std::shared_ptr<const YardLayout> layout_;
  mutable std::shared_mutex log_mutex_;
  std::shared_ptr<const EventLog> log_;

  mutable std::mutex jobs_mutex_;
  mutable std::condition_variable jobs_cv_;
  mutable std::map<std::string, JobEntry> jobs_;
  mutable std::uint64_t job_counter_ = 0;

  mutable std::mutex queue_mutex_;
  mutable std::condition_variable_any queue_cv_;
  mutable std::deque<std::string> queue_;

  // Declared last so workers stop before the state they use is destroyed.
  std::vector<std::jthread> pool_;
};

}  // namespace yardtwin::service
