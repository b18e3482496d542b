#pragma once

// Closed-loop load generator and KPI reporting for a running server.

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stageseat::bench {

enum class Action { browse, search, book, review, cancel };

inline constexpr std::array<Action, 5> kAllActions{Action::browse, Action::search, Action::book, Action::review,
                                                   Action::cancel};

std::string_view to_string(Action a);
Action action_from_string(std::string_view text);

struct ScenarioConfig {
    std::string base_url = "http://127.0.0.1:8080";
    int users = 1;
    double duration_s = 10.0;
    double ramp_s = 0.0;
    std::map<Action, double> mix{{Action::browse, 1.0}};
    std::uint64_t rng_seed = 42;
    int think_ms = 0;
    std::optional<int> monitor_pid;
};

/// "browse=0.5,search=0.2". Throws ConfigError on unknown actions or bad numbers.
std::map<Action, double> parse_mix(const std::string& text);

/// Throws ConfigError: users < 1, duration <= 0, ramp < 0, think < 0, any
/// negative weight, or weights summing to 0.
void validate(const ScenarioConfig& cfg);

/// Draws actions for one virtual user from the normalized mix. The stream
/// depends only on (seed, user index, mix), never on server responses.
class ActionStream {
public:
    ActionStream(const ScenarioConfig& cfg, int user_index);
    Action next();

private:
    std::uint64_t state_;
    std::vector<std::pair<Action, double>> cumulative_;
};

std::vector<Action> action_sequence(const ScenarioConfig& cfg, int user_index, std::size_t n);

/// Nearest rank: the value at 1-based rank ceil(p/100 * n) of a sorted sample.
/// Throws EmptySample for an empty sample and OutOfRange for p outside (0, 100].
double percentile(const std::vector<double>& sorted, double p);

struct LatencyStats {
    double p50 = 0, p95 = 0, p99 = 0, mean = 0, max = 0;
};

struct EndpointKpi {
    std::string endpoint;
    std::int64_t request_count = 0;
    std::int64_t error_count = 0;     // 5xx and transport failures
    std::int64_t contended_count = 0; // expected inventory 409s
    std::int64_t rejected_count = 0;  // other 4xx
    double error_rate_pct = 0;
    double throughput_rps = 0;
    std::optional<LatencyStats> latency_ms; // absent when no requests
};

struct ResourceSample {
    double t_s = 0;
    double cpu_pct = 0;
    std::int64_t rss_kb = 0;
};

struct KpiReport {
    ScenarioConfig config;
    double wall_time_s = 0;
    std::vector<EndpointKpi> endpoints; // sorted by endpoint name
    EndpointKpi overall;
    std::vector<ResourceSample> resources;
    std::map<Action, std::int64_t> actions_issued;
};

struct RequestRecord {
    std::string endpoint; // "GET /api/movies/{id}"
    int status = 0;       // 0 for transport failure
    double latency_ms = 0;
    std::string error_code; // "error" field of a JSON error body, if any
};

/// True for statuses counted as errors: transport failure or 5xx.
bool is_error(const RequestRecord& r);
/// True for 409s that are expected when users compete for seats or repeat a
/// review: SeatTaken, Houseful, DuplicateReview.
bool is_contended(const RequestRecord& r);

KpiReport build_report(const ScenarioConfig& cfg, const std::vector<RequestRecord>& records, double wall_time_s);

/// Runs the scenario. Throws TargetUnreachable (checked before any virtual
/// user starts) or ConfigError.
KpiReport run_load(const ScenarioConfig& cfg);

struct SweepStep {
    int users = 0;
    std::optional<KpiReport> report;
    std::string error; // error code when the step failed
    bool knee = false;
};

struct SweepResult {
    std::vector<SweepStep> steps;
    std::optional<std::size_t> knee_index;
};

using Runner = std::function<KpiReport(const ScenarioConfig&)>;

/// One run per step with fresh virtual users. The knee is the first step whose
/// error rate exceeds 1% or whose overall p95 is more than twice the first
/// successful step's. A failing step is recorded and the sweep continues.
SweepResult stress_sweep(const ScenarioConfig& cfg, const std::vector<int>& user_steps,
                         const Runner& runner = run_load);

nlohmann::json to_json(const KpiReport& r);
nlohmann::json to_json(const SweepResult& r);
/// Columns: endpoint, count, errors, error_rate_pct, rps, p50, p95, p99, mean, max.
std::string to_csv(const KpiReport& r);
std::string sweep_table(const SweepResult& r);

/// Samples /proc/<pid>: CPU percent since the previous sample and VmRSS.
class ProcessMonitor {
public:
    explicit ProcessMonitor(int pid);
    std::optional<ResourceSample> sample(double t_s);

private:
    int pid_;
    std::optional<std::pair<double, double>> last_; // (wall seconds, cpu seconds)
};

} // namespace stageseat::bench
