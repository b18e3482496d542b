#include "stageseat/bench.hpp"

#include "stageseat/domain.hpp"
#include "stageseat/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace stageseat::bench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::uint64_t splitmix(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit(std::uint64_t& state)
{
    return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, int user_index, std::uint64_t stream)
{
    std::uint64_t s = seed ^ (0x51ed2705a8f3c4b1ULL * (static_cast<std::uint64_t>(user_index) + 1)) ^ stream;
    return splitmix(s);
}

std::string fixed(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

std::string_view to_string(Action a)
{
    switch (a) {
    case Action::browse: return "browse";
    case Action::search: return "search";
    case Action::book: return "book";
    case Action::review: return "review";
    case Action::cancel: return "cancel";
    }
    return "browse";
}

Action action_from_string(std::string_view text)
{
    for (Action a : kAllActions) {
        if (to_string(a) == text)
            return a;
    }
    throw Error(ErrorCode::ConfigError, "unknown action '" + std::string(text) + "'");
}

std::map<Action, double> parse_mix(const std::string& text)
{
    std::map<Action, double> mix;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "mix entry '" + item + "' is not action=weight");
        const Action a = action_from_string(item.substr(0, eq));
        try {
            std::size_t used = 0;
            const std::string value = item.substr(eq + 1);
            const double w = std::stod(value, &used);
            if (used != value.size() || !std::isfinite(w))
                throw std::invalid_argument(value);
            mix[a] = w;
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "mix weight in '" + item + "' is not a number");
        }
    }
    return mix;
}

void validate(const ScenarioConfig& cfg)
{
    auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
    if (cfg.users < 1)
        fail("users must be at least 1");
    if (!(cfg.duration_s > 0))
        fail("duration must be positive");
    if (cfg.ramp_s < 0)
        fail("ramp must not be negative");
    if (cfg.think_ms < 0)
        fail("think time must not be negative");
    double sum = 0;
    for (const auto& [a, w] : cfg.mix) {
        if (w < 0)
            fail("mix weights must not be negative");
        sum += w;
    }
    if (!(sum > 0))
        fail("mix weights sum to zero");
}

ActionStream::ActionStream(const ScenarioConfig& cfg, int user_index) : state_(mix_seed(cfg.rng_seed, user_index, 1))
{
    double sum = 0;
    for (const auto& [a, w] : cfg.mix)
        sum += w;
    double acc = 0;
    for (Action a : kAllActions) {
        auto it = cfg.mix.find(a);
        if (it == cfg.mix.end() || it->second <= 0)
            continue;
        acc += it->second / sum;
        cumulative_.emplace_back(a, acc);
    }
    if (cumulative_.empty())
        throw Error(ErrorCode::ConfigError, "mix weights sum to zero");
}

Action ActionStream::next()
{
    const double u = unit(state_);
    for (const auto& [a, c] : cumulative_) {
        if (u < c)
            return a;
    }
    return cumulative_.back().first;
}

std::vector<Action> action_sequence(const ScenarioConfig& cfg, int user_index, std::size_t n)
{
    ActionStream stream(cfg, user_index);
    std::vector<Action> out(n);
    for (auto& a : out)
        a = stream.next();
    return out;
}

double percentile(const std::vector<double>& sorted, double p)
{
    if (sorted.empty())
        throw Error(ErrorCode::EmptySample, "percentile of an empty sample");
    if (!(p > 0) || p > 100)
        throw Error(ErrorCode::OutOfRange, "percentile must be in (0, 100]");
    const auto n = static_cast<double>(sorted.size());
    // The epsilon absorbs binary rounding of p*n/100 for exact products.
    auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

bool is_error(const RequestRecord& r)
{
    return r.status == 0 || r.status >= 500;
}

bool is_contended(const RequestRecord& r)
{
    return r.status == 409 &&
           (r.error_code == "SeatTaken" || r.error_code == "Houseful" || r.error_code == "DuplicateReview");
}

namespace {

EndpointKpi summarize(std::string name, std::vector<const RequestRecord*> records, double wall_time_s)
{
    EndpointKpi k;
    k.endpoint = std::move(name);
    k.request_count = static_cast<std::int64_t>(records.size());
    std::vector<double> latencies;
    latencies.reserve(records.size());
    for (const auto* r : records) {
        if (is_error(*r))
            ++k.error_count;
        else if (is_contended(*r))
            ++k.contended_count;
        else if (r->status >= 400)
            ++k.rejected_count;
        latencies.push_back(r->latency_ms);
    }
    k.error_rate_pct = k.request_count ? 100.0 * static_cast<double>(k.error_count) / k.request_count : 0.0;
    k.throughput_rps = wall_time_s > 0 ? static_cast<double>(k.request_count) / wall_time_s : 0.0;
    if (!latencies.empty()) {
        std::sort(latencies.begin(), latencies.end());
        LatencyStats s;
        s.p50 = percentile(latencies, 50);
        s.p95 = percentile(latencies, 95);
        s.p99 = percentile(latencies, 99);
        s.mean = std::accumulate(latencies.begin(), latencies.end(), 0.0) / static_cast<double>(latencies.size());
        s.max = latencies.back();
        k.latency_ms = s;
    }
    return k;
}

} // namespace

KpiReport build_report(const ScenarioConfig& cfg, const std::vector<RequestRecord>& records, double wall_time_s)
{
    KpiReport report;
    report.config = cfg;
    report.wall_time_s = wall_time_s;
    std::map<std::string, std::vector<const RequestRecord*>> by_endpoint;
    std::vector<const RequestRecord*> all;
    for (const auto& r : records) {
        by_endpoint[r.endpoint].push_back(&r);
        all.push_back(&r);
    }
    for (auto& [name, group] : by_endpoint)
        report.endpoints.push_back(summarize(name, group, wall_time_s));
    report.overall = summarize("ALL", all, wall_time_s);
    return report;
}

// --- process monitor ---------------------------------------------------------

ProcessMonitor::ProcessMonitor(int pid) : pid_(pid) {}

std::optional<ResourceSample> ProcessMonitor::sample(double t_s)
{
    std::ifstream stat("/proc/" + std::to_string(pid_) + "/stat");
    std::string line;
    if (!std::getline(stat, line))
        return std::nullopt;
    // Fields after the parenthesised command name; utime and stime are the
    // 14th and 15th fields overall.
    const auto close = line.rfind(')');
    if (close == std::string::npos)
        return std::nullopt;
    std::istringstream rest(line.substr(close + 2));
    std::vector<std::string> fields{std::istream_iterator<std::string>(rest), {}};
    if (fields.size() < 13)
        return std::nullopt;
    const double ticks = static_cast<double>(sysconf(_SC_CLK_TCK));
    const double cpu_s = (std::stod(fields[11]) + std::stod(fields[12])) / ticks;

    ResourceSample s;
    s.t_s = t_s;
    if (last_ && t_s > last_->first)
        s.cpu_pct = 100.0 * (cpu_s - last_->second) / (t_s - last_->first);
    last_ = std::pair{t_s, cpu_s};

    std::ifstream status("/proc/" + std::to_string(pid_) + "/status");
    while (std::getline(status, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            std::istringstream in(line.substr(6));
            in >> s.rss_kb;
        }
    }
    return s;
}

// --- virtual users -------------------------------------------------------------

namespace {

constexpr std::array kSearchWords{"the", "silent", "kingdom", "drama", "echo", "rao", "garden", "night", "love"};
constexpr std::array kSorts{"relevance", "popularity", "release_date", "rating"};
constexpr std::array kReviewTexts{"a great film", "not good at all", "very boring", "an absolute masterpiece",
                                  "terrible pacing but good music", "somewhat mediocre", "i love it"};

struct Catalog {
    std::vector<std::int64_t> movie_ids;
    std::vector<std::int64_t> show_ids;
};

class Collector {
public:
    void push(RequestRecord r)
    {
        std::lock_guard lock(mu_);
        records_.push_back(std::move(r));
    }
    std::vector<RequestRecord> take()
    {
        std::lock_guard lock(mu_);
        return std::move(records_);
    }

private:
    std::mutex mu_;
    std::vector<RequestRecord> records_;
};

struct Reply {
    int status = 0;
    json body;
};

class Session {
public:
    Session(const std::string& base_url, Collector* collector) : client_(base_url), collector_(collector)
    {
        client_.set_connection_timeout(5, 0);
        client_.set_read_timeout(60, 0);
        client_.set_write_timeout(60, 0);
        client_.set_keep_alive(true);
        client_.set_tcp_nodelay(true);
    }

    Reply send(const std::string& method, const std::string& endpoint, const std::string& path,
               const json& body = nullptr)
    {
        httplib::Headers headers;
        if (!token_.empty())
            headers.emplace("Authorization", "Bearer " + token_);
        const auto t0 = Clock::now();
        httplib::Result res;
        if (method == "GET")
            res = client_.Get(path, headers);
        else if (method == "POST")
            res = client_.Post(path, headers, body.is_null() ? std::string("{}") : body.dump(), "application/json");
        else if (method == "DELETE")
            res = client_.Delete(path, headers);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

        Reply reply;
        RequestRecord rec{method + " " + endpoint, 0, ms, {}};
        if (res) {
            reply.status = res->status;
            rec.status = res->status;
            reply.body = json::parse(res->body, nullptr, false);
            if (reply.status >= 400 && reply.body.is_object() && reply.body.contains("error") &&
                reply.body["error"].is_string())
                rec.error_code = reply.body["error"].get<std::string>();
        }
        if (collector_)
            collector_->push(std::move(rec));
        return reply;
    }

    /// Registers and logs in a disposable account. Returns false on failure.
    bool sign_up(const std::string& username)
    {
        const std::string password = "bench-" + username + "-pw";
        send("POST", "/api/register", "/api/register",
             json{{"username", username}, {"email", username + "@bench.invalid"}, {"password", password}});
        auto r = send("POST", "/api/login", "/api/login", json{{"username", username}, {"password", password}});
        if (r.status != 200 || !r.body.is_object() || !r.body.contains("token"))
            return false;
        token_ = r.body["token"].get<std::string>();
        return true;
    }

private:
    httplib::Client client_;
    Collector* collector_;
    std::string token_;
};

std::string run_tag()
{
    std::random_device rd;
    std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf, 10);
}

void check_reachable(const std::string& base_url)
{
    bool ok = false;
    try {
        httplib::Client c(base_url);
        c.set_connection_timeout(3, 0);
        c.set_read_timeout(5, 0);
        auto res = c.Get("/api/policy");
        ok = res && res->status == 200;
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok)
        throw Error(ErrorCode::TargetUnreachable, "no healthy server at " + base_url);
}

Catalog discover(const std::string& base_url, const std::string& tag)
{
    Session s(base_url, nullptr);
    if (!s.sign_up("bench_" + tag + "_setup"))
        throw Error(ErrorCode::TargetUnreachable, "could not create a setup account at " + base_url);
    Catalog cat;
    auto movies = s.send("GET", "/api/movies", "/api/movies");
    if (movies.body.is_array())
        for (const auto& m : movies.body)
            cat.movie_ids.push_back(m.at("movie_id").get<std::int64_t>());
    auto venues = s.send("GET", "/api/venues", "/api/venues");
    const Date today = Date::of(now_millis());
    const Timestamp bookable_after = now_millis() + kMillisPerHour;
    if (venues.body.is_array()) {
        for (const auto& v : venues.body) {
            const auto vid = v.at("venue_id").get<std::int64_t>();
            for (int d = 0; d < 14; ++d) {
                auto shows = s.send("GET", "", "/api/venues/" + std::to_string(vid) +
                                                    "/shows?date=" + today.plus_days(d).to_string());
                if (!shows.body.is_array())
                    continue;
                for (const auto& sh : shows.body) {
                    if (sh.at("starts_at").get<std::int64_t>() > bookable_after)
                        cat.show_ids.push_back(sh.at("show_id").get<std::int64_t>());
                }
            }
        }
    }
    return cat;
}

class VirtualUser {
public:
    VirtualUser(const ScenarioConfig& cfg, int index, const std::string& tag, const Catalog& catalog,
                Collector& collector, std::map<Action, std::int64_t>& issued)
        : cfg_(cfg),
          index_(index),
          tag_(tag),
          catalog_(catalog),
          session_(cfg.base_url, &collector),
          actions_(cfg, index),
          param_state_(mix_seed(cfg.rng_seed, index, 2)),
          issued_(issued)
    {
    }

    void run(Clock::time_point start_at, Clock::time_point deadline)
    {
        std::this_thread::sleep_until(start_at);
        if (Clock::now() >= deadline)
            return;
        if (!session_.sign_up("bench_" + tag_ + "_" + std::to_string(index_)))
            return;
        while (Clock::now() < deadline) {
            const Action a = actions_.next();
            ++issued_[a];
            perform(a);
            if (cfg_.think_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.think_ms));
        }
    }

private:
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(splitmix(param_state_) % n); }

    void perform(Action a)
    {
        switch (a) {
        case Action::browse: browse(); break;
        case Action::search: search(); break;
        case Action::book: book(); break;
        case Action::review: review(); break;
        case Action::cancel: cancel(); break;
        }
    }

    void browse()
    {
        if (catalog_.movie_ids.empty()) {
            session_.send("GET", "/api/movies", "/api/movies");
            return;
        }
        const auto id = catalog_.movie_ids[pick(catalog_.movie_ids.size())];
        session_.send("GET", "/api/movies/{id}", "/api/movies/" + std::to_string(id));
    }

    void search()
    {
        std::string path = std::string("/api/movies?q=") + kSearchWords[pick(kSearchWords.size())];
        if (pick(2) == 0)
            path += std::string("&sort=") + kSorts[pick(kSorts.size())];
        session_.send("GET", "/api/movies", path);
    }

    void book()
    {
        if (catalog_.show_ids.empty()) {
            browse();
            return;
        }
        const auto show = catalog_.show_ids[pick(catalog_.show_ids.size())];
        auto grid = session_.send("GET", "/api/shows/{id}/seats", "/api/shows/" + std::to_string(show) + "/seats");
        std::vector<std::string> free;
        if (grid.status == 200 && grid.body.contains("grid")) {
            const auto& rows = grid.body["grid"];
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto line = rows[r].get<std::string>();
                for (std::size_t c = 0; c < line.size(); ++c) {
                    if (line[c] == '.')
                        free.push_back(seat_label_encode(SeatId{static_cast<int>(r), static_cast<int>(c)}));
                }
            }
        }
        json seats = json::array();
        if (free.empty()) {
            seats.push_back("A1");
        } else {
            const std::size_t want = std::min<std::size_t>(free.size(), 1 + pick(2));
            std::set<std::string> chosen;
            while (chosen.size() < want)
                chosen.insert(free[pick(free.size())]);
            for (const auto& s : chosen)
                seats.push_back(s);
        }
        auto r = session_.send("POST", "/api/bookings", "/api/bookings",
                               json{{"show_id", show}, {"seats", seats}, {"coins_redeemed", 0}});
        if (r.status == 201 && r.body.contains("booking_id"))
            bookings_.push_back(r.body["booking_id"].get<std::int64_t>());
    }

    void review()
    {
        if (catalog_.movie_ids.empty()) {
            browse();
            return;
        }
        const auto id = catalog_.movie_ids[pick(catalog_.movie_ids.size())];
        session_.send("POST", "/api/movies/{id}/reviews", "/api/movies/" + std::to_string(id) + "/reviews",
                      json{{"rating", 1 + static_cast<int>(pick(5))},
                           {"text", kReviewTexts[pick(kReviewTexts.size())]}});
    }

    void cancel()
    {
        if (bookings_.empty()) {
            session_.send("GET", "/api/me/bookings", "/api/me/bookings");
            return;
        }
        const auto id = bookings_.back();
        bookings_.pop_back();
        session_.send("DELETE", "/api/bookings/{id}", "/api/bookings/" + std::to_string(id));
    }

    const ScenarioConfig& cfg_;
    int index_;
    const std::string& tag_;
    const Catalog& catalog_;
    Session session_;
    ActionStream actions_;
    std::uint64_t param_state_;
    std::map<Action, std::int64_t>& issued_;
    std::vector<std::int64_t> bookings_;
};

} // namespace

KpiReport run_load(const ScenarioConfig& cfg)
{
    validate(cfg);
    check_reachable(cfg.base_url);

    const std::string tag = run_tag();
    const Catalog catalog = discover(cfg.base_url, tag);

    Collector collector;
    std::vector<std::map<Action, std::int64_t>> issued(static_cast<std::size_t>(cfg.users));
    std::vector<std::unique_ptr<VirtualUser>> users;
    for (int i = 0; i < cfg.users; ++i)
        users.push_back(std::make_unique<VirtualUser>(cfg, i, tag, catalog, collector, issued[i]));

    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.duration_s));

    std::atomic<bool> done{false};
    std::vector<ResourceSample> samples;
    std::thread monitor;
    if (cfg.monitor_pid) {
        monitor = std::thread([&] {
            ProcessMonitor m(*cfg.monitor_pid);
            while (!done) {
                const double t = std::chrono::duration<double>(Clock::now() - start).count();
                if (auto s = m.sample(t); s && t > 0)
                    samples.push_back(*s);
                for (int i = 0; i < 10 && !done; ++i)
                    std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
        });
    }

    std::vector<std::thread> threads;
    for (int i = 0; i < cfg.users; ++i) {
        const double offset = cfg.users > 1 ? cfg.ramp_s * i / cfg.users : 0.0;
        const auto start_at = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(offset));
        threads.emplace_back([&, i, start_at] { users[i]->run(start_at, deadline); });
    }
    for (auto& t : threads)
        t.join();
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    done = true;
    if (monitor.joinable())
        monitor.join();

    KpiReport report = build_report(cfg, collector.take(), wall);
    report.resources = std::move(samples);
    for (const auto& per_user : issued)
        for (const auto& [a, n] : per_user)
            report.actions_issued[a] += n;
    return report;
}

SweepResult stress_sweep(const ScenarioConfig& cfg, const std::vector<int>& user_steps, const Runner& runner)
{
    if (user_steps.empty())
        throw Error(ErrorCode::ConfigError, "no sweep steps given");
    if (!std::is_sorted(user_steps.begin(), user_steps.end()) ||
        std::adjacent_find(user_steps.begin(), user_steps.end()) != user_steps.end())
        throw Error(ErrorCode::ConfigError, "sweep steps must be strictly ascending");

    SweepResult result;
    std::optional<double> baseline_p95;
    for (int users : user_steps) {
        SweepStep step;
        step.users = users;
        ScenarioConfig c = cfg;
        c.users = users;
        try {
            step.report = runner(c);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError)
                throw;
            step.error = std::string(to_string(e.code()));
        }
        if (step.report) {
            const auto& overall = step.report->overall;
            const double p95 = overall.latency_ms ? overall.latency_ms->p95 : 0.0;
            bool knee = overall.error_rate_pct > 1.0;
            if (!baseline_p95)
                baseline_p95 = p95;
            else if (p95 > 2.0 * *baseline_p95)
                knee = true;
            if (knee && !result.knee_index) {
                step.knee = true;
                result.knee_index = result.steps.size();
            }
        }
        result.steps.push_back(std::move(step));
    }
    return result;
}

// --- serialization ---------------------------------------------------------------

namespace {

json kpi_json(const EndpointKpi& k)
{
    json j{{"endpoint", k.endpoint},
           {"request_count", k.request_count},
           {"error_count", k.error_count},
           {"contended_count", k.contended_count},
           {"rejected_count", k.rejected_count},
           {"error_rate_pct", k.error_rate_pct},
           {"throughput_rps", k.throughput_rps}};
    if (k.latency_ms)
        j["latency_ms"] = json{{"p50", k.latency_ms->p50},
                               {"p95", k.latency_ms->p95},
                               {"p99", k.latency_ms->p99},
                               {"mean", k.latency_ms->mean},
                               {"max", k.latency_ms->max}};
    else
        j["latency_ms"] = nullptr;
    return j;
}

} // namespace

json to_json(const KpiReport& r)
{
    json mix = json::object();
    for (const auto& [a, w] : r.config.mix)
        mix[std::string(to_string(a))] = w;
    json actions = json::object();
    for (const auto& [a, n] : r.actions_issued)
        actions[std::string(to_string(a))] = n;
    json endpoints = json::array();
    for (const auto& e : r.endpoints)
        endpoints.push_back(kpi_json(e));
    json resources = json::array();
    for (const auto& s : r.resources)
        resources.push_back(json{{"t_s", s.t_s}, {"cpu_pct", s.cpu_pct}, {"rss_kb", s.rss_kb}});
    json config{{"base_url", r.config.base_url},
                {"users", r.config.users},
                {"duration_s", r.config.duration_s},
                {"ramp_s", r.config.ramp_s},
                {"think_ms", r.config.think_ms},
                {"seed", r.config.rng_seed},
                {"mix", mix}};
    if (r.config.monitor_pid)
        config["monitor_pid"] = *r.config.monitor_pid;
    return json{{"schema", "stageseat-bench/1"},
                {"config", config},
                {"host", json{{"hardware_concurrency", std::thread::hardware_concurrency()}}},
                {"wall_time_s", r.wall_time_s},
                {"actions_issued", actions},
                {"overall", kpi_json(r.overall)},
                {"endpoints", endpoints},
                {"resources", resources}};
}

json to_json(const SweepResult& r)
{
    json steps = json::array();
    for (const auto& s : r.steps) {
        json j{{"users", s.users}, {"knee", s.knee}};
        if (s.report)
            j["report"] = to_json(*s.report);
        else
            j["error"] = s.error;
        steps.push_back(std::move(j));
    }
    return json{{"schema", "stageseat-bench-sweep/1"},
                {"steps", steps},
                {"knee_index", r.knee_index ? json(*r.knee_index) : json(nullptr)}};
}

std::string to_csv(const KpiReport& r)
{
    std::string out = "endpoint,count,errors,error_rate_pct,rps,p50,p95,p99,mean,max\n";
    auto row = [&](const EndpointKpi& k) {
        const LatencyStats l = k.latency_ms.value_or(LatencyStats{});
        std::string name = k.endpoint;
        if (name.find_first_of(",\"") != std::string::npos)
            name = "\"" + name + "\"";
        out += name + "," + std::to_string(k.request_count) + "," + std::to_string(k.error_count) + "," +
               fixed(k.error_rate_pct) + "," + fixed(k.throughput_rps) + "," + fixed(l.p50) + "," + fixed(l.p95) +
               "," + fixed(l.p99) + "," + fixed(l.mean) + "," + fixed(l.max) + "\n";
    };
    for (const auto& e : r.endpoints)
        row(e);
    row(r.overall);
    return out;
}

std::string sweep_table(const SweepResult& r)
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%8s %10s %10s %10s %10s %10s  %s\n", "users", "requests", "rps", "err%", "p50ms",
                  "p95ms", "note");
    out << buf;
    for (const auto& s : r.steps) {
        if (!s.report) {
            std::snprintf(buf, sizeof buf, "%8d %10s %10s %10s %10s %10s  %s\n", s.users, "-", "-", "-", "-", "-",
                          s.error.c_str());
        } else {
            const auto& o = s.report->overall;
            const LatencyStats l = o.latency_ms.value_or(LatencyStats{});
            std::snprintf(buf, sizeof buf, "%8d %10lld %10.1f %10.2f %10.2f %10.2f  %s\n", s.users,
                          static_cast<long long>(o.request_count), o.throughput_rps, o.error_rate_pct, l.p50, l.p95,
                          s.knee ? "knee" : "");
        }
        out << buf;
    }
    return out.str();
}

} // namespace stageseat::bench
