#include "stageseat/config.hpp"

#include "stageseat/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>

namespace stageseat::config {

using nlohmann::json;

namespace {

template <class T>
void read_key(const json& j, const char* key, T& out)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ConfigError, std::string("config key '") + key + "' has the wrong type");
    }
}

int to_int(const std::string& name, const std::string& value)
{
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size())
            throw std::invalid_argument(name);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, name + " must be an integer, got '" + value + "'");
    }
}

} // namespace

std::optional<std::string> process_env(const std::string& name)
{
    if (const char* v = std::getenv(name.c_str()))
        return std::string(v);
    return std::nullopt;
}

void apply_env(ServerConfig& cfg, const EnvLookup& env)
{
    auto str = [&](const char* name, std::string& out) {
        if (auto v = env(name))
            out = *v;
    };
    auto num = [&](const char* name, auto& out) {
        if (auto v = env(name))
            out = to_int(name, *v);
    };
    str("STAGESEAT_HOST", cfg.host);
    num("STAGESEAT_PORT", cfg.port);
    str("STAGESEAT_DB", cfg.database_path);
    if (auto v = env("STAGESEAT_SYNC"))
        cfg.sync_writes = *v == "1" || *v == "true";
    str("STAGESEAT_LEXICON", cfg.lexicon_path);
    num("STAGESEAT_THREADS", cfg.threads);
    num("STAGESEAT_PBKDF2_ITERATIONS", cfg.pbkdf2_iterations);
    num("STAGESEAT_SESSION_TTL_HOURS", cfg.session_ttl_hours);
    num("STAGESEAT_COIN_VALUE_MINOR", cfg.policy.coin_value_minor);
    num("STAGESEAT_EARN_PER_SEAT", cfg.policy.earn_per_seat);
    num("STAGESEAT_REVIEW_EARN", cfg.policy.review_earn);
    num("STAGESEAT_REDEEM_CAP_PCT", cfg.policy.redeem_cap_pct);
    num("STAGESEAT_CANCEL_CUTOFF_HOURS", cfg.policy.cancel_cutoff_hours);
    str("STAGESEAT_CURRENCY", cfg.policy.currency);
    if (auto v = env("STAGESEAT_ADMIN_USER"))
        cfg.admin_user = *v;
    if (auto v = env("STAGESEAT_ADMIN_PASSWORD"))
        cfg.admin_password = *v;
}

void validate(const ServerConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
    if (cfg.port < 0 || cfg.port > 65535)
        fail("port must be 0-65535");
    if (cfg.threads < 1)
        fail("threads must be positive");
    if (cfg.pbkdf2_iterations < 1)
        fail("pbkdf2_iterations must be positive");
    if (cfg.session_ttl_hours < 1)
        fail("session_ttl_hours must be positive");
    const Policy& p = cfg.policy;
    if (p.coin_value_minor < 1 || p.earn_per_seat < 0 || p.review_earn < 0 || p.cancel_cutoff_hours < 0)
        fail("policy constants must be non-negative (coin value positive)");
    if (p.redeem_cap_pct < 0 || p.redeem_cap_pct > 100)
        fail("redeem_cap_pct must be 0-100");
    if (cfg.admin_user.has_value() != cfg.admin_password.has_value())
        fail("admin user and admin password must be set together");
}

ServerConfig load(const std::string& path, const EnvLookup& env)
{
    ServerConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ConfigError, "config file " + path + " is not valid JSON: " + e.what());
        }
        if (!j.is_object())
            throw Error(ErrorCode::ConfigError, "config file must hold a JSON object");
        read_key(j, "host", cfg.host);
        read_key(j, "port", cfg.port);
        read_key(j, "database_path", cfg.database_path);
        read_key(j, "sync_writes", cfg.sync_writes);
        read_key(j, "lexicon_path", cfg.lexicon_path);
        read_key(j, "threads", cfg.threads);
        read_key(j, "pbkdf2_iterations", cfg.pbkdf2_iterations);
        read_key(j, "session_ttl_hours", cfg.session_ttl_hours);
        if (auto it = j.find("policy"); it != j.end()) {
            read_key(*it, "coin_value_minor", cfg.policy.coin_value_minor);
            read_key(*it, "earn_per_seat", cfg.policy.earn_per_seat);
            read_key(*it, "review_earn", cfg.policy.review_earn);
            read_key(*it, "redeem_cap_pct", cfg.policy.redeem_cap_pct);
            read_key(*it, "cancel_cutoff_hours", cfg.policy.cancel_cutoff_hours);
            read_key(*it, "currency", cfg.policy.currency);
        }
        if (auto it = j.find("admin_user"); it != j.end() && it->is_string())
            cfg.admin_user = it->get<std::string>();
        if (auto it = j.find("admin_password"); it != j.end() && it->is_string())
            cfg.admin_password = it->get<std::string>();
    }
    apply_env(cfg, env);
    validate(cfg);
    return cfg;
}

} // namespace stageseat::config
