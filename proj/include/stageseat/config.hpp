#pragma once

#include "stageseat/domain.hpp"

#include <functional>
#include <optional>
#include <string>

namespace stageseat::config {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string database_path = "stageseat.journal";
    bool sync_writes = false;
    std::string lexicon_path = "lexicon/seed.tsv";
    int threads = 256;
    int pbkdf2_iterations = 120000;
    int session_ttl_hours = 24;
    Policy policy;
    std::optional<std::string> admin_user;
    std::optional<std::string> admin_password;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Reads a JSON config file (every key optional), then applies STAGESEAT_*
/// environment overrides. An empty path skips the file. Throws ConfigError.
ServerConfig load(const std::string& path, const EnvLookup& env = process_env);

/// Overrides: STAGESEAT_HOST, _PORT, _DB, _SYNC, _LEXICON, _THREADS,
/// _PBKDF2_ITERATIONS, _SESSION_TTL_HOURS, _COIN_VALUE_MINOR, _EARN_PER_SEAT,
/// _REVIEW_EARN, _REDEEM_CAP_PCT, _CANCEL_CUTOFF_HOURS, _CURRENCY,
/// _ADMIN_USER, _ADMIN_PASSWORD.
void apply_env(ServerConfig& cfg, const EnvLookup& env);

void validate(const ServerConfig& cfg);

} // namespace stageseat::config
