#pragma once

#include "stageseat/domain.hpp"
#include "stageseat/store.hpp"

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace stageseat::auth {

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr int kDefaultIterations = 120000;
inline constexpr Timestamp kDefaultSessionTtl = 24 * kMillisPerHour;

/// PBKDF2-HMAC-SHA256 digests in the form
/// "pbkdf2_sha256$<iterations>$<salt b64url>$<hash b64url>".
std::string hash_password(const std::string& password, int iterations);
/// Constant-time comparison; malformed digests never verify.
bool verify_password(const std::string& password, const std::string& digest);

/// 32 random bytes from the system CSPRNG, base64url without padding.
std::string random_token();

std::string base64url(const unsigned char* data, std::size_t len);

struct Session {
    std::string token;
    Id user_id = 0;
    Role role = Role::user;
    Timestamp expires_at = 0;
};

struct AuthConfig {
    int pbkdf2_iterations = kDefaultIterations;
    Timestamp session_ttl = kDefaultSessionTtl;
};

struct Principal {
    Id user_id = 0;
    Role role = Role::user;
};

class AuthService {
public:
    AuthService(store::Store& store, AuthConfig config);

    /// Throws WeakPassword, BadRequest (malformed username or email),
    /// DuplicateUsername or DuplicateEmail.
    UserAccount register_user(const std::string& username, const std::string& email, const std::string& password,
                              Timestamp now, Role role = Role::user);

    /// Throws InvalidCredentials for an unknown user and a wrong password
    /// alike; both paths run one digest computation.
    Session login(const std::string& username, const std::string& password, Timestamp now);

    void logout(const std::string& token);

    /// Resolves a bearer token. The role is re-read from the store so a demoted
    /// or deleted account loses access at once. Throws Unauthorized for a
    /// missing, unknown or expired token, Forbidden when an admin is required.
    Principal authorize(const std::optional<std::string>& token, Role required, Timestamp now);

    /// Creates the admin account if no user with that name exists yet.
    /// Returns true when an account was created.
    bool bootstrap_admin(const std::string& username, const std::string& password, Timestamp now);

    /// Test hook: moves a session's expiry.
    void set_expiry(const std::string& token, Timestamp expires_at);

    [[nodiscard]] const AuthConfig& config() const { return config_; }

private:
    store::Store& store_;
    AuthConfig config_;
    std::string dummy_digest_;

    std::mutex mu_;
    std::unordered_map<std::string, Session> sessions_;
};

} // namespace stageseat::auth
