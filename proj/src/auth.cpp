#include "stageseat/auth.hpp"

#include "stageseat/error.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <array>
#include <vector>

namespace stageseat::auth {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kHashBytes = 32;
constexpr std::string_view kScheme = "pbkdf2_sha256";
constexpr std::size_t kMaxUsernameLength = 64;

void random_bytes(unsigned char* out, std::size_t len)
{
    if (RAND_bytes(out, static_cast<int>(len)) != 1)
        throw Error(ErrorCode::Internal, "system random source failed");
}

std::vector<unsigned char> pbkdf2(const std::string& password, const std::vector<unsigned char>& salt, int iterations)
{
    std::vector<unsigned char> out(kHashBytes);
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                          static_cast<int>(salt.size()), iterations, EVP_sha256(), static_cast<int>(out.size()),
                          out.data()) != 1)
        throw Error(ErrorCode::Internal, "PBKDF2 failed");
    return out;
}

std::optional<std::vector<unsigned char>> base64url_decode(std::string_view text)
{
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z')
            return c - 'A';
        if (c >= 'a' && c <= 'z')
            return c - 'a' + 26;
        if (c >= '0' && c <= '9')
            return c - '0' + 52;
        if (c == '-')
            return 62;
        if (c == '_')
            return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        int v = value(c);
        if (v < 0)
            return std::nullopt;
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

bool valid_username(const std::string& name)
{
    if (name.empty() || name.size() > kMaxUsernameLength)
        return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) { return c > 0x20 && c != 0x7f; });
}

bool valid_email(const std::string& email)
{
    const auto at = email.find('@');
    if (at == std::string::npos || at == 0 || email.find('@', at + 1) != std::string::npos)
        return false;
    const std::string domain = email.substr(at + 1);
    const auto dot = domain.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= domain.size() || domain.back() == '.')
        return false;
    return std::none_of(email.begin(), email.end(), [](unsigned char c) { return c <= 0x20 || c == 0x7f; });
}

} // namespace

std::string base64url(const unsigned char* data, std::size_t len)
{
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::string out;
    out.reserve((len * 4 + 2) / 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::size_t i = 0; i < len; ++i) {
        acc = (acc << 8) | data[i];
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out += kAlphabet[(acc >> bits) & 0x3f];
        }
    }
    if (bits > 0)
        out += kAlphabet[(acc << (6 - bits)) & 0x3f];
    return out;
}

std::string hash_password(const std::string& password, int iterations)
{
    if (iterations < 1)
        throw Error(ErrorCode::ConfigError, "PBKDF2 iterations must be positive");
    std::vector<unsigned char> salt(kSaltBytes);
    random_bytes(salt.data(), salt.size());
    const auto hash = pbkdf2(password, salt, iterations);
    return std::string(kScheme) + "$" + std::to_string(iterations) + "$" + base64url(salt.data(), salt.size()) +
           "$" + base64url(hash.data(), hash.size());
}

bool verify_password(const std::string& password, const std::string& digest)
{
    std::array<std::string_view, 4> parts;
    std::string_view rest = digest;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto sep = rest.find('$');
        if (i + 1 < parts.size()) {
            if (sep == std::string_view::npos)
                return false;
            parts[i] = rest.substr(0, sep);
            rest.remove_prefix(sep + 1);
        } else {
            if (sep != std::string_view::npos)
                return false;
            parts[i] = rest;
        }
    }
    if (parts[0] != kScheme)
        return false;
    int iterations = 0;
    try {
        iterations = std::stoi(std::string(parts[1]));
    } catch (const std::exception&) {
        return false;
    }
    if (iterations < 1)
        return false;
    auto salt = base64url_decode(parts[2]);
    auto expected = base64url_decode(parts[3]);
    if (!salt || !expected || expected->size() != kHashBytes)
        return false;
    const auto actual = pbkdf2(password, *salt, iterations);
    return CRYPTO_memcmp(actual.data(), expected->data(), kHashBytes) == 0;
}

std::string random_token()
{
    std::array<unsigned char, 32> bytes{};
    random_bytes(bytes.data(), bytes.size());
    return base64url(bytes.data(), bytes.size());
}

AuthService::AuthService(store::Store& store, AuthConfig config)
    : store_(store), config_(config), dummy_digest_(hash_password(random_token(), config.pbkdf2_iterations))
{
}

UserAccount AuthService::register_user(const std::string& username, const std::string& email,
                                       const std::string& password, Timestamp now, Role role)
{
    if (password.size() < kMinPasswordLength)
        throw Error(ErrorCode::WeakPassword,
                    "password must be at least " + std::to_string(kMinPasswordLength) + " characters");
    if (!valid_username(username))
        throw Error(ErrorCode::BadRequest, "username must be 1-64 printable characters without spaces");
    if (!valid_email(email))
        throw Error(ErrorCode::BadRequest, "email is not a valid address");

    auto check_unique = [&] {
        store_.read([&](const store::View& v) {
            if (v.user_by_name(username))
                throw Error(ErrorCode::DuplicateUsername, "username already taken");
            if (v.user_by_email(email))
                throw Error(ErrorCode::DuplicateEmail, "email already registered");
        });
    };
    check_unique();

    UserAccount user;
    user.username = username;
    user.email = email;
    user.password_digest = hash_password(password, config_.pbkdf2_iterations);
    user.role = role;
    user.created_at = now;
    try {
        auto result = store_.transact({store::Insert{user, std::nullopt}});
        user.user_id = result.ids.at(0);
    } catch (const Error& e) {
        // A concurrent registration won the race; report which field clashed.
        if (e.code() == ErrorCode::ConstraintViolation)
            check_unique();
        throw;
    }
    return user;
}

Session AuthService::login(const std::string& username, const std::string& password, Timestamp now)
{
    auto user = store_.read([&](const store::View& v) -> std::optional<UserAccount> {
        if (auto id = v.user_by_name(username))
            return *v.find<UserAccount>(*id);
        return std::nullopt;
    });
    const bool ok = verify_password(password, user ? user->password_digest : dummy_digest_);
    if (!user || !ok)
        throw Error(ErrorCode::InvalidCredentials, "invalid username or password");

    Session session{random_token(), user->user_id, user->role, now + config_.session_ttl};
    std::lock_guard lock(mu_);
    sessions_[session.token] = session;
    return session;
}

void AuthService::logout(const std::string& token)
{
    std::lock_guard lock(mu_);
    sessions_.erase(token);
}

Principal AuthService::authorize(const std::optional<std::string>& token, Role required, Timestamp now)
{
    if (!token || token->empty())
        throw Error(ErrorCode::Unauthorized, "missing bearer token");
    Session session;
    {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(*token);
        if (it == sessions_.end())
            throw Error(ErrorCode::Unauthorized, "unknown or expired token");
        if (now >= it->second.expires_at) {
            sessions_.erase(it);
            throw Error(ErrorCode::Unauthorized, "unknown or expired token");
        }
        session = it->second;
    }
    auto role = store_.read([&](const store::View& v) -> std::optional<Role> {
        if (const auto* u = v.find<UserAccount>(session.user_id))
            return u->role;
        return std::nullopt;
    });
    if (!role)
        throw Error(ErrorCode::Unauthorized, "account no longer exists");
    if (required == Role::admin && *role != Role::admin)
        throw Error(ErrorCode::Forbidden, "admin role required");
    return Principal{session.user_id, *role};
}

bool AuthService::bootstrap_admin(const std::string& username, const std::string& password, Timestamp now)
{
    const bool exists = store_.read([&](const store::View& v) { return v.user_by_name(username).has_value(); });
    if (exists)
        return false;
    register_user(username, username + "@localhost.local", password, now, Role::admin);
    return true;
}

void AuthService::set_expiry(const std::string& token, Timestamp expires_at)
{
    std::lock_guard lock(mu_);
    if (auto it = sessions_.find(token); it != sessions_.end())
        it->second.expires_at = expires_at;
}

} // namespace stageseat::auth
