#pragma once

// HTTP/JSON surface. ApiService is transport independent: it maps a request
// (method, path, query, headers, body) to a response, so tests can drive every
// route in-process. HttpServer binds it to a socket.

#include "stageseat/auth.hpp"
#include "stageseat/booking.hpp"
#include "stageseat/error.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <regex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace stageseat::api {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers; // keys lowercased
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;

    [[nodiscard]] nlohmann::json json() const { return nlohmann::json::parse(body); }
};

int http_status(ErrorCode code);

enum class Access { open, user, admin };

std::string_view to_string(Access access);

struct RouteInfo {
    std::string method;
    std::string pattern; // e.g. "/api/movies/{id}"
    Access access = Access::user;
};

struct ServiceOptions {
    Policy policy;
    auth::AuthConfig auth;
};

class ApiService {
public:
    using Clock = std::function<Timestamp()>;

    ApiService(store::Store& store, sentiment::Lexicon lexicon, ServiceOptions options, Clock clock = now_millis);
    ~ApiService();

    Response dispatch(const Request& request);

    /// Convenience for tests and tools.
    Response call(const std::string& method, const std::string& path_and_query, const nlohmann::json& body = nullptr,
                  const std::string& token = {});

    [[nodiscard]] std::vector<RouteInfo> routes() const;

    auth::AuthService& auth() { return auth_; }
    booking::BookingEngine& engine() { return engine_; }
    store::Store& store() { return store_; }
    [[nodiscard]] const sentiment::Lexicon& lexicon() const { return lexicon_; }

    void set_clock(Clock clock) { clock_ = std::move(clock); }

    struct Context;
    using Handler = std::function<Response(Context&)>;

private:
    struct Route {
        std::string method;
        std::string pattern;
        std::regex regex;
        Access access;
        Handler handler;
    };

    void add(std::string method, std::string pattern, Access access, Handler handler);
    void register_routes();

    store::Store& store_;
    sentiment::Lexicon lexicon_;
    Policy policy_;
    auth::AuthService auth_;
    booking::BookingEngine engine_;
    Clock clock_;
    std::vector<Route> routes_;
};

/// Error body helper: {"error": code, "message": ...}.
Response error_response(ErrorCode code, const std::string& message);

/// Splits "path?a=1&b=2" and percent-decodes the query values.
Request make_request(const std::string& method, const std::string& path_and_query);

class HttpServer {
public:
    HttpServer(ApiService& service, int threads);
    ~HttpServer();

    /// Binds host:port; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();
    [[nodiscard]] bool running() const;

private:
    ApiService& service_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace stageseat::api
