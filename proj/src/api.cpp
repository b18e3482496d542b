#include "stageseat/api.hpp"

#include "stageseat/analytics.hpp"
#include "stageseat/catalog.hpp"
#include "stageseat/domain_json.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>

namespace stageseat::api {

using nlohmann::json;

int http_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SeatTaken:
    case ErrorCode::Houseful:
    case ErrorCode::AlreadyCancelled:
    case ErrorCode::AlreadyRewarded:
    case ErrorCode::DuplicateReview:
    case ErrorCode::DuplicateUsername:
    case ErrorCode::DuplicateEmail:
    case ErrorCode::Conflict:
    case ErrorCode::ConstraintViolation:
    case ErrorCode::ImportIntoNonEmptyStore: return 409;
    case ErrorCode::TooLateToCancel:
    case ErrorCode::ShowStarted:
    case ErrorCode::PastShowtime:
    case ErrorCode::InsufficientCoins: return 422;
    case ErrorCode::OutOfRange:
    case ErrorCode::ParseError:
    case ErrorCode::DiscountExceedsSubtotal:
    case ErrorCode::FormatError:
    case ErrorCode::InvalidSeat:
    case ErrorCode::InvalidQuery:
    case ErrorCode::InvalidWindow:
    case ErrorCode::MalformedLine:
    case ErrorCode::WeakPassword:
    case ErrorCode::BadRequest: return 400;
    case ErrorCode::InvalidCredentials:
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::Forbidden:
    case ErrorCode::NotOwner: return 403;
    case ErrorCode::UnknownMovie:
    case ErrorCode::UnknownVenue:
    case ErrorCode::UnknownShow:
    case ErrorCode::UnknownUser:
    case ErrorCode::UnknownReview:
    case ErrorCode::NotFound:
    case ErrorCode::RouteNotFound: return 404;
    case ErrorCode::MethodNotAllowed: return 405;
    case ErrorCode::TargetUnreachable:
    case ErrorCode::ConfigError:
    case ErrorCode::EmptySample:
    case ErrorCode::Internal: return 500;
    }
    return 500;
}

std::string_view to_string(Access access)
{
    switch (access) {
    case Access::open: return "open";
    case Access::user: return "user";
    case Access::admin: return "admin";
    }
    return "user";
}

Response error_response(ErrorCode code, const std::string& message)
{
    return Response{http_status(code), "application/json",
                    json{{"error", to_string(code)}, {"message", message}}.dump()};
}

Request make_request(const std::string& method, const std::string& path_and_query)
{
    Request req;
    req.method = method;
    const auto qpos = path_and_query.find('?');
    req.path = path_and_query.substr(0, qpos);
    if (qpos != std::string::npos) {
        httplib::Params params;
        httplib::detail::parse_query_text(path_and_query.substr(qpos + 1), params);
        for (const auto& [k, v] : params)
            req.query.emplace(k, v);
    }
    return req;
}

// --- request context ---------------------------------------------------------

struct ApiService::Context {
    const Request& req;
    std::vector<std::string> params;
    auth::Principal principal;
    Timestamp now = 0;

    [[nodiscard]] Id id(std::size_t i = 0) const
    {
        Id value = 0;
        const std::string& s = params.at(i);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw Error(ErrorCode::NotFound, "no such resource");
        return value;
    }

    [[nodiscard]] json body() const
    {
        if (req.body.empty())
            return json::object();
        try {
            json j = json::parse(req.body);
            if (!j.is_object())
                throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
            return j;
        } catch (const json::parse_error&) {
            throw Error(ErrorCode::BadRequest, "request body is not valid JSON");
        }
    }

    [[nodiscard]] std::optional<std::string> query(const std::string& name) const
    {
        auto it = req.query.find(name);
        if (it == req.query.end())
            return std::nullopt;
        return it->second;
    }

    [[nodiscard]] bool is_admin() const { return principal.role == Role::admin; }
};

namespace {

using Context = ApiService::Context;

Response ok(const json& body, int status = 200)
{
    return Response{status, "application/json", body.dump()};
}

Response csv(std::string body)
{
    return Response{200, "text/csv; charset=utf-8", std::move(body)};
}

std::int64_t parse_int(const std::string& text, const char* what)
{
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw Error(ErrorCode::BadRequest, std::string(what) + " must be an integer");
    return value;
}

double parse_double(const std::string& text, const char* what)
{
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(what);
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidQuery, std::string(what) + " must be a number");
    }
}

Date parse_date(const std::string& text, ErrorCode code)
{
    try {
        return Date::parse(text);
    } catch (const Error&) {
        throw Error(code, "'" + text + "' is not a YYYY-MM-DD date");
    }
}

/// Epoch milliseconds, or a YYYY-MM-DD date meaning its UTC midnight.
Timestamp parse_instant(const std::string& text, const char* what)
{
    if (text.size() == 10 && text[4] == '-')
        return parse_date(text, ErrorCode::BadRequest).start_millis();
    return parse_int(text, what);
}

// Typed body field access that turns JSON type errors into 400s.
template <class T>
T field(const json& body, const char* key)
{
    auto it = body.find(key);
    if (it == body.end() || it->is_null())
        throw Error(ErrorCode::BadRequest, std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::BadRequest, std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
std::optional<T> opt_field(const json& body, const char* key)
{
    auto it = body.find(key);
    if (it == body.end() || it->is_null())
        return std::nullopt;
    return field<T>(body, key);
}

json user_json(const UserAccount& u)
{
    return json{{"user_id", u.user_id},   {"username", u.username},       {"email", u.email},
                {"role", to_string(u.role)}, {"preferences", u.preferences}, {"created_at", u.created_at}};
}

json policy_json(const Policy& p)
{
    return json{{"coin_value_minor", p.coin_value_minor},
                {"earn_per_seat", p.earn_per_seat},
                {"review_earn", p.review_earn},
                {"redeem_cap_pct", p.redeem_cap_pct},
                {"cancel_cutoff_hours", p.cancel_cutoff_hours},
                {"currency", p.currency}};
}

json aggregate_json(const sentiment::AggregateSentiment& a)
{
    return json{{"n_reviews", a.n_reviews},
                {"n_positive", a.n_positive},
                {"n_negative", a.n_negative},
                {"n_neutral", a.n_neutral},
                {"mean_compound", a.mean_compound}};
}

json stats_json(const catalog::MovieStats& s)
{
    return json{{"n_ratings", s.n_ratings},
                {"mean_rating", s.mean_rating},
                {"popularity", s.popularity},
                {"sentiment", aggregate_json(s.sentiment)}};
}

json listing_json(const catalog::ShowListing& l)
{
    json j = l.show;
    j["capacity"] = l.capacity;
    j["seats_remaining"] = l.seats_remaining;
    return j;
}

json quote_json(const booking::Quote& q)
{
    return json{{"subtotal", q.subtotal},
                {"max_redeemable_coins", q.max_redeemable_coins},
                {"coins_redeemed", q.coins_redeemed},
                {"discount", q.discount},
                {"total", q.total}};
}

json refund_json(const booking::Refund& r)
{
    return json{{"booking_id", r.booking_id},
                {"amount", r.amount},
                {"coins_returned", r.coins_returned},
                {"coins_revoked", r.coins_revoked}};
}

SeatSet seats_from_json(const json& labels)
{
    if (!labels.is_array())
        throw Error(ErrorCode::BadRequest, "seats must be an array of labels");
    SeatSet seats;
    for (const auto& l : labels) {
        if (!l.is_string())
            throw Error(ErrorCode::InvalidSeat, "seat labels must be strings");
        try {
            seats.insert(seat_label_parse(l.get<std::string>()));
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidSeat, e.what());
        }
    }
    return seats;
}

std::vector<std::string> string_list(const json& body, const char* key)
{
    return opt_field<std::vector<std::string>>(body, key).value_or(std::vector<std::string>{});
}

Movie movie_from_body(const json& body, Id id)
{
    Movie m;
    m.movie_id = id;
    m.title = field<std::string>(body, "title");
    m.description = opt_field<std::string>(body, "description").value_or("");
    for (auto& g : field<std::vector<std::string>>(body, "genres"))
        m.genres.insert(std::move(g));
    m.director = opt_field<std::string>(body, "director").value_or("");
    m.cast = string_list(body, "cast");
    m.language = opt_field<std::string>(body, "language").value_or("");
    m.release_date = parse_date(field<std::string>(body, "release_date"), ErrorCode::BadRequest);
    m.poster_url = opt_field<std::string>(body, "poster_url");
    m.trailer_url = opt_field<std::string>(body, "trailer_url");
    if (m.title.empty())
        throw Error(ErrorCode::BadRequest, "title must not be empty");
    if (m.genres.empty())
        throw Error(ErrorCode::BadRequest, "at least one genre is required");
    return m;
}

Venue venue_from_body(const json& body, Id id)
{
    Venue v;
    v.venue_id = id;
    v.name = field<std::string>(body, "name");
    v.address = opt_field<std::string>(body, "address").value_or("");
    v.amenities = string_list(body, "amenities");
    v.accessibility = string_list(body, "accessibility");
    v.rows = field<int>(body, "rows");
    v.cols = field<int>(body, "cols");
    if (v.name.empty())
        throw Error(ErrorCode::BadRequest, "name must not be empty");
    if (v.rows < 1 || v.rows > kMaxRows || v.cols < 1 || v.cols > kMaxCols)
        throw Error(ErrorCode::BadRequest, "grid must be 1-26 rows by 1-99 columns");
    return v;
}

Money price_from_body(const json& body, const Policy& policy)
{
    Money price{field<std::int64_t>(body, "price_per_seat_minor"), policy.currency};
    if (price.amount_minor < 0)
        throw Error(ErrorCode::BadRequest, "price must not be negative");
    return price;
}

template <class T>
T find_or(const store::Store& store, Id id, ErrorCode code, const char* what)
{
    auto found = store.read([&](const store::View& v) -> std::optional<T> {
        if (const T* r = v.find<T>(id))
            return *r;
        return std::nullopt;
    });
    if (!found)
        throw Error(code, std::string(what) + " " + std::to_string(id) + " does not exist");
    return *found;
}

std::string format_of(const Context& c)
{
    auto f = c.query("format").value_or("json");
    if (f != "json" && f != "csv")
        throw Error(ErrorCode::BadRequest, "format must be json or csv");
    return f;
}

template <class R>
Response report(const Context& c, const R& r)
{
    return format_of(c) == "csv" ? csv(analytics::to_csv(r)) : ok(analytics::to_json(r));
}

std::pair<Timestamp, Timestamp> window_of(const Context& c)
{
    auto from = c.query("from");
    auto to = c.query("to");
    if (!from || !to)
        throw Error(ErrorCode::BadRequest, "from and to are required");
    return {parse_instant(*from, "from"), parse_instant(*to, "to")};
}

std::string pattern_to_regex(const std::string& pattern)
{
    static const std::regex placeholder(R"(\{[a-z_]+\})");
    return std::regex_replace(pattern, placeholder, "([0-9]+)");
}

} // namespace

// --- service -------------------------------------------------------------------

ApiService::ApiService(store::Store& store, sentiment::Lexicon lexicon, ServiceOptions options, Clock clock)
    : store_(store),
      lexicon_(std::move(lexicon)),
      policy_(options.policy),
      auth_(store, options.auth),
      engine_(store, options.policy),
      clock_(std::move(clock))
{
    register_routes();
}

ApiService::~ApiService() = default;

void ApiService::add(std::string method, std::string pattern, Access access, Handler handler)
{
    std::regex re(pattern_to_regex(pattern));
    routes_.push_back(Route{std::move(method), std::move(pattern), std::move(re), access, std::move(handler)});
}

std::vector<RouteInfo> ApiService::routes() const
{
    std::vector<RouteInfo> out;
    out.reserve(routes_.size());
    for (const auto& r : routes_)
        out.push_back(RouteInfo{r.method, r.pattern, r.access});
    return out;
}

Response ApiService::dispatch(const Request& request)
{
    try {
        const Route* match = nullptr;
        bool path_matched = false;
        std::smatch m;
        for (const auto& route : routes_) {
            std::smatch candidate;
            if (!std::regex_match(request.path, candidate, route.regex))
                continue;
            path_matched = true;
            if (route.method == request.method) {
                match = &route;
                m = std::move(candidate);
                break;
            }
        }
        if (!match) {
            if (path_matched)
                return error_response(ErrorCode::MethodNotAllowed, request.method + " not allowed on " + request.path);
            return error_response(ErrorCode::RouteNotFound, "no route for " + request.path);
        }

        Context ctx{request, {}, {}, clock_()};
        for (std::size_t i = 1; i < m.size(); ++i)
            ctx.params.push_back(m[i].str());

        if (match->access != Access::open) {
            std::optional<std::string> token;
            if (auto it = request.headers.find("authorization"); it != request.headers.end()) {
                constexpr std::string_view kBearer = "Bearer ";
                if (it->second.compare(0, kBearer.size(), kBearer) == 0)
                    token = it->second.substr(kBearer.size());
            }
            ctx.principal =
                auth_.authorize(token, match->access == Access::admin ? Role::admin : Role::user, ctx.now);
        }
        return match->handler(ctx);
    } catch (const Error& e) {
        return error_response(e.code(), e.what());
    } catch (const json::exception& e) {
        return error_response(ErrorCode::BadRequest, e.what());
    } catch (const std::exception&) {
        return error_response(ErrorCode::Internal, "internal error");
    }
}

Response ApiService::call(const std::string& method, const std::string& path_and_query, const json& body,
                          const std::string& token)
{
    Request req = make_request(method, path_and_query);
    if (!body.is_null())
        req.body = body.dump();
    if (!token.empty())
        req.headers["authorization"] = "Bearer " + token;
    return dispatch(req);
}

void ApiService::register_routes()
{
    // --- account ---------------------------------------------------------------
    add("POST", "/api/register", Access::open, [this](Context& c) {
        json b = c.body();
        auto user = auth_.register_user(field<std::string>(b, "username"), field<std::string>(b, "email"),
                                        field<std::string>(b, "password"), c.now);
        return ok(user_json(user), 201);
    });
    add("POST", "/api/login", Access::open, [this](Context& c) {
        json b = c.body();
        auto s = auth_.login(field<std::string>(b, "username"), field<std::string>(b, "password"), c.now);
        return ok(json{{"token", s.token},
                       {"user_id", s.user_id},
                       {"role", to_string(s.role)},
                       {"expires_at", s.expires_at}});
    });
    add("POST", "/api/logout", Access::user, [this](Context& c) {
        auth_.logout(c.req.headers.at("authorization").substr(7));
        return ok(json{{"logged_out", true}});
    });
    add("GET", "/api/policy", Access::open, [this](Context&) { return ok(policy_json(policy_)); });

    // --- movies ------------------------------------------------------------------
    add("GET", "/api/movies", Access::user, [this](Context& c) {
        catalog::SearchQuery q;
        q.text = c.query("q");
        q.genre = c.query("genre");
        q.language = c.query("language");
        if (auto v = c.query("date_from"))
            q.date_from = parse_date(*v, ErrorCode::InvalidQuery);
        if (auto v = c.query("date_to"))
            q.date_to = parse_date(*v, ErrorCode::InvalidQuery);
        if (auto v = c.query("min_rating"))
            q.min_rating = parse_double(*v, "min_rating");
        if (auto v = c.query("sort"))
            q.sort = catalog::sort_key_from_string(*v);
        json out = json::array();
        for (const auto& m : catalog::search_movies(store_, q))
            out.push_back(m);
        return ok(out);
    });
    add("GET", "/api/movies/{id}", Access::user, [this](Context& c) {
        auto [movie, stats] = store_.read([&](const store::View& v) {
            const Movie* m = v.find<Movie>(c.id());
            if (!m)
                throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(c.id()) + " does not exist");
            return std::pair{*m, catalog::movie_stats(v, m->movie_id)};
        });
        json j = movie;
        j["stats"] = stats_json(stats);
        return ok(j);
    });
    add("GET", "/api/movies/{id}/reviews", Access::user, [this](Context& c) {
        auto reviews = store_.read([&](const store::View& v) {
            if (!v.find<Movie>(c.id()))
                throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(c.id()) + " does not exist");
            std::vector<json> out;
            for (Id rid : v.reviews_of_movie(c.id())) {
                const Review& r = *v.find<Review>(rid);
                json j = r;
                j["username"] = v.find<UserAccount>(r.user_id)->username;
                out.push_back(std::move(j));
            }
            return out;
        });
        return ok(json(reviews));
    });
    add("POST", "/api/movies/{id}/reviews", Access::user, [this](Context& c) {
        json b = c.body();
        const int rating = field<int>(b, "rating");
        if (rating < 1 || rating > 5)
            throw Error(ErrorCode::BadRequest, "rating must be between 1 and 5");
        std::string text = opt_field<std::string>(b, "text").value_or("");
        auto score = sentiment::score_text(lexicon_, text);
        auto posted = engine_.post_review(c.principal.user_id, c.id(), rating, std::move(text), score, c.now);
        json j = posted.review;
        j["coins_awarded"] = posted.reward.delta;
        j["coin_balance"] = engine_.coin_balance(c.principal.user_id);
        return ok(j, 201);
    });
    add("GET", "/api/movies/{id}/shows", Access::user, [this](Context& c) {
        auto date = c.query("date");
        if (!date)
            throw Error(ErrorCode::BadRequest, "date is required");
        json out = json::array();
        for (const auto& l : catalog::list_shows_for_movie(store_, c.id(), parse_date(*date, ErrorCode::BadRequest)))
            out.push_back(listing_json(l));
        return ok(out);
    });
    add("GET", "/api/collections", Access::user, [this](Context& c) {
        json out = json::array();
        for (const auto& col : catalog::curated_collections(store_, c.now))
            out.push_back(json{{"name", col.name}, {"movie_ids", col.movie_ids}});
        return ok(out);
    });

    // --- venues and shows ----------------------------------------------------------
    add("GET", "/api/venues", Access::user, [this](Context& c) {
        json out = json::array();
        for (const auto& v : catalog::search_venues(store_, c.query("q").value_or("")))
            out.push_back(v);
        return ok(out);
    });
    add("GET", "/api/venues/{id}", Access::user, [this](Context& c) {
        return ok(json(find_or<Venue>(store_, c.id(), ErrorCode::UnknownVenue, "venue")));
    });
    add("GET", "/api/venues/{id}/shows", Access::user, [this](Context& c) {
        auto date = c.query("date");
        if (!date)
            throw Error(ErrorCode::BadRequest, "date is required");
        json out = json::array();
        for (const auto& l : catalog::list_shows_at_venue(store_, c.id(), parse_date(*date, ErrorCode::BadRequest)))
            out.push_back(listing_json(l));
        return ok(out);
    });
    add("GET", "/api/shows/{id}", Access::user, [this](Context& c) {
        return ok(json(find_or<Show>(store_, c.id(), ErrorCode::UnknownShow, "show")));
    });
    add("GET", "/api/shows/{id}/seats", Access::user, [this](Context& c) {
        auto grid = catalog::seat_availability(store_, c.id());
        json sold = json::array();
        json rows = json::array();
        for (int r = 0; r < grid.rows; ++r) {
            std::string line;
            for (int col = 0; col < grid.cols; ++col) {
                const bool taken = grid.sold[r][col];
                line += taken ? 'X' : '.';
                if (taken)
                    sold.push_back(seat_label_encode(SeatId{r, col}));
            }
            rows.push_back(line);
        }
        return ok(json{{"show_id", grid.show_id},
                       {"rows", grid.rows},
                       {"cols", grid.cols},
                       {"seats_remaining", grid.seats_remaining},
                       {"houseful", grid.houseful()},
                       {"sold", sold},
                       {"grid", rows}});
    });
    add("GET", "/api/shows/{id}/quote", Access::user, [this](Context& c) {
        SeatSet seats;
        if (auto labels = c.query("seats")) {
            json arr = json::array();
            std::size_t start = 0;
            while (start <= labels->size()) {
                auto comma = labels->find(',', start);
                auto part = labels->substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                if (!part.empty())
                    arr.push_back(part);
                if (comma == std::string::npos)
                    break;
                start = comma + 1;
            }
            seats = seats_from_json(arr);
        }
        const auto coins = c.query("coins") ? parse_int(*c.query("coins"), "coins") : 0;
        auto q = engine_.quote_for(c.principal.user_id, c.id(), static_cast<int>(seats.size()), coins);
        json j = quote_json(q);
        j["n_seats"] = seats.size();
        j["balance"] = engine_.coin_balance(c.principal.user_id);
        return ok(j);
    });

    // --- bookings ------------------------------------------------------------------
    add("POST", "/api/bookings", Access::user, [this](Context& c) {
        json b = c.body();
        const Id show_id = field<Id>(b, "show_id");
        auto it = b.find("seats");
        if (it == b.end())
            throw Error(ErrorCode::BadRequest, "missing field 'seats'");
        SeatSet seats = seats_from_json(*it);
        const auto coins = opt_field<std::int64_t>(b, "coins_redeemed").value_or(0);
        auto booking = engine_.book_seats(c.principal.user_id, show_id, seats, coins, c.now);
        return ok(json(booking), 201);
    });
    add("DELETE", "/api/bookings/{id}", Access::user, [this](Context& c) {
        auto refund = engine_.cancel_booking(c.principal.user_id, c.id(), c.now, c.is_admin());
        return ok(refund_json(refund));
    });
    add("GET", "/api/me/bookings", Access::user, [this](Context& c) {
        auto out = store_.read([&](const store::View& v) {
            json arr = json::array();
            for (Id bid : v.bookings_of_user(c.principal.user_id)) {
                const Booking& b = *v.find<Booking>(bid);
                const Show& s = *v.find<Show>(b.show_id);
                json j = b;
                j["movie_id"] = s.movie_id;
                j["movie_title"] = v.find<Movie>(s.movie_id)->title;
                j["venue_id"] = s.venue_id;
                j["starts_at"] = s.starts_at;
                arr.push_back(std::move(j));
            }
            return arr;
        });
        return ok(out);
    });
    add("GET", "/api/me/profile", Access::user, [this](Context& c) {
        return ok(user_json(find_or<UserAccount>(store_, c.principal.user_id, ErrorCode::UnknownUser, "user")));
    });
    add("PUT", "/api/me/profile", Access::user, [this](Context& c) {
        json b = c.body();
        for (int attempt = 0;; ++attempt) {
            auto [user, version] = store_.read([&](const store::View& v) {
                return std::pair{*v.find<UserAccount>(c.principal.user_id), v.version<UserAccount>(c.principal.user_id)};
            });
            if (auto email = opt_field<std::string>(b, "email"))
                user.email = *email;
            if (b.contains("preferences"))
                user.preferences = field<Preferences>(b, "preferences");
            if (auto password = opt_field<std::string>(b, "password")) {
                auto current = opt_field<std::string>(b, "current_password").value_or("");
                if (!auth::verify_password(current, user.password_digest))
                    throw Error(ErrorCode::InvalidCredentials, "current password is wrong");
                if (password->size() < auth::kMinPasswordLength)
                    throw Error(ErrorCode::WeakPassword, "password must be at least 8 characters");
                user.password_digest = auth::hash_password(*password, auth_.config().pbkdf2_iterations);
            }
            try {
                store_.transact({store::Update{user, version}});
                return ok(user_json(user));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::ConstraintViolation && std::string_view(e.what()) == "ConstraintViolation(email)")
                    throw Error(ErrorCode::DuplicateEmail, "email already registered");
                if (e.code() == ErrorCode::ConstraintViolation &&
                    std::string_view(e.what()) == "ConstraintViolation(email_format)")
                    throw Error(ErrorCode::BadRequest, "email is not a valid address");
                if (e.code() != ErrorCode::Conflict || attempt >= 3)
                    throw;
            }
        }
    });
    add("GET", "/api/me/coins", Access::user, [this](Context& c) {
        auto out = store_.read([&](const store::View& v) {
            json ledger = json::array();
            for (Id tid : v.ledger_of_user(c.principal.user_id))
                ledger.push_back(*v.find<CoinTransaction>(tid));
            return json{{"balance", v.balance(c.principal.user_id)}, {"ledger", ledger}};
        });
        return ok(out);
    });
    add("GET", "/api/recommendations", Access::user, [this](Context& c) {
        const int k = c.query("k") ? static_cast<int>(parse_int(*c.query("k"), "k")) : 10;
        auto recs = catalog::recommend(store_, c.principal.user_id, k);
        json out = json::array();
        store_.read([&](const store::View& v) {
            for (const auto& r : recs)
                out.push_back(json{{"movie_id", r.movie_id},
                                   {"title", v.find<Movie>(r.movie_id)->title},
                                   {"score", r.score},
                                   {"genre_affinity", r.genre_affinity},
                                   {"norm_rating", r.norm_rating},
                                   {"sentiment_index", r.sentiment_index}});
        });
        return ok(out);
    });

    // --- admin: catalog ------------------------------------------------------------
    add("POST", "/api/admin/movies", Access::admin, [this](Context& c) {
        Movie m = movie_from_body(c.body(), 0);
        m.movie_id = store_.transact({store::Insert{m, std::nullopt}}).ids.at(0);
        return ok(json(m), 201);
    });
    add("PUT", "/api/admin/movies/{id}", Access::admin, [this](Context& c) {
        find_or<Movie>(store_, c.id(), ErrorCode::UnknownMovie, "movie");
        Movie m = movie_from_body(c.body(), c.id());
        store_.transact({store::Update{m, std::nullopt}});
        return ok(json(m));
    });
    add("DELETE", "/api/admin/movies/{id}", Access::admin, [this](Context& c) {
        find_or<Movie>(store_, c.id(), ErrorCode::UnknownMovie, "movie");
        store_.transact({store::Erase{store::Kind::movie, c.id(), std::nullopt}});
        return ok(json{{"deleted", true}, {"movie_id", c.id()}});
    });
    add("POST", "/api/admin/venues", Access::admin, [this](Context& c) {
        Venue v = venue_from_body(c.body(), 0);
        v.venue_id = store_.transact({store::Insert{v, std::nullopt}}).ids.at(0);
        return ok(json(v), 201);
    });
    add("PUT", "/api/admin/venues/{id}", Access::admin, [this](Context& c) {
        find_or<Venue>(store_, c.id(), ErrorCode::UnknownVenue, "venue");
        Venue v = venue_from_body(c.body(), c.id());
        store_.transact({store::Update{v, std::nullopt}});
        return ok(json(v));
    });
    add("DELETE", "/api/admin/venues/{id}", Access::admin, [this](Context& c) {
        find_or<Venue>(store_, c.id(), ErrorCode::UnknownVenue, "venue");
        store_.transact({store::Erase{store::Kind::venue, c.id(), std::nullopt}});
        return ok(json{{"deleted", true}, {"venue_id", c.id()}});
    });
    add("POST", "/api/admin/shows", Access::admin, [this](Context& c) {
        json b = c.body();
        auto show = engine_.create_show(field<Id>(b, "movie_id"), field<Id>(b, "venue_id"),
                                        field<Timestamp>(b, "starts_at"), price_from_body(b, policy_), c.now);
        return ok(json(show), 201);
    });
    add("PUT", "/api/admin/shows/{id}", Access::admin, [this](Context& c) {
        json b = c.body();
        Show s = find_or<Show>(store_, c.id(), ErrorCode::UnknownShow, "show");
        s.movie_id = opt_field<Id>(b, "movie_id").value_or(s.movie_id);
        s.venue_id = opt_field<Id>(b, "venue_id").value_or(s.venue_id);
        s.starts_at = opt_field<Timestamp>(b, "starts_at").value_or(s.starts_at);
        if (b.contains("price_per_seat_minor"))
            s.price_per_seat = price_from_body(b, policy_);
        return ok(json(engine_.update_show(s, c.now)));
    });
    add("DELETE", "/api/admin/shows/{id}", Access::admin, [this](Context& c) {
        engine_.delete_show(c.id());
        return ok(json{{"deleted", true}, {"show_id", c.id()}});
    });

    // --- admin: users and bookings ------------------------------------------------
    add("GET", "/api/admin/users", Access::admin, [this](Context&) {
        auto out = store_.read([](const store::View& v) {
            json arr = json::array();
            for (const auto& [id, row] : v.all<UserAccount>()) {
                json j = user_json(row.value);
                j["coin_balance"] = v.balance(id);
                arr.push_back(std::move(j));
            }
            return arr;
        });
        return ok(out);
    });
    add("GET", "/api/admin/users/{id}", Access::admin, [this](Context& c) {
        auto out = store_.read([&](const store::View& v) {
            const UserAccount* u = v.find<UserAccount>(c.id());
            if (!u)
                throw Error(ErrorCode::UnknownUser, "user " + std::to_string(c.id()) + " does not exist");
            json j = user_json(*u);
            j["coin_balance"] = v.balance(c.id());
            j["n_bookings"] = v.bookings_of_user(c.id()).size();
            return j;
        });
        return ok(out);
    });
    add("PUT", "/api/admin/users/{id}", Access::admin, [this](Context& c) {
        json b = c.body();
        auto [user, version] = store_.read([&](const store::View& v) {
            const UserAccount* u = v.find<UserAccount>(c.id());
            if (!u)
                throw Error(ErrorCode::UnknownUser, "user " + std::to_string(c.id()) + " does not exist");
            return std::pair{*u, v.version<UserAccount>(c.id())};
        });
        if (auto role = opt_field<std::string>(b, "role")) {
            try {
                user.role = role_from_string(*role);
            } catch (const Error&) {
                throw Error(ErrorCode::BadRequest, "role must be user or admin");
            }
        }
        if (auto email = opt_field<std::string>(b, "email"))
            user.email = *email;
        if (b.contains("preferences"))
            user.preferences = field<Preferences>(b, "preferences");
        store_.transact({store::Update{user, version}});
        return ok(user_json(user));
    });
    add("GET", "/api/admin/bookings", Access::admin, [this](Context& c) {
        std::optional<Id> show_filter;
        if (auto s = c.query("show_id"))
            show_filter = parse_int(*s, "show_id");
        auto out = store_.read([&](const store::View& v) {
            json arr = json::array();
            for (const auto& [id, row] : v.all<Booking>()) {
                if (!show_filter || row.value.show_id == *show_filter)
                    arr.push_back(row.value);
            }
            return arr;
        });
        return ok(out);
    });

    // --- admin: reports -------------------------------------------------------------
    add("GET", "/api/admin/reports/sales", Access::admin, [this](Context& c) {
        auto [from, to] = window_of(c);
        auto group = analytics::group_by_from_string(c.query("group_by").value_or("movie"));
        return report(c, analytics::sales_report(store_, from, to, group));
    });
    add("GET", "/api/admin/reports/occupancy", Access::admin, [this](Context& c) {
        auto venue = c.query("venue_id");
        auto date = c.query("date");
        if (!venue || !date)
            throw Error(ErrorCode::BadRequest, "venue_id and date are required");
        return report(c, analytics::occupancy_report(store_, parse_int(*venue, "venue_id"),
                                                     parse_date(*date, ErrorCode::BadRequest)));
    });
    add("GET", "/api/admin/reports/activity", Access::admin, [this](Context& c) {
        auto [from, to] = window_of(c);
        return report(c, analytics::activity_report(store_, from, to));
    });
    add("GET", "/api/admin/reports/sentiment", Access::admin, [this](Context& c) {
        auto movie = c.query("movie_id");
        if (!movie)
            throw Error(ErrorCode::BadRequest, "movie_id is required");
        return report(c, analytics::sentiment_report(store_, parse_int(*movie, "movie_id")));
    });
}

// --- HTTP adapter -------------------------------------------------------------------

HttpServer::HttpServer(ApiService& service, int threads) : service_(service), server_(std::make_unique<httplib::Server>())
{
    const std::size_t n = static_cast<std::size_t>(std::max(1, threads));
    server_->new_task_queue = [n] { return new httplib::ThreadPool(n); };
    server_->set_keep_alive_max_count(1000);
    server_->set_tcp_nodelay(true);
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params)
            r.query.emplace(k, v);
        for (const auto& [k, v] : req.headers)
            r.headers.emplace(to_lower(k), v);
        r.body = req.body;
        Response out = service_.dispatch(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    server_->Get(".*", handler);
    server_->Post(".*", handler);
    server_->Put(".*", handler);
    server_->Delete(".*", handler);
    server_->Patch(".*", handler);
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0)
        return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen()
{
    server_->listen_after_bind();
}

void HttpServer::stop()
{
    if (server_)
        server_->stop();
}

bool HttpServer::running() const
{
    return server_->is_running();
}

} // namespace stageseat::api
