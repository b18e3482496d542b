#include "stageseat/domain_json.hpp"

#include "stageseat/error.hpp"

namespace stageseat {

using nlohmann::json;

namespace {

template <class T>
std::optional<T> optional_field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    return it->get<T>();
}

} // namespace

void to_json(json& j, const Money& m)
{
    j = json{{"amount_minor", m.amount_minor}, {"currency", m.currency}};
}

void from_json(const json& j, Money& m)
{
    j.at("amount_minor").get_to(m.amount_minor);
    j.at("currency").get_to(m.currency);
}

void to_json(json& j, const Date& d)
{
    j = d.to_string();
}

void from_json(const json& j, Date& d)
{
    d = Date::parse(j.get<std::string>());
}

void to_json(json& j, const SeatId& s)
{
    j = seat_label_encode(s);
}

void from_json(const json& j, SeatId& s)
{
    s = seat_label_parse(j.get<std::string>());
}

json seats_to_labels(const SeatSet& seats)
{
    json out = json::array();
    for (const auto& s : seats)
        out.push_back(seat_label_encode(s));
    return out;
}

SeatSet seats_from_labels(const json& labels)
{
    SeatSet out;
    for (const auto& l : labels)
        out.insert(seat_label_parse(l.get<std::string>()));
    return out;
}

void to_json(json& j, const Preferences& p)
{
    j = json{{"notifications", p.notifications}, {"recommendations", p.recommendations}};
}

void from_json(const json& j, Preferences& p)
{
    j.at("notifications").get_to(p.notifications);
    j.at("recommendations").get_to(p.recommendations);
}

void to_json(json& j, const SentimentScore& s)
{
    j = json{{"raw_sum", s.raw_sum}, {"compound", s.compound}, {"label", to_string(s.label)},
             {"hit_count", s.hit_count}};
}

void from_json(const json& j, SentimentScore& s)
{
    j.at("raw_sum").get_to(s.raw_sum);
    j.at("compound").get_to(s.compound);
    s.label = sentiment_label_from_string(j.at("label").get<std::string>());
    j.at("hit_count").get_to(s.hit_count);
}

void to_json(json& j, const UserAccount& u)
{
    j = json{{"user_id", u.user_id},
             {"username", u.username},
             {"email", u.email},
             {"password_digest", u.password_digest},
             {"role", to_string(u.role)},
             {"preferences", u.preferences},
             {"created_at", u.created_at}};
}

void from_json(const json& j, UserAccount& u)
{
    j.at("user_id").get_to(u.user_id);
    j.at("username").get_to(u.username);
    j.at("email").get_to(u.email);
    j.at("password_digest").get_to(u.password_digest);
    u.role = role_from_string(j.at("role").get<std::string>());
    j.at("preferences").get_to(u.preferences);
    j.at("created_at").get_to(u.created_at);
}

void to_json(json& j, const Movie& m)
{
    j = json{{"movie_id", m.movie_id},
             {"title", m.title},
             {"description", m.description},
             {"genres", m.genres},
             {"director", m.director},
             {"cast", m.cast},
             {"language", m.language},
             {"release_date", m.release_date},
             {"poster_url", m.poster_url ? json(*m.poster_url) : json(nullptr)},
             {"trailer_url", m.trailer_url ? json(*m.trailer_url) : json(nullptr)}};
}

void from_json(const json& j, Movie& m)
{
    j.at("movie_id").get_to(m.movie_id);
    j.at("title").get_to(m.title);
    j.at("description").get_to(m.description);
    j.at("genres").get_to(m.genres);
    j.at("director").get_to(m.director);
    j.at("cast").get_to(m.cast);
    j.at("language").get_to(m.language);
    j.at("release_date").get_to(m.release_date);
    m.poster_url = optional_field<std::string>(j, "poster_url");
    m.trailer_url = optional_field<std::string>(j, "trailer_url");
}

void to_json(json& j, const Venue& v)
{
    j = json{{"venue_id", v.venue_id}, {"name", v.name},         {"address", v.address},
             {"amenities", v.amenities}, {"accessibility", v.accessibility}, {"rows", v.rows},
             {"cols", v.cols}};
}

void from_json(const json& j, Venue& v)
{
    j.at("venue_id").get_to(v.venue_id);
    j.at("name").get_to(v.name);
    j.at("address").get_to(v.address);
    j.at("amenities").get_to(v.amenities);
    j.at("accessibility").get_to(v.accessibility);
    j.at("rows").get_to(v.rows);
    j.at("cols").get_to(v.cols);
}

void to_json(json& j, const Show& s)
{
    j = json{{"show_id", s.show_id},
             {"movie_id", s.movie_id},
             {"venue_id", s.venue_id},
             {"starts_at", s.starts_at},
             {"price_per_seat", s.price_per_seat},
             {"sold", seats_to_labels(s.sold)}};
}

void from_json(const json& j, Show& s)
{
    j.at("show_id").get_to(s.show_id);
    j.at("movie_id").get_to(s.movie_id);
    j.at("venue_id").get_to(s.venue_id);
    j.at("starts_at").get_to(s.starts_at);
    j.at("price_per_seat").get_to(s.price_per_seat);
    s.sold = seats_from_labels(j.at("sold"));
}

void to_json(json& j, const Booking& b)
{
    j = json{{"booking_id", b.booking_id},
             {"user_id", b.user_id},
             {"show_id", b.show_id},
             {"seats", seats_to_labels(b.seats)},
             {"paid", b.paid},
             {"coins_redeemed", b.coins_redeemed},
             {"status", to_string(b.status)},
             {"created_at", b.created_at},
             {"cancelled_at", b.cancelled_at ? json(*b.cancelled_at) : json(nullptr)},
             {"refunded", b.refunded}};
}

void from_json(const json& j, Booking& b)
{
    j.at("booking_id").get_to(b.booking_id);
    j.at("user_id").get_to(b.user_id);
    j.at("show_id").get_to(b.show_id);
    b.seats = seats_from_labels(j.at("seats"));
    j.at("paid").get_to(b.paid);
    j.at("coins_redeemed").get_to(b.coins_redeemed);
    b.status = booking_status_from_string(j.at("status").get<std::string>());
    j.at("created_at").get_to(b.created_at);
    b.cancelled_at = optional_field<Timestamp>(j, "cancelled_at");
    j.at("refunded").get_to(b.refunded);
}

void to_json(json& j, const Review& r)
{
    j = json{{"review_id", r.review_id}, {"user_id", r.user_id},     {"movie_id", r.movie_id},
             {"rating", r.rating},       {"text", r.text},           {"sentiment", r.sentiment},
             {"created_at", r.created_at}};
}

void from_json(const json& j, Review& r)
{
    j.at("review_id").get_to(r.review_id);
    j.at("user_id").get_to(r.user_id);
    j.at("movie_id").get_to(r.movie_id);
    j.at("rating").get_to(r.rating);
    j.at("text").get_to(r.text);
    j.at("sentiment").get_to(r.sentiment);
    j.at("created_at").get_to(r.created_at);
}

void to_json(json& j, const CoinTransaction& t)
{
    j = json{{"txn_id", t.txn_id},       {"user_id", t.user_id}, {"delta", t.delta},
             {"reason", to_string(t.reason)}, {"ref_id", t.ref_id},   {"created_at", t.created_at}};
}

void from_json(const json& j, CoinTransaction& t)
{
    j.at("txn_id").get_to(t.txn_id);
    j.at("user_id").get_to(t.user_id);
    j.at("delta").get_to(t.delta);
    t.reason = coin_reason_from_string(j.at("reason").get<std::string>());
    j.at("ref_id").get_to(t.ref_id);
    j.at("created_at").get_to(t.created_at);
}

} // namespace stageseat
