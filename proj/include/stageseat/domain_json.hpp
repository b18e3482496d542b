#pragma once

// Storage-level JSON encoding of the domain records. This is the format used
// by fixture files and the write-ahead journal; it carries every field,
// including password digests, so it must never be served over the API.

#include "stageseat/domain.hpp"

#include <json.hpp>

namespace stageseat {

void to_json(nlohmann::json& j, const Money& m);
void from_json(const nlohmann::json& j, Money& m);

void to_json(nlohmann::json& j, const Date& d);
void from_json(const nlohmann::json& j, Date& d);

void to_json(nlohmann::json& j, const SeatId& s);
void from_json(const nlohmann::json& j, SeatId& s);

void to_json(nlohmann::json& j, const Preferences& p);
void from_json(const nlohmann::json& j, Preferences& p);

void to_json(nlohmann::json& j, const SentimentScore& s);
void from_json(const nlohmann::json& j, SentimentScore& s);

void to_json(nlohmann::json& j, const UserAccount& u);
void from_json(const nlohmann::json& j, UserAccount& u);

void to_json(nlohmann::json& j, const Movie& m);
void from_json(const nlohmann::json& j, Movie& m);

void to_json(nlohmann::json& j, const Venue& v);
void from_json(const nlohmann::json& j, Venue& v);

void to_json(nlohmann::json& j, const Show& s);
void from_json(const nlohmann::json& j, Show& s);

void to_json(nlohmann::json& j, const Booking& b);
void from_json(const nlohmann::json& j, Booking& b);

void to_json(nlohmann::json& j, const Review& r);
void from_json(const nlohmann::json& j, Review& r);

void to_json(nlohmann::json& j, const CoinTransaction& t);
void from_json(const nlohmann::json& j, CoinTransaction& t);

nlohmann::json seats_to_labels(const SeatSet& seats);
SeatSet seats_from_labels(const nlohmann::json& labels);

} // namespace stageseat
