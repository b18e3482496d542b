#include "stageseat/store.hpp"

#include "stageseat/domain_json.hpp"
#include "stageseat/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include <unistd.h>

namespace stageseat::store {

using nlohmann::json;

namespace {

constexpr std::size_t index_of(Kind k) { return static_cast<std::size_t>(k); }

template <class T> constexpr Kind kind_for();
template <> constexpr Kind kind_for<UserAccount>() { return Kind::user; }
template <> constexpr Kind kind_for<Movie>() { return Kind::movie; }
template <> constexpr Kind kind_for<Venue>() { return Kind::venue; }
template <> constexpr Kind kind_for<Show>() { return Kind::show; }
template <> constexpr Kind kind_for<Booking>() { return Kind::booking; }
template <> constexpr Kind kind_for<Review>() { return Kind::review; }
template <> constexpr Kind kind_for<CoinTransaction>() { return Kind::coin_txn; }

Id& id_ref(UserAccount& r) { return r.user_id; }
Id& id_ref(Movie& r) { return r.movie_id; }
Id& id_ref(Venue& r) { return r.venue_id; }
Id& id_ref(Show& r) { return r.show_id; }
Id& id_ref(Booking& r) { return r.booking_id; }
Id& id_ref(Review& r) { return r.review_id; }
Id& id_ref(CoinTransaction& r) { return r.txn_id; }

Id id_value(const UserAccount& r) { return r.user_id; }
Id id_value(const Movie& r) { return r.movie_id; }
Id id_value(const Venue& r) { return r.venue_id; }
Id id_value(const Show& r) { return r.show_id; }
Id id_value(const Booking& r) { return r.booking_id; }
Id id_value(const Review& r) { return r.review_id; }
Id id_value(const CoinTransaction& r) { return r.txn_id; }

/// Calls f with a default-constructed value of the record type for `kind`.
template <class F>
decltype(auto) with_kind(Kind kind, F&& f)
{
    switch (kind) {
    case Kind::user: return f(UserAccount{});
    case Kind::movie: return f(Movie{});
    case Kind::venue: return f(Venue{});
    case Kind::show: return f(Show{});
    case Kind::booking: return f(Booking{});
    case Kind::review: return f(Review{});
    case Kind::coin_txn: return f(CoinTransaction{});
    }
    throw Error(ErrorCode::Internal, "unknown kind");
}

Error violation(const std::string& constraint)
{
    return Error(ErrorCode::ConstraintViolation, "ConstraintViolation(" + constraint + ")");
}

bool ledger_refs_booking(CoinReason r)
{
    return r != CoinReason::review_earn;
}

// --- secondary index maintenance ------------------------------------------

void index_add(Tables& t, const UserAccount& u)
{
    t.user_by_name[to_lower(u.username)] = u.user_id;
    t.user_by_email[to_lower(u.email)] = u.user_id;
}
void index_remove(Tables& t, const UserAccount& u)
{
    t.user_by_name.erase(to_lower(u.username));
    t.user_by_email.erase(to_lower(u.email));
}

void index_add(Tables& t, const Movie& m)
{
    t.movie_by_title_date[{m.title, m.release_date.to_string()}] = m.movie_id;
}
void index_remove(Tables& t, const Movie& m)
{
    t.movie_by_title_date.erase({m.title, m.release_date.to_string()});
}

void index_add(Tables&, const Venue&) {}
void index_remove(Tables&, const Venue&) {}

void erase_from(std::map<Id, std::set<Id>>& index, Id key, Id value)
{
    auto it = index.find(key);
    if (it == index.end())
        return;
    it->second.erase(value);
    if (it->second.empty())
        index.erase(it);
}

void index_add(Tables& t, const Show& s)
{
    t.shows_by_movie[s.movie_id].insert(s.show_id);
    t.shows_by_venue[s.venue_id].insert(s.show_id);
}
void index_remove(Tables& t, const Show& s)
{
    erase_from(t.shows_by_movie, s.movie_id, s.show_id);
    erase_from(t.shows_by_venue, s.venue_id, s.show_id);
}

void index_add(Tables& t, const Booking& b)
{
    t.bookings_by_show[b.show_id].insert(b.booking_id);
    t.bookings_by_user[b.user_id].insert(b.booking_id);
}
void index_remove(Tables& t, const Booking& b)
{
    erase_from(t.bookings_by_show, b.show_id, b.booking_id);
    erase_from(t.bookings_by_user, b.user_id, b.booking_id);
}

void index_add(Tables& t, const Review& r)
{
    t.review_by_user_movie[{r.user_id, r.movie_id}] = r.review_id;
    t.reviews_by_movie[r.movie_id].insert(r.review_id);
    t.reviews_by_user[r.user_id].insert(r.review_id);
}
void index_remove(Tables& t, const Review& r)
{
    t.review_by_user_movie.erase({r.user_id, r.movie_id});
    erase_from(t.reviews_by_movie, r.movie_id, r.review_id);
    erase_from(t.reviews_by_user, r.user_id, r.review_id);
}

void index_add(Tables& t, const CoinTransaction& c)
{
    t.ledger_by_user[c.user_id].insert(c.txn_id);
    t.balance_by_user[c.user_id] += c.delta;
}
void index_remove(Tables& t, const CoinTransaction& c)
{
    erase_from(t.ledger_by_user, c.user_id, c.txn_id);
    auto it = t.balance_by_user.find(c.user_id);
    if (it != t.balance_by_user.end()) {
        it->second -= c.delta;
        if (!t.ledger_by_user.contains(c.user_id))
            t.balance_by_user.erase(it);
    }
}

template <class T>
void raw_put(Tables& t, const T& value, std::uint64_t version)
{
    auto& table = t.table<T>();
    auto it = table.find(id_value(value));
    if (it != table.end()) {
        index_remove(t, it->second.value);
        it->second = Row<T>{value, version};
    } else {
        table.emplace(id_value(value), Row<T>{value, version});
    }
    index_add(t, value);
}

template <class T>
void raw_erase(Tables& t, Id id)
{
    auto& table = t.table<T>();
    auto it = table.find(id);
    if (it == table.end())
        return;
    index_remove(t, it->second.value);
    table.erase(it);
}

} // namespace

std::string_view kind_name(Kind kind)
{
    switch (kind) {
    case Kind::user: return "user";
    case Kind::movie: return "movie";
    case Kind::venue: return "venue";
    case Kind::show: return "show";
    case Kind::booking: return "booking";
    case Kind::review: return "review";
    case Kind::coin_txn: return "coin_txn";
    }
    return "user";
}

std::optional<Kind> kind_from_name(std::string_view name)
{
    for (auto k : kAllKinds) {
        if (kind_name(k) == name)
            return k;
    }
    return std::nullopt;
}

Kind kind_of(const Record& record)
{
    return std::visit([](const auto& r) { return kind_for<std::decay_t<decltype(r)>>(); }, record);
}

Id id_of(const Record& record)
{
    return std::visit([](const auto& r) { return id_value(r); }, record);
}

// --- View ------------------------------------------------------------------

const std::set<Id>& View::lookup(const std::map<Id, std::set<Id>>& index, Id key)
{
    static const std::set<Id> empty;
    auto it = index.find(key);
    return it == index.end() ? empty : it->second;
}

std::optional<Id> View::user_by_name(const std::string& username) const
{
    auto it = t_.user_by_name.find(to_lower(username));
    if (it == t_.user_by_name.end())
        return std::nullopt;
    return it->second;
}

std::optional<Id> View::user_by_email(const std::string& email) const
{
    auto it = t_.user_by_email.find(to_lower(email));
    if (it == t_.user_by_email.end())
        return std::nullopt;
    return it->second;
}

std::optional<Id> View::review_by(Id user_id, Id movie_id) const
{
    auto it = t_.review_by_user_movie.find({user_id, movie_id});
    if (it == t_.review_by_user_movie.end())
        return std::nullopt;
    return it->second;
}

std::int64_t View::balance(Id user_id) const
{
    auto it = t_.balance_by_user.find(user_id);
    return it == t_.balance_by_user.end() ? 0 : it->second;
}

std::uint64_t View::ledger_version(Id user_id) const
{
    return ledger_of_user(user_id).size();
}

std::size_t View::record_count() const
{
    std::size_t n = 0;
    std::apply([&](const auto&... table) { ((n += table.size()), ...); }, t_.tables);
    return n;
}

// --- Txn -------------------------------------------------------------------

class Store::Txn {
public:
    explicit Txn(Tables& t) : t_(t), saved_last_id_(t.last_id) {}

    ~Txn()
    {
        if (!committed_)
            rollback();
    }

    void apply(const Mutation& m, std::size_t index, CommitResult& result)
    {
        Id touched = std::visit(
            [&](const auto& op) -> Id {
                using Op = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<Op, Insert>)
                    return apply_insert(op, result);
                else if constexpr (std::is_same_v<Op, Update>)
                    return apply_update(op);
                else if constexpr (std::is_same_v<Op, Erase>)
                    return apply_erase(op);
                else
                    return apply_guard(op);
            },
            m);
        (void)index;
        result.ids.push_back(touched);
    }

    /// Constraints that only make sense once every mutation is in place.
    void check_deferred() const
    {
        for (Id show_id : touched_shows_) {
            const auto& shows = t_.table<Show>();
            auto it = shows.find(show_id);
            if (it == shows.end())
                continue;
            SeatSet booked;
            auto bit = t_.bookings_by_show.find(show_id);
            if (bit != t_.bookings_by_show.end()) {
                for (Id bid : bit->second) {
                    const auto& b = t_.table<Booking>().at(bid).value;
                    if (b.status != BookingStatus::active)
                        continue;
                    for (const auto& s : b.seats) {
                        if (!booked.insert(s).second)
                            throw violation("seat_double_booked");
                    }
                }
            }
            if (booked != it->second.value.sold)
                throw violation("show_inventory");
        }
    }

    void set_sequence(const std::array<Id, 7>& seq)
    {
        for (std::size_t i = 0; i < seq.size(); ++i)
            t_.last_id[i] = std::max(t_.last_id[i], seq[i]);
    }

    [[nodiscard]] std::string journal_line() const
    {
        json line{{"ops", journal_}, {"last_id", t_.last_id}};
        return line.dump();
    }

    void commit() { committed_ = true; }

private:
    void rollback()
    {
        for (auto it = undo_.rbegin(); it != undo_.rend(); ++it)
            (*it)();
        undo_.clear();
        t_.last_id = saved_last_id_;
    }

    Id apply_insert(const Insert& op, const CommitResult& result)
    {
        return std::visit(
            [&](auto rec) -> Id {
                using T = std::decay_t<decltype(rec)>;
                constexpr Kind kind = kind_for<T>();
                auto& last = t_.last_id[index_of(kind)];
                Id& id = id_ref(rec);
                if (id < 0)
                    throw violation("primary_key");
                if (id == 0) {
                    id = ++last;
                } else {
                    if (t_.table<T>().contains(id))
                        throw violation("primary_key");
                    last = std::max(last, id);
                }
                if constexpr (std::is_same_v<T, CoinTransaction>) {
                    if (op.ref_from) {
                        if (*op.ref_from >= result.ids.size())
                            throw violation("ref_from");
                        rec.ref_id = result.ids[*op.ref_from];
                    }
                }
                check(rec, nullptr);
                raw_put(t_, rec, 1);
                undo_.push_back([this, id] { raw_erase<T>(t_, id); });
                journal_.push_back(json{{"op", "put"}, {"kind", kind_name(kind)}, {"data", rec}});
                return id;
            },
            op.record);
    }

    Id apply_update(const Update& op)
    {
        return std::visit(
            [&](const auto& rec) -> Id {
                using T = std::decay_t<decltype(rec)>;
                constexpr Kind kind = kind_for<T>();
                if constexpr (std::is_same_v<T, CoinTransaction>)
                    throw violation("ledger_immutable");
                const Id id = id_value(rec);
                auto& table = t_.table<T>();
                auto it = table.find(id);
                if (it == table.end())
                    throw Error(ErrorCode::NotFound, std::string(kind_name(kind)) + " " + std::to_string(id) +
                                                         " does not exist");
                if (op.expected_version && *op.expected_version != it->second.version)
                    throw Error(ErrorCode::Conflict, std::string(kind_name(kind)) + " " + std::to_string(id) +
                                                         " was modified concurrently");
                const Row<T> old = it->second;
                check(rec, &old.value);
                raw_put(t_, rec, old.version + 1);
                undo_.push_back([this, old] { raw_put(t_, old.value, old.version); });
                journal_.push_back(json{{"op", "put"}, {"kind", kind_name(kind)}, {"data", rec}});
                return id;
            },
            op.record);
    }

    Id apply_erase(const Erase& op)
    {
        return with_kind(op.kind, [&](auto proto) -> Id {
            using T = decltype(proto);
            if constexpr (std::is_same_v<T, CoinTransaction>)
                throw violation("ledger_immutable");
            auto& table = t_.table<T>();
            auto it = table.find(op.id);
            if (it == table.end())
                throw Error(ErrorCode::NotFound, std::string(kind_name(op.kind)) + " " + std::to_string(op.id) +
                                                     " does not exist");
            if (op.expected_version && *op.expected_version != it->second.version)
                throw Error(ErrorCode::Conflict, std::string(kind_name(op.kind)) + " " + std::to_string(op.id) +
                                                     " was modified concurrently");
            check_unreferenced(it->second.value);
            const Row<T> old = it->second;
            raw_erase<T>(t_, op.id);
            undo_.push_back([this, old] { raw_put(t_, old.value, old.version); });
            journal_.push_back(json{{"op", "erase"}, {"kind", kind_name(op.kind)}, {"id", op.id}});
            return op.id;
        });
    }

    Id apply_guard(const ExpectLedger& op)
    {
        auto it = t_.ledger_by_user.find(op.user_id);
        const std::uint64_t version = it == t_.ledger_by_user.end() ? 0 : it->second.size();
        if (version != op.version)
            throw Error(ErrorCode::Conflict, "ledger of user " + std::to_string(op.user_id) +
                                                 " was modified concurrently");
        return 0;
    }

    template <class T>
    bool exists(Id id) const
    {
        return t_.table<T>().contains(id);
    }

    // --- per-record constraints -------------------------------------------

    void check(const UserAccount& u, const UserAccount*) const
    {
        if (u.username.empty())
            throw violation("username_nonempty");
        const auto at = u.email.find('@');
        if (at == std::string::npos || at == 0 || at + 1 >= u.email.size())
            throw violation("email_format");
        if (u.password_digest.empty())
            throw violation("password_digest");
        if (auto it = t_.user_by_name.find(to_lower(u.username)); it != t_.user_by_name.end() && it->second != u.user_id)
            throw violation("username");
        if (auto it = t_.user_by_email.find(to_lower(u.email)); it != t_.user_by_email.end() && it->second != u.user_id)
            throw violation("email");
    }

    void check(const Movie& m, const Movie*) const
    {
        if (m.title.empty())
            throw violation("title_nonempty");
        if (m.genres.empty())
            throw violation("genres_nonempty");
        auto it = t_.movie_by_title_date.find({m.title, m.release_date.to_string()});
        if (it != t_.movie_by_title_date.end() && it->second != m.movie_id)
            throw violation("title_release_date");
    }

    void check(const Venue& v, const Venue* old) const
    {
        if (v.name.empty())
            throw violation("venue_name_nonempty");
        if (v.rows < 1 || v.rows > kMaxRows || v.cols < 1 || v.cols > kMaxCols)
            throw violation("venue_grid");
        if (old && (old->rows != v.rows || old->cols != v.cols)) {
            auto it = t_.shows_by_venue.find(v.venue_id);
            if (it != t_.shows_by_venue.end()) {
                for (Id sid : it->second) {
                    for (const auto& s : t_.table<Show>().at(sid).value.sold) {
                        if (!v.contains(s))
                            throw violation("sold_within_grid");
                    }
                }
            }
        }
    }

    void check(const Show& s, const Show*)
    {
        if (!exists<Movie>(s.movie_id))
            throw violation("show_movie_fk");
        auto vit = t_.table<Venue>().find(s.venue_id);
        if (vit == t_.table<Venue>().end())
            throw violation("show_venue_fk");
        if (s.price_per_seat.amount_minor < 0)
            throw violation("price_nonnegative");
        for (const auto& seat : s.sold) {
            if (!vit->second.value.contains(seat))
                throw violation("sold_within_grid");
        }
        touched_shows_.insert(s.show_id);
    }

    void check(const Booking& b, const Booking* old)
    {
        if (!exists<UserAccount>(b.user_id))
            throw violation("booking_user_fk");
        auto sit = t_.table<Show>().find(b.show_id);
        if (sit == t_.table<Show>().end())
            throw violation("booking_show_fk");
        if (b.seats.empty())
            throw violation("booking_seats_nonempty");
        const auto& venue = t_.table<Venue>().at(sit->second.value.venue_id).value;
        for (const auto& seat : b.seats) {
            if (!venue.contains(seat))
                throw violation("booking_seat_within_grid");
        }
        if (b.paid.amount_minor < 0 || b.refunded.amount_minor < 0 || b.coins_redeemed < 0)
            throw violation("booking_amounts_nonnegative");
        if (b.status == BookingStatus::active && (b.cancelled_at || b.refunded.amount_minor != 0))
            throw violation("booking_status");
        if (b.status == BookingStatus::cancelled && !b.cancelled_at)
            throw violation("booking_status");
        if (old && old->status == BookingStatus::cancelled && b.status == BookingStatus::active)
            throw violation("booking_status_transition");
        touched_shows_.insert(b.show_id);
        if (old)
            touched_shows_.insert(old->show_id);
    }

    void check(const Review& r, const Review*) const
    {
        if (!exists<UserAccount>(r.user_id))
            throw violation("review_user_fk");
        if (!exists<Movie>(r.movie_id))
            throw violation("review_movie_fk");
        if (r.rating < 1 || r.rating > 5)
            throw violation("rating_range");
        auto it = t_.review_by_user_movie.find({r.user_id, r.movie_id});
        if (it != t_.review_by_user_movie.end() && it->second != r.review_id)
            throw violation("review_user_movie");
    }

    void check(const CoinTransaction& c, const CoinTransaction*) const
    {
        if (!exists<UserAccount>(c.user_id))
            throw violation("ledger_user_fk");
        const bool ref_ok = ledger_refs_booking(c.reason) ? exists<Booking>(c.ref_id) : exists<Review>(c.ref_id);
        if (!ref_ok)
            throw violation("ledger_ref_fk");
    }

    // --- restrict-on-delete -------------------------------------------------

    void check_unreferenced(const UserAccount& u) const
    {
        if (t_.bookings_by_user.contains(u.user_id) || t_.reviews_by_user.contains(u.user_id) ||
            t_.ledger_by_user.contains(u.user_id))
            throw violation("user_referenced");
    }

    void check_unreferenced(const Movie& m) const
    {
        if (t_.shows_by_movie.contains(m.movie_id) || t_.reviews_by_movie.contains(m.movie_id))
            throw violation("movie_referenced");
    }

    void check_unreferenced(const Venue& v) const
    {
        if (t_.shows_by_venue.contains(v.venue_id))
            throw violation("venue_referenced");
    }

    void check_unreferenced(const Show& s) const
    {
        if (t_.bookings_by_show.contains(s.show_id))
            throw violation("show_referenced");
    }

    void check_unreferenced(const Booking& b)
    {
        for (const auto& [id, row] : t_.table<CoinTransaction>()) {
            if (ledger_refs_booking(row.value.reason) && row.value.ref_id == b.booking_id)
                throw violation("booking_referenced");
        }
        touched_shows_.insert(b.show_id);
    }

    void check_unreferenced(const Review& r) const
    {
        for (const auto& [id, row] : t_.table<CoinTransaction>()) {
            if (!ledger_refs_booking(row.value.reason) && row.value.ref_id == r.review_id)
                throw violation("review_referenced");
        }
    }

    void check_unreferenced(const CoinTransaction&) const {}

    Tables& t_;
    std::array<Id, 7> saved_last_id_;
    std::vector<std::function<void()>> undo_;
    std::set<Id> touched_shows_;
    json journal_ = json::array();
    bool committed_ = false;
};

// --- Store -----------------------------------------------------------------

Store::Store() = default;

Store::~Store()
{
    if (journal_)
        std::fclose(journal_);
}

void Store::set_fault_injector(std::function<void(std::size_t)> hook)
{
    std::unique_lock lock(mu_);
    fault_hook_ = std::move(hook);
}

Id Store::peek_next_id(Kind kind) const
{
    std::shared_lock lock(mu_);
    return data_.last_id[index_of(kind)] + 1;
}

CommitResult Store::transact(std::vector<Mutation> ops)
{
    return commit(std::move(ops), false, std::nullopt);
}

CommitResult Store::commit(std::vector<Mutation> ops, bool require_empty,
                           const std::optional<std::array<Id, 7>>& sequence)
{
    std::unique_lock lock(mu_);
    CommitResult result;
    if (ops.empty() && !sequence)
        return result;
    if (require_empty && View{data_}.record_count() != 0)
        throw Error(ErrorCode::ImportIntoNonEmptyStore, "fixture import requires an empty store");

    Txn txn(data_);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (fault_hook_)
            fault_hook_(i);
        txn.apply(ops[i], i, result);
    }
    txn.check_deferred();
    if (sequence)
        txn.set_sequence(*sequence);
    if (fault_hook_)
        fault_hook_(ops.size());
    if (journal_)
        append_journal(txn.journal_line());
    txn.commit();
    return result;
}

void Store::append_journal(const std::string& line)
{
    const std::string framed = line + "\n";
    if (std::fwrite(framed.data(), 1, framed.size(), journal_) != framed.size() || std::fflush(journal_) != 0)
        throw Error(ErrorCode::Internal, "journal write failed");
    if (sync_writes_)
        ::fsync(::fileno(journal_));
}

std::unique_ptr<Store> Store::open(const std::filesystem::path& journal, bool sync_writes)
{
    auto store = std::make_unique<Store>();
    store->sync_writes_ = sync_writes;
    if (std::filesystem::exists(journal)) {
        std::ifstream in(journal, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        // Drop a torn tail: anything after the last newline never committed.
        const auto last_nl = content.rfind('\n');
        const std::size_t good = last_nl == std::string::npos ? 0 : last_nl + 1;
        if (good != content.size()) {
            content.resize(good);
            std::filesystem::resize_file(journal, good);
        }
        std::istringstream lines(content);
        store->replay(lines);
    }
    store->journal_ = std::fopen(journal.c_str(), "ab");
    if (!store->journal_)
        throw Error(ErrorCode::ConfigError, "cannot open journal " + journal.string());
    return store;
}

void Store::replay(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            const json entry = json::parse(line);
            for (const auto& op : entry.at("ops")) {
                const auto kind = kind_from_name(op.at("kind").get<std::string>());
                if (!kind)
                    throw Error(ErrorCode::MalformedLine, "unknown kind");
                with_kind(*kind, [&](auto proto) {
                    using T = decltype(proto);
                    if (op.at("op") == "put") {
                        T value = op.at("data").get<T>();
                        const auto& table = data_.table<T>();
                        auto it = table.find(id_value(value));
                        raw_put(data_, value, it == table.end() ? 1 : it->second.version + 1);
                    } else {
                        raw_erase<T>(data_, op.at("id").get<Id>());
                    }
                });
            }
            data_.last_id = entry.at("last_id").get<std::array<Id, 7>>();
        } catch (const std::exception& e) {
            throw Error(ErrorCode::MalformedLine,
                        "MalformedLine(" + std::to_string(line_no) + "): journal entry unreadable: " + e.what());
        }
    }
}

void Store::export_fixtures(std::ostream& out) const
{
    std::shared_lock lock(mu_);
    auto emit = [&](const auto& table) {
        using T = std::decay_t<decltype(table.begin()->second.value)>;
        for (const auto& [id, row] : table) {
            out << R"({"kind":")" << kind_name(kind_for<T>()) << R"(","data":)" << json(row.value).dump() << "}\n";
        }
    };
    std::apply([&](const auto&... table) { (emit(table), ...); }, data_.tables);

    if (std::any_of(data_.last_id.begin(), data_.last_id.end(), [](Id v) { return v > 0; })) {
        json seq = json::object();
        for (auto k : kAllKinds)
            seq[std::string(kind_name(k))] = data_.last_id[index_of(k)];
        out << R"({"kind":"sequence","data":)" << seq.dump() << "}\n";
    }
}

void Store::export_fixtures(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    export_fixtures(out);
}

ImportCounts Store::import_fixtures(std::istream& in)
{
    std::vector<Mutation> ops;
    std::optional<std::array<Id, 7>> sequence;
    ImportCounts counts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto malformed = [&](const std::string& why) {
            return Error(ErrorCode::MalformedLine, "MalformedLine(" + std::to_string(line_no) + "): " + why);
        };
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::exception&) {
            throw malformed("not valid JSON");
        }
        if (!entry.is_object() || !entry.contains("kind") || !entry["kind"].is_string())
            throw malformed("missing kind");
        if (!entry.contains("data") || !entry["data"].is_object())
            throw malformed("missing data object");
        const auto name = entry["kind"].get<std::string>();
        try {
            if (name == "sequence") {
                std::array<Id, 7> seq{};
                for (auto k : kAllKinds)
                    seq[index_of(k)] = entry["data"].at(std::string(kind_name(k))).get<Id>();
                sequence = seq;
                continue;
            }
            const auto kind = kind_from_name(name);
            if (!kind)
                throw malformed("unknown kind '" + name + "'");
            Record rec = with_kind(*kind, [&](auto proto) -> Record {
                using T = decltype(proto);
                return entry["data"].get<T>();
            });
            if (id_of(rec) <= 0)
                throw malformed("record id must be positive");
            ops.push_back(Insert{std::move(rec), std::nullopt});
            ++counts.by_kind[name];
            ++counts.total;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedLine)
                throw;
            throw malformed(e.what());
        } catch (const std::exception& e) {
            throw malformed(e.what());
        }
    }
    commit(std::move(ops), true, sequence);
    return counts;
}

ImportCounts Store::import_fixtures(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    return import_fixtures(in);
}

IntegrityReport Store::scan_integrity() const
{
    std::shared_lock lock(mu_);
    IntegrityReport report;
    auto problem = [&](std::string text) { report.problems.push_back(std::move(text)); };
    const auto& users = data_.table<UserAccount>();
    const auto& movies = data_.table<Movie>();
    const auto& venues = data_.table<Venue>();
    const auto& shows = data_.table<Show>();
    const auto& bookings = data_.table<Booking>();
    const auto& reviews = data_.table<Review>();
    const auto& ledger = data_.table<CoinTransaction>();

    std::set<std::string> names;
    std::set<std::string> emails;
    for (const auto& [id, row] : users) {
        if (!names.insert(to_lower(row.value.username)).second)
            problem("duplicate username " + row.value.username);
        if (!emails.insert(to_lower(row.value.email)).second)
            problem("duplicate email " + row.value.email);
    }

    std::map<Id, SeatSet> active_seats;
    for (const auto& [id, row] : bookings) {
        const auto& b = row.value;
        if (!users.contains(b.user_id))
            problem("booking " + std::to_string(id) + " -> missing user " + std::to_string(b.user_id));
        if (!shows.contains(b.show_id))
            problem("booking " + std::to_string(id) + " -> missing show " + std::to_string(b.show_id));
        if (b.status == BookingStatus::active) {
            for (const auto& s : b.seats) {
                if (!active_seats[b.show_id].insert(s).second)
                    problem("seat " + seat_label_encode(s) + " of show " + std::to_string(b.show_id) +
                            " in two active bookings");
            }
        }
    }

    for (const auto& [id, row] : shows) {
        const auto& s = row.value;
        if (!movies.contains(s.movie_id))
            problem("show " + std::to_string(id) + " -> missing movie " + std::to_string(s.movie_id));
        auto vit = venues.find(s.venue_id);
        if (vit == venues.end()) {
            problem("show " + std::to_string(id) + " -> missing venue " + std::to_string(s.venue_id));
        } else if (static_cast<int>(s.sold.size()) > vit->second.value.capacity()) {
            problem("show " + std::to_string(id) + " oversold");
        }
        if (active_seats[id] != s.sold)
            problem("show " + std::to_string(id) + " sold set differs from active bookings");
    }

    std::set<std::pair<Id, Id>> user_movie;
    for (const auto& [id, row] : reviews) {
        const auto& r = row.value;
        if (!users.contains(r.user_id))
            problem("review " + std::to_string(id) + " -> missing user");
        if (!movies.contains(r.movie_id))
            problem("review " + std::to_string(id) + " -> missing movie");
        if (!user_movie.insert({r.user_id, r.movie_id}).second)
            problem("two reviews for user " + std::to_string(r.user_id) + " movie " + std::to_string(r.movie_id));
    }

    std::map<Id, std::int64_t> folded;
    for (const auto& [id, row] : ledger) {
        const auto& c = row.value;
        if (!users.contains(c.user_id))
            problem("ledger " + std::to_string(id) + " -> missing user");
        const bool ref_ok = ledger_refs_booking(c.reason) ? bookings.contains(c.ref_id) : reviews.contains(c.ref_id);
        if (!ref_ok)
            problem("ledger " + std::to_string(id) + " -> missing ref " + std::to_string(c.ref_id));
        folded[c.user_id] += c.delta;
    }
    for (const auto& [user, sum] : folded) {
        const auto it = data_.balance_by_user.find(user);
        if (it == data_.balance_by_user.end() || it->second != sum)
            problem("balance index stale for user " + std::to_string(user));
    }
    if (data_.balance_by_user.size() != folded.size())
        problem("balance index has entries for users without ledger");
    return report;
}

} // namespace stageseat::store
