#pragma once

// Transactional record store.
//
// All records live in ordered in-memory tables guarded by one reader/writer
// lock. A transaction applies its mutations to the live tables under the
// exclusive lock while keeping an undo log; any failure (constraint check,
// version conflict, injected fault, journal write error) rolls every applied
// mutation back before the lock is released, so readers only ever observe
// committed states. When the store is backed by a journal file, each committed
// transaction is appended as one JSON line and the file is replayed on open.

#include "stageseat/domain.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace stageseat::store {

enum class Kind { user, movie, venue, show, booking, review, coin_txn };

inline constexpr std::array<Kind, 7> kAllKinds{Kind::user,    Kind::movie,  Kind::venue,   Kind::show,
                                               Kind::booking, Kind::review, Kind::coin_txn};

std::string_view kind_name(Kind kind);
std::optional<Kind> kind_from_name(std::string_view name);

using Record = std::variant<UserAccount, Movie, Venue, Show, Booking, Review, CoinTransaction>;

Kind kind_of(const Record& record);
Id id_of(const Record& record);

/// Insert a new record. A zero id means "assign the next id"; a positive id is
/// kept as is (fixture import). `ref_from` names an earlier Insert of the same
/// transaction whose assigned id becomes this CoinTransaction's ref_id.
struct Insert {
    Record record;
    std::optional<std::size_t> ref_from;
};

/// Replace an existing record. With `expected_version` set the update fails
/// with Conflict if the row changed since it was read.
struct Update {
    Record record;
    std::optional<std::uint64_t> expected_version;
};

struct Erase {
    Kind kind;
    Id id = 0;
    std::optional<std::uint64_t> expected_version;
};

/// Guard: abort with Conflict unless the user's ledger still has `version`
/// entries appended, i.e. no other writer touched it since it was read.
struct ExpectLedger {
    Id user_id = 0;
    std::uint64_t version = 0;
};

using Mutation = std::variant<Insert, Update, Erase, ExpectLedger>;

struct CommitResult {
    /// Id of the record each mutation touched, 0 for guards.
    std::vector<Id> ids;
};

template <class T>
struct Row {
    T value;
    std::uint64_t version = 1;
};

template <class T>
using Table = std::map<Id, Row<T>>;

/// Tables plus the secondary indexes the services query. Only Store mutates it.
struct Tables {
    std::tuple<Table<UserAccount>, Table<Movie>, Table<Venue>, Table<Show>, Table<Booking>, Table<Review>,
               Table<CoinTransaction>>
        tables;
    std::array<Id, 7> last_id{};

    std::map<std::string, Id> user_by_name;  // lowercased
    std::map<std::string, Id> user_by_email; // lowercased
    std::map<std::pair<std::string, std::string>, Id> movie_by_title_date;
    std::map<std::pair<Id, Id>, Id> review_by_user_movie;
    std::map<Id, std::set<Id>> shows_by_movie;
    std::map<Id, std::set<Id>> shows_by_venue;
    std::map<Id, std::set<Id>> bookings_by_show;
    std::map<Id, std::set<Id>> bookings_by_user;
    std::map<Id, std::set<Id>> reviews_by_movie;
    std::map<Id, std::set<Id>> reviews_by_user;
    std::map<Id, std::set<Id>> ledger_by_user;
    std::map<Id, std::int64_t> balance_by_user;

    template <class T>
    Table<T>& table() { return std::get<Table<T>>(tables); }
    template <class T>
    const Table<T>& table() const { return std::get<Table<T>>(tables); }
};

/// Read-only access to committed state; valid only inside Store::read.
class View {
public:
    explicit View(const Tables& t) : t_(t) {}

    template <class T>
    [[nodiscard]] const Table<T>& all() const { return t_.table<T>(); }

    template <class T>
    [[nodiscard]] const T* find(Id id) const
    {
        const auto& table = t_.table<T>();
        auto it = table.find(id);
        return it == table.end() ? nullptr : &it->second.value;
    }

    template <class T>
    [[nodiscard]] std::uint64_t version(Id id) const
    {
        const auto& table = t_.table<T>();
        auto it = table.find(id);
        return it == table.end() ? 0 : it->second.version;
    }

    [[nodiscard]] std::optional<Id> user_by_name(const std::string& username) const;
    [[nodiscard]] std::optional<Id> user_by_email(const std::string& email) const;
    [[nodiscard]] std::optional<Id> review_by(Id user_id, Id movie_id) const;

    [[nodiscard]] const std::set<Id>& shows_of_movie(Id movie_id) const { return lookup(t_.shows_by_movie, movie_id); }
    [[nodiscard]] const std::set<Id>& shows_of_venue(Id venue_id) const { return lookup(t_.shows_by_venue, venue_id); }
    [[nodiscard]] const std::set<Id>& bookings_of_show(Id show_id) const { return lookup(t_.bookings_by_show, show_id); }
    [[nodiscard]] const std::set<Id>& bookings_of_user(Id user_id) const { return lookup(t_.bookings_by_user, user_id); }
    [[nodiscard]] const std::set<Id>& reviews_of_movie(Id movie_id) const { return lookup(t_.reviews_by_movie, movie_id); }
    [[nodiscard]] const std::set<Id>& reviews_of_user(Id user_id) const { return lookup(t_.reviews_by_user, user_id); }
    [[nodiscard]] const std::set<Id>& ledger_of_user(Id user_id) const { return lookup(t_.ledger_by_user, user_id); }

    [[nodiscard]] std::int64_t balance(Id user_id) const;
    [[nodiscard]] std::uint64_t ledger_version(Id user_id) const;
    [[nodiscard]] std::size_t record_count() const;

private:
    static const std::set<Id>& lookup(const std::map<Id, std::set<Id>>& index, Id key);

    const Tables& t_;
};

struct ImportCounts {
    std::map<std::string, std::size_t> by_kind;
    std::size_t total = 0;
};

struct IntegrityReport {
    std::vector<std::string> problems;
    [[nodiscard]] bool ok() const { return problems.empty(); }
};

class Store {
public:
    /// Purely in-memory store.
    Store();
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Store backed by a journal file; replays it if it exists. A torn final
    /// line (crash mid-append) is dropped; damage elsewhere is MalformedLine.
    static std::unique_ptr<Store> open(const std::filesystem::path& journal, bool sync_writes = false);

    /// All-or-nothing. Throws ConstraintViolation naming the constraint, or
    /// Conflict on a version/ledger guard mismatch.
    CommitResult transact(std::vector<Mutation> ops);

    template <class F>
    decltype(auto) read(F&& f) const
    {
        std::shared_lock lock(mu_);
        return std::forward<F>(f)(View{data_});
    }

    /// JSON lines `{"kind": ..., "data": {...}}`, dependency order, ids ascending.
    void export_fixtures(std::ostream& out) const;
    void export_fixtures(const std::filesystem::path& path) const;
    ImportCounts import_fixtures(std::istream& in);
    ImportCounts import_fixtures(const std::filesystem::path& path);

    /// Id the next auto-assigned insert of `kind` would receive.
    [[nodiscard]] Id peek_next_id(Kind kind) const;

    /// Test hook, called with the mutation index before each mutation is
    /// applied and with ops.size() just before commit. Throwing aborts.
    void set_fault_injector(std::function<void(std::size_t)> hook);

    /// Independent walk over the raw tables: dangling ids, duplicate unique
    /// keys, inventory/booking mismatches and stale index entries.
    [[nodiscard]] IntegrityReport scan_integrity() const;

private:
    class Txn;

    CommitResult commit(std::vector<Mutation> ops, bool require_empty,
                        const std::optional<std::array<Id, 7>>& sequence);
    void replay(std::istream& in);
    void append_journal(const std::string& line);

    mutable std::shared_mutex mu_;
    Tables data_;
    std::function<void(std::size_t)> fault_hook_;
    std::FILE* journal_ = nullptr;
    bool sync_writes_ = false;
};

} // namespace stageseat::store
