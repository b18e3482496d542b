#include "stageseat/booking.hpp"

#include "stageseat/error.hpp"

#include <algorithm>

namespace stageseat::booking {

namespace {

constexpr int kMaxAttempts = 5;

std::string seat_list(const SeatSet& seats)
{
    std::string out;
    for (const auto& s : seats) {
        if (!out.empty())
            out += ",";
        out += seat_label_encode(s);
    }
    return out;
}

} // namespace

Quote quote(const Show& show, int n_seats, std::int64_t coins_requested, std::int64_t user_balance,
            const Policy& policy)
{
    if (n_seats < 1)
        throw Error(ErrorCode::BadRequest, "a quote needs at least one seat");
    Quote q;
    const auto& currency = show.price_per_seat.currency;
    q.subtotal = Money{show.price_per_seat.amount_minor * n_seats, currency};
    const std::int64_t cap = q.subtotal.amount_minor * policy.redeem_cap_pct / (100 * policy.coin_value_minor);
    q.max_redeemable_coins = std::max<std::int64_t>(0, std::min(user_balance, cap));
    q.coins_redeemed = std::clamp<std::int64_t>(coins_requested, 0, q.max_redeemable_coins);
    q.discount = Money{q.coins_redeemed * policy.coin_value_minor, currency};
    q.total = apply_discount(q.subtotal, q.coins_redeemed, policy.coin_value_minor);
    return q;
}

BookingEngine::BookingEngine(store::Store& store, Policy policy) : store_(store), policy_(std::move(policy)) {}

std::mutex& BookingEngine::show_mutex(Id show_id)
{
    std::lock_guard guard(locks_guard_);
    auto& slot = show_locks_[show_id];
    if (!slot)
        slot = std::make_unique<std::mutex>();
    return *slot;
}

std::mutex& BookingEngine::user_mutex(Id user_id)
{
    std::lock_guard guard(locks_guard_);
    auto& slot = user_locks_[user_id];
    if (!slot)
        slot = std::make_unique<std::mutex>();
    return *slot;
}

template <class F>
auto BookingEngine::with_retry(F&& attempt)
{
    for (int i = 1;; ++i) {
        try {
            return attempt();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Conflict || i >= kMaxAttempts)
                throw;
        }
    }
}

Show BookingEngine::create_show(Id movie_id, Id venue_id, Timestamp starts_at, const Money& price_per_seat,
                                Timestamp now)
{
    store_.read([&](const store::View& v) {
        if (!v.find<Movie>(movie_id))
            throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(movie_id) + " does not exist");
        if (!v.find<Venue>(venue_id))
            throw Error(ErrorCode::UnknownVenue, "venue " + std::to_string(venue_id) + " does not exist");
    });
    if (starts_at <= now)
        throw Error(ErrorCode::PastShowtime, "show must start in the future");
    if (price_per_seat.amount_minor < 0)
        throw Error(ErrorCode::BadRequest, "price must be non-negative");

    Show show{0, movie_id, venue_id, starts_at, price_per_seat, {}};
    try {
        show.show_id = store_.transact({store::Insert{show, std::nullopt}}).ids.at(0);
    } catch (const Error& e) {
        // The movie or venue vanished between the check and the commit.
        if (e.code() == ErrorCode::ConstraintViolation && std::string_view(e.what()).find("movie") != std::string_view::npos)
            throw Error(ErrorCode::UnknownMovie, e.what());
        if (e.code() == ErrorCode::ConstraintViolation && std::string_view(e.what()).find("venue") != std::string_view::npos)
            throw Error(ErrorCode::UnknownVenue, e.what());
        throw;
    }
    return show;
}

Show BookingEngine::update_show(const Show& changes, Timestamp now)
{
    std::lock_guard lock(show_mutex(changes.show_id));
    if (changes.starts_at <= now)
        throw Error(ErrorCode::PastShowtime, "show must start in the future");
    if (changes.price_per_seat.amount_minor < 0)
        throw Error(ErrorCode::BadRequest, "price must be non-negative");
    return with_retry([&] {
        auto [current, version] = store_.read([&](const store::View& v) {
            const Show* s = v.find<Show>(changes.show_id);
            if (!s)
                throw Error(ErrorCode::UnknownShow, "show " + std::to_string(changes.show_id) + " does not exist");
            if (!v.find<Movie>(changes.movie_id))
                throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(changes.movie_id) + " does not exist");
            if (!v.find<Venue>(changes.venue_id))
                throw Error(ErrorCode::UnknownVenue, "venue " + std::to_string(changes.venue_id) + " does not exist");
            return std::pair{*s, v.version<Show>(changes.show_id)};
        });
        Show updated = changes;
        updated.sold = current.sold;
        store_.transact({store::Update{updated, version}});
        return updated;
    });
}

void BookingEngine::delete_show(Id show_id)
{
    std::lock_guard lock(show_mutex(show_id));
    const bool exists = store_.read([&](const store::View& v) { return v.find<Show>(show_id) != nullptr; });
    if (!exists)
        throw Error(ErrorCode::UnknownShow, "show " + std::to_string(show_id) + " does not exist");
    store_.transact({store::Erase{store::Kind::show, show_id, std::nullopt}});
}

Quote BookingEngine::quote_for(Id user_id, Id show_id, int n_seats, std::int64_t coins_requested) const
{
    return store_.read([&](const store::View& v) {
        const Show* show = v.find<Show>(show_id);
        if (!show)
            throw Error(ErrorCode::UnknownShow, "show " + std::to_string(show_id) + " does not exist");
        if (!v.find<UserAccount>(user_id))
            throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");
        return quote(*show, n_seats, coins_requested, v.balance(user_id), policy_);
    });
}

Booking BookingEngine::book_seats(Id user_id, Id show_id, const SeatSet& seats, std::int64_t coins_requested,
                                  Timestamp now)
{
    if (coins_requested < 0)
        throw Error(ErrorCode::BadRequest, "coins_redeemed must be non-negative");

    std::scoped_lock lock(user_mutex(user_id), show_mutex(show_id));
    return with_retry([&] {
        struct Snapshot {
            Show show;
            std::uint64_t show_version;
            int capacity;
            std::int64_t balance;
            std::uint64_t ledger_version;
        };
        const Snapshot snap = store_.read([&](const store::View& v) {
            const Show* show = v.find<Show>(show_id);
            if (!show)
                throw Error(ErrorCode::UnknownShow, "show " + std::to_string(show_id) + " does not exist");
            if (!v.find<UserAccount>(user_id))
                throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");
            const Venue& venue = *v.find<Venue>(show->venue_id);

            if (now >= show->starts_at)
                throw Error(ErrorCode::ShowStarted, "show " + std::to_string(show_id) + " has already started");
            if (seats.empty())
                throw Error(ErrorCode::InvalidSeat, "no seats requested");
            for (const auto& s : seats) {
                if (!venue.contains(s))
                    throw Error(ErrorCode::InvalidSeat, "seat outside the venue grid");
            }
            return Snapshot{*show, v.version<Show>(show_id), venue.capacity(), v.balance(user_id),
                            v.ledger_version(user_id)};
        });

        if (static_cast<int>(snap.show.sold.size()) >= snap.capacity)
            throw Error(ErrorCode::Houseful, "show " + std::to_string(show_id) + " is houseful");
        SeatSet taken;
        std::set_intersection(seats.begin(), seats.end(), snap.show.sold.begin(), snap.show.sold.end(),
                              std::inserter(taken, taken.end()));
        if (!taken.empty())
            throw Error(ErrorCode::SeatTaken, "SeatTaken([" + seat_list(taken) + "])");
        if (coins_requested > 0 && (snap.balance <= 0 || coins_requested > snap.balance))
            throw Error(ErrorCode::InsufficientCoins, "requested " + std::to_string(coins_requested) +
                                                          " coins, balance is " + std::to_string(snap.balance));

        const Quote q = quote(snap.show, static_cast<int>(seats.size()), coins_requested, snap.balance, policy_);

        Show updated = snap.show;
        updated.sold.insert(seats.begin(), seats.end());

        Booking booking;
        booking.user_id = user_id;
        booking.show_id = show_id;
        booking.seats = seats;
        booking.paid = q.total;
        booking.coins_redeemed = q.coins_redeemed;
        booking.status = BookingStatus::active;
        booking.created_at = now;
        booking.refunded = Money{0, q.total.currency};

        std::vector<store::Mutation> ops;
        ops.push_back(store::Update{updated, snap.show_version});
        ops.push_back(store::ExpectLedger{user_id, snap.ledger_version});
        ops.push_back(store::Insert{booking, std::nullopt});
        constexpr std::size_t kBookingOp = 2;
        if (q.coins_redeemed > 0)
            ops.push_back(store::Insert{CoinTransaction{0, user_id, -q.coins_redeemed, CoinReason::redeem, 0, now},
                                        kBookingOp});
        const std::int64_t earned = policy_.earn_per_seat * static_cast<std::int64_t>(seats.size());
        if (earned > 0)
            ops.push_back(
                store::Insert{CoinTransaction{0, user_id, earned, CoinReason::booking_earn, 0, now}, kBookingOp});

        booking.booking_id = store_.transact(std::move(ops)).ids.at(kBookingOp);
        return booking;
    });
}

Refund BookingEngine::cancel_booking(Id acting_user_id, Id booking_id, Timestamp now, bool acting_as_admin)
{
    const auto owner = store_.read([&](const store::View& v) {
        const Booking* b = v.find<Booking>(booking_id);
        if (!b)
            throw Error(ErrorCode::NotFound, "booking " + std::to_string(booking_id) + " does not exist");
        return std::pair{b->user_id, b->show_id};
    });
    if (!acting_as_admin && owner.first != acting_user_id)
        throw Error(ErrorCode::NotOwner, "booking belongs to another user");

    std::scoped_lock lock(user_mutex(owner.first), show_mutex(owner.second));
    return with_retry([&] {
        struct Snapshot {
            Booking booking;
            std::uint64_t booking_version;
            Show show;
            std::uint64_t show_version;
            std::int64_t earned;
        };
        const Snapshot snap = store_.read([&](const store::View& v) {
            const Booking& b = *v.find<Booking>(booking_id);
            if (b.status == BookingStatus::cancelled)
                throw Error(ErrorCode::AlreadyCancelled, "booking " + std::to_string(booking_id) + " is already cancelled");
            const Show& show = *v.find<Show>(b.show_id);
            std::int64_t earned = 0;
            for (Id txn : v.ledger_of_user(b.user_id)) {
                const auto& c = *v.find<CoinTransaction>(txn);
                if (c.reason == CoinReason::booking_earn && c.ref_id == booking_id)
                    earned += c.delta;
            }
            return Snapshot{b, v.version<Booking>(booking_id), show, v.version<Show>(b.show_id), earned};
        });

        const Timestamp cutoff = snap.show.starts_at - policy_.cancel_cutoff_hours * kMillisPerHour;
        if (now > cutoff)
            throw Error(ErrorCode::TooLateToCancel, "cancellation closes " + std::to_string(policy_.cancel_cutoff_hours) +
                                                        "h before showtime");

        Show updated = snap.show;
        for (const auto& s : snap.booking.seats)
            updated.sold.erase(s);
        Booking cancelled = snap.booking;
        cancelled.status = BookingStatus::cancelled;
        cancelled.cancelled_at = now;
        cancelled.refunded = snap.booking.paid;

        const Id user = snap.booking.user_id;
        std::vector<store::Mutation> ops;
        ops.push_back(store::Update{updated, snap.show_version});
        ops.push_back(store::Update{cancelled, snap.booking_version});
        if (snap.booking.coins_redeemed > 0)
            ops.push_back(store::Insert{
                CoinTransaction{0, user, snap.booking.coins_redeemed, CoinReason::redeem_return, booking_id, now},
                std::nullopt});
        if (snap.earned > 0)
            ops.push_back(store::Insert{
                CoinTransaction{0, user, -snap.earned, CoinReason::revoke_on_cancel, booking_id, now}, std::nullopt});
        store_.transact(std::move(ops));

        return Refund{booking_id, cancelled.refunded, snap.booking.coins_redeemed, snap.earned};
    });
}

std::int64_t BookingEngine::coin_balance(Id user_id) const
{
    return store_.read([&](const store::View& v) {
        if (!v.find<UserAccount>(user_id))
            throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");
        return v.balance(user_id);
    });
}

CoinTransaction BookingEngine::earn_review_coins(Id user_id, Id review_id, Timestamp now)
{
    std::lock_guard lock(user_mutex(user_id));
    return with_retry([&] {
        const std::uint64_t ledger_version = store_.read([&](const store::View& v) {
            if (!v.find<UserAccount>(user_id))
                throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");
            const Review* review = v.find<Review>(review_id);
            if (!review)
                throw Error(ErrorCode::UnknownReview, "review " + std::to_string(review_id) + " does not exist");
            if (review->user_id != user_id)
                throw Error(ErrorCode::NotOwner, "review belongs to another user");
            for (Id txn : v.ledger_of_user(user_id)) {
                const auto& c = *v.find<CoinTransaction>(txn);
                if (c.reason != CoinReason::review_earn)
                    continue;
                const Review* rewarded = v.find<Review>(c.ref_id);
                if (c.ref_id == review_id || (rewarded && rewarded->movie_id == review->movie_id))
                    throw Error(ErrorCode::AlreadyRewarded, "review coins already granted for this movie");
            }
            return v.ledger_version(user_id);
        });
        CoinTransaction txn{0, user_id, policy_.review_earn, CoinReason::review_earn, review_id, now};
        txn.txn_id =
            store_.transact({store::ExpectLedger{user_id, ledger_version}, store::Insert{txn, std::nullopt}}).ids.at(1);
        return txn;
    });
}

PostedReview BookingEngine::post_review(Id user_id, Id movie_id, int rating, std::string text,
                                        const SentimentScore& sentiment, Timestamp now)
{
    if (rating < 1 || rating > 5)
        throw Error(ErrorCode::BadRequest, "rating must be between 1 and 5");

    std::lock_guard lock(user_mutex(user_id));
    return with_retry([&] {
        const std::uint64_t ledger_version = store_.read([&](const store::View& v) {
            if (!v.find<UserAccount>(user_id))
                throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user_id) + " does not exist");
            if (!v.find<Movie>(movie_id))
                throw Error(ErrorCode::UnknownMovie, "movie " + std::to_string(movie_id) + " does not exist");
            if (v.review_by(user_id, movie_id))
                throw Error(ErrorCode::DuplicateReview, "user already reviewed this movie");
            return v.ledger_version(user_id);
        });

        PostedReview posted;
        posted.review = Review{0, user_id, movie_id, rating, text, sentiment, now};
        posted.reward = CoinTransaction{0, user_id, policy_.review_earn, CoinReason::review_earn, 0, now};

        std::vector<store::Mutation> ops;
        ops.push_back(store::ExpectLedger{user_id, ledger_version});
        ops.push_back(store::Insert{posted.review, std::nullopt});
        ops.push_back(store::Insert{posted.reward, std::size_t{1}});
        const auto ids = store_.transact(std::move(ops)).ids;
        posted.review.review_id = ids.at(1);
        posted.reward.txn_id = ids.at(2);
        posted.reward.ref_id = posted.review.review_id;
        return posted;
    });
}

} // namespace stageseat::booking
