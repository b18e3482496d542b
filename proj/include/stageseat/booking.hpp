#pragma once

#include "stageseat/domain.hpp"
#include "stageseat/store.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

namespace stageseat::booking {

struct Quote {
    Money subtotal;
    std::int64_t max_redeemable_coins = 0;
    std::int64_t coins_redeemed = 0;
    Money discount;
    Money total;

    friend bool operator==(const Quote&, const Quote&) = default;
};

struct Refund {
    Id booking_id = 0;
    Money amount;
    std::int64_t coins_returned = 0;
    std::int64_t coins_revoked = 0;
};

/// Price for `n_seats` with as many of the requested coins as the policy
/// allows: at most the (non-negative) balance and at most redeem_cap_pct of
/// the subtotal, floored to whole coins. Over-requests are clamped.
Quote quote(const Show& show, int n_seats, std::int64_t coins_requested, std::int64_t user_balance,
            const Policy& policy);

struct PostedReview {
    Review review;
    CoinTransaction reward;
};

/// Seat inventory and the coin ledger.
///
/// Mutations of one show are serialized by a per-show mutex, ledger writes of
/// one user by a per-user mutex (always taken user first, then show). Each
/// operation reads committed state, decides, and commits one store
/// transaction guarded by the versions it read; a Conflict from a writer that
/// bypassed the locks (admin edits) is retried.
class BookingEngine {
public:
    BookingEngine(store::Store& store, Policy policy);

    [[nodiscard]] const Policy& policy() const { return policy_; }

    Show create_show(Id movie_id, Id venue_id, Timestamp starts_at, const Money& price_per_seat, Timestamp now);
    /// Replaces movie, venue, start time and price; the sold set is kept.
    Show update_show(const Show& show, Timestamp now);
    void delete_show(Id show_id);

    Quote quote_for(Id user_id, Id show_id, int n_seats, std::int64_t coins_requested) const;

    Booking book_seats(Id user_id, Id show_id, const SeatSet& seats, std::int64_t coins_requested, Timestamp now);

    /// `acting_user_id` must own the booking unless `acting_as_admin`.
    Refund cancel_booking(Id acting_user_id, Id booking_id, Timestamp now, bool acting_as_admin = false);

    std::int64_t coin_balance(Id user_id) const;

    /// Rewards a review that was stored without its coins. At most one reward
    /// per (user, movie).
    CoinTransaction earn_review_coins(Id user_id, Id review_id, Timestamp now);

    /// Stores the review and its coin reward in one transaction.
    PostedReview post_review(Id user_id, Id movie_id, int rating, std::string text, const SentimentScore& sentiment,
                             Timestamp now);

private:
    std::mutex& show_mutex(Id show_id);
    std::mutex& user_mutex(Id user_id);

    template <class F>
    auto with_retry(F&& attempt);

    store::Store& store_;
    Policy policy_;

    std::mutex locks_guard_;
    std::unordered_map<Id, std::unique_ptr<std::mutex>> show_locks_;
    std::unordered_map<Id, std::unique_ptr<std::mutex>> user_locks_;
};

} // namespace stageseat::booking
