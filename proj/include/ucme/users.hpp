#pragma once

// Scripted artificial users: each ranks alternatives by a fixed heuristic over
// the two BCs. U9..U12 switch heuristic after the fifth selection.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "ucme/error.hpp"
#include "ucme/evaluation.hpp"

namespace ucme {

enum class UserId { U1 = 1, U2, U3, U4, U5, U6, U7, U8, U9, U10, U11, U12 };

inline constexpr std::array<UserId, 12> kAllUsers{UserId::U1, UserId::U2, UserId::U3,  UserId::U4,
                                                  UserId::U5, UserId::U6, UserId::U7,  UserId::U8,
                                                  UserId::U9, UserId::U10, UserId::U11, UserId::U12};

/// Selections up to and including this index use the first heuristic of a shifting user.
inline constexpr std::size_t kTasteShiftAfter = 5;

inline std::string to_string(UserId u) { return "U" + std::to_string(static_cast<int>(u)); }

inline std::optional<UserId> parse_user(std::string_view name) {
    for (UserId u : kAllUsers) {
        if (to_string(u) == name) return u;
    }
    return std::nullopt;
}

/// User selection criterion of `user` at selection index `s` (1-based).
inline double usc(UserId user, Bc bc, std::size_t s) {
    const double c = bc.x;
    const double o = bc.y;
    const bool early = s <= kTasteShiftAfter;
    switch (user) {
    case UserId::U1: return c;
    case UserId::U2: return o;
    case UserId::U3: return 0.5 * (c + o);
    case UserId::U4: return std::max(c, o);
    case UserId::U5: return 1.0 - c;
    case UserId::U6: return 1.0 - o;
    case UserId::U7: return 1.0 - 0.5 * (c + o);
    case UserId::U8: return 1.0 - std::max(c, o);
    case UserId::U9: return early ? c : 1.0 - c;
    case UserId::U10: return early ? o : 1.0 - o;
    case UserId::U11: return early ? c : o;
    case UserId::U12: return early ? o : c;
    }
    return 0.0;
}

/// Index of the alternative with the highest USC; the first one wins ties.
inline std::size_t choose(UserId user, std::span<const Bc> alternatives, std::size_t s) {
    if (alternatives.empty()) throw ProtocolError("choose: no alternatives");
    std::size_t best = 0;
    double best_score = usc(user, alternatives[0], s);
    for (std::size_t i = 1; i < alternatives.size(); ++i) {
        const double score = usc(user, alternatives[i], s);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

} // namespace ucme
