#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spamdet/dataset.hpp"
#include "spamdet/date.hpp"
#include "spamdet/error.hpp"
#include "spamdet/unicode.hpp"

namespace spamdet {

/// friends / followers, with the zero-follower case guarded so brand-new
/// accounts stay in the table.
inline double ff_ratio(std::int64_t friends_count, std::int64_t followers_count) {
    return static_cast<double>(friends_count) /
           static_cast<double>(std::max<std::int64_t>(followers_count, 1));
}

namespace detail {

struct RoBlock {
    std::size_t a_start = 0;
    std::size_t b_start = 0;
    std::size_t size = 0;
};

// Longest common contiguous block between a[alo,ahi) and b[blo,bhi).
// Ties resolve to the leftmost block in a, then in b.
inline RoBlock ro_longest_block(std::string_view a, std::string_view b, std::size_t alo,
                                std::size_t ahi, std::size_t blo, std::size_t bhi) {
    RoBlock best;
    const std::size_t bw = bhi - blo;
    std::vector<std::size_t> prev(bw + 1, 0), cur(bw + 1, 0);
    for (std::size_t i = alo; i < ahi; ++i) {
        for (std::size_t j = blo; j < bhi; ++j) {
            if (a[i] == b[j]) {
                const std::size_t k = prev[j - blo] + 1;
                cur[j - blo + 1] = k;
                if (k > best.size) {
                    best.size = k;
                    best.a_start = i + 1 - k;
                    best.b_start = j + 1 - k;
                }
            } else {
                cur[j - blo + 1] = 0;
            }
        }
        std::swap(prev, cur);
        std::fill(cur.begin(), cur.end(), 0);
    }
    return best;
}

inline std::size_t ro_matches(std::string_view a, std::string_view b, std::size_t alo,
                              std::size_t ahi, std::size_t blo, std::size_t bhi) {
    if (alo >= ahi || blo >= bhi) return 0;
    const RoBlock block = ro_longest_block(a, b, alo, ahi, blo, bhi);
    if (block.size == 0) return 0;
    return block.size + ro_matches(a, b, alo, block.a_start, blo, block.b_start) +
           ro_matches(a, b, block.a_start + block.size, ahi, block.b_start + block.size, bhi);
}

}  // namespace detail

/// Ratcliff-Obershelp gestalt ratio 2M/T: the longest common contiguous block
/// is found recursively on both flanks; M is the total matched characters and
/// T the combined length. Inputs are lowercased first. Tie-broken block
/// choices make the raw recursion order-sensitive, so both argument orders
/// are evaluated and the larger ratio wins; the measure is symmetric.
inline double name_similarity(std::string_view user_name, std::string_view screen_name) {
    const std::string a = ascii_lower_copy(user_name);
    const std::string b = ascii_lower_copy(screen_name);
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const std::size_t m_ab = detail::ro_matches(a, b, 0, a.size(), 0, b.size());
    const std::size_t m_ba = detail::ro_matches(b, a, 0, b.size(), 0, a.size());
    return 2.0 * static_cast<double>(std::max(m_ab, m_ba)) /
           static_cast<double>(a.size() + b.size());
}

/// Calendar-day age at the snapshot; same-day accounts count as one day so
/// the activity ratio stays finite.
inline std::int64_t account_age_days(const CivilDate& created_at, const CivilDate& snapshot_date) {
    if (created_at > snapshot_date) throw FutureCreationError();
    return std::max<std::int64_t>(days_between(created_at, snapshot_date), 1);
}

inline double activity_ratio(std::int64_t statuses_count, std::int64_t age_days) {
    return static_cast<double>(statuses_count) /
           static_cast<double>(std::max<std::int64_t>(age_days, 1));
}

inline double fav_status_ratio(std::int64_t favourites_count, std::int64_t statuses_count) {
    return static_cast<double>(favourites_count) /
           static_cast<double>(std::max<std::int64_t>(statuses_count, 1));
}

/// Shannon entropy (bits) of the description's Unicode-scalar frequency
/// distribution, divided by its character length. Empty text scores 0.
inline double entropy_per_length(std::string_view description) {
    const auto cps = utf8_decode(description);
    if (cps.empty()) return 0.0;
    std::map<char32_t, std::size_t> freq;
    for (char32_t cp : cps) ++freq[cp];
    const double n = static_cast<double>(cps.size());
    double entropy = 0.0;
    for (const auto& [cp, count] : freq) {
        (void)cp;
        const double p = static_cast<double>(count) / n;
        entropy -= p * std::log2(p);
    }
    return entropy / n;
}

struct MetadataFeatures {
    double ff_ratio = 0.0;
    double name_similarity = 0.0;
    std::int64_t account_age_days = 1;
    double activity_ratio = 0.0;
    double fav_status_ratio = 0.0;
    double entropy_per_length = 0.0;
};

inline MetadataFeatures compute_metadata_features(const UserRecord& u,
                                                  const CivilDate& snapshot_date) {
    MetadataFeatures f;
    f.ff_ratio = ff_ratio(u.friends_count, u.followers_count);
    f.name_similarity = name_similarity(u.user_name, u.screen_name);
    f.account_age_days = account_age_days(u.created_at, snapshot_date);
    f.activity_ratio = activity_ratio(u.statuses_count, f.account_age_days);
    f.fav_status_ratio = fav_status_ratio(u.favourites_count, u.statuses_count);
    f.entropy_per_length = entropy_per_length(u.description);
    return f;
}

}  // namespace spamdet
