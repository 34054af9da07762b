#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spamdet/date.hpp"

namespace spamdet {

constexpr int kLabelGenuine = 0;
constexpr int kLabelSpam = 1;

/// One account's metadata. Only the fields any downstream formula consumes
/// are typed; everything else in an input line is accepted and ignored.
struct UserRecord {
    std::string id;
    std::string user_name;
    std::string screen_name;
    std::int64_t statuses_count = 0;
    std::int64_t followers_count = 0;
    std::int64_t friends_count = 0;
    std::int64_t favourites_count = 0;
    bool verified = false;
    bool geo_enabled = false;
    bool profile_use_background_image = false;
    bool profile_background_tile = false;
    bool default_profile = false;
    std::string description;
    CivilDate created_at;
    std::optional<int> label;  // 0 = genuine, 1 = spam

    bool operator==(const UserRecord&) const = default;
};

/// user id -> ordered tweet texts. std::map keeps iteration deterministic.
using TweetCorpus = std::map<std::string, std::vector<std::string>>;

struct SpamLexicon {
    std::set<std::string> unigrams;
    std::set<std::pair<std::string, std::string>> bigrams;

    bool operator==(const SpamLexicon&) const = default;
};

struct Dataset {
    std::vector<UserRecord> users;
    TweetCorpus tweets;
    std::vector<std::pair<std::string, std::string>> edges;  // (follower, followed)
    CivilDate snapshot_date;
    SpamLexicon lexicon;

    bool operator==(const Dataset&) const = default;
};

struct ValidationIssue {
    enum class Kind {
        LabeledUserNotInGraph,  // informational: user has no edges
        UnknownTweetUser,       // blocking: tweets for an id with no UserRecord
    };
    Kind kind;
    std::string id;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::map<int, std::size_t> class_counts;

    bool accepted() const {
        for (const auto& issue : issues)
            if (issue.kind == ValidationIssue::Kind::UnknownTweetUser) return false;
        return true;
    }
};

/// Cross-file consistency check. Issues are reported, not thrown; the dataset
/// is accepted iff no tweet list belongs to an unknown user.
inline ValidationReport validate_dataset(const Dataset& d) {
    ValidationReport report;

    std::unordered_set<std::string> user_ids;
    user_ids.reserve(d.users.size());
    for (const auto& u : d.users) user_ids.insert(u.id);

    std::unordered_set<std::string> graph_ids;
    graph_ids.reserve(d.edges.size() * 2);
    for (const auto& [follower, followed] : d.edges) {
        graph_ids.insert(follower);
        graph_ids.insert(followed);
    }

    for (const auto& u : d.users) {
        if (u.label.has_value()) {
            ++report.class_counts[*u.label];
            if (!graph_ids.contains(u.id)) {
                report.issues.push_back(
                    {ValidationIssue::Kind::LabeledUserNotInGraph, u.id});
            }
        }
    }
    for (const auto& [id, tweets] : d.tweets) {
        (void)tweets;
        if (!user_ids.contains(id)) {
            report.issues.push_back({ValidationIssue::Kind::UnknownTweetUser, id});
        }
    }
    return report;
}

}  // namespace spamdet
