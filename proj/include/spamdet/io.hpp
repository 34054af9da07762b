#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spamdet/dataset.hpp"
#include "spamdet/error.hpp"
#include "spamdet/unicode.hpp"

namespace spamdet {

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    return out;
}

inline std::int64_t read_count(const nlohmann::json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key)) return 0;
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw MalformedLineError(line_no, std::string(key) + " is not an integer");
    const std::int64_t n = v.get<std::int64_t>();
    if (n < 0) throw MalformedLineError(line_no, std::string(key) + " is negative");
    return n;
}

inline bool read_flag(const nlohmann::json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key)) return false;
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw MalformedLineError(line_no, std::string(key) + " is not a boolean");
    return v.get<bool>();
}

inline std::string read_string(const nlohmann::json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key)) return {};
    const auto& v = j.at(key);
    if (!v.is_string()) throw MalformedLineError(line_no, std::string(key) + " is not a string");
    return v.get<std::string>();
}

}  // namespace detail

/// users.jsonl: one JSON object per line. Unknown keys are ignored; missing
/// booleans default to false, counts to 0, strings to "".
inline std::vector<UserRecord> parse_users_file(const std::string& path,
                                                const CivilDate& snapshot_date) {
    auto in = detail::open_input(path);
    std::vector<UserRecord> users;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedLineError(line_no, "not a JSON object");

        UserRecord u;
        u.id = detail::read_string(j, "id", line_no);
        if (u.id.empty()) throw MalformedLineError(line_no, "missing or empty id");
        if (!seen.insert(u.id).second) throw DuplicateIdError(u.id);

        u.user_name = detail::read_string(j, "user_name", line_no);
        u.screen_name = detail::read_string(j, "screen_name", line_no);
        u.statuses_count = detail::read_count(j, "statuses_count", line_no);
        u.followers_count = detail::read_count(j, "followers_count", line_no);
        u.friends_count = detail::read_count(j, "friends_count", line_no);
        u.favourites_count = detail::read_count(j, "favourites_count", line_no);
        u.verified = detail::read_flag(j, "verified", line_no);
        u.geo_enabled = detail::read_flag(j, "geo_enabled", line_no);
        u.profile_use_background_image =
            detail::read_flag(j, "profile_use_background_image", line_no);
        u.profile_background_tile = detail::read_flag(j, "profile_background_tile", line_no);
        u.default_profile = detail::read_flag(j, "default_profile", line_no);
        u.description = detail::read_string(j, "description", line_no);

        const std::string created = detail::read_string(j, "created_at", line_no);
        const auto date = parse_date(created);
        if (!date) throw InvalidDateError(u.id, "unparseable value '" + created + "'");
        if (*date > snapshot_date)
            throw InvalidDateError(u.id, created + " is after the snapshot date");
        u.created_at = *date;

        if (j.contains("label") && !j.at("label").is_null()) {
            const auto& v = j.at("label");
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
                throw MalformedLineError(line_no, "label must be 0 or 1");
            u.label = v.get<int>();
        }
        users.push_back(std::move(u));
    }
    return users;
}

/// edges.tsv: `follower<TAB>followed` per line; `#` lines are comments.
/// Duplicates collapse to the first occurrence; self-loops are rejected.
inline std::vector<std::pair<std::string, std::string>> parse_edges_file(
    const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<std::pair<std::string, std::string>> edges;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw MalformedLineError(line_no, "expected ID1<TAB>ID2");
        if (line.find('\t', tab + 1) != std::string::npos)
            throw MalformedLineError(line_no, "too many fields");
        std::string follower = line.substr(0, tab);
        std::string followed = line.substr(tab + 1);
        if (follower == followed) throw SelfLoopError(follower, line_no);
        std::string key = follower + '\t' + followed;
        if (!seen.insert(std::move(key)).second) continue;
        edges.emplace_back(std::move(follower), std::move(followed));
    }
    return edges;
}

/// tweets.jsonl: {"user_id": ..., "tweets": [...]} per line. Repeated lines
/// for one user concatenate in file order. Extra keys (retweet counts and the
/// like) are ignored.
inline TweetCorpus parse_tweets_file(const std::string& path) {
    auto in = detail::open_input(path);
    TweetCorpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedLineError(line_no, "not a JSON object");
        if (!j.contains("user_id") || !j.at("user_id").is_string())
            throw MalformedLineError(line_no, "missing user_id");
        if (!j.contains("tweets") || !j.at("tweets").is_array())
            throw MalformedLineError(line_no, "missing tweets array");
        auto& list = corpus[j.at("user_id").get<std::string>()];
        for (const auto& t : j.at("tweets")) {
            if (!t.is_string()) throw MalformedLineError(line_no, "tweet is not a string");
            list.push_back(t.get<std::string>());
        }
    }
    return corpus;
}

/// lexicon.txt: one lowercase entry per line; two space-separated tokens make
/// a bigram, one token a unigram.
inline SpamLexicon parse_lexicon_file(const std::string& path) {
    auto in = detail::open_input(path);
    SpamLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a)) continue;  // blank line
        if (ss >> b) {
            if (ss >> extra) throw MalformedLineError(line_no, "more than two tokens");
            lex.bigrams.emplace(ascii_lower_copy(a), ascii_lower_copy(b));
        } else {
            lex.unigrams.insert(ascii_lower_copy(a));
        }
    }
    return lex;
}

/// labels.csv: header `id,label`, one row per user.
inline std::map<std::string, int> parse_labels_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::map<std::string, int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "id,label") continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
            throw MalformedLineError(line_no, "expected id,label");
        const std::string value = line.substr(comma + 1);
        if (value != "0" && value != "1")
            throw MalformedLineError(line_no, "label must be 0 or 1");
        labels[line.substr(0, comma)] = value == "1" ? 1 : 0;
    }
    return labels;
}

// ---- writers (canonical forms; reparsing yields the identical dataset) ----

inline nlohmann::ordered_json user_to_json(const UserRecord& u) {
    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["user_name"] = u.user_name;
    j["screen_name"] = u.screen_name;
    j["statuses_count"] = u.statuses_count;
    j["followers_count"] = u.followers_count;
    j["friends_count"] = u.friends_count;
    j["favourites_count"] = u.favourites_count;
    j["verified"] = u.verified;
    j["geo_enabled"] = u.geo_enabled;
    j["profile_use_background_image"] = u.profile_use_background_image;
    j["profile_background_tile"] = u.profile_background_tile;
    j["default_profile"] = u.default_profile;
    j["description"] = u.description;
    j["created_at"] = format_date(u.created_at);
    if (u.label) j["label"] = *u.label;
    return j;
}

inline void write_users_file(const std::string& path, const std::vector<UserRecord>& users) {
    auto out = detail::open_output(path);
    for (const auto& u : users) out << user_to_json(u).dump() << '\n';
}

inline void write_tweets_file(const std::string& path, const TweetCorpus& corpus) {
    auto out = detail::open_output(path);
    for (const auto& [id, tweets] : corpus) {
        nlohmann::ordered_json j;
        j["user_id"] = id;
        j["tweets"] = tweets;
        out << j.dump() << '\n';
    }
}

inline void write_edges_file(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& edges) {
    auto out = detail::open_output(path);
    for (const auto& [follower, followed] : edges) out << follower << '\t' << followed << '\n';
}

inline void write_lexicon_file(const std::string& path, const SpamLexicon& lex) {
    auto out = detail::open_output(path);
    for (const auto& u : lex.unigrams) out << u << '\n';
    for (const auto& [a, b] : lex.bigrams) out << a << ' ' << b << '\n';
}

inline void write_labels_csv(const std::string& path, const std::vector<UserRecord>& users) {
    auto out = detail::open_output(path);
    out << "id,label\n";
    for (const auto& u : users)
        if (u.label) out << u.id << ',' << *u.label << '\n';
}

struct DatasetPaths {
    std::string users;
    std::string tweets;
    std::string edges;
    std::string lexicon;
    std::string labels;  // optional; empty to skip
};

inline Dataset load_dataset(const DatasetPaths& paths, const CivilDate& snapshot_date) {
    Dataset d;
    d.snapshot_date = snapshot_date;
    d.users = parse_users_file(paths.users, snapshot_date);
    d.tweets = parse_tweets_file(paths.tweets);
    d.edges = parse_edges_file(paths.edges);
    d.lexicon = parse_lexicon_file(paths.lexicon);
    if (!paths.labels.empty()) {
        const auto labels = parse_labels_csv(paths.labels);
        for (auto& u : d.users) {
            if (!u.label) {
                const auto it = labels.find(u.id);
                if (it != labels.end()) u.label = it->second;
            }
        }
    }
    return d;
}

inline void write_dataset(const DatasetPaths& paths, const Dataset& d) {
    write_users_file(paths.users, d.users);
    write_tweets_file(paths.tweets, d.tweets);
    write_edges_file(paths.edges, d.edges);
    write_lexicon_file(paths.lexicon, d.lexicon);
    if (!paths.labels.empty()) write_labels_csv(paths.labels, d.users);
}

}  // namespace spamdet
