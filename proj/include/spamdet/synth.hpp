#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spamdet/dataset.hpp"
#include "spamdet/date.hpp"
#include "spamdet/error.hpp"
#include "spamdet/io.hpp"
#include "spamdet/rng.hpp"

namespace spamdet {

struct SynthConfig {
    int n_genuine = 1500;
    int n_spam = 500;
    int tweets_min = 3;
    int tweets_max = 12;
    int spam_community_count = 5;
    double intra_spam_edge_prob = 0.25;
    double cross_edge_prob = 0.002;
    double genuine_edge_prob = 0.005;
    int spam_template_count = 4;
    int vocab_size = 400;
    bool planted_effects = true;
    std::uint64_t seed = 42;
    CivilDate snapshot_date{2020, 5, 1};

    void validate() const {
        if (n_genuine < 0 || n_spam < 0 || n_genuine + n_spam < 10)
            throw ConfigInvalidError("synth: need at least 10 users");
        if (tweets_min < 0 || tweets_max < tweets_min)
            throw ConfigInvalidError("synth: bad tweets_per_user range");
        if (spam_community_count < 1)
            throw ConfigInvalidError("synth: spam_community_count must be >= 1");
        for (const double p : {intra_spam_edge_prob, cross_edge_prob, genuine_edge_prob})
            if (p < 0.0 || p > 1.0) throw ConfigInvalidError("synth: probabilities must be in [0,1]");
        if (spam_template_count < 1)
            throw ConfigInvalidError("synth: spam_template_count must be >= 1");
        if (vocab_size < 10) throw ConfigInvalidError("synth: vocab_size must be >= 10");
    }
};

/// Small illustrative spam n-gram list; any user-provided lexicon file works
/// in its place.
inline SpamLexicon default_spam_lexicon() {
    SpamLexicon lex;
    for (const char* w :
         {"buy",    "cheap",  "free",     "click",   "win",      "winner", "discount",
          "offer",  "deal",   "promo",    "sale",    "bonus",    "cash",   "earn",
          "prize",  "viagra", "followers", "gain",   "unlock",   "subscribe"}) {
        lex.unigrams.insert(w);
    }
    for (const auto& [a, b] : std::vector<std::pair<const char*, const char*>>{
             {"click", "here"},
             {"buy", "now"},
             {"follow", "me"},
             {"limited", "offer"},
             {"act", "now"},
             {"free", "followers"},
             {"visit", "link"},
             {"sign", "up"}}) {
        lex.bigrams.emplace(a, b);
    }
    return lex;
}

namespace detail {

constexpr std::uint64_t kSynthUserTag = 0x75736572;
constexpr std::uint64_t kSynthTweetTag = 0x74777474;
constexpr std::uint64_t kSynthEdgeTag = 0x65646765;
constexpr std::uint64_t kSynthFixTag = 0x66697861;

inline std::string synth_word(std::size_t index) {
    static constexpr const char* syllables[] = {"ka", "ri", "to", "ne", "lu", "mi", "sa", "vo",
                                                "de", "pa", "che", "ron", "bel", "tu", "gra",
                                                "lin", "mo", "fi", "zen", "qu"};
    constexpr std::size_t n = sizeof(syllables) / sizeof(syllables[0]);
    std::string word;
    std::size_t x = index + 7;
    do {
        word += syllables[x % n];
        x /= n;
    } while (x > 0);
    return word;
}

// Skewed vocabulary draw (common words much more likely).
inline std::size_t zipfish_index(Rng& rng, std::size_t vocab) {
    const double u = rng.next_double();
    return static_cast<std::size_t>(u * u * static_cast<double>(vocab)) % vocab;
}

inline std::string synth_name(Rng& rng) {
    std::string name = synth_word(rng.next_index(4000));
    name += synth_word(rng.next_index(4000));
    return name;
}

}  // namespace detail

/// Deterministic synthetic dataset with a planted spam signal: spam accounts
/// get young ages, lopsided friend/follower counts, near-duplicate templated
/// tweets stuffed with lexicon n-grams and markers, and dense follow edges
/// inside their communities. With planted_effects off, both classes are
/// drawn from the genuine process and only the labels differ (no signal).
inline Dataset generate_synth_dataset(const SynthConfig& cfg) {
    cfg.validate();
    Dataset d;
    d.snapshot_date = cfg.snapshot_date;
    d.lexicon = default_spam_lexicon();

    const std::size_t total = static_cast<std::size_t>(cfg.n_genuine + cfg.n_spam);
    std::vector<std::string> ids(total);
    for (int i = 0; i < cfg.n_genuine; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "g%05d", i);
        ids[static_cast<std::size_t>(i)] = buf;
    }
    for (int i = 0; i < cfg.n_spam; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "s%05d", i);
        ids[static_cast<std::size_t>(cfg.n_genuine + i)] = buf;
    }
    const auto is_spam_row = [&](std::size_t row) {
        return row >= static_cast<std::size_t>(cfg.n_genuine);
    };

    // Communities get unequal sizes (weight c+2) so the densest one clearly
    // dominates the graph spectrum and power iteration settles quickly.
    std::vector<std::size_t> spam_comm(static_cast<std::size_t>(std::max(cfg.n_spam, 0)));
    {
        const std::size_t k = static_cast<std::size_t>(cfg.spam_community_count);
        const double total_weight = static_cast<double>(k * (k + 3)) / 2.0;
        std::size_t start = 0;
        double prefix = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            prefix += static_cast<double>(c + 2);
            const std::size_t end =
                c + 1 == k ? spam_comm.size()
                           : static_cast<std::size_t>(static_cast<double>(spam_comm.size()) *
                                                      prefix / total_weight);
            for (std::size_t s = start; s < end && s < spam_comm.size(); ++s) spam_comm[s] = c;
            start = end;
        }
    }
    const auto spam_community = [&](std::size_t row) {
        return spam_comm[row - static_cast<std::size_t>(cfg.n_genuine)];
    };

    // spam tweet templates, built from lexicon words plus filler
    std::vector<std::vector<std::string>> templates;
    {
        const std::vector<std::string> unigrams(d.lexicon.unigrams.begin(),
                                                d.lexicon.unigrams.end());
        const std::vector<std::pair<std::string, std::string>> bigrams(d.lexicon.bigrams.begin(),
                                                                       d.lexicon.bigrams.end());
        Rng rng(derive_seed(cfg.seed, detail::kSynthTweetTag, 0xbeef));
        for (int t = 0; t < cfg.spam_template_count; ++t) {
            std::vector<std::string> tpl;
            const auto& big = bigrams[rng.next_index(bigrams.size())];
            tpl.push_back(big.first);
            tpl.push_back(big.second);
            for (int w = 0; w < 5; ++w) {
                if (rng.bernoulli(0.5)) {
                    tpl.push_back(unigrams[rng.next_index(unigrams.size())]);
                } else {
                    tpl.push_back(detail::synth_word(
                        detail::zipfish_index(rng, static_cast<std::size_t>(cfg.vocab_size))));
                }
            }
            templates.push_back(std::move(tpl));
        }
    }

    // users + tweets
    for (std::size_t row = 0; row < total; ++row) {
        const bool spam_process = cfg.planted_effects && is_spam_row(row);
        Rng rng(derive_seed(cfg.seed, detail::kSynthUserTag, row));

        UserRecord u;
        u.id = ids[row];
        u.label = is_spam_row(row) ? kLabelSpam : kLabelGenuine;

        if (spam_process) {
            u.user_name = detail::synth_name(rng);
            u.screen_name = u.user_name + std::to_string(rng.next_index(100));
            const long long age = rng.next_int(10, 300);
            u.created_at = add_days(cfg.snapshot_date, -age);
            u.followers_count = static_cast<std::int64_t>(
                std::llround(std::exp(2.0 + 0.8 * rng.next_normal())));
            u.friends_count = static_cast<std::int64_t>(
                std::llround(static_cast<double>(u.followers_count + 1) *
                             (5.0 + 25.0 * rng.next_double()))) +
                20;
            u.statuses_count =
                static_cast<std::int64_t>(std::llround(static_cast<double>(age) *
                                                       (5.0 + 20.0 * rng.next_double())));
            u.favourites_count = static_cast<std::int64_t>(
                std::llround(static_cast<double>(u.statuses_count) * 0.2 * rng.next_double()));
            u.verified = false;
            u.geo_enabled = rng.bernoulli(0.05);
            u.profile_use_background_image = rng.bernoulli(0.30);
            u.profile_background_tile = rng.bernoulli(0.40);
            u.default_profile = rng.bernoulli(0.70);
            std::string desc = "follow me for ";
            for (int w = 0; w < 3; ++w) desc += "best best offers ";
            desc += std::to_string(rng.next_index(10));
            u.description = desc;
        } else {
            u.user_name = detail::synth_name(rng);
            u.screen_name = detail::synth_name(rng);
            const long long age = rng.next_int(400, 3600);
            u.created_at = add_days(cfg.snapshot_date, -age);
            u.followers_count = static_cast<std::int64_t>(
                std::llround(std::exp(4.5 + 1.2 * rng.next_normal())));
            u.friends_count = static_cast<std::int64_t>(
                std::llround(static_cast<double>(u.followers_count + 1) *
                             (0.3 + 1.2 * rng.next_double())));
            u.statuses_count =
                static_cast<std::int64_t>(std::llround(static_cast<double>(age) *
                                                       (0.2 + 2.8 * rng.next_double())));
            u.favourites_count = static_cast<std::int64_t>(
                std::llround(static_cast<double>(u.statuses_count) *
                             (0.3 + 1.7 * rng.next_double())));
            u.verified = rng.bernoulli(0.05);
            u.geo_enabled = rng.bernoulli(0.40);
            u.profile_use_background_image = rng.bernoulli(0.70);
            u.profile_background_tile = rng.bernoulli(0.10);
            u.default_profile = rng.bernoulli(0.30);
            std::string desc;
            const int words = static_cast<int>(rng.next_int(6, 14));
            for (int w = 0; w < words; ++w) {
                if (w) desc += ' ';
                desc += detail::synth_word(rng.next_index(6000));
            }
            u.description = desc;
        }
        d.users.push_back(std::move(u));

        // tweets
        Rng trng(derive_seed(cfg.seed, detail::kSynthTweetTag, row));
        const int n_tweets = static_cast<int>(trng.next_int(cfg.tweets_min, cfg.tweets_max));
        std::vector<std::string> tweets;
        tweets.reserve(static_cast<std::size_t>(n_tweets));
        for (int tw = 0; tw < n_tweets; ++tw) {
            std::string text;
            if (spam_process) {
                std::vector<std::string> words = templates[trng.next_index(templates.size())];
                if (trng.bernoulli(0.3))
                    words[trng.next_index(words.size())] = detail::synth_word(
                        detail::zipfish_index(trng, static_cast<std::size_t>(cfg.vocab_size)));
                if (trng.bernoulli(0.3))
                    words.push_back(detail::synth_word(
                        detail::zipfish_index(trng, static_cast<std::size_t>(cfg.vocab_size))));
                const int tags = static_cast<int>(trng.next_int(1, 3));
                for (int h = 0; h < tags; ++h)
                    words.push_back("#" + detail::synth_word(trng.next_index(40)));
                const int mentions = static_cast<int>(trng.next_int(0, 2));
                for (int mm = 0; mm < mentions; ++mm)
                    words.push_back("@" + detail::synth_word(trng.next_index(4000)));
                for (std::size_t w = 0; w < words.size(); ++w) {
                    if (w) text += ' ';
                    text += words[w];
                }
            } else {
                const int words = static_cast<int>(trng.next_int(5, 15));
                for (int w = 0; w < words; ++w) {
                    if (w) text += ' ';
                    if (trng.bernoulli(0.02)) {
                        // background rate of lexicon words in genuine chatter
                        auto it = d.lexicon.unigrams.begin();
                        std::advance(it, static_cast<long>(trng.next_index(d.lexicon.unigrams.size())));
                        text += *it;
                    } else {
                        text += detail::synth_word(
                            detail::zipfish_index(trng, static_cast<std::size_t>(cfg.vocab_size)));
                    }
                }
                if (trng.bernoulli(0.10)) text += " #" + detail::synth_word(trng.next_index(400));
                if (trng.bernoulli(0.08)) text += " @" + detail::synth_name(trng);
            }
            tweets.push_back(std::move(text));
        }
        d.tweets[ids[row]] = std::move(tweets);
    }

    // edges
    for (std::size_t u = 0; u < total; ++u) {
        Rng rng(derive_seed(cfg.seed, detail::kSynthEdgeTag, u));
        const bool spam_u = cfg.planted_effects && is_spam_row(u);
        for (std::size_t v = 0; v < total; ++v) {
            if (u == v) continue;
            double p;
            if (!cfg.planted_effects) {
                p = cfg.genuine_edge_prob;
            } else if (spam_u && is_spam_row(v)) {
                p = spam_community(u) == spam_community(v) ? cfg.intra_spam_edge_prob
                                                           : cfg.cross_edge_prob;
            } else if (spam_u) {
                p = cfg.cross_edge_prob;
            } else {
                p = cfg.genuine_edge_prob;
            }
            if (rng.bernoulli(p)) d.edges.emplace_back(ids[u], ids[v]);
        }
    }

    // every labeled user must appear in the graph; give stranded users one
    // follow edge
    {
        std::unordered_set<std::string> present;
        for (const auto& [a, b] : d.edges) {
            present.insert(a);
            present.insert(b);
        }
        Rng rng(derive_seed(cfg.seed, detail::kSynthFixTag, 0));
        for (std::size_t u = 0; u < total; ++u) {
            if (present.contains(ids[u])) continue;
            std::size_t v = rng.next_index(total);
            if (v == u) v = (v + 1) % total;
            d.edges.emplace_back(ids[u], ids[v]);
            present.insert(ids[u]);
        }
    }

    return d;
}

/// Generates and writes users.jsonl, tweets.jsonl, edges.tsv, labels.csv and
/// lexicon.txt. Identical config and seed reproduce the files byte for byte.
inline Dataset write_synth_dataset(const SynthConfig& cfg, const DatasetPaths& paths) {
    Dataset d = generate_synth_dataset(cfg);
    write_dataset(paths, d);
    return d;
}

}  // namespace spamdet
