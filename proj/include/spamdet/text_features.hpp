#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spamdet/dataset.hpp"
#include "spamdet/numeric.hpp"
#include "spamdet/unicode.hpp"

namespace spamdet {

/// Lowercases, splits on Unicode whitespace, strips leading/trailing
/// punctuation (a leading '#' or '@' survives), and drops URLs.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    const auto cps = utf8_decode(text);

    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_unicode_space(cps[i])) ++i;
        std::size_t start = i;
        while (i < cps.size() && !is_unicode_space(cps[i])) ++i;
        if (start == i) continue;

        std::vector<char32_t> tok(cps.begin() + start, cps.begin() + i);
        for (char32_t& cp : tok) cp = ascii_lower(cp);

        std::string raw = utf8_encode(tok);
        if (raw.starts_with("http://") || raw.starts_with("https://")) continue;

        std::size_t lo = 0, hi = tok.size();
        while (lo < hi && is_ascii_punct(tok[lo]) && tok[lo] != U'#' && tok[lo] != U'@') ++lo;
        while (hi > lo && is_ascii_punct(tok[hi - 1])) {
            if (hi - 1 == lo && (tok[lo] == U'#' || tok[lo] == U'@')) break;
            --hi;
        }
        if (lo >= hi) continue;
        tokens.push_back(utf8_encode({tok.begin() + lo, tok.begin() + hi}));
    }
    return tokens;
}

inline bool is_marker_token(std::string_view tok) {
    return !tok.empty() && (tok[0] == '#' || tok[0] == '@');
}

/// A marker that actually counts: '#'/'@' followed by one or more word
/// characters and nothing else.
inline bool is_countable_marker(std::string_view tok) {
    if (tok.size() < 2 || (tok[0] != '#' && tok[0] != '@')) return false;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        if (!is_word_char(static_cast<char32_t>(static_cast<unsigned char>(tok[i])))) return false;
    }
    return true;
}

namespace detail {

/// Per-tweet token lists with hashtag/mention tokens removed; the stream the
/// similarity, diversity, and spam-frequency features all consume.
inline std::vector<std::vector<std::string>> text_token_docs(
    const std::vector<std::string>& tweets) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(tweets.size());
    for (const auto& tweet : tweets) {
        std::vector<std::string> doc;
        for (auto& tok : tokenize(tweet))
            if (!is_marker_token(tok)) doc.push_back(std::move(tok));
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace detail

/// tf-idf with smoothed idf: ln((1+N)/(1+df)) + 1.
struct TfIdfModel {
    std::map<std::string, std::size_t> vocabulary;  // token -> column
    std::vector<double> idf;
};

inline TfIdfModel fit_tfidf(const std::vector<std::vector<std::string>>& docs) {
    TfIdfModel model;
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::set<std::string_view> uniq(doc.begin(), doc.end());
        for (const auto& tok : uniq) ++df[std::string(tok)];
    }
    const double n = static_cast<double>(docs.size());
    model.idf.reserve(df.size());
    for (const auto& [tok, count] : df) {
        model.vocabulary.emplace(tok, model.vocabulary.size());
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return model;
}

/// Sparse tf-idf row (sorted by column), L2-normalized unless empty.
inline std::vector<std::pair<std::size_t, double>> tfidf_row(const TfIdfModel& model,
                                                             const std::vector<std::string>& doc) {
    std::map<std::size_t, double> counts;
    for (const auto& tok : doc) {
        const auto it = model.vocabulary.find(tok);
        if (it != model.vocabulary.end()) counts[it->second] += 1.0;
    }
    std::vector<std::pair<std::size_t, double>> row(counts.begin(), counts.end());
    double norm_sq = 0.0;
    for (auto& [col, v] : row) {
        v *= model.idf[col];
        norm_sq += v * v;
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [col, v] : row) v *= inv;
    }
    return row;
}

inline double sparse_dot(const std::vector<std::pair<std::size_t, double>>& a,
                         const std::vector<std::pair<std::size_t, double>>& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            s += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

constexpr std::size_t kTopSimilarityPairs = 200;

/// Mean of the 200 largest pairwise cosine similarities between a user's
/// tweets (all pairs when there are fewer). Each tweet is one document of a
/// per-user tf-idf fit; marker tokens are excluded. Fewer than two tweets
/// score 0.
inline double tweet_similarity(const std::vector<std::string>& tweets) {
    if (tweets.size() < 2) return 0.0;
    const auto docs = detail::text_token_docs(tweets);
    const TfIdfModel model = fit_tfidf(docs);

    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    rows.reserve(docs.size());
    for (const auto& doc : docs) rows.push_back(tfidf_row(model, doc));

    std::vector<double> sims;
    sims.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) sims.push_back(sparse_dot(rows[i], rows[j]));

    const std::size_t top = std::min(kTopSimilarityPairs, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(top), sims.end(),
                      std::greater<double>());
    double total = 0.0;
    for (std::size_t k = 0; k < top; ++k) total += sims[k];
    return top == 0 ? 0.0 : total / static_cast<double>(top);
}

/// Type-token ratio over the concatenated (marker-free) token stream.
inline double lexical_diversity(const std::vector<std::string>& tweets) {
    std::set<std::string_view> types;
    std::size_t tokens = 0;
    const auto docs = detail::text_token_docs(tweets);
    for (const auto& doc : docs) {
        tokens += doc.size();
        for (const auto& tok : doc) types.insert(tok);
    }
    if (tokens == 0) return 0.0;
    return static_cast<double>(types.size()) / static_cast<double>(tokens);
}

/// Totals of well-formed '#'/'@' markers across all tweets.
inline std::pair<std::int64_t, std::int64_t> count_markers(const std::vector<std::string>& tweets) {
    std::int64_t hashtags = 0, mentions = 0;
    for (const auto& tweet : tweets) {
        for (const auto& tok : tokenize(tweet)) {
            if (!is_countable_marker(tok)) continue;
            (tok[0] == '#' ? hashtags : mentions) += 1;
        }
    }
    return {hashtags, mentions};
}

/// Unigram hits over tokens and bigram hits over within-tweet adjacent pairs,
/// both as frequencies with guarded denominators.
inline std::pair<double, double> spam_word_freq(const std::vector<std::string>& tweets,
                                                const SpamLexicon& lexicon) {
    std::size_t tokens = 0, pairs = 0, unigram_hits = 0, bigram_hits = 0;
    const auto docs = detail::text_token_docs(tweets);
    for (const auto& doc : docs) {
        tokens += doc.size();
        if (!doc.empty()) pairs += doc.size() - 1;
        for (const auto& tok : doc)
            if (lexicon.unigrams.contains(tok)) ++unigram_hits;
        for (std::size_t i = 0; i + 1 < doc.size(); ++i)
            if (lexicon.bigrams.contains({doc[i], doc[i + 1]})) ++bigram_hits;
    }
    const double uf = static_cast<double>(unigram_hits) /
                      static_cast<double>(std::max<std::size_t>(tokens, 1));
    const double bf = static_cast<double>(bigram_hits) /
                      static_cast<double>(std::max<std::size_t>(pairs, 1));
    return {uf, bf};
}

struct TextFeatures {
    double tweet_similarity = 0.0;
    double lexical_diversity = 0.0;
    std::int64_t hashtag_count = 0;
    std::int64_t user_mention_count = 0;
    double unigram_spam_freq = 0.0;
    double bigram_spam_freq = 0.0;
};

inline TextFeatures compute_text_features(const std::vector<std::string>& tweets,
                                          const SpamLexicon& lexicon) {
    TextFeatures f;
    f.tweet_similarity = tweet_similarity(tweets);
    f.lexical_diversity = lexical_diversity(tweets);
    const auto [hashtags, mentions] = count_markers(tweets);
    f.hashtag_count = hashtags;
    f.user_mention_count = mentions;
    const auto [uf, bf] = spam_word_freq(tweets, lexicon);
    f.unigram_spam_freq = uf;
    f.bigram_spam_freq = bf;
    return f;
}

}  // namespace spamdet
