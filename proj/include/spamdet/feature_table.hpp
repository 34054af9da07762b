#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "spamdet/centrality.hpp"
#include "spamdet/dataset.hpp"
#include "spamdet/error.hpp"
#include "spamdet/graph.hpp"
#include "spamdet/gbdt.hpp"
#include "spamdet/metadata_features.hpp"
#include "spamdet/node2vec.hpp"
#include "spamdet/numeric.hpp"
#include "spamdet/text_features.hpp"
#include "spamdet/treeshap.hpp"

namespace spamdet {

/// Canonical column order: metadata block, text block, centrality block,
/// then the raw metadata booleans and counts.
inline const std::vector<std::string>& feature_columns() {
    static const std::vector<std::string> columns = {
        "ff_ratio",
        "name_similarity",
        "account_age_days",
        "activity_ratio",
        "fav_status_ratio",
        "entropy_per_length",
        "tweet_similarity",
        "lexical_diversity",
        "hashtag_count",
        "user_mention_count",
        "unigram_spam_freq",
        "bigram_spam_freq",
        "degree_centrality",
        "betweenness_centrality",
        "in_eig_centrality",
        "out_eig_centrality",
        "pagerank_centrality",
        "verified",
        "geo_enabled",
        "profile_use_background_image",
        "profile_background_tile",
        "default_profile",
        "statuses_count",
        "followers_count",
        "friends_count",
        "favourites_count",
    };
    return columns;
}

/// The 16 features the selection settles on in faithful mode, in vector
/// order.
inline const std::vector<std::string>& paper_selected_features() {
    static const std::vector<std::string> names = {
        "favourites_count",
        "geo_enabled",
        "profile_use_background_image",
        "profile_background_tile",
        "verified",
        "lexical_diversity",
        "unigram_spam_freq",
        "tweet_similarity",
        "ff_ratio",
        "account_age_days",
        "name_similarity",
        "hashtag_count",
        "user_mention_count",
        "degree_centrality",
        "in_eig_centrality",
        "out_eig_centrality",
    };
    return names;
}

struct FeatureTable {
    std::vector<std::string> ids;      // row order
    std::vector<std::string> columns;  // canonical order
    Matrix values;
    std::vector<int> labels;  // empty, or one per row

    bool has_labels() const { return labels.size() == ids.size() && !ids.empty(); }

    std::size_t column_index(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw Error("unknown feature column: " + name);
        return static_cast<std::size_t>(it - columns.begin());
    }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(values.rows);
        for (std::size_t r = 0; r < values.rows; ++r) out[r] = values.at(r, c);
        return out;
    }
};

/// One row per labeled user, in users-file order. Booleans encode as 0/1.
inline FeatureTable build_feature_table(const Dataset& d, const SocialGraph& g,
                                        const CentralityTable& cent,
                                        const std::map<std::string, MetadataFeatures>& meta,
                                        const std::map<std::string, TextFeatures>& text) {
    FeatureTable t;
    t.columns = feature_columns();

    std::vector<const UserRecord*> labeled;
    for (const auto& u : d.users)
        if (u.label) labeled.push_back(&u);

    t.values = Matrix(labeled.size(), t.columns.size());
    t.ids.reserve(labeled.size());
    t.labels.reserve(labeled.size());

    for (std::size_t r = 0; r < labeled.size(); ++r) {
        const UserRecord& u = *labeled[r];
        const auto node = g.find(u.id);
        const auto mit = meta.find(u.id);
        const auto tit = text.find(u.id);
        if (!node || mit == meta.end() || tit == text.end()) throw MissingUserError(u.id);
        const MetadataFeatures& mf = mit->second;
        const TextFeatures& tf = tit->second;

        const double row[] = {
            mf.ff_ratio,
            mf.name_similarity,
            static_cast<double>(mf.account_age_days),
            mf.activity_ratio,
            mf.fav_status_ratio,
            mf.entropy_per_length,
            tf.tweet_similarity,
            tf.lexical_diversity,
            static_cast<double>(tf.hashtag_count),
            static_cast<double>(tf.user_mention_count),
            tf.unigram_spam_freq,
            tf.bigram_spam_freq,
            cent.degree[*node],
            cent.betweenness[*node],
            cent.in_eig[*node],
            cent.out_eig[*node],
            cent.pagerank[*node],
            u.verified ? 1.0 : 0.0,
            u.geo_enabled ? 1.0 : 0.0,
            u.profile_use_background_image ? 1.0 : 0.0,
            u.profile_background_tile ? 1.0 : 0.0,
            u.default_profile ? 1.0 : 0.0,
            static_cast<double>(u.statuses_count),
            static_cast<double>(u.followers_count),
            static_cast<double>(u.friends_count),
            static_cast<double>(u.favourites_count),
        };
        static_assert(sizeof(row) / sizeof(row[0]) == 26);
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (!std::isfinite(row[c]))
                throw Error("non-finite feature value for user " + u.id);
            t.values.at(r, c) = row[c];
        }
        t.ids.push_back(u.id);
        t.labels.push_back(*u.label);
    }
    return t;
}

// ---- CSV round trip (17 significant digits; bit-exact) ----

inline void write_feature_table_csv(const std::string& path, const FeatureTable& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    out << "id";
    for (const auto& c : t.columns) out << ',' << c;
    if (t.has_labels()) out << ",label";
    out << '\n';
    for (std::size_t r = 0; r < t.values.rows; ++r) {
        out << t.ids[r];
        for (std::size_t c = 0; c < t.values.cols; ++c) out << ',' << format_g17(t.values.at(r, c));
        if (t.has_labels()) out << ',' << t.labels[r];
        out << '\n';
    }
}

inline FeatureTable read_feature_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    FeatureTable t;
    std::string line;
    if (!std::getline(in, line)) throw MalformedLineError(1, "missing header");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) header.push_back(field);
    }
    if (header.empty() || header[0] != "id") throw MalformedLineError(1, "header must start with id");
    const bool labeled = !header.empty() && header.back() == "label";
    t.columns.assign(header.begin() + 1, labeled ? header.end() - 1 : header.end());

    std::vector<double> row_values;
    std::size_t line_no = 1;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',')) throw MalformedLineError(line_no, "missing id");
        t.ids.push_back(field);
        row_values.clear();
        while (std::getline(ss, field, ',')) {
            bool ok = false;
            row_values.push_back(parse_double(field, ok));
            if (!ok) throw MalformedLineError(line_no, "bad number '" + field + "'");
        }
        const std::size_t expected = t.columns.size() + (labeled ? 1 : 0);
        if (row_values.size() != expected) throw MalformedLineError(line_no, "wrong field count");
        if (labeled) {
            const double lv = row_values.back();
            if (lv != 0.0 && lv != 1.0) throw MalformedLineError(line_no, "label must be 0 or 1");
            t.labels.push_back(static_cast<int>(lv));
            row_values.pop_back();
        }
        rows.push_back(row_values);
    }
    t.values = Matrix(rows.size(), t.columns.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < t.columns.size(); ++c) t.values.at(r, c) = rows[r][c];
    return t;
}

// ---- selection ----

/// Sample Pearson r; a constant vector is degenerate and scores 0.
inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw LengthMismatchError();
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Features whose |r| against the label clears the threshold, strongest
/// first.
inline std::vector<std::string> correlation_select(const FeatureTable& t, double threshold = 0.1) {
    if (!t.has_labels()) throw NoLabelsError();
    std::vector<double> label_col(t.labels.begin(), t.labels.end());
    std::vector<std::pair<double, std::size_t>> scored;  // (-|r|, column)
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        const double r = pearson_correlation(t.column(c), label_col);
        if (std::abs(r) >= threshold) scored.emplace_back(-std::abs(r), c);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> names;
    names.reserve(scored.size());
    for (const auto& [neg_abs_r, c] : scored) names.push_back(t.columns[c]);
    return names;
}

/// Per-column mean |SHAP| of the model over all rows.
inline std::vector<double> mean_abs_shap(const GBDTModel& model, const FeatureTable& t) {
    std::vector<double> acc(t.columns.size(), 0.0);
    for (std::size_t r = 0; r < t.values.rows; ++r) {
        const ShapValues sv = tree_shap(model, t.values.row(r));
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += std::abs(sv.phi[c]);
    }
    for (double& v : acc) v /= static_cast<double>(std::max<std::size_t>(t.values.rows, 1));
    return acc;
}

/// Top-k features by mean |SHAP|, ties broken by column order.
inline std::vector<std::string> shap_select(const GBDTModel& model, const FeatureTable& t,
                                            int k = 15) {
    const std::vector<double> importance = mean_abs_shap(model, t);
    std::vector<std::size_t> order(importance.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return importance[a] > importance[b];
    });
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)),
                                                   order.size());
    std::vector<std::string> names;
    names.reserve(take);
    for (std::size_t i = 0; i < take; ++i) names.push_back(t.columns[order[i]]);
    return names;
}

struct SelectionReport {
    std::vector<std::string> columns;
    std::vector<double> mean_abs_shap;  // per column
    std::vector<double> pearson_r;      // per column
    std::vector<std::string> shap_set;         // S1
    std::vector<std::string> correlation_set;  // S2
    std::vector<std::string> selected;         // final (S1 n S2, or the fixed list)
    bool paper_faithful = false;
};

/// Runs both channels and intersects, keeping S1's order. When
/// `paper_faithful` is set the fixed 16-name list overrides the intersection
/// (both channels are still computed and reported).
inline SelectionReport select_features(const GBDTModel& model, const FeatureTable& t, int k,
                                       double threshold, bool paper_faithful) {
    SelectionReport report;
    report.columns = t.columns;
    report.mean_abs_shap = mean_abs_shap(model, t);

    std::vector<double> label_col(t.labels.begin(), t.labels.end());
    if (!t.has_labels()) throw NoLabelsError();
    report.pearson_r.reserve(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        report.pearson_r.push_back(pearson_correlation(t.column(c), label_col));

    report.shap_set = shap_select(model, t, k);
    report.correlation_set = correlation_select(t, threshold);
    report.paper_faithful = paper_faithful;

    if (paper_faithful) {
        report.selected = paper_selected_features();
    } else {
        for (const auto& name : report.shap_set) {
            if (std::find(report.correlation_set.begin(), report.correlation_set.end(), name) !=
                report.correlation_set.end()) {
                report.selected.push_back(name);
            }
        }
    }
    return report;
}

inline nlohmann::ordered_json selection_report_to_json(const SelectionReport& r) {
    nlohmann::ordered_json features = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
        const auto& name = r.columns[c];
        const bool in_s1 =
            std::find(r.shap_set.begin(), r.shap_set.end(), name) != r.shap_set.end();
        const bool in_s2 = std::find(r.correlation_set.begin(), r.correlation_set.end(), name) !=
                           r.correlation_set.end();
        const bool sel = std::find(r.selected.begin(), r.selected.end(), name) != r.selected.end();
        features[name] = {{"mean_abs_shap", r.mean_abs_shap[c]},
                          {"pearson_r", r.pearson_r[c]},
                          {"in_S1", in_s1},
                          {"in_S2", in_s2},
                          {"selected", sel}};
    }
    nlohmann::ordered_json j;
    j["column_census"] = r.columns.size();
    j["paper_faithful"] = r.paper_faithful;
    j["s1"] = r.shap_set;
    j["s2"] = r.correlation_set;
    j["selected"] = r.selected;
    j["features"] = std::move(features);
    return j;
}

// ---- assembly ----

struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;  // 1.0 for constant columns
};

struct AssembledVectors {
    std::vector<std::string> ids;
    std::vector<std::string> selected;  // feature names, in vector order
    Standardization standardization;
    std::size_t embedding_dim = 0;
    Matrix rows;  // |selected| + embedding_dim columns
    std::vector<int> labels;
};

/// Concatenates z-scored selected features with the (unscaled) embedding
/// row of each user. The standardization statistics are retained for
/// inference.
inline AssembledVectors assemble(const FeatureTable& t, const std::vector<std::string>& selected,
                                 const NodeEmbeddings& emb) {
    AssembledVectors av;
    av.ids = t.ids;
    av.selected = selected;
    av.labels = t.labels;
    av.embedding_dim = emb.matrix.cols;

    std::vector<std::size_t> sel_cols;
    sel_cols.reserve(selected.size());
    for (const auto& name : selected) sel_cols.push_back(t.column_index(name));

    av.standardization.mean.resize(selected.size());
    av.standardization.stddev.resize(selected.size());
    for (std::size_t s = 0; s < sel_cols.size(); ++s) {
        const auto col = t.column(sel_cols[s]);
        av.standardization.mean[s] = mean(col);
        const double sd = std::sqrt(variance(col));
        av.standardization.stddev[s] = sd > 1e-12 ? sd : 1.0;
    }

    av.rows = Matrix(t.values.rows, selected.size() + emb.matrix.cols);
    for (std::size_t r = 0; r < t.values.rows; ++r) {
        const auto it = emb.index_of.find(t.ids[r]);
        if (it == emb.index_of.end()) throw MissingEmbeddingError(t.ids[r]);
        for (std::size_t s = 0; s < sel_cols.size(); ++s) {
            av.rows.at(r, s) = (t.values.at(r, sel_cols[s]) - av.standardization.mean[s]) /
                               av.standardization.stddev[s];
        }
        const auto erow = emb.matrix.row(it->second);
        for (std::size_t d = 0; d < emb.matrix.cols; ++d)
            av.rows.at(r, selected.size() + d) = erow[d];
    }
    return av;
}

inline void write_assembled_csv(const std::string& path, const AssembledVectors& av) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    out << "id";
    for (const auto& name : av.selected) out << ',' << name;
    for (std::size_t d = 1; d <= av.embedding_dim; ++d) out << ",v" << d;
    out << ",label\n";
    for (std::size_t r = 0; r < av.rows.rows; ++r) {
        out << av.ids[r];
        for (std::size_t c = 0; c < av.rows.cols; ++c) out << ',' << format_g17(av.rows.at(r, c));
        out << ',' << (av.labels.empty() ? 0 : av.labels[r]) << '\n';
    }
}

}  // namespace spamdet
