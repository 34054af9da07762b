#include <gtest/gtest.h>

#include "spamdet/io.hpp"
#include "spamdet/synth.hpp"
#include "test_util.hpp"

using namespace spamdet;

namespace {

const CivilDate kSnapshot{2020, 5, 1};

TEST(ParseUsers, DefaultsFillMissingFields) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path,
                         R"({"id":"u1","user_name":"A","screen_name":"A","created_at":"2019-01-01","lang":"en"})"
                         "\n");
    const auto users = parse_users_file(path, kSnapshot);
    ASSERT_EQ(users.size(), 1u);
    EXPECT_EQ(users[0].id, "u1");
    EXPECT_EQ(users[0].statuses_count, 0);
    EXPECT_EQ(users[0].followers_count, 0);
    EXPECT_FALSE(users[0].verified);
    EXPECT_FALSE(users[0].geo_enabled);
    EXPECT_EQ(users[0].description, "");
    EXPECT_FALSE(users[0].label.has_value());
    EXPECT_EQ(users[0].created_at, (CivilDate{2019, 1, 1}));
}

TEST(ParseUsers, DuplicateIdRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path,
                         R"({"id":"u1","created_at":"2019-01-01"})"
                         "\n"
                         R"({"id":"u1","created_at":"2019-01-02"})"
                         "\n");
    EXPECT_THROW(parse_users_file(path, kSnapshot), DuplicateIdError);
}

TEST(ParseUsers, OrderPreservedAcrossRoundTrip) {
    testutil::TempDir dir;
    std::vector<UserRecord> users(5);
    for (int i = 0; i < 5; ++i) {
        users[i].id = "u" + std::to_string(5 - i);  // deliberately not sorted
        users[i].user_name = "name" + std::to_string(i);
        users[i].screen_name = "screen" + std::to_string(i);
        users[i].statuses_count = i * 10;
        users[i].created_at = CivilDate{2018, 3, i + 1};
        users[i].label = i % 2;
    }
    const auto path = dir.file("users.jsonl");
    write_users_file(path, users);
    const auto parsed = parse_users_file(path, kSnapshot);
    ASSERT_EQ(parsed.size(), users.size());
    for (std::size_t i = 0; i < users.size(); ++i) EXPECT_EQ(parsed[i], users[i]);
}

TEST(ParseUsers, MalformedJsonRaisesWithLineNumber) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path,
                         R"({"id":"u1","created_at":"2019-01-01"})"
                         "\n{{{\n");
    try {
        parse_users_file(path, kSnapshot);
        FAIL() << "expected MalformedLineError";
    } catch (const MalformedLineError& e) {
        EXPECT_EQ(e.line_no, 2u);
    }
}

TEST(ParseUsers, CreatedAfterSnapshotRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path, R"({"id":"u1","created_at":"2021-01-01"})"
                               "\n");
    EXPECT_THROW(parse_users_file(path, kSnapshot), InvalidDateError);
}

TEST(ParseUsers, UnparseableDateRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path, R"({"id":"u1","created_at":"yesterday"})"
                               "\n");
    EXPECT_THROW(parse_users_file(path, kSnapshot), InvalidDateError);
}

TEST(ParseUsers, NegativeCountRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("users.jsonl");
    testutil::write_file(path,
                         R"({"id":"u1","created_at":"2019-01-01","followers_count":-3})"
                         "\n");
    EXPECT_THROW(parse_users_file(path, kSnapshot), MalformedLineError);
}

TEST(ParseEdges, BasicPairAndComments) {
    testutil::TempDir dir;
    const auto path = dir.file("edges.tsv");
    testutil::write_file(path, "# follower\tfollowed\na\tb\n");
    const auto edges = parse_edges_file(path);
    ASSERT_EQ(edges.size(), 1u);
    EXPECT_EQ(edges[0], std::make_pair(std::string("a"), std::string("b")));
}

TEST(ParseEdges, SelfLoopRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("edges.tsv");
    testutil::write_file(path, "a\ta\n");
    EXPECT_THROW(parse_edges_file(path), SelfLoopError);
}

TEST(ParseEdges, DuplicatesCollapse) {
    testutil::TempDir dir;
    const auto path = dir.file("edges.tsv");
    testutil::write_file(path, "a\tb\nc\td\na\tb\n");
    const auto edges = parse_edges_file(path);
    ASSERT_EQ(edges.size(), 2u);
    EXPECT_EQ(edges[0].first, "a");
    EXPECT_EQ(edges[1].first, "c");
}

TEST(ParseEdges, MissingTabRejected) {
    testutil::TempDir dir;
    const auto path = dir.file("edges.tsv");
    testutil::write_file(path, "a b\n");
    try {
        parse_edges_file(path);
        FAIL() << "expected MalformedLineError";
    } catch (const MalformedLineError& e) {
        EXPECT_EQ(e.line_no, 1u);
    }
}

TEST(ParseTweets, BasicAndConcatenation) {
    testutil::TempDir dir;
    const auto path = dir.file("tweets.jsonl");
    testutil::write_file(path,
                         R"({"user_id":"u1","tweets":["hi"]})"
                         "\n"
                         R"({"user_id":"u1","tweets":["again"],"retweet_counts":[4]})"
                         "\n");
    const auto corpus = parse_tweets_file(path);
    ASSERT_EQ(corpus.size(), 1u);
    const auto& tweets = corpus.at("u1");
    ASSERT_EQ(tweets.size(), 2u);
    EXPECT_EQ(tweets[0], "hi");
    EXPECT_EQ(tweets[1], "again");
}

TEST(ParseTweets, EmptyFileGivesEmptyCorpus) {
    testutil::TempDir dir;
    const auto path = dir.file("tweets.jsonl");
    testutil::write_file(path, "");
    EXPECT_TRUE(parse_tweets_file(path).empty());
}

TEST(ParseLexicon, UnigramsAndBigrams) {
    testutil::TempDir dir;
    const auto path = dir.file("lexicon.txt");
    testutil::write_file(path, "buy\nclick here\nFREE\n");
    const auto lex = parse_lexicon_file(path);
    EXPECT_TRUE(lex.unigrams.contains("buy"));
    EXPECT_TRUE(lex.unigrams.contains("free"));
    EXPECT_TRUE(lex.bigrams.contains({"click", "here"}));
    EXPECT_EQ(lex.unigrams.size(), 2u);
    EXPECT_EQ(lex.bigrams.size(), 1u);
}

TEST(ValidateDataset, ConsistentDatasetHasNoIssues) {
    Dataset d;
    d.snapshot_date = kSnapshot;
    UserRecord u;
    u.id = "u1";
    u.created_at = CivilDate{2019, 1, 1};
    u.label = 0;
    d.users.push_back(u);
    u.id = "u2";
    u.label = 1;
    d.users.push_back(u);
    d.edges = {{"u1", "u2"}};
    d.tweets["u1"] = {"hello"};
    const auto report = validate_dataset(d);
    EXPECT_TRUE(report.issues.empty());
    EXPECT_TRUE(report.accepted());
}

TEST(ValidateDataset, UnknownTweetUserBlocks) {
    Dataset d;
    d.snapshot_date = kSnapshot;
    UserRecord u;
    u.id = "u1";
    u.created_at = CivilDate{2019, 1, 1};
    d.users.push_back(u);
    d.tweets["ghost"] = {"boo"};
    const auto report = validate_dataset(d);
    EXPECT_FALSE(report.accepted());
    ASSERT_EQ(report.issues.size(), 1u);
    EXPECT_EQ(report.issues[0].kind, ValidationIssue::Kind::UnknownTweetUser);
    EXPECT_EQ(report.issues[0].id, "ghost");
}

TEST(ValidateDataset, ClassCounts) {
    Dataset d;
    d.snapshot_date = kSnapshot;
    for (int i = 0; i < 5; ++i) {
        UserRecord u;
        u.id = "u" + std::to_string(i);
        u.created_at = CivilDate{2019, 1, 1};
        u.label = i < 3 ? 1 : 0;
        d.users.push_back(u);
        d.edges.emplace_back(u.id, "hub");
    }
    const auto report = validate_dataset(d);
    EXPECT_EQ(report.class_counts.at(1), 3u);
    EXPECT_EQ(report.class_counts.at(0), 2u);
}

// Canonical round trip: parse(write(d)) == d, and a second write is
// byte-identical.
TEST(RoundTrip, DatasetSurvivesWriteParseWrite) {
    testutil::TempDir dir;
    SynthConfig cfg;
    cfg.n_genuine = 12;
    cfg.n_spam = 6;
    cfg.seed = 7;
    const Dataset d = generate_synth_dataset(cfg);

    DatasetPaths paths{dir.file("users.jsonl"), dir.file("tweets.jsonl"), dir.file("edges.tsv"),
                       dir.file("lexicon.txt"), dir.file("labels.csv")};
    write_dataset(paths, d);
    const Dataset reparsed = load_dataset(paths, cfg.snapshot_date);
    EXPECT_EQ(reparsed, d);

    DatasetPaths paths2{dir.file("users2.jsonl"), dir.file("tweets2.jsonl"),
                        dir.file("edges2.tsv"), dir.file("lexicon2.txt"), dir.file("labels2.csv")};
    write_dataset(paths2, reparsed);
    EXPECT_EQ(testutil::read_file(paths.users), testutil::read_file(paths2.users));
    EXPECT_EQ(testutil::read_file(paths.tweets), testutil::read_file(paths2.tweets));
    EXPECT_EQ(testutil::read_file(paths.edges), testutil::read_file(paths2.edges));
    EXPECT_EQ(testutil::read_file(paths.lexicon), testutil::read_file(paths2.lexicon));
    EXPECT_EQ(testutil::read_file(paths.labels), testutil::read_file(paths2.labels));
}

}  // namespace
