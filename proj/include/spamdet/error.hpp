#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spamdet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- ingestion ----

struct MalformedLineError : Error {
    std::size_t line_no;
    MalformedLineError(std::size_t line, const std::string& detail)
        : Error("malformed line " + std::to_string(line) + ": " + detail), line_no(line) {}
};

struct DuplicateIdError : Error {
    std::string id;
    explicit DuplicateIdError(std::string user_id)
        : Error("duplicate user id: " + user_id), id(std::move(user_id)) {}
};

struct InvalidDateError : Error {
    std::string id;
    InvalidDateError(std::string user_id, const std::string& detail)
        : Error("invalid created_at for user " + user_id + ": " + detail), id(std::move(user_id)) {}
};

struct SelfLoopError : Error {
    std::string id;
    std::size_t line_no;
    SelfLoopError(std::string node_id, std::size_t line)
        : Error("self-loop on id " + node_id + " at line " + std::to_string(line)),
          id(std::move(node_id)),
          line_no(line) {}
};

struct FileError : Error {
    using Error::Error;
};

// ---- graph ----

struct GraphTooSmallError : Error {
    GraphTooSmallError(std::size_t needed, std::size_t actual)
        : Error("graph too small: need >= " + std::to_string(needed) + " nodes, have " +
                std::to_string(actual)) {}
};

struct NotConvergedError : Error {
    int max_iters;
    explicit NotConvergedError(int iters)
        : Error("iteration did not converge within " + std::to_string(iters) + " steps"),
          max_iters(iters) {}
};

struct NotAnEdgeError : Error {
    NotAnEdgeError() : Error("requested transition is not along a graph edge") {}
};

// ---- features ----

struct FutureCreationError : Error {
    FutureCreationError() : Error("created_at is after the snapshot date") {}
};

struct MissingUserError : Error {
    std::string id;
    explicit MissingUserError(std::string user_id)
        : Error("no feature inputs for user " + user_id), id(std::move(user_id)) {}
};

struct MissingEmbeddingError : Error {
    std::string id;
    explicit MissingEmbeddingError(std::string user_id)
        : Error("no embedding row for user " + user_id), id(std::move(user_id)) {}
};

struct LengthMismatchError : Error {
    LengthMismatchError() : Error("vector lengths do not match (or are too short)") {}
};

struct NoLabelsError : Error {
    NoLabelsError() : Error("feature table has no label column") {}
};

struct DimensionMismatchError : Error {
    DimensionMismatchError(std::size_t expected, std::size_t actual)
        : Error("feature dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)) {}
};

// ---- models ----

struct SingleClassError : Error {
    SingleClassError() : Error("training data contains a single class") {}
};

struct EmptyDataError : Error {
    EmptyDataError() : Error("training data is empty") {}
};

struct EmptyWalksError : Error {
    EmptyWalksError() : Error("walk set is empty") {}
};

struct DegenerateEvalError : Error {
    DegenerateEvalError() : Error("a class is absent from y_true; recall undefined") {}
};

struct InsufficientClassCountError : Error {
    InsufficientClassCountError()
        : Error("a class has fewer members than the number of folds") {}
};

struct ConfigInvalidError : Error {
    using Error::Error;
};

struct ScoreReferenceError : Error {
    std::string id;
    explicit ScoreReferenceError(std::string user_id)
        : Error("cannot score user " + user_id + ": not present in the dataset/graph"),
          id(std::move(user_id)) {}
};

}  // namespace spamdet
