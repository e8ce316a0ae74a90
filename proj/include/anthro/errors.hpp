#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anthro {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller passed an argument outside an operation's contract.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Errors caused by the content of input data rather than by the caller.
/// The CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& msg, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public DataError {
public:
    using DataError::DataError;
};

class DuplicateLandmarkError : public DataError {
public:
    DuplicateLandmarkError(const std::string& subject, int id);
    int landmark_id() const noexcept { return id_; }

private:
    int id_;
};

class MissingLandmarkError : public DataError {
public:
    /// pair_index is -1 when the lookup is not tied to a PairSpec entry.
    MissingLandmarkError(int id, int pair_index = -1);
    int landmark_id() const noexcept { return id_; }
    int pair_index() const noexcept { return pair_; }

private:
    int id_;
    int pair_;
};

#define ANTHRO_DATA_ERROR(Name)                                  \
    class Name : public DataError {                              \
    public:                                                      \
        using DataError::DataError;                              \
    }

ANTHRO_DATA_ERROR(EmptyMeshError);
ANTHRO_DATA_ERROR(EmptyImageError);
ANTHRO_DATA_ERROR(EmptyCropError);
ANTHRO_DATA_ERROR(DegenerateConfigurationError);
ANTHRO_DATA_ERROR(InsufficientSupportError);
ANTHRO_DATA_ERROR(RankDeficientError);
ANTHRO_DATA_ERROR(SingularSystemError);
ANTHRO_DATA_ERROR(NotConvergedError);
ANTHRO_DATA_ERROR(NonPositiveEigenvalueError);
ANTHRO_DATA_ERROR(EmptyGalleryError);
ANTHRO_DATA_ERROR(UnmatchedProbeError);
ANTHRO_DATA_ERROR(TooFewSubjectsError);
ANTHRO_DATA_ERROR(NotFoundError);

#undef ANTHRO_DATA_ERROR

class InvalidModeCountError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionMismatchError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class IncompatibleMetricError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidKError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// The service could not listen on the requested address.
class BindError : public Error {
public:
    using Error::Error;
};

} // namespace anthro
